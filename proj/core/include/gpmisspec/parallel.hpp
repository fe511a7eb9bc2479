#pragma once

#include <cstddef>
#include <functional>

namespace gpmisspec {

/// Upper bound on worker threads used by the library. 0 means "machine
/// parallelism". Initialised from GPMISSPEC_THREADS when set.
void set_max_threads(unsigned n) noexcept;
[[nodiscard]] unsigned max_threads() noexcept;

/// Runs body(i) for i in [0, count). Each index is visited exactly once;
/// callers write into per-index slots and reduce in index order afterwards,
/// so results never depend on scheduling. Exceptions are rethrown (the one
/// from the lowest failing index).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace gpmisspec
