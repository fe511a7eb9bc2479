#include "gpmisspec/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpmisspec/designs.hpp"
#include "gpmisspec/error.hpp"
#include "gpmisspec/experiments.hpp"
#include "gpmisspec/gp_core.hpp"
#include "gpmisspec/mle.hpp"
#include "gpmisspec/parallel.hpp"
#include "gpmisspec/report.hpp"
#include "gpmisspec/version.hpp"
#include "selftest.hpp"

namespace gpmisspec::cli {

using ordered_json = nlohmann::ordered_json;

std::vector<double> read_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str() + first, &end);
    const std::string rest(end);
    if (end == line.c_str() + first || rest.find_first_not_of(" \t\r") != std::string::npos || !std::isfinite(v)) {
      throw Error(ErrorCode::parse, path + ":" + std::to_string(lineno) + ": expected one finite number");
    }
    values.push_back(v);
  }
  return values;
}

void write_values(const std::vector<double>& values, const std::string& path) {
  std::string text;
  for (double v : values) text += format_double(v) + "\n";
  write_text_file(path, text);
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::uint64_t h = 14695981039346656037ULL;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

namespace {

/// Raised for bad option values found after CLI11 parsing; maps to exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string version_string() { return std::string("gpmisspec ") + kVersion + " (build " + kBuildDigest + ")"; }

MaternParams kernel_arg(const std::string& text, const char* flag) {
  try {
    return parse_kernel_spec(text);
  } catch (const Error& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

DesignKind family_arg(const std::string& text) {
  if (text == "grid") return DesignKind::grid;
  if (text == "halton") return DesignKind::halton;
  throw UsageError("--design must be grid or halton, got '" + text + "'");
}

/// Everything a command needs to write outputs with manifests beside them.
struct RunContext {
  std::vector<std::string> argv;
  std::string command;
  const CLI::App* sub = nullptr;
  std::string started = utc_now();
  std::map<std::string, std::string> inputs;
  std::optional<std::uint64_t> seed;
  std::ostream& out;
  std::ostream& err;

  void add_input(const std::string& path) { inputs[path] = file_digest(path); }

  ordered_json config() const {
    ordered_json j = ordered_json::object();
    if (!sub) return j;
    for (const CLI::Option* opt : sub->get_options()) {
      if (opt->count() == 0 || opt->get_name() == "--help") continue;
      const auto& res = opt->results();
      if (res.size() == 1) {
        j[opt->get_name()] = res.front();
      } else {
        j[opt->get_name()] = res;
      }
    }
    return j;
  }

  void write_output(const std::string& path, const std::string& content) const {
    write_text_file(path, content);
    ordered_json m;
    m["tool"] = "gpmisspec";
    m["version"] = kVersion;
    m["build"] = kBuildDigest;
    m["command"] = command;
    m["argv"] = argv;
    m["config"] = config();
    m["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
    ordered_json in = ordered_json::object();
    for (const auto& [p, d] : inputs) in[p] = d;
    m["inputs"] = in;
    m["output"] = path;
    m["output_digest"] = file_digest(path);
    m["started"] = started;
    m["finished"] = utc_now();
    write_text_file(path + ".manifest.json", m.dump(2) + "\n");
  }
};

void print_json(std::ostream& out, const ordered_json& j) { out << j.dump(2) << "\n"; }

ordered_json parse_json_text(const std::string& text) { return ordered_json::parse(text); }

Design load_design(RunContext& ctx, const std::string& path) {
  ctx.add_input(path);
  return read_design(path);
}

void warn_clamped(const Moments& m, std::ostream& err) {
  if (m.clamped) err << "warning: slightly negative variance clamped to 0\n";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian-process scale estimation under Matern misspecification", "gpmisspec"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1, 1);
  app.fallthrough();
  unsigned threads = 0;
  bool threads_set = false;
  app.add_option_function<unsigned>(
         "--threads", [&](unsigned t) { threads = t, threads_set = true; }, "Worker thread cap (0 = all cores)");

  bool json = false;
  std::string design_path, data_path, queries_path, truth_spec, model_spec, out_csv, out_svg, out_path, dump_gram;
  std::string kind = "grid", family = "grid";
  std::size_t dim = 1, count = 0, resolution = 65, replicates = 0, test_points = kTestGridPoints;
  std::uint64_t seed = 0;
  double amplitude = 0.25;
  std::vector<std::size_t> sizes;
  std::optional<double> tolerance;

  // design
  auto* design = app.add_subcommand("design", "Generate or inspect designs");
  design->require_subcommand(1, 1);
  auto* design_gen = design->add_subcommand("gen", "Write a design file");
  design_gen->add_option("--kind", kind, "grid | halton | jittered")->check(CLI::IsMember({"grid", "halton", "jittered"}));
  design_gen->add_option("--d", dim, "Dimension")->check(CLI::Range(1, 6));
  design_gen->add_option("--n", count, "Number of points (grid: m^d)")->required();
  design_gen->add_option("--amplitude", amplitude, "Jitter as a fraction of the half cell width, in [0, 1)");
  design_gen->add_option("--seed", seed, "Seed for jittered grids");
  design_gen->add_option("--out", out_path, "Output design file")->required();
  auto* design_stats = design->add_subcommand("stats", "Fill distance and separation radius");
  design_stats->add_option("--in,--design", design_path, "Design file")->required();
  design_stats->add_option("--resolution", resolution, "Candidates per axis for the fill search (d >= 2)");
  design_stats->add_flag("--json", json, "JSON output");

  // gp
  auto* gp = app.add_subcommand("gp", "Conditioned Gaussian process");
  gp->require_subcommand(1, 1);
  auto* gp_predict = gp->add_subcommand("predict", "Conditional mean and variance at query points");
  gp_predict->add_option("--model,--kernel", model_spec, "Kernel spec, e.g. matern:nu=1.5,theta=1,sigma=1")->required();
  gp_predict->add_option("--design", design_path, "Design file")->required();
  gp_predict->add_option("--data", data_path, "Data file, one value per line")->required();
  gp_predict->add_option("--query,--queries", queries_path, "Query points in design file format")->required();
  gp_predict->add_option("--out-csv", out_csv, "CSV output (default stdout)");
  gp_predict->add_option("--dump-gram", dump_gram, "Write the Gram matrix to this path");
  gp_predict->add_flag("--json", json, "JSON output");

  // mle
  auto* mle = app.add_subcommand("mle", "Scale maximum-likelihood estimate");
  mle->require_subcommand(1, 1);
  auto* mle_expected = mle->add_subcommand("expected", "tr(K R^-1) / N");
  auto* mle_decompose = mle->add_subcommand("decompose", "Sequential decomposition of the expected MLE");
  for (auto* sub : {mle_expected, mle_decompose}) {
    sub->add_option("--true", truth_spec, "Data-generating kernel spec")->required();
    sub->add_option("--model", model_spec, "Model kernel spec (sigma = 1)")->required();
    sub->add_option("--design", design_path, "Design file")->required();
    sub->add_option("--dump-gram", dump_gram, "Write K and R Gram matrices to <path>.K and <path>.R");
    sub->add_flag("--json", json, "JSON output");
  }
  mle_decompose->add_option("--out-csv", out_csv, "CSV output (default stdout)");
  auto* mle_estimate = mle->add_subcommand("estimate", "X^T R^-1 X / N from data");
  mle_estimate->add_option("--model", model_spec, "Model kernel spec (sigma = 1)")->required();
  mle_estimate->add_option("--design", design_path, "Design file")->required();
  mle_estimate->add_option("--data", data_path, "Data file, one value per line")->required();
  mle_estimate->add_flag("--json", json, "JSON output");

  // sweeps
  auto add_sweep_common = [&](CLI::App* sub) {
    sub->add_option("--d", dim, "Dimension")->check(CLI::Range(1, 6));
    sub->add_option("--design", family, "grid | halton");
    sub->add_option("--sizes", sizes, "Comma-separated strictly increasing sizes")->delimiter(',')->required();
    sub->add_option("--out-csv", out_csv, "CSV output (default stdout)");
    sub->add_flag("--json", json, "JSON output");
  };
  auto* driscoll = app.add_subcommand("driscoll", "Trace growth along a nested family");
  driscoll->add_option("--true", truth_spec, "Data-generating kernel spec")->required();
  driscoll->add_option("--model", model_spec, "Model kernel spec (sigma = 1)")->required();
  add_sweep_common(driscoll);

  auto* rate = app.add_subcommand("rate-sweep", "Expected MLE growth rate against theory");
  rate->add_option("--true", truth_spec, "Data-generating kernel spec")->required();
  rate->add_option("--model", model_spec, "Model kernel spec (sigma = 1)")->required();
  add_sweep_common(rate);
  rate->add_option("--mc-replicates", replicates, "Monte-Carlo replicates per size (0 = off)");
  rate->add_option("--seed", seed, "Monte-Carlo seed");
  rate->add_option("--resolution", resolution, "Fill-distance candidates per axis (d >= 2)");
  rate->add_option("--tolerance", tolerance, "Slope tolerance (default by exponent)");
  rate->add_option("--out-svg", out_svg, "SVG plot");

  auto* variance = app.add_subcommand("variance-sweep", "Decay of the sup conditional variance");
  variance->add_option("--model", model_spec, "Kernel spec")->required();
  add_sweep_common(variance);
  variance->add_option("--test-points", test_points, "Test grid cardinality (4096)");
  variance->add_option("--tolerance", tolerance, "Slope tolerance (default by exponent)");
  variance->add_option("--out-svg", out_svg, "SVG plot");

  auto* selftest = app.add_subcommand("selftest", "Run the embedded invariant suite");
  selftest->add_flag("--json", json, "JSON output");

  std::vector<std::string> argv{"gpmisspec"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help or --version
      app.exit(e, out, err);
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    const CLI::App* help_for = &app;
    for (const CLI::App* s : {design, gp, mle}) {
      if (s->parsed()) help_for = s;
    }
    for (const CLI::App* s : {design_gen, design_stats, gp_predict, mle_expected, mle_decompose, mle_estimate,
                              driscoll, rate, variance, selftest}) {
      if (s->parsed()) help_for = s;
    }
    err << help_for->help();
    return 2;
  }

  if (threads_set) set_max_threads(threads);

  RunContext ctx{args, "", nullptr, utc_now(), {}, std::nullopt, out, err};
  const CLI::App* leaf = nullptr;
  for (const CLI::App* s : {design_gen, design_stats, gp_predict, mle_expected, mle_decompose, mle_estimate, driscoll,
                            rate, variance, selftest}) {
    if (s->parsed()) leaf = s;
  }
  ctx.sub = leaf;
  if (leaf == design_gen || leaf == design_stats) {
    ctx.command = "design " + leaf->get_name();
  } else if (leaf == gp_predict) {
    ctx.command = "gp predict";
  } else if (leaf == mle_expected || leaf == mle_decompose || leaf == mle_estimate) {
    ctx.command = "mle " + leaf->get_name();
  } else {
    ctx.command = leaf->get_name();
  }

  try {
    if (leaf == design_gen) {
      Design d = kind == "halton" ? gen_halton(dim, count) : make_design(DesignKind::grid, dim, count);
      if (kind == "jittered") {
        // the grid above validated count = m^d
        const auto m = static_cast<std::size_t>(
            std::llround(std::pow(static_cast<double>(count), 1.0 / static_cast<double>(dim))));
        ctx.seed = seed;
        d = gen_jittered_grid(dim, m, amplitude, seed);
      }
      ctx.write_output(out_path, format_design(d));
      return 0;
    }

    if (leaf == design_stats) {
      const Design d = load_design(ctx, design_path);
      const auto g = geometry(d, resolution);
      if (json) {
        ordered_json j;
        j["d"] = d.dim();
        j["n"] = d.size();
        j["kind"] = to_string(d.kind());
        j["fill_distance"] = g.fill_distance;
        j["separation_radius"] = g.separation_radius;
        j["ratio"] = g.ratio;
        j["fill_exact"] = g.resolution_used == 0;
        j["resolution"] = g.resolution_used;
        print_json(out, j);
      } else {
        out << "n,fill,separation,ratio\n"
            << d.size() << "," << format_double(g.fill_distance) << "," << format_double(g.separation_radius) << ","
            << format_double(g.ratio) << "\n";
        if (g.resolution_used > 0) {
          err << "note: fill distance is a grid-search lower bound, " << g.resolution_used << " candidates per axis\n";
        }
      }
      return 0;
    }

    if (leaf == gp_predict) {
      const auto params = kernel_arg(model_spec, "--model");
      const Design d = load_design(ctx, design_path);
      ctx.add_input(data_path);
      auto data = read_values(data_path);
      ctx.add_input(queries_path);
      const Design q = read_design(queries_path);
      const auto kernel = KernelHandle::matern(params, d.dim());
      if (!dump_gram.empty()) ctx.write_output(dump_gram, format_gram(assemble_gram(kernel, d)));
      const ConditionedModel model(kernel, d, std::move(data));
      std::string csv;
      for (std::size_t a = 0; a < q.dim(); ++a) csv += "x" + std::to_string(a) + ",";
      csv += "mean,variance\n";
      ordered_json rows = ordered_json::array();
      for (std::size_t i = 0; i < q.size(); ++i) {
        const auto m = conditional_moments(model, q.point(i));
        warn_clamped(m, err);
        for (double x : q.point(i)) csv += format_double(x) + ",";
        csv += format_double(m.mean) + "," + format_double(m.variance) + "\n";
        rows.push_back({{"x", std::vector<double>(q.point(i).begin(), q.point(i).end())},
                        {"mean", m.mean},
                        {"variance", m.variance},
                        {"clamped", m.clamped}});
      }
      if (!out_csv.empty()) ctx.write_output(out_csv, csv);
      if (json) {
        ordered_json j;
        j["kernel"] = format_kernel_spec(params);
        j["jitter"] = model.factor().jitter();
        j["predictions"] = rows;
        print_json(out, j);
      } else if (out_csv.empty()) {
        out << csv;
      }
      return 0;
    }

    if (leaf == mle_expected || leaf == mle_decompose) {
      const auto truth = kernel_arg(truth_spec, "--true");
      const auto model = kernel_arg(model_spec, "--model");
      const Design d = load_design(ctx, design_path);
      const MisspecScenario s{truth, model, d.dim()};
      try {
        s.validate();
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      if (!dump_gram.empty()) {
        ctx.write_output(dump_gram + ".K", format_gram(assemble_gram(s.truth_kernel(), d)));
        ctx.write_output(dump_gram + ".R", format_gram(assemble_gram(s.model_kernel(), d)));
      }
      if (leaf == mle_expected) {
        const auto e = expected_mle_report(s, d);
        if (json) {
          ordered_json j;
          j["scenario"] = parse_json_text(rate_json(RateFitReport{.scenario = s}))["scenario"];
          j["n"] = e.n;
          j["expected_mle"] = e.value;
          j["trace"] = e.trace;
          j["jitter_model"] = e.jitter_model;
          if (s.truth.nu == s.model.nu) {
            const auto b = matern_range_bounds(s);
            j["bounds"] = {b.lower, b.upper};
          }
          print_json(out, j);
        } else {
          out << format_double(e.value) << "\n";
        }
        if (e.jitter_model > 0) err << "note: model Gram jitter " << format_double(e.jitter_model) << "\n";
      } else {
        const auto r = mle_decomposition(s, d);
        const std::string csv = decomposition_csv(r);
        if (!out_csv.empty()) ctx.write_output(out_csv, csv);
        if (json) {
          ordered_json j;
          j["n"] = d.size();
          j["mean"] = r.mean;
          j["trace_over_n"] = r.trace_over_n;
          j["relative_gap"] = r.relative_gap();
          j["jitter_model"] = r.jitter_model;
          print_json(out, j);
        } else if (out_csv.empty()) {
          out << csv;
        }
      }
      return 0;
    }

    if (leaf == mle_estimate) {
      const auto model = kernel_arg(model_spec, "--model");
      const Design d = load_design(ctx, design_path);
      ctx.add_input(data_path);
      const auto data = read_values(data_path);
      const double v = scale_mle(KernelHandle::matern(model, d.dim()), d, data);
      if (json) {
        ordered_json j;
        j["model"] = format_kernel_spec(model);
        j["n"] = d.size();
        j["sigma2_hat"] = v;
        print_json(out, j);
      } else {
        out << format_double(v) << "\n";
      }
      return 0;
    }

    if (leaf == driscoll) {
      const MisspecScenario s{kernel_arg(truth_spec, "--true"), kernel_arg(model_spec, "--model"), dim};
      try {
        s.validate();
        validate_sizes(sizes);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      const DesignKind kind_arg = family_arg(family);
      const Design base = kind_arg == DesignKind::halton ? gen_halton(dim, sizes.back())
                                                         : make_design(DesignKind::grid, dim, sizes.back());
      const auto nested = prefix_family(base, sizes);
      const auto r = driscoll_trace(s, nested);
      const std::string csv = driscoll_csv(r);
      if (!out_csv.empty()) ctx.write_output(out_csv, csv);
      if (json) {
        out << driscoll_json(r);
      } else {
        if (out_csv.empty()) out << csv;
        ordered_json verdict;
        verdict["slope"] = r.fit.slope;
        verdict["classification"] = to_string(r.classification);
        verdict["label"] = r.label;
        out << verdict.dump() << "\n";
      }
      return 0;
    }

    if (leaf == rate) {
      SweepConfig cfg;
      cfg.scenario = MisspecScenario{kernel_arg(truth_spec, "--true"), kernel_arg(model_spec, "--model"), dim};
      cfg.family = family_arg(family);
      cfg.sizes = sizes;
      cfg.fill_resolution = resolution;
      cfg.seed = seed;
      cfg.replicates = replicates;
      cfg.slope_tolerance = tolerance;
      try {
        cfg.validate();
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      if (replicates > 0) ctx.seed = seed;
      const auto r = rate_sweep(cfg);
      if (!r.banner.empty()) err << "note: " << r.banner << " (model rougher than truth)\n";
      for (const auto& f : r.failures) err << "warning: size dropped, " << f << "\n";
      const std::string csv = rate_csv(r);
      if (!out_csv.empty()) ctx.write_output(out_csv, csv);
      if (!out_svg.empty()) {
        if (r.rows.size() < 3) throw Error(ErrorCode::domain, "SVG needs at least 3 completed sizes");
        ctx.write_output(out_svg, render_svg(make_plot(r)));
      }
      if (json) {
        out << rate_json(r);
      } else {
        if (out_csv.empty()) out << csv;
        out << "slope " << format_double(r.fit.slope) << " r2 " << format_double(r.fit.r_squared) << " theory "
            << format_double(r.theoretical_slope) << " tolerance " << format_double(r.tolerance) << " "
            << (r.pass ? "PASS" : "FAIL") << "\n";
      }
      return 0;
    }

    if (leaf == variance) {
      const auto params = kernel_arg(model_spec, "--model");
      const DesignKind kind_arg = family_arg(family);
      try {
        validate_sizes(sizes);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      std::vector<Design> designs;
      for (std::size_t n : sizes) designs.push_back(make_design(kind_arg, dim, n));
      const auto r = variance_decay_sweep(KernelHandle::matern(params, dim), designs, make_test_grid(dim, test_points),
                                          tolerance);
      for (const auto& row : r.rows) {
        if (row.clamped > 0) err << "warning: N=" << row.n << ": " << row.clamped << " variances clamped to 0\n";
      }
      const std::string csv = variance_csv(r);
      if (!out_csv.empty()) ctx.write_output(out_csv, csv);
      if (!out_svg.empty()) ctx.write_output(out_svg, render_svg(make_plot(r)));
      if (json) {
        out << variance_json(r);
      } else {
        if (out_csv.empty()) out << csv;
        out << "slope " << format_double(r.fit.slope) << " theory " << format_double(r.theoretical_slope)
            << " tolerance " << format_double(r.tolerance) << " test grid " << r.test_grid << " "
            << (r.pass ? "PASS" : "FAIL") << "\n";
      }
      return 0;
    }

    if (leaf == selftest) {
      const auto checks = run_selftest();
      bool all = true;
      for (const auto& c : checks) all = all && c.pass;
      if (json) {
        ordered_json j;
        ordered_json list = ordered_json::array();
        for (const auto& c : checks) list.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        j["checks"] = list;
        j["pass"] = all;
        print_json(out, j);
      } else {
        for (const auto& c : checks) {
          char line[256];
          std::snprintf(line, sizeof line, "%-4s  %-28s %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                        c.detail.c_str());
          out << line;
        }
        out << (all ? "all checks passed" : "some checks FAILED") << "\n";
      }
      return all ? 0 : 1;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << leaf->help();
    return 2;
  } catch (const Error& e) {
    err << "ERROR " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "ERROR io: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "ERROR io: " << e.what() << "\n";
    return 1;
  }
  err << "usage error: no command\n" << app.help();
  return 2;
}

}  // namespace gpmisspec::cli
