#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vexlab/decomposition.hpp"
#include "vexlab/diagnostics.hpp"
#include "vexlab/error.hpp"
#include "vexlab/exponent.hpp"
#include "vexlab/expression.hpp"
#include "vexlab/grid.hpp"
#include "vexlab/json_types.hpp"
#include "vexlab/oscillation.hpp"
#include "vexlab/probe.hpp"

namespace vexlab {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2 };

// Everything needed to rerun a job. `exponent_spec` is the resolved
// exponent document, so file: exponents survive edits of the file.
struct JobSpec {
  std::string command;
  std::string exponent;
  Json exponent_spec;  // null when no exponent was given
  std::string function;
  std::string grid;
  int dimension = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  bool strict = false;
  bool assert_finite = false;
  Json options = Json::object();

  Json to_json() const {
    return {{"command", command},
            {"exponent", exponent},
            {"exponent_spec", exponent_spec},
            {"function", function},
            {"grid", grid},
            {"dimension", dimension},
            {"seed", seed},
            {"out", out},
            {"format", format},
            {"strict", strict},
            {"assert_finite", assert_finite},
            {"options", options}};
  }

  static JobSpec from_json(const Json& j) {
    try {
      JobSpec s;
      s.command = j.at("command").get<std::string>();
      s.exponent = j.value("exponent", "");
      s.exponent_spec = j.value("exponent_spec", Json());
      s.function = j.value("function", "");
      s.grid = j.value("grid", "");
      s.dimension = j.value("dimension", 1);
      s.seed = j.value("seed", std::uint64_t{1});
      s.out = j.value("out", "");
      s.format = j.value("format", "json");
      s.strict = j.value("strict", false);
      s.assert_finite = j.value("assert_finite", false);
      s.options = j.value("options", Json::object());
      return s;
    } catch (const Json::exception& e) {
      throw SpecError(std::string("malformed job spec: ") + e.what());
    }
  }
};

struct DiagnosticsReport {
  JobSpec job;
  Json result;
  double wall_clock = 0.0;
  std::vector<std::string> warnings;
  std::string csv;  // set for jobs with a tabular form

  // Everything but the wall clock; identical jobs give identical payloads.
  Json payload() const {
    return {{"schema", kReportSchema},
            {"tool", "vexlab"},
            {"version", kToolVersion},
            {"job", job.to_json()},
            {"result", result},
            {"warnings", warnings}};
  }

  Json to_json() const {
    Json j = payload();
    j["wall_clock_seconds"] = wall_clock;
    return j;
  }
};

struct JobOutcome {
  DiagnosticsReport report;
  int exit_code = kExitOk;
};

// ---------------------------------------------------------------------------
// Inline exponent grammar: const:<v> | lerner:a=<alpha>,b=<beta> | file:<path>

namespace detail {

inline double parse_number(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
    throw SpecError(what + ": '" + text + "' is not a number");
  return v;
}

// Rewrites library validation errors as spec errors with the same message.
template <class Fn>
auto as_spec_error(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const SpecError&) {
    throw;
  } catch (const Error& e) {
    throw SpecError(e.what());
  }
}

}  // namespace detail

inline Json exponent_spec_from_text(const std::string& text, int dim) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw SpecError("exponent must be const:<v>, lerner:a=<α>,b=<β> or file:<path>");
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  if (kind == "const")
    return {{"family", "constant"},
            {"params", {{"value", detail::parse_number(rest, "const exponent")}}},
            {"dimension", dim}};
  if (kind == "lerner") {
    std::optional<double> a, b;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw SpecError("lerner exponent: expected key=value, got '" + item + "'");
      const std::string key = item.substr(0, eq);
      const double v = detail::parse_number(item.substr(eq + 1), "lerner " + key);
      if (key == "a" || key == "alpha") a = v;
      else if (key == "b" || key == "beta") b = v;
      else throw SpecError("lerner exponent: unknown key '" + key + "'");
    }
    if (!a || !b) throw SpecError("lerner exponent needs a=<α> and b=<β>");
    return {{"family", "lerner"}, {"params", {{"alpha", *a}, {"beta", *b}}}, {"dimension", dim}};
  }
  if (kind == "file") {
    std::ifstream in(rest);
    if (!in) throw SpecError("cannot read exponent file '" + rest + "'");
    try {
      return Json::parse(in);
    } catch (const Json::exception& e) {
      throw SpecError("exponent file '" + rest + "': " + e.what());
    }
  }
  throw SpecError("unknown exponent kind '" + kind + "'");
}

inline VariableExponent exponent_from_spec(const Json& spec) {
  return detail::as_spec_error([&] { return build_exponent(spec); });
}

// ---------------------------------------------------------------------------
// parse_job

// Parses a command line (args[0] is the program name). Returns nullopt after
// printing help. Throws UsageError naming the offending flag, or SpecError
// for malformed exponent, function or grid specs.
inline std::optional<JobSpec> parse_job(const std::vector<std::string>& args,
                                        std::ostream& help_out = std::cout) {
  CLI::App app{"vexlab: variable-exponent Lebesgue space toolkit", "vexlab"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);

  std::string job_file;
  std::string exponent, function, grid, out, format = "json";
  int dim = 0;
  std::uint64_t seed = 1;
  bool strict = false, assert_finite = false;
  app.add_option("--job", job_file, "Run a saved JobSpec (JSON)");
  app.add_option("--exponent,-p", exponent, "const:<v> | lerner:a=<α>,b=<β> | file:<path>");
  app.add_option("--function,-f", function, "Function expression");
  app.add_option("--grid,-g", grid, "lo:hi:count per axis, comma separated");
  app.add_option("--dim", dim, "Dimension (default: grid dimension, else 1)")->check(CLI::Range(1, 3));
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out,-o", out, "Output path (default: stdout)");
  app.add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--strict", strict, "Demand the proof-regime preconditions");
  app.add_flag("--assert-finite", assert_finite, "Fail when a supremum or modulus diverges");

  Json o = Json::object();

  auto* norm = app.add_subcommand("norm", "Luxemburg norm of a sampled function");
  double tol = 1e-10;
  norm->add_option("--tol", tol, "Relative bracket width")->check(CLI::Range(1e-15, 1e-3));

  auto* modular = app.add_subcommand("modular", "Modular I(f/lambda)");
  double lambda = 1.0;
  modular->add_option("--lambda", lambda, "Scaling lambda > 0");

  auto* maximal = app.add_subcommand("maximal", "Discretized maximal function");
  std::string scales = "dyadic";
  maximal->add_option("--scales", scales, "dyadic | all")->check(CLI::IsMember({"dyadic", "all"}));

  auto* oscsup = app.add_subcommand("oscsup", "sup over cubes of l(Q) Omega(f, Q)");
  SupSearchConfig sc;
  oscsup->add_option("--side-lo", sc.side_lo);
  oscsup->add_option("--side-hi", sc.side_hi);
  oscsup->add_option("--center-radius", sc.center_radius);
  oscsup->add_option("--samples", sc.samples_per_decade, "Cubes per scale decade");
  oscsup->add_option("--refine", sc.refine_steps);
  oscsup->add_option("--quad", sc.quad_points);
  oscsup->add_option("--max-quad", sc.max_quad_points);

  auto* classify = app.add_subcommand("classify", "Log-Hoelder, infinity and Nekvinda diagnostics");
  std::vector<std::string> which{"log-holder", "infinity", "nekvinda"};
  PairSamplerConfig pc;
  SamplerConfig samp;
  std::string p_inf = "auto";
  NekvindaConfig nc;
  classify->add_option("--diagnostics", which, "Subset of log-holder, infinity, nekvinda")
      ->delimiter(',')
      ->check(CLI::IsMember({"log-holder", "infinity", "nekvinda"}));
  classify->add_option("--pairs", pc.pairs_per_decade, "Pairs per scale decade");
  classify->add_option("--delta-min", pc.delta_min);
  classify->add_option("--box", samp.box_radius, "Half-width of the sampling box");
  classify->add_option("--samples", samp.samples);
  classify->add_option("--max-loglog", samp.max_log_log_radius);
  classify->add_option("--loglog-radii", samp.log_log_radii, "Explicit log log |x| values")->delimiter(',');
  classify->add_option("--p-inf", p_inf, "Limit at infinity, or auto");
  classify->add_option("--k", nc.k);
  classify->add_option("--alpha", nc.alpha);
  classify->add_option("--c", nc.c);
  classify->add_option("--annuli", nc.annuli);

  auto* decompose_cmd = app.add_subcommand("decompose", "Decomposition certificate");
  std::string strategy = "auto";
  std::optional<double> p0, theta, s_lower, s_upper, cert_p_inf;
  VerifyConfig vc;
  bool epsilon = false;
  double mu_n = 1.0;
  decompose_cmd->add_option("--strategy", strategy, "auto | rs | nekvinda | lerner | manual")
      ->check(CLI::IsMember({"auto", "rs", "nekvinda", "lerner", "manual"}));
  decompose_cmd->add_option("--p0", p0);
  decompose_cmd->add_option("--theta", theta);
  decompose_cmd->add_option("--s-lower", s_lower);
  decompose_cmd->add_option("--s-upper", s_upper);
  decompose_cmd->add_option("--p-inf", cert_p_inf);
  decompose_cmd->add_option("--samples", vc.samples);
  decompose_cmd->add_option("--pairs", vc.pairs);
  decompose_cmd->add_flag("--epsilon", epsilon, "Lerner smallness threshold report");
  decompose_cmd->add_option("--mu-n", mu_n, "Dimensional constant (nominal)");

  auto* probe = app.add_subcommand("probe", "Empirical maximal-boundedness probe");
  ProbeConfig prc;
  std::vector<std::string> kinds{"random-steps"};
  std::string probe_scales = "dyadic";
  bool no_half = false;
  probe->add_option("--kinds", kinds, "indicators, gaussians, random-steps")
      ->delimiter(',')
      ->check(CLI::IsMember({"indicators", "gaussians", "random-steps"}));
  probe->add_option("--count", prc.count, "Functions per family");
  probe->add_option("--scales", probe_scales)->check(CLI::IsMember({"dyadic", "all"}));
  probe->add_flag("--no-half", no_half, "Skip the half-resolution column");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    help_out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    help_out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::CallForVersion&) {
    help_out << kToolVersion << "\n";
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const CLI::App* sub = app.get_subcommands().front();
  JobSpec job;
  if (!job_file.empty()) {
    std::ifstream in(job_file);
    if (!in) throw UsageError("--job: cannot read '" + job_file + "'");
    try {
      job = JobSpec::from_json(Json::parse(in));
    } catch (const Json::exception& e) {
      throw SpecError("--job: " + std::string(e.what()));
    }
    if (job.command != sub->get_name())
      throw UsageError("--job: file holds a '" + job.command + "' job, not '" + sub->get_name() + "'");
    return job;
  }

  job.command = sub->get_name();
  job.exponent = exponent;
  job.function = function;
  job.grid = grid;
  job.seed = seed;
  job.out = out;
  job.format = format;
  job.strict = strict;
  job.assert_finite = assert_finite;

  auto need = [&](const std::string& value, const char* flag) {
    if (value.empty()) throw UsageError(std::string(flag) + " is required for " + job.command);
  };

  std::optional<GridSpec> g;
  if (!grid.empty()) g = GridSpec::parse(grid);
  job.dimension = dim > 0 ? dim : g ? g->dimension() : 1;
  if (g && g->dimension() != job.dimension)
    throw UsageError("--dim: grid has dimension " + std::to_string(g->dimension()));
  if (!function.empty()) {
    const auto e = Expression::parse(function);
    if (e.max_coordinate() > job.dimension)
      throw SpecError("function uses x" + std::to_string(e.max_coordinate()) + " in dimension " +
                      std::to_string(job.dimension));
  }
  if (!exponent.empty()) {
    job.exponent_spec = exponent_spec_from_text(exponent, job.dimension);
    const auto p = exponent_from_spec(job.exponent_spec);
    if (dim == 0 && !g) job.dimension = p.dimension();
    if (p.dimension() != job.dimension)
      throw UsageError("--exponent: exponent dimension " + std::to_string(p.dimension()) +
                       " differs from " + std::to_string(job.dimension));
  }

  const bool csv = format == "csv";
  if (job.command == "norm") {
    need(exponent, "--exponent");
    need(function, "--function");
    need(grid, "--grid");
    o["tol"] = tol;
  } else if (job.command == "modular") {
    need(exponent, "--exponent");
    need(function, "--function");
    need(grid, "--grid");
    if (!(lambda > 0.0)) throw UsageError("--lambda must be positive");
    o["lambda"] = lambda;
  } else if (job.command == "maximal") {
    need(function, "--function");
    need(grid, "--grid");
    o["scales"] = scales;
  } else if (job.command == "oscsup") {
    need(function, "--function");
    sc.dimension = job.dimension;
    sc.seed = seed;
    o["search"] = sc.to_json();
  } else if (job.command == "classify") {
    need(exponent, "--exponent");
    o["diagnostics"] = which;
    pc.seed = seed;
    pc.box_radius = samp.box_radius;
    samp.seed = seed;
    o["pairs"] = pc.to_json();
    o["sampler"] = samp.to_json();
    if (p_inf == "auto") o["p_inf"] = "auto";
    else o["p_inf"] = detail::parse_number(p_inf, "--p-inf");
    o["nekvinda"] = nc.to_json();
  } else if (job.command == "decompose") {
    need(exponent, "--exponent");
    o["strategy"] = strategy;
    if (strategy == "manual" && (!p0 || !theta))
      throw UsageError("--p0 and --theta are required for --strategy manual");
    if (strategy != "manual" && (p0 || theta))
      throw UsageError("--p0/--theta only apply to --strategy manual");
    o["p0"] = p0 ? Json(*p0) : Json(nullptr);
    o["theta"] = theta ? Json(*theta) : Json(nullptr);
    o["s_lower"] = s_lower ? Json(*s_lower) : Json(nullptr);
    o["s_upper"] = s_upper ? Json(*s_upper) : Json(nullptr);
    vc.p_inf = cert_p_inf;
    vc.seed = seed;
    o["verify"] = vc.to_json();
    o["epsilon"] = epsilon;
    if (!(mu_n > 0.0)) throw UsageError("--mu-n must be positive");
    o["mu_n"] = mu_n;
  } else if (job.command == "probe") {
    need(exponent, "--exponent");
    need(grid, "--grid");
    prc.kinds.clear();
    for (const auto& k : kinds) prc.kinds.push_back(probe_kind_from_string(k));
    if (!function.empty()) prc.functions.push_back(function);
    prc.scales = probe_scales == "all" ? ScaleSet::all : ScaleSet::dyadic;
    prc.half_resolution = !no_half;
    prc.seed = seed;
    o["probe"] = prc.to_json();
  }
  if (csv && job.command != "maximal" && job.command != "probe" && job.command != "oscsup")
    throw UsageError("--format csv is available for maximal, oscsup and probe only");
  job.options = std::move(o);
  return job;
}

// ---------------------------------------------------------------------------
// run_job

namespace detail {

inline ScalarField field_of(const std::string& text) {
  auto e = std::make_shared<const Expression>(Expression::parse(text));
  return [e](std::span<const double> x) { return (*e)(x); };
}

inline std::string trace_csv(const std::vector<std::pair<int, double>>& trace) {
  std::string out = "decade,running_sup\n";
  char buf[64];
  for (const auto& [d, v] : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", d, v);
    out += buf;
  }
  return out;
}

inline SupSearchConfig sup_config_from(const Json& j, int dim, std::uint64_t seed) {
  SupSearchConfig c;
  c.dimension = dim;
  c.side_lo = j.at("side_range").at(0).get<double>();
  c.side_hi = j.at("side_range").at(1).get<double>();
  c.center_radius = j.at("center_radius").get<double>();
  c.samples_per_decade = j.at("samples_per_decade").get<std::size_t>();
  c.refine_steps = j.at("refine_steps").get<int>();
  c.quad_points = j.at("quad_points").get<std::size_t>();
  c.max_quad_points = j.at("max_quad_points").get<std::size_t>();
  c.seed = seed;
  return c;
}

inline JobOutcome run_job_unchecked(const JobSpec& job) {
  JobOutcome r;
  r.report.job = job;
  auto& res = r.report.result;
  auto& warn = r.report.warnings;
  const Json& o = job.options;
  std::optional<VariableExponent> p;
  if (!job.exponent_spec.is_null()) p = exponent_from_spec(job.exponent_spec);
  auto need_p = [&]() -> const VariableExponent& {
    if (!p) throw UsageError("--exponent is required for " + job.command);
    return *p;
  };
  auto need_grid = [&] {
    if (job.grid.empty()) throw UsageError("--grid is required for " + job.command);
    return GridSpec::parse(job.grid);
  };

  if (job.command == "norm" || job.command == "modular") {
    const auto grid = need_grid();
    const auto f = sample_function(field_of(job.function), grid);
    if (job.command == "norm") {
      const auto nr = luxemburg_norm_detailed(f, need_p(), o.value("tol", 1e-10));
      res = nr.to_json();
      if (nr.value > 0.0) res["modular_at_norm"] = modular_value(f, *p, nr.value);
    } else {
      const double lambda = o.at("lambda").get<double>();
      res = {{"lambda", lambda}, {"modular", modular_value(f, need_p(), lambda)}};
    }
  } else if (job.command == "maximal") {
    const auto grid = need_grid();
    const auto f = sample_function(field_of(job.function), grid);
    const bool all = o.value("scales", "dyadic") == "all";
    const auto scales = all ? all_scales(grid) : dyadic_scales(grid);
    const auto mf = maximal_function(f, scales);
    res = {{"grid", grid.to_json()}, {"scales", scales}, {"values", mf.values}};
    if (p) res["norm_f"] = luxemburg_norm(f, *p), res["norm_Mf"] = luxemburg_norm(mf, *p);
    r.report.csv = to_csv(mf);
  } else if (job.command == "oscsup") {
    const auto cfg = sup_config_from(o.at("search"), job.dimension, job.seed);
    const auto sr = oscillation_sup(field_of(job.function), cfg);
    res = sr.to_json();
    r.report.csv = trace_csv(sr.trace);
    if (sr.divergent) {
      warn.push_back("running sup still growing over the last two scale decades");
      if (job.assert_finite) r.exit_code = kExitCheckFailed;
    }
  } else if (job.command == "classify") {
    const auto& pe = need_p();
    res["exponent"] = pe.spec();
    const auto which = o.at("diagnostics").get<std::vector<std::string>>();
    auto wants = [&](const char* name) {
      return std::find(which.begin(), which.end(), name) != which.end();
    };
    SamplerConfig samp;
    const auto& sj = o.at("sampler");
    samp.samples = sj.at("samples").get<std::size_t>();
    samp.box_radius = sj.at("box_radius").get<double>();
    samp.max_log_log_radius = sj.at("max_log_log_radius").get<double>();
    samp.log_log_radii = sj.at("log_log_radii").get<std::vector<double>>();
    samp.seed = job.seed;
    res["bounds"] = estimate_bounds(pe, samp).to_json();
    bool diverged = false;
    if (wants("log-holder")) {
      PairSamplerConfig pc;
      const auto& pj = o.at("pairs");
      pc.pairs_per_decade = pj.at("pairs_per_decade").get<std::size_t>();
      pc.delta_min = pj.at("delta_range").at(0).get<double>();
      pc.delta_max = pj.at("delta_range").at(1).get<double>();
      pc.box_radius = pj.at("box_radius").get<double>();
      pc.zoom_pairs = pj.at("zoom_pairs").get<int>();
      pc.refine_steps = pj.at("refine_steps").get<int>();
      pc.seed = job.seed;
      const auto est = log_holder_modulus(pe, pc);
      res["log_holder"] = est.to_json();
      diverged = diverged || est.divergent;
    }
    if (wants("infinity")) {
      std::optional<double> pinf;
      if (o.at("p_inf").is_number()) pinf = o.at("p_inf").get<double>();
      const auto est = infinity_modulus(pe, pinf, samp);
      res["infinity"] = est.to_json();
      diverged = diverged || est.divergent;
    }
    if (wants("nekvinda")) {
      if (pe.profile()) {
        NekvindaConfig nc;
        const auto& nj = o.at("nekvinda");
        nc.k = nj.at("k").get<int>();
        nc.alpha = nj.at("alpha").get<double>();
        nc.c = nj.at("c").get<double>();
        nc.annuli = nj.at("annuli").get<int>();
        nc.x_max = nj.at("x_max").get<double>();
        nc.points_per_decade = nj.at("points_per_decade").get<std::size_t>();
        nc.quad_points = nj.at("quad_points").get<int>();
        const auto rep = nekvinda_check(*pe.profile(), pe, nc);
        res["nekvinda"] = rep.to_json();
        res["nekvinda"]["config"] = nc.to_json();
        diverged = diverged || !rep.n2.pass;
      } else {
        res["nekvinda"] = nullptr;
        warn.push_back("nekvinda check skipped: exponent has no radial profile");
      }
    }
    if (diverged && job.assert_finite) r.exit_code = kExitCheckFailed;
  } else if (job.command == "decompose") {
    const auto& pe = need_p();
    std::string strategy = o.at("strategy").get<std::string>();
    if (strategy == "auto")
      strategy = pe.lerner() ? "lerner" : pe.profile() ? "nekvinda" : "rs";
    const auto mode = job.strict ? DecomposeMode::strict : DecomposeMode::free;
    double p0 = 0.0, theta = 0.0;
    if (strategy == "manual") {
      p0 = o.at("p0").get<double>();
      theta = o.at("theta").get<double>();
    } else {
      Strategy s = RsStrategy{};
      if (strategy == "nekvinda") {
        double lo = 0.0, hi = 0.0;
        if (o.at("s_lower").is_number() && o.at("s_upper").is_number()) {
          lo = o.at("s_lower").get<double>();
          hi = o.at("s_upper").get<double>();
        } else if (pe.profile()) {
          lo = pe.profile()->lower();
          hi = pe.profile()->upper();
        } else {
          throw UsageError("--s-lower and --s-upper are required: exponent has no radial profile");
        }
        s = NekvindaStrategy{lo, hi};
      } else if (strategy == "lerner") {
        if (!pe.lerner()) throw UsageError("--strategy lerner needs a lerner exponent");
        s = LernerStrategy{pe.lerner()->alpha, pe.lerner()->beta};
      }
      const auto params = select_parameters(pe, s);
      p0 = params.p0;
      theta = params.theta;
    }
    const auto p1 = decompose(pe, p0, theta, mode);
    VerifyConfig vc;
    const auto& vj = o.at("verify");
    vc.samples = vj.at("samples").get<std::size_t>();
    vc.pairs = vj.at("pairs").get<std::size_t>();
    vc.ladder = vj.at("ladder").get<std::size_t>();
    vc.lerner_points = vj.at("lerner_points").get<std::size_t>();
    vc.ladder_max = vj.at("ladder_max").get<double>();
    vc.box_radius = vj.at("box_radius").get<double>();
    vc.max_log_log_radius = vj.at("max_log_log_radius").get<double>();
    if (vj.at("p_inf").is_number()) vc.p_inf = vj.at("p_inf").get<double>();
    vc.seed = job.seed;
    auto cert = verify_decomposition(pe, p0, theta, p1, vc);
    cert.strategy = strategy;
    cert.mode = to_string(mode);
    res = cert.to_json();
    if (!cert.proof_conforming) warn.push_back("certificate is not proof-conforming");
    if (o.value("epsilon", false)) {
      if (!pe.lerner()) throw UsageError("--epsilon needs a lerner exponent");
      const double a = pe.lerner()->alpha, b = pe.lerner()->beta;
      const auto comp = lerner_companion(a, b, pe.dimension());
      SupSearchConfig sc;
      sc.dimension = pe.dimension();
      sc.seed = job.seed;
      ScalarField L = [](std::span<const double> x) { return loglog_or_zero(euclidean_norm(x)); };
      ScalarField q = [a, b](std::span<const double> x) {
        return a + b * std::sin(loglog_or_zero(euclidean_norm(x)));
      };
      const auto sl = oscillation_sup(L, sc);
      const auto sq = oscillation_sup(q, sc);
      const auto sq1 = oscillation_sup(comp.q1, sc);
      const double mu = o.value("mu_n", 1.0);
      auto eps = epsilon_threshold(a, b, mu, sl.sup, sq, sq1).to_json();
      eps["C_L_search"] = sl.to_json();
      eps["q_search"] = sq.to_json();
      eps["q1_search"] = sq1.to_json();
      eps["mu_n_nominal"] = true;
      res["epsilon"] = eps;
      warn.push_back("mu_n is a nominal value; the true constant is not known");
    }
    if (!cert.pass) r.exit_code = kExitCheckFailed;
  } else if (job.command == "probe") {
    const auto grid = need_grid();
    ProbeConfig pc;
    const auto& pj = o.at("probe");
    pc.count = pj.at("count").get<std::size_t>();
    pc.kinds.clear();
    for (const auto& k : pj.at("kinds")) pc.kinds.push_back(probe_kind_from_string(k.get<std::string>()));
    pc.functions = pj.at("functions").get<std::vector<std::string>>();
    pc.scales = pj.at("scales").get<std::string>() == "all" ? ScaleSet::all : ScaleSet::dyadic;
    pc.half_resolution = pj.at("half_resolution").get<bool>();
    pc.seed = job.seed;
    const auto t = boundedness_probe(need_p(), pc, grid);
    res = t.to_json();
    std::string csv = "id,norm_f,norm_Mf,ratio\n";
    char buf[128];
    for (const auto& row : t.rows) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", row.norm_f, row.norm_mf, row.ratio);
      csv += row.id + buf;
    }
    r.report.csv = csv;
    if (t.skipped) warn.push_back(std::to_string(t.skipped) + " test functions vanish on the grid and were skipped");
  } else {
    throw UsageError("unknown command '" + job.command + "'");
  }
  return r;
}

}  // namespace detail

// Runs a parsed job. Library and spec errors propagate; use run_cli for the
// exit-code contract.
inline JobOutcome run_job(const JobSpec& job) {
  const auto t0 = std::chrono::steady_clock::now();
  JobOutcome r;
  try {
    r = detail::run_job_unchecked(job);
  } catch (const Json::exception& e) {
    throw SpecError(std::string("malformed job options: ") + e.what());
  }
  r.report.wall_clock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline void write_report(const JobOutcome& r, std::ostream& out) {
  if (r.report.job.format == "csv") out << r.report.csv;
  else out << r.report.to_json().dump(2) << "\n";
}

// The full command-line contract: 0 ok, 1 check failure, 2 usage or spec
// error. Reports go to --out (or `out`), errors to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  try {
    const auto job = parse_job(args, out);
    if (!job) return kExitOk;
    const auto r = run_job(*job);
    if (job->out.empty()) {
      write_report(r, out);
    } else {
      std::ofstream f(job->out);
      if (!f) throw UsageError("--out: cannot write '" + job->out + "'");
      write_report(r, f);
    }
    if (r.exit_code == kExitCheckFailed) err << "vexlab: check failed\n";
    return r.exit_code;
  } catch (const Error& e) {
    err << "vexlab: " << e.kind() << ": " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace vexlab
