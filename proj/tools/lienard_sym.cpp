// lienard-sym: classify, synthesize, verify and simulate Lienard-type equations.
//
// Exit codes
//   classify   0 two-dimensional, 1 one-dimensional, 2 input error, 3 ambiguous offset
//   synthesize 0 ok, 2 invalid spec
//   verify     0 residual within tolerance, 1 above, 2 input error
//   simulate   0 completed, 1 blow-up or early exit (partial CSV written), 2 input error

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "lienard/classify.hpp"
#include "lienard/io.hpp"
#include "lienard/synthesis.hpp"
#include "lienard/verify.hpp"

namespace fs = std::filesystem;
using namespace lienard;
using io::Json;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kInputError = 2;
constexpr int kAmbiguous = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("lienard-sym");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("LIENARD_SYM_LOG")) {
    const std::string v = env;
    if (v == "error" || v == "warn" || v == "info" || v == "debug")
      spdlog::set_level(spdlog::level::from_str(v));
    else
      spdlog::warn("ignoring LIENARD_SYM_LOG={} (expected error, warn, info or debug)", v);
  }
}

Json error_json(const std::string& type, const std::string& message,
                std::optional<std::size_t> position = std::nullopt) {
  Json j{{"schema", io::kSchemaVersion},
         {"tool_version", io::kToolVersion},
         {"status", "error"},
         {"error", type},
         {"message", message}};
  if (position) j["position"] = *position;
  return j;
}

// Runs `body`, mapping input errors to exit 2 with a JSON error object.
template <class Body>
int guarded(Body body, Json& out) {
  try {
    return body();
  } catch (const ParseError& e) {
    out = error_json("ParseError", e.what(), e.position);
  } catch (const NMustBeAtLeast4& e) {
    out = error_json("NMustBeAtLeast4", e.what());
  } catch (const NoIntervalError& e) {
    out = error_json("NoIntervalError", e.what());
  } catch (const SpecError& e) {
    out = error_json("SpecError", e.what());
  } catch (const QuadratureError& e) {
    out = error_json("QuadratureError", e.what());
  } catch (const DomainError& e) {
    out = error_json("DomainError", e.what());
  } catch (const NonMonotoneImage& e) {
    out = error_json("NonMonotoneImage", e.what());
  }
  spdlog::error("{}", out["message"].get<std::string>());
  return kInputError;
}

void emit(const Json& j, const std::optional<fs::path>& path) {
  const std::string text = j.dump(2) + "\n";
  if (path)
    io::write_file(*path, text);
  else
    std::cout << text;
}

Config base_config(const io::ProblemFile& pf) {
  Config cfg;
  pf.overrides.apply(cfg);
  return cfg;
}

// ---------------------------------------------------------------- classify

struct ClassifyOptions {
  std::vector<std::string> files;
  std::optional<int> grid;
  std::optional<double> tol;
  std::optional<std::string> csv_out;
  std::optional<std::string> out;
  bool no_timing = false;
  int jobs = 1;
};

int classify_one(const std::string& file, const ClassifyOptions& o, Json& out,
                 const std::optional<fs::path>& csv) {
  return guarded(
      [&] {
        const io::ProblemFile pf = io::load_problem(file);
        Config cfg = base_config(pf);
        if (o.grid) cfg.grid_size = *o.grid;
        if (o.tol) cfg.residual_tol = *o.tol;
        if (cfg.grid_size < 32) throw SpecError("--grid must be at least 32");
        spdlog::info("classifying {} (n = {})", file, pf.problem.n);

        const auto start = std::chrono::steady_clock::now();
        try {
          const SymmetryReport r = classify(pf.problem, cfg);
          const double ms =
              std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
          out = io::report_to_json(r);
          out["config"] = io::config_to_json(cfg);
          if (pf.spec_hash) out["provenance"] = Json{{"spec_hash", *pf.spec_hash}};
          if (!o.no_timing) out["timing"] = Json{{"classify_ms", ms}};
          if (csv) io::write_grid_csv(*csv, r);
          spdlog::info("{}: dimension {}", file, r.dimension);
          return r.dimension == 2 ? kOk : kNegative;
        } catch (const AmbiguousOffset& e) {
          out = io::ambiguous_to_json(e, pf.problem.n);
          out["config"] = io::config_to_json(cfg);
          spdlog::warn("{}: {}", file, e.what());
          return kAmbiguous;
        }
      },
      out);
}

int run_classify(const ClassifyOptions& o) {
  const bool batch = o.files.size() > 1;
  if (batch && o.out) fs::create_directories(*o.out);
  if (batch && o.csv_out) fs::create_directories(*o.csv_out);

  auto target = [&](const std::optional<std::string>& base, const std::string& file,
                    const char* ext) -> std::optional<fs::path> {
    if (!base) return std::nullopt;
    if (!batch) return fs::path(*base);
    return fs::path(*base) / (fs::path(file).stem().string() + ext);
  };

  std::vector<Json> reports(o.files.size());
  std::vector<int> codes(o.files.size(), kOk);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < o.files.size(); i = next++)
      codes[i] = classify_one(o.files[i], o, reports[i], target(o.csv_out, o.files[i], ".csv"));
  };
  const int jobs = std::clamp(o.jobs, 1, static_cast<int>(o.files.size()));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < o.files.size(); ++i) emit(reports[i], target(o.out, o.files[i], ".json"));
  return *std::max_element(codes.begin(), codes.end());
}

// ---------------------------------------------------------------- generators

struct GeneratorOptions {
  std::string spec = "builtin:translation";
  std::optional<std::string> xi;
  std::optional<std::string> eta;
};

struct BuiltGenerator {
  Generator X;
  Interval U;  // where the generator is defined
};

BuiltGenerator build_generator(const std::string& spec, const GeneratorOptions& g,
                               const ProblemSpec& problem, const Config& cfg) {
  if (spec == "builtin:translation") return {translation_generator(), problem.I};
  if (spec == "custom") {
    if (!g.xi || !g.eta) throw SpecError("custom generators need --xi and --eta");
    return {custom_generator(parse(*g.xi, true), parse(*g.eta, true)), problem.I};
  }
  const bool scaling = spec == "builtin:scaling";
  const bool exponential = spec.rfind("builtin:exponential", 0) == 0;
  if (!scaling && !exponential)
    throw SpecError("unknown generator '" + spec +
                    "' (builtin:translation, builtin:scaling, builtin:exponential[:a], custom)");

  // g comes from the structure function F fitted by the classifier.
  const SymmetryReport r = classify(problem, cfg);
  if (!r.structure) throw SpecError("no structure function F could be built on this problem");
  if (scaling) return {scaling_generator(r.structure), r.U};

  double a = r.a.value_or(0.0);
  const std::string rest = spec.substr(std::string("builtin:exponential").size());
  if (!rest.empty()) {
    if (rest[0] != ':') throw SpecError("expected builtin:exponential:<a>");
    const std::string text = rest.substr(1);
    char* end = nullptr;
    a = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0') throw SpecError("bad value of a in '" + spec + "'");
  }
  return {exponential_generator(r.structure, a), r.U};
}

Json generator_json(const Generator& X) {
  return Json{{"kind", to_string(X.kind)}, {"a", X.a}, {"xi", X.xi_text}, {"eta", X.eta_text}};
}

struct FlowCheck {
  Json json;
  bool passed = true;
};

// Integrates from the middle of U at rest, pushes the curve along X and
// measures both ODE residuals.
FlowCheck flow_check(const Generator& X, const ProblemSpec& problem, const Interval& U, double s,
                     const Config& cfg) {
  const Trajectory base = integrate(problem, 0.0, U.mid(), 0.0, 1.0, 1e-3, U);
  const Trajectory moved = flow_transform(X, base, s);
  const GridFn r0 = ode_residual(problem, base);
  const GridFn r1 = ode_residual(problem, moved);
  FlowCheck fc;
  fc.passed = r1.max_abs() <= cfg.flow_tol;
  fc.json = Json{{"s", s},
                 {"samples", base.t.size()},
                 {"stop", to_string(base.stop)},
                 {"original_residual", r0.max_abs()},
                 {"transformed_residual", r1.max_abs()},
                 {"tolerance", cfg.flow_tol},
                 {"passed", fc.passed}};
  return fc;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
  std::string file;
  GeneratorOptions gen;
  std::vector<double> jet_box;  // t0 t1 umin umax udot_max
  std::optional<double> flow;
  std::optional<double> tol;
  std::optional<std::string> out;
};

int run_verify(const VerifyOptions& o) {
  Json out;
  const int code = guarded(
      [&] {
        const io::ProblemFile pf = io::load_problem(o.file);
        Config cfg = base_config(pf);
        if (o.tol) cfg.verify_tol = *o.tol;
        const ProblemSpec& p = pf.problem;
        const BuiltGenerator bg = build_generator(o.gen.spec, o.gen, p, cfg);

        std::vector<JetPoint> pts;
        Interval tbox = cfg.jet_t, ubox = bg.U.inner(cfg.jet_u_fraction);
        double vmax = cfg.jet_udot_max;
        if (!o.jet_box.empty()) {
          if (o.jet_box.size() != 5) throw SpecError("--jet-box takes t0,t1,umin,umax,udot_max");
          tbox = {o.jet_box[0], o.jet_box[1]};
          ubox = {o.jet_box[2], o.jet_box[3]};
          vmax = o.jet_box[4];
          if (!(tbox.lo <= tbox.hi && ubox.lo <= ubox.hi && vmax > 0)) throw SpecError("empty --jet-box");
        }
        pts = jet_box(tbox, ubox, vmax, cfg.jet_t_points, cfg.jet_u_points,
                      std::max(cfg.jet_udot_points, p.n + 3));

        const ConditionResidual pr = prolongation_residual(bg.X, p, pts);
        const ConditionResidual br = bracket_residual(bg.X, p, pts);
        bool passed = pr.max_normalized <= cfg.verify_tol;

        out = Json{{"schema", io::kSchemaVersion},
                   {"tool_version", io::kToolVersion},
                   {"status", "ok"},
                   {"generator", generator_json(bg.X)},
                   {"jet_box", Json{{"t", {tbox.lo, tbox.hi}}, {"u", {ubox.lo, ubox.hi}}, {"udot_max", vmax}}},
                   {"jet_points", pts.size()},
                   {"prolongation", io::residual_to_json(pr)},
                   {"bracket", io::residual_to_json(br)},
                   {"tolerance", cfg.verify_tol}};
        if (bg.X.xi_u_zero) {
          const CoefficientResiduals cr = coefficient_residuals(
              bg.X, p, closed_grid(tbox, cfg.jet_t_points), closed_grid(ubox, cfg.jet_u_points));
          Json per = Json::array();
          for (int k = 0; k <= p.n; ++k) per.push_back(Json{{"power", k}, {"max_abs", cr.max_abs(k)}});
          out["coefficients"] = per;
        }
        if (o.flow) {
          const FlowCheck fc = flow_check(bg.X, p, bg.U, *o.flow, cfg);
          out["flow"] = fc.json;
          passed = passed && fc.passed;
        }
        out["passed"] = passed;
        return passed ? kOk : kNegative;
      },
      out);
  emit(out, o.out ? std::optional<fs::path>(*o.out) : std::nullopt);
  return code;
}

// ---------------------------------------------------------------- synthesize

struct SynthesizeOptions {
  std::string file;
  std::string emit = "problem";
  std::optional<std::string> out;
  std::optional<std::string> report_out;
};

int run_synthesize(const SynthesizeOptions& o) {
  Json err;
  const int code = guarded(
      [&] {
        const SynthesisSpec spec = io::load_synthesis_spec(o.file);
        const SynthesisResult res = synthesize(spec);
        const std::string toml = io::problem_to_toml(res.problem, res.hash);
        Json report = io::report_to_json(res.expected);
        report["provenance"] = Json{{"spec_hash", res.hash}};
        const bool want_problem = o.emit != "report";
        const bool want_report = o.emit != "problem";
        if (want_problem) {
          if (o.out)
            io::write_file(*o.out, toml);
          else
            std::cout << toml;
        }
        if (want_report) {
          if (o.report_out)
            io::write_file(*o.report_out, report.dump(2) + "\n");
          else
            std::cout << (want_problem && !o.out ? "\n" : "") << report.dump(2) << "\n";
        }
        return kOk;
      },
      err);
  if (code != kOk) std::cerr << err.dump(2) << "\n";
  return code;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string file;
  double u0 = 0, v0 = 0, t0 = 0, t_end = 1, h = 1e-3;
  std::optional<std::string> flow;  // "<generator>,<s>"
  GeneratorOptions gen;
  std::optional<std::string> out;
  std::optional<std::string> flow_out;
};

int run_simulate(const SimulateOptions& o) {
  Json summary;
  const int code = guarded(
      [&] {
        const io::ProblemFile pf = io::load_problem(o.file);
        const ProblemSpec& p = pf.problem;
        const Config cfg = base_config(pf);
        if (!p.I.contains(o.u0)) throw SpecError("u0 lies outside the interval of the problem");
        const Trajectory traj = integrate(p, o.t0, o.u0, o.v0, o.t_end, o.h, p.I);
        if (o.out)
          io::write_trajectory_csv(*o.out, traj);
        else
          std::cout << io::trajectory_csv(traj);
        const GridFn res = ode_residual(p, traj);
        summary = Json{{"schema", io::kSchemaVersion},
                       {"tool_version", io::kToolVersion},
                       {"status", "ok"},
                       {"method", traj.method},
                       {"h", traj.h},
                       {"samples", traj.t.size()},
                       {"stop", to_string(traj.stop)},
                       {"ode_residual", res.max_abs()}};
        int rc = traj.stop == StopReason::Completed ? kOk : kNegative;

        if (o.flow) {
          const auto comma = o.flow->rfind(',');
          if (comma == std::string::npos) throw SpecError("--flow expects <generator>,<s>");
          char* end = nullptr;
          const std::string stext = o.flow->substr(comma + 1);
          const double s = std::strtod(stext.c_str(), &end);
          if (stext.empty() || *end != '\0') throw SpecError("bad flow parameter '" + stext + "'");
          const BuiltGenerator bg = build_generator(o.flow->substr(0, comma), o.gen, p, cfg);
          const Trajectory moved = flow_transform(bg.X, traj, s);
          const fs::path target = o.flow_out ? fs::path(*o.flow_out)
                                  : o.out    ? fs::path(*o.out + ".flow.csv")
                                             : fs::path("flow.csv");
          io::write_trajectory_csv(target, moved);
          const GridFn r1 = ode_residual(p, moved);
          summary["flow"] = Json{{"generator", generator_json(bg.X)},
                                 {"s", s},
                                 {"csv", target.string()},
                                 {"ode_residual", r1.max_abs()},
                                 {"tolerance", cfg.flow_tol},
                                 {"passed", r1.max_abs() <= cfg.flow_tol}};
        }
        if (rc != kOk) spdlog::warn("integration stopped early: {}", to_string(traj.stop));
        return rc;
      },
      summary);
  // The CSV owns stdout unless it went to a file.
  (o.out ? std::cout : std::cerr) << summary.dump(2) << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Lie symmetry classification of Lienard-type equations u'' = sum_k f_k(u) u'^k"};
  app.set_version_flag("--version", io::kToolVersion);
  app.require_subcommand(1);

  ClassifyOptions co;
  auto* c = app.add_subcommand("classify", "decide whether the symmetry algebra is two-dimensional");
  c->add_option("files", co.files, "problem files (TOML)")->required()->check(CLI::ExistingFile);
  c->add_option("--grid", co.grid, "grid size on the working interval");
  c->add_option("--tol", co.tol, "relative residual tolerance");
  c->add_option("--csv-out", co.csv_out, "CSV of u, F, g, a and residuals (a directory for batches)");
  c->add_option("--out", co.out, "report path (a directory for batches)");
  c->add_flag("--no-timing", co.no_timing, "omit timing from the report");
  c->add_option("--jobs", co.jobs, "parallel workers for batches")->check(CLI::PositiveNumber);

  SynthesizeOptions so;
  auto* s = app.add_subcommand("synthesize", "build an integrable family from F, a and b");
  s->add_option("spec", so.file, "synthesis spec (TOML)")->required()->check(CLI::ExistingFile);
  s->add_option("--emit", so.emit, "problem, report or both")
      ->check(CLI::IsMember({"problem", "report", "both"}));
  s->add_option("--out", so.out, "problem file path");
  s->add_option("--report-out", so.report_out, "expected report path");

  VerifyOptions vo;
  auto* v = app.add_subcommand("verify", "check a generator against the symmetry condition");
  v->add_option("problem", vo.file, "problem file (TOML)")->required()->check(CLI::ExistingFile);
  v->add_option("--generator", vo.gen.spec,
                "builtin:translation | builtin:scaling | builtin:exponential[:a] | custom");
  v->add_option("--xi", vo.gen.xi, "xi(t, u) for custom generators");
  v->add_option("--eta", vo.gen.eta, "eta(t, u) for custom generators");
  v->add_option("--jet-box", vo.jet_box, "t0,t1,umin,umax,udot_max")->delimiter(',');
  v->add_option("--flow", vo.flow, "also push a solution along the flow for parameter s");
  v->add_option("--tol", vo.tol, "tolerance on the normalized residual");
  v->add_option("--out", vo.out, "report path");

  SimulateOptions mo;
  auto* m = app.add_subcommand("simulate", "integrate with RK4 and optionally transform the solution");
  m->set_help_flag("--help", "print this help message and exit");  // --h is the step size
  m->add_option("problem", mo.file, "problem file (TOML)")->required()->check(CLI::ExistingFile);
  m->add_option("--u0", mo.u0, "initial u")->required();
  m->add_option("--v0", mo.v0, "initial u'")->required();
  m->add_option("--t0", mo.t0, "initial time");
  m->add_option("--t-end", mo.t_end, "final time")->required();
  m->add_option("--h", mo.h, "step size");
  m->add_option("--flow", mo.flow, "<generator>,<s>");
  m->add_option("--xi", mo.gen.xi, "xi(t, u) for a custom flow generator");
  m->add_option("--eta", mo.gen.eta, "eta(t, u) for a custom flow generator");
  m->add_option("--out", mo.out, "trajectory CSV");
  m->add_option("--flow-out", mo.flow_out, "transformed trajectory CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*c) return run_classify(co);
    if (*s) return run_synthesize(so);
    if (*v) return run_verify(vo);
    if (*m) return run_simulate(mo);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  }
  return kInputError;
}
