#include "lienard/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <toml++/toml.hpp>

namespace lienard::io {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  // TOML wants a float to look like one.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SpecError("cannot write " + path.string());
  out << text;
}

void ConfigOverrides::apply(Config& cfg) const {
  if (grid_size) cfg.grid_size = *grid_size;
  if (margin) cfg.margin = *margin;
  if (quad_tol) cfg.quad_tol = *quad_tol;
  if (offset_seeds) cfg.offset_seeds = *offset_seeds;
  if (offset_range) cfg.offset_range = offset_range;
  if (tol_const) cfg.tol_const = *tol_const;
  if (residual_tol) cfg.residual_tol = *residual_tol;
  if (merge_rel) cfg.merge_rel = *merge_rel;
  if (a_zero_tol) cfg.a_zero_tol = *a_zero_tol;
}

namespace {

toml::table parse_toml(const std::string& text) {
  try {
    return toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw SpecError("invalid TOML at line " + std::to_string(e.source().begin.line) + ": " +
                    std::string(e.description()));
  }
}

template <class T>
T required(const toml::table& t, const char* key) {
  const auto v = t[key].value<T>();
  if (!v) throw SpecError(std::string("missing or mistyped key '") + key + "'");
  return *v;
}

Interval interval_of(const toml::node_view<const toml::node>& node, const char* key) {
  const toml::array* arr = node.as_array();
  if (!arr || arr->size() != 2) throw SpecError(std::string("'") + key + "' must be [lo, hi]");
  const auto lo = (*arr)[0].value<double>();
  const auto hi = (*arr)[1].value<double>();
  if (!lo || !hi) throw SpecError(std::string("'") + key + "' must hold two numbers");
  if (!(*lo < *hi)) throw SpecError(std::string("'") + key + "' must satisfy lo < hi");
  return {*lo, *hi};
}

Expr expression_of(const toml::table& t, const std::string& key, bool allow_t = false) {
  const auto node = t[key];
  if (const auto num = node.value<double>(); num && !node.is_string()) return Expr(*num);
  const auto text = node.value<std::string>();
  if (!text) throw SpecError("missing expression '" + key + "'");
  try {
    return parse(*text, allow_t);
  } catch (const ParseError& e) {
    throw ParseError(e.position, key + " = \"" + *text + "\": " + e.detail);
  }
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

Json interval_json(const Interval& I) { return Json::array({I.lo, I.hi}); }

Interval interval_from(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

template <class T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <class T>
std::optional<T> opt_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

Json generator_json(const GeneratorDescription& g) {
  return Json{{"kind", to_string(g.kind)}, {"a", g.a}, {"xi", g.xi}, {"eta", g.eta}};
}

GeneratorDescription generator_from(const Json& j) {
  GeneratorDescription g;
  g.kind = generator_kind_from_string(j.at("kind").get<std::string>());
  g.a = j.at("a").get<double>();
  g.xi = j.at("xi").get<std::string>();
  g.eta = j.at("eta").get<std::string>();
  return g;
}

Json equation_json(const EquationResidual& r) {
  return Json{{"power", r.power}, {"max_abs", r.max_abs}, {"passed", r.passed}};
}

EquationResidual equation_from(const Json& j) {
  return {j.at("power").get<int>(), j.at("max_abs").get<double>(), j.at("passed").get<bool>()};
}

}  // namespace

ProblemFile parse_problem(const std::string& text) {
  const toml::table t = parse_toml(text);
  ProblemFile pf;
  ProblemSpec& p = pf.problem;
  const auto n = t["n"].value<std::int64_t>();
  if (!n || *n < 0 || *n > 64) throw SpecError("'n' must be an integer between 0 and 64");
  p.n = static_cast<int>(*n);
  p.I = interval_of(t["interval"], "interval");
  for (int k = 0; k <= p.n; ++k) p.f.push_back(expression_of(t, "f" + std::to_string(k)));
  p.validate();

  if (const toml::table* c = t["config"].as_table()) {
    ConfigOverrides& o = pf.overrides;
    if (auto v = (*c)["grid_size"].value<std::int64_t>()) o.grid_size = static_cast<int>(*v);
    if (auto v = (*c)["margin"].value<double>()) o.margin = *v;
    if (auto v = (*c)["quad_tol"].value<double>()) o.quad_tol = *v;
    if (auto v = (*c)["offset_seeds"].value<std::int64_t>()) o.offset_seeds = static_cast<int>(*v);
    if ((*c)["offset_range"]) o.offset_range = interval_of((*c)["offset_range"], "offset_range");
    if (auto v = (*c)["tol_const"].value<double>()) o.tol_const = *v;
    if (auto v = (*c)["residual_tol"].value<double>()) o.residual_tol = *v;
    if (auto v = (*c)["merge_rel"].value<double>()) o.merge_rel = *v;
    if (auto v = (*c)["a_zero_tol"].value<double>()) o.a_zero_tol = *v;
    if (o.grid_size && *o.grid_size < 32) throw SpecError("grid_size must be at least 32");
  }
  if (auto h = t["provenance"]["spec_hash"].value<std::string>()) pf.spec_hash = *h;
  return pf;
}

ProblemFile load_problem(const std::filesystem::path& path) { return parse_problem(read_file(path)); }

std::string problem_to_toml(const ProblemSpec& problem, const std::optional<std::string>& spec_hash) {
  std::ostringstream out;
  out << "n = " << problem.n << "\n";
  out << "interval = [" << format_double(problem.I.lo) << ", " << format_double(problem.I.hi) << "]\n";
  for (int k = 0; k <= problem.n; ++k)
    out << "f" << k << " = " << quoted(to_string(problem.coefficient(k))) << "\n";
  if (spec_hash) out << "\n[provenance]\nspec_hash = " << quoted(*spec_hash) << "\n";
  return out.str();
}

SynthesisSpec parse_synthesis_spec(const std::string& text) {
  const toml::table t = parse_toml(text);
  SynthesisSpec s;
  s.n = static_cast<int>(required<std::int64_t>(t, "n"));
  s.F = expression_of(t, "F");
  s.U = interval_of(t["interval"], "interval");
  s.a = t["a"].value_or(0.0);
  s.epsilon = static_cast<int>(t["epsilon"].value_or(std::int64_t{1}));
  s.nu = static_cast<int>(t["nu"].value_or(std::int64_t{1}));
  const toml::array* b = t["b"].as_array();
  if (!b) throw SpecError("missing array 'b'");
  for (const auto& v : *b) {
    const auto x = v.value<double>();
    if (!x) throw SpecError("'b' must hold numbers");
    s.b.push_back(*x);
  }
  return s;
}

SynthesisSpec load_synthesis_spec(const std::filesystem::path& path) {
  return parse_synthesis_spec(read_file(path));
}

std::string synthesis_spec_to_toml(const SynthesisSpec& spec) {
  std::ostringstream out;
  out << "n = " << spec.n << "\n";
  out << "F = " << quoted(to_string(spec.F)) << "\n";
  out << "interval = [" << format_double(spec.U.lo) << ", " << format_double(spec.U.hi) << "]\n";
  out << "a = " << format_double(spec.a) << "\n";
  out << "b = [";
  for (std::size_t i = 0; i < spec.b.size(); ++i) out << (i ? ", " : "") << format_double(spec.b[i]);
  out << "]\n";
  out << "epsilon = " << spec.epsilon << "\nnu = " << spec.nu << "\n";
  return out.str();
}

Json config_to_json(const Config& cfg) {
  return Json{{"grid_size", cfg.grid_size},
              {"margin", cfg.margin},
              {"quad_tol", cfg.quad_tol},
              {"quad_max_depth", cfg.quad_max_depth},
              {"offset_seeds", cfg.offset_seeds},
              {"offset_range_factor", cfg.offset_range_factor},
              {"offset_range", cfg.offset_range ? interval_json(*cfg.offset_range) : Json(nullptr)},
              {"tol_const", cfg.tol_const},
              {"residual_tol", cfg.residual_tol},
              {"merge_rel", cfg.merge_rel},
              {"a_zero_tol", cfg.a_zero_tol},
              {"verify_tol", cfg.verify_tol},
              {"flow_tol", cfg.flow_tol}};
}

Json report_to_json(const SymmetryReport& r) {
  Json gens = Json::array({generator_json(r.generator1)});
  if (r.generator2) gens.push_back(generator_json(*r.generator2));
  Json res = Json::array();
  for (const auto& e : r.residuals) res.push_back(equation_json(e));
  Json unan = Json::array();
  for (const auto& I : r.unanalyzed) unan.push_back(interval_json(I));
  return Json{{"schema", kSchemaVersion},
              {"tool_version", kToolVersion},
              {"status", "ok"},
              {"n", r.n},
              {"dimension", r.dimension},
              {"a", opt(r.a)},
              {"a_spread", opt(r.a_spread)},
              {"offset_c", opt(r.offset_c)},
              {"generators", gens},
              {"residuals", res},
              {"top_equation", r.top_equation ? equation_json(*r.top_equation) : Json(nullptr)},
              {"threshold", r.threshold},
              {"working_interval", interval_json(r.U)},
              {"signs", Json{{"epsilon", r.signs.epsilon}, {"nu", r.signs.nu}}},
              {"unanalyzed", unan},
              {"offset_fallback", r.offset_fallback},
              {"g", r.g_description},
              {"verdict", r.verdict}};
}

SymmetryReport report_from_json(const Json& j) {
  if (j.value("schema", 0) != kSchemaVersion) throw SpecError("unsupported report schema");
  SymmetryReport r;
  r.n = j.at("n").get<int>();
  r.dimension = j.at("dimension").get<int>();
  r.a = opt_from<double>(j, "a");
  r.a_spread = opt_from<double>(j, "a_spread");
  r.offset_c = opt_from<double>(j, "offset_c");
  const Json& gens = j.at("generators");
  r.generator1 = generator_from(gens.at(0));
  if (gens.size() > 1) r.generator2 = generator_from(gens.at(1));
  for (const auto& e : j.at("residuals")) r.residuals.push_back(equation_from(e));
  if (!j.at("top_equation").is_null()) r.top_equation = equation_from(j.at("top_equation"));
  r.threshold = j.at("threshold").get<double>();
  r.U = interval_from(j.at("working_interval"));
  r.signs = {j.at("signs").at("epsilon").get<int>(), j.at("signs").at("nu").get<int>()};
  for (const auto& I : j.at("unanalyzed")) r.unanalyzed.push_back(interval_from(I));
  r.offset_fallback = j.at("offset_fallback").get<bool>();
  r.g_description = j.at("g").get<std::string>();
  r.verdict = j.at("verdict").get<std::string>();
  return r;
}

Json ambiguous_to_json(const AmbiguousOffset& e, int n) {
  // The passing offsets often fill an interval; list an evenly spaced sample.
  std::vector<double> sorted = e.offsets;
  std::sort(sorted.begin(), sorted.end());
  constexpr std::size_t kShown = 16;
  std::vector<double> shown;
  if (sorted.size() <= kShown) {
    shown = sorted;
  } else {
    for (std::size_t i = 0; i < kShown; ++i) shown.push_back(sorted[i * (sorted.size() - 1) / (kShown - 1)]);
  }
  return Json{{"schema", kSchemaVersion},
              {"tool_version", kToolVersion},
              {"status", "ambiguous_offset"},
              {"n", n},
              {"dimension", nullptr},
              {"offset_count", sorted.size()},
              {"offset_range", sorted.empty() ? Json(nullptr) : Json::array({sorted.front(), sorted.back()})},
              {"offsets", shown},
              {"verdict", e.what()}};
}

Json residual_to_json(const ConditionResidual& r) {
  return Json{{"max_abs", r.max_abs},
              {"max_normalized", r.max_normalized},
              {"worst", Json{{"t", r.worst.t}, {"u", r.worst.u}, {"udot", r.worst.udot}}}};
}

void write_grid_csv(const std::filesystem::path& path, const SymmetryReport& report) {
  if (!report.structure || report.grid.size() == 0) throw SpecError("report carries no grid");
  const auto& sf = *report.structure;
  const auto g = g_and_derivatives(sf, report.grid);
  const Eigen::ArrayXd F = sf.F(report.grid);
  std::ostringstream out;
  out << "u,F,g,a";
  for (std::size_t k = 0; k < report.residual_grid.size(); ++k) out << ",R" << k;
  out << "\n";
  for (Eigen::Index i = 0; i < report.grid.size(); ++i) {
    out << format_double(report.grid[i]) << ',' << format_double(F[i]) << ','
        << format_double(g.g[i]) << ','
        << (report.a_grid.size() ? format_double(report.a_grid[i]) : std::string());
    for (const auto& R : report.residual_grid) out << ',' << format_double(R[i]);
    out << "\n";
  }
  write_file(path, out.str());
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "t,u,udot\n";
  for (Eigen::Index i = 0; i < traj.t.size(); ++i)
    out << format_double(traj.t[i]) << ',' << format_double(traj.u[i]) << ','
        << format_double(traj.udot[i]) << "\n";
  return out.str();
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  write_file(path, trajectory_csv(traj));
}

}  // namespace lienard::io
