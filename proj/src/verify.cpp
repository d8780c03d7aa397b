#include "lienard/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/QR>

namespace lienard {

Generator translation_generator() {
  Generator X;
  X.kind = GeneratorKind::Translation;
  X.xi_u_zero = true;
  X.xi_text = "1";
  X.eta_text = "0";
  X.jet = [](double, double) {
    GeneratorJet j;
    j.xi = 1.0;
    return j;
  };
  return X;
}

Generator scaling_generator(std::shared_ptr<const StructureFunctions> sf) {
  Generator X;
  X.kind = GeneratorKind::Scaling;
  X.xi_u_zero = true;
  X.xi_text = "t";
  X.eta_text = "g(u)";
  X.jet = [sf](double t, double u) {
    const auto g = g_and_derivatives(*sf, u);
    GeneratorJet j;
    j.xi = t;
    j.xi_t = 1.0;
    j.eta = g.g;
    j.eta_u = g.gp;
    j.eta_uu = g.gpp;
    return j;
  };
  return X;
}

Generator exponential_generator(std::shared_ptr<const StructureFunctions> sf, double a) {
  Generator X;
  X.kind = GeneratorKind::Exponential;
  X.a = a;
  X.xi_u_zero = true;
  X.xi_text = "exp(a*t)";
  X.eta_text = "a*exp(a*t)*g(u)";
  X.jet = [sf, a](double t, double u) {
    const auto g = g_and_derivatives(*sf, u);
    const double e = std::exp(a * t);
    GeneratorJet j;
    j.xi = e;
    j.xi_t = a * e;
    j.xi_tt = a * a * e;
    j.eta = a * e * g.g;
    j.eta_t = a * a * e * g.g;
    j.eta_tt = a * a * a * e * g.g;
    j.eta_u = a * e * g.gp;
    j.eta_tu = a * a * e * g.gp;
    j.eta_uu = a * e * g.gpp;
    return j;
  };
  return X;
}

Generator custom_generator(const Expr& xi, const Expr& eta) {
  struct Partials {
    Expr f, t, u, tt, tu, uu;
    explicit Partials(const Expr& e)
        : f(e),
          t(differentiate(e, Var::T)),
          u(differentiate(e, Var::U)),
          tt(differentiate(t, Var::T)),
          tu(differentiate(t, Var::U)),
          uu(differentiate(u, Var::U)) {}
  };
  auto px = std::make_shared<const Partials>(xi);
  auto pe = std::make_shared<const Partials>(eta);
  Generator X;
  X.kind = GeneratorKind::Custom;
  X.xi_u_zero = !xi.depends_on(Var::U);
  X.xi_text = to_string(xi);
  X.eta_text = to_string(eta);
  X.jet = [px, pe](double t, double u) {
    GeneratorJet j;
    j.xi = evaluate(px->f, u, t);
    j.xi_t = evaluate(px->t, u, t);
    j.xi_u = evaluate(px->u, u, t);
    j.xi_tt = evaluate(px->tt, u, t);
    j.xi_tu = evaluate(px->tu, u, t);
    j.xi_uu = evaluate(px->uu, u, t);
    j.eta = evaluate(pe->f, u, t);
    j.eta_t = evaluate(pe->t, u, t);
    j.eta_u = evaluate(pe->u, u, t);
    j.eta_tt = evaluate(pe->tt, u, t);
    j.eta_tu = evaluate(pe->tu, u, t);
    j.eta_uu = evaluate(pe->uu, u, t);
    return j;
  };
  return X;
}

Generator finite_difference_generator(std::function<double(double, double)> xi,
                                      std::function<double(double, double)> eta, double h) {
  Generator X;
  X.kind = GeneratorKind::Custom;
  X.xi_text = "<callable>";
  X.eta_text = "<callable>";
  X.jet = [xi, eta, h](double t, double u) {
    const double ht = h * (1.0 + std::abs(t));
    const double hu = h * (1.0 + std::abs(u));
    auto partials = [&](const std::function<double(double, double)>& f, double& v, double& vt,
                        double& vu, double& vtt, double& vtu, double& vuu) {
      v = f(t, u);
      const double tp = f(t + ht, u), tm = f(t - ht, u);
      const double up = f(t, u + hu), um = f(t, u - hu);
      vt = (tp - tm) / (2 * ht);
      vu = (up - um) / (2 * hu);
      vtt = (tp - 2 * v + tm) / (ht * ht);
      vuu = (up - 2 * v + um) / (hu * hu);
      vtu = (f(t + ht, u + hu) - f(t + ht, u - hu) - f(t - ht, u + hu) + f(t - ht, u - hu)) /
            (4 * ht * hu);
    };
    GeneratorJet j;
    partials(xi, j.xi, j.xi_t, j.xi_u, j.xi_tt, j.xi_tu, j.xi_uu);
    partials(eta, j.eta, j.eta_t, j.eta_u, j.eta_tt, j.eta_tu, j.eta_uu);
    return j;
  };
  return X;
}

std::vector<JetPoint> jet_box(const Interval& t, const Interval& u, double udot_max, int t_points,
                              int u_points, int udot_points) {
  const Eigen::ArrayXd ts = closed_grid(t, t_points);
  const Eigen::ArrayXd us = closed_grid(u, u_points);
  std::vector<double> vs;
  for (int j = 0; j < udot_points; ++j)
    vs.push_back(udot_max * std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * udot_points)));
  std::vector<JetPoint> out;
  out.reserve(static_cast<std::size_t>(t_points * u_points * udot_points));
  for (double tt : ts)
    for (double uu : us)
      for (double v : vs) out.push_back({tt, uu, v});
  return out;
}

std::vector<JetPoint> jet_box(const Interval& U, const Config& cfg, int n) {
  return jet_box(cfg.jet_t, U.inner(cfg.jet_u_fraction), cfg.jet_udot_max, cfg.jet_t_points,
                 cfg.jet_u_points, std::max(cfg.jet_udot_points, n + 3));
}

namespace {

// f_k and f_k' at one u, zero outside 0..n.
class CoefficientPoint {
 public:
  CoefficientPoint(const ProblemSpec& p, const std::vector<Expr>& df, double u) : n_(p.n) {
    f_.resize(static_cast<std::size_t>(n_ + 1));
    df_.resize(static_cast<std::size_t>(n_ + 1));
    for (int k = 0; k <= n_; ++k) {
      f_[static_cast<std::size_t>(k)] = evaluate(p.coefficient(k), u);
      df_[static_cast<std::size_t>(k)] = evaluate(df[static_cast<std::size_t>(k)], u);
    }
  }
  double f(int k) const { return k < 0 || k > n_ ? 0.0 : f_[static_cast<std::size_t>(k)]; }
  double df(int k) const { return k < 0 || k > n_ ? 0.0 : df_[static_cast<std::size_t>(k)]; }
  int n() const { return n_; }

  // Phi, dPhi/du, dPhi/dudot
  void phi(double v, double& P, double& Pu, double& Pv) const {
    P = Pu = Pv = 0.0;
    for (int k = n_; k >= 0; --k) {
      Pv = Pv * v + P;
      P = P * v + f(k);
      Pu = Pu * v + df(k);
    }
  }

 private:
  int n_;
  std::vector<double> f_, df_;
};

std::vector<Expr> derivatives(const ProblemSpec& p) {
  std::vector<Expr> out;
  for (int k = 0; k <= p.n; ++k) out.push_back(differentiate(p.coefficient(k)));
  return out;
}

// Coefficients and the matching sums of absolute term values.
void expansion(const GeneratorJet& j, const CoefficientPoint& c, std::vector<double>& coef,
               std::vector<double>& mag) {
  const int n = c.n();
  const int top = std::max(n + 1, 3);
  coef.assign(static_cast<std::size_t>(top + 1), 0.0);
  mag.assign(static_cast<std::size_t>(top + 1), 0.0);
  auto add = [&](int k, double term) {
    coef[static_cast<std::size_t>(k)] += term;
    mag[static_cast<std::size_t>(k)] += std::abs(term);
  };
  add(0, -j.eta_tt);
  add(1, j.xi_tt);
  add(1, -2.0 * j.eta_tu);
  add(2, 2.0 * j.xi_tu);
  add(2, -j.eta_uu);
  add(3, j.xi_uu);
  for (int k = 0; k <= n + 1; ++k) {
    add(k, c.df(k) * j.eta);
    add(k, (k + 1) * c.f(k + 1) * j.eta_t);
    add(k, (k - 1) * c.f(k) * j.eta_u);
    add(k, (2 - k) * c.f(k) * j.xi_t);
    add(k, (4 - k) * c.f(k - 1) * j.xi_u);
  }
}

// Bracket form value and a magnitude for normalization.
double bracket_value(const GeneratorJet& j, const CoefficientPoint& c, double v, double& mag) {
  double P, Pu, Pv;
  c.phi(v, P, Pu, Pv);
  const double zeta = j.eta_t + (j.eta_u - j.xi_t) * v - j.xi_u * v * v;
  const double h = zeta - j.xi * P;
  const double h_t = j.eta_tt + (j.eta_tu - j.xi_tt) * v - j.xi_tu * v * v - j.xi_t * P;
  const double h_u = j.eta_tu + (j.eta_uu - j.xi_tu) * v - j.xi_uu * v * v - j.xi_u * P - j.xi * Pu;
  const double h_v = (j.eta_u - j.xi_t) - 2.0 * j.xi_u * v - j.xi * Pv;
  const double W = (j.eta - j.xi * v) * Pu + h * Pv;
  const double S = h_t + v * h_u + P * h_v;
  mag = std::abs(W) + std::abs(h_t) + std::abs(v * h_u) + std::abs(P * h_v);
  return W - S;
}

template <class Eval>
ConditionResidual scan(std::span<const JetPoint> points, const ProblemSpec& problem, Eval eval) {
  const std::vector<Expr> df = derivatives(problem);
  ConditionResidual out;
  std::optional<CoefficientPoint> cache;
  double cached_u = std::numeric_limits<double>::quiet_NaN();
  for (const JetPoint& p : points) {
    if (!(p.u == cached_u)) {
      cache.emplace(problem, df, p.u);
      cached_u = p.u;
    }
    double mag = 0.0;
    const double v = std::abs(eval(p, *cache, mag));
    if (v > out.max_abs) {
      out.max_abs = v;
      out.worst = p;
    }
    out.max_normalized = std::max(out.max_normalized, v / (1.0 + mag));
  }
  return out;
}

}  // namespace

std::vector<double> condition_coefficients(const Generator& X, const ProblemSpec& problem, double t,
                                           double u) {
  const CoefficientPoint c(problem, derivatives(problem), u);
  std::vector<double> coef, mag;
  expansion(X.jet(t, u), c, coef, mag);
  return coef;
}

ConditionResidual prolongation_residual(const Generator& X, const ProblemSpec& problem,
                                        std::span<const JetPoint> points) {
  std::vector<double> coef, mag;
  return scan(points, problem, [&](const JetPoint& p, const CoefficientPoint& c, double& m) {
    expansion(X.jet(p.t, p.u), c, coef, mag);
    double value = 0.0, total = 0.0, vk = 1.0;
    for (std::size_t k = 0; k < coef.size(); ++k, vk *= p.udot) {
      value += coef[k] * vk;
      total += mag[k] * std::abs(vk);
    }
    m = total;
    return value;
  });
}

ConditionResidual bracket_residual(const Generator& X, const ProblemSpec& problem,
                                   std::span<const JetPoint> points) {
  return scan(points, problem, [&](const JetPoint& p, const CoefficientPoint& c, double& m) {
    return bracket_value(X.jet(p.t, p.u), c, p.udot, m);
  });
}

double coefficient_fit_mismatch(const Generator& X, const ProblemSpec& problem, double t, double u,
                                double udot_max, int samples) {
  const CoefficientPoint c(problem, derivatives(problem), u);
  const GeneratorJet j = X.jet(t, u);
  std::vector<double> coef, mag;
  expansion(j, c, coef, mag);
  const int degree = static_cast<int>(coef.size()) - 1;
  const int m = std::max(samples, degree + 2);

  // Fit in x = udot / udot_max so the Vandermonde matrix stays tame.
  Eigen::MatrixXd V(m, degree + 1);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    const double x = std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * m));
    double mg = 0.0;
    y[i] = bracket_value(j, c, udot_max * x, mg);
    double xk = 1.0;
    for (int k = 0; k <= degree; ++k, xk *= x) V(i, k) = xk;
  }
  const Eigen::VectorXd d = V.colPivHouseholderQr().solve(y);

  double worst = 0.0, scale = 0.0, vk = 1.0;
  for (int k = 0; k <= degree; ++k, vk *= udot_max) {
    const double expect = coef[static_cast<std::size_t>(k)] * vk;
    worst = std::max(worst, std::abs(d[k] - expect));
    scale = std::max(scale, std::abs(expect));
  }
  return worst / (1.0 + scale);
}

CoefficientResiduals coefficient_residuals(const Generator& X, const ProblemSpec& problem,
                                           const Eigen::ArrayXd& t, const Eigen::ArrayXd& u) {
  if (!X.xi_u_zero) throw SpecError("per-power residuals assume xi does not depend on u");
  const int n = problem.n;
  const std::vector<Expr> df = derivatives(problem);
  CoefficientResiduals out;
  out.t = t;
  out.u = u;
  out.R.assign(static_cast<std::size_t>(n + 1), Eigen::ArrayXXd::Zero(t.size(), u.size()));
  for (Eigen::Index iu = 0; iu < u.size(); ++iu) {
    const CoefficientPoint c(problem, df, u[iu]);
    for (Eigen::Index it = 0; it < t.size(); ++it) {
      const GeneratorJet j = X.jet(t[it], u[iu]);
      for (int k = 0; k <= n; ++k) {
        double r = c.df(k) * j.eta + (k + 1) * c.f(k + 1) * j.eta_t + (k - 1) * c.f(k) * j.eta_u +
                   (2 - k) * c.f(k) * j.xi_t;
        if (k == 0) r -= j.eta_tt;
        if (k == 1) r += j.xi_tt - 2.0 * j.eta_tu;
        if (k == 2) r -= j.eta_uu;
        out.R[static_cast<std::size_t>(k)](it, iu) = r;
      }
    }
  }
  return out;
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Completed:
      return "completed";
    case StopReason::LeftDomain:
      return "left_domain";
    case StopReason::BlowUp:
      return "blow_up";
    case StopReason::DomainError:
      return "domain_error";
  }
  return "completed";
}

double rhs(const ProblemSpec& problem, double u, double udot) {
  double acc = 0.0;
  for (int k = problem.n; k >= 0; --k) acc = acc * udot + evaluate(problem.coefficient(k), u);
  return acc;
}

Trajectory integrate(const ProblemSpec& problem, double t0, double u0, double v0, double t_end,
                     double h, std::optional<Interval> domain, double margin) {
  if (!(h > 0.0)) throw SpecError("step must be positive");
  if (!(t_end > t0)) throw SpecError("t_end must exceed t0");
  const Interval D = domain.value_or(problem.I);
  auto inside = [&](double u) { return D.lo + margin < u && u < D.hi - margin; };
  if (!inside(u0)) throw SpecError("initial value lies outside the integration domain");

  const auto steps = static_cast<Eigen::Index>(std::ceil((t_end - t0) / h - 1e-9));
  const double dt = (t_end - t0) / static_cast<double>(steps);

  std::vector<double> T{t0}, U{u0}, V{v0};
  Trajectory out;
  out.h = dt;
  double u = u0, v = v0;
  for (Eigen::Index i = 1; i <= steps; ++i) {
    double nu = 0.0, nv = 0.0;
    // Largest stage argument; a stage that has already run off to infinity
    // is a blow-up even when the coefficients then fail to evaluate.
    double stage_max = 0.0;
    auto stage = [&](double su, double sv) {
      stage_max = std::max({stage_max, std::abs(su), std::abs(sv)});
      if (!std::isfinite(stage_max)) stage_max = INFINITY;
      return rhs(problem, su, sv);
    };
    try {
      const double k1u = v, k1v = stage(u, v);
      const double k2u = v + 0.5 * dt * k1v, k2v = stage(u + 0.5 * dt * k1u, k2u);
      const double k3u = v + 0.5 * dt * k2v, k3v = stage(u + 0.5 * dt * k2u, k3u);
      const double k4u = v + dt * k3v, k4v = stage(u + dt * k3u, k4u);
      nu = u + dt / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
      nv = v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    } catch (const DomainError&) {
      out.stop = stage_max > kBlowUp ? StopReason::BlowUp : StopReason::DomainError;
      break;
    }
    if (!std::isfinite(nu) || !std::isfinite(nv) || std::abs(nu) > kBlowUp || std::abs(nv) > kBlowUp) {
      out.stop = StopReason::BlowUp;
      break;
    }
    if (!inside(nu)) {
      out.stop = StopReason::LeftDomain;
      break;
    }
    u = nu;
    v = nv;
    T.push_back(t0 + static_cast<double>(i) * dt);
    U.push_back(u);
    V.push_back(v);
  }
  out.t = Eigen::Map<const Eigen::ArrayXd>(T.data(), static_cast<Eigen::Index>(T.size()));
  out.u = Eigen::Map<const Eigen::ArrayXd>(U.data(), static_cast<Eigen::Index>(U.size()));
  out.udot = Eigen::Map<const Eigen::ArrayXd>(V.data(), static_cast<Eigen::Index>(V.size()));
  return out;
}

Trajectory flow_transform(const Generator& X, const Trajectory& traj, double s) {
  if (std::abs(s) > 1.0) throw SpecError("flow parameter must satisfy |s| <= 1");
  const Eigen::Index N = traj.t.size();
  if (N < 2) throw SpecError("trajectory needs at least two samples");

  // State (t, u, tau, mu): the point and a tangent (tau, mu) = (1, udot).
  using State = Eigen::Array4d;
  auto field = [&](const State& y) {
    const GeneratorJet j = X.jet(y[0], y[1]);
    return State(j.xi, j.eta, j.xi_t * y[2] + j.xi_u * y[3], j.eta_t * y[2] + j.eta_u * y[3]);
  };
  const int M = std::max(16, static_cast<int>(std::ceil(std::abs(s) / 0.005)));
  const double ds = s / M;

  Eigen::ArrayXd T(N), U(N), slope(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    State y(traj.t[i], traj.u[i], 1.0, traj.udot[i]);
    for (int m = 0; m < M; ++m) {
      const State k1 = field(y);
      const State k2 = field(y + 0.5 * ds * k1);
      const State k3 = field(y + 0.5 * ds * k2);
      const State k4 = field(y + ds * k3);
      y += ds / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    if (!(y[2] > 0.0))
      throw NonMonotoneImage("transformed curve turns back in t at sample " + std::to_string(i));
    T[i] = y[0];
    U[i] = y[1];
    slope[i] = y[3] / y[2];
  }
  for (Eigen::Index i = 1; i < N; ++i)
    if (!(T[i] > T[i - 1]))
      throw NonMonotoneImage("transformed times are not increasing at sample " + std::to_string(i));

  Trajectory out;
  out.method = traj.method;
  out.stop = traj.stop;
  out.t = Eigen::ArrayXd::LinSpaced(N, T[0], T[N - 1]);
  out.h = (T[N - 1] - T[0]) / static_cast<double>(N - 1);
  out.u.resize(N);
  out.udot.resize(N);
  Eigen::Index seg = 0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const double x = out.t[i];
    while (seg < N - 2 && x > T[seg + 1]) ++seg;
    const double w = T[seg + 1] - T[seg];
    const double q = std::clamp((x - T[seg]) / w, 0.0, 1.0);
    const double q2 = q * q, q3 = q2 * q;
    const double h00 = 2 * q3 - 3 * q2 + 1, h10 = q3 - 2 * q2 + q;
    const double h01 = -2 * q3 + 3 * q2, h11 = q3 - q2;
    out.u[i] = h00 * U[seg] + h10 * w * slope[seg] + h01 * U[seg + 1] + h11 * w * slope[seg + 1];
    const double d00 = 6 * q2 - 6 * q, d10 = 3 * q2 - 4 * q + 1;
    const double d01 = -6 * q2 + 6 * q, d11 = 3 * q2 - 2 * q;
    out.udot[i] = (d00 * U[seg] + d01 * U[seg + 1]) / w + d10 * slope[seg] + d11 * slope[seg + 1];
  }
  return out;
}

GridFn ode_residual(const ProblemSpec& problem, const Trajectory& traj) {
  const Eigen::Index N = traj.t.size();
  GridFn out;
  if (N < 3) return out;
  const double h = traj.h > 0 ? traj.h : traj.t[1] - traj.t[0];
  out.u = traj.t.segment(1, N - 2);
  out.v.resize(N - 2);
  for (Eigen::Index i = 1; i + 1 < N; ++i) {
    const double upp = (traj.u[i + 1] - 2.0 * traj.u[i] + traj.u[i - 1]) / (h * h);
    const double up = (traj.u[i + 1] - traj.u[i - 1]) / (2.0 * h);
    out.v[i - 1] = upp - rhs(problem, traj.u[i], up);
  }
  return out;
}

}  // namespace lienard
