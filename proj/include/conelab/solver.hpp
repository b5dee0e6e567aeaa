#pragma once

// Fully nonlinear solver layer for the reduced equation
//
//   f(lambda^tau(g_0^{-1} A_{g_u})) = h(t, u)          on S^1_L,
//
// with f the defining function of a cone Gamma, h a strictly proper
// right-hand side (increasing in u, -> 0 at -inf, -> +inf at +inf), and the
// admissibility constraint lambda^tau staying strictly inside Gamma at every
// grid point.  Newton iteration with residual backtracking, a homotopy in
// the shift parameter tau starting from the explicitly solvable leg, and a
// rate ladder that extracts the generalized eigenvalue in the vanishing-rate
// limit.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "conelab/cones.hpp"
#include "conelab/geometry.hpp"

namespace conelab::solver {

using cones::ConeSpec;
using cones::LambdaVec;
using geometry::CohomOneModel;
using geometry::GridField;

// Admissibility failure at a specific grid point: the shifted eigenvalue
// vector left the open cone.  Carries the point and its signed margin so
// that callers can damp their step.
class DomainBreachError : public std::runtime_error {
 public:
  DomainBreachError(int point_, double margin_)
      : std::runtime_error("domain breach at grid point " +
                           std::to_string(point_) + " (margin " +
                           std::to_string(margin_) + ")"),
        point(point_),
        margin(margin_) {}
  int point;
  double margin;
};

// The background geometry admits no valid homotopy start.
class AdmissibilityError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The tau-march ground to a halt above the minimum step size.
class ContinuationStallError : public std::runtime_error {
 public:
  ContinuationStallError(double tau_reached_, std::string detail)
      : std::runtime_error("continuation stalled at tau = " +
                           std::to_string(tau_reached_) + ": " + detail),
        tau_reached(tau_reached_) {}
  double tau_reached;
};

// h(t, z) = sum_r c_r(t) e^{beta_r z} with c_r > 0 and beta_r > 0.  Strict
// properness (monotone in z with the required limits) holds by construction.
struct RhsSpec {
  struct Term {
    GridField coeff;
    double beta;
  };
  std::vector<Term> terms;

  double value(int i, double z) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.coeff[i] * std::exp(t.beta * z);
    return s;
  }
  double dz(int i, double z) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.beta * t.coeff[i] * std::exp(t.beta * z);
    return s;
  }

  static RhsSpec proper_exp(double beta, GridField h_tilde) {
    if (!(beta > 0.0))
      throw std::invalid_argument("RhsSpec: need rate beta > 0");
    for (double c : h_tilde.v)
      if (!(c > 0.0))
        throw std::invalid_argument("RhsSpec: coefficient field must be "
                                    "strictly positive");
    RhsSpec r;
    r.terms.push_back({std::move(h_tilde), beta});
    return r;
  }

  // Convex blend along the homotopy leg between the explicitly solvable
  // start (tau = delta, weight on h0 e^{2z}) and the target at tau = T.
  // Valid for either marching direction; weights stay in [0, 1].
  static RhsSpec homotopy_blend(double delta, double T, const GridField& h0,
                                const RhsSpec& target, double tau) {
    const double den = T - delta;
    if (std::abs(den) < 1e-14)
      throw std::invalid_argument("homotopy_blend: degenerate leg T == delta");
    const double w0 = (T - tau) / den;
    const double w1 = (tau - delta) / den;
    if (w0 < -1e-12 || w1 < -1e-12)
      throw std::invalid_argument("homotopy_blend: tau outside [delta, T]");
    RhsSpec r;
    if (w0 > 1e-15) {
      GridField c = h0;
      for (auto& x : c.v) x *= w0;
      r.terms.push_back({std::move(c), 2.0});
    }
    if (w1 > 1e-15) {
      for (const auto& t : target.terms) {
        GridField c = t.coeff;
        for (auto& x : c.v) x *= w1;
        r.terms.push_back({std::move(c), t.beta});
      }
    }
    return r;
  }
};

// Tridiagonal matrix with periodic corner entries: row i couples columns
// i-1, i, i+1 modulo m.
struct PeriodicBanded {
  int m = 0;
  std::vector<double> sub, diag, sup;

  GridField apply(const GridField& x) const {
    GridField y(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i)
      y[i] = sub[static_cast<size_t>(i)] * x.at_wrap(i - 1) +
             diag[static_cast<size_t>(i)] * x[i] +
             sup[static_cast<size_t>(i)] * x.at_wrap(i + 1);
    return y;
  }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      A(i, (i - 1 + m) % m) += sub[static_cast<size_t>(i)];
      A(i, i) += diag[static_cast<size_t>(i)];
      A(i, (i + 1) % m) += sup[static_cast<size_t>(i)];
    }
    return A;
  }
};

namespace detail {

// Shifted eigenvalue vector at one grid point, with its cone membership.
inline std::pair<LambdaVec, cones::Membership> shifted_eigs_at(
    const ConeSpec& cone, double tau, double du, double d2u, double kappa,
    int n) {
  const LambdaVec lam = geometry::schouten_eigs_from_jet(du, d2u, kappa, n);
  LambdaVec w = cones::lambda_tau(lam, tau);
  auto mb = cones::membership(cone, w);
  return {std::move(w), mb};
}

}  // namespace detail

// Pointwise residual f(lambda^tau) - h(t, u).  Throws DomainBreachError at
// the first grid point whose shifted eigenvalues are not strictly interior.
inline GridField residual(const CohomOneModel& model, const ConeSpec& cone,
                          double tau, const RhsSpec& rhs, const GridField& u) {
  if (u.size() != model.m)
    throw std::invalid_argument("residual: field size mismatch");
  const GridField du = geometry::d1(u, model.dt());
  const GridField d2u = geometry::d2(u, model.dt());
  GridField r(static_cast<size_t>(model.m));
  for (int i = 0; i < model.m; ++i) {
    auto [w, mb] = detail::shifted_eigs_at(cone, tau, du[i], d2u[i],
                                           model.kappa, model.n);
    if (mb.region != cones::Region::Interior)
      throw DomainBreachError(i, mb.margin);
    r[i] = cones::f_eval(cone, w) - rhs.value(i, u[i]);
  }
  return r;
}

// Smallest cone margin of lambda^tau over the grid (diagnostic; assumes the
// field is evaluable, i.e. does not throw).
inline double min_cone_margin(const CohomOneModel& model, const ConeSpec& cone,
                              double tau, const GridField& u) {
  const GridField du = geometry::d1(u, model.dt());
  const GridField d2u = geometry::d2(u, model.dt());
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < model.m; ++i) {
    auto [w, mb] = detail::shifted_eigs_at(cone, tau, du[i], d2u[i],
                                           model.kappa, model.n);
    m = std::min(m, mb.margin);
  }
  return m;
}

// Linearization of the residual around u.  With lam = (lam_r, lam_f, ...)
// the radial/fiber split of the reduction, a variation phi enters through
//   d lam_r = phi'' + u' phi',   d lam_f = -u' phi',
// and the shift contributes through sigma_1(d lam) = phi'' - (n-2) u' phi'.
// Writing g = grad f at lambda^tau and G = sum_i g_i, the stencil weights
// come out as
//   a = tau g_r + (1-tau) G                       (phi'' coefficient)
//   b = u' [ tau (2 g_r - G) - (1-tau)(n-2) G ]   (phi'  coefficient)
//   c = -dh/dz                                    (diagonal)
inline PeriodicBanded jacobian(const CohomOneModel& model, const ConeSpec& cone,
                               double tau, const RhsSpec& rhs,
                               const GridField& u) {
  const double dt = model.dt();
  const GridField du = geometry::d1(u, dt);
  const GridField d2u = geometry::d2(u, dt);
  PeriodicBanded J;
  J.m = model.m;
  J.sub.resize(static_cast<size_t>(model.m));
  J.diag.resize(static_cast<size_t>(model.m));
  J.sup.resize(static_cast<size_t>(model.m));
  const int n = model.n;
  for (int i = 0; i < model.m; ++i) {
    auto [w, mb] = detail::shifted_eigs_at(cone, tau, du[i], d2u[i],
                                           model.kappa, n);
    if (mb.region != cones::Region::Interior)
      throw DomainBreachError(i, mb.margin);
    const LambdaVec g = cones::f_grad(cone, w);
    double G = 0.0;
    for (double x : g) G += x;
    const double gr = g[0];
    const double a = tau * gr + (1.0 - tau) * G;
    const double b =
        du[i] * (tau * (2.0 * gr - G) - (1.0 - tau) * (n - 2.0) * G);
    const double c = -rhs.dz(i, u[i]);
    J.sub[static_cast<size_t>(i)] = a / (dt * dt) - b / (2.0 * dt);
    J.diag[static_cast<size_t>(i)] = -2.0 * a / (dt * dt) + c;
    J.sup[static_cast<size_t>(i)] = a / (dt * dt) + b / (2.0 * dt);
  }
  return J;
}

enum class SolveStatus { Solved, MaxIterations, DomainCollapse };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return "solved";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::DomainCollapse: return "domain_collapse";
  }
  return "unknown";
}

struct SolverState {
  double tau = 0.0;
  GridField u;
  double residual_norm = 0.0;
  int newton_iters = 0;
  double min_margin = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  SolveStatus status = SolveStatus::Solved;
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 50;
  double step_floor = 1e-6;
};

// Damped Newton with residual backtracking; a trial step that either leaves
// the cone (DomainBreachError from the residual) or fails to decrease the
// residual is halved.  Throws DomainBreachError if u0 itself is outside the
// admissible set.
inline SolverState newton_solve(const CohomOneModel& model,
                                const ConeSpec& cone, double tau,
                                const RhsSpec& rhs, const GridField& u0,
                                const NewtonOptions& opt = {}) {
  GridField u = u0;
  GridField r = residual(model, cone, tau, rhs, u);  // may throw: bad start
  double rn = geometry::inf_norm(r);
  int iters = 0;
  SolveStatus status = SolveStatus::MaxIterations;

  while (iters < opt.max_iter) {
    if (rn <= opt.tol) {
      status = SolveStatus::Solved;
      break;
    }
    const PeriodicBanded J = jacobian(model, cone, tau, rhs, u);
    const Eigen::MatrixXd A = J.dense();
    Eigen::VectorXd rhs_vec(model.m);
    for (int i = 0; i < model.m; ++i) rhs_vec(i) = -r[i];
    const Eigen::VectorXd s = A.partialPivLu().solve(rhs_vec);

    double step = 1.0;
    bool accepted = false;
    while (step >= opt.step_floor) {
      GridField u_try = u;
      for (int i = 0; i < model.m; ++i) u_try[i] += step * s(i);
      try {
        GridField r_try = residual(model, cone, tau, rhs, u_try);
        const double rn_try = geometry::inf_norm(r_try);
        if (rn_try < rn * (1.0 - 1e-4 * step) || rn_try <= opt.tol) {
          u = std::move(u_try);
          r = std::move(r_try);
          rn = rn_try;
          accepted = true;
          break;
        }
      } catch (const DomainBreachError&) {
        // fall through to damping
      }
      step *= 0.5;
    }
    ++iters;
    if (!accepted) {
      status = SolveStatus::DomainCollapse;
      break;
    }
    if (rn <= opt.tol) {
      status = SolveStatus::Solved;
      break;
    }
  }
  if (rn <= opt.tol) status = SolveStatus::Solved;

  SolverState st;
  st.tau = tau;
  st.u = std::move(u);
  st.residual_norm = rn;
  st.newton_iters = iters;
  st.min_margin = min_cone_margin(model, cone, tau, st.u);
  st.min_u = geometry::min_value(st.u);
  st.max_u = geometry::max_value(st.u);
  st.status = status;
  return st;
}

// Largest delta for which the shifted background eigenvalues stay in the
// positive orthant: lambda^delta_i = sigma_1 + delta (lambda_i - sigma_1).
inline double delta_sup(const CohomOneModel& model) {
  const LambdaVec lam = model.background_eigs();
  const double s1 = cones::sigma1(lam);
  if (!(s1 > 0.0)) return 0.0;
  double sup = 1.0;
  for (double li : lam)
    if (li < s1) sup = std::min(sup, s1 / (s1 - li));
  return sup;
}

// Homotopy start parameter: 0.9 of the admissible supremum, capped at 1/2.
// Throws AdmissibilityError when the background offers no valid start (e.g.
// the flat model, whose eigenvalues vanish identically).
inline double delta_start(const CohomOneModel& model, const ConeSpec& cone) {
  const double sup = delta_sup(model);
  if (!(sup > 0.0))
    throw AdmissibilityError(
        "no admissible homotopy start: shifted background eigenvalues never "
        "reach the positive orthant (sigma_1 <= 0)");
  const double delta = std::min(0.9 * sup, 0.5);
  const LambdaVec start =
      cones::lambda_tau(model.background_eigs(), delta);
  if (cones::membership(cone, start).region != cones::Region::Interior)
    throw AdmissibilityError("no admissible homotopy start: shifted "
                             "background eigenvalues not interior to " +
                             cone.describe());
  return delta;
}

struct ContinuationOptions {
  int initial_steps = 10;
  double min_dtau = 1e-4;
  double max_growth = 1.5;
  NewtonOptions newton;
};

struct ContinuationResult {
  std::vector<SolverState> states;
  bool reached_target = false;
  double tau_reached = 0.0;
  double delta = 0.0;
  std::string stall_detail;
};

// March tau from the solvable start delta to the target T, warm-starting
// Newton at each step and halving the step on failure.  The per-step
// equation blends the start data h0 e^{2u} with the target right-hand side.
inline ContinuationResult continuation(const CohomOneModel& model,
                                       const ConeSpec& cone,
                                       const RhsSpec& target, double T,
                                       const ContinuationOptions& opt = {}) {
  if (!(T <= 1.0))
    throw std::invalid_argument("continuation: need target tau <= 1");
  double delta = delta_start(model, cone);
  // Keep a genuine homotopy leg when the target collides with the start.
  if (std::abs(T - delta) < 1e-3) delta *= 0.85;

  const double h0_val =
      cones::f_eval(cone, cones::lambda_tau(model.background_eigs(), delta));
  const GridField h0 = GridField::constant(model.m, h0_val);

  ContinuationResult out;
  out.delta = delta;

  GridField u = GridField::constant(model.m, 0.0);
  {
    // tau = delta: u = 0 solves the start equation exactly.
    const RhsSpec rhs0 = RhsSpec::homotopy_blend(delta, T, h0, target, delta);
    SolverState st = newton_solve(model, cone, delta, rhs0, u, opt.newton);
    if (st.status != SolveStatus::Solved) {
      out.tau_reached = delta;
      out.stall_detail = "start leg did not converge";
      return out;
    }
    u = st.u;
    out.states.push_back(std::move(st));
  }

  const double span = T - delta;
  double dtau = span / opt.initial_steps;
  const double dtau0 = std::abs(dtau);
  double tau = delta;
  while (std::abs(tau - T) > 1e-15) {
    double tau_next = tau + dtau;
    if ((span > 0 && tau_next > T) || (span < 0 && tau_next < T)) tau_next = T;
    const RhsSpec rhs =
        RhsSpec::homotopy_blend(delta, T, h0, target, tau_next);
    bool ok = false;
    SolverState st;
    try {
      st = newton_solve(model, cone, tau_next, rhs, u, opt.newton);
      ok = (st.status == SolveStatus::Solved);
    } catch (const DomainBreachError&) {
      ok = false;
    }
    if (ok) {
      tau = tau_next;
      u = st.u;
      out.states.push_back(std::move(st));
      dtau = std::clamp(dtau * opt.max_growth, -dtau0, dtau0);
    } else {
      dtau *= 0.5;
      if (std::abs(dtau) < opt.min_dtau) {
        out.tau_reached = tau;
        std::ostringstream os;
        os << "step size collapsed below " << opt.min_dtau << " at tau = "
           << tau << " (target " << T << ")";
        if (!out.states.empty())
          os << "; last min_u = " << out.states.back().min_u
             << ", last residual = " << out.states.back().residual_norm;
        out.stall_detail = os.str();
        return out;
      }
    }
  }
  out.reached_target = true;
  out.tau_reached = T;
  return out;
}

struct EigenpairResult {
  double tau = 0.0;
  double mu = 0.0;              // e^{beta * mean(u)} at the smallest rate
  GridField v;                  // mean-free profile at the smallest rate
  std::vector<std::pair<double, double>> ladder;  // (beta, mu_beta)
  bool stabilized = false;
  SolverState final_state;
};

// Generalized eigenvalue at shift tau via the vanishing-rate limit: solve
// with h = e^{beta u} down a ladder of rates and read off e^{beta mean(u)}.
inline EigenpairResult eigenvalue_extract(
    const CohomOneModel& model, const ConeSpec& cone, double tau,
    std::vector<double> beta_ladder = {1.0, 0.5, 0.25, 0.1, 0.05},
    const ContinuationOptions& opt = {}) {
  if (beta_ladder.empty())
    throw std::invalid_argument("eigenvalue_extract: empty rate ladder");
  std::sort(beta_ladder.begin(), beta_ladder.end(), std::greater<>());

  const RhsSpec target = RhsSpec::proper_exp(
      beta_ladder.front(), GridField::constant(model.m, 1.0));
  ContinuationResult cont = continuation(model, cone, target, tau, opt);
  if (!cont.reached_target)
    throw ContinuationStallError(cont.tau_reached, cont.stall_detail);

  EigenpairResult out;
  out.tau = tau;
  SolverState state = cont.states.back();
  for (double beta : beta_ladder) {
    const RhsSpec rhs =
        RhsSpec::proper_exp(beta, GridField::constant(model.m, 1.0));
    state = newton_solve(model, cone, tau, rhs, state.u, opt.newton);
    if (state.status != SolveStatus::Solved)
      throw ContinuationStallError(
          tau, "rate rung beta = " + std::to_string(beta) +
                   " did not converge (" + std::string(to_string(state.status)) +
                   ")");
    const double ubar = geometry::mean(state.u);
    out.ladder.emplace_back(beta, std::exp(beta * ubar));
  }
  out.mu = out.ladder.back().second;
  const double ubar = geometry::mean(state.u);
  out.v = state.u;
  for (auto& x : out.v.v) x -= ubar;
  const size_t nl = out.ladder.size();
  if (nl >= 3) {
    double lo = out.ladder[nl - 1].second, hi = lo;
    for (size_t i = nl - 3; i < nl; ++i) {
      lo = std::min(lo, out.ladder[i].second);
      hi = std::max(hi, out.ladder[i].second);
    }
    out.stabilized = (hi - lo) < 1e-4;
  } else {
    out.stabilized = true;
  }
  out.final_state = std::move(state);
  return out;
}

enum class ProbeOutcome { Solved, ObstructedFlat, Diverging, Stalled };

inline const char* to_string(ProbeOutcome o) {
  switch (o) {
    case ProbeOutcome::Solved: return "solved";
    case ProbeOutcome::ObstructedFlat: return "obstructed_flat";
    case ProbeOutcome::Diverging: return "diverging";
    case ProbeOutcome::Stalled: return "stalled";
  }
  return "unknown";
}

struct ProbeReport {
  ProbeOutcome outcome = ProbeOutcome::Stalled;
  double tau_reached = 0.0;
  std::string detail;
  std::optional<SolverState> final_state;
};

// Classify the solve attempt: admissibility obstruction at the start, a
// diverging branch (monotone min_u trend through -20 over at least five
// consecutive accepted steps), a stall, or success.  Trend plus residual,
// never solution magnitude alone.
inline ProbeReport nonexistence_probe(const CohomOneModel& model,
                                      const ConeSpec& cone, double tau,
                                      const RhsSpec& target,
                                      const ContinuationOptions& opt = {}) {
  ProbeReport rep;
  ContinuationResult cont;
  try {
    cont = continuation(model, cone, target, tau, opt);
  } catch (const AdmissibilityError& e) {
    rep.outcome = ProbeOutcome::ObstructedFlat;
    rep.detail = e.what();
    return rep;
  }
  rep.tau_reached = cont.tau_reached;
  if (cont.reached_target) {
    rep.outcome = ProbeOutcome::Solved;
    rep.final_state = cont.states.back();
    rep.detail = "target reached";
    return rep;
  }
  int run = 1;
  const auto& states = cont.states;
  for (size_t i = states.size(); i-- > 1;) {
    if (states[i].min_u < states[i - 1].min_u) ++run;
    else break;
  }
  if (!states.empty() && run >= 5 && states.back().min_u < -20.0) {
    rep.outcome = ProbeOutcome::Diverging;
    std::ostringstream os;
    os << "min_u decreasing over " << run << " consecutive steps to "
       << states.back().min_u << "; " << cont.stall_detail;
    rep.detail = os.str();
  } else {
    rep.outcome = ProbeOutcome::Stalled;
    rep.detail = cont.stall_detail;
  }
  if (!states.empty()) rep.final_state = states.back();
  return rep;
}

}  // namespace conelab::solver
