#pragma once

// Per-metric curvature diagnostics on the cohomogeneity-one reduction:
// Ricci-pinching verification for sigma_2-cone metrics, and Yamabe-type
// functional evaluations built from integrals of sigma_k of the Schouten
// eigenvalues.  Everything here evaluates a single metric g_u = e^{-2u} g_0;
// class-wide infima/suprema are never computed, and every report carries a
// caveat label saying which side of the corresponding invariant it bounds.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "conelab/cones.hpp"
#include "conelab/geometry.hpp"

namespace conelab::diagnostics {

using cones::LambdaVec;
using geometry::CohomOneModel;
using geometry::EigenField;
using geometry::GridField;
using geometry::Normalization;

// Thrown when a diagnostic's curvature precondition (cone membership,
// positive scalar curvature) fails; names the offending grid point and the
// signed quantity that violated the bound.
class PreconditionError : public std::domain_error {
 public:
  PreconditionError(const std::string& what, int point_, double margin_)
      : std::domain_error(what), point(point_), margin(margin_) {}
  int point;
  double margin;
};

// ---------------------------------------------------------------------------
// Quadrature.  On the uniform periodic grid the trapezoid rule collapses to
// plain summation, so every integral below is vol_fiber * dt * sum(f).

struct QuadratureMeta {
  int m = 0;
  double dt = 0.0;
  double vol_fiber = 0.0;
};

inline QuadratureMeta quadrature_meta(const CohomOneModel& model) {
  return QuadratureMeta{model.m, model.dt(), model.vol_fiber};
}

inline double integrate(const CohomOneModel& model, const GridField& f) {
  if (f.size() != model.m)
    throw std::invalid_argument("integrate: field size " +
                                std::to_string(f.size()) + " != grid size " +
                                std::to_string(model.m));
  double s = 0.0;
  for (int i = 0; i < model.m; ++i) s += f[i];
  return model.vol_fiber * model.dt() * s;
}

// One evaluated functional.  The stored integrand is normalized so that
//     value == vol_fiber * dt * sum_i integrand[i]
// holds exactly even for composite functionals: constant normalizations
// (volume powers, the second factor of the n = 3 product) are folded into
// the integrand, and the raw pieces are kept in `components`.
struct FunctionalReport {
  std::string name;
  double value = 0.0;
  GridField integrand;
  QuadratureMeta quadrature;
  std::string caveat;  // "candidate / upper-bound value" style label
  std::vector<std::pair<std::string, double>> components;

  double component(const std::string& key) const {
    for (const auto& [k, v] : components)
      if (k == key) return v;
    throw std::out_of_range("FunctionalReport: no component '" + key + "'");
  }
};

// ---------------------------------------------------------------------------
// Trace-weighted Schouten eigenvalues.
//
// With A^t = (Ric - t R /(2(n-1)) g) / (n-2) one has
//   lambda(g^{-1}A^t_g) = lambda + (1-t)/(n-2) * sigma_1(lambda) * e,
// which is the positive multiple (1/tau) lambda^tau of the transform map
// lambda^tau = tau lambda + (1-tau) sigma_1 e at tau = (n-2)/(n-1-t).
// Cone membership of the two therefore agrees, linking the solver's tau
// schedule to the trace weight via t = n-1 - (n-2)/tau.

inline double t_from_tau(double tau, int n) {
  if (!(tau > 0.0 && tau <= 1.0))
    throw std::invalid_argument("t_from_tau: need 0 < tau <= 1, got " +
                                std::to_string(tau));
  return (n - 1.0) - (n - 2.0) / tau;
}

inline double tau_from_t(double t, int n) {
  if (!(t <= 1.0))
    throw std::invalid_argument("tau_from_t: need t <= 1, got " +
                                std::to_string(t));
  return (n - 2.0) / ((n - 1.0) - t);
}

inline LambdaVec lambda_trace_weight(std::span<const double> lam, double t,
                                     int n) {
  const double shift = (1.0 - t) / (n - 2.0) * cones::sigma1(lam);
  LambdaVec out(lam.size());
  for (size_t i = 0; i < lam.size(); ++i) out[i] = lam[i] + shift;
  return out;
}

// ---------------------------------------------------------------------------
// Ricci pinching.  Membership lambda(g^{-1}A^t_g) in Gamma_2^+ implies the
// two-sided pointwise bound
//     (t - 2 + 4/n) R g  <  2 Ric  <  (2 - t) R g.
// The slack is the smaller of the two one-sided gaps, minimized over
// eigen-directions; it is reported in the metric's own units (no rescaling).

inline double pinching_slack_from_eigs(std::span<const double> lam, int n,
                                       double t, double R) {
  const LambdaVec ric = geometry::ricci_eigs_from_schouten(lam, n);
  const double lower = (t - 2.0 + 4.0 / n) * R;
  const double upper = (2.0 - t) * R;
  double slack = std::numeric_limits<double>::infinity();
  for (double ri : ric)
    slack = std::min({slack, 2.0 * ri - lower, upper - 2.0 * ri});
  return slack;
}

struct PinchingReport {
  double t = 1.0;
  double slack = 0.0;  // min over grid points and eigen-directions
  int argmin = -1;
  double min_cone_margin = 0.0;  // min Gamma_2 margin of lambda(g^{-1}A^t)
  GridField slack_field;
};

// Verifies the Gamma_2^+ precondition at every grid point first, then
// assembles the slack field.  Ricci eigenvalues come from the eigenvalue
// route, the scalar curvature from the conformal-change formula; the two
// agree through the trace identity R = 2(n-1) sigma_1.
inline PinchingReport pinching_check(const CohomOneModel& model,
                                     const GridField& u, double t) {
  if (!(t <= 1.0))
    throw std::invalid_argument("pinching_check: need t <= 1, got " +
                                std::to_string(t));
  const EigenField eigs =
      geometry::conformal_schouten_eigs(model, u, Normalization::MetricInverse);
  const cones::ConeSpec gamma2 = cones::ConeSpec::gamma_k(model.n, 2);

  PinchingReport rep;
  rep.t = t;
  rep.min_cone_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < model.m; ++i) {
    const LambdaVec shifted = lambda_trace_weight(eigs.pts[size_t(i)], t, model.n);
    const cones::Membership mb = cones::membership(gamma2, shifted);
    if (mb.region != cones::Region::Interior)
      throw PreconditionError(
          "pinching_check: lambda(g^-1 A^t) leaves the interior of Gamma_2^+ "
          "at grid point " + std::to_string(i) + " (margin " +
          std::to_string(mb.margin) + ")",
          i, mb.margin);
    rep.min_cone_margin = std::min(rep.min_cone_margin, mb.margin);
  }

  const GridField R = geometry::scalar_curvature(model, u);
  rep.slack_field = GridField(static_cast<size_t>(model.m));
  rep.slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < model.m; ++i) {
    const double s =
        pinching_slack_from_eigs(eigs.pts[size_t(i)], model.n, t, R[i]);
    rep.slack_field[i] = s;
    if (s < rep.slack) {
      rep.slack = s;
      rep.argmin = i;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Yamabe-type functionals.  All use dv_{g_u} = e^{-n u} dv_{g_0} and the
// MetricInverse eigenvalue normalization; each is invariant under constant
// shifts u -> u + c (the normalizations are chosen for exactly that), which
// the tests audit.

namespace detail {

inline GridField sigma_weighted_integrand(const CohomOneModel& model,
                                          const GridField& u,
                                          const EigenField& eigs, int k,
                                          double t) {
  GridField f(static_cast<size_t>(model.m));
  for (int i = 0; i < model.m; ++i) {
    const LambdaVec lam = t == 1.0
                              ? eigs.pts[size_t(i)]
                              : lambda_trace_weight(eigs.pts[size_t(i)], t,
                                                    model.n);
    f[i] = cones::sigma(lam, k) * std::exp(-model.n * u[i]);
  }
  return f;
}

inline void require_positive_scalar_curvature(const CohomOneModel& model,
                                              const GridField& u,
                                              const std::string& who) {
  const GridField R = geometry::scalar_curvature(model, u);
  for (int i = 0; i < model.m; ++i)
    if (!(R[i] > 0.0))
      throw PreconditionError(who +
                                  ": scalar curvature of g_u is nonpositive "
                                  "at grid point " + std::to_string(i) +
                                  " (R = " + std::to_string(R[i]) + ")",
                              i, R[i]);
}

}  // namespace detail

// Quotient  (integral of sigma_2(lambda(g^{-1}A^t_g)) dv_g) / Vol(g)^{(n-4)/n}
// evaluated at g = g_u.  For n = 4 the exponent vanishes and the value is the
// plain (conformally invariant) integral.  An upper bound for the class
// infimum, never the infimum itself.
inline FunctionalReport y2t_quotient(const CohomOneModel& model,
                                     const GridField& u, double t) {
  if (!(t <= 1.0))
    throw std::invalid_argument("y2t_quotient: need t <= 1, got " +
                                std::to_string(t));
  detail::require_positive_scalar_curvature(model, u, "y2t_quotient");
  const EigenField eigs =
      geometry::conformal_schouten_eigs(model, u, Normalization::MetricInverse);

  FunctionalReport rep;
  rep.name = "y2t_quotient";
  rep.quadrature = quadrature_meta(model);
  rep.integrand = detail::sigma_weighted_integrand(model, u, eigs, 2, t);

  GridField vol_integrand(static_cast<size_t>(model.m));
  for (int i = 0; i < model.m; ++i)
    vol_integrand[i] = std::exp(-model.n * u[i]);
  const double numerator = integrate(model, rep.integrand);
  const double volume = integrate(model, vol_integrand);
  const double normalization =
      std::pow(volume, (model.n - 4.0) / model.n);

  rep.value = numerator / normalization;
  for (int i = 0; i < model.m; ++i) rep.integrand[i] /= normalization;
  rep.components = {{"t", t},
                    {"numerator", numerator},
                    {"volume", volume},
                    {"normalization", normalization}};
  rep.caveat = model.n == 4
                   ? "plain integral (volume exponent vanishes at n = 4); "
                     "conformally invariant, but still a per-metric value"
                   : "per-metric candidate: an upper bound for the class "
                     "infimum, not the invariant";
  return rep;
}

// Product of the sigma_2 and sigma_1 integrals over a 3-dimensional model.
// The two factors scale by e^{+c} and e^{-c} under u -> u + c, so the
// product is constant-shift invariant.
inline FunctionalReport f21_functional(const CohomOneModel& model,
                                       const GridField& u) {
  if (model.n != 3)
    throw std::invalid_argument("f21_functional: defined only for n = 3, got "
                                "n = " + std::to_string(model.n));
  const EigenField eigs =
      geometry::conformal_schouten_eigs(model, u, Normalization::MetricInverse);

  FunctionalReport rep;
  rep.name = "f21_functional";
  rep.quadrature = quadrature_meta(model);
  rep.integrand = detail::sigma_weighted_integrand(model, u, eigs, 2, 1.0);
  const GridField s1_integrand =
      detail::sigma_weighted_integrand(model, u, eigs, 1, 1.0);

  const double sigma2_integral = integrate(model, rep.integrand);
  const double sigma1_integral = integrate(model, s1_integrand);
  const GridField R = geometry::scalar_curvature(model, u);

  rep.value = sigma2_integral * sigma1_integral;
  for (int i = 0; i < model.m; ++i) rep.integrand[i] *= sigma1_integral;
  rep.components = {{"sigma2_integral", sigma2_integral},
                    {"sigma1_integral", sigma1_integral},
                    {"min_scalar_curvature", geometry::min_value(R)}};
  rep.caveat =
      "per-metric candidate for a supremum-type quantity; the sign is "
      "reported as-is and is not the class invariant";
  return rep;
}

// Rayleigh-type quotient  (integral of sigma_2 dv_g) / (integral of e^{4u}
// dv_g).  Positive scalar curvature is required except at n = 4, where the
// numerator alone carries the content and the denominator is the fixed
// background volume.
inline FunctionalReport sigma2_rayleigh(const CohomOneModel& model,
                                        const GridField& u) {
  if (model.n != 4)
    detail::require_positive_scalar_curvature(model, u, "sigma2_rayleigh");
  const EigenField eigs =
      geometry::conformal_schouten_eigs(model, u, Normalization::MetricInverse);

  FunctionalReport rep;
  rep.name = "sigma2_rayleigh";
  rep.quadrature = quadrature_meta(model);
  rep.integrand = detail::sigma_weighted_integrand(model, u, eigs, 2, 1.0);

  GridField den_integrand(static_cast<size_t>(model.m));
  for (int i = 0; i < model.m; ++i)
    den_integrand[i] = std::exp((4.0 - model.n) * u[i]);
  const double numerator = integrate(model, rep.integrand);
  const double denominator = integrate(model, den_integrand);

  rep.value = numerator / denominator;
  for (int i = 0; i < model.m; ++i) rep.integrand[i] /= denominator;
  rep.components = {{"numerator", numerator}, {"denominator", denominator}};
  rep.caveat = model.n == 3
                   ? "per-metric candidate for a supremum over the class; "
                     "not an invariant of [g_0]"
                   : "per-metric candidate: bounds the class quantity from "
                     "one side only";
  return rep;
}

}  // namespace conelab::diagnostics
