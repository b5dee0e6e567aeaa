#pragma once

// Cohomogeneity-one model geometry: product metrics dt^2 + g_N over a
// periodic circle factor, conformal deformations g_u = e^{-2u} g_0 with
// u = u(t), and the pointwise Schouten-tensor calculus that feeds the
// eigenvalue machinery.
//
// Two normalizations for eigenvalue fields:
//   BackgroundInverse : lambda(g_0^{-1} A_{g_u})  (used by the solver)
//   MetricInverse     : lambda(g_u^{-1} A_{g_u}) = e^{2u} * the above
// Cone membership is invariant between the two (positive rescaling).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "conelab/cones.hpp"

namespace conelab::geometry {

using cones::LambdaVec;

// Periodic scalar field sampled on the uniform grid t_i = i * L/m.
struct GridField {
  std::vector<double> v;

  GridField() = default;
  explicit GridField(size_t m, double fill = 0.0) : v(m, fill) {}

  int size() const { return static_cast<int>(v.size()); }
  double& operator[](int i) { return v[static_cast<size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<size_t>(i)]; }
  // Index with periodic wrap-around.
  double at_wrap(int i) const {
    const int m = size();
    int j = i % m;
    if (j < 0) j += m;
    return v[static_cast<size_t>(j)];
  }
  static GridField constant(int m, double c) {
    return GridField(static_cast<size_t>(m), c);
  }
};

inline double mean(const GridField& f) {
  double s = 0.0;
  for (double x : f.v) s += x;
  return s / static_cast<double>(f.v.size());
}

inline double min_value(const GridField& f) {
  return *std::min_element(f.v.begin(), f.v.end());
}

inline double max_value(const GridField& f) {
  return *std::max_element(f.v.begin(), f.v.end());
}

inline double inf_norm(const GridField& f) {
  double s = 0.0;
  for (double x : f.v) s = std::max(s, std::abs(x));
  return s;
}

inline double inf_distance(const GridField& a, const GridField& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i)
    s = std::max(s, std::abs(a.v[i] - b.v[i]));
  return s;
}

// Second-order periodic central differences.
inline GridField d1(const GridField& f, double dt) {
  const int m = f.size();
  GridField out(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i)
    out[i] = (f.at_wrap(i + 1) - f.at_wrap(i - 1)) / (2.0 * dt);
  return out;
}

inline GridField d2(const GridField& f, double dt) {
  const int m = f.size();
  GridField out(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i)
    out[i] = (f.at_wrap(i + 1) - 2.0 * f[i] + f.at_wrap(i - 1)) / (dt * dt);
  return out;
}

// S^1_L x N^{n-1} with an Einstein fiber: Ric_N = (n-2) kappa g_N.
// kappa = 1, N = S^{n-1} is the round cylinder; kappa = 0 is flat.
struct CohomOneModel {
  int n = 4;
  double kappa = 1.0;
  double L = 2.0 * std::numbers::pi;
  int m = 128;
  double vol_fiber = 0.0;

  double dt() const { return L / m; }
  double grid_t(int i) const { return dt() * i; }
  double background_scalar_curvature() const {
    return (n - 1.0) * (n - 2.0) * kappa;
  }
  // lambda(g_0^{-1} A_{g_0}) = (-kappa/2, kappa/2, ..., kappa/2).
  LambdaVec background_eigs() const {
    LambdaVec lam(static_cast<size_t>(n), kappa / 2.0);
    lam[0] = -kappa / 2.0;
    return lam;
  }

  // Volume of the unit round sphere S^{d}, d = n-1: 2 pi^{n/2} / Gamma(n/2).
  static double round_sphere_volume(int n) {
    return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
  }

  static CohomOneModel make(int n, double kappa, int m,
                            double L = 2.0 * std::numbers::pi,
                            double vol_fiber = -1.0) {
    if (n < 3) throw std::invalid_argument("CohomOneModel: need n >= 3");
    if (m < 16 || m % 2 != 0)
      throw std::invalid_argument("CohomOneModel: need even m >= 16, got " +
                                  std::to_string(m));
    if (!(L > 0.0)) throw std::invalid_argument("CohomOneModel: need L > 0");
    CohomOneModel model;
    model.n = n;
    model.kappa = kappa;
    model.L = L;
    model.m = m;
    if (vol_fiber > 0.0) {
      model.vol_fiber = vol_fiber;
    } else if (kappa > 0.0) {
      // Round fiber of sectional curvature kappa.
      model.vol_fiber =
          round_sphere_volume(n) * std::pow(kappa, -(n - 1) / 2.0);
    } else {
      model.vol_fiber = 1.0;
    }
    return model;
  }
};

enum class Normalization { BackgroundInverse, MetricInverse };

// Eigenvalue field: one sorted-by-slot (radial first, then fiber) eigenvalue
// vector per grid point.
struct EigenField {
  Normalization norm = Normalization::BackgroundInverse;
  int n = 0;
  std::vector<LambdaVec> pts;

  int size() const { return static_cast<int>(pts.size()); }
};

// Trace-adjusted Schouten tensor of a metric g with Ricci tensor ric:
// (1/(n-2)) (ric - t R / (2(n-1)) g), R = tr(g^{-1} ric).
inline Eigen::MatrixXd pointwise_schouten(const Eigen::MatrixXd& g,
                                          const Eigen::MatrixXd& ric,
                                          double t) {
  const int n = static_cast<int>(g.rows());
  if (n < 3 || g.cols() != n || ric.rows() != n || ric.cols() != n)
    throw std::invalid_argument("pointwise_schouten: need square n >= 3 inputs");
  if (!(t <= 1.0))
    throw std::invalid_argument("pointwise_schouten: need t <= 1");
  if (!g.isApprox(g.transpose(), 1e-12) || !ric.isApprox(ric.transpose(), 1e-12))
    throw std::invalid_argument("pointwise_schouten: inputs must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("pointwise_schouten: metric not positive definite");
  const double R = llt.solve(ric).trace();
  return (ric - t * R / (2.0 * (n - 1.0)) * g) / (n - 2.0);
}

// Eigenvalues of g^{-1} S for symmetric S and SPD g, via Cholesky whitening
// L^{-1} S L^{-T}; returned ascending.
inline LambdaVec generalized_eigs(const Eigen::MatrixXd& g,
                                  const Eigen::MatrixXd& S) {
  const int n = static_cast<int>(g.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("generalized_eigs: metric not positive definite");
  // W = L^{-1} S L^{-T}: two triangular solves (S symmetric).
  const Eigen::MatrixXd half = llt.matrixL().solve(S);
  const Eigen::MatrixXd W = llt.matrixL().solve(half.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (W + W.transpose()));
  LambdaVec lam(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) lam[static_cast<size_t>(i)] = es.eigenvalues()(i);
  return lam;
}

// Pointwise reduction kernel: eigenvalues of g_0^{-1} A_{g_u} at a point
// where u has first/second t-derivatives (du, d2u).  Radial slot first.
inline LambdaVec schouten_eigs_from_jet(double du, double d2u, double kappa,
                                        int n) {
  LambdaVec lam(static_cast<size_t>(n), (kappa - du * du) / 2.0);
  lam[0] = d2u + (du * du - kappa) / 2.0;
  return lam;
}

inline EigenField conformal_schouten_eigs(const CohomOneModel& model,
                                          const GridField& u,
                                          Normalization norm) {
  if (u.size() != model.m)
    throw std::invalid_argument("conformal_schouten_eigs: field size mismatch");
  const GridField du = d1(u, model.dt());
  const GridField d2u = d2(u, model.dt());
  EigenField field;
  field.norm = norm;
  field.n = model.n;
  field.pts.resize(static_cast<size_t>(model.m));
  for (int i = 0; i < model.m; ++i) {
    LambdaVec lam = schouten_eigs_from_jet(du[i], d2u[i], model.kappa, model.n);
    if (norm == Normalization::MetricInverse) {
      const double s = std::exp(2.0 * u[i]);
      for (auto& x : lam) x *= s;
    }
    field.pts[static_cast<size_t>(i)] = std::move(lam);
  }
  return field;
}

inline EigenField lambda_tau_field(const EigenField& f, double tau) {
  EigenField out;
  out.norm = f.norm;
  out.n = f.n;
  out.pts.reserve(f.pts.size());
  for (const auto& lam : f.pts) out.pts.push_back(cones::lambda_tau(lam, tau));
  return out;
}

// Scalar curvature of g_u = e^{-2u} g_0 on the reduction, assembled through
// the conformal change formula rather than the eigenvalue field (the two
// routes agree through the trace identity R = 2(n-1) sigma_1).
inline GridField scalar_curvature(const CohomOneModel& model,
                                  const GridField& u) {
  const GridField du = d1(u, model.dt());
  const GridField d2u = d2(u, model.dt());
  const double R0 = model.background_scalar_curvature();
  GridField out(static_cast<size_t>(model.m));
  for (int i = 0; i < model.m; ++i)
    out[i] = std::exp(2.0 * u[i]) *
             (R0 + 2.0 * (model.n - 1.0) * d2u[i] -
              (model.n - 1.0) * (model.n - 2.0) * du[i] * du[i]);
  return out;
}

// Conformal-factor conventions: g_u = e^{-2u} g_0 = w^{4/(n-2)} g_0.
inline GridField conformal_factor_to_w(const GridField& u, int n) {
  GridField w(static_cast<size_t>(u.size()));
  for (int i = 0; i < u.size(); ++i)
    w[i] = std::exp(-(n - 2.0) * u[i] / 2.0);
  return w;
}

inline GridField conformal_factor_from_w(const GridField& w, int n) {
  GridField u(static_cast<size_t>(w.size()));
  for (int i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0))
      throw std::domain_error("conformal_factor_from_w: w must be positive at "
                              "grid point " + std::to_string(i));
    u[i] = -2.0 / (n - 2.0) * std::log(w[i]);
  }
  return u;
}

// Ricci endomorphism eigenvalues recovered from Schouten eigenvalues in the
// MetricInverse normalization: ric_i = (n-2) lam_i + sigma_1(lam).
inline LambdaVec ricci_eigs_from_schouten(std::span<const double> lam, int n) {
  const double s1 = cones::sigma1(lam);
  LambdaVec ric(lam.size());
  for (size_t i = 0; i < lam.size(); ++i) ric[i] = (n - 2.0) * lam[i] + s1;
  return ric;
}

// Convenience field builders used by the CLI and tests.
inline GridField make_sine_field(const CohomOneModel& model, double amp,
                                 int mode = 1, double phase = 0.0) {
  GridField u(static_cast<size_t>(model.m));
  for (int i = 0; i < model.m; ++i)
    u[i] = amp * std::sin(2.0 * std::numbers::pi * mode * model.grid_t(i) /
                              model.L +
                          phase);
  return u;
}

// Downward kink at `center`: u(t) = -depth * periodic distance to center.
inline GridField make_wedge_field(const CohomOneModel& model, double depth,
                                  double center) {
  GridField u(static_cast<size_t>(model.m));
  for (int i = 0; i < model.m; ++i) {
    double d = std::abs(model.grid_t(i) - center);
    d = std::min(d, model.L - d);
    u[i] = -depth * d;
  }
  return u;
}

}  // namespace conelab::geometry
