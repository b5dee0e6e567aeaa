#pragma once

// Localized conformal deformation harness on a flat Euclidean patch.
//
// The perturbation  u~ = u2 - mu (h - nu) xi  with
//   E(x)  = exp(-alpha |x|^2),
//   h(x)  = E(x) - exp(-alpha R^2),
//   xi(x) = cos(sqrt(alpha) (x_1 - xhat_1))
// lowers the trace-modified conformal Hessian by explicit rank-one and
// isotropic terms of order mu alpha^2 E and mu alpha nu, up to a remainder of
// order mu alpha^{3/2} E + mu alpha^{1/2} nu + mu^2 alpha nu^2.  The harness
// evaluates both sides of that expansion exactly on a lattice and reports the
// per-point remainder ratio together with the largest uniform matrix gap
// delta >= 0 with  A_{u~,tau} + delta e^{-2 u~} g0 <= A_{u2,tau}.
//
// Everything runs on a flat background (A_{g0} = 0, Christoffels zero): the
// harness isolates the perturbation algebra, not curvature bookkeeping.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace conelab::deformation {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Smooth test function supplied with analytic first and second partials.
struct SmoothFn {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;

  static SmoothFn zero(int n) {
    SmoothFn f;
    f.value = [](const Vec&) { return 0.0; };
    f.grad = [n](const Vec&) { return Vec(Vec::Zero(n)); };
    f.hess = [n](const Vec&) { return Mat(Mat::Zero(n, n)); };
    return f;
  }
};

struct DeformationParams {
  int n = 0;
  double alpha = 0.0;  // localization rate, > 1
  double mu = 0.0;     // perturbation amplitude, >= 0
  double nu = 0.0;     // level offset, >= 0
  double R = 0.0;      // radius of the ball where h > 0
  double R_A = 0.0;    // sub-ball radius, < 1/alpha
  double tau = 0.0;    // cone interpolation parameter, in (0,1)
  Vec xhat;            // sub-ball center, bounded away from the origin

  double E(const Vec& x) const { return std::exp(-alpha * x.squaredNorm()); }
  double h(const Vec& x) const { return E(x) - std::exp(-alpha * R * R); }
  double xi(const Vec& x) const {
    return std::cos(std::sqrt(alpha) * (x[0] - xhat[0]));
  }

  double perturbation(const Vec& x) const {
    return -mu * (h(x) - nu) * xi(x);
  }
  Vec perturbation_grad(const Vec& x) const {
    const double Ex = E(x), xix = xi(x);
    const double s = std::sin(std::sqrt(alpha) * (x[0] - xhat[0]));
    Vec g = 2.0 * mu * alpha * Ex * xix * x;  // -mu grad(h) xi
    g[0] += mu * std::sqrt(alpha) * (h(x) - nu) * s;  // -mu (h-nu) grad(xi)
    return g;
  }
  Mat perturbation_hess(const Vec& x) const {
    const double Ex = E(x), xix = xi(x);
    const double s = std::sin(std::sqrt(alpha) * (x[0] - xhat[0]));
    Mat H = 2.0 * mu * alpha * Ex * xix *
            (Mat::Identity(n, n) - 2.0 * alpha * x * x.transpose());
    for (int j = 0; j < n; ++j) {
      const double cross = -2.0 * mu * std::pow(alpha, 1.5) * Ex * s * x[j];
      H(0, j) += cross;
      H(j, 0) += cross;
    }
    H(0, 0) += mu * alpha * (h(x) - nu) * xix;
    return H;
  }

  // Validates the geometric constraints, in particular R_A < 1/alpha and
  // mu alpha E < 1 on the sub-ball.
  static DeformationParams validated(int n, double alpha, double mu, double nu,
                                     double R, double R_A, double tau,
                                     Vec xhat) {
    auto fail = [](const std::string& what) {
      throw std::invalid_argument("DeformationParams: " + what);
    };
    if (n < 2 || n > 4) fail("dimension must be 2, 3 or 4");
    if (!(alpha > 1.0)) fail("alpha must exceed 1");
    if (!(mu >= 0.0)) fail("mu must be nonnegative");
    if (!(nu >= 0.0)) fail("nu must be nonnegative");
    if (!(R > 0.0)) fail("R must be positive");
    if (!(R_A > 0.0 && R_A < 1.0 / alpha))
      fail("sub-ball radius must satisfy 0 < R_A < 1/alpha");
    if (!(tau > 0.0 && tau < 1.0)) fail("tau must lie in (0,1)");
    if (xhat.size() != n) fail("center dimension mismatch");
    const double r0 = xhat.norm();
    if (!(r0 > R_A)) fail("sub-ball must stay away from the origin");
    if (!(r0 + R_A <= R)) fail("sub-ball must sit inside the radius-R ball");
    const double e_max = std::exp(-alpha * (r0 - R_A) * (r0 - R_A));
    if (!(mu * alpha * e_max < 1.0))
      fail("mu alpha E must stay below 1 on the sub-ball");
    DeformationParams p;
    p.n = n;
    p.alpha = alpha;
    p.mu = mu;
    p.nu = nu;
    p.R = R;
    p.R_A = R_A;
    p.tau = tau;
    p.xhat = std::move(xhat);
    return p;
  }
};

// Uniform Cartesian lattice clipped to a Euclidean ball.
struct Lattice {
  std::vector<Vec> pts;

  static Lattice ball(int n, const Vec& center, double radius, int per_axis) {
    if (n < 2 || n > 4) throw std::invalid_argument("Lattice: dimension must be 2..4");
    if (center.size() != n) throw std::invalid_argument("Lattice: center dimension mismatch");
    if (per_axis < 3 || per_axis > 33 || per_axis % 2 == 0)
      throw std::invalid_argument("Lattice: per_axis must be odd, in [3, 33]");
    if (!(radius > 0.0)) throw std::invalid_argument("Lattice: radius must be positive");
    const int half = (per_axis - 1) / 2;
    const double step = radius / half;
    Lattice lat;
    std::vector<int> idx(static_cast<size_t>(n), -half);
    while (true) {
      Vec x = center;
      double r2 = 0.0;
      for (int d = 0; d < n; ++d) {
        const double off = step * idx[static_cast<size_t>(d)];
        x[d] += off;
        r2 += off * off;
      }
      if (r2 <= radius * radius * (1.0 + 1e-12)) lat.pts.push_back(std::move(x));
      int d = 0;
      while (d < n && ++idx[static_cast<size_t>(d)] > half) {
        idx[static_cast<size_t>(d)] = -half;
        ++d;
      }
      if (d == n) break;
    }
    return lat;
  }
};

struct DeformationJet {
  Vec x;
  double u2 = 0.0, u_tilde = 0.0;
  Vec grad;  // gradient of u~
  Mat hess;  // Hessian of u~
};

// Evaluates u~ = u2 + perturbation together with analytic first and second
// partials at every lattice point.
inline std::vector<DeformationJet> deformation_field(
    const DeformationParams& params, const SmoothFn& u2, const Lattice& grid) {
  std::vector<DeformationJet> jets;
  jets.reserve(grid.pts.size());
  for (const Vec& x : grid.pts) {
    DeformationJet j;
    j.x = x;
    j.u2 = u2.value(x);
    j.u_tilde = j.u2 + params.perturbation(x);
    j.grad = u2.grad(x) + params.perturbation_grad(x);
    j.hess = u2.hess(x) + params.perturbation_hess(x);
    jets.push_back(std::move(j));
  }
  return jets;
}

inline double c_n_tau(int n, double tau) {
  return 0.5 * (n - 2 - (n - 3) * tau);
}

// Trace-modified conformal Hessian on a flat background:
//   tau Hess u + (1-tau) (Lap u) I - c_{n,tau} |grad u|^2 I
//   + tau grad u (x) grad u.
inline Mat a_tau_flat(int n, double tau, const Vec& grad, const Mat& hess) {
  Mat A = tau * hess;
  A += ((1.0 - tau) * hess.trace() - c_n_tau(n, tau) * grad.squaredNorm()) *
       Mat::Identity(n, n);
  A += tau * grad * grad.transpose();
  return A;
}

struct ExpansionReport {
  std::vector<double> remainder_ratio;  // per lattice point
  double ratio_max = 0.0, ratio_min = 0.0;
  std::vector<double> delta_pointwise;  // per-point admissible gap
  double delta = 0.0;                   // max(0, min over points)
};

// Compares the exact tensor drop A_{u~,tau} - A_{u2,tau} against its four
// explicit leading terms and normalizes the remainder by the expansion's
// error scale.  Also reports the uniform matrix gap delta.
inline ExpansionReport deformation_expansion_check(
    const DeformationParams& params, const SmoothFn& u2, const Lattice& grid) {
  const int n = params.n;
  const double tau = params.tau, mu = params.mu, nu = params.nu,
               alpha = params.alpha;
  const double denom_const =
      mu * std::sqrt(alpha) * nu + mu * mu * alpha * nu * nu;
  ExpansionReport rep;
  rep.remainder_ratio.reserve(grid.pts.size());
  rep.delta_pointwise.reserve(grid.pts.size());
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = -std::numeric_limits<double>::infinity();
  double dmin = std::numeric_limits<double>::infinity();
  const Mat I = Mat::Identity(n, n);
  for (const Vec& x : grid.pts) {
    const double Ex = params.E(x), xix = params.xi(x);
    const Vec g2 = u2.grad(x);
    const Mat h2 = u2.hess(x);
    const Vec gt = g2 + params.perturbation_grad(x);
    const Mat ht = h2 + params.perturbation_hess(x);
    const Mat drop =
        a_tau_flat(n, tau, gt, ht) - a_tau_flat(n, tau, g2, h2);

    Mat explicit_terms =
        -4.0 * tau * mu * alpha * alpha * Ex * xix * x * x.transpose();
    explicit_terms -=
        (4.0 * (1.0 - tau) * mu * alpha * alpha * Ex * xix * x.squaredNorm() +
         (1.0 - tau) * mu * alpha * nu * xix) *
        I;
    explicit_terms(0, 0) -= tau * mu * alpha * nu * xix;

    const Mat remainder = drop - explicit_terms;
    const double denom = mu * std::pow(alpha, 1.5) * Ex + denom_const;
    const double ratio =
        mu == 0.0 ? 0.0
                  : remainder.operatorNorm() / denom;  // spectral norm
    rep.remainder_ratio.push_back(ratio);
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);

    const double u_tilde = u2.value(x) + params.perturbation(x);
    Eigen::SelfAdjointEigenSolver<Mat> es(-drop);
    const double delta_pt =
        std::exp(2.0 * u_tilde) * es.eigenvalues().minCoeff();
    rep.delta_pointwise.push_back(delta_pt);
    dmin = std::min(dmin, delta_pt);
  }
  rep.ratio_min = rmin;
  rep.ratio_max = rmax;
  rep.delta = std::max(0.0, dmin);
  return rep;
}

}  // namespace conelab::deformation
