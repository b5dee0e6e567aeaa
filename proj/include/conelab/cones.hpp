#pragma once

// Elementary-symmetric cone algebra: Garding cones Gamma_k^+, their
// trace-shift transforms, defining functions f = sigma_k^{1/k}, and the
// membership / gradient / inequality-margin kernels built on top of them.
//
// Conventions used throughout:
//   sigma_j(lam)   : j-th elementary symmetric polynomial of lam in R^n
//   lam^tau        : tau*lam + (1-tau)*sigma_1(lam)*e,  e = (1,...,1)
//   Gamma_k^+      : { lam : sigma_j(lam) > 0 for all 1 <= j <= k }
//   transform cone : { lam : lam^{tau'} lies in the base cone }
// Membership margins are normalized so that margin(e) = 1 for Gamma_k^+.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace conelab::cones {

using LambdaVec = std::vector<double>;

inline constexpr double kDefaultTol = 1e-10;

// C(n, j) computed multiplicatively; exact in double for the small n used here.
inline double binomial(int n, int j) {
  if (j < 0 || j > n) return 0.0;
  j = std::min(j, n - j);
  double r = 1.0;
  for (int i = 1; i <= j; ++i) r = r * double(n - j + i) / double(i);
  return r;
}

// All elementary symmetric polynomials e_0..e_n of lam, via the coefficient
// recurrence for prod_i (x + lam_i).  O(n^2), no cancellation surprises at
// the dimensions this library targets (n <= 16).
inline std::vector<double> sigma_all(std::span<const double> lam) {
  const int n = static_cast<int>(lam.size());
  std::vector<double> c(static_cast<size_t>(n) + 1, 0.0);
  c[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::min(i + 1, n); j >= 1; --j) c[j] += lam[i] * c[j - 1];
  return c;
}

inline double sigma(std::span<const double> lam, int j) {
  if (j == 0) return 1.0;
  const int n = static_cast<int>(lam.size());
  if (j < 0 || j > n) return 0.0;
  return sigma_all(lam)[static_cast<size_t>(j)];
}

inline double sigma1(std::span<const double> lam) {
  double s = 0.0;
  for (double x : lam) s += x;
  return s;
}

// lam^tau = tau*lam + (1-tau)*sigma_1(lam)*e.  tau = 1 is the identity,
// tau = 0 collapses onto the diagonal ray sigma_1(lam)*e.
inline LambdaVec lambda_tau(std::span<const double> lam, double tau) {
  const double shift = (1.0 - tau) * sigma1(lam);
  LambdaVec out(lam.size());
  for (size_t i = 0; i < lam.size(); ++i) out[i] = tau * lam[i] + shift;
  return out;
}

enum class Region { Interior, Boundary, Exterior };

struct Membership {
  Region region;
  double margin;  // min_j sigma_j / C(n,j); > 0 strictly inside, signed
};

class ConeSpec {
 public:
  enum class Kind { ElemSym, TauTransform };

  static ConeSpec gamma_k(int n, int k);
  // Transform of an existing cone; tau_prime > 1 is admitted only when the
  // result still pinches between Gamma_n^+ and Gamma_1^+ (checked by a
  // contains-e test plus deterministic sigma_1 sampling).
  static ConeSpec tau_transform(const ConeSpec& base, double tau_prime);

  int dimension() const { return n_; }
  Kind kind() const { return kind_; }
  int k() const { return k_; }
  double tau_prime() const { return tau_prime_; }
  const ConeSpec& base() const { return *base_; }
  bool is_gamma1() const { return kind_ == Kind::ElemSym && k_ == 1; }

  std::string describe() const;

 private:
  ConeSpec() = default;
  int n_ = 0;
  Kind kind_ = Kind::ElemSym;
  int k_ = 0;
  double tau_prime_ = 1.0;
  std::shared_ptr<const ConeSpec> base_;
};

inline Membership membership(const ConeSpec& cone, std::span<const double> lam,
                             double tol = kDefaultTol) {
  if (static_cast<int>(lam.size()) != cone.dimension())
    throw std::invalid_argument("membership: eigenvalue vector has dimension " +
                                std::to_string(lam.size()) + ", cone expects " +
                                std::to_string(cone.dimension()));
  if (cone.kind() == ConeSpec::Kind::TauTransform) {
    const LambdaVec shifted = lambda_tau(lam, cone.tau_prime());
    return membership(cone.base(), shifted, tol);
  }
  const int n = cone.dimension();
  const auto e = sigma_all(lam);
  double margin = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= cone.k(); ++j)
    margin = std::min(margin, e[static_cast<size_t>(j)] / binomial(n, j));
  Region region = Region::Boundary;
  if (margin > tol) region = Region::Interior;
  else if (margin < -tol) region = Region::Exterior;
  return {region, margin};
}

inline std::string ConeSpec::describe() const {
  if (kind_ == Kind::ElemSym)
    return "gamma_" + std::to_string(k_) + "(n=" + std::to_string(n_) + ")";
  std::ostringstream os;
  os << "tau_transform(" << base_->describe() << ", tau'=" << tau_prime_ << ")";
  return os.str();
}

inline ConeSpec ConeSpec::gamma_k(int n, int k) {
  if (n < 2) throw std::invalid_argument("gamma_k: need n >= 2");
  if (k < 1 || k > n)
    throw std::invalid_argument("gamma_k: need 1 <= k <= n, got k = " +
                                std::to_string(k));
  ConeSpec c;
  c.n_ = n;
  c.kind_ = Kind::ElemSym;
  c.k_ = k;
  return c;
}

inline ConeSpec ConeSpec::tau_transform(const ConeSpec& base, double tau_prime) {
  if (!(tau_prime > 0.0))
    throw std::invalid_argument("tau_transform: need tau' > 0");
  ConeSpec c;
  c.n_ = base.dimension();
  c.kind_ = Kind::TauTransform;
  c.tau_prime_ = tau_prime;
  c.base_ = std::make_shared<const ConeSpec>(base);

  if (tau_prime > 1.0 + 1e-14) {
    const int n = c.n_;
    // e must stay strictly inside, otherwise Gamma_n^+ is not contained.
    const LambdaVec e_vec(static_cast<size_t>(n), 1.0);
    if (membership(c, e_vec).region != Region::Interior)
      throw std::invalid_argument(
          "tau_transform: diagonal ray leaves the base cone at tau' = " +
          std::to_string(tau_prime) + "; transform violates the pinching axiom");
    // Deterministic sampling: members must have sigma_1 > 0 (the upper
    // pinching against the half-space cone).
    std::mt19937_64 rng(0x5be0cd19137e2179ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    LambdaVec lam(static_cast<size_t>(n));
    for (int trial = 0; trial < 4096; ++trial) {
      for (auto& x : lam) x = 1.0 + 0.8 * gauss(rng);
      if (membership(c, lam).region == Region::Interior && sigma1(lam) <= 0.0)
        throw std::invalid_argument(
            "tau_transform: sampled member with sigma_1 <= 0; transform "
            "violates the pinching axiom at tau' = " + std::to_string(tau_prime));
    }
  }
  return c;
}

// f(e) via evaluation; see f_eval below.
double f_eval(const ConeSpec& cone, std::span<const double> lam, double tol);

inline double f_at_e(const ConeSpec& cone, double tol = kDefaultTol) {
  const LambdaVec e_vec(static_cast<size_t>(cone.dimension()), 1.0);
  return f_eval(cone, e_vec, tol);
}

// Defining function: f = sigma_k^{1/k} on Gamma_k^+, composed with the
// trace shift for transform cones.  Zero on the boundary, positive inside;
// throws std::domain_error outside the closed cone.
inline double f_eval(const ConeSpec& cone, std::span<const double> lam,
                     double tol = kDefaultTol) {
  const Membership mb = membership(cone, lam, tol);
  if (mb.region == Region::Exterior) {
    std::ostringstream os;
    os << "f_eval: point outside closed cone " << cone.describe()
       << " (normalized margin " << mb.margin << ")";
    throw std::domain_error(os.str());
  }
  if (cone.kind() == ConeSpec::Kind::TauTransform)
    return f_eval(cone.base(), lambda_tau(lam, cone.tau_prime()), tol);
  const double sk = sigma(lam, cone.k());
  return std::pow(std::max(sk, 0.0), 1.0 / cone.k());
}

// d sigma_k / d lam_i = sigma_{k-1} of the other n-1 entries, computed by
// direct re-expansion (no division, stable near the boundary).
inline double sigma_minus_i(std::span<const double> lam, int skip, int j) {
  if (j == 0) return 1.0;
  const int n = static_cast<int>(lam.size());
  std::vector<double> c(static_cast<size_t>(j) + 1, 0.0);
  c[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    if (i == skip) continue;
    for (int q = j; q >= 1; --q) c[q] += lam[i] * c[q - 1];
  }
  return c[static_cast<size_t>(j)];
}

// Gradient of the defining function at a strictly interior point.
inline LambdaVec f_grad(const ConeSpec& cone, std::span<const double> lam,
                        double tol = kDefaultTol) {
  const Membership mb = membership(cone, lam, tol);
  if (mb.region != Region::Interior) {
    std::ostringstream os;
    os << "f_grad: gradient requires a strictly interior point of "
       << cone.describe() << " (normalized margin " << mb.margin << ")";
    throw std::domain_error(os.str());
  }
  const size_t n = lam.size();
  if (cone.kind() == ConeSpec::Kind::TauTransform) {
    const double tp = cone.tau_prime();
    const LambdaVec shifted = lambda_tau(lam, tp);
    const LambdaVec gb = f_grad(cone.base(), shifted, tol);
    double total = 0.0;
    for (double g : gb) total += g;
    LambdaVec out(n);
    for (size_t i = 0; i < n; ++i) out[i] = tp * gb[i] + (1.0 - tp) * total;
    return out;
  }
  const int k = cone.k();
  const double sk = sigma(lam, k);
  const double scale = (1.0 / k) * std::pow(sk, 1.0 / k - 1.0);
  LambdaVec out(n);
  for (size_t i = 0; i < n; ++i)
    out[i] = scale * sigma_minus_i(lam, static_cast<int>(i), k - 1);
  return out;
}

// Slack in the concavity bound f(mu) <= (f(e)/n) * sigma_1(mu) evaluated at
// mu = lam^tau.  Nonnegative on the closed cone.
inline double sigma1_upper_bound_gap(const ConeSpec& cone,
                                     std::span<const double> lam, double tau,
                                     double tol = kDefaultTol) {
  const LambdaVec mu = lambda_tau(lam, tau);
  const double fe = f_at_e(cone, tol);
  return (fe / cone.dimension()) * sigma1(mu) - f_eval(cone, mu, tol);
}

// Margin of the trace-shift lower bound f(lam^t) >= (1-t) sigma_1(lam) f(e)
// on the closed cone, for 0 <= t < 1.  Vanishes identically at t = 0 and is
// strictly positive inside for t > 0.  Meaningless for Gamma_1^+ (where the
// bound is an identity), hence rejected there.
inline double lemma_trace_shift_margin(const ConeSpec& cone,
                                       std::span<const double> lam, double t,
                                       double tol = kDefaultTol) {
  if (cone.is_gamma1())
    throw std::invalid_argument(
        "lemma_trace_shift_margin: bound is trivial on the half-space cone");
  if (!(t >= 0.0 && t < 1.0))
    throw std::invalid_argument("lemma_trace_shift_margin: need 0 <= t < 1");
  const Membership mb = membership(cone, lam, tol);
  if (mb.region == Region::Exterior)
    throw std::domain_error(
        "lemma_trace_shift_margin: point outside closed cone (margin " +
        std::to_string(mb.margin) + ")");
  const LambdaVec shifted = lambda_tau(lam, t);
  return f_eval(cone, shifted, tol) - (1.0 - t) * sigma1(lam) * f_at_e(cone, tol);
}

// Inverse parameter of the trace-shift composition: composing a transform at
// tilde_tau(n, tau') with one at tau' rescales the cone back to itself.
inline double tilde_tau(int n, double tau_prime) {
  const double den = (n - 1.0) - (n - 2.0) * tau_prime;
  if (std::abs(den) < 1e-14)
    throw std::invalid_argument("tilde_tau: singular at tau' = (n-1)/(n-2)");
  return (n - (n - 1.0) * tau_prime) / den;
}

// Where the first coordinate ray sits relative to the cone.  Strictly inside
// exactly when the cone is a nontrivial transform of a larger cone.
inline Region contains_e1(const ConeSpec& cone, double tol = kDefaultTol) {
  LambdaVec e1(static_cast<size_t>(cone.dimension()), 0.0);
  e1[0] = 1.0;
  return membership(cone, e1, tol).region;
}

// Rejection sampler for strictly interior points, centered on the diagonal.
inline LambdaVec sample_interior(const ConeSpec& cone, std::mt19937_64& rng,
                                 double spread = 0.5, int max_tries = 100000) {
  std::normal_distribution<double> gauss(0.0, spread);
  LambdaVec lam(static_cast<size_t>(cone.dimension()));
  for (int t = 0; t < max_tries; ++t) {
    for (auto& x : lam) x = 1.0 + gauss(rng);
    if (membership(cone, lam).region == Region::Interior) return lam;
  }
  throw std::runtime_error("sample_interior: rejection sampler exhausted for " +
                           cone.describe());
}

}  // namespace conelab::cones
