#include "rbheat/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace rbheat {

namespace {

Vec start_vector(Eigen::Index n) {
  // Deterministic, not orthogonal to anything structured: ones plus a ramp.
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = 1.0 + 0.37 * static_cast<double>(i % 17) / 17.0;
  v.normalize();
  return v;
}

template <class Apply>
double largest_magnitude(Eigen::Index n, Apply&& apply,
                         PowerIterationOptions opt) {
  if (n == 0) return 0.0;
  Vec v = start_vector(n);
  Vec w(n);
  double lambda = 0.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    apply(v, w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double prev = lambda;
    lambda = norm;
    v.swap(w);
    if (it > 0 && std::abs(lambda - prev) <= opt.rel_tol * std::abs(lambda))
      break;
  }
  return lambda;
}

}  // namespace

double spectral_norm(const SpMat& a, PowerIterationOptions opt) {
  const SpMat at = SpMat(a.transpose());
  const double gram = largest_magnitude(
      a.rows(),
      [&](const Vec& v, Vec& w) {
        Vec t = a * v;
        w = at * t;
      },
      opt);
  return std::sqrt(gram);
}

double lambda_max_spd(const SpMat& a, PowerIterationOptions opt) {
  return spectral_norm(a, opt);
}

double lambda_min_spd(const SpMat& a, PowerIterationOptions opt) {
  Eigen::SimplicialLDLT<SpMat> fact(a);
  if (fact.info() != Eigen::Success)
    throw std::runtime_error("lambda_min_spd: factorization failed");
  const double inv = largest_magnitude(
      a.rows(), [&fact](const Vec& v, Vec& w) { w = fact.solve(v); }, opt);
  if (inv == 0.0) throw std::runtime_error("lambda_min_spd: singular matrix");
  return 1.0 / inv;
}

double spectral_norm_einv_a(const SpMat& e, const SpMat& a,
                            PowerIterationOptions opt) {
  Eigen::SimplicialLDLT<SpMat> fact(e);
  if (fact.info() != Eigen::Success)
    throw std::runtime_error("spectral_norm_einv_a: factorization failed");
  const double sq = largest_magnitude(
      a.rows(),
      [&](const Vec& v, Vec& w) {
        // (E^{-1}A)^T (E^{-1}A) v = A E^{-2} A v for symmetric A.
        Vec t = a * v;
        t = fact.solve(t);
        t = fact.solve(t);
        w = a * t;
      },
      opt);
  return std::sqrt(sq);
}

double max_abs_diff(const SpMat& a, const SpMat& b) {
  SpMat d = a - b;
  return max_abs(d);
}

double max_abs(const SpMat& a) {
  double m = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

}  // namespace rbheat
