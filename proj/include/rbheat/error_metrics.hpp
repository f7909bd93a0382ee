#pragma once

#include <functional>

#include "rbheat/edge_field.hpp"
#include "rbheat/fem_system.hpp"

namespace rbheat {

/// L2(E) distance between a coefficient state and a closed-form field.
/// The sampled form integrates (reconstruction - field)^2 with 5-point Gauss
/// per element. The separable form y(x, t) = s(t) u(x) precomputes the Gram
/// data of u, so the same integral costs one sparse product per evaluation;
/// the two agree exactly for polynomial u up to degree 4.
class ExactSolution {
 public:
  static ExactSolution separable(const FemSystem& system,
                                 const EdgeField& spatial,
                                 std::function<double(double)> time_factor);
  static ExactSolution sampled(const FemSystem& system, EdgeField field);

  double error(const Vec& coeffs, double t) const;

 private:
  const FemSystem* system_ = nullptr;
  bool separable_ = false;
  Vec moments_;      // (u, phi_j)
  double norm_sq_ = 0.0;  // ||u||^2
  std::function<double(double)> time_factor_;
  EdgeField field_;
};

}  // namespace rbheat
