#pragma once

#include <map>
#include <string>

#include "rbheat/error_metrics.hpp"
#include "rbheat/fem_system.hpp"
#include "rbheat/time_integration.hpp"

namespace rbheat {

/// Polynomial-in-space, exponential-in-time family with a closed-form
/// solution: y = p x(1-x) e^{-t}, y0 = p x(1-x), f = p (2 - x + x^2) e^{-t}
/// per edge. Edge length must be 1 so the solution vanishes at every vertex;
/// the per-edge coefficients control the junction flux balance.
struct ManufacturedCase {
  std::map<EdgeId, double> coefficients;
  double horizon = 1.0;
  double length = 1.0;

  EdgeField initial() const;
  EdgeField source() const;
  EdgeField exact_field() const;

  /// Separable load provider (base assembled once).
  TimeLoad load(const FemSystem& system) const;
  /// Fast exact-solution handle (Gram form), equal to the 5-point Gauss
  /// metric for this polynomial family.
  ExactSolution solution(const FemSystem& system) const;

  /// Coefficients (1,-1,-1,1,-1,-1,-1,2,-1,-1) on the reference network.
  static ManufacturedCase paper_case(double T = 1.0);
  static ManufacturedCase interval_case(double p = 1.0, double T = 1.0);
};

/// Junction flux balance of the case's exact solution: the signed sum of
/// edge slopes at each interior vertex, evaluated analytically at t = 0.
/// All sums vanish iff the data is compatible with the coupling conditions.
struct CompatibilityReport {
  std::map<VertexId, double> kirchhoff_sum;
  double max_abs = 0.0;
  bool continuity_ok = true;
  bool ok(double tol = 1e-12) const { return continuity_ok && max_abs <= tol; }
  std::string text() const;
};

CompatibilityReport check_compatibility(const ManufacturedCase& mc,
                                        const MetricGraph& graph);

/// max over collocation times of the L2 distance between the reconstructed
/// trajectory and the exact solution (5-point Gauss per element).
double exact_error(const FemSystem& system, const Trajectory& traj,
                   const ManufacturedCase& mc);

}  // namespace rbheat
