#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbheat/fem_system.hpp"
#include "rbheat/linalg.hpp"

namespace rbheat {

/// One sampled option of the batch law: the set of active parts and its
/// probability. Only options with positive probability are stored.
struct Subset {
  std::vector<int> parts;  // 0-based part indices
  double probability = 0.0;
};

/// Randomized splitting of a stiffness matrix: parts R_m with sum R, force
/// weight vectors w_m with sum 1 (F_m(t) = w_m .* F(t)), and a law over
/// subsets. pi_m is the total probability that part m is active, so that the
/// law's expectation reproduces R exactly.
class Decomposition {
 public:
  static Decomposition make(const SpMat& total, std::vector<SpMat> parts,
                            std::vector<Vec> force_weights,
                            std::vector<Subset> subsets);

  /// Trivial one-part law: the batch system coincides with the full system.
  static Decomposition single(const SpMat& total);

  int dimension() const { return dimension_; }
  int num_parts() const { return static_cast<int>(parts_.size()); }
  int num_subsets() const { return static_cast<int>(subsets_.size()); }

  const SpMat& part(int m) const { return parts_.at(m); }
  const Vec& force_weight(int m) const { return force_weights_.at(m); }
  const std::vector<Subset>& subsets() const { return subsets_; }
  double pi(int m) const { return pi_.at(m); }
  const std::vector<double>& pi() const { return pi_; }

  /// Sorted global dofs touched by part m (matrix rows/columns or force
  /// weights).
  const std::vector<int>& part_support(int m) const { return support_.at(m); }
  std::vector<int> subset_support(int subset_index) const;

  /// sum_{m in S_i} R_m / pi_m as an assembled sparse matrix.
  SpMat subset_matrix(int subset_index) const;
  /// sum_{m in S_i} w_m / pi_m.
  Vec subset_force_weight(int subset_index) const;

 private:
  int dimension_ = 0;
  std::vector<SpMat> parts_;
  std::vector<Vec> force_weights_;
  std::vector<Subset> subsets_;
  std::vector<double> pi_;
  std::vector<std::vector<int>> support_;
};

/// Sampled switching schedule: one subset index per subinterval of length
/// delta, the last subinterval truncated at the horizon.
struct BatchSchedule {
  double delta = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::vector<int> omega;  // subset index per subinterval

  int subintervals() const { return static_cast<int>(omega.size()); }
  /// Subinterval holding t under the right-open convention, clamped so that
  /// t = horizon belongs to the last subinterval.
  int subinterval_of(double t) const;
  int subset_at(double t) const { return omega.at(subinterval_of(t)); }
};

/// Draws the subinterval subsets i.i.d. from the law, each draw a pure
/// function of (seed, subinterval index).
BatchSchedule sample_schedule(const Decomposition& dec, double delta, double T,
                              std::uint64_t seed);

/// Active scaled matrix sum for the subinterval containing t.
SpMat batch_matrix(const Decomposition& dec, const BatchSchedule& schedule,
                   double t);

/// Active scaled force for the subinterval containing t, evaluated at t.
Vec batch_force(const Decomposition& dec, const BatchSchedule& schedule,
                const TimeLoad& load, double t);

/// Probability-weighted squared spectral-norm deviation of the batch matrix
/// from the full matrix. Spectral norms by symmetric power iteration.
double variance(const Decomposition& dec, PowerIterationOptions opt = {});

/// Variance of the decomposition with the 1/h factor removed: h^2 times the
/// variance at step h. Mesh-independent whenever every part scales as 1/h.
double c_of_m(const Decomposition& dec, double h, PowerIterationOptions opt = {});

/// sum_i p_i sum_{m in S_i} R_m / pi_m; equals the decomposed matrix by the
/// normalization of pi.
SpMat law_expectation(const Decomposition& dec);

/// Flat key-value summary: p_i, pi_m, Var, C(M).
std::string decomposition_summary(const Decomposition& dec, double h);

}  // namespace rbheat
