#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rbheat/decomposition.hpp"
#include "rbheat/fem_system.hpp"
#include "rbheat/mesh.hpp"

namespace rbheat {

/// Named scalar factors plus the assembled right-hand side of an a-priori
/// estimate. Generic multiplicative constants that the theory leaves
/// unspecified are not included; `note` says so.
struct BoundReport {
  std::vector<std::pair<std::string, double>> factors;
  double value = 0.0;
  std::string note;

  double factor(const std::string& name) const;
  std::string text() const;
};

/// Expected squared trajectory gap between the batch and full systems:
/// (||E^{-1}R|| T^2 + 2T) (||E^{-1}y0|| + ||E^{-1}F||_{L1})^2
///   Var / lambda_min(E)^2 * delta,
/// plus the mesh-explicit form delta/h^7 C(M) (the h^4 companion term
/// carries an unknown constant and is reported as a bare h^4 factor).
/// `y0_coeffs` is the projected coefficient vector, i.e. E^{-1} applied to
/// the initial moments.
BoundReport bound_trajectory(const FemSystem& system, const Decomposition& dec,
                             const TimeLoad& load, const Vec& y0_coeffs,
                             double delta, const TimeGrid& grid);

/// Optimal-control counterpart with D = Q = E:
/// C_oc (1 + ||E^{-1}||^2 T) Var / (lambda_min(D)^2 lambda_min(E)^2) * delta,
/// C_oc = 2||D||^2 ((1+T)(||E^{-1}y0|| + ||E^{-1}F||)^2 + ||y_d||^2)
///        ||E^{-1}||^2 (||E^{-1}R|| T^2 + 2T),
/// with ||E^{-1}F|| taken as the sup over the grid. Also reports the
/// delta/h^11 C(M) mesh form.
BoundReport bound_control(const FemSystem& system, const Decomposition& dec,
                          const TimeLoad& load, const Vec& y0_coeffs,
                          const Vec& yd_coeffs, double delta,
                          const TimeGrid& grid);

}  // namespace rbheat
