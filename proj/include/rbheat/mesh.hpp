#pragma once

#include <stdexcept>

namespace rbheat {

/// Uniform 1D mesh shared by every edge: N interior nodes per edge,
/// step h = l_e / (N + 1), nodes x_j = j h.
struct Mesh1D {
  int interior_nodes = 0;  // N
  double step = 0.0;       // h

  Mesh1D() = default;
  Mesh1D(int n, double h) : interior_nodes(n), step(h) {
    if (n < 1) throw std::invalid_argument("mesh needs at least one interior node");
    if (!(h > 0.0)) throw std::invalid_argument("mesh step must be positive");
  }

  static Mesh1D for_edge_length(double length, int n) {
    if (n < 1) throw std::invalid_argument("mesh needs at least one interior node");
    return Mesh1D(n, length / (n + 1));
  }

  double edge_length() const { return step * (interior_nodes + 1); }
  double node(int j) const { return j * step; }
};

/// Uniform collocation grid t_n = n dt with (zeta - 1) dt = T.
struct TimeGrid {
  double horizon = 0.0;  // T
  int points = 0;        // zeta >= 2

  TimeGrid() = default;
  TimeGrid(double T, int zeta) : horizon(T), points(zeta) {
    if (!(T > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (zeta < 2) throw std::invalid_argument("grid needs at least two points");
  }

  double dt() const { return horizon / (points - 1); }
  int steps() const { return points - 1; }
  double time(int n) const { return n == points - 1 ? horizon : n * dt(); }
};

}  // namespace rbheat
