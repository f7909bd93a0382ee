#pragma once

#include <functional>
#include <map>
#include <utility>

#include "rbheat/metric_graph.hpp"

namespace rbheat {

/// Scalar function of (edge, x, t) with x in [0, l_e]. Used for sources,
/// initial data, targets and exact solutions.
class EdgeField {
 public:
  using Fn = std::function<double(EdgeId, double, double)>;

  EdgeField() : fn_([](EdgeId, double, double) { return 0.0; }) {}
  explicit EdgeField(Fn fn) : fn_(std::move(fn)) {}

  static EdgeField zero() { return EdgeField(); }

  /// Same (x, t) profile on every edge.
  static EdgeField uniform(std::function<double(double, double)> f) {
    return EdgeField([f = std::move(f)](EdgeId, double x, double t) { return f(x, t); });
  }

  static EdgeField constant(double c) {
    return EdgeField([c](EdgeId, double, double) { return c; });
  }

  /// Per-edge scale applied to a common (x, t) profile.
  static EdgeField scaled(std::map<EdgeId, double> coeff,
                          std::function<double(double, double)> f) {
    return EdgeField([coeff = std::move(coeff), f = std::move(f)](
                         EdgeId e, double x, double t) {
      auto it = coeff.find(e);
      return it == coeff.end() ? 0.0 : it->second * f(x, t);
    });
  }

  double operator()(EdgeId e, double x, double t) const { return fn_(e, x, t); }

 private:
  Fn fn_;
};

}  // namespace rbheat
