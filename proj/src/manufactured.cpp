#include "rbheat/manufactured.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rbheat {

namespace {

void require_unit_length(const ManufacturedCase& mc) {
  if (std::abs(mc.length - 1.0) > 1e-14)
    throw std::invalid_argument(
        "the manufactured family needs unit edge length (x(1-x) must vanish "
        "at both endpoints)");
}

}  // namespace

EdgeField ManufacturedCase::initial() const {
  require_unit_length(*this);
  return EdgeField::scaled(coefficients,
                           [](double x, double) { return x * (1.0 - x); });
}

EdgeField ManufacturedCase::source() const {
  require_unit_length(*this);
  return EdgeField::scaled(coefficients, [](double x, double t) {
    return (2.0 - x + x * x) * std::exp(-t);
  });
}

EdgeField ManufacturedCase::exact_field() const {
  require_unit_length(*this);
  return EdgeField::scaled(coefficients, [](double x, double t) {
    return x * (1.0 - x) * std::exp(-t);
  });
}

TimeLoad ManufacturedCase::load(const FemSystem& system) const {
  require_unit_length(*this);
  const EdgeField spatial = EdgeField::scaled(
      coefficients, [](double x, double) { return 2.0 - x + x * x; });
  return TimeLoad::separable(system.assemble_load(spatial, 0.0),
                             [](double t) { return std::exp(-t); });
}

ExactSolution ManufacturedCase::solution(const FemSystem& system) const {
  require_unit_length(*this);
  const EdgeField spatial = EdgeField::scaled(
      coefficients, [](double x, double) { return x * (1.0 - x); });
  return ExactSolution::separable(system, spatial,
                                  [](double t) { return std::exp(-t); });
}

ManufacturedCase ManufacturedCase::paper_case(double T) {
  ManufacturedCase mc;
  mc.horizon = T;
  mc.length = 1.0;
  mc.coefficients = {{1, 1.0}, {2, -1.0}, {3, -1.0}, {4, 1.0},  {5, -1.0},
                     {6, -1.0}, {7, -1.0}, {8, 2.0},  {9, -1.0}, {10, -1.0}};
  return mc;
}

ManufacturedCase ManufacturedCase::interval_case(double p, double T) {
  ManufacturedCase mc;
  mc.horizon = T;
  mc.length = 1.0;
  mc.coefficients = {{1, p}};
  return mc;
}

std::string CompatibilityReport::text() const {
  std::ostringstream os;
  char buf[96];
  for (const auto& [v, s] : kirchhoff_sum) {
    std::snprintf(buf, sizeof buf, "kirchhoff_v%d = %.17g\n", v, s);
    os << buf;
  }
  os << "continuity_ok = " << (continuity_ok ? "true" : "false") << "\n";
  std::snprintf(buf, sizeof buf, "max_abs_kirchhoff = %.17g\n", max_abs);
  os << buf;
  return os.str();
}

CompatibilityReport check_compatibility(const ManufacturedCase& mc,
                                        const MetricGraph& graph) {
  CompatibilityReport rep;
  // y = p x(1-x) e^{-t}: slope p(1-2x) e^{-t}, so at either endpoint the
  // signed contribution is -p e^{-t}; evaluate at t = 0.
  for (VertexId v : graph.interior_vertices()) {
    double sum = 0.0;
    for (EdgeId id : graph.incident_edges(v)) {
      const Edge& e = graph.edge(id);
      auto it = mc.coefficients.find(id);
      const double p = it == mc.coefficients.end() ? 0.0 : it->second;
      const double x = e.tail == v ? 0.0 : e.length;
      const double slope = p * (1.0 - 2.0 * x);
      sum += slope * graph.incidence_sign(id, v);
    }
    rep.kirchhoff_sum[v] = sum;
    rep.max_abs = std::max(rep.max_abs, std::abs(sum));
  }
  // Continuity: x(1-x) vanishes at both endpoints of a unit edge, so every
  // vertex value is 0; only the edge lengths can break this.
  for (const Edge& e : graph.edges())
    if (std::abs(e.length - 1.0) > 1e-14) rep.continuity_ok = false;
  return rep;
}

double exact_error(const FemSystem& system, const Trajectory& traj,
                   const ManufacturedCase& mc) {
  const ExactSolution exact = ExactSolution::sampled(system, mc.exact_field());
  double worst = 0.0;
  for (int c = 0; c < traj.states.cols(); ++c)
    worst = std::max(worst, exact.error(traj.states.col(c), traj.grid.time(c)));
  return worst;
}

}  // namespace rbheat
