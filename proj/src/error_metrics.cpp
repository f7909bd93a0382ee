#include "rbheat/error_metrics.hpp"

#include <cmath>

namespace rbheat {

namespace {

// 5-point Gauss-Legendre on [0, 1]; exact through degree 9.
constexpr double kNodes[5] = {0.5 - 0.453089922969331959821234, 0.5 - 0.269234655052841545325329,
                              0.5, 0.5 + 0.269234655052841545325329,
                              0.5 + 0.453089922969331959821234};
constexpr double kWeights[5] = {0.118463442528094543757132 / 1.0,
                                0.239314335249683234020645,
                                0.284444444444444444444444,
                                0.239314335249683234020645,
                                0.118463442528094543757132};

}  // namespace

ExactSolution ExactSolution::separable(const FemSystem& system,
                                       const EdgeField& spatial,
                                       std::function<double(double)> time_factor) {
  ExactSolution e;
  e.system_ = &system;
  e.separable_ = true;
  e.moments_ = system.assemble_load(spatial, 0.0);
  // ||u||^2 by 5-point Gauss per element.
  const Mesh1D& mesh = system.mesh();
  const double h = mesh.step;
  double acc = 0.0;
  for (const Edge& ed : system.graph().edges())
    for (int k = 0; k <= mesh.interior_nodes; ++k)
      for (int q = 0; q < 5; ++q) {
        const double u = spatial(ed.id, (k + kNodes[q]) * h, 0.0);
        acc += kWeights[q] * h * u * u;
      }
  e.norm_sq_ = acc;
  e.time_factor_ = std::move(time_factor);
  return e;
}

ExactSolution ExactSolution::sampled(const FemSystem& system, EdgeField field) {
  ExactSolution e;
  e.system_ = &system;
  e.separable_ = false;
  e.field_ = std::move(field);
  return e;
}

double ExactSolution::error(const Vec& coeffs, double t) const {
  const FemSystem& sys = *system_;
  if (separable_) {
    const double s = time_factor_(t);
    const double q = coeffs.dot(sys.mass() * coeffs) -
                     2.0 * s * moments_.dot(coeffs) + s * s * norm_sq_;
    return std::sqrt(std::max(0.0, q));
  }
  const Mesh1D& mesh = sys.mesh();
  const MetricGraph& graph = sys.graph();
  const DofMap& dofs = sys.dofs();
  const double h = mesh.step;
  double acc = 0.0;
  for (const Edge& ed : graph.edges()) {
    for (int k = 0; k <= mesh.interior_nodes; ++k) {
      const int d0 = dofs.node_dof(graph, ed, k);
      const int d1 = dofs.node_dof(graph, ed, k + 1);
      const double v0 = d0 >= 0 ? coeffs[d0] : 0.0;
      const double v1 = d1 >= 0 ? coeffs[d1] : 0.0;
      for (int q = 0; q < 5; ++q) {
        const double xi = kNodes[q];
        const double diff =
            (1.0 - xi) * v0 + xi * v1 - field_(ed.id, (k + xi) * h, t);
        acc += kWeights[q] * h * diff * diff;
      }
    }
  }
  return std::sqrt(acc);
}

}  // namespace rbheat
