#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>

#include "rbheat/edge_field.hpp"
#include "rbheat/linalg.hpp"
#include "rbheat/mesh.hpp"
#include "rbheat/metric_graph.hpp"

namespace rbheat {

/// Degree-of-freedom layout: edges in id order, each junction coefficient
/// stored in the node-0 slot of its host edge, Dirichlet boundary values
/// never allocated. Interval: size = N. Reference graph: size = 10N + 3.
struct DofMap {
  int interior_per_edge = 0;  // N
  int size = 0;
  std::map<EdgeId, int> edge_offset;   // dof of interior node 1 per edge
  std::map<VertexId, int> vertex_dof;  // junction dofs

  /// Global dof of node j in {0, ..., N+1} on edge e; -1 at boundary vertices.
  int node_dof(const MetricGraph& g, const Edge& e, int j) const;
};

/// Time-dependent load vector F(t). Separable loads store one assembled
/// vector and a scalar time profile; general loads assemble on demand.
class TimeLoad {
 public:
  TimeLoad() = default;

  static TimeLoad zero(int n);
  static TimeLoad constant(Vec base);
  static TimeLoad separable(Vec base, std::function<double(double)> scale);
  static TimeLoad general(std::function<Vec(double)> assemble, int n);

  int size() const { return n_; }
  Vec at(double t) const;
  bool is_separable() const { return mode_ != Mode::general; }
  const Vec& base() const { return base_; }
  double scale(double t) const;

 private:
  enum class Mode { separable, general };
  Mode mode_ = Mode::separable;
  int n_ = 0;
  Vec base_;
  std::function<double(double)> scale_;
  std::function<Vec(double)> assemble_;
};

/// Assembled linear-FEM system E dY/dt + R Y = F on a metric graph (or a
/// single interval). E is symmetric positive definite, R symmetric positive
/// semidefinite; both are sparse with deterministic compressed storage.
class FemSystem {
 public:
  FemSystem(MetricGraph graph, Mesh1D mesh);

  const MetricGraph& graph() const { return graph_; }
  const Mesh1D& mesh() const { return mesh_; }
  const DofMap& dofs() const { return dofs_; }
  int dimension() const { return dofs_.size; }
  bool is_interval() const;

  const SpMat& mass() const { return mass_; }
  const SpMat& stiffness() const { return stiffness_; }
  const Eigen::SimplicialLDLT<SpMat>& mass_factor() const { return *mass_fact_; }

  /// Moment vector b_j = (g(., t), phi_j), 3-point Gauss per element.
  Vec assemble_load(const EdgeField& g, double t) const;

  /// Load provider for a time-dependent source, assembling per call.
  TimeLoad load_provider(const EdgeField& f) const;

  /// Coefficients of the L2 projection: solves E c = (y0, phi_j).
  Vec project_initial(const EdgeField& y0) const;
  Vec project(const EdgeField& g, double t) const;

  /// sqrt(v' E v): the L2 norm of the piecewise-linear field with
  /// coefficients v.
  double l2_norm(const Vec& v) const;

  /// Point value of the reconstructed field on an edge, x in [0, l_e].
  double reconstruct(const Vec& v, EdgeId e, double x) const;

 private:
  MetricGraph graph_;
  Mesh1D mesh_;
  DofMap dofs_;
  SpMat mass_;
  SpMat stiffness_;
  std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> mass_fact_;
};

/// Convenience builder; throws if the mesh disagrees with any edge length.
FemSystem assemble(const MetricGraph& graph, const Mesh1D& mesh);

/// Closed-form smallest eigenvalue of the interval mass matrix:
/// h (2/3 + cos(N pi / (N+1)) / 3). Interval-only; graph systems use a
/// computed smallest eigenvalue instead.
double lambda_min_interval_mass(int n, double h);

/// Coordinate-triple dump (row col value), 0-based, 17 significant digits,
/// sorted by row then column.
void write_matrix_triples(std::ostream& os, const SpMat& m);

}  // namespace rbheat
