#include "rbheat/fem_system.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace rbheat {

namespace {

// 3-point Gauss-Legendre on [0, 1]; exact through degree 5. With linear hats
// this integrates polynomial data of degree <= 4 exactly.
constexpr double kGauss3Nodes[3] = {0.5 - 0.387298334620741688517926539978,
                                    0.5,
                                    0.5 + 0.387298334620741688517926539978};
constexpr double kGauss3Weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

DofMap build_dof_map(const MetricGraph& g, const Mesh1D& mesh) {
  DofMap map;
  map.interior_per_edge = mesh.interior_nodes;

  std::map<EdgeId, VertexId> hosted;  // host edge -> junction it stores
  for (VertexId v : g.interior_vertices()) hosted[g.junction_host(v)] = v;

  int next = 0;
  for (const Edge& e : g.edges()) {
    auto it = hosted.find(e.id);
    if (it != hosted.end()) map.vertex_dof[it->second] = next++;
    map.edge_offset[e.id] = next;
    next += mesh.interior_nodes;
  }
  map.size = next;
  return map;
}

}  // namespace

int DofMap::node_dof(const MetricGraph& g, const Edge& e, int j) const {
  const int n = interior_per_edge;
  if (j == 0 || j == n + 1) {
    const VertexId v = (j == 0) ? e.tail : e.head;
    if (!g.is_interior(v)) return -1;
    return vertex_dof.at(v);
  }
  return edge_offset.at(e.id) + (j - 1);
}

TimeLoad TimeLoad::zero(int n) {
  TimeLoad l;
  l.mode_ = Mode::separable;
  l.n_ = n;
  l.base_ = Vec::Zero(n);
  l.scale_ = [](double) { return 0.0; };
  return l;
}

TimeLoad TimeLoad::constant(Vec base) {
  TimeLoad l;
  l.mode_ = Mode::separable;
  l.n_ = static_cast<int>(base.size());
  l.base_ = std::move(base);
  l.scale_ = [](double) { return 1.0; };
  return l;
}

TimeLoad TimeLoad::separable(Vec base, std::function<double(double)> scale) {
  TimeLoad l;
  l.mode_ = Mode::separable;
  l.n_ = static_cast<int>(base.size());
  l.base_ = std::move(base);
  l.scale_ = std::move(scale);
  return l;
}

TimeLoad TimeLoad::general(std::function<Vec(double)> assemble, int n) {
  TimeLoad l;
  l.mode_ = Mode::general;
  l.n_ = n;
  l.assemble_ = std::move(assemble);
  return l;
}

Vec TimeLoad::at(double t) const {
  if (mode_ == Mode::separable) return scale_(t) * base_;
  return assemble_(t);
}

double TimeLoad::scale(double t) const {
  if (mode_ != Mode::separable)
    throw std::logic_error("TimeLoad: general load has no scalar profile");
  return scale_(t);
}

FemSystem::FemSystem(MetricGraph graph, Mesh1D mesh)
    : graph_(std::move(graph)), mesh_(mesh) {
  const ValidationReport rep = graph_.validate();
  if (!rep.ok())
    throw std::invalid_argument("invalid graph:\n" + rep.text());
  for (const Edge& e : graph_.edges()) {
    const double expect = mesh_.edge_length();
    if (std::abs(e.length - expect) > 1e-12 * std::max(1.0, e.length))
      throw std::invalid_argument(
          "mesh step disagrees with length of edge " + std::to_string(e.id));
  }

  dofs_ = build_dof_map(graph_, mesh_);
  const int n = dofs_.size;
  const int nn = mesh_.interior_nodes;
  const double h = mesh_.step;

  std::vector<Eigen::Triplet<double>> em, rm;
  em.reserve(static_cast<size_t>(n) * 4);
  rm.reserve(static_cast<size_t>(n) * 4);
  const double m_diag = h / 3.0, m_off = h / 6.0;
  const double r_diag = 1.0 / h, r_off = -1.0 / h;
  for (const Edge& e : graph_.edges()) {
    for (int k = 0; k <= nn; ++k) {
      const int dof[2] = {dofs_.node_dof(graph_, e, k),
                          dofs_.node_dof(graph_, e, k + 1)};
      const double ml[2][2] = {{m_diag, m_off}, {m_off, m_diag}};
      const double rl[2][2] = {{r_diag, r_off}, {r_off, r_diag}};
      for (int a = 0; a < 2; ++a) {
        if (dof[a] < 0) continue;
        for (int b = 0; b < 2; ++b) {
          if (dof[b] < 0) continue;
          em.emplace_back(dof[a], dof[b], ml[a][b]);
          rm.emplace_back(dof[a], dof[b], rl[a][b]);
        }
      }
    }
  }
  mass_.resize(n, n);
  stiffness_.resize(n, n);
  mass_.setFromTriplets(em.begin(), em.end());
  stiffness_.setFromTriplets(rm.begin(), rm.end());
  mass_.makeCompressed();
  stiffness_.makeCompressed();

  mass_fact_ = std::make_unique<Eigen::SimplicialLDLT<SpMat>>(mass_);
  if (mass_fact_->info() != Eigen::Success)
    throw std::runtime_error("mass matrix factorization failed");
}

bool FemSystem::is_interval() const {
  return graph_.edges().size() == 1 && graph_.interior_vertices().empty();
}

Vec FemSystem::assemble_load(const EdgeField& g, double t) const {
  const int nn = mesh_.interior_nodes;
  const double h = mesh_.step;
  Vec out = Vec::Zero(dofs_.size);
  for (const Edge& e : graph_.edges()) {
    for (int k = 0; k <= nn; ++k) {
      const int dof[2] = {dofs_.node_dof(graph_, e, k),
                          dofs_.node_dof(graph_, e, k + 1)};
      if (dof[0] < 0 && dof[1] < 0) continue;
      const double x0 = k * h;
      double local[2] = {0.0, 0.0};
      for (int q = 0; q < 3; ++q) {
        const double xi = kGauss3Nodes[q];
        const double val = g(e.id, x0 + xi * h, t) * kGauss3Weights[q] * h;
        local[0] += val * (1.0 - xi);
        local[1] += val * xi;
      }
      for (int a = 0; a < 2; ++a)
        if (dof[a] >= 0) out[dof[a]] += local[a];
    }
  }
  return out;
}

TimeLoad FemSystem::load_provider(const EdgeField& f) const {
  return TimeLoad::general(
      [this, f](double t) { return assemble_load(f, t); }, dofs_.size);
}

Vec FemSystem::project_initial(const EdgeField& y0) const {
  return project(y0, 0.0);
}

Vec FemSystem::project(const EdgeField& g, double t) const {
  Vec b = assemble_load(g, t);
  Vec c = mass_fact_->solve(b);
  if (mass_fact_->info() != Eigen::Success)
    throw std::runtime_error("mass solve failed in projection");
  return c;
}

double FemSystem::l2_norm(const Vec& v) const {
  if (v.size() != dofs_.size)
    throw std::invalid_argument("l2_norm: dimension mismatch");
  const double q = v.dot(mass_ * v);
  return std::sqrt(std::max(0.0, q));
}

double FemSystem::reconstruct(const Vec& v, EdgeId id, double x) const {
  const Edge& e = graph_.edge(id);
  const double h = mesh_.step;
  const int nn = mesh_.interior_nodes;
  if (x < -1e-12 * h || x > e.length + 1e-12 * h)
    throw std::invalid_argument("reconstruct: x outside edge");
  int k = static_cast<int>(std::floor(x / h));
  k = std::clamp(k, 0, nn);
  const double xi = x / h - k;
  const int d0 = dofs_.node_dof(graph_, e, k);
  const int d1 = dofs_.node_dof(graph_, e, k + 1);
  const double v0 = d0 >= 0 ? v[d0] : 0.0;
  const double v1 = d1 >= 0 ? v[d1] : 0.0;
  return (1.0 - xi) * v0 + xi * v1;
}

FemSystem assemble(const MetricGraph& graph, const Mesh1D& mesh) {
  return FemSystem(graph, mesh);
}

double lambda_min_interval_mass(int n, double h) {
  if (n < 1 || !(h > 0.0))
    throw std::invalid_argument("lambda_min_interval_mass: bad arguments");
  const double angle = n * std::numbers::pi / (n + 1);
  return h * (2.0 / 3.0 + std::cos(angle) / 3.0);
}

void write_matrix_triples(std::ostream& os, const SpMat& m) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<size_t>(m.nonZeros()));
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                     it.value());
  std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
    return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
  });
  char buf[64];
  for (const auto& e : t) {
    std::snprintf(buf, sizeof buf, "%d %d %.17g\n", e.row(), e.col(), e.value());
    os << buf;
  }
}

}  // namespace rbheat
