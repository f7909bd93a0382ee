#include "rbheat/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rbheat/rng.hpp"

namespace rbheat {

namespace {

std::vector<int> support_of(const SpMat& part, const Vec& weights) {
  std::set<int> s;
  for (int k = 0; k < part.outerSize(); ++k)
    for (SpMat::InnerIterator it(part, k); it; ++it)
      if (it.value() != 0.0) {
        s.insert(static_cast<int>(it.row()));
        s.insert(static_cast<int>(it.col()));
      }
  for (int i = 0; i < weights.size(); ++i)
    if (weights[i] != 0.0) s.insert(i);
  return {s.begin(), s.end()};
}

}  // namespace

Decomposition Decomposition::make(const SpMat& total, std::vector<SpMat> parts,
                                  std::vector<Vec> force_weights,
                                  std::vector<Subset> subsets) {
  const int n = static_cast<int>(total.rows());
  if (total.cols() != n) throw std::invalid_argument("total matrix not square");
  if (parts.empty()) throw std::invalid_argument("decomposition needs parts");
  if (force_weights.size() != parts.size())
    throw std::invalid_argument("one force weight vector per part required");
  for (const auto& p : parts)
    if (p.rows() != n || p.cols() != n)
      throw std::invalid_argument("part dimension mismatch");
  for (const auto& w : force_weights)
    if (w.size() != n) throw std::invalid_argument("force weight size mismatch");

  const int m_count = static_cast<int>(parts.size());

  // Law: keep positive-probability subsets only, check the total mass.
  std::vector<Subset> law;
  double p_sum = 0.0;
  for (auto& s : subsets) {
    if (s.probability < 0.0)
      throw std::invalid_argument("negative subset probability");
    p_sum += s.probability;
    if (s.probability == 0.0) continue;
    for (int m : s.parts)
      if (m < 0 || m >= m_count)
        throw std::invalid_argument("subset references unknown part");
    law.push_back(std::move(s));
  }
  if (std::abs(p_sum - 1.0) > 1e-14)
    throw std::invalid_argument("subset probabilities sum to " +
                                std::to_string(p_sum) + ", expected 1");

  std::vector<double> pi(m_count, 0.0);
  for (const auto& s : law)
    for (int m : s.parts) pi[m] += s.probability;
  for (int m = 0; m < m_count; ++m)
    if (!(pi[m] > 0.0))
      throw std::invalid_argument("part " + std::to_string(m + 1) +
                                  " is never activated (pi = 0)");

  // Exact-sum identities.
  SpMat sum = parts[0];
  for (size_t m = 1; m < parts.size(); ++m) sum += parts[m];
  const double scale = std::max(max_abs(total), 1e-300);
  SpMat diff = sum - total;
  double worst = 0.0;
  int wr = 0, wc = 0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMat::InnerIterator it(diff, k); it; ++it)
      if (std::abs(it.value()) > worst) {
        worst = std::abs(it.value());
        wr = static_cast<int>(it.row());
        wc = static_cast<int>(it.col());
      }
  if (worst > 1e-12 * scale) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "parts do not sum to the decomposed matrix: worst entry "
                  "(%d, %d) off by %.3e",
                  wr, wc, worst);
    throw std::invalid_argument(buf);
  }
  Vec wsum = Vec::Zero(n);
  for (const auto& w : force_weights) wsum += w;
  for (int i = 0; i < n; ++i)
    if (std::abs(wsum[i] - 1.0) > 1e-12)
      throw std::invalid_argument(
          "force weights do not sum to one at dof " + std::to_string(i));

  Decomposition d;
  d.dimension_ = n;
  d.parts_ = std::move(parts);
  d.force_weights_ = std::move(force_weights);
  d.subsets_ = std::move(law);
  d.pi_ = std::move(pi);
  d.support_.reserve(d.parts_.size());
  for (int m = 0; m < d.num_parts(); ++m) {
    d.parts_[m].makeCompressed();
    d.support_.push_back(support_of(d.parts_[m], d.force_weights_[m]));
  }
  return d;
}

Decomposition Decomposition::single(const SpMat& total) {
  const int n = static_cast<int>(total.rows());
  return make(total, {total}, {Vec::Ones(n)}, {Subset{{0}, 1.0}});
}

std::vector<int> Decomposition::subset_support(int subset_index) const {
  std::set<int> s;
  for (int m : subsets_.at(subset_index).parts)
    s.insert(support_[m].begin(), support_[m].end());
  return {s.begin(), s.end()};
}

SpMat Decomposition::subset_matrix(int subset_index) const {
  const Subset& s = subsets_.at(subset_index);
  SpMat out(dimension_, dimension_);
  for (int m : s.parts) out += parts_[m] / pi_[m];
  out.makeCompressed();
  return out;
}

Vec Decomposition::subset_force_weight(int subset_index) const {
  const Subset& s = subsets_.at(subset_index);
  Vec out = Vec::Zero(dimension_);
  for (int m : s.parts) out += force_weights_[m] / pi_[m];
  return out;
}

int BatchSchedule::subinterval_of(double t) const {
  if (t < 0.0 || t > horizon * (1.0 + 1e-12))
    throw std::out_of_range("time outside the schedule horizon");
  const int k = static_cast<int>(std::floor(t / delta));
  return std::min(k, subintervals() - 1);
}

BatchSchedule sample_schedule(const Decomposition& dec, double delta, double T,
                              std::uint64_t seed) {
  if (!(delta > 0.0) || !(T > 0.0))
    throw std::invalid_argument("sample_schedule: delta and T must be positive");
  BatchSchedule s;
  s.delta = delta;
  s.horizon = T;
  s.seed = seed;
  const int k_count = std::max(1, static_cast<int>(std::ceil(T / delta - 1e-9)));
  s.omega.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    const double u =
        uniform01(keyed_bits(seed, 0x73756273ull, static_cast<std::uint64_t>(k)));
    double acc = 0.0;
    int pick = dec.num_subsets() - 1;
    for (int i = 0; i < dec.num_subsets(); ++i) {
      acc += dec.subsets()[i].probability;
      if (u < acc) {
        pick = i;
        break;
      }
    }
    s.omega[k] = pick;
  }
  return s;
}

SpMat batch_matrix(const Decomposition& dec, const BatchSchedule& schedule,
                   double t) {
  return dec.subset_matrix(schedule.subset_at(t));
}

Vec batch_force(const Decomposition& dec, const BatchSchedule& schedule,
                const TimeLoad& load, double t) {
  const Vec w = dec.subset_force_weight(schedule.subset_at(t));
  return w.cwiseProduct(load.at(t));
}

double variance(const Decomposition& dec, PowerIterationOptions opt) {
  SpMat total(dec.dimension(), dec.dimension());
  for (int m = 0; m < dec.num_parts(); ++m) total += dec.part(m);
  double var = 0.0;
  for (int i = 0; i < dec.num_subsets(); ++i) {
    SpMat dev = total - dec.subset_matrix(i);
    dev.prune(0.0);
    const double norm = spectral_norm(dev, opt);
    var += dec.subsets()[i].probability * norm * norm;
  }
  return var;
}

double c_of_m(const Decomposition& dec, double h, PowerIterationOptions opt) {
  return h * h * variance(dec, opt);
}

SpMat law_expectation(const Decomposition& dec) {
  SpMat out(dec.dimension(), dec.dimension());
  for (int i = 0; i < dec.num_subsets(); ++i)
    out += dec.subsets()[i].probability * dec.subset_matrix(i);
  out.makeCompressed();
  return out;
}

std::string decomposition_summary(const Decomposition& dec, double h) {
  std::ostringstream os;
  char buf[96];
  os << "parts = " << dec.num_parts() << "\n";
  os << "subsets = " << dec.num_subsets() << "\n";
  for (int i = 0; i < dec.num_subsets(); ++i) {
    os << "subset_" << (i + 1) << " = {";
    const auto& s = dec.subsets()[i];
    for (size_t j = 0; j < s.parts.size(); ++j)
      os << (j ? "," : "") << (s.parts[j] + 1);
    std::snprintf(buf, sizeof buf, "}\np_%d = %.17g\n", i + 1, s.probability);
    os << buf;
  }
  for (int m = 0; m < dec.num_parts(); ++m) {
    std::snprintf(buf, sizeof buf, "pi_%d = %.17g\n", m + 1, dec.pi(m));
    os << buf;
  }
  const double var = variance(dec);
  std::snprintf(buf, sizeof buf, "var_rbm = %.17g\n", var);
  os << buf;
  std::snprintf(buf, sizeof buf, "c_of_m = %.17g\n", h * h * var);
  os << buf;
  return os.str();
}

}  // namespace rbheat
