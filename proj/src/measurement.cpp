#include "varqo/measurement.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "varqo/common.hpp"

namespace varqo {

bool qubitwise_commute(const PauliString& a, const PauliString& b) {
  const auto& fa = a.factors();
  for (const auto& [q, axis] : b.factors()) {
    auto it = fa.find(q);
    if (it != fa.end() && it->second != axis) return false;
  }
  return true;
}

namespace {

MeasurementGroup build_group(std::vector<PauliString> members) {
  std::map<unsigned, PauliAxis> axes;
  for (const PauliString& t : members)
    for (const auto& [q, axis] : t.factors()) axes[q] = axis;
  MeasurementGroup g;
  for (const auto& [q, axis] : axes) {
    if (axis == PauliAxis::X) g.basis_rotation += gates::H(q);
    if (axis == PauliAxis::Y)
      g.basis_rotation += gates::Rx(Expr::constant(kPi / 2), q);
  }
  std::vector<PauliString> rotated;
  rotated.reserve(members.size());
  for (const PauliString& t : members) {
    PauliString::FactorMap f;
    for (const auto& [q, axis] : t.factors()) f.emplace(q, PauliAxis::Z);
    rotated.emplace_back(std::move(f), t.coefficient());
  }
  g.members = QubitHamiltonian(std::move(members));
  g.rotated = QubitHamiltonian(std::move(rotated));
  return g;
}

}  // namespace

std::vector<MeasurementGroup> group_qwc(const QubitHamiltonian& h) {
  if (!h.is_hermitian())
    throw std::invalid_argument("group_qwc: Hamiltonian is not Hermitian");
  const QubitHamiltonian hs = h.simplified();
  const auto& terms = hs.terms();
  const std::size_t n = terms.size();

  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!qubitwise_commute(terms[i], terms[j])) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return adj[a].size() > adj[b].size();
  });

  std::vector<int> color(n, -1);
  int n_colors = 0;
  for (std::size_t v : order) {
    std::set<int> used;
    for (std::size_t w : adj[v])
      if (color[w] >= 0) used.insert(color[w]);
    int c = 0;
    while (used.count(c)) ++c;
    color[v] = c;
    n_colors = std::max(n_colors, c + 1);
  }

  std::vector<MeasurementGroup> groups;
  groups.reserve(n_colors);
  for (int c = 0; c < n_colors; ++c) {
    std::vector<PauliString> members;
    for (std::size_t i = 0; i < n; ++i)
      if (color[i] == c) members.push_back(terms[i]);
    groups.push_back(build_group(std::move(members)));
  }
  return groups;
}

std::vector<MeasurementGroup> singleton_groups(const QubitHamiltonian& h) {
  if (!h.is_hermitian())
    throw std::invalid_argument("singleton_groups: Hamiltonian is not Hermitian");
  const QubitHamiltonian hs = h.simplified();
  std::vector<MeasurementGroup> groups;
  for (const PauliString& t : hs.terms()) groups.push_back(build_group({t}));
  return groups;
}

namespace {

double group_value(const MeasurementGroup& g,
                   const std::map<std::string, double>& weights,
                   double total) {
  double value = 0.0;
  for (const PauliString& t : g.rotated.terms()) {
    double parity_sum = 0.0;
    for (const auto& [bits, w] : weights) {
      int sign = 1;
      for (const auto& [q, axis] : t.factors()) {
        (void)axis;
        if (q < bits.size() && bits[q] == '1') sign = -sign;
      }
      parity_sum += sign * w;
    }
    value += t.coefficient().real() * parity_sum;
  }
  return value / total;
}

}  // namespace

double estimate(const std::vector<MeasurementGroup>& groups,
                const std::vector<SampleResult>& counts) {
  if (counts.size() != groups.size())
    throw std::invalid_argument("estimate: need one SampleResult per group");
  double value = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (counts[i].total == 0)
      throw std::invalid_argument("estimate: empty counts");
    std::map<std::string, double> weights;
    for (const auto& [bits, c] : counts[i].counts)
      weights[bits] = static_cast<double>(c);
    value += group_value(groups[i], weights,
                         static_cast<double>(counts[i].total));
  }
  return value;
}

double estimate(const std::vector<MeasurementGroup>& groups,
                const std::vector<std::map<std::string, double>>& weights) {
  if (weights.size() != groups.size())
    throw std::invalid_argument("estimate: need one weight map per group");
  double value = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    double total = 0.0;
    for (const auto& [bits, w] : weights[i]) total += w;
    if (total <= 0.0) throw std::invalid_argument("estimate: empty counts");
    value += group_value(groups[i], weights[i], total);
  }
  return value;
}

double sample_expectation(const QCircuit& circuit, const QubitHamiltonian& h,
                          const Assignment& variables, std::uint64_t samples,
                          std::uint64_t seed, const NoiseModel* noise,
                          const SimulatorOptions& options) {
  return sample_expectation(circuit, group_qwc(h), variables, samples, seed,
                            noise, options);
}

double sample_expectation(const QCircuit& circuit,
                          const std::vector<MeasurementGroup>& groups,
                          const Assignment& variables, std::uint64_t samples,
                          std::uint64_t seed, const NoiseModel* noise,
                          const SimulatorOptions& options) {
  if (groups.empty()) return 0.0;

  const bool all_identity =
      std::all_of(groups.begin(), groups.end(), [](const MeasurementGroup& g) {
        return std::all_of(
            g.rotated.terms().begin(), g.rotated.terms().end(),
            [](const PauliString& t) { return t.factors().empty(); });
      });
  if (all_identity) {
    double value = 0.0;
    for (const auto& g : groups)
      for (const auto& t : g.rotated.terms()) value += t.coefficient().real();
    return value;
  }

  std::vector<SampleResult> counts;
  counts.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const QCircuit rotated_circuit = circuit + groups[i].basis_rotation;
    counts.push_back(sample(rotated_circuit, variables, samples,
                            detail::mix_seed(seed, i), noise, options));
  }
  return estimate(groups, counts);
}

}  // namespace varqo
