#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "varqo/circuit.hpp"
#include "varqo/pauli.hpp"
#include "varqo/simulator.hpp"

namespace varqo {

// True iff the two strings agree on every shared qubit. Qubit-wise commuting
// terms can be measured from the same samples after one basis rotation.
bool qubitwise_commute(const PauliString& a, const PauliString& b);

// One measurable clique: rotated holds the Z/I-only image of the member
// terms, basis_rotation is the Clifford that maps members onto it
// (basis_rotation members basis_rotation^dagger == rotated as matrices).
struct MeasurementGroup {
  QubitHamiltonian rotated;
  QCircuit basis_rotation;
  QubitHamiltonian members;
};

// Partition the Hamiltonian's terms into qubit-wise commuting cliques via
// greedy coloring of the non-commutation graph, highest degree first and ties
// by term order. Per clique the rotation is H for X and Rx(pi/2) for Y.
std::vector<MeasurementGroup> group_qwc(const QubitHamiltonian& h);

// One group per term: the sampling plan used when grouping is switched off.
std::vector<MeasurementGroup> singleton_groups(const QubitHamiltonian& h);

// Parity estimator over joint counts: one SampleResult per group, sampled
// from the group's rotated circuit (state prep followed by basis_rotation).
// E = sum_i sum_{t in rotated_i} c_t sum_x (-1)^{|x on support(t)|} w_i(x).
double estimate(const std::vector<MeasurementGroup>& groups,
                const std::vector<SampleResult>& counts);

// Same estimator with explicit bitstring weights (for example exact
// probabilities, giving the infinite-sample value).
double estimate(const std::vector<MeasurementGroup>& groups,
                const std::vector<std::map<std::string, double>>& weights);

// Group h with group_qwc, sample each rotated circuit with `samples` shots
// under a per-group derived seed, and run the estimator.
double sample_expectation(const QCircuit& circuit, const QubitHamiltonian& h,
                          const Assignment& variables, std::uint64_t samples,
                          std::uint64_t seed = 0,
                          const NoiseModel* noise = nullptr,
                          const SimulatorOptions& options = {});

// Same sampling and estimation over a caller-provided grouping.
double sample_expectation(const QCircuit& circuit,
                          const std::vector<MeasurementGroup>& groups,
                          const Assignment& variables, std::uint64_t samples,
                          std::uint64_t seed = 0,
                          const NoiseModel* noise = nullptr,
                          const SimulatorOptions& options = {});

}  // namespace varqo
