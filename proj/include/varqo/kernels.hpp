#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "varqo/common.hpp"

// Low-level statevector kernels. Each kernel exists twice: a serial reference
// implementation and an OpenMP variant (falling back to serial when built
// without OpenMP). The unsuffixed entry points dispatch on Policy. Kernels
// speak raw bit positions; the simulator translates qubit indices (qubit q of
// an n-qubit register lives at bit n-1-q).
namespace varqo::kernels {

enum class Policy {
  Serial,    // always the reference implementation
  Parallel,  // always the OpenMP variant
  Auto,      // OpenMP variant for large states when available
};

bool openmp_enabled();
int thread_count();
bool use_parallel(Policy policy, std::size_t dim);

// Row-major 2x2 matrix [[a, b], [c, d]]; not required to be unitary (Kraus
// branches reuse this path).
struct Mat2 {
  cxd a, b, c, d;
};

// state[i] transforms with m on `bit` wherever (i & cmask) == cmask. The
// control mask must not contain `bit`.
void apply_1q_serial(cxd* state, std::size_t dim, unsigned bit,
                     std::uint64_t cmask, const Mat2& m);
void apply_1q_parallel(cxd* state, std::size_t dim, unsigned bit,
                       std::uint64_t cmask, const Mat2& m);
void apply_1q(Policy policy, cxd* state, std::size_t dim, unsigned bit,
              std::uint64_t cmask, const Mat2& m);

void apply_swap_serial(cxd* state, std::size_t dim, unsigned bit_a,
                       unsigned bit_b, std::uint64_t cmask);
void apply_swap_parallel(cxd* state, std::size_t dim, unsigned bit_a,
                         unsigned bit_b, std::uint64_t cmask);
void apply_swap(Policy policy, cxd* state, std::size_t dim, unsigned bit_a,
                unsigned bit_b, std::uint64_t cmask);

// e^{-i(theta/2) P} for a unit-coefficient Pauli string P given by its
// flip mask (X/Y bits), yz mask (Y/Z bits) and Y count:
//   P|b> = i^{n_y} (-1)^{popcount(b & yz)} |b XOR flip>.
// cos_half/sin_half are cos(theta/2)/sin(theta/2). flip and yz must not
// intersect cmask.
void apply_exp_pauli_serial(cxd* state, std::size_t dim, std::uint64_t flip,
                            std::uint64_t yz, unsigned n_y, double cos_half,
                            double sin_half, std::uint64_t cmask);
void apply_exp_pauli_parallel(cxd* state, std::size_t dim, std::uint64_t flip,
                              std::uint64_t yz, unsigned n_y, double cos_half,
                              double sin_half, std::uint64_t cmask);
void apply_exp_pauli(Policy policy, cxd* state, std::size_t dim,
                     std::uint64_t flip, std::uint64_t yz, unsigned n_y,
                     double cos_half, double sin_half, std::uint64_t cmask);

// <state|P|state> for a unit-coefficient string, same mask encoding. The
// parallel variant accumulates fixed-size per-thread partials summed in
// thread order, so results are reproducible for a fixed thread count.
cxd pauli_inner_serial(const cxd* state, std::size_t dim, std::uint64_t flip,
                       std::uint64_t yz, unsigned n_y);
cxd pauli_inner_parallel(const cxd* state, std::size_t dim, std::uint64_t flip,
                         std::uint64_t yz, unsigned n_y);
cxd pauli_inner(Policy policy, const cxd* state, std::size_t dim,
                std::uint64_t flip, std::uint64_t yz, unsigned n_y);

double norm_sqr_serial(const cxd* state, std::size_t dim);
double norm_sqr_parallel(const cxd* state, std::size_t dim);
double norm_sqr(Policy policy, const cxd* state, std::size_t dim);

// Total probability of the bit being 1: sum of |state[i]|^2 over i with the
// bit set. Drives Kraus branch selection for damping channels.
double prob_bit_one_serial(const cxd* state, std::size_t dim, unsigned bit);
double prob_bit_one_parallel(const cxd* state, std::size_t dim, unsigned bit);
double prob_bit_one(Policy policy, const cxd* state, std::size_t dim,
                    unsigned bit);

void scale_serial(cxd* state, std::size_t dim, cxd factor);
void scale_parallel(cxd* state, std::size_t dim, cxd factor);
void scale(Policy policy, cxd* state, std::size_t dim, cxd factor);

}  // namespace varqo::kernels
