#include "varqo/kernels.hpp"

#include <bit>

#ifdef VARQO_HAVE_OPENMP
#include <omp.h>
#endif

namespace varqo::kernels {

namespace {

// Below this size the parallel-region overhead dominates.
constexpr std::size_t kAutoThreshold = std::size_t{1} << 12;

inline cxd i_power(unsigned n) {
  switch (n & 3u) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

inline double parity_sign(std::uint64_t bits) {
  return (std::popcount(bits) & 1u) ? -1.0 : 1.0;
}

// Index of the k-th state with the pivot bit clear: spread k by inserting a
// zero at the pivot position.
inline std::uint64_t insert_zero_bit(std::uint64_t k, std::uint64_t pivot) {
  std::uint64_t low = k & (pivot - 1);
  return ((k ^ low) << 1) | low;
}

}  // namespace

bool openmp_enabled() {
#ifdef VARQO_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

int thread_count() {
#ifdef VARQO_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

bool use_parallel(Policy policy, std::size_t dim) {
  switch (policy) {
    case Policy::Serial: return false;
    case Policy::Parallel: return openmp_enabled();
    case Policy::Auto: return openmp_enabled() && dim >= kAutoThreshold;
  }
  return false;
}

// --------------------------------------------------------------------------
// apply_1q

void apply_1q_serial(cxd* state, std::size_t dim, unsigned bit,
                     std::uint64_t cmask, const Mat2& m) {
  const std::uint64_t pivot = std::uint64_t{1} << bit;
  const std::size_t pairs = dim / 2;
  for (std::size_t k = 0; k < pairs; ++k) {
    const std::uint64_t i0 = insert_zero_bit(k, pivot);
    if ((i0 & cmask) != cmask) continue;
    const std::uint64_t i1 = i0 | pivot;
    const cxd v0 = state[i0];
    const cxd v1 = state[i1];
    state[i0] = m.a * v0 + m.b * v1;
    state[i1] = m.c * v0 + m.d * v1;
  }
}

void apply_1q_parallel(cxd* state, std::size_t dim, unsigned bit,
                       std::uint64_t cmask, const Mat2& m) {
#ifdef VARQO_HAVE_OPENMP
  const std::uint64_t pivot = std::uint64_t{1} << bit;
  const std::int64_t pairs = static_cast<std::int64_t>(dim / 2);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < pairs; ++k) {
    const std::uint64_t i0 =
        insert_zero_bit(static_cast<std::uint64_t>(k), pivot);
    if ((i0 & cmask) != cmask) continue;
    const std::uint64_t i1 = i0 | pivot;
    const cxd v0 = state[i0];
    const cxd v1 = state[i1];
    state[i0] = m.a * v0 + m.b * v1;
    state[i1] = m.c * v0 + m.d * v1;
  }
#else
  apply_1q_serial(state, dim, bit, cmask, m);
#endif
}

void apply_1q(Policy policy, cxd* state, std::size_t dim, unsigned bit,
              std::uint64_t cmask, const Mat2& m) {
  if (use_parallel(policy, dim))
    apply_1q_parallel(state, dim, bit, cmask, m);
  else
    apply_1q_serial(state, dim, bit, cmask, m);
}

// --------------------------------------------------------------------------
// apply_swap

void apply_swap_serial(cxd* state, std::size_t dim, unsigned bit_a,
                       unsigned bit_b, std::uint64_t cmask) {
  const std::uint64_t ma = std::uint64_t{1} << bit_a;
  const std::uint64_t mb = std::uint64_t{1} << bit_b;
  const std::uint64_t both = ma | mb;
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & both) != ma) continue;  // visit each pair once, from (1,0)
    if ((i & cmask) != cmask) continue;
    std::swap(state[i], state[i ^ both]);
  }
}

void apply_swap_parallel(cxd* state, std::size_t dim, unsigned bit_a,
                         unsigned bit_b, std::uint64_t cmask) {
#ifdef VARQO_HAVE_OPENMP
  const std::uint64_t ma = std::uint64_t{1} << bit_a;
  const std::uint64_t mb = std::uint64_t{1} << bit_b;
  const std::uint64_t both = ma | mb;
  const std::int64_t n = static_cast<std::int64_t>(dim);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint64_t u = static_cast<std::uint64_t>(i);
    if ((u & both) != ma) continue;
    if ((u & cmask) != cmask) continue;
    std::swap(state[u], state[u ^ both]);
  }
#else
  apply_swap_serial(state, dim, bit_a, bit_b, cmask);
#endif
}

void apply_swap(Policy policy, cxd* state, std::size_t dim, unsigned bit_a,
                unsigned bit_b, std::uint64_t cmask) {
  if (use_parallel(policy, dim))
    apply_swap_parallel(state, dim, bit_a, bit_b, cmask);
  else
    apply_swap_serial(state, dim, bit_a, bit_b, cmask);
}

// --------------------------------------------------------------------------
// apply_exp_pauli

namespace {

template <bool Controlled>
void exp_pauli_diagonal(cxd* state, std::size_t dim, std::uint64_t yz,
                        double cos_half, double sin_half,
                        std::uint64_t cmask) {
  // Z-string (or identity): e^{-i(t/2)P} is diagonal with entries
  // cos - i sin * (+-1).
  const cxd plus(cos_half, -sin_half);
  const cxd minus(cos_half, sin_half);
  for (std::size_t i = 0; i < dim; ++i) {
    if (Controlled && (i & cmask) != cmask) continue;
    state[i] *= (std::popcount(i & yz) & 1u) ? minus : plus;
  }
}

inline void exp_pauli_pair(cxd* state, std::uint64_t i0, std::uint64_t flip,
                           std::uint64_t yz, cxd misin_phase0, double cos_half) {
  // misin_phase0 = -i sin(t/2) i^{n_y}; the remaining factor is the
  // (-1)^{popcount} parity of each source index.
  const std::uint64_t i1 = i0 ^ flip;
  const cxd v0 = state[i0];
  const cxd v1 = state[i1];
  const double s0 = parity_sign(i0 & yz);
  const double s1 = parity_sign(i1 & yz);
  state[i0] = cos_half * v0 + misin_phase0 * s1 * v1;
  state[i1] = cos_half * v1 + misin_phase0 * s0 * v0;
}

}  // namespace

void apply_exp_pauli_serial(cxd* state, std::size_t dim, std::uint64_t flip,
                            std::uint64_t yz, unsigned n_y, double cos_half,
                            double sin_half, std::uint64_t cmask) {
  if (flip == 0) {
    if (cmask == 0)
      exp_pauli_diagonal<false>(state, dim, yz, cos_half, sin_half, cmask);
    else
      exp_pauli_diagonal<true>(state, dim, yz, cos_half, sin_half, cmask);
    return;
  }
  const std::uint64_t pivot = flip & (~flip + 1);
  const cxd misin = cxd(0.0, -sin_half) * i_power(n_y);
  const std::size_t pairs = dim / 2;
  for (std::size_t k = 0; k < pairs; ++k) {
    const std::uint64_t i0 = insert_zero_bit(k, pivot);
    if ((i0 & cmask) != cmask) continue;
    exp_pauli_pair(state, i0, flip, yz, misin, cos_half);
  }
}

void apply_exp_pauli_parallel(cxd* state, std::size_t dim, std::uint64_t flip,
                              std::uint64_t yz, unsigned n_y, double cos_half,
                              double sin_half, std::uint64_t cmask) {
#ifdef VARQO_HAVE_OPENMP
  if (flip == 0) {
    const cxd plus(cos_half, -sin_half);
    const cxd minus(cos_half, sin_half);
    const std::int64_t n = static_cast<std::int64_t>(dim);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const std::uint64_t u = static_cast<std::uint64_t>(i);
      if ((u & cmask) != cmask) continue;
      state[u] *= (std::popcount(u & yz) & 1u) ? minus : plus;
    }
    return;
  }
  const std::uint64_t pivot = flip & (~flip + 1);
  const cxd misin = cxd(0.0, -sin_half) * i_power(n_y);
  const std::int64_t pairs = static_cast<std::int64_t>(dim / 2);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < pairs; ++k) {
    const std::uint64_t i0 =
        insert_zero_bit(static_cast<std::uint64_t>(k), pivot);
    if ((i0 & cmask) != cmask) continue;
    exp_pauli_pair(state, i0, flip, yz, misin, cos_half);
  }
#else
  apply_exp_pauli_serial(state, dim, flip, yz, n_y, cos_half, sin_half, cmask);
#endif
}

void apply_exp_pauli(Policy policy, cxd* state, std::size_t dim,
                     std::uint64_t flip, std::uint64_t yz, unsigned n_y,
                     double cos_half, double sin_half, std::uint64_t cmask) {
  if (use_parallel(policy, dim))
    apply_exp_pauli_parallel(state, dim, flip, yz, n_y, cos_half, sin_half,
                             cmask);
  else
    apply_exp_pauli_serial(state, dim, flip, yz, n_y, cos_half, sin_half,
                           cmask);
}

// --------------------------------------------------------------------------
// reductions

cxd pauli_inner_serial(const cxd* state, std::size_t dim, std::uint64_t flip,
                       std::uint64_t yz, unsigned n_y) {
  cxd acc = 0.0;
  for (std::size_t b = 0; b < dim; ++b)
    acc += std::conj(state[b ^ flip]) * parity_sign(b & yz) * state[b];
  return acc * i_power(n_y);
}

cxd pauli_inner_parallel(const cxd* state, std::size_t dim, std::uint64_t flip,
                         std::uint64_t yz, unsigned n_y) {
#ifdef VARQO_HAVE_OPENMP
  const int nt = omp_get_max_threads();
  std::vector<cxd> partials(static_cast<std::size_t>(nt), cxd(0.0));
  const std::int64_t n = static_cast<std::int64_t>(dim);
#pragma omp parallel num_threads(nt)
  {
    cxd local = 0.0;
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < n; ++b) {
      const std::uint64_t u = static_cast<std::uint64_t>(b);
      local += std::conj(state[u ^ flip]) * parity_sign(u & yz) * state[u];
    }
    partials[static_cast<std::size_t>(omp_get_thread_num())] = local;
  }
  cxd acc = 0.0;
  for (const cxd& p : partials) acc += p;  // fixed order: reproducible
  return acc * i_power(n_y);
#else
  return pauli_inner_serial(state, dim, flip, yz, n_y);
#endif
}

cxd pauli_inner(Policy policy, const cxd* state, std::size_t dim,
                std::uint64_t flip, std::uint64_t yz, unsigned n_y) {
  return use_parallel(policy, dim)
             ? pauli_inner_parallel(state, dim, flip, yz, n_y)
             : pauli_inner_serial(state, dim, flip, yz, n_y);
}

double norm_sqr_serial(const cxd* state, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) acc += std::norm(state[i]);
  return acc;
}

double norm_sqr_parallel(const cxd* state, std::size_t dim) {
#ifdef VARQO_HAVE_OPENMP
  const int nt = omp_get_max_threads();
  std::vector<double> partials(static_cast<std::size_t>(nt), 0.0);
  const std::int64_t n = static_cast<std::int64_t>(dim);
#pragma omp parallel num_threads(nt)
  {
    double local = 0.0;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
      local += std::norm(state[static_cast<std::uint64_t>(i)]);
    partials[static_cast<std::size_t>(omp_get_thread_num())] = local;
  }
  double acc = 0.0;
  for (double p : partials) acc += p;
  return acc;
#else
  return norm_sqr_serial(state, dim);
#endif
}

double norm_sqr(Policy policy, const cxd* state, std::size_t dim) {
  return use_parallel(policy, dim) ? norm_sqr_parallel(state, dim)
                                   : norm_sqr_serial(state, dim);
}

double prob_bit_one_serial(const cxd* state, std::size_t dim, unsigned bit) {
  const std::uint64_t mask = std::uint64_t{1} << bit;
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    if (i & mask) acc += std::norm(state[i]);
  return acc;
}

double prob_bit_one_parallel(const cxd* state, std::size_t dim, unsigned bit) {
#ifdef VARQO_HAVE_OPENMP
  const std::uint64_t mask = std::uint64_t{1} << bit;
  const int nt = omp_get_max_threads();
  std::vector<double> partials(static_cast<std::size_t>(nt), 0.0);
  const std::int64_t n = static_cast<std::int64_t>(dim);
#pragma omp parallel num_threads(nt)
  {
    double local = 0.0;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const std::uint64_t u = static_cast<std::uint64_t>(i);
      if (u & mask) local += std::norm(state[u]);
    }
    partials[static_cast<std::size_t>(omp_get_thread_num())] = local;
  }
  double acc = 0.0;
  for (double p : partials) acc += p;
  return acc;
#else
  return prob_bit_one_serial(state, dim, bit);
#endif
}

double prob_bit_one(Policy policy, const cxd* state, std::size_t dim,
                    unsigned bit) {
  return use_parallel(policy, dim) ? prob_bit_one_parallel(state, dim, bit)
                                   : prob_bit_one_serial(state, dim, bit);
}

void scale_serial(cxd* state, std::size_t dim, cxd factor) {
  for (std::size_t i = 0; i < dim; ++i) state[i] *= factor;
}

void scale_parallel(cxd* state, std::size_t dim, cxd factor) {
#ifdef VARQO_HAVE_OPENMP
  const std::int64_t n = static_cast<std::int64_t>(dim);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    state[static_cast<std::uint64_t>(i)] *= factor;
#else
  scale_serial(state, dim, factor);
#endif
}

void scale(Policy policy, cxd* state, std::size_t dim, cxd factor) {
  if (use_parallel(policy, dim))
    scale_parallel(state, dim, factor);
  else
    scale_serial(state, dim, factor);
}

}  // namespace varqo::kernels
