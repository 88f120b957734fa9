#pragma once

#include <vector>

#include "lmom/common.hpp"

namespace lmom {

/// Mixed-radix discrete Fourier transform of arbitrary length n >= 1
/// (Cooley-Tukey over the prime factorization, naive transform at prime
/// sizes; no padding).  sign=+1 computes out[k] = sum_t a[t] e^{+2 pi i kt/n}.
/// Deterministic: a fixed recursion shape and a single precomputed root table
/// with exact conjugate symmetry.
std::vector<cplx> dft(const std::vector<cplx>& a, int sign);

/// Root table e^{sign 2 pi i t/n}, t = 0..n-1, with table[n-t] == conj(table[t]).
std::vector<cplx> dft_roots(std::size_t n, int sign);

}  // namespace lmom
