#pragma once

#include <cstdint>
#include <vector>

#include "lmom/common.hpp"

namespace lmom {

/// Deterministic Miller-Rabin, exact for n < 3.3e24 (covers every modulus we
/// accept).
bool is_prime_u64(std::uint64_t n);

/// Least primitive root mod an odd prime q.
std::uint32_t find_primitive_root(std::uint32_t q);

/// Character index j in {0,...,q-2} against the least primitive root g:
/// chi_j(n) = e^{2 pi i j ind_g(n) / (q-1)}.
struct CharacterId {
    std::uint32_t j = 0;

    int parity() const { return static_cast<int>(j & 1u); }
    bool principal() const { return j == 0; }
};

/// Arithmetic of (Z/qZ)^x for an odd prime q: discrete-log table against the
/// least primitive root plus a table of the (q-1)-th roots of unity.
/// Immutable after construction; all queries are pure reads.
class ModulusContext {
  public:
    /// Builds the q-entry dlog table by repeated multiplication.
    /// Throws std::invalid_argument for non-prime or even q, resource_error
    /// when q exceeds the table budget.
    explicit ModulusContext(std::uint32_t q, std::uint64_t max_table_entries = (1ull << 27));

    std::uint32_t q() const { return q_; }
    std::uint32_t g() const { return g_; }
    std::uint32_t order() const { return q_ - 1; }      // size of the character group
    std::uint32_t phi() const { return q_ - 1; }
    std::uint32_t phi_star() const { return q_ - 2; }   // primitive characters, prime q

    /// ind_g(n) for 1 <= n <= q-1 (n given mod q).  Undefined slot at 0.
    std::uint32_t dlog(std::uint32_t n_mod_q) const { return dlog_[n_mod_q]; }

    /// e^{2 pi i t/(q-1)}; t is reduced mod q-1.  Table satisfies
    /// root(n-t) == conj(root(t)) exactly.
    cplx root(std::uint64_t t) const { return roots_[t % (q_ - 1)]; }

    /// chi_j(n): 0 if q | n, else the unit root at j*dlog(n mod q).
    cplx char_value(CharacterId id, std::uint64_t n) const {
        std::uint32_t m = static_cast<std::uint32_t>(n % q_);
        if (m == 0) return {0.0, 0.0};
        return root(static_cast<std::uint64_t>(id.j) * dlog_[m]);
    }

    /// Lemma 2.3 sums over non-trivial primitive even (resp. odd) characters,
    /// by direct summation.  Throws std::invalid_argument unless gcd(a,q)=1.
    double char_sum_even(std::uint64_t a) const;
    double char_sum_odd(std::uint64_t a) const;

  private:
    double char_sum_parity(std::uint64_t a, int parity) const;

    std::uint32_t q_ = 0;
    std::uint32_t g_ = 0;
    std::vector<std::uint32_t> dlog_;
    std::vector<cplx> roots_;
};

}  // namespace lmom
