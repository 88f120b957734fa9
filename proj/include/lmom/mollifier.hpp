#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lmom/blocks.hpp"
#include "lmom/chargroup.hpp"
#include "lmom/common.hpp"

namespace lmom {

/// P_j(chi) = sum_{p in block} chi(p)/sqrt(p).
cplx p_block_value(const ModulusContext& ctx, CharacterId id,
                   std::span<const std::uint32_t> block_primes);

/// E_ell(z) = sum_{i<=ell} z^i/i!, Horner form.
cplx e_trunc(std::uint64_t ell, cplx z);

/// (12 max(1,k^2) |P| / ell)^{r_k ell}.
double q_term(double p_abs, std::uint64_t ell, double k, std::uint32_t r_k);

/// Complex-power variant (P^{r_k ell}, modulus taken afterwards); |.|^2 of the
/// two variants coincide and the A/B check lives in the tests.
double q_term_complex_route(cplx p_val, std::uint64_t ell, double k, std::uint32_t r_k);

/// Sparse real-coefficient Dirichlet polynomial sum_n coeff(n) chi(n)/sqrt(n);
/// the 1/sqrt(n) is folded in at evaluation time.
struct DirichletPoly {
    struct Term {
        std::uint64_t n;
        double coeff;
    };
    std::vector<Term> terms;  // ascending by n
    std::uint64_t length_bound = 1;
    std::string label;

    double coeff_at(std::uint64_t n) const;
    std::uint64_t max_support() const { return terms.empty() ? 1 : terms.back().n; }
};

/// N_j as a polynomial: coefficient alpha^{Omega(n)}/w(n) on the block
/// support with Omega(n) <= ell.
DirichletPoly n_poly(std::span<const std::uint32_t> block_primes, std::uint64_t ell,
                     double alpha, std::uint64_t budget = 10'000'000);

/// P^m as a polynomial: coefficient m!/w(n) on the exact-Omega(n) = m block
/// support.  m <= 18 keeps the multinomials exact in doubles.
DirichletPoly power_poly(std::span<const std::uint32_t> block_primes, std::uint32_t m,
                         std::uint64_t budget = 10'000'000);

/// Convolution product of polynomials over pairwise-coprime supports
/// (coefficients multiply on n = prod n_j).  Throws resource_error when the
/// product support exceeds the budget.
DirichletPoly convolve_coprime(std::span<const DirichletPoly> polys,
                               std::uint64_t budget = 10'000'000);

cplx eval_poly(const ModulusContext& ctx, const DirichletPoly& poly, CharacterId id);

// ---------------------------------------------------------------------------
// Per-family mollifier values
// ---------------------------------------------------------------------------

/// P_j(chi) for every block and every character, computed once.
class FamilyMollifier {
  public:
    static FamilyMollifier build(const ModulusContext& ctx, const BlockSchedule& sched,
                                 unsigned threads = 0);

    const BlockSchedule& schedule() const { return *sched_; }
    cplx p_value(std::size_t block, std::uint32_t j) const { return P_[block][j]; }

    /// N_j(chi, alpha) = E_{ell_j}(alpha P_j(chi)).
    cplx n_j(std::size_t block, std::uint32_t j, double alpha) const;

    /// N(chi, alpha) = prod_j N_j(chi, alpha); empty product = 1.
    cplx n_total(std::uint32_t j, double alpha) const;

    /// |Q_j(chi,k)|; Q_{R+1} = 1 by convention (block == R()).
    double q_j(std::size_t block, std::uint32_t j, double k) const;

    /// S_alpha(chi) = sum_{v=0}^{R} (prod_{j<=v} |N_j(chi,alpha)|^2) |Q_{v+1}(chi,k)|^2.
    double s_sum(std::uint32_t j, double alpha, double k) const;

  private:
    const BlockSchedule* sched_ = nullptr;
    std::vector<std::vector<cplx>> P_;  // [block][character]
};

// ---------------------------------------------------------------------------
// Pointwise estimates from the proofs of Lemmas 3.1 / 3.2
// ---------------------------------------------------------------------------

struct PointwiseBlockReport {
    std::size_t block = 0;
    bool small_branch = true;      // |P_j| below the branch threshold
    double p_abs = 0.0;
    double threshold = 0.0;        // ell/10, or ell/(10k) for k > 1
    // small branch: | |N(k)^{1/k} N(k-1)|^2 / X - 1 | for X = exp(2k Re P) and
    // X = |N(k)|^2, each to be <= C e^{-ell}
    double ratio_vs_exp = 0.0;
    double ratio_vs_nsq = 0.0;
    // large branch: the unconditional chain, exact up to rounding
    bool large_bound_ok = true;    // |N_j(chi,alpha)| <= (12|aP|/ell)^ell for both alpha
    bool q_dominates_ok = true;    // the combined power is <= |Q_j|^2
    // Lemma 3.2 small-branch margin: |N(k-1)|^{2k} |N(k)|^{2(1-k)} - 1
    double lemma32_margin = 0.0;
};

struct PointwiseReport {
    std::vector<PointwiseBlockReport> blocks;
    bool hard_ok = true;           // every large-branch inequality held
};

/// Branch classification and margins for one character.  For 0<k<1 the branch
/// threshold is ell/10; for k>1 it is ell/(10k).
PointwiseReport pointwise_lemma_checks(const FamilyMollifier& fm, std::uint32_t j,
                                       double k);

}  // namespace lmom
