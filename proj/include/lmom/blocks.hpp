#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lmom/common.hpp"

namespace lmom {

// ---------------------------------------------------------------------------
// Primes and Mertens-type sums
// ---------------------------------------------------------------------------

/// Primes <= n by sieve.  Throws resource_error above the budget.
std::vector<std::uint32_t> primes_up_to(std::uint64_t n,
                                        std::uint64_t budget = 100'000'000);

struct MertensResult {
    double sum = 0.0;        // exact sieve sum
    double main_term = 0.0;  // log log x + b   (jpow=0)  or  (log x)^j / j
    double residual = 0.0;   // sum - main_term
};

/// sum_{p <= x} (log p)^jpow / p against the Lemma 2.1 main term.  For jpow=0
/// the constant b must be supplied (fit it once with fit_mertens_b); pass 0 to
/// see the raw residual.
MertensResult mertens_check(double x, int jpow, double b = 0.0,
                            std::uint64_t sieve_budget = 100'000'000);

/// b fitted at the largest configured x: sum(x_max) - log log x_max.
double fit_mertens_b(double x_max, std::uint64_t sieve_budget = 100'000'000);

// ---------------------------------------------------------------------------
// The parameter schedule and prime blocks
// ---------------------------------------------------------------------------

/// r_k = ceil(1+1/k)+1 for 0<k<1, ceil(k/(2k-1))+1 for k>1.
std::uint32_t compute_r_k(double k);

/// The length recursion alone: ell_1 = 2 ceil(N log log q),
/// ell_{j+1} = 2 ceil(N log ell_j), cut at the largest R with ell_R > 10^M.
/// Takes log log q directly so asymptotic-scale parameters stay testable.
std::vector<std::uint64_t> schedule_lengths_from_loglog(double loglog_q,
                                                        std::uint32_t N,
                                                        std::uint32_t M);

struct ScheduleFlags {
    bool ell_square_decreasing = true;   // ell_j > ell_{j+1}^2 for j < R
    bool ell_R_above_threshold = true;   // ell_R > 10^M
    bool sum_inv_ell_ok = true;          // sum 1/ell_j <= 2/ell_R
    bool exponent_budget_ok = true;      // (2 r_k + 2) sum 1/ell_j < 1
    bool blocks_nonempty = true;
    bool sum_inv_p_ok = true;            // sum_{p in P_j} 1/p <= ell_j / N, nonempty blocks

    bool all() const {
        return ell_square_decreasing && ell_R_above_threshold && sum_inv_ell_ok &&
               exponent_budget_ok && blocks_nonempty && sum_inv_p_ok;
    }
};

struct PrimeBlock {
    double lo = 0.0;  // exclusive lower bound (0 for the first block)
    double hi = 0.0;  // inclusive upper bound
    std::vector<std::uint32_t> primes;  // odd primes in (lo, hi], q excluded
};

struct BlockSchedule {
    std::uint32_t q = 0;
    double k = 0.0;
    std::uint32_t N = 0, M = 0;
    bool paper_mode = true;
    std::uint32_t r_k = 0;
    std::vector<std::uint64_t> ell;   // ell_1..ell_R, even
    std::vector<PrimeBlock> blocks;   // P_1..P_R
    ScheduleFlags flags;
    double sum_inv_ell = 0.0;

    std::size_t R() const { return ell.size(); }
};

/// Paper-faithful schedule.  R = 0 or empty blocks at desk scale is reported
/// through the flags, not an error.
BlockSchedule build_schedule_paper(std::uint32_t q, double k, std::uint32_t N,
                                   std::uint32_t M);

struct CustomBlockSpec {
    std::vector<std::uint64_t> ell;                      // even lengths
    std::vector<std::pair<double, double>> bounds;       // (lo, hi] per block
    std::uint32_t N = 10;                                // used only for the sum_inv_p flag
};

/// Custom schedule with explicit lengths and block boundaries.  Throws
/// std::invalid_argument for odd lengths, mismatched sizes or overlapping
/// bounds.
BlockSchedule build_schedule_custom(std::uint32_t q, double k,
                                    const CustomBlockSpec& spec);

/// The standard desk-scale fixture: P_1 = odd primes <= 50, P_2 = primes in
/// (50, 200], lengths (44, 36) sized so every character stays in the small
/// branch and the Q-terms are bounded by 1.
BlockSchedule standard_custom_schedule(std::uint32_t q, double k);

/// Same blocks with short lengths (6, 4); a sizable share of characters lands
/// in the large branch, which is what the pointwise-inequality tests need.
BlockSchedule compact_custom_schedule(std::uint32_t q, double k);

// ---------------------------------------------------------------------------
// Arithmetic coefficient functions and smooth supports
// ---------------------------------------------------------------------------

/// Omega(n): prime divisors counted with multiplicity (equivalently, the
/// number of distinct prime powers dividing n).
int omega_of(std::uint64_t n);

/// Multiplicative w with w(p^a) = a!.
std::uint64_t w_of(std::uint64_t n);

/// b_j(n): 1 iff n is composed of at most ell_j primes, all from block j.
bool b_j(std::uint64_t n, const BlockSchedule& s, std::size_t j);

/// p_{v+1}(n): 1 iff n is composed of exactly r_k * ell_{v+1} primes, all
/// from block v+1.  `v` is 0-based (block index).
bool p_v(std::uint64_t n, const BlockSchedule& s, std::size_t v);

struct SupportEntry {
    std::uint64_t n = 1;
    std::uint32_t omega = 0;
    std::uint64_t w = 1;
};

struct SmoothSupport {
    std::vector<SupportEntry> entries;  // ascending by n, includes n = 1
    std::uint64_t length_bound = 1;
};

/// Count of multisets of size <= omega_cap from nprimes primes (saturating).
std::uint64_t projected_support_count(std::size_t nprimes, std::uint32_t omega_cap);

/// Complete enumeration of {n : Omega(n) <= omega_cap, p|n => p in block,
/// n <= length_cap}, ascending.  Throws resource_error (with the projected
/// count) when the projection exceeds the budget.
SmoothSupport enumerate_block_supported(std::span<const std::uint32_t> block_primes,
                                        std::uint32_t omega_cap,
                                        std::uint64_t length_cap = UINT64_MAX,
                                        std::uint64_t budget = 10'000'000);

}  // namespace lmom
