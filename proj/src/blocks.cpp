#include "lmom/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lmom/chargroup.hpp"

namespace lmom {

std::vector<std::uint32_t> primes_up_to(std::uint64_t n, std::uint64_t budget) {
    if (n > budget) throw resource_error("primes_up_to: sieve bound above budget");
    std::vector<std::uint32_t> out;
    if (n < 2) return out;
    std::vector<bool> composite(n + 1, false);
    for (std::uint64_t i = 2; i * i <= n; ++i) {
        if (!composite[i])
            for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
    }
    for (std::uint64_t i = 2; i <= n; ++i)
        if (!composite[i]) out.push_back(static_cast<std::uint32_t>(i));
    return out;
}

MertensResult mertens_check(double x, int jpow, double b, std::uint64_t sieve_budget) {
    if (!(x >= 2.0)) throw std::invalid_argument("mertens_check: x >= 2");
    if (jpow < 0 || jpow > 3) throw std::invalid_argument("mertens_check: jpow in {0,...,3}");
    const auto ps = primes_up_to(static_cast<std::uint64_t>(x), sieve_budget);
    KahanReal acc;
    for (std::uint32_t p : ps) {
        const double pd = static_cast<double>(p);
        acc.add(jpow == 0 ? 1.0 / pd : std::pow(std::log(pd), jpow) / pd);
    }
    MertensResult r;
    r.sum = acc.value();
    r.main_term = jpow == 0 ? std::log(std::log(x)) + b
                            : std::pow(std::log(x), jpow) / jpow;
    r.residual = r.sum - r.main_term;
    return r;
}

double fit_mertens_b(double x_max, std::uint64_t sieve_budget) {
    return mertens_check(x_max, 0, 0.0, sieve_budget).residual;
}

// ---------------------------------------------------------------------------
// Schedule
// ---------------------------------------------------------------------------

std::uint32_t compute_r_k(double k) {
    if (!(k > 0.0) || k == 1.0)
        throw std::invalid_argument("compute_r_k: k > 0 and k != 1 required");
    const double raw = k < 1.0 ? 1.0 + 1.0 / k : k / (2.0 * k - 1.0);
    return static_cast<std::uint32_t>(std::ceil(raw)) + 1;
}

std::vector<std::uint64_t> schedule_lengths_from_loglog(double loglog_q, std::uint32_t N,
                                                        std::uint32_t M) {
    if (!(loglog_q > 0.0) || N == 0)
        throw std::invalid_argument("schedule_lengths: loglog_q > 0 and N >= 1");
    const double threshold = std::pow(10.0, static_cast<double>(M));
    std::vector<std::uint64_t> ell;
    std::uint64_t cur =
        2 * static_cast<std::uint64_t>(std::ceil(static_cast<double>(N) * loglog_q));
    while (static_cast<double>(cur) > threshold) {
        if (!ell.empty() && cur >= ell.back()) break;  // recursion stopped decreasing
        ell.push_back(cur);
        cur = 2 * static_cast<std::uint64_t>(
                      std::ceil(static_cast<double>(N) * std::log(static_cast<double>(cur))));
    }
    return ell;
}

namespace {

void finalize_flags(BlockSchedule& s) {
    const double threshold = std::pow(10.0, static_cast<double>(s.M));
    auto& f = s.flags;
    f.ell_square_decreasing = true;
    for (std::size_t j = 0; j + 1 < s.ell.size(); ++j) {
        if (!(static_cast<double>(s.ell[j]) >
              static_cast<double>(s.ell[j + 1]) * static_cast<double>(s.ell[j + 1])))
            f.ell_square_decreasing = false;
    }
    f.ell_R_above_threshold = s.ell.empty() ? false : static_cast<double>(s.ell.back()) > threshold;

    KahanReal inv;
    for (auto l : s.ell) inv.add(1.0 / static_cast<double>(l));
    s.sum_inv_ell = inv.value();
    f.sum_inv_ell_ok =
        s.ell.empty() || s.sum_inv_ell <= 2.0 / static_cast<double>(s.ell.back());
    f.exponent_budget_ok = (2.0 * s.r_k + 2.0) * s.sum_inv_ell < 1.0;

    f.blocks_nonempty = true;
    f.sum_inv_p_ok = true;
    for (std::size_t j = 0; j < s.blocks.size(); ++j) {
        if (s.blocks[j].primes.empty()) {
            f.blocks_nonempty = false;
            continue;
        }
        KahanReal ip;
        for (auto p : s.blocks[j].primes) ip.add(1.0 / static_cast<double>(p));
        if (!(ip.value() <= static_cast<double>(s.ell[j]) / static_cast<double>(s.N)))
            f.sum_inv_p_ok = false;
    }
}

PrimeBlock make_block(std::uint32_t q, double lo, double hi) {
    PrimeBlock b{lo, hi, {}};
    if (hi >= 3.0) {
        for (std::uint32_t p : primes_up_to(static_cast<std::uint64_t>(hi))) {
            if (p == 2 || p == q) continue;
            if (static_cast<double>(p) > lo && static_cast<double>(p) <= hi)
                b.primes.push_back(p);
        }
    }
    return b;
}

}  // namespace

BlockSchedule build_schedule_paper(std::uint32_t q, double k, std::uint32_t N,
                                   std::uint32_t M) {
    if (!is_prime_u64(q) || q < 3)
        throw std::invalid_argument("build_schedule_paper: q must be an odd prime");
    BlockSchedule s;
    s.q = q;
    s.k = k;
    s.N = N;
    s.M = M;
    s.paper_mode = true;
    s.r_k = compute_r_k(k);
    const double logq = std::log(static_cast<double>(q));
    s.ell = schedule_lengths_from_loglog(std::log(logq), N, M);

    double prev_bound = 0.0;
    for (std::size_t j = 0; j < s.ell.size(); ++j) {
        const double lj = static_cast<double>(s.ell[j]);
        const double hi = std::pow(static_cast<double>(q), 1.0 / (lj * lj));
        s.blocks.push_back(make_block(q, prev_bound, hi));
        prev_bound = hi;
    }
    finalize_flags(s);
    return s;
}

BlockSchedule build_schedule_custom(std::uint32_t q, double k, const CustomBlockSpec& spec) {
    if (!is_prime_u64(q) || q < 3)
        throw std::invalid_argument("build_schedule_custom: q must be an odd prime");
    if (spec.ell.size() != spec.bounds.size())
        throw std::invalid_argument("build_schedule_custom: one (lo,hi] per length");
    BlockSchedule s;
    s.q = q;
    s.k = k;
    s.N = spec.N;
    s.M = 0;
    s.paper_mode = false;
    s.r_k = compute_r_k(k);
    s.ell = spec.ell;
    double prev_hi = 0.0;
    for (std::size_t j = 0; j < spec.ell.size(); ++j) {
        if (spec.ell[j] == 0 || spec.ell[j] % 2 != 0)
            throw std::invalid_argument("build_schedule_custom: lengths must be even and positive");
        const auto [lo, hi] = spec.bounds[j];
        if (!(hi > lo)) throw std::invalid_argument("build_schedule_custom: empty block range");
        if (lo < prev_hi)
            throw std::invalid_argument("build_schedule_custom: overlapping block ranges");
        prev_hi = hi;
        s.blocks.push_back(make_block(q, lo, hi));
    }
    finalize_flags(s);
    return s;
}

BlockSchedule standard_custom_schedule(std::uint32_t q, double k) {
    // lengths chosen so 12 * sum_{p in P_j} 1/sqrt(p) <= ell_j: every character
    // sits in the small branch and the Q-terms stay <= 1, the desk analogue of
    // the paper's ell_j >> |P_j| regime
    CustomBlockSpec spec;
    spec.ell = {44, 36};
    spec.bounds = {{0.0, 50.0}, {50.0, 200.0}};
    spec.N = 10;
    return build_schedule_custom(q, k, spec);
}

BlockSchedule compact_custom_schedule(std::uint32_t q, double k) {
    // short lengths put a sizable share of characters in the large branch;
    // used where the branch machinery itself is under test
    CustomBlockSpec spec;
    spec.ell = {6, 4};
    spec.bounds = {{0.0, 50.0}, {50.0, 200.0}};
    spec.N = 10;
    return build_schedule_custom(q, k, spec);
}

// ---------------------------------------------------------------------------
// Coefficient functions and supports
// ---------------------------------------------------------------------------

int omega_of(std::uint64_t n) {
    int count = 0;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) {
            n /= p;
            ++count;
        }
    }
    if (n > 1) ++count;
    return count;
}

std::uint64_t w_of(std::uint64_t n) {
    std::uint64_t w = 1;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        std::uint64_t fact = 1, a = 0;
        while (n % p == 0) {
            n /= p;
            fact *= ++a;
        }
        w *= fact;
    }
    return w;  // the trailing prime, if any, contributes 1! = 1
}

namespace {

// factors n over the block's primes; returns false if anything is left over
bool factor_over(std::uint64_t n, const std::vector<std::uint32_t>& primes, int& omega) {
    omega = 0;
    for (std::uint32_t p : primes) {
        while (n % p == 0) {
            n /= p;
            ++omega;
        }
        if (n == 1) break;
    }
    return n == 1;
}

}  // namespace

bool b_j(std::uint64_t n, const BlockSchedule& s, std::size_t j) {
    if (n == 0) throw std::invalid_argument("b_j: n >= 1");
    if (n == 1) return true;
    int om = 0;
    return factor_over(n, s.blocks.at(j).primes, om) &&
           om <= static_cast<int>(s.ell.at(j));
}

bool p_v(std::uint64_t n, const BlockSchedule& s, std::size_t v) {
    if (n == 0) throw std::invalid_argument("p_v: n >= 1");
    const std::uint64_t target = s.r_k * s.ell.at(v);
    if (n == 1) return target == 0;
    int om = 0;
    return factor_over(n, s.blocks.at(v).primes, om) &&
           static_cast<std::uint64_t>(om) == target;
}

std::uint64_t projected_support_count(std::size_t nprimes, std::uint32_t omega_cap) {
    // multisets of size <= cap from nprimes symbols: C(nprimes + cap, cap)
    long double acc = 1.0L;
    for (std::uint32_t i = 1; i <= omega_cap; ++i) {
        acc *= static_cast<long double>(nprimes + i);
        acc /= static_cast<long double>(i);
        if (acc > 1e18L) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(acc);
}

namespace {

void enumerate_rec(const std::span<const std::uint32_t>& primes, std::size_t idx,
                   std::uint32_t omega_left, std::uint64_t n, std::uint32_t omega,
                   std::uint64_t w, std::uint64_t length_cap, bool explicit_cap,
                   std::vector<SupportEntry>& out) {
    out.push_back({n, omega, w});
    for (std::size_t i = idx; i < primes.size(); ++i) {
        const std::uint64_t p = primes[i];
        std::uint64_t m = n;
        std::uint64_t fact = 1;
        for (std::uint32_t a = 1; a <= omega_left; ++a) {
            if (m > length_cap / p) {  // overflow-safe: m*p would pass the cap
                if (!explicit_cap)
                    throw resource_error(
                        "enumerate_block_supported: support point overflows 64 bits");
                break;
            }
            m *= p;
            fact *= a;
            enumerate_rec(primes, i + 1, omega_left - a, m, omega + a, w * fact,
                          length_cap, explicit_cap, out);
        }
    }
}

}  // namespace

SmoothSupport enumerate_block_supported(std::span<const std::uint32_t> block_primes,
                                        std::uint32_t omega_cap, std::uint64_t length_cap,
                                        std::uint64_t budget) {
    const std::uint64_t projected = projected_support_count(block_primes.size(), omega_cap);
    if (projected > budget)
        throw resource_error("enumerate_block_supported: projected support of " +
                             std::to_string(projected) + " entries exceeds budget of " +
                             std::to_string(budget));
    SmoothSupport s;
    s.length_bound = length_cap;
    enumerate_rec(block_primes, 0, omega_cap, 1, 0, 1, length_cap,
                  length_cap != UINT64_MAX, s.entries);
    std::sort(s.entries.begin(), s.entries.end(),
              [](const SupportEntry& a, const SupportEntry& b) { return a.n < b.n; });
    return s;
}

}  // namespace lmom
