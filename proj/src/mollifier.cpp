#include "lmom/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lmom {

cplx p_block_value(const ModulusContext& ctx, CharacterId id,
                   std::span<const std::uint32_t> block_primes) {
    KahanComplex acc;
    for (std::uint32_t p : block_primes) {
        acc.add(ctx.char_value(id, p) / std::sqrt(static_cast<double>(p)));
    }
    return acc.value();
}

cplx e_trunc(std::uint64_t ell, cplx z) {
    // Horner on E_ell(z) = sum_{i<=ell} z^i/i!
    cplx acc{1.0, 0.0};
    for (std::uint64_t i = ell; i >= 1; --i) {
        acc = acc * z / static_cast<double>(i) + 1.0;
    }
    return acc;
}

double q_term(double p_abs, std::uint64_t ell, double k, std::uint32_t r_k) {
    const double base = 12.0 * std::max(1.0, k * k) * p_abs / static_cast<double>(ell);
    return std::pow(base, static_cast<double>(r_k * ell));
}

double q_term_complex_route(cplx p_val, std::uint64_t ell, double k, std::uint32_t r_k) {
    const double scale = 12.0 * std::max(1.0, k * k) / static_cast<double>(ell);
    cplx pw = std::pow(p_val * scale, static_cast<double>(r_k * ell));
    return std::abs(pw);
}

double DirichletPoly::coeff_at(std::uint64_t n) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), n,
                               [](const Term& t, std::uint64_t v) { return t.n < v; });
    return (it != terms.end() && it->n == n) ? it->coeff : 0.0;
}

DirichletPoly n_poly(std::span<const std::uint32_t> block_primes, std::uint64_t ell,
                     double alpha, std::uint64_t budget) {
    const auto support = enumerate_block_supported(
        block_primes, static_cast<std::uint32_t>(ell), UINT64_MAX, budget);
    DirichletPoly poly;
    poly.label = "n_poly";
    poly.length_bound = 1;
    for (const auto& e : support.entries) {
        poly.terms.push_back(
            {e.n, std::pow(alpha, static_cast<double>(e.omega)) / static_cast<double>(e.w)});
        poly.length_bound = std::max(poly.length_bound, e.n);
    }
    return poly;
}

DirichletPoly power_poly(std::span<const std::uint32_t> block_primes, std::uint32_t m,
                         std::uint64_t budget) {
    if (m > 18)
        throw resource_error("power_poly: exponent above 18 loses exact multinomials");
    const auto support = enumerate_block_supported(block_primes, m, UINT64_MAX, budget);
    DirichletPoly poly;
    poly.label = "power_poly";
    poly.length_bound = 1;
    double m_fact = 1.0;
    for (std::uint32_t i = 2; i <= m; ++i) m_fact *= i;
    for (const auto& e : support.entries) {
        if (e.omega != m) continue;
        poly.terms.push_back({e.n, m_fact / static_cast<double>(e.w)});
        poly.length_bound = std::max(poly.length_bound, e.n);
    }
    return poly;
}

DirichletPoly convolve_coprime(std::span<const DirichletPoly> polys, std::uint64_t budget) {
    DirichletPoly acc;
    acc.label = "product";
    acc.terms = {{1, 1.0}};
    acc.length_bound = 1;
    for (const auto& p : polys) {
        if (acc.terms.size() * p.terms.size() > budget)
            throw resource_error("convolve_coprime: product support exceeds budget");
        DirichletPoly next;
        next.terms.reserve(acc.terms.size() * p.terms.size());
        for (const auto& a : acc.terms) {
            for (const auto& b : p.terms) {
                if (b.n != 0 && a.n > UINT64_MAX / b.n)
                    throw resource_error("convolve_coprime: support point overflows 64 bits");
                next.terms.push_back({a.n * b.n, a.coeff * b.coeff});
            }
        }
        std::sort(next.terms.begin(), next.terms.end(),
                  [](const auto& x, const auto& y) { return x.n < y.n; });
        next.length_bound = next.terms.empty() ? 1 : next.terms.back().n;
        next.label = acc.label;
        acc = std::move(next);
    }
    return acc;
}

cplx eval_poly(const ModulusContext& ctx, const DirichletPoly& poly, CharacterId id) {
    KahanComplex acc;
    for (const auto& t : poly.terms) {
        acc.add(t.coeff / std::sqrt(static_cast<double>(t.n)) * ctx.char_value(id, t.n));
    }
    return acc.value();
}

// ---------------------------------------------------------------------------
// FamilyMollifier
// ---------------------------------------------------------------------------

FamilyMollifier FamilyMollifier::build(const ModulusContext& ctx, const BlockSchedule& sched,
                                       unsigned threads) {
    FamilyMollifier fm;
    fm.sched_ = &sched;
    fm.P_.assign(sched.R(), std::vector<cplx>(ctx.q() - 1));
    for (std::size_t b = 0; b < sched.R(); ++b) {
        auto& row = fm.P_[b];
        const auto& primes = sched.blocks[b].primes;
        parallel_blocks(ctx.q() - 1, 256, threads,
                        [&](std::size_t, std::uint64_t lo, std::uint64_t hi) {
                            for (std::uint64_t j = lo; j < hi; ++j)
                                row[j] = p_block_value(
                                    ctx, CharacterId{static_cast<std::uint32_t>(j)}, primes);
                        });
    }
    return fm;
}

cplx FamilyMollifier::n_j(std::size_t block, std::uint32_t j, double alpha) const {
    return e_trunc(sched_->ell[block], alpha * P_[block][j]);
}

cplx FamilyMollifier::n_total(std::uint32_t j, double alpha) const {
    cplx prod{1.0, 0.0};
    for (std::size_t b = 0; b < sched_->R(); ++b) prod *= n_j(b, j, alpha);
    return prod;
}

double FamilyMollifier::q_j(std::size_t block, std::uint32_t j, double k) const {
    if (block == sched_->R()) return 1.0;  // Q_{R+1} = 1
    return q_term(std::abs(P_[block][j]), sched_->ell[block], k, sched_->r_k);
}

double FamilyMollifier::s_sum(std::uint32_t j, double alpha, double k) const {
    const std::size_t R = sched_->R();
    KahanReal acc;
    double running = 1.0;  // prod_{j' <= v} |N_{j'}|^2
    for (std::size_t v = 0; v <= R; ++v) {
        if (v > 0) running *= std::norm(n_j(v - 1, j, alpha));
        const double qv = q_j(v, j, k);  // Q_{v+1}
        acc.add(running * qv * qv);
    }
    return acc.value();
}

// ---------------------------------------------------------------------------
// Pointwise lemma checks
// ---------------------------------------------------------------------------

PointwiseReport pointwise_lemma_checks(const FamilyMollifier& fm, std::uint32_t j, double k) {
    const auto& sched = fm.schedule();
    PointwiseReport rep;
    for (std::size_t b = 0; b < sched.R(); ++b) {
        PointwiseBlockReport r;
        r.block = b;
        const cplx P = fm.p_value(b, j);
        const double ell = static_cast<double>(sched.ell[b]);
        r.p_abs = std::abs(P);
        r.threshold = k > 1.0 ? ell / (10.0 * k) : ell / 10.0;
        r.small_branch = r.p_abs <= r.threshold;

        const cplx nk = fm.n_j(b, j, k);
        const cplx nkm1 = fm.n_j(b, j, k - 1.0);
        const double combined =
            std::pow(std::abs(nk), 2.0 / k) * std::norm(nkm1);  // |N(k)^{1/k} N(k-1)|^2

        if (r.small_branch) {
            const double ex = std::exp(2.0 * k * P.real());
            r.ratio_vs_exp = std::abs(combined / ex - 1.0);
            r.ratio_vs_nsq = std::abs(combined / std::norm(nk) - 1.0);
            r.lemma32_margin =
                std::pow(std::norm(nkm1), k) * std::pow(std::norm(nk), 1.0 - k) - 1.0;
        } else {
            // |E_ell(z)| <= (12|z|/ell)^ell holds for any |z| >= ell/10; apply it
            // with z = alpha P for each alpha of modulus <= 1, or k P when k > 1
            const double bound = std::pow(12.0 * std::max(1.0, k) * r.p_abs / ell, ell);
            r.large_bound_ok =
                std::abs(nk) <= bound * (1.0 + 1e-12) && std::abs(nkm1) <= bound * (1.0 + 1e-12);
            const double qv = fm.q_j(b, j, k);
            if (k < 1.0) {
                r.q_dominates_ok = combined <= qv * qv * (1.0 + 1e-9);
            } else {
                const double lhs = std::pow(std::abs(nk * nkm1), 2.0 * k / (2.0 * k - 1.0));
                r.q_dominates_ok = lhs <= qv * qv * (1.0 + 1e-9);
            }
            if (!r.large_bound_ok || !r.q_dominates_ok) rep.hard_ok = false;
        }
        rep.blocks.push_back(r);
    }
    return rep;
}

}  // namespace lmom
