#include "lmom/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lmom {

namespace {

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = static_cast<std::uint64_t>((static_cast<unsigned __int128>(r) * base) % m);
        base = static_cast<std::uint64_t>((static_cast<unsigned __int128>(base) * base) % m);
        exp >>= 1;
    }
    return r;
}

}  // namespace

std::uint64_t default_truncation(std::uint32_t q) {
    const double x = std::pow(static_cast<double>(q), 1.5);
    return static_cast<std::uint64_t>(std::min(x, 1e7));
}

FamilyData FamilyData::build(const ModulusContext& ctx, const BlockSchedule& sched,
                             const KernelEvaluator& kernel, double delta, std::uint64_t X,
                             unsigned threads) {
    FamilyData fd;
    fd.ctx = &ctx;
    fd.sched = &sched;
    fd.delta = delta;
    fd.X = X == 0 ? default_truncation(ctx.q()) : X;
    fd.lsq = lsq_afe_all(ctx, delta, kernel, threads);
    fd.ltrunc = l_all_bulk(ctx, fd.X, threads);
    fd.moll = FamilyMollifier::build(ctx, sched, threads);
    return fd;
}

double moment(std::span<const double> lsq_values, double k) {
    KahanReal acc;
    for (std::size_t j = 1; j < lsq_values.size(); ++j) {
        double v = lsq_values[j];
        if (v < -1e-8) throw std::domain_error("moment: |L|^2 entry below -1e-8");
        if (v < 0.0) v = 0.0;  // AFE truncation noise
        acc.add(std::pow(v, k));
    }
    return acc.value();
}

double moment(const CharacterVector& lsq, double k) {
    std::vector<double> vals(lsq.data.size());
    for (std::size_t j = 0; j < lsq.data.size(); ++j) vals[j] = lsq.data[j].real();
    return moment(vals, k);
}

namespace {

double normalizer(std::uint32_t q, double k) {
    return (q - 2.0) * std::pow(std::log(static_cast<double>(q)), k * k);
}

}  // namespace

LowerFunctionalResult lower_functional(const FamilyData& fd, double k) {
    const std::uint32_t n = fd.ctx->q() - 1;
    KahanComplex acc;
    for (std::uint32_t j = 1; j < n; ++j) {
        const cplx nk = fd.moll.n_total(j, k);
        const cplx nkm1 = fd.moll.n_total(j, k - 1.0);
        acc.add(fd.ltrunc.data[j] * nkm1 * std::conj(nk));
    }
    LowerFunctionalResult r;
    const cplx total = acc.value();
    r.value = total.real();
    r.im_residual = std::abs(total.imag());
    r.ratio = r.value / normalizer(fd.ctx->q(), k);
    return r;
}

double twisted_second(const FamilyData& fd, double k, TwistedVariant variant) {
    if (!(k > 0.0 && k < 1.0))
        throw std::invalid_argument("twisted_second: 0 < k < 1");
    const std::uint32_t n = fd.ctx->q() - 1;
    KahanReal acc;
    for (std::uint32_t j = 1; j < n; ++j) {
        const double lsq = fd.lsq.data[j].real();
        if (variant == TwistedVariant::full) {
            acc.add(lsq * std::norm(fd.moll.n_total(j, k - 1.0)));
        } else {
            acc.add(lsq * fd.moll.s_sum(j, k - 1.0, k));
        }
    }
    return acc.value();
}

double mollifier_moment(const FamilyData& fd, double k, MollifierVariant variant) {
    const std::uint32_t n = fd.ctx->q() - 1;
    const std::size_t R = fd.sched->R();
    KahanReal acc;
    for (std::uint32_t j = 1; j < n; ++j) {
        if (variant == MollifierVariant::product) {
            double prod = 1.0;
            for (std::size_t b = 0; b < R; ++b) {
                const double qv = fd.moll.q_j(b, j, k);
                prod *= std::norm(fd.moll.n_j(b, j, k)) + qv * qv;
            }
            acc.add(prod);
        } else {
            acc.add(fd.moll.s_sum(j, k, k));
        }
    }
    return acc.value();
}

// ---------------------------------------------------------------------------
// Holder chains
// ---------------------------------------------------------------------------

HolderReport holder_chain_check(const FamilyData& fd, double k, bool strict) {
    if (!(k > 0.0) || k == 1.0)
        throw std::invalid_argument("holder_chain_check: k > 0, k != 1");
    const std::uint32_t n = fd.ctx->q() - 1;
    const std::size_t R = fd.sched->R();

    // per-character data, truncated L throughout so every inequality is exact
    std::vector<double> labs(n, 0.0), nk_abs(n, 0.0), nkm1_abs(n, 0.0);
    std::vector<double> s_k(n, 0.0), s_km1(n, 0.0), prod_nq_k(n, 1.0);
    KahanComplex lhs_acc;
    for (std::uint32_t j = 1; j < n; ++j) {
        const cplx nk = fd.moll.n_total(j, k);
        const cplx nkm1 = fd.moll.n_total(j, k - 1.0);
        labs[j] = std::abs(fd.ltrunc.data[j]);
        nk_abs[j] = std::abs(nk);
        nkm1_abs[j] = std::abs(nkm1);
        s_k[j] = fd.moll.s_sum(j, k, k);
        s_km1[j] = fd.moll.s_sum(j, k - 1.0, k);
        double prod = 1.0;
        for (std::size_t b = 0; b < R; ++b) {
            const double qv = fd.moll.q_j(b, j, k);
            prod *= std::norm(fd.moll.n_j(b, j, k)) + qv * qv;
        }
        prod_nq_k[j] = prod;
        lhs_acc.add(fd.ltrunc.data[j] * nkm1 * std::conj(nk));
    }
    const double lhs = std::abs(lhs_acc.value());

    auto ksum = [&](auto&& f) {
        KahanReal acc;
        for (std::uint32_t j = 1; j < n; ++j) acc.add(f(j));
        return acc.value();
    };

    const double sum_l2k = ksum([&](std::uint32_t j) { return std::pow(labs[j], 2.0 * k); });

    HolderReport rep;
    auto push = [&](std::string id, double l, double r, bool hard) {
        rep.margins.push_back({std::move(id), l, r, r - l, hard});
    };

    if (k < 1.0) {
        const double sum_ln2 = ksum([&](std::uint32_t j) {
            const double v = labs[j] * nkm1_abs[j];
            return v * v;
        });
        const double sum_mixed = ksum([&](std::uint32_t j) {
            return std::pow(nk_abs[j], 2.0 / k) * nkm1_abs[j] * nkm1_abs[j];
        });
        push("holder3", lhs,
             std::sqrt(sum_l2k) * std::pow(sum_ln2, (1.0 - k) / 2.0) *
                 std::pow(sum_mixed, k / 2.0),
             true);

        // final form of Lemma 3.1 with the (|N_j|^2+|Q_j|^2) product (soft)
        const double sum_l2n2 = ksum([&](std::uint32_t j) {
            const double lsq = std::max(0.0, fd.lsq.data[j].real());
            return lsq * nkm1_abs[j] * nkm1_abs[j];
        });
        const double sum_prod = ksum([&](std::uint32_t j) { return prod_nq_k[j]; });
        push("final31", lhs,
             std::sqrt(sum_l2k) * std::pow(sum_l2n2, (1.0 - k) / 2.0) *
                 std::pow(sum_prod, k / 2.0),
             false);

        // Lemma 3.2 chain: exact Holder on |L|^{2k} S_{k-1}^k S_k^{1-k}
        const double lhs_upper = ksum([&](std::uint32_t j) {
            return std::pow(labs[j], 2.0 * k) * std::pow(s_km1[j], k) *
                   std::pow(s_k[j], 1.0 - k);
        });
        const double sum_l2s = ksum([&](std::uint32_t j) {
            return labs[j] * labs[j] * s_km1[j];
        });
        const double sum_sk = ksum([&](std::uint32_t j) { return s_k[j]; });
        const double rhs_upper = std::pow(sum_l2s, k) * std::pow(sum_sk, 1.0 - k);
        push("upper_chain", lhs_upper, rhs_upper, true);

        double c_min = HUGE_VAL;
        for (std::uint32_t j = 1; j < n; ++j)
            c_min = std::min(c_min, std::pow(s_km1[j], k) * std::pow(s_k[j], 1.0 - k));
        rep.c_min = c_min;
        if (c_min > 0.0) {
            // sum* |L|^{2k} <= (1/c_min) RHS, exact by definition of c_min
            push("upper_final", sum_l2k, rhs_upper / c_min, true);
        }
    } else {
        const double p = 2.0 * k / (2.0 * k - 1.0);
        const double sum_nn = ksum([&](std::uint32_t j) {
            return std::pow(nk_abs[j] * nkm1_abs[j], p);
        });
        push("holder2", lhs,
             std::pow(sum_l2k, 1.0 / (2.0 * k)) * std::pow(sum_nn, (2.0 * k - 1.0) / (2.0 * k)),
             true);
        const double sum_prod = ksum([&](std::uint32_t j) { return prod_nq_k[j]; });
        push("final31_kbig", lhs,
             std::pow(sum_l2k, 1.0 / (2.0 * k)) *
                 std::pow(sum_prod, (2.0 * k - 1.0) / (2.0 * k)),
             false);
    }

    rep.worst_hard_slack = HUGE_VAL;
    for (const auto& m : rep.margins) {
        if (!m.hard) continue;
        const double rel = m.rhs != 0.0 ? m.slack / m.rhs : m.slack;
        rep.worst_hard_slack = std::min(rep.worst_hard_slack, rel);
        if (m.slack < -1e-9 * m.rhs) rep.hard_ok = false;
    }
    if (strict && !rep.hard_ok)
        throw accuracy_error("holder_chain_check: an exact Holder inequality failed");
    return rep;
}

// ---------------------------------------------------------------------------
// Diagonal oracles
// ---------------------------------------------------------------------------

namespace {

std::vector<DirichletPoly> block_polys(const BlockSchedule& sched, double alpha,
                                       std::uint64_t budget) {
    std::vector<DirichletPoly> ps;
    for (std::size_t b = 0; b < sched.R(); ++b)
        ps.push_back(n_poly(sched.blocks[b].primes, sched.ell[b], alpha, budget));
    return ps;
}

}  // namespace

DiagonalOracleResult diagonal_oracle(const BlockSchedule& sched, double k,
                                     std::uint64_t brute_budget) {
    DiagonalOracleResult r;

    // (i) brute force over the product support: coefficients recomputed from
    // the integers themselves, divisors found by trial division
    const auto polys_k = block_polys(sched, k, brute_budget);
    const auto product = convolve_coprime(polys_k, brute_budget);
    {
        KahanReal acc;
        for (const auto& tb : product.terms) {
            const double y = std::pow(k, omega_of(tb.n)) / static_cast<double>(w_of(tb.n));
            KahanReal inner;
            for (const auto& ta : product.terms) {
                if (ta.n > tb.n) break;
                if (tb.n % ta.n != 0) continue;
                inner.add(std::pow(k - 1.0, omega_of(ta.n)) / static_cast<double>(w_of(ta.n)));
            }
            acc.add(y / static_cast<double>(tb.n) * inner.value());
        }
        r.brute = acc.value();
    }

    // (ii) per-block factored form
    {
        double prod = 1.0;
        for (std::size_t b = 0; b < sched.R(); ++b) {
            const auto support = enumerate_block_supported(
                sched.blocks[b].primes, static_cast<std::uint32_t>(sched.ell[b]), UINT64_MAX,
                brute_budget);
            KahanReal acc;
            for (const auto& e : support.entries) {
                KahanReal inner;
                for (const auto& d : support.entries) {
                    if (d.n > e.n) break;
                    if (e.n % d.n != 0) continue;
                    inner.add(std::pow(k - 1.0, d.omega) / static_cast<double>(d.w));
                }
                acc.add(std::pow(k, e.omega) /
                        (static_cast<double>(e.n) * static_cast<double>(e.w)) *
                        inner.value());
            }
            prod *= acc.value();
        }
        r.factored = prod;
    }

    // (iii) unrestricted-Omega Euler product, leading form
    {
        double prod = 1.0;
        for (const auto& blk : sched.blocks)
            for (std::uint32_t p : blk.primes) prod *= 1.0 + k * k / static_cast<double>(p);
        r.euler = prod;
    }

    r.rel_err_routes = std::abs(r.brute - r.factored) /
                       std::max(1e-300, std::abs(r.factored));
    r.ratio_euler = r.brute / r.euler;
    return r;
}

OrthDiagResult orthogonality_diagonal_check(const ModulusContext& ctx,
                                            const DirichletPoly& poly) {
    OrthDiagResult r;
    r.max_support = poly.max_support();
    r.precondition_ok = r.max_support < ctx.q();

    KahanReal lhs;
    for (std::uint32_t j = 0; j < ctx.q() - 1; ++j)
        lhs.add(std::norm(eval_poly(ctx, poly, CharacterId{j})));
    r.lhs = lhs.value();

    KahanReal rhs;
    for (const auto& t : poly.terms)
        rhs.add(t.coeff * t.coeff / static_cast<double>(t.n));
    r.rhs = static_cast<double>(ctx.phi()) * rhs.value();

    r.rel_err = std::abs(r.lhs - r.rhs) / std::max(1e-300, std::abs(r.rhs));
    return r;
}

Prop4Result prop4_reproduction(const ModulusContext& ctx, const BlockSchedule& sched,
                               double k, std::uint64_t X, std::uint64_t support_budget) {
    const std::uint32_t q = ctx.q();
    Prop4Result r;
    r.X = X == 0 ? default_truncation(q) : X;

    const auto x_poly = convolve_coprime(block_polys(sched, k - 1.0, support_budget),
                                         support_budget);  // N(chi, k-1)
    const auto y_poly = convolve_coprime(block_polys(sched, k, support_budget),
                                         support_budget);  // N(conj chi, k)
    if (y_poly.max_support() > r.X)
        throw std::invalid_argument("prop4_reproduction: X below the polynomial length");

    // character-space route, all characters
    const auto ltr = l_all_direct(ctx, r.X);
    KahanComplex all_acc;
    cplx principal{};
    for (std::uint32_t j = 0; j < q - 1; ++j) {
        const CharacterId id{j};
        const cplx term = ltr.data[j] * eval_poly(ctx, x_poly, id) *
                          std::conj(eval_poly(ctx, y_poly, id));
        all_acc.add(term);
        if (j == 0) principal = term;
    }
    const cplx all_total = all_acc.value();
    r.all_char_total = all_total.real();
    r.all_char_im = std::abs(all_total.imag());
    r.principal_term = principal.real();

    // coefficient-space route: phi(q) * congruence sum over m <= X
    std::vector<double> prog(q, 0.0);
    {
        std::vector<KahanReal> acc(q);
        for (std::uint64_t m = 1; m <= r.X; ++m)
            acc[m % q].add(1.0 / std::sqrt(static_cast<double>(m)));
        for (std::uint32_t i = 0; i < q; ++i) prog[i] = acc[i].value();
    }
    KahanReal cong;
    for (const auto& ta : x_poly.terms) {
        const std::uint64_t ainv = powmod_u64(ta.n % q, q - 2, q);
        const double fa = ta.coeff / std::sqrt(static_cast<double>(ta.n));
        for (const auto& tb : y_poly.terms) {
            const std::uint32_t m0 = static_cast<std::uint32_t>((tb.n % q) * ainv % q);
            cong.add(fa * tb.coeff / std::sqrt(static_cast<double>(tb.n)) * prog[m0]);
        }
    }
    r.coef_space_total = static_cast<double>(ctx.phi()) * cong.value();
    r.identity_rel_err = std::abs(r.all_char_total - r.coef_space_total) /
                         std::max(1.0, std::abs(r.all_char_total));

    // diagonal am = b via integer divisibility on the two supports
    KahanReal diag;
    for (const auto& tb : y_poly.terms) {
        KahanReal inner;
        for (const auto& ta : x_poly.terms) {
            if (ta.n > tb.n) break;
            if (tb.n % ta.n != 0) continue;
            inner.add(ta.coeff);
        }
        diag.add(tb.coeff / static_cast<double>(tb.n) * inner.value());
    }
    r.diagonal = static_cast<double>(ctx.phi_star()) * diag.value();
    r.primitive_total = r.all_char_total - r.principal_term;
    r.remainder = r.primitive_total - r.diagonal;
    r.remainder_ratio = std::abs(r.remainder) / std::max(1e-300, std::abs(r.diagonal));
    return r;
}

ExponentFit exponent_fit(std::span<const std::uint32_t> qs, std::span<const double> moments,
                         double k) {
    if (qs.size() != moments.size() || qs.size() < 4)
        throw std::invalid_argument("exponent_fit: need >= 4 moduli");
    ExponentFit fit;
    const std::size_t n = qs.size();
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double logq = std::log(static_cast<double>(qs[i]));
        xs[i] = std::log(logq);
        ys[i] = std::log(moments[i] / (qs[i] - 2.0));
        fit.ratios.push_back(moments[i] / ((qs[i] - 2.0) * std::pow(logq, k * k)));
    }
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= n;
    ybar /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double resid = ys[i] - fit.intercept - fit.slope * xs[i];
        ss += resid * resid;
    }
    fit.stderr_ = std::sqrt(ss / (static_cast<double>(n) - 2.0) / sxx);
    return fit;
}

}  // namespace lmom
