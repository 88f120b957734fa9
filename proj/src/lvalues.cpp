#include "lmom/lvalues.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lmom/dft.hpp"

namespace lmom {

double CharacterVector::conjugation_defect() const {
    double worst = 0.0;
    for (std::uint32_t j = 1; j < q - 1; ++j) {
        worst = std::max(worst, std::abs(data[q - 1 - j] - std::conj(data[j])));
    }
    return worst;
}

std::vector<double> dlog_class_sums(const ModulusContext& ctx, std::uint64_t X,
                                    unsigned threads) {
    const std::uint32_t q = ctx.q();
    const std::uint32_t n = q - 1;
    constexpr std::uint64_t kBlock = 1u << 16;

    // fixed m-blocks accumulated independently, merged in block order: the
    // result is bit-identical for any worker count
    const std::size_t nblocks = block_count(X, kBlock);
    std::vector<std::vector<double>> partial(nblocks);
    parallel_blocks(X, kBlock, threads, [&](std::size_t b, std::uint64_t lo, std::uint64_t hi) {
        std::vector<KahanReal> acc(n);
        for (std::uint64_t m = lo + 1; m <= hi; ++m) {
            const std::uint32_t r = static_cast<std::uint32_t>(m % q);
            if (r == 0) continue;
            acc[ctx.dlog(r)].add(1.0 / std::sqrt(static_cast<double>(m)));
        }
        std::vector<double> out(n);
        for (std::uint32_t t = 0; t < n; ++t) out[t] = acc[t].value();
        partial[b] = std::move(out);
    });

    std::vector<double> A(n, 0.0);
    for (std::size_t b = 0; b < nblocks; ++b)
        for (std::uint32_t t = 0; t < n; ++t) A[t] += partial[b][t];
    return A;
}

namespace {

cplx eval_classes(const ModulusContext& ctx, const std::vector<double>& A, std::uint32_t j) {
    const std::uint32_t n = ctx.q() - 1;
    KahanComplex acc;
    for (std::uint32_t t = 0; t < n; ++t) {
        acc.add(A[t] * ctx.root(static_cast<std::uint64_t>(j) * t));
    }
    return acc.value();
}

}  // namespace

cplx l_half_truncated(const ModulusContext& ctx, CharacterId id, std::uint64_t X) {
    if (X == 0) throw std::invalid_argument("l_half_truncated: X >= 1");
    const auto A = dlog_class_sums(ctx, X, 1);
    return eval_classes(ctx, A, id.j);
}

CharacterVector l_all_direct(const ModulusContext& ctx, std::uint64_t X, unsigned threads) {
    const auto A = dlog_class_sums(ctx, X, threads);
    CharacterVector out{ctx.q(), std::vector<cplx>(ctx.q() - 1), "truncated",
                        static_cast<double>(X)};
    parallel_blocks(ctx.q() - 1, 64, threads, [&](std::size_t, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t j = lo; j < hi; ++j)
            out.data[j] = eval_classes(ctx, A, static_cast<std::uint32_t>(j));
    });
    return out;
}

CharacterVector l_all_bulk(const ModulusContext& ctx, std::uint64_t X, unsigned threads) {
    const auto A = dlog_class_sums(ctx, X, threads);
    std::vector<cplx> in(A.size());
    for (std::size_t t = 0; t < A.size(); ++t) in[t] = {A[t], 0.0};
    CharacterVector out{ctx.q(), dft(in, +1), "bulk", static_cast<double>(X)};
    return out;
}

// ---------------------------------------------------------------------------
// AFE for |L(1/2, chi)|^2
// ---------------------------------------------------------------------------

namespace {

std::uint64_t afe_cutoff(std::uint32_t q, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("lsq_afe: delta must be > 0");
    return static_cast<std::uint64_t>(std::pow(static_cast<double>(q), 1.0 + delta));
}

// Certified bound on the discarded ab > C tail: with tau(d) <= 2 sqrt(d) and
// the measured envelope W(x) <= K x^{-c} anchored at the cutoff edge,
// 2 sum_{d>C} tau(d) W(pi d/q)/sqrt(d) <= 4 K (q/pi)^c C^{1-c}/(c-1).
double afe_tail_bound(const KernelEvaluator& kernel, int parity, std::uint32_t q,
                      std::uint64_t C) {
    const double edge = kPi * static_cast<double>(C + 1) / q;
    const double K = kernel.measured_decay_constant(parity, edge, 4.0 * edge, 24) * 1.05;
    const double c = kernel.config().c;
    return 4.0 * K * std::pow(q / kPi, c) * std::pow(static_cast<double>(C), 1.0 - c) /
           (c - 1.0);
}

}  // namespace

AfeResult lsq_afe(const ModulusContext& ctx, CharacterId id, double delta,
                  const KernelEvaluator& kernel, int parity_override) {
    if (id.principal())
        throw std::invalid_argument("lsq_afe: principal character rejected (Lemma is for primitive chi)");
    const std::uint32_t q = ctx.q();
    const std::uint32_t n = q - 1;
    const std::uint64_t C = afe_cutoff(q, delta);
    const int parity = parity_override >= 0 ? parity_override : id.parity();

    KahanComplex acc;
    for (std::uint64_t a = 1; a <= C; ++a) {
        if (a % q == 0) continue;
        const std::uint64_t da = ctx.dlog(static_cast<std::uint32_t>(a % q));
        for (std::uint64_t b = 1, bmax = C / a; b <= bmax; ++b) {
            if (b % q == 0) continue;
            const std::uint64_t db = ctx.dlog(static_cast<std::uint32_t>(b % q));
            const std::uint64_t t = (static_cast<std::uint64_t>(id.j) * (da + n - db)) % n;
            const double d = static_cast<double>(a * b);
            acc.add(ctx.root(t) * (kernel.W_fast(parity, kPi * d / q) / std::sqrt(d)));
        }
    }
    cplx total = 2.0 * acc.value();
    AfeResult r;
    r.value = total.real();
    r.im_residual = std::abs(total.imag());
    r.cutoff = C;
    r.tail_bound = afe_tail_bound(kernel, parity, q, C);
    if (r.im_residual > 1e-8 * (1.0 + std::abs(r.value)))
        throw accuracy_error("lsq_afe: imaginary residual above tolerance");
    if (r.tail_bound > 1e-6 * std::abs(r.value))
        throw accuracy_error("lsq_afe: truncation tail bound above 1e-6 of the value");
    return r;
}

CharacterVector lsq_afe_all(const ModulusContext& ctx, double delta,
                            const KernelEvaluator& kernel, unsigned threads) {
    const std::uint32_t q = ctx.q();
    const std::uint32_t n = q - 1;
    const std::uint64_t C = afe_cutoff(q, delta);

    // one kernel table per parity, indexed by the product d = ab
    std::vector<std::vector<double>> wt(2);
    for (int parity = 0; parity < 2; ++parity)
        wt[parity] = kernel.W_table(parity, kPi / q, C, threads);

    // accumulate the dlog-difference classes, one real array per parity
    std::vector<KahanReal> B0(n), B1(n);
    for (std::uint64_t a = 1; a <= C; ++a) {
        if (a % q == 0) continue;
        const std::uint64_t da = ctx.dlog(static_cast<std::uint32_t>(a % q));
        for (std::uint64_t b = 1, bmax = C / a; b <= bmax; ++b) {
            if (b % q == 0) continue;
            const std::uint64_t db = ctx.dlog(static_cast<std::uint32_t>(b % q));
            const std::uint32_t t = static_cast<std::uint32_t>((da + n - db) % n);
            const std::uint64_t d = a * b;
            const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(d));
            B0[t].add(wt[0][d] * inv_sqrt);
            B1[t].add(wt[1][d] * inv_sqrt);
        }
    }

    std::vector<cplx> in0(n), in1(n);
    for (std::uint32_t t = 0; t < n; ++t) {
        in0[t] = {B0[t].value(), 0.0};
        in1[t] = {B1[t].value(), 0.0};
    }
    const auto out0 = dft(in0, +1);
    const auto out1 = dft(in1, +1);

    CharacterVector out{q, std::vector<cplx>(n, cplx{}), "afe", static_cast<double>(C)};
    for (std::uint32_t j = 1; j < n; ++j) {
        const auto& v = (j & 1u) ? out1[j] : out0[j];
        out.data[j] = 2.0 * v;
    }
    return out;
}

}  // namespace lmom
