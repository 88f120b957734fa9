#include "lmom/kernel.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace lmom {

// ---------------------------------------------------------------------------
// log-gamma
// ---------------------------------------------------------------------------

namespace {

// Lanczos g=7, n=9 (Godfrey coefficients); ~1e-14 relative over Re z >= 1/2.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

cplx lanczos_log_gamma(cplx z) {
    // valid for Re z >= 1/2
    z -= 1.0;
    cplx x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
    cplx t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// log sin(pi z) for Im z >= 0, stable for large |Im z|:
// sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z}).
cplx log_sin_pi_upper(cplx z) {
    cplx e = std::exp(cplx{0.0, 2.0 * kPi} * z);  // |e| <= 1 for Im z >= 0
    return cplx{-std::log(2.0), kPi / 2.0} - cplx{0.0, kPi} * z + std::log(1.0 - e);
}

}  // namespace

cplx log_gamma(cplx z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        throw std::domain_error("log_gamma: pole at non-positive integer");
    if (z.imag() < 0.0) return std::conj(log_gamma(std::conj(z)));
    if (z.real() >= 0.5) return lanczos_log_gamma(z);
    // reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1-z)
    return std::log(kPi) - log_sin_pi_upper(z) - lanczos_log_gamma(1.0 - z);
}

// ---------------------------------------------------------------------------
// W evaluator
// ---------------------------------------------------------------------------

void KernelConfig::validate() const {
    if (!(c > 0.0) || !(h > 0.0) || !(T > 10.0) || !(tol > 0.0))
        throw std::invalid_argument("KernelConfig: need c > 0, h > 0, T > 10, tol > 0");
}

KernelEvaluator::KernelEvaluator(KernelConfig cfg) : cfg_(cfg) { cfg_.validate(); }

namespace {

// G_a(s) = Gamma(1/4+(s+a)/2)^2 / Gamma(1/4+a/2)^2, as exp of log-gammas
cplx log_G(cplx s, int parity) {
    cplx za = 0.25 + (s + static_cast<double>(parity)) / 2.0;
    cplx z0 = 0.25 + static_cast<double>(parity) / 2.0;
    return 2.0 * (log_gamma(za) - log_gamma(z0));
}

std::uint64_t memo_key(int parity, double x) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    bits &= ~0x7Full;  // ~1e-14 relative rounding of the mantissa
    return bits ^ (parity ? (1ull << 62) : 0ull);
}

}  // namespace

WResult KernelEvaluator::W_full(int parity, double x) const {
    if (!(x > 0.0)) throw std::domain_error("W: x must be positive");
    const double c = abscissa_for(x);
    const long M = std::lround(cfg_.T / cfg_.h);
    const double lx = std::log(x);
    KahanComplex acc;
    for (long m = -M; m <= M; ++m) {
        const cplx s{c, static_cast<double>(m) * cfg_.h};
        const cplx term = std::exp(log_G(s, parity) - s * lx) / s;
        acc.add(term);
    }
    cplx total = acc.value() * (cfg_.h / (2.0 * kPi));
    WResult r{total.real(), std::abs(total.imag()), c};
    if (r.im_residual > 1e-9)
        throw accuracy_error("W: imaginary residual above 1e-9 (quadrature non-convergence)");
    return r;
}

const KernelEvaluator::NodeSet& KernelEvaluator::nodes(int parity, double abscissa) const {
    const std::int64_t akey = std::llround(abscissa * 1024.0);
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = node_cache_[{parity, akey}];
    if (!slot) {
        auto ns = std::make_unique<NodeSet>();
        ns->abscissa = abscissa;
        const long M = std::lround(cfg_.T / cfg_.h);
        ns->g.resize(static_cast<std::size_t>(M) + 1);
        for (long m = 0; m <= M; ++m) {
            const cplx s{abscissa, static_cast<double>(m) * cfg_.h};
            ns->g[static_cast<std::size_t>(m)] =
                std::exp(log_G(s, parity)) / s * (cfg_.h / (2.0 * kPi));
        }
        slot = std::move(ns);
    }
    return *slot;
}

namespace {

double folded_node_sum(const std::vector<cplx>& g, double h, double c, double x) {
    const double lx = std::log(x);
    // folded half-line: W = x^{-c} (g_0 + 2 Re sum_{m>=1} g_m e^{-i m h lx})
    const cplx step{std::cos(h * lx), -std::sin(h * lx)};
    cplx rot{1.0, 0.0};
    KahanReal acc;
    acc.add(g[0].real());
    for (std::size_t m = 1; m < g.size(); ++m) {
        rot *= step;
        if ((m & 255u) == 0) {  // renormalize the unit rotation
            double ang = h * lx * static_cast<double>(m);
            rot = {std::cos(ang), -std::sin(ang)};
        }
        acc.add(2.0 * (g[m] * rot).real());
    }
    return std::exp(-c * lx) * acc.value();
}

}  // namespace

double KernelEvaluator::W_fast(int parity, double x) const {
    if (!(x > 0.0)) throw std::domain_error("W: x must be positive");
    const std::uint64_t key = memo_key(parity, x);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
    }
    const double c = abscissa_for(x);
    const NodeSet& ns = nodes(parity, c);
    const double val = folded_node_sum(ns.g, cfg_.h, c, x);
    {
        std::lock_guard<std::mutex> lock(mu_);
        memo_.emplace(key, val);
    }
    return val;
}

std::vector<double> KernelEvaluator::W_table(int parity, double scale, std::uint64_t dmax,
                                             unsigned threads) const {
    const NodeSet& lo_nodes = nodes(parity, abscissa_for(0.5));
    const NodeSet& hi_nodes = nodes(parity, abscissa_for(2.0));
    std::vector<double> table(dmax + 1, 0.0);
    parallel_blocks(dmax, 4096, threads, [&](std::size_t, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t d = lo; d < hi; ++d) {
            const double x = scale * static_cast<double>(d + 1);
            const NodeSet& ns = x < 1.0 ? lo_nodes : hi_nodes;
            table[d + 1] = folded_node_sum(ns.g, cfg_.h, ns.abscissa, x);
        }
    });
    return table;
}

double KernelEvaluator::measured_decay_constant(int parity, double x_lo, double x_hi,
                                                int grid_points) const {
    double best = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        double f = static_cast<double>(i) / (grid_points - 1);
        double x = x_lo * std::pow(x_hi / x_lo, f);
        best = std::max(best, std::pow(x, cfg_.c) * std::abs(W_fast(parity, x)));
    }
    return best;
}

AlphaSumResult KernelEvaluator::alpha_sum(const ModulusContext& ctx, int parity,
                                          double X) const {
    if (!(X >= 1.0)) throw std::domain_error("alpha_sum: X must be >= 1");
    // deterministic truncation: first power-of-two kernel argument past the
    // hump where |W| clears tol/100
    double x_stop = 16.0;
    while (std::abs(W_fast(parity, x_stop)) >= cfg_.tol / 100.0) x_stop *= 2.0;
    const auto alpha_cut =
        static_cast<std::uint64_t>(std::ceil(std::sqrt(X * x_stop))) + 1;

    KahanReal acc;
    for (std::uint64_t alpha = 1; alpha <= alpha_cut; ++alpha) {
        if (alpha % ctx.q() == 0) continue;
        const double x = static_cast<double>(alpha) * static_cast<double>(alpha) / X;
        acc.add(W_fast(parity, x) / static_cast<double>(alpha));
    }
    // tail: |W(a^2/X)| <= K (X/a^2)^c for a > cut, summed by the integral bound
    const double Kc = measured_decay_constant(parity, x_stop, 4.0 * x_stop, 20) * 1.05;
    const double c = cfg_.c;
    const double tail = Kc * std::pow(X, c) /
                        (2.0 * c * std::pow(static_cast<double>(alpha_cut), 2.0 * c));
    return {acc.value(), alpha_cut, tail, x_stop};
}

}  // namespace lmom
