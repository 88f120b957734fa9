#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "lmom/chargroup.hpp"
#include "lmom/common.hpp"

namespace lmom {

/// Principal-branch complex log-gamma (Lanczos, reflection for Re z < 1/2).
/// Throws std::domain_error at the poles.
cplx log_gamma(cplx z);

/// Quadrature parameters for the Mellin integral of the smoothing kernel.
struct KernelConfig {
    double c = 2.0;     // contour abscissa used for x >= 1 (and decay checks)
    double h = 0.05;    // step along the imaginary direction
    double T = 60.0;    // truncation height
    double tol = 1e-10; // target absolute accuracy

    void validate() const;
};

struct WResult {
    double value = 0.0;        // real part of the contour integral
    double im_residual = 0.0;  // |imaginary part| of the raw two-sided sum
    double abscissa = 0.0;     // line actually used
};

struct AlphaSumResult {
    double value = 0.0;
    std::uint64_t alpha_cut = 0;  // deterministic truncation point
    double tail_bound = 0.0;      // certified bound on the discarded tail
    double x_stop = 0.0;          // kernel-argument threshold behind alpha_cut
};

/// Evaluator for W_a(x) = (1/2 pi i) int_(c) G_a(s) x^{-s} ds/s with
/// G_a(s) = Gamma(1/4+(s+a)/2)^2 / Gamma(1/4+a/2)^2, a in {0,1}.
///
/// Two paths share the same trapezoidal rule on the same line:
///  * W_full: every node evaluated independently on both half-lines; the
///    imaginary part of the raw sum is measured and must clear 1e-9.
///  * W_fast: gamma factors cached per node, folded half-line sum driven by a
///    root-of-unity recurrence.  Used for bulk tables and memoized lookups.
///
/// For x < 1 the line Re(s)=min(c, 1/4) is used instead of c: the integral is
/// abscissa-independent there, and small abscissae avoid the x^{-c}
/// cancellation blow-up.
class KernelEvaluator {
  public:
    explicit KernelEvaluator(KernelConfig cfg = {});

    const KernelConfig& config() const { return cfg_; }

    /// Honest per-call evaluation with diagnostics.  Throws accuracy_error if
    /// the imaginary residual exceeds 1e-9, std::domain_error for x <= 0.
    WResult W_full(int parity, double x) const;

    /// Value of W_full without diagnostics.
    double W(int parity, double x) const { return W_full(parity, x).value; }

    /// Node-cached evaluation, memoized on (parity, x rounded to ~1e-14
    /// relative).
    double W_fast(int parity, double x) const;

    /// W_fast(parity, scale*d) for d = 1..dmax, built in parallel.
    std::vector<double> W_table(int parity, double scale, std::uint64_t dmax,
                                unsigned threads = 0) const;

    /// Measured decay constant sup x^c |W(parity,x)| over a log grid of
    /// [x_lo, x_hi].
    double measured_decay_constant(int parity, double x_lo, double x_hi,
                                   int grid_points = 80) const;

    /// Sum over alpha >= 1, gcd(alpha, q) = 1 of W_parity(alpha^2/X)/alpha,
    /// truncated once the kernel argument passes a recorded threshold where
    /// |W| < tol/100.
    AlphaSumResult alpha_sum(const ModulusContext& ctx, int parity, double X) const;

  private:
    struct NodeSet {
        double abscissa = 0.0;
        std::vector<cplx> g;  // (h/2pi) G_a(c+imh)/(c+imh), m = 0..M
    };
    const NodeSet& nodes(int parity, double abscissa) const;
    double abscissa_for(double x) const { return x < 1.0 ? std::min(cfg_.c, 0.25) : cfg_.c; }

    KernelConfig cfg_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<int, std::int64_t>, std::unique_ptr<NodeSet>> node_cache_;
    mutable std::unordered_map<std::uint64_t, double> memo_;
};

}  // namespace lmom
