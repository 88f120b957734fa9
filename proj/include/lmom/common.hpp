#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lmom {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// A requested table or enumeration exceeds the configured budget.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A computed quantity failed its own accuracy self-check.
struct accuracy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Compensated summation.  All family sums use a fixed accumulation order so
// results are bit-identical across runs and thread counts.
// ---------------------------------------------------------------------------

struct KahanReal {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

struct KahanComplex {
    KahanReal re, im;

    void add(cplx z) {
        re.add(z.real());
        im.add(z.imag());
    }
    cplx value() const { return {re.value(), im.value()}; }
};

/// Fixed-shape blocked reduction: Kahan within blocks of 1024, Kahan across
/// block sums.  The shape depends only on the length, never on thread count.
double reduce_fixed(std::span<const double> xs);
cplx reduce_fixed(std::span<const cplx> xs);

// ---------------------------------------------------------------------------
// Threading.  Work is split into fixed-size blocks indexed independently of
// the worker count; callers merge per-block results in block order.
// ---------------------------------------------------------------------------

/// Effective worker count: `requested` if nonzero, else LMOMENT_THREADS, else
/// hardware concurrency.
unsigned thread_count(unsigned requested = 0);

/// Runs fn(block_index, lo, hi) over [0,n) split into fixed blocks.  Blocks
/// are claimed dynamically but identified by index, so per-block outputs are
/// independent of scheduling.
void parallel_blocks(std::uint64_t n, std::uint64_t block_size, unsigned threads,
                     const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& fn);

inline std::size_t block_count(std::uint64_t n, std::uint64_t block_size) {
    return static_cast<std::size_t>((n + block_size - 1) / block_size);
}

}  // namespace lmom
