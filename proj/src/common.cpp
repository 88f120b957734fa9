#include "lmom/common.hpp"

#include <atomic>
#include <cstdlib>

namespace lmom {

namespace {
constexpr std::size_t kReduceBlock = 1024;
}

double reduce_fixed(std::span<const double> xs) {
    KahanReal outer;
    for (std::size_t lo = 0; lo < xs.size(); lo += kReduceBlock) {
        std::size_t hi = std::min(xs.size(), lo + kReduceBlock);
        KahanReal inner;
        for (std::size_t i = lo; i < hi; ++i) inner.add(xs[i]);
        outer.add(inner.value());
    }
    return outer.value();
}

cplx reduce_fixed(std::span<const cplx> xs) {
    KahanComplex outer;
    for (std::size_t lo = 0; lo < xs.size(); lo += kReduceBlock) {
        std::size_t hi = std::min(xs.size(), lo + kReduceBlock);
        KahanComplex inner;
        for (std::size_t i = lo; i < hi; ++i) inner.add(xs[i]);
        outer.add(inner.value());
    }
    return outer.value();
}

unsigned thread_count(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LMOMENT_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void parallel_blocks(std::uint64_t n, std::uint64_t block_size, unsigned threads,
                     const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& fn) {
    if (n == 0) return;
    std::size_t nblocks = block_count(n, block_size);
    unsigned nworkers = std::min<unsigned>(thread_count(threads),
                                     static_cast<unsigned>(nblocks));
    if (nworkers <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) {
            std::uint64_t lo = b * block_size;
            fn(b, lo, std::min(n, lo + block_size));
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t b = next.fetch_add(1);
            if (b >= nblocks) return;
            std::uint64_t lo = b * block_size;
            fn(b, lo, std::min(n, lo + block_size));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (unsigned t = 0; t < nworkers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace lmom
