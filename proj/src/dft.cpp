#include "lmom/dft.hpp"

#include <cmath>

namespace lmom {

std::vector<cplx> dft_roots(std::size_t n, int sign) {
    std::vector<cplx> roots(n);
    for (std::size_t t = 0; t <= n / 2; ++t) {
        double ang = 2.0 * kPi * static_cast<double>(t) / static_cast<double>(n);
        roots[t] = {std::cos(ang), sign >= 0 ? std::sin(ang) : -std::sin(ang)};
    }
    for (std::size_t t = n / 2 + 1; t < n; ++t) roots[t] = std::conj(roots[n - t]);
    return roots;
}

namespace {

std::size_t smallest_prime_factor(std::size_t n) {
    if (n % 2 == 0) return 2;
    for (std::size_t p = 3; p * p <= n; p += 2)
        if (n % p == 0) return p;
    return n;
}

// Transform of length n = a.size(); root_stride = N/n where N is the
// top-level length of `roots`.
std::vector<cplx> dft_rec(const std::vector<cplx>& a, std::size_t root_stride,
                          const std::vector<cplx>& roots) {
    const std::size_t n = a.size();
    if (n == 1) return a;
    const std::size_t N = roots.size();
    const std::size_t p = smallest_prime_factor(n);
    const std::size_t m = n / p;

    std::vector<std::vector<cplx>> subs(p);
    for (std::size_t r = 0; r < p; ++r) {
        std::vector<cplx> part(m);
        for (std::size_t i = 0; i < m; ++i) part[i] = a[i * p + r];
        subs[r] = dft_rec(part, root_stride * p, roots);
    }

    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc{0.0, 0.0};
        const std::size_t km = k % m;
        for (std::size_t r = 0; r < p; ++r) {
            std::size_t idx = ((root_stride * r) % N) * k % N;
            acc += roots[idx] * subs[r][km];
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace

std::vector<cplx> dft(const std::vector<cplx>& a, int sign) {
    if (a.empty()) return {};
    auto roots = dft_roots(a.size(), sign);
    return dft_rec(a, 1, roots);
}

}  // namespace lmom
