#include "lmom/chargroup.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lmom {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> fs;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            fs.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) fs.push_back(n);
    return fs;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // deterministic base set, exact below 3.3e24
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::uint32_t find_primitive_root(std::uint32_t q) {
    if (q < 3 || !is_prime_u64(q))
        throw std::invalid_argument("find_primitive_root: q must be an odd prime >= 3");
    const auto factors = prime_factors(q - 1);
    for (std::uint32_t g = 2; g < q; ++g) {
        bool ok = true;
        for (std::uint64_t p : factors) {
            if (powmod(g, (q - 1) / p, q) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
    throw std::logic_error("find_primitive_root: no generator found");
}

ModulusContext::ModulusContext(std::uint32_t q, std::uint64_t max_table_entries) : q_(q) {
    if (q < 3 || !is_prime_u64(q))
        throw std::invalid_argument("ModulusContext: q must be an odd prime >= 3");
    if (q > max_table_entries)
        throw resource_error("ModulusContext: q exceeds the table budget");
    g_ = find_primitive_root(q);

    dlog_.assign(q, UINT32_MAX);  // sentinel at the 0 class
    std::uint64_t val = 1;
    for (std::uint32_t e = 0; e < q - 1; ++e) {
        dlog_[static_cast<std::uint32_t>(val)] = e;
        val = (val * g_) % q;
    }

    // roots with exact conjugate symmetry: fill the lower half, mirror the rest
    const std::uint32_t n = q - 1;
    roots_.assign(n, cplx{});
    for (std::uint32_t t = 0; t <= n / 2; ++t) {
        double ang = 2.0 * kPi * static_cast<double>(t) / static_cast<double>(n);
        roots_[t] = {std::cos(ang), std::sin(ang)};
    }
    for (std::uint32_t t = n / 2 + 1; t < n; ++t) roots_[t] = std::conj(roots_[n - t]);
}

double ModulusContext::char_sum_parity(std::uint64_t a, int parity) const {
    std::uint32_t m = static_cast<std::uint32_t>(a % q_);
    if (m == 0) throw std::invalid_argument("char_sum: gcd(a, q) != 1");
    const std::uint64_t d = dlog_[m];
    const std::uint32_t n = q_ - 1;
    KahanComplex acc;
    for (std::uint32_t j = (parity == 0 ? 2u : 1u); j < n; j += 2) {
        acc.add(roots_[(j * d) % n]);
    }
    return acc.value().real();
}

double ModulusContext::char_sum_even(std::uint64_t a) const { return char_sum_parity(a, 0); }
double ModulusContext::char_sum_odd(std::uint64_t a) const { return char_sum_parity(a, 1); }

}  // namespace lmom
