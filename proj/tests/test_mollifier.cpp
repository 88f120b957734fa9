#include <doctest.h>

#include <cmath>
#include <random>

#include "lmom/mollifier.hpp"

using namespace lmom;

TEST_SUITE_BEGIN("mollifier");

TEST_CASE("e_trunc: anchors") {
    CHECK(e_trunc(2, {1.0, 0.0}).real() == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(e_trunc(0, {3.7, -1.2}) == cplx{1.0, 0.0});
    CHECK(e_trunc(7, {0.0, 0.0}) == cplx{1.0, 0.0});
}

TEST_CASE("e_trunc: tail bound |E_K(z) - e^z| <= (a e / 10)^K for |z| <= aK/10") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (double a : {0.5, 1.0}) {
        for (std::uint64_t K : {6ull, 10ull, 16ull, 24ull}) {
            for (int i = 0; i < 25; ++i) {
                const double r = a * K / 10.0 * unif(rng);
                const double th = 2.0 * kPi * unif(rng);
                const cplx z{r * std::cos(th), r * std::sin(th)};
                // tail computed forward (no cancellation): sum_{i>K} z^i/i!
                cplx term = std::pow(z, static_cast<double>(K));
                for (std::uint64_t i = 1; i <= K; ++i) term /= static_cast<double>(i);
                cplx tail{0.0, 0.0};
                for (std::uint64_t i = K + 1; i <= K + 80; ++i) {
                    term *= z / static_cast<double>(i);
                    tail += term;
                }
                CHECK(std::abs(tail) <= std::pow(a * std::exp(1.0) / 10.0,
                                                 static_cast<double>(K)) * (1.0 + 1e-12));
                // and the same bound applies to the evaluator
                CHECK(std::abs(e_trunc(K, z) - std::exp(z)) <=
                      std::pow(a * std::exp(1.0) / 10.0, static_cast<double>(K)) + 1e-13);
            }
        }
    }
}

TEST_CASE("large-argument bound |E_ell(z)| <= (12|z|/ell)^ell for |z| >= ell/10") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::uint64_t ell : {2ull, 4ull, 6ull, 10ull}) {
        for (int i = 0; i < 200; ++i) {
            const double r = ell / 10.0 * (1.0 + 10.0 * unif(rng));
            const double th = 2.0 * kPi * unif(rng);
            const cplx z{r * std::cos(th), r * std::sin(th)};
            CHECK(std::abs(e_trunc(ell, z)) <=
                  std::pow(12.0 * std::abs(z) / ell, static_cast<double>(ell)) *
                      (1.0 + 1e-12));
        }
    }
}

TEST_CASE("p_block_value: principal, empty, forced sign pattern") {
    ModulusContext ctx(103);  // q chosen so a character with chi(3)=chi(5)=-1 exists
    const std::uint32_t b35[] = {3, 5};
    const cplx principal = p_block_value(ctx, {0}, b35);
    CHECK(principal.real() ==
          doctest::Approx(1.0 / std::sqrt(3.0) + 1.0 / std::sqrt(5.0)).epsilon(1e-14));
    CHECK(p_block_value(ctx, {17}, {}) == cplx{0.0, 0.0});
    bool found = false;
    for (std::uint32_t j = 1; j < 102 && !found; ++j) {
        const cplx c3 = ctx.char_value({j}, 3), c5 = ctx.char_value({j}, 5);
        if (std::abs(c3 + 1.0) < 1e-12 && std::abs(c5 + 1.0) < 1e-12) {
            found = true;
            CHECK(p_block_value(ctx, {j}, b35).real() ==
                  doctest::Approx(-(1.0 / std::sqrt(3.0) + 1.0 / std::sqrt(5.0)))
                      .epsilon(1e-12));
        }
    }
    CHECK(found);
}

TEST_CASE("n_poly: explicit coefficients for block {3}, ell = 2") {
    const std::uint32_t b3[] = {3};
    const double k = 0.5;
    const auto poly = n_poly(b3, 2, k);
    REQUIRE(poly.terms.size() == 3);
    CHECK(poly.coeff_at(1) == doctest::Approx(1.0));
    CHECK(poly.coeff_at(3) == doctest::Approx(k));
    CHECK(poly.coeff_at(9) == doctest::Approx(k * k / 2.0));
}

TEST_CASE("n_poly evaluation equals the truncated exponential (identity)") {
    ModulusContext ctx(101);
    const std::uint32_t blk[] = {3, 5, 7, 11, 13};
    for (double alpha : {0.5, -0.5, 0.3, -0.7}) {
        const auto poly = n_poly(blk, 4, alpha);
        for (std::uint32_t j = 0; j < 100; j += 3) {
            const cplx via_poly = eval_poly(ctx, poly, {j});
            const cplx via_exp = e_trunc(4, alpha * p_block_value(ctx, {j}, blk));
            CHECK(std::abs(via_poly - via_exp) <=
                  1e-9 * std::max(1.0, std::abs(via_exp)));
        }
    }
}

TEST_CASE("coefficient boundedness: |alpha| <= 1 keeps n_poly coefficients in [-1,1]") {
    const std::uint32_t blk[] = {3, 5, 7, 11, 13};
    for (double alpha : {0.5, -0.5, 0.3, -0.7, 1.0, -1.0}) {
        const auto poly = n_poly(blk, 6, alpha);
        for (const auto& t : poly.terms) CHECK(std::abs(t.coeff) <= 1.0);
    }
    // the exact-Omega coefficients are multinomials: m!/w(n) <= m!
    for (std::uint32_t m : {2u, 6u, 10u}) {
        double m_fact = 1.0;
        for (std::uint32_t i = 2; i <= m; ++i) m_fact *= i;
        const auto poly = power_poly(blk, m);
        for (const auto& t : poly.terms) {
            CHECK(t.coeff >= 1.0);
            CHECK(t.coeff <= m_fact);  // normalized u_n = coeff/m! <= 1
        }
    }
}

TEST_CASE("n_poly: every support point satisfies b_j") {
    const auto sched = compact_custom_schedule(101, 0.5);
    const auto poly = n_poly(sched.blocks[0].primes, sched.ell[0], 0.5);
    for (const auto& t : poly.terms) CHECK(b_j(t.n, sched, 0));
    CHECK(poly.terms.size() == 38760);  // C(20,6) multisets
}

TEST_CASE("power_poly: multinomial coefficients for (chi(3)/sqrt3 + chi(5)/sqrt5)^2") {
    const std::uint32_t b35[] = {3, 5};
    const auto poly = power_poly(b35, 2);
    REQUIRE(poly.terms.size() == 3);
    CHECK(poly.coeff_at(9) == doctest::Approx(1.0));   // 2!/2!
    CHECK(poly.coeff_at(15) == doctest::Approx(2.0));  // 2!/1
    CHECK(poly.coeff_at(25) == doctest::Approx(1.0));
    // m = 1: coefficients all 1 at the primes
    const auto lin = power_poly(b35, 1);
    REQUIRE(lin.terms.size() == 2);
    CHECK(lin.coeff_at(3) == doctest::Approx(1.0));
    CHECK(lin.coeff_at(5) == doctest::Approx(1.0));
}

TEST_CASE("power_poly evaluation equals the direct complex power") {
    ModulusContext ctx(101);
    const std::uint32_t blk[] = {3, 5, 7, 11, 13};
    for (std::uint32_t m : {2u, 5u, 8u}) {
        const auto poly = power_poly(blk, m);
        for (const auto& t : poly.terms) CHECK(omega_of(t.n) == static_cast<int>(m));
        std::mt19937_64 rng(m);
        std::uniform_int_distribution<std::uint32_t> jd(1, 99);
        for (int i = 0; i < 20; ++i) {
            const CharacterId id{jd(rng)};
            const cplx direct = std::pow(p_block_value(ctx, id, blk),
                                         static_cast<double>(m));
            const cplx via_poly = eval_poly(ctx, poly, id);
            CHECK(std::abs(via_poly - direct) <=
                  1e-8 * std::max(1.0, std::abs(direct)));
        }
    }
    CHECK_THROWS_AS(power_poly(blk, 19), resource_error);
}

TEST_CASE("q_term: anchors and the complex-route A/B agreement") {
    CHECK(q_term(0.0, 6, 0.5, 4) == 0.0);
    // base exactly 1: |P| = ell/(12 max(1,k^2))
    CHECK(q_term(6.0 / 12.0, 6, 0.5, 4) == doctest::Approx(1.0));
    CHECK(q_term(4.0 / (12.0 * 4.0), 4, 2.0, 2) == doctest::Approx(1.0));
    // |Q_j| >= 1 once |P_j| >= ell_j/10 (0 < k < 1)
    for (double p : {0.6, 0.8, 1.5, 3.0}) CHECK(q_term(p, 6, 0.5, 4) >= 1.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const cplx p{unif(rng), unif(rng)};
        const double a = q_term(std::abs(p), 6, 0.5, 4);
        const double b = q_term_complex_route(p, 6, 0.5, 4);
        CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
}

TEST_CASE("product polynomial equals the coprime convolution (2-block)") {
    ModulusContext ctx(1009);
    const auto sched = [&] {
        CustomBlockSpec spec;
        spec.ell = {4, 2};
        spec.bounds = {{2.0, 12.0}, {12.0, 20.0}};
        return build_schedule_custom(1009, 0.5, spec);
    }();
    std::vector<DirichletPoly> parts;
    for (std::size_t b = 0; b < sched.R(); ++b)
        parts.push_back(n_poly(sched.blocks[b].primes, sched.ell[b], 0.5));
    const auto product = convolve_coprime(parts);
    // brute-force check: coefficient at n = n1*n2 is the product of parts
    for (const auto& t1 : parts[0].terms)
        for (const auto& t2 : parts[1].terms)
            CHECK(product.coeff_at(t1.n * t2.n) ==
                  doctest::Approx(t1.coeff * t2.coeff).epsilon(1e-12));
    // and evaluation multiplies
    const auto fm = FamilyMollifier::build(ctx, sched);
    for (std::uint32_t j : {1u, 5u, 444u}) {
        const cplx direct = eval_poly(ctx, product, {j});
        const cplx analytic = fm.n_total(j, 0.5);
        CHECK(std::abs(direct - analytic) <= 1e-9 * std::max(1.0, std::abs(analytic)));
    }
}

TEST_CASE("FamilyMollifier: n/q values, conjugation, empty schedule") {
    ModulusContext ctx(101);
    const auto sched = compact_custom_schedule(101, 0.5);
    const auto fm = FamilyMollifier::build(ctx, sched);
    for (std::uint32_t j = 1; j < 100; ++j) {
        // N(conj chi, alpha) = conj N(chi, alpha)
        CHECK(std::abs(fm.n_total(100 - j, 0.5) - std::conj(fm.n_total(j, 0.5))) < 1e-9);
        CHECK(fm.q_j(0, j, 0.5) >= 0.0);
        CHECK(fm.q_j(sched.R(), j, 0.5) == 1.0);  // Q_{R+1} = 1
    }
    // alpha = 0 -> N = 1
    CHECK(std::abs(fm.n_total(17, 0.0) - cplx{1.0, 0.0}) < 1e-15);

    CustomBlockSpec empty;
    const auto sched0 = build_schedule_custom(101, 0.5, empty);
    const auto fm0 = FamilyMollifier::build(ctx, sched0);
    CHECK(fm0.n_total(3, 0.5) == cplx{1.0, 0.0});      // empty product
    CHECK(fm0.s_sum(3, 0.5, 0.5) == doctest::Approx(1.0));  // single v=0 term, Q_1=Q_{R+1}=1
}

TEST_CASE("pointwise checks: small branch exact zero at P=0, branches consistent") {
    ModulusContext ctx(101);
    const auto sched = compact_custom_schedule(101, 0.5);
    const auto fm = FamilyMollifier::build(ctx, sched);
    int large_seen = 0;
    for (std::uint32_t j = 1; j < 100; ++j) {
        const auto rep = pointwise_lemma_checks(fm, j, 0.5);
        CHECK(rep.hard_ok);
        for (const auto& b : rep.blocks) {
            if (b.small_branch) {
                CHECK(b.ratio_vs_nsq <= 10.0 * std::exp(-static_cast<double>(
                                                  sched.ell[b.block])));
            } else {
                ++large_seen;
                CHECK(b.large_bound_ok);
                CHECK(b.q_dominates_ok);
            }
        }
    }
    CHECK(large_seen > 50);  // the compact schedule genuinely exercises the branch
}

TEST_CASE("pointwise checks: P = 0 sits on the small branch with ratio exactly 0") {
    ModulusContext ctx(101);
    CustomBlockSpec spec;
    spec.ell = {4};
    spec.bounds = {{24.0, 28.0}};  // no primes in (24, 28]: P_1(chi) = 0 exactly
    const auto sched = build_schedule_custom(101, 0.5, spec);
    REQUIRE(sched.blocks[0].primes.empty());
    const auto fm = FamilyMollifier::build(ctx, sched);
    for (std::uint32_t j : {1u, 7u, 50u}) {
        const auto rep = pointwise_lemma_checks(fm, j, 0.5);
        REQUIRE(rep.blocks.size() == 1);
        CHECK(rep.blocks[0].small_branch);
        CHECK(rep.blocks[0].ratio_vs_exp == 0.0);  // both sides exactly 1
        CHECK(rep.blocks[0].ratio_vs_nsq == 0.0);
        CHECK(rep.blocks[0].lemma32_margin == 0.0);
    }
}

TEST_CASE("pointwise checks: small-branch constant measured at ell = (8,6)") {
    ModulusContext ctx(101);
    CustomBlockSpec spec;
    spec.ell = {8, 6};
    spec.bounds = {{0.0, 50.0}, {50.0, 200.0}};
    const auto sched = build_schedule_custom(101, 0.5, spec);
    const auto fm = FamilyMollifier::build(ctx, sched);
    double measured_c = 0.0;
    for (std::uint32_t j = 1; j < 100; ++j) {
        const auto rep = pointwise_lemma_checks(fm, j, 0.5);
        for (const auto& b : rep.blocks) {
            if (!b.small_branch) continue;
            const double scale = std::exp(-static_cast<double>(sched.ell[b.block]));
            measured_c = std::max(measured_c,
                                  std::max(b.ratio_vs_nsq, b.ratio_vs_exp) / scale);
        }
    }
    CHECK(measured_c > 0.0);
    CHECK(measured_c <= 2.0);  // measured ~5e-3; the proof constant is unspecified
}

TEST_CASE("pointwise checks: k > 1 uses the ell/(10k) threshold") {
    ModulusContext ctx(101);
    const auto sched = compact_custom_schedule(101, 2.0);
    const auto fm = FamilyMollifier::build(ctx, sched);
    for (std::uint32_t j = 1; j < 100; ++j) {
        const auto rep = pointwise_lemma_checks(fm, j, 2.0);
        CHECK(rep.hard_ok);
        for (const auto& b : rep.blocks)
            CHECK(b.threshold ==
                  doctest::Approx(sched.ell[b.block] / 20.0).epsilon(1e-14));
    }
}

TEST_SUITE_END();
