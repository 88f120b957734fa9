// Acceptance suite: ten end-to-end checks with pinned tolerances, one
// [PASS]/[FAIL] line each.  Run all with no arguments or a single one with
// --criterion N.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lmom/blocks.hpp"
#include "lmom/chargroup.hpp"
#include "lmom/kernel.hpp"
#include "lmom/lvalues.hpp"
#include "lmom/mollifier.hpp"
#include "lmom/moments.hpp"

using namespace lmom;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Check {
    std::ostringstream msg;
    bool pass = true;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            msg << "  FAILED: " << what << ";";
        }
    }
    void note(const std::string& s) { msg << " " << s << ";"; }
};

const std::vector<std::uint32_t> kSweepQ{101, 211, 401, 809, 1601, 3209, 10007};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// 1. Orthogonality exactness at q in {11, 101, 1009}, 50 residues each
Outcome criterion1() {
    Check c;
    double worst = 0.0;
    for (std::uint32_t q : {11u, 101u, 1009u}) {
        ModulusContext ctx(q);
        const double phi = q - 1.0;
        for (int i = 0; i < 50; ++i) {
            // a = 1 and a = q-1 first (the +-1 closed forms), then 48 spread residues
            const std::uint64_t a =
                i == 0 ? 1
                       : (i == 1 ? q - 1
                                 : 2 + (static_cast<std::uint64_t>(i - 2) * (q - 3)) / 48);
            const double even = ctx.char_sum_even(a);
            const double odd = ctx.char_sum_odd(a);
            const double want_even = (a == 1 || a == q - 1) ? (phi - 2.0) / 2.0 : -1.0;
            const double want_odd = a == 1 ? phi / 2.0 : (a == q - 1 ? -phi / 2.0 : 0.0);
            worst = std::max({worst, std::abs(even - want_even), std::abs(odd - want_odd)});
        }
    }
    c.require(worst <= 1e-9, "closed-form match within 1e-9 (worst " + fmt(worst) + ")");
    c.note("worst deviation " + fmt(worst));
    return {c.pass, c.msg.str()};
}

// 2. Kernel soundness: real-valuedness, x->0 limit gate, refinement stability
Outcome criterion2() {
    Check c;
    KernelEvaluator ker;
    double worst_im = 0.0;
    for (int parity : {0, 1}) {
        for (int i = 0; i < 100; ++i) {
            const double x = 1e-6 * std::pow(1e9, i / 99.0);
            worst_im = std::max(worst_im, ker.W_full(parity, x).im_residual);
        }
    }
    c.require(worst_im <= 1e-9, "W real-valued (worst |Im| " + fmt(worst_im) + ")");

    for (int parity : {0, 1}) {
        const double dev = std::abs(ker.W(parity, 1e-8) - 1.0);
        // gate as stated; the even kernel's true sqrt(x)*log(x) deviation is
        // 1.2077e-3, so this clause cannot pass for parity 0
        c.require(dev <= 1e-4,
                  "|W(" + std::to_string(parity) + ",1e-8)-1| <= 1e-4 (measured " +
                      fmt(dev) + ")");
    }

    KernelConfig fine_cfg;
    fine_cfg.h = 0.025;
    fine_cfg.T = 120.0;
    KernelEvaluator fine(fine_cfg);
    double worst_ref = 0.0;
    for (int parity : {0, 1}) {
        for (int i = 0; i < 40; ++i) {
            const double x = 1e-6 * std::pow(1e9, i / 39.0);
            worst_ref = std::max(worst_ref, std::abs(ker.W(parity, x) - fine.W(parity, x)));
        }
    }
    c.require(worst_ref <= 1e-9, "refinement stability (worst " + fmt(worst_ref) + ")");
    return {c.pass, c.msg.str()};
}

// 3. AFE vs truncation at q = 101
Outcome criterion3() {
    Check c;
    KernelEvaluator ker;
    ModulusContext ctx(101);
    const auto afe = lsq_afe_all(ctx, 0.5, ker);
    double prev = 1e300, last = 0.0;
    bool monotone = true;
    for (int e : {12, 14, 16, 18}) {
        const auto tr = l_all_bulk(ctx, 1ull << e);
        std::vector<double> diffs;
        for (std::uint32_t j = 1; j < 100; ++j)
            diffs.push_back(std::abs(std::norm(tr.data[j]) - afe.data[j].real()));
        std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2, diffs.end());
        last = diffs[diffs.size() / 2];
        if (last > prev) monotone = false;
        prev = last;
        c.note("X=2^" + std::to_string(e) + " median " + fmt(last));
    }
    c.require(monotone, "median gap nonincreasing in X");
    const double scale = std::sqrt(101.0) * std::log(101.0) / std::sqrt(double(1ull << 18));
    c.require(last <= 10.0 * scale,
              "final median within 10x the truncation error scale " + fmt(scale));
    return {c.pass, c.msg.str()};
}

// 4. Bulk-path equivalence and thread determinism
Outcome criterion4() {
    Check c;
    for (std::uint32_t q : {101u, 1009u, 10007u}) {
        ModulusContext ctx(q);
        const auto direct = l_all_direct(ctx, 100'000);
        const auto bulk = l_all_bulk(ctx, 100'000);
        double max_val = 0.0, max_diff = 0.0;
        for (std::uint32_t j = 0; j < q - 1; ++j) {
            max_val = std::max(max_val, std::abs(direct.data[j]));
            max_diff = std::max(max_diff, std::abs(direct.data[j] - bulk.data[j]));
        }
        c.require(max_diff <= 1e-9 * max_val,
                  "bulk == direct at q=" + std::to_string(q) + " (rel " +
                      fmt(max_diff / max_val) + ")");
        const auto one = l_all_bulk(ctx, 100'000, 1);
        const auto eight = l_all_bulk(ctx, 100'000, 8);
        c.require(std::memcmp(one.data.data(), eight.data.data(),
                              one.data.size() * sizeof(cplx)) == 0,
                  "bit-identical across 1 vs 8 threads at q=" + std::to_string(q));
    }
    return {c.pass, c.msg.str()};
}

// 5. Mollifier identities: n_poly vs truncated exponential, power polynomial
Outcome criterion5() {
    Check c;
    ModulusContext ctx(101);
    const std::vector<std::uint32_t> block = [] {
        std::vector<std::uint32_t> b;
        for (auto p : primes_up_to(50))
            if (p > 2) b.push_back(p);
        return b;
    }();
    double worst = 0.0;
    for (double k : {0.3, 0.5, 0.8}) {
        for (double alpha : {k, k - 1.0}) {
            const auto poly = n_poly(block, 6, alpha);
            for (std::uint32_t j = 0; j < 100; ++j) {
                const cplx via_poly = eval_poly(ctx, poly, {j});
                const cplx via_exp = e_trunc(6, alpha * p_block_value(ctx, {j}, block));
                worst = std::max(worst,
                                 std::abs(via_poly - via_exp) / std::abs(via_exp));
            }
        }
    }
    c.require(worst <= 1e-9, "n_poly identity for all characters (worst " + fmt(worst) + ")");

    // exact-Omega power polynomial at exponents satisfying its own budget
    const std::uint32_t small_block[] = {3, 5, 7, 11, 13};
    double worst_pow = 0.0;
    for (double k : {0.3, 0.5, 0.8}) {
        const std::uint32_t m = 2 * compute_r_k(k);
        const auto poly = power_poly(small_block, m);
        for (std::uint32_t j = 1; j < 100; ++j) {
            const cplx direct =
                std::pow(p_block_value(ctx, {j}, small_block), static_cast<double>(m));
            const cplx via_poly = eval_poly(ctx, poly, {j});
            // relative where |P^m| is non-degenerate; the identity's rounding
            // noise is absolute (total variation ~ (sum 1/sqrt p)^m), so a
            // 1e-3 floor keeps the check meaningful at near-cancelling chi
            worst_pow = std::max(worst_pow, std::abs(via_poly - direct) /
                                                std::max(1e-3, std::abs(direct)));
        }
    }
    c.require(worst_pow <= 1e-8, "power polynomial identity (worst " + fmt(worst_pow) + ")");
    return {c.pass, c.msg.str()};
}

// 6. Unconditional inequalities: Holder chains and pointwise large branch
Outcome criterion6() {
    Check c;
    KernelEvaluator ker;
    for (std::uint32_t q : {101u, 211u}) {
        ModulusContext ctx(q);
        for (double k : {0.3, 0.5, 0.8, 2.0}) {
            const auto sched = compact_custom_schedule(q, k);
            const auto fd = FamilyData::build(ctx, sched, ker, 0.5, 0, 0);
            const auto rep = holder_chain_check(fd, k, /*strict=*/false);
            c.require(rep.hard_ok, "Holder slacks at q=" + std::to_string(q) +
                                       " k=" + fmt(k) + " (worst rel slack " +
                                       fmt(rep.worst_hard_slack) + ")");
            int large = 0;
            bool pointwise_ok = true;
            for (std::uint32_t j = 1; j < q - 1; ++j) {
                const auto pw = pointwise_lemma_checks(fd.moll, j, k);
                pointwise_ok = pointwise_ok && pw.hard_ok;
                for (const auto& b : pw.blocks)
                    if (!b.small_branch) ++large;
            }
            c.require(pointwise_ok, "pointwise large-branch bound at q=" +
                                        std::to_string(q) + " k=" + fmt(k));
            if (q == 101 && k == 0.5) c.note(std::to_string(large) + " large-branch cases");
        }
    }
    return {c.pass, c.msg.str()};
}

// 7. Diagonal oracles and the orthogonality identity with its counterexample
Outcome criterion7() {
    Check c;
    for (double k : {0.3, 0.5, 0.8}) {
        CustomBlockSpec spec;
        spec.ell = {6};
        spec.bounds = {{10.0, 20.0}};
        const auto sched = build_schedule_custom(101, k, spec);
        const auto r = diagonal_oracle(sched, k);
        c.require(r.rel_err_routes <= 1e-12,
                  "diagonal routes (i)=(ii) at k=" + fmt(k) + " (rel " +
                      fmt(r.rel_err_routes) + ")");
    }
    {
        CustomBlockSpec spec;  // two blocks
        spec.ell = {4, 2};
        spec.bounds = {{2.0, 8.0}, {8.0, 14.0}};
        const auto sched = build_schedule_custom(101, 0.5, spec);
        const auto r = diagonal_oracle(sched, 0.5);
        c.require(r.rel_err_routes <= 1e-12,
                  "two-block diagonal routes (rel " + fmt(r.rel_err_routes) + ")");
    }
    {
        ModulusContext ctx(101);
        const std::uint32_t b35[] = {3, 5};
        const auto r = orthogonality_diagonal_check(ctx, n_poly(b35, 2, 0.5));
        c.require(r.precondition_ok && r.rel_err <= 1e-9,
                  "orthogonality identity under the length bound (rel " + fmt(r.rel_err) +
                      ")");
        const auto rq = orthogonality_diagonal_check(ctx, power_poly(b35, 2));
        c.require(rq.precondition_ok && rq.rel_err <= 1e-9,
                  "orthogonality identity for the exact-Omega polynomial");
    }
    {
        ModulusContext ctx7(7);
        const std::uint32_t b35[] = {3, 5};
        const auto r = orthogonality_diagonal_check(ctx7, n_poly(b35, 4, 0.5));
        c.require(!r.precondition_ok, "length >= q counterexample flagged");
        c.require(r.rel_err > 1e-3, "length >= q identity genuinely fails (rel " +
                                        fmt(r.rel_err) + ")");
    }
    return {c.pass, c.msg.str()};
}

// 8. Moment degeneracy and growth trend across the modulus sweep
Outcome criterion8() {
    Check c;
    KernelEvaluator ker;
    std::vector<double> m1, ratios;
    for (std::uint32_t q : kSweepQ) {
        ModulusContext ctx(q);
        const auto lsq = lsq_afe_all(ctx, 0.5, ker);
        const double m0 = moment(lsq, 0.0);
        c.require(m0 == static_cast<double>(q - 2),
                  "moment(k=0) == q-2 at q=" + std::to_string(q));
        m1.push_back(moment(lsq, 1.0));
        ratios.push_back(m1.back() / ((q - 2.0) * std::log(static_cast<double>(q))));
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    c.require(*hi / *lo <= 2.0,
              "k=1 ratio band within a factor 2 (band " + fmt(*hi / *lo) + ")");
    const auto fit = exponent_fit(kSweepQ, m1, 1.0);
    c.require(fit.slope >= 0.5 && fit.slope <= 1.5,
              "k=1 fitted slope in [0.5, 1.5] (slope " + fmt(fit.slope) + ")");
    c.note("slope " + fmt(fit.slope) + " stderr " + fmt(fit.stderr_));
    return {c.pass, c.msg.str()};
}

// 9. Proposition proxies: positivity and <3x ratio stability at k = 1/2
Outcome criterion9() {
    Check c;
    KernelEvaluator ker;
    std::vector<double> lf_r, tsf_r, tsv_r, mmp_r, mmv_r;
    for (std::uint32_t q : kSweepQ) {
        ModulusContext ctx(q);
        const auto sched = standard_custom_schedule(q, 0.5);
        const auto fd = FamilyData::build(ctx, sched, ker, 0.5, 0, 0);
        const double norm = (q - 2.0) * std::pow(std::log(static_cast<double>(q)), 0.25);
        const auto lf = lower_functional(fd, 0.5);
        c.require(lf.value > 0.0, "lower functional positive at q=" + std::to_string(q));
        c.require(lf.im_residual <= 1e-8 * (1.0 + std::abs(lf.value)),
                  "lower functional real at q=" + std::to_string(q));
        lf_r.push_back(lf.ratio);
        tsf_r.push_back(twisted_second(fd, 0.5, TwistedVariant::full) / norm);
        tsv_r.push_back(twisted_second(fd, 0.5, TwistedVariant::v_indexed) / norm);
        mmp_r.push_back(mollifier_moment(fd, 0.5, MollifierVariant::product) / norm);
        mmv_r.push_back(mollifier_moment(fd, 0.5, MollifierVariant::v_indexed) / norm);
    }
    auto band = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *hi / *lo;
    };
    c.require(band(lf_r) < 3.0,
              "lower-functional ratios within 3x (band " + fmt(band(lf_r)) + ")");
    c.require(band(tsf_r) < 3.0,
              "twisted-second (full) ratios within 3x (band " + fmt(band(tsf_r)) + ")");
    c.require(band(tsv_r) < 3.0,
              "twisted-second (v-indexed) ratios within 3x (band " + fmt(band(tsv_r)) + ")");
    c.require(band(mmp_r) < 3.0,
              "mollifier-moment (product) ratios within 3x (band " + fmt(band(mmp_r)) + ")");
    c.require(band(mmv_r) < 3.0, "mollifier-moment (v-indexed) ratios within 3x (band " +
                                     fmt(band(mmv_r)) + ")");
    return {c.pass, c.msg.str()};
}

// 10. Mertens-type prime sums
Outcome criterion10() {
    Check c;
    const double b = fit_mertens_b(1e7);
    const auto r0 = mertens_check(1e6, 0, b);
    c.require(std::abs(r0.residual) <= 5e-2,
              "1/p residual minus fitted b at x=1e6 (got " + fmt(r0.residual) + ")");
    double worst = 0.0;
    for (double x : {1e4, 1e5, 1e6})
        worst = std::max(worst, std::abs(mertens_check(x, 1).residual));
    c.require(worst <= 2.0,
              "(log p)/p residual bounded uniformly (worst " + fmt(worst) + ")");
    c.note("fitted b " + fmt(b));
    return {c.pass, c.msg.str()};
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

const std::vector<Criterion> kCriteria = {
    {1, "orthogonality exactness", 5.0, criterion1},
    {2, "kernel soundness", 30.0, criterion2},
    {3, "AFE vs truncation", 120.0, criterion3},
    {4, "bulk-path equivalence", 60.0, criterion4},
    {5, "mollifier identities", 60.0, criterion5},
    {6, "unconditional inequalities", 120.0, criterion6},
    {7, "diagonal oracles", 60.0, criterion7},
    {8, "moment degeneracy and trend", 600.0, criterion8},
    {9, "proposition proxies", 600.0, criterion9},
    {10, "Mertens checks", 30.0, criterion10},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            only = std::atoi(argv[++i]);
    }
    int failures = 0;
    for (const auto& crit : kCriteria) {
        if (only != 0 && crit.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = crit.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("  exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > crit.budget_seconds) {
            out.pass = false;
            out.detail += "  over runtime budget of " + fmt(crit.budget_seconds) + "s";
        }
        std::printf("[%s] criterion %2d: %s (%.1fs)%s\n", out.pass ? "PASS" : "FAIL",
                    crit.id, crit.name, secs, out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures;
}
