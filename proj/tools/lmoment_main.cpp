// lmoment: compute and verify central-value moment experiments for Dirichlet
// L-functions to a prime modulus.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmom/blocks.hpp"
#include "lmom/chargroup.hpp"
#include "lmom/kernel.hpp"
#include "lmom/lvalues.hpp"
#include "lmom/mollifier.hpp"
#include "lmom/moments.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

lmom::BlockSchedule schedule_from_option(std::uint32_t q, double k,
                                         const std::string& name) {
    if (name.empty() || name == "standard") return lmom::standard_custom_schedule(q, k);
    if (name == "compact") return lmom::compact_custom_schedule(q, k);
    if (name == "none") {
        lmom::CustomBlockSpec empty;
        return lmom::build_schedule_custom(q, k, empty);
    }
    std::ifstream in(name);
    if (!in) throw std::invalid_argument("cannot read schedule file: " + name);
    lmom::CustomBlockSpec cs;
    try {
        json spec = json::parse(in);
        for (const auto& e : spec.at("ell")) cs.ell.push_back(e.get<std::uint64_t>());
        for (const auto& b : spec.at("blocks"))
            cs.bounds.emplace_back(b.at("lo").get<double>(), b.at("hi").get<double>());
        if (spec.contains("N")) cs.N = spec["N"].get<std::uint32_t>();
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed schedule file " + name + ": " + e.what());
    }
    return lmom::build_schedule_custom(q, k, cs);
}

json schedule_to_json(const lmom::BlockSchedule& s) {
    json j;
    j["q"] = s.q;
    j["k"] = s.k;
    j["mode"] = s.paper_mode ? "paper" : "custom";
    j["N"] = s.N;
    j["M"] = s.M;
    j["r_k"] = s.r_k;
    j["ell"] = s.ell;
    j["sum_inv_ell"] = s.sum_inv_ell;
    j["blocks"] = json::array();
    for (const auto& b : s.blocks) {
        json jb;
        jb["lo"] = b.lo;
        jb["hi"] = b.hi;
        jb["size"] = b.primes.size();
        if (!b.primes.empty()) {
            jb["min_p"] = b.primes.front();
            jb["max_p"] = b.primes.back();
        }
        j["blocks"].push_back(jb);
    }
    j["flags"] = {{"ell_square_decreasing", s.flags.ell_square_decreasing},
                  {"ell_R_above_threshold", s.flags.ell_R_above_threshold},
                  {"sum_inv_ell_ok", s.flags.sum_inv_ell_ok},
                  {"exponent_budget_ok", s.flags.exponent_budget_ok},
                  {"blocks_nonempty", s.flags.blocks_nonempty},
                  {"sum_inv_p_ok", s.flags.sum_inv_p_ok},
                  {"all", s.flags.all()}};
    return j;
}

struct MomentsRow {
    std::uint32_t q = 0;
    double k = 0.0;
    double moment_2k = 0.0, ratio = 0.0;
    // fields stay NaN when the operation is undefined at this k
    double lower_functional = NAN, lf_ratio = NAN;
    double ts_full = NAN, ts_vindexed = NAN;
    double mm_product = NAN, mm_vindexed = NAN;
    double worst_holder_slack = NAN;
    bool hard_ok = true;
};

MomentsRow compute_moments_row(const lmom::ModulusContext& ctx,
                               const lmom::BlockSchedule& sched,
                               const lmom::KernelEvaluator& kernel, double k, double delta,
                               std::uint64_t X, unsigned threads) {
    auto fd = lmom::FamilyData::build(ctx, sched, kernel, delta, X, threads);
    MomentsRow row;
    row.q = ctx.q();
    row.k = k;
    row.moment_2k = lmom::moment(fd.lsq, k);
    const double norm = (ctx.q() - 2.0) *
                        std::pow(std::log(static_cast<double>(ctx.q())), k * k);
    row.ratio = row.moment_2k / norm;
    if (k > 0.0 && k != 1.0) {
        auto lf = lmom::lower_functional(fd, k);
        row.lower_functional = lf.value;
        row.lf_ratio = lf.ratio;
        if (k < 1.0) {
            row.ts_full = lmom::twisted_second(fd, k, lmom::TwistedVariant::full);
            row.ts_vindexed = lmom::twisted_second(fd, k, lmom::TwistedVariant::v_indexed);
        }
        row.mm_product = lmom::mollifier_moment(fd, k, lmom::MollifierVariant::product);
        row.mm_vindexed = lmom::mollifier_moment(fd, k, lmom::MollifierVariant::v_indexed);
        auto holder = lmom::holder_chain_check(fd, k, /*strict=*/false);
        row.worst_holder_slack = holder.worst_hard_slack;
        row.hard_ok = holder.hard_ok;
    }
    return row;
}

std::string moments_csv_header() {
    return "q,k,moment_2k,ratio,lower_functional,lf_ratio,ts_full,ts_vindexed,"
           "mm_product,mm_vindexed,worst_holder_slack\n";
}

std::string moments_csv_row(const MomentsRow& r) {
    std::ostringstream os;
    os << r.q << ',' << num(r.k) << ',' << num(r.moment_2k) << ',' << num(r.ratio) << ','
       << num(r.lower_functional) << ',' << num(r.lf_ratio) << ',' << num(r.ts_full) << ','
       << num(r.ts_vindexed) << ',' << num(r.mm_product) << ',' << num(r.mm_vindexed) << ','
       << num(r.worst_holder_slack) << '\n';
    return os.str();
}

int run_cli(int argc, char** argv) {
    CLI::App app{"moments of Dirichlet L-functions at the central point"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = LMOMENT_THREADS or all cores)");

    // ---- schedule -----------------------------------------------------------
    auto* sc = app.add_subcommand("schedule", "block schedule and validity flags");
    std::uint32_t sc_q = 101;
    double sc_k = 0.5;
    std::uint32_t sc_N = 3, sc_M = 1;
    std::string sc_mode = "paper", sc_file, sc_out;
    sc->add_option("--q", sc_q)->required();
    sc->add_option("--k", sc_k)->required();
    sc->add_option("--N", sc_N);
    sc->add_option("--M", sc_M);
    sc->add_option("--mode", sc_mode)->check(CLI::IsMember({"paper", "custom", "standard"}));
    sc->add_option("--custom-file", sc_file);
    sc->add_option("--out", sc_out);

    // ---- lvalues ------------------------------------------------------------
    auto* lv = app.add_subcommand("lvalues", "central values across the family");
    std::uint32_t lv_q = 101;
    std::uint64_t lv_X = 100000;
    double lv_delta = 0.5;
    std::string lv_method = "truncated", lv_out;
    lv->add_option("--q", lv_q)->required();
    lv->add_option("--X", lv_X);
    lv->add_option("--delta", lv_delta);
    lv->add_option("--method", lv_method)
        ->check(CLI::IsMember({"truncated", "afe", "bulk"}));
    lv->add_option("--out", lv_out);

    // ---- kernel-table -------------------------------------------------------
    auto* kt = app.add_subcommand("kernel-table", "smoothing kernel samples");
    double kt_lo = 1e-6, kt_hi = 1e3;
    int kt_points = 50;
    std::string kt_parity = "both", kt_out;
    kt->add_option("--x-lo", kt_lo);
    kt->add_option("--x-hi", kt_hi);
    kt->add_option("--points", kt_points);
    kt->add_option("--parity", kt_parity)->check(CLI::IsMember({"0", "1", "both"}));
    kt->add_option("--out", kt_out);

    // ---- moments ------------------------------------------------------------
    auto* mo = app.add_subcommand("moments", "family moment sums for one (q,k)");
    std::uint32_t mo_q = 101;
    double mo_k = 0.5, mo_delta = 0.5;
    std::uint64_t mo_X = 0;
    std::string mo_sched = "standard", mo_out, mo_summary;
    mo->add_option("--q", mo_q)->required();
    mo->add_option("--k", mo_k)->required();
    mo->add_option("--schedule", mo_sched, "standard | none | path to spec.json");
    mo->add_option("--schedule-file", mo_sched);
    mo->add_option("--X", mo_X);
    mo->add_option("--delta", mo_delta);
    mo->add_option("--out", mo_out);
    mo->add_option("--summary", mo_summary);

    // ---- sweep --------------------------------------------------------------
    auto* sw = app.add_subcommand("sweep", "moment sums across moduli");
    std::vector<std::uint32_t> sw_qs{101, 211, 401, 809, 1601, 3209, 10007};
    std::vector<double> sw_ks{0.5, 1.0};
    double sw_delta = 0.5;
    std::string sw_sched = "standard", sw_dir = ".";
    sw->add_option("--q-list", sw_qs)->delimiter(',');
    sw->add_option("--k-list", sw_ks)->delimiter(',');
    sw->add_option("--schedule", sw_sched);
    sw->add_option("--delta", sw_delta);
    sw->add_option("--out", sw_dir);

    // ---- verify -------------------------------------------------------------
    auto* ve = app.add_subcommand("verify", "hard identities and inequality margins");
    std::uint32_t ve_q = 101;
    double ve_k = 0.5, ve_delta = 0.5;
    std::uint64_t ve_X = 0;
    std::string ve_sched = "standard", ve_dir = ".";
    ve->add_option("--q", ve_q)->required();
    ve->add_option("--k", ve_k)->required();
    ve->add_option("--schedule", ve_sched);
    ve->add_option("--X", ve_X);
    ve->add_option("--delta", ve_delta);
    ve->add_option("--out", ve_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2
    }

    lmom::KernelEvaluator kernel;

    if (sc->parsed()) {
        lmom::BlockSchedule s;
        if (sc_mode == "paper") {
            s = lmom::build_schedule_paper(sc_q, sc_k, sc_N, sc_M);
        } else if (sc_mode == "standard") {
            s = lmom::standard_custom_schedule(sc_q, sc_k);
        } else {
            s = schedule_from_option(sc_q, sc_k, sc_file);
        }
        write_text(sc_out, schedule_to_json(s).dump(2) + "\n");
        return 0;
    }

    if (lv->parsed()) {
        lmom::ModulusContext ctx(lv_q);
        std::ostringstream os;
        os << "j,parity,re_L,im_L,abs_L_sq,method,X_or_cutoff\n";
        lmom::CharacterVector cv;
        if (lv_method == "truncated")
            cv = lmom::l_all_direct(ctx, lv_X, threads);
        else if (lv_method == "bulk")
            cv = lmom::l_all_bulk(ctx, lv_X, threads);
        else
            cv = lmom::lsq_afe_all(ctx, lv_delta, kernel, threads);
        for (std::uint32_t j = 0; j < lv_q - 1; ++j) {
            const auto v = cv.data[j];
            const bool afe = lv_method == "afe";
            if (afe && j == 0) continue;  // principal excluded from the AFE
            os << j << ',' << (j & 1u) << ',' << num(afe ? NAN : v.real()) << ','
               << num(afe ? NAN : v.imag()) << ','
               << num(afe ? v.real() : std::norm(v)) << ',' << cv.method << ','
               << num(cv.param) << '\n';
        }
        write_text(lv_out, os.str());
        return 0;
    }

    if (kt->parsed()) {
        std::ostringstream os;
        os << "x,parity,W,im_residual\n";
        for (int i = 0; i < kt_points; ++i) {
            const double f = kt_points == 1 ? 0.0
                                            : static_cast<double>(i) / (kt_points - 1);
            const double x = kt_lo * std::pow(kt_hi / kt_lo, f);
            for (int parity = 0; parity < 2; ++parity) {
                if (kt_parity == "0" && parity == 1) continue;
                if (kt_parity == "1" && parity == 0) continue;
                const auto w = kernel.W_full(parity, x);
                os << num(x) << ',' << parity << ',' << num(w.value) << ','
                   << num(w.im_residual) << '\n';
            }
        }
        write_text(kt_out, os.str());
        return 0;
    }

    if (mo->parsed()) {
        lmom::ModulusContext ctx(mo_q);
        const auto sched =
            schedule_from_option(mo_q, (mo_k == 0.0 || mo_k == 1.0) ? 0.5 : mo_k, mo_sched);
        const auto row = compute_moments_row(ctx, sched, kernel, mo_k, mo_delta, mo_X, threads);
        write_text(mo_out, moments_csv_header() + moments_csv_row(row));
        if (!mo_summary.empty()) {
            json s;
            s["config"] = {{"q", mo_q},       {"k", mo_k},         {"schedule", mo_sched},
                           {"X", mo_X},       {"delta", mo_delta}, {"threads", threads}};
            s["moment_2k"] = row.moment_2k;
            s["ratio"] = row.ratio;
            s["worst_holder_slack"] = row.worst_holder_slack;
            s["hard_ok"] = row.hard_ok;
            write_text(mo_summary, s.dump(2) + "\n");
        }
        return row.hard_ok ? 0 : 1;
    }

    if (sw->parsed()) {
        fs::create_directories(sw_dir);
        std::ostringstream csv;
        csv << moments_csv_header();
        json summary;
        summary["config"] = {{"q_list", sw_qs},   {"k_list", sw_ks},
                             {"schedule", sw_sched}, {"delta", sw_delta},
                             {"threads", threads}};
        summary["conventions"] = {
            {"v_indexed", "term v carries the product over blocks 1..v times |Q_{v+1}|^2; "
                          "the v=0 term is |Q_1|^2 and Q_{R+1}=1"},
            {"ratio_normalizer", "phi_star(q) * (log q)^(k^2)"}};
        bool all_hard_ok = true;
        for (double k : sw_ks) {
            std::vector<double> kmoments;
            std::vector<std::uint32_t> qs_done;
            for (std::uint32_t q : sw_qs) {
                lmom::ModulusContext ctx(q);
                const auto sched = schedule_from_option(q, k == 0.0 || k == 1.0 ? 0.5 : k,
                                                        sw_sched);
                const auto row = compute_moments_row(ctx, sched, kernel, k, sw_delta, 0,
                                                     threads);
                csv << moments_csv_row(row);
                all_hard_ok = all_hard_ok && row.hard_ok;
                kmoments.push_back(row.moment_2k);
                qs_done.push_back(q);
            }
            if (qs_done.size() >= 4) {
                const auto fit = lmom::exponent_fit(qs_done, kmoments, k);
                json jf;
                jf["k"] = k;
                jf["slope"] = fit.slope;
                jf["stderr"] = fit.stderr_;
                jf["ratios"] = fit.ratios;
                summary["fits"].push_back(jf);
            }
        }
        write_text((fs::path(sw_dir) / "moments.csv").string(), csv.str());
        write_text((fs::path(sw_dir) / "summary.json").string(), summary.dump(2) + "\n");
        return all_hard_ok ? 0 : 1;
    }

    if (ve->parsed()) {
        fs::create_directories(ve_dir);
        lmom::ModulusContext ctx(ve_q);
        const auto sched = schedule_from_option(ve_q, ve_k, ve_sched);
        auto fd = lmom::FamilyData::build(ctx, sched, kernel, ve_delta, ve_X, threads);
        bool hard_ok = true;
        json summary;
        summary["config"] = {{"q", ve_q}, {"k", ve_k},         {"schedule", ve_sched},
                             {"X", fd.X}, {"delta", ve_delta}, {"threads", threads}};

        // mollifier section: per-character branch margins
        std::ostringstream csv;
        csv << "j,block,branch,margin,pass\n";
        double worst_small = 0.0;
        for (std::uint32_t j = 1; j < ve_q - 1; ++j) {
            const auto rep = lmom::pointwise_lemma_checks(fd.moll, j, ve_k);
            hard_ok = hard_ok && rep.hard_ok;
            for (const auto& b : rep.blocks) {
                const double margin = b.small_branch
                                          ? b.ratio_vs_nsq
                                          : (b.large_bound_ok && b.q_dominates_ok ? 0.0 : -1.0);
                const bool pass = b.small_branch ? true : (b.large_bound_ok && b.q_dominates_ok);
                if (b.small_branch) worst_small = std::max(worst_small, b.ratio_vs_nsq);
                csv << j << ',' << b.block << ',' << (b.small_branch ? "small" : "large")
                    << ',' << num(margin) << ',' << (pass ? 1 : 0) << '\n';
            }
        }
        write_text((fs::path(ve_dir) / "verify.csv").string(), csv.str());
        summary["worst_small_branch_ratio"] = worst_small;

        // polynomial identity: n_poly evaluation vs truncated exponential.
        // Long schedules get the check at the largest enumerable even length.
        double worst_poly = 0.0;
        json poly_ells = json::array();
        for (std::size_t b = 0; b < sched.R(); ++b) {
            if (sched.blocks[b].primes.empty()) {
                poly_ells.push_back(0);
                continue;
            }
            const double log2_maxp =
                std::log2(static_cast<double>(sched.blocks[b].primes.back()));
            std::uint64_t ell_check = sched.ell[b];
            while (ell_check > 2 &&
                   (lmom::projected_support_count(sched.blocks[b].primes.size(),
                                                  static_cast<std::uint32_t>(ell_check)) >
                        10'000'000 ||
                    static_cast<double>(ell_check) * log2_maxp > 62.0))
                ell_check -= 2;
            poly_ells.push_back(ell_check);
            for (double alpha : {ve_k, ve_k - 1.0}) {
                const auto poly = lmom::n_poly(sched.blocks[b].primes, ell_check, alpha);
                for (std::uint32_t j = 1; j < ve_q - 1; j += 7) {
                    const auto direct = lmom::eval_poly(ctx, poly, lmom::CharacterId{j});
                    const auto analytic =
                        lmom::e_trunc(ell_check, alpha * fd.moll.p_value(b, j));
                    worst_poly = std::max(worst_poly, std::abs(direct - analytic) /
                                                          std::max(1e-300, std::abs(analytic)));
                }
            }
        }
        summary["poly_identity_ell"] = poly_ells;
        summary["worst_poly_identity_rel_err"] = worst_poly;
        hard_ok = hard_ok && worst_poly <= 1e-9;

        // Holder chain
        const auto holder = lmom::holder_chain_check(fd, ve_k, /*strict=*/false);
        summary["worst_holder_slack"] = holder.worst_hard_slack;
        summary["c_min"] = holder.c_min;
        hard_ok = hard_ok && holder.hard_ok;

        // orthogonality identity on a short in-range polynomial
        if (ve_q > 25) {
            const std::vector<std::uint32_t> small_block{3, 5};
            const auto poly = lmom::n_poly(small_block, 2, ve_k);
            const auto orth = lmom::orthogonality_diagonal_check(ctx, poly);
            summary["orthogonality_rel_err"] = orth.rel_err;
            hard_ok = hard_ok && orth.precondition_ok && orth.rel_err <= 1e-9;
        }

        // diagonal oracle routes on a small fixture
        {
            lmom::CustomBlockSpec spec;
            spec.ell = {4};
            spec.bounds = {{10.0, 30.0}};
            const auto small = lmom::build_schedule_custom(ve_q, ve_k == 0.0 ? 0.5 : ve_k, spec);
            const auto diag = lmom::diagonal_oracle(small, ve_k);
            summary["diagonal_routes_rel_err"] = diag.rel_err_routes;
            hard_ok = hard_ok && diag.rel_err_routes <= 1e-12;
        }

        summary["hard_ok"] = hard_ok;
        write_text((fs::path(ve_dir) / "verify.json").string(), summary.dump(2) + "\n");
        std::cout << (hard_ok ? "verify: all hard invariants passed\n"
                              : "verify: HARD INVARIANT FAILED\n");
        return hard_ok ? 0 : 1;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const lmom::resource_error& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
