#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lmom/blocks.hpp"
#include "lmom/chargroup.hpp"
#include "lmom/kernel.hpp"
#include "lmom/lvalues.hpp"
#include "lmom/mollifier.hpp"
#include "lmom/moments.hpp"

namespace py = pybind11;
using namespace lmom;

namespace {

CustomBlockSpec make_spec(const std::vector<std::uint64_t>& ell,
                          const std::vector<std::pair<double, double>>& bounds,
                          std::uint32_t N) {
    CustomBlockSpec spec;
    spec.ell = ell;
    spec.bounds = bounds;
    spec.N = N;
    return spec;
}

}  // namespace

PYBIND11_MODULE(_lmoment, m) {
    m.doc() = "central-value moments of Dirichlet L-functions to a prime modulus";

    py::register_exception<resource_error>(m, "ResourceError", PyExc_RuntimeError);
    py::register_exception<accuracy_error>(m, "AccuracyError", PyExc_RuntimeError);

    // ---- chargroup ----------------------------------------------------------
    m.def("is_prime", &is_prime_u64, py::arg("n"));
    m.def("find_primitive_root", &find_primitive_root, py::arg("q"));

    py::class_<CharacterId>(m, "CharacterId")
        .def(py::init([](std::uint32_t j) { return CharacterId{j}; }), py::arg("j"))
        .def_readonly("j", &CharacterId::j)
        .def_property_readonly("parity", &CharacterId::parity)
        .def_property_readonly("principal", &CharacterId::principal);

    py::class_<ModulusContext>(m, "ModulusContext")
        .def(py::init<std::uint32_t, std::uint64_t>(), py::arg("q"),
             py::arg("max_table_entries") = (1ull << 27))
        .def_property_readonly("q", &ModulusContext::q)
        .def_property_readonly("g", &ModulusContext::g)
        .def_property_readonly("phi_star", &ModulusContext::phi_star)
        .def("dlog", &ModulusContext::dlog, py::arg("n_mod_q"))
        .def("char_value",
             [](const ModulusContext& ctx, std::uint32_t j, std::uint64_t n) {
                 return ctx.char_value(CharacterId{j}, n);
             },
             py::arg("j"), py::arg("n"))
        .def("char_sum_even", &ModulusContext::char_sum_even, py::arg("a"))
        .def("char_sum_odd", &ModulusContext::char_sum_odd, py::arg("a"));

    // ---- kernel -------------------------------------------------------------
    py::class_<KernelConfig>(m, "KernelConfig")
        .def(py::init<>())
        .def_readwrite("c", &KernelConfig::c)
        .def_readwrite("h", &KernelConfig::h)
        .def_readwrite("T", &KernelConfig::T)
        .def_readwrite("tol", &KernelConfig::tol);

    py::class_<WResult>(m, "WResult")
        .def_readonly("value", &WResult::value)
        .def_readonly("im_residual", &WResult::im_residual)
        .def_readonly("abscissa", &WResult::abscissa);

    py::class_<AlphaSumResult>(m, "AlphaSumResult")
        .def_readonly("value", &AlphaSumResult::value)
        .def_readonly("alpha_cut", &AlphaSumResult::alpha_cut)
        .def_readonly("tail_bound", &AlphaSumResult::tail_bound)
        .def_readonly("x_stop", &AlphaSumResult::x_stop);

    py::class_<KernelEvaluator>(m, "KernelEvaluator")
        .def(py::init<KernelConfig>(), py::arg("config") = KernelConfig{})
        .def("W", &KernelEvaluator::W, py::arg("parity"), py::arg("x"))
        .def("W_full", &KernelEvaluator::W_full, py::arg("parity"), py::arg("x"))
        .def("alpha_sum", &KernelEvaluator::alpha_sum, py::arg("ctx"), py::arg("parity"),
             py::arg("X"));

    m.def("log_gamma", &log_gamma, py::arg("z"));

    // ---- lvalues ------------------------------------------------------------
    py::class_<CharacterVector>(m, "CharacterVector")
        .def_readonly("q", &CharacterVector::q)
        .def_readonly("data", &CharacterVector::data)
        .def_readonly("method", &CharacterVector::method)
        .def_readonly("param", &CharacterVector::param)
        .def("conjugation_defect", &CharacterVector::conjugation_defect);

    py::class_<AfeResult>(m, "AfeResult")
        .def_readonly("value", &AfeResult::value)
        .def_readonly("im_residual", &AfeResult::im_residual)
        .def_readonly("tail_bound", &AfeResult::tail_bound)
        .def_readonly("cutoff", &AfeResult::cutoff);

    m.def("l_half_truncated",
          [](const ModulusContext& ctx, std::uint32_t j, std::uint64_t X) {
              return l_half_truncated(ctx, CharacterId{j}, X);
          },
          py::arg("ctx"), py::arg("j"), py::arg("X"));
    m.def("l_all_direct", &l_all_direct, py::arg("ctx"), py::arg("X"),
          py::arg("threads") = 0);
    m.def("l_all_bulk", &l_all_bulk, py::arg("ctx"), py::arg("X"), py::arg("threads") = 0);
    m.def("lsq_afe",
          [](const ModulusContext& ctx, std::uint32_t j, double delta,
             const KernelEvaluator& kernel, int parity_override) {
              return lsq_afe(ctx, CharacterId{j}, delta, kernel, parity_override);
          },
          py::arg("ctx"), py::arg("j"), py::arg("delta"), py::arg("kernel"),
          py::arg("parity_override") = -1);
    m.def("lsq_afe_all", &lsq_afe_all, py::arg("ctx"), py::arg("delta"), py::arg("kernel"),
          py::arg("threads") = 0);

    // ---- blocks -------------------------------------------------------------
    m.def("primes_up_to", &primes_up_to, py::arg("n"), py::arg("budget") = 100'000'000);
    m.def("compute_r_k", &compute_r_k, py::arg("k"));
    m.def("schedule_lengths_from_loglog", &schedule_lengths_from_loglog,
          py::arg("loglog_q"), py::arg("N"), py::arg("M"));
    m.def("omega", &omega_of, py::arg("n"));
    m.def("w", &w_of, py::arg("n"));
    m.def("mertens_check", &mertens_check, py::arg("x"), py::arg("jpow"),
          py::arg("b") = 0.0, py::arg("sieve_budget") = 100'000'000);
    m.def("fit_mertens_b", &fit_mertens_b, py::arg("x_max"),
          py::arg("sieve_budget") = 100'000'000);

    py::class_<MertensResult>(m, "MertensResult")
        .def_readonly("sum", &MertensResult::sum)
        .def_readonly("main_term", &MertensResult::main_term)
        .def_readonly("residual", &MertensResult::residual);

    py::class_<ScheduleFlags>(m, "ScheduleFlags")
        .def_readonly("ell_square_decreasing", &ScheduleFlags::ell_square_decreasing)
        .def_readonly("ell_R_above_threshold", &ScheduleFlags::ell_R_above_threshold)
        .def_readonly("sum_inv_ell_ok", &ScheduleFlags::sum_inv_ell_ok)
        .def_readonly("exponent_budget_ok", &ScheduleFlags::exponent_budget_ok)
        .def_readonly("blocks_nonempty", &ScheduleFlags::blocks_nonempty)
        .def_readonly("sum_inv_p_ok", &ScheduleFlags::sum_inv_p_ok)
        .def("all", &ScheduleFlags::all);

    py::class_<PrimeBlock>(m, "PrimeBlock")
        .def_readonly("lo", &PrimeBlock::lo)
        .def_readonly("hi", &PrimeBlock::hi)
        .def_readonly("primes", &PrimeBlock::primes);

    py::class_<BlockSchedule>(m, "BlockSchedule")
        .def_readonly("q", &BlockSchedule::q)
        .def_readonly("k", &BlockSchedule::k)
        .def_readonly("r_k", &BlockSchedule::r_k)
        .def_readonly("ell", &BlockSchedule::ell)
        .def_readonly("blocks", &BlockSchedule::blocks)
        .def_readonly("flags", &BlockSchedule::flags)
        .def_readonly("sum_inv_ell", &BlockSchedule::sum_inv_ell)
        .def_property_readonly("R", &BlockSchedule::R);

    m.def("build_schedule_paper", &build_schedule_paper, py::arg("q"), py::arg("k"),
          py::arg("N"), py::arg("M"));
    m.def("build_schedule_custom",
          [](std::uint32_t q, double k, const std::vector<std::uint64_t>& ell,
             const std::vector<std::pair<double, double>>& bounds, std::uint32_t N) {
              return build_schedule_custom(q, k, make_spec(ell, bounds, N));
          },
          py::arg("q"), py::arg("k"), py::arg("ell"), py::arg("bounds"),
          py::arg("N") = 10);
    m.def("standard_custom_schedule", &standard_custom_schedule, py::arg("q"),
          py::arg("k"));
    m.def("compact_custom_schedule", &compact_custom_schedule, py::arg("q"), py::arg("k"));

    py::class_<SupportEntry>(m, "SupportEntry")
        .def_readonly("n", &SupportEntry::n)
        .def_readonly("omega", &SupportEntry::omega)
        .def_readonly("w", &SupportEntry::w);

    py::class_<SmoothSupport>(m, "SmoothSupport")
        .def_readonly("entries", &SmoothSupport::entries)
        .def_readonly("length_bound", &SmoothSupport::length_bound);

    m.def("enumerate_block_supported",
          [](const std::vector<std::uint32_t>& primes, std::uint32_t omega_cap,
             std::uint64_t length_cap, std::uint64_t budget) {
              return enumerate_block_supported(primes, omega_cap, length_cap, budget);
          },
          py::arg("block_primes"), py::arg("omega_cap"),
          py::arg("length_cap") = UINT64_MAX, py::arg("budget") = 10'000'000);

    // ---- mollifier ----------------------------------------------------------
    py::class_<DirichletPoly>(m, "DirichletPoly")
        .def_property_readonly("terms",
                               [](const DirichletPoly& p) {
                                   std::vector<std::pair<std::uint64_t, double>> out;
                                   for (const auto& t : p.terms)
                                       out.emplace_back(t.n, t.coeff);
                                   return out;
                               })
        .def_readonly("length_bound", &DirichletPoly::length_bound)
        .def_readonly("label", &DirichletPoly::label)
        .def("coeff_at", &DirichletPoly::coeff_at, py::arg("n"));

    m.def("e_trunc", &e_trunc, py::arg("ell"), py::arg("z"));
    m.def("p_block_value",
          [](const ModulusContext& ctx, std::uint32_t j,
             const std::vector<std::uint32_t>& primes) {
              return p_block_value(ctx, CharacterId{j}, primes);
          },
          py::arg("ctx"), py::arg("j"), py::arg("block_primes"));
    m.def("q_term", &q_term, py::arg("p_abs"), py::arg("ell"), py::arg("k"),
          py::arg("r_k"));
    m.def("n_poly",
          [](const std::vector<std::uint32_t>& primes, std::uint64_t ell, double alpha,
             std::uint64_t budget) { return n_poly(primes, ell, alpha, budget); },
          py::arg("block_primes"), py::arg("ell"), py::arg("alpha"),
          py::arg("budget") = 10'000'000);
    m.def("power_poly",
          [](const std::vector<std::uint32_t>& primes, std::uint32_t m_exp,
             std::uint64_t budget) { return power_poly(primes, m_exp, budget); },
          py::arg("block_primes"), py::arg("m"), py::arg("budget") = 10'000'000);
    m.def("eval_poly",
          [](const ModulusContext& ctx, const DirichletPoly& poly, std::uint32_t j) {
              return eval_poly(ctx, poly, CharacterId{j});
          },
          py::arg("ctx"), py::arg("poly"), py::arg("j"));

    // ---- moments ------------------------------------------------------------
    py::class_<FamilyData>(m, "FamilyData")
        .def_readonly("lsq", &FamilyData::lsq)
        .def_readonly("ltrunc", &FamilyData::ltrunc)
        .def_readonly("X", &FamilyData::X)
        .def_readonly("delta", &FamilyData::delta);

    m.def("family_data", &FamilyData::build, py::arg("ctx"), py::arg("sched"),
          py::arg("kernel"), py::arg("delta") = 0.5, py::arg("X") = 0,
          py::arg("threads") = 0, py::keep_alive<0, 1>(), py::keep_alive<0, 2>());

    m.def("moment", py::overload_cast<const CharacterVector&, double>(&moment),
          py::arg("lsq"), py::arg("k"));

    py::class_<LowerFunctionalResult>(m, "LowerFunctionalResult")
        .def_readonly("value", &LowerFunctionalResult::value)
        .def_readonly("im_residual", &LowerFunctionalResult::im_residual)
        .def_readonly("ratio", &LowerFunctionalResult::ratio);
    m.def("lower_functional", &lower_functional, py::arg("fd"), py::arg("k"));

    py::enum_<TwistedVariant>(m, "TwistedVariant")
        .value("full", TwistedVariant::full)
        .value("v_indexed", TwistedVariant::v_indexed);
    m.def("twisted_second", &twisted_second, py::arg("fd"), py::arg("k"),
          py::arg("variant") = TwistedVariant::full);

    py::enum_<MollifierVariant>(m, "MollifierVariant")
        .value("product", MollifierVariant::product)
        .value("v_indexed", MollifierVariant::v_indexed);
    m.def("mollifier_moment", &mollifier_moment, py::arg("fd"), py::arg("k"),
          py::arg("variant") = MollifierVariant::product);

    py::class_<HolderMargin>(m, "HolderMargin")
        .def_readonly("id", &HolderMargin::id)
        .def_readonly("lhs", &HolderMargin::lhs)
        .def_readonly("rhs", &HolderMargin::rhs)
        .def_readonly("slack", &HolderMargin::slack)
        .def_readonly("hard", &HolderMargin::hard);
    py::class_<HolderReport>(m, "HolderReport")
        .def_readonly("margins", &HolderReport::margins)
        .def_readonly("c_min", &HolderReport::c_min)
        .def_readonly("worst_hard_slack", &HolderReport::worst_hard_slack)
        .def_readonly("hard_ok", &HolderReport::hard_ok);
    m.def("holder_chain_check", &holder_chain_check, py::arg("fd"), py::arg("k"),
          py::arg("strict") = true);

    py::class_<DiagonalOracleResult>(m, "DiagonalOracleResult")
        .def_readonly("brute", &DiagonalOracleResult::brute)
        .def_readonly("factored", &DiagonalOracleResult::factored)
        .def_readonly("euler", &DiagonalOracleResult::euler)
        .def_readonly("rel_err_routes", &DiagonalOracleResult::rel_err_routes)
        .def_readonly("ratio_euler", &DiagonalOracleResult::ratio_euler);
    m.def("diagonal_oracle", &diagonal_oracle, py::arg("sched"), py::arg("k"),
          py::arg("brute_budget") = 50'000);

    py::class_<OrthDiagResult>(m, "OrthDiagResult")
        .def_readonly("precondition_ok", &OrthDiagResult::precondition_ok)
        .def_readonly("max_support", &OrthDiagResult::max_support)
        .def_readonly("lhs", &OrthDiagResult::lhs)
        .def_readonly("rhs", &OrthDiagResult::rhs)
        .def_readonly("rel_err", &OrthDiagResult::rel_err);
    m.def("orthogonality_diagonal_check", &orthogonality_diagonal_check, py::arg("ctx"),
          py::arg("poly"));

    py::class_<Prop4Result>(m, "Prop4Result")
        .def_readonly("X", &Prop4Result::X)
        .def_readonly("all_char_total", &Prop4Result::all_char_total)
        .def_readonly("coef_space_total", &Prop4Result::coef_space_total)
        .def_readonly("identity_rel_err", &Prop4Result::identity_rel_err)
        .def_readonly("principal_term", &Prop4Result::principal_term)
        .def_readonly("primitive_total", &Prop4Result::primitive_total)
        .def_readonly("diagonal", &Prop4Result::diagonal)
        .def_readonly("remainder", &Prop4Result::remainder)
        .def_readonly("remainder_ratio", &Prop4Result::remainder_ratio);
    m.def("prop4_reproduction", &prop4_reproduction, py::arg("ctx"), py::arg("sched"),
          py::arg("k"), py::arg("X"), py::arg("support_budget") = 200'000);

    py::class_<ExponentFit>(m, "ExponentFit")
        .def_readonly("slope", &ExponentFit::slope)
        .def_readonly("stderr", &ExponentFit::stderr_)
        .def_readonly("intercept", &ExponentFit::intercept)
        .def_readonly("ratios", &ExponentFit::ratios);
    m.def("exponent_fit",
          [](const std::vector<std::uint32_t>& qs, const std::vector<double>& ms,
             double k) { return exponent_fit(qs, ms, k); },
          py::arg("q_list"), py::arg("moments"), py::arg("k"));
}
