#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lmom/blocks.hpp"
#include "lmom/chargroup.hpp"
#include "lmom/common.hpp"
#include "lmom/lvalues.hpp"
#include "lmom/mollifier.hpp"

namespace lmom {

/// Everything the family-level sums need, computed once per (q, schedule):
/// AFE |L|^2 per character, truncated L per character, and the block prime
/// sums P_j(chi).
struct FamilyData {
    const ModulusContext* ctx = nullptr;
    const BlockSchedule* sched = nullptr;
    CharacterVector lsq;     // AFE |L|^2 (real parts); slot 0 unused
    CharacterVector ltrunc;  // truncated L at X
    FamilyMollifier moll;
    double delta = 0.5;
    std::uint64_t X = 0;

    static FamilyData build(const ModulusContext& ctx, const BlockSchedule& sched,
                            const KernelEvaluator& kernel, double delta = 0.5,
                            std::uint64_t X = 0, unsigned threads = 0);
};

/// Desk-scale default truncation length min(q^{3/2}, 10^7).
std::uint64_t default_truncation(std::uint32_t q);

/// sum_{j != 0} (|L|^2_j)^k in ascending-j order.  Entries below -1e-8 raise
/// std::domain_error; tiny negatives from AFE truncation are clamped to 0.
double moment(std::span<const double> lsq_values, double k);
double moment(const CharacterVector& lsq, double k);

struct LowerFunctionalResult {
    double value = 0.0;        // Re of sum* L(1/2,chi) N(conj chi,k) N(chi,k-1)
    double im_residual = 0.0;
    double ratio = 0.0;        // value / (phi* (log q)^{k^2})
};

LowerFunctionalResult lower_functional(const FamilyData& fd, double k);

enum class TwistedVariant { full, v_indexed };
/// Proposition 3.4 sums (0<k<1): full = sum* |L N(chi,k-1)|^2; v_indexed =
/// sum* |L|^2 sum_v (prod_{j<=v} |N_j(chi,k-1)|^2) |Q_{v+1}(chi,k)|^2.
double twisted_second(const FamilyData& fd, double k, TwistedVariant variant);

enum class MollifierVariant { product, v_indexed };
/// Proposition 3.5 sums: product = sum* prod_j (|N_j(chi,k)|^2 + |Q_j(chi,k)|^2);
/// v_indexed = sum* sum_v (prod_{j<=v} |N_j(chi,k)|^2) |Q_{v+1}(chi,k)|^2.
double mollifier_moment(const FamilyData& fd, double k, MollifierVariant variant);

struct HolderMargin {
    std::string id;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;   // rhs - lhs
    bool hard = false;    // exact Holder: slack >= -1e-9 * rhs is mandatory
};

struct HolderReport {
    std::vector<HolderMargin> margins;
    double c_min = 0.0;            // min_chi S_{k-1}^k S_k^{1-k} (0<k<1)
    double worst_hard_slack = 0.0; // min over hard margins of slack/rhs
    bool hard_ok = true;
};

/// The exact Holder inequalities from the proofs of Lemmas 3.1/3.2 computed
/// from per-character data (truncated L throughout, so both sides use the
/// same numbers and the inequalities are unconditional), plus the final-form
/// ratios with (|N_j|^2+|Q_j|^2) factors reported soft.  With strict=true a
/// hard violation throws accuracy_error.
HolderReport holder_chain_check(const FamilyData& fd, double k, bool strict = true);

struct DiagonalOracleResult {
    double brute = 0.0;     // (i) integer-divisibility convolution over the product support
    double factored = 0.0;  // (ii) per-block factored form
    double euler = 0.0;     // (iii) unrestricted-Omega product prod (1 + k^2/p)
    double rel_err_routes = 0.0;  // |(i)-(ii)| / |(ii)|
    double ratio_euler = 0.0;     // (i)/(iii)
};

/// The Proposition 3.3 diagonal sum_b (y_b/b) sum_{a|b} x_a with
/// y = coefficients of N(.,k), x = coefficients of N(.,k-1), three ways.
DiagonalOracleResult diagonal_oracle(const BlockSchedule& sched, double k,
                                     std::uint64_t brute_budget = 50'000);

struct OrthDiagResult {
    bool precondition_ok = false;  // max support < q
    std::uint64_t max_support = 0;
    double lhs = 0.0;   // sum over ALL characters of |D(chi)|^2
    double rhs = 0.0;   // phi(q) * sum_n d_n^2 / n
    double rel_err = 0.0;
};

/// Exact orthogonality identity for a short polynomial D: when every support
/// point is < q, sum_chi |D(chi)|^2 = phi(q) sum_n d_n^2/n.  Both sides are
/// computed independently; the precondition flag reports when the identity is
/// not expected to hold.
OrthDiagResult orthogonality_diagonal_check(const ModulusContext& ctx,
                                            const DirichletPoly& poly);

struct Prop4Result {
    std::uint64_t X = 0;
    double all_char_total = 0.0;    // sum over ALL chi (complex Re; Im residual below)
    double all_char_im = 0.0;
    double coef_space_total = 0.0;  // phi(q) * congruence sum (independent route)
    double identity_rel_err = 0.0;  // |all_char_total - coef_space_total| / scale
    double principal_term = 0.0;
    double primitive_total = 0.0;   // all_char - principal
    double diagonal = 0.0;          // phi*(q) * sum_b y_b/b sum_{a|b} x_a
    double remainder = 0.0;         // primitive_total - diagonal
    double remainder_ratio = 0.0;   // |remainder| / diagonal
};

/// Splits sum* sum_{m<=X} chi(m)/sqrt(m) N(conj chi,k) N(chi,k-1) into the
/// am=b diagonal and the rest, with the character-space and coefficient-space
/// routes compared exactly.  Requires enumerable product supports.
Prop4Result prop4_reproduction(const ModulusContext& ctx, const BlockSchedule& sched,
                               double k, std::uint64_t X,
                               std::uint64_t support_budget = 200'000);

struct ExponentFit {
    double slope = 0.0;      // d log(moment/phi*) / d log log q
    double stderr_ = 0.0;
    double intercept = 0.0;
    std::vector<double> ratios;  // moment / (phi* (log q)^{k^2}) per q
};

/// Least-squares slope of log(moment/phi*(q)) against log log q.  Needs >= 4
/// moduli.
ExponentFit exponent_fit(std::span<const std::uint32_t> qs,
                         std::span<const double> moments, double k);

}  // namespace lmom
