#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lmom/chargroup.hpp"
#include "lmom/common.hpp"
#include "lmom/kernel.hpp"

namespace lmom {

/// One complex value per character index j in {0,...,q-2}.
struct CharacterVector {
    std::uint32_t q = 0;
    std::vector<cplx> data;
    std::string method;   // "truncated" | "bulk" | "afe"
    double param = 0.0;   // X or the ab-cutoff

    /// max_j |data[q-1-j] - conj(data[j])|, j != 0.
    double conjugation_defect() const;
};

/// Per-dlog-class accumulation of sum_{m <= X} m^{-1/2}: class t collects the
/// m with dlog(m mod q) = t.  Kahan within fixed m-blocks, blocks merged in
/// index order, so the result is bit-identical for any thread count.
std::vector<double> dlog_class_sums(const ModulusContext& ctx, std::uint64_t X,
                                    unsigned threads = 0);

/// sum_{m <= X} chi_j(m)/sqrt(m), evaluated from the class sums in ascending
/// dlog order with compensated summation.
cplx l_half_truncated(const ModulusContext& ctx, CharacterId id, std::uint64_t X);

/// All characters at once by direct per-character evaluation of the class
/// sums (the oracle for the bulk path).
CharacterVector l_all_direct(const ModulusContext& ctx, std::uint64_t X,
                             unsigned threads = 0);

/// All characters at once via the length-(q-1) mixed-radix DFT of the class
/// sums.
CharacterVector l_all_bulk(const ModulusContext& ctx, std::uint64_t X,
                           unsigned threads = 0);

struct AfeResult {
    double value = 0.0;        // |L(1/2,chi)|^2, truncated AFE
    double im_residual = 0.0;  // |imaginary part| of the computed double sum
    double tail_bound = 0.0;   // certified bound on the discarded ab > cutoff tail
    std::uint64_t cutoff = 0;  // ab <= cutoff = floor(q^{1+delta})
};

/// Approximate functional equation for |L(1/2,chi_j)|^2 (Lemma 2.2):
/// 2 sum_{ab <= q^{1+delta}} chi(a) conj(chi(b)) W_a(pi ab/q) / sqrt(ab).
/// parity_override forces the kernel parity (testing hook); -1 uses j mod 2.
/// Throws std::invalid_argument for the principal character, accuracy_error
/// if the tail bound exceeds 1e-6 * |value|.
AfeResult lsq_afe(const ModulusContext& ctx, CharacterId id, double delta,
                  const KernelEvaluator& kernel, int parity_override = -1);

/// |L|^2 for every character at once: two real accumulator arrays over the
/// dlog-difference classes (one per kernel parity), then two DFTs.
/// data[j] holds the real AFE value; data[0] is left 0 (principal excluded).
CharacterVector lsq_afe_all(const ModulusContext& ctx, double delta,
                            const KernelEvaluator& kernel, unsigned threads = 0);

}  // namespace lmom
