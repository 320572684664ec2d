#pragma once

#include <string>
#include <vector>

#include "qqkit/lweight.hpp"

namespace qqkit::qq {

/// Truncation of chi_{i,k} = sum_{r>=0} (A_{i,k} A_{i,k-2d_i} ... A_{i,k-2d_i(r-1)})^{-1}
/// at depth R: exactly R+1 terms, term r of weight -r alpha_i.
struct ChiSeries {
    int node = 0;
    int base_shift = 0;
    int depth = 0;
    lw::GrothElement value;
};

enum class VerifyStatus {
    ExactZero,     // residual empty
    Nonzero,       // residual has surviving terms
    ChiMismatch,   // formal chi_j multiplicities disagree between the sides
};

std::string to_string(VerifyStatus s);

struct VerificationReport {
    std::string identity;     // "qq-system", "recursion", ...
    std::string algebra;      // "G2"
    int node = 0;             // 0-based
    int depth = 0;
    VerifyStatus status = VerifyStatus::Nonzero;
    lw::GrothElement residual;
    double ms = 0.0;

    bool ok() const { return status == VerifyStatus::ExactZero; }
};

ChiSeries chi_series(const lie::AlgebraData& g, int i, int k, int depth);

/// Terminal recursion of the proof: chi_{i,-d_i} at depth R minus
/// 1 + A_{i,-d_i}^{-1} chi_{i,-3d_i} at depth R-1 must vanish exactly.
VerificationReport verify_recursion(const lie::AlgebraData& g, int i, int depth,
                                    int base_shift = 0);

/// Full QQ~-system check at truncation depth R: substitutes the q-character
/// formulas for Q and Q~, cancels the opaque prefundamental characters
/// chi_j (after verifying their multiplicities match on both sides), and
/// requires the surviving l-weight identity to vanish exactly.
VerificationReport verify_qq_system(const lie::AlgebraData& g, int i, int depth,
                                    int base_shift = 0);

/// sl2 closed forms at depth R: the positive prefundamental truncation
/// [Psi_{1,k}] sum_{r<=R} [-2r omega_1] and the negative one
/// [Psi_{1,k}^{-1}] chi-series.
struct Sl2ClosedForms {
    lw::GrothElement positive;
    lw::GrothElement negative;
};
Sl2ClosedForms sl2_closed_forms(int k, int depth);

/// Shift data of the QQ*-system for node i: the multiset of (node, shift)
/// pairs appearing in each right-hand product, the Q* highest l-weight, and
/// the implied Bethe shift multiset, which must equal {(j, +-B_ij)}.
struct QQStarShiftData {
    std::vector<std::pair<int, int>> lhs_shifts;  // (j, -d_j C_ji), first product
    std::vector<std::pair<int, int>> rhs_shifts;  // (j, +d_j C_ji), second product
    lw::LWeightTerm qstar_highest;                // Psi_{i,0}^{-1} prod Psi_{j,-d_j C_ji}
    std::vector<std::pair<int, int>> bae_multiset;     // derived from the QQ* products
    std::vector<std::pair<int, int>> b_row_multiset;   // {(j, +-B_ij)} from B directly
    bool matches_b_row() const { return bae_multiset == b_row_multiset; }
};
QQStarShiftData qq_star_shift_data(const lie::AlgebraData& g, int i);

} // namespace qqkit::qq
