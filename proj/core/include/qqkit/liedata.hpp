#pragma once

#include <string>
#include <vector>

#include "qqkit/rational.hpp"

namespace qqkit::lie {

/// Static data for one finite simple type: Cartan matrix C, symmetrizers
/// d_i (so B = diag(d) C is symmetric), exponents, Coxeter numbers and the
/// Kac labels a_0..a_n of the untwisted affine extension. Immutable after
/// construction, safe to share across threads.
struct AlgebraData {
    char type_tag = '?';          // 'A'..'G'
    int rank = 0;
    std::vector<std::vector<int>> cartan;  // C, rank x rank
    std::vector<int> sym;                  // d_i, relatively prime positive
    std::vector<std::vector<int>> bmatrix; // B = DC
    std::vector<int> exponents;            // multiset, sorted
    int coxeter = 0;                       // h
    int dual_coxeter = 0;                  // h^vee
    std::vector<int> kac_labels;           // a_0..a_n, a_0 = 1

    std::string name() const { return std::string(1, type_tag) + std::to_string(rank); }

    int c(int i, int j) const { return cartan[i][j]; }     // 0-based
    int d(int i) const { return sym[i]; }
    int b(int i, int j) const { return bmatrix[i][j]; }
    bool adjacent(int i, int j) const { return i != j && cartan[i][j] < 0; }

    bool simply_laced() const;
    /// Lacing number: max d_i (2 for B/C/F types, 3 for G2, 1 when simply laced).
    int lacing() const;
};

/// Folding data for a diagram automorphism sigma of a simply-laced type
/// (A/D/E6), order r in {2,3}. Per orbit we keep a representative chosen so
/// that adjacent representatives satisfy C_{i,j} = -1, and the twisted
/// d_i in {r, 1, 1/2}.
struct TwistedFoldData {
    char base_type = '?';
    int base_rank = 0;
    int twist_order = 0;                   // r
    std::vector<std::vector<int>> orbits;  // node sets (0-based), sorted
    std::vector<int> representative;       // one node per orbit
    std::vector<Rational> d;               // twisted d_i per orbit
    std::vector<std::vector<int>> cartan_reps; // C restricted to representatives

    int orbit_count() const { return int(orbits.size()); }
    bool rep_adjacent(int oi, int oj) const { return oi != oj && cartan_reps[oi][oj] < 0; }
};

/// Loads the table entry for (type_tag, rank). Throws std::invalid_argument
/// for unknown or unsupported types (A_n n<=8, B/C_n n<=4, D_4/D_5,
/// E6/E7/E8, F4, G2).
const AlgebraData& load_algebra(char type_tag, int rank);
const AlgebraData& load_algebra(const std::string& name);  // e.g. "A2", "G2"

/// All table entries, in file order.
std::vector<std::string> supported_algebras();

/// Folds a simply-laced diagram along the automorphism sigma (0-based
/// permutation of the nodes). Throws if sigma is not a diagram automorphism
/// of order 2 or 3.
TwistedFoldData fold_twisted(const AlgebraData& simply_laced, const std::vector<int>& sigma);

/// Oper duality involution of the parameter alpha: returns alpha-check with
/// alpha-check + 1 = 1 / (r_check (alpha + 1)). Throws for alpha = -1.
Rational dual_alpha(const Rational& alpha, int r_check);

/// Solves B = DC symmetric for relatively prime positive integers d given
/// the Cartan matrix alone. Used as a cross-check oracle against the table.
std::vector<int> solve_symmetrizers(const std::vector<std::vector<int>>& cartan);

/// Parses the plain-text table format (see data/algebras.dat). Used by the
/// default loader; exposed so alternate tables can be dropped in via the
/// QQKIT_ALGEBRA_TABLE environment variable.
std::vector<AlgebraData> parse_algebra_table(const std::string& text);

} // namespace qqkit::lie
