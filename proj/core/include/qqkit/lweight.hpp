#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qqkit/liedata.hpp"

namespace qqkit::lw {

/// Spectral shift on the common q-lattice: the point a q^{num/den} with
/// den in {1,2}. Internally everything is normalized to half-units, so
/// equality is integer equality (q is not a root of unity). den = 2 only
/// occurs in twisted contexts.
struct ShiftIndex {
    int num = 0;
    int den = 1;

    ShiftIndex() = default;
    ShiftIndex(int n, int d = 1);

    int half_units() const { return den == 1 ? 2 * num : num; }
    std::string str() const;

    friend bool operator==(const ShiftIndex& a, const ShiftIndex& b) {
        return a.half_units() == b.half_units();
    }
    friend bool operator<(const ShiftIndex& a, const ShiftIndex& b) {
        return a.half_units() < b.half_units();
    }
};

/// Product of Psi_{i,k}^{e} factors: sparse exponent map keyed by
/// (node, shift in half-units). No zero exponents are stored.
class PsiMonomial {
public:
    using Key = std::pair<int, int>;  // (node, half-unit shift)
    using Map = std::map<Key, std::int64_t>;

    PsiMonomial() = default;

    static PsiMonomial psi(int node, ShiftIndex k, std::int64_t e = 1);

    bool is_identity() const { return exp_.empty(); }
    const Map& factors() const { return exp_; }
    std::int64_t exponent(int node, ShiftIndex k) const;

    PsiMonomial& mul(int node, ShiftIndex k, std::int64_t e);
    friend PsiMonomial operator*(const PsiMonomial& a, const PsiMonomial& b);
    PsiMonomial inverse() const;
    PsiMonomial power(std::int64_t e) const;

    /// Smallest half-unit shift present (throws if identity).
    int min_half_shift() const;

    friend bool operator==(const PsiMonomial& a, const PsiMonomial& b) { return a.exp_ == b.exp_; }
    friend bool operator<(const PsiMonomial& a, const PsiMonomial& b) { return a.exp_ < b.exp_; }

    std::string str() const;

private:
    Map exp_;
};

/// Weight-lattice element with coefficients over the fundamental-weight
/// basis, stored in half-units (denominators divide 2; [alpha_i/2] lives
/// here). Addition is the group law.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(int rank) : half_(rank, 0) {}

    static WeightVector fundamental(int rank, int i, std::int64_t num = 1, int den = 1);
    /// alpha_i = sum_j C_{ji} omega_j, scaled by num/den (den | 2).
    static WeightVector simple_root(const lie::AlgebraData& g, int i, std::int64_t num = 1, int den = 1);

    int rank() const { return int(half_.size()); }
    bool is_zero() const;
    /// Coefficient of omega_j in half-units (i.e. twice the coefficient).
    std::int64_t half(int j) const { return half_[j]; }

    WeightVector operator+(const WeightVector& o) const;
    WeightVector operator-() const;
    WeightVector scaled(std::int64_t m) const;

    /// Comparisons zero-extend, so the rank-0 identity equals any zero vector.
    friend bool operator==(const WeightVector& a, const WeightVector& b) { return cmp(a, b) == 0; }
    friend bool operator<(const WeightVector& a, const WeightVector& b) { return cmp(a, b) < 0; }

    std::string str() const;

private:
    static int cmp(const WeightVector& a, const WeightVector& b);
    std::vector<std::int64_t> half_;
};

/// One l-weight: a Psi-monomial together with its constant one-dimensional
/// part [omega]. Multiplication is componentwise; identity = (empty, 0).
struct LWeightTerm {
    PsiMonomial psi;
    WeightVector weight;

    LWeightTerm() = default;
    LWeightTerm(PsiMonomial p, WeightVector w) : psi(std::move(p)), weight(std::move(w)) {}

    bool is_identity() const { return psi.is_identity() && weight.is_zero(); }
    LWeightTerm inverse() const { return {psi.inverse(), -weight}; }
    LWeightTerm power(std::int64_t e) const { return {psi.power(e), weight.scaled(e)}; }

    friend LWeightTerm operator*(const LWeightTerm& a, const LWeightTerm& b) {
        return {a.psi * b.psi, a.weight + b.weight};
    }
    friend bool operator==(const LWeightTerm& a, const LWeightTerm& b) {
        return a.psi == b.psi && a.weight == b.weight;
    }
    friend bool operator<(const LWeightTerm& a, const LWeightTerm& b) {
        if (a.psi < b.psi) return true;
        if (b.psi < a.psi) return false;
        return a.weight < b.weight;
    }

    std::string str() const;
};

/// Z-linear combination of LWeightTerms; the formal Grothendieck arena.
/// add = coefficient sum, mul = convolution, no zero coefficients stored.
class GrothElement {
public:
    using Map = std::map<LWeightTerm, std::int64_t>;

    GrothElement() = default;
    static GrothElement one();
    static GrothElement term(LWeightTerm t, std::int64_t c = 1);

    bool is_zero() const { return terms_.empty(); }
    int size() const { return int(terms_.size()); }
    const Map& terms() const { return terms_; }
    std::int64_t coefficient(const LWeightTerm& t) const;

    GrothElement& add(const LWeightTerm& t, std::int64_t c);
    friend GrothElement operator+(const GrothElement& a, const GrothElement& b);
    friend GrothElement operator-(const GrothElement& a, const GrothElement& b);
    friend GrothElement operator*(const GrothElement& a, const GrothElement& b);
    GrothElement operator-() const;
    GrothElement scaled(std::int64_t c) const;
    friend GrothElement operator*(const GrothElement& a, const LWeightTerm& t);

    /// Restriction to terms whose weight is w (used for depth filtration).
    GrothElement weight_layer(const WeightVector& w) const;

    friend bool operator==(const GrothElement& a, const GrothElement& b) { return a.terms_ == b.terms_; }

    std::string str() const;

private:
    Map terms_;
};

/// Building blocks. Node indices are 0-based; shifts k are whole q-powers
/// unless a ShiftIndex is passed explicitly.

/// [Psi_{i,k}] with zero weight part.
LWeightTerm psi(const lie::AlgebraData& g, int i, int k);
/// The one-dimensional class [w].
LWeightTerm bracket(WeightVector w);

/// Y_{i,k} evaluated as an l-weight: [omega_i] Psi_{i,k-d_i} Psi_{i,k+d_i}^{-1}.
LWeightTerm y_monomial(const lie::AlgebraData& g, int i, int k);
/// Y~_{i,k} = [-omega_i] Y_{i,k}: the weightless ratio Psi_{i,k-d_i} Psi_{i,k+d_i}^{-1}.
LWeightTerm y_tilde(const lie::AlgebraData& g, int i, int k);

/// A~_{i,k} = Psi_{i,k-2d_i} Psi_{i,k+2d_i}^{-1} times the neighbor factors
/// (shifts +-d_j for d_j > 1 neighbors, +-d_i for d_j = 1 neighbors).
LWeightTerm a_tilde(const lie::AlgebraData& g, int i, int k);
/// A_{i,k} = [alpha_i] A~_{i,k}.
LWeightTerm a_monomial(const lie::AlgebraData& g, int i, int k);

/// Psi~_{i,k} = Psi_{i,k}^{-1} prod_{C_ij=-1} Psi_{j,k+d_i}
///   prod_{C_ij=-2} Psi_{j,k} Psi_{j,k+2}  prod_{C_ij=-3} Psi_{j,k-1} Psi_{j,k+1} Psi_{j,k+3}.
LWeightTerm psi_tilde(const lie::AlgebraData& g, int i, int k);

/// Deterministic textual form, e.g. "P[1,-1] P[1,+1]^-1 @w(0,0)"; parse is
/// the exact inverse. Node indices are printed 1-based.
std::string to_string(const LWeightTerm& t);
std::string to_string(const GrothElement& e);
LWeightTerm parse_term(const std::string& s, int rank);
GrothElement parse_element(const std::string& s, int rank);

} // namespace qqkit::lw
