#pragma once

#include <vector>

#include "qqkit/laurent.hpp"

namespace qqkit::oper {

/// Scalar differential operator sum_m c_m(t) d^m with exact Laurent
/// coefficients. Composition is the noncommutative product.
class DiffOp {
public:
    DiffOp() = default;
    explicit DiffOp(RationalLaurent c0) { coef_.push_back(std::move(c0)); }

    static DiffOp identity() { return DiffOp(RationalLaurent(1)); }
    static DiffOp d();  // the derivative itself

    int order() const;
    const RationalLaurent& coefficient(int m) const;
    bool is_zero() const;

    friend DiffOp operator+(const DiffOp& a, const DiffOp& b);
    friend DiffOp operator-(const DiffOp& a, const DiffOp& b);
    /// Composition a after b.
    friend DiffOp operator*(const DiffOp& a, const DiffOp& b);
    DiffOp operator-() const;
    DiffOp scaled(const Rational& c) const;

    friend bool operator==(const DiffOp& a, const DiffOp& b);

    /// Applies the operator to c(t).
    RationalLaurent apply(const RationalLaurent& f) const;

    std::string str() const;

private:
    void trim();
    std::vector<RationalLaurent> coef_;  // index = derivative order
};

/// First-order matrix operator d_t + M(t) in pre-reduction form: unit
/// subdiagonal, everything else at or above the diagonal, exact Laurent
/// entries, zero trace (sl_r).
struct MatrixDiffOp {
    std::vector<std::vector<RationalLaurent>> m;

    int size() const { return int(m.size()); }
    static MatrixDiffOp from_upper(const std::vector<std::vector<RationalLaurent>>& upper);
    /// Throws std::invalid_argument unless the subdiagonal is 1, entries
    /// below it vanish, and the trace is zero.
    void check_pre_reduction() const;
};

/// Unique companion-form coefficients v_1..v_{r-1} (first row of the
/// canonical operator), obtained by clearing entries diagonal by diagonal
/// with strictly upper-triangular gauge transformations. r <= 5.
std::vector<RationalLaurent> canonical_form(const MatrixDiffOp& op);

/// Gauge transform by a unipotent upper-triangular N: M -> N M N^{-1} - N' N^{-1}.
MatrixDiffOp gauge(const MatrixDiffOp& op, const std::vector<std::vector<RationalLaurent>>& n_upper);

/// Independent scalar route: eliminates psi_1..psi_{r-1} from (d+M)Psi = 0
/// and returns the order-r scalar operator annihilating psi_r, normalized
/// monic. Gauge-invariant; used as the oracle for canonical_form.
DiffOp scalar_eliminate(const MatrixDiffOp& op);

/// Expands (d - u_1)(d - u_2)...(d - u_r), leftmost factor outermost.
/// Requires sum u_i = 0; the result is d^r + sum_i c_i(t) d^{r-i-1} and the
/// returned vector is c_1..c_{r-1}. r <= 5.
std::vector<RationalLaurent> miura(const std::vector<RationalLaurent>& u);
DiffOp miura_operator(const std::vector<RationalLaurent>& u);

/// Coefficients c_i(nu) of the regular-singularity normal form
///   d^r + sum_i (-1)^i c_i(nu) z^{-i-1} d^{r-i-1} = (d - nu_1/z)...(d - nu_r/z),
/// for sum nu_i = 0, r <= 5.
std::vector<Rational> c_of_nu(const std::vector<Rational>& nu);

} // namespace qqkit::oper
