#include "qqkit/oper_exact.hpp"

#include <sstream>
#include <stdexcept>

namespace qqkit::oper {

DiffOp DiffOp::d() {
    DiffOp out;
    out.coef_.resize(2);
    out.coef_[1] = RationalLaurent(1);
    return out;
}

int DiffOp::order() const { return int(coef_.size()) - 1; }

const RationalLaurent& DiffOp::coefficient(int m) const {
    static const RationalLaurent zero;
    if (m < 0 || m >= int(coef_.size())) return zero;
    return coef_[m];
}

bool DiffOp::is_zero() const { return coef_.empty(); }

void DiffOp::trim() {
    while (!coef_.empty() && coef_.back().is_zero()) coef_.pop_back();
}

DiffOp operator+(const DiffOp& a, const DiffOp& b) {
    DiffOp out;
    out.coef_.resize(std::max(a.coef_.size(), b.coef_.size()));
    for (size_t m = 0; m < out.coef_.size(); ++m)
        out.coef_[m] = a.coefficient(int(m)) + b.coefficient(int(m));
    out.trim();
    return out;
}

DiffOp operator-(const DiffOp& a, const DiffOp& b) { return a + (-b); }

DiffOp DiffOp::operator-() const {
    DiffOp out = *this;
    for (auto& c : out.coef_) c = -c;
    return out;
}

DiffOp DiffOp::scaled(const Rational& c) const {
    DiffOp out = *this;
    for (auto& f : out.coef_) f = f * RationalLaurent(c);
    out.trim();
    return out;
}

DiffOp operator*(const DiffOp& a, const DiffOp& b) {
    // d^i f = sum_k binom(i,k) f^{(k)} d^{i-k}
    DiffOp out;
    for (int i = 0; i <= a.order(); ++i) {
        if (a.coefficient(i).is_zero()) continue;
        for (int j = 0; j <= b.order(); ++j) {
            if (b.coefficient(j).is_zero()) continue;
            RationalLaurent f = b.coefficient(j);
            Rational binom(1);
            for (int k = 0; k <= i; ++k) {
                // term a_i binom(i,k) f^{(k)} d^{i-k+j}
                const int ord = i - k + j;
                if (int(out.coef_.size()) <= ord) out.coef_.resize(ord + 1);
                out.coef_[ord] += a.coefficient(i) * f * RationalLaurent(binom);
                f = f.derivative();
                binom = binom * Rational(i - k) / Rational(k + 1);
            }
        }
    }
    out.trim();
    return out;
}

bool operator==(const DiffOp& a, const DiffOp& b) { return (a - b).is_zero(); }

RationalLaurent DiffOp::apply(const RationalLaurent& f) const {
    RationalLaurent out;
    RationalLaurent der = f;
    for (int m = 0; m <= order(); ++m) {
        out += coefficient(m) * der;
        der = der.derivative();
    }
    return out;
}

std::string DiffOp::str() const {
    if (coef_.empty()) return "0";
    std::ostringstream os;
    for (int m = order(); m >= 0; --m) {
        if (coefficient(m).is_zero()) continue;
        if (os.tellp() > 0) os << " + ";
        os << '(' << coefficient(m).str() << ")";
        if (m > 0) os << " d^" << m;
    }
    return os.str();
}

// ---------------------------------------------------------------------------

MatrixDiffOp MatrixDiffOp::from_upper(const std::vector<std::vector<RationalLaurent>>& upper) {
    const int r = int(upper.size());
    MatrixDiffOp op;
    op.m.assign(r, std::vector<RationalLaurent>(r));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            if (j >= i) op.m[i][j] = upper[i][j];
    for (int i = 1; i < r; ++i) op.m[i][i - 1] = RationalLaurent(1);
    op.check_pre_reduction();
    return op;
}

void MatrixDiffOp::check_pre_reduction() const {
    const int r = size();
    if (r < 2 || r > 5) throw std::invalid_argument("MatrixDiffOp: size must be 2..5");
    RationalLaurent trace;
    for (int i = 0; i < r; ++i) {
        if (int(m[i].size()) != r) throw std::invalid_argument("MatrixDiffOp: ragged matrix");
        trace += m[i][i];
        for (int j = 0; j < r; ++j) {
            if (j == i - 1 && m[i][j] != RationalLaurent(1))
                throw std::invalid_argument("MatrixDiffOp: subdiagonal must be 1");
            if (j < i - 1 && !m[i][j].is_zero())
                throw std::invalid_argument("MatrixDiffOp: entries below the subdiagonal must vanish");
        }
    }
    if (!trace.is_zero()) throw std::invalid_argument("MatrixDiffOp: trace must vanish (sl_r)");
}

namespace {

using Mat = std::vector<std::vector<RationalLaurent>>;

Mat zeros(int r) { return Mat(r, std::vector<RationalLaurent>(r)); }

Mat matmul(const Mat& a, const Mat& b) {
    const int r = int(a.size());
    Mat out = zeros(r);
    for (int i = 0; i < r; ++i)
        for (int k = 0; k < r; ++k) {
            if (a[i][k].is_zero()) continue;
            for (int j = 0; j < r; ++j)
                if (!b[k][j].is_zero()) out[i][j] += a[i][k] * b[k][j];
        }
    return out;
}

Mat identity(int r) {
    Mat out = zeros(r);
    for (int i = 0; i < r; ++i) out[i][i] = RationalLaurent(1);
    return out;
}

/// Inverse of a unipotent upper-triangular matrix via the finite Neumann
/// series (strictly upper part is nilpotent).
Mat unipotent_inverse(const Mat& n) {
    const int r = int(n.size());
    Mat u = n;
    for (int i = 0; i < r; ++i) u[i][i] = RationalLaurent();  // U = N - I
    Mat out = identity(r);
    Mat pw = identity(r);
    Rational sign(1);
    for (int k = 1; k < r; ++k) {
        pw = matmul(pw, u);
        sign = -sign;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) out[i][j] += pw[i][j] * RationalLaurent(sign);
    }
    return out;
}

} // namespace

MatrixDiffOp gauge(const MatrixDiffOp& op, const Mat& n_upper) {
    const int r = op.size();
    Mat n = n_upper;
    for (int i = 0; i < r; ++i) {
        if (!n[i][i].is_zero() && n[i][i] != RationalLaurent(1))
            throw std::invalid_argument("gauge: N must be unipotent upper-triangular");
        n[i][i] = RationalLaurent(1);
        for (int j = 0; j < i; ++j)
            if (!n[i][j].is_zero()) throw std::invalid_argument("gauge: N must be upper-triangular");
    }
    Mat ninv = unipotent_inverse(n);
    Mat nm = matmul(n, op.m);
    Mat nmninv = matmul(nm, ninv);
    // N' N^{-1}
    Mat nprime = zeros(r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) nprime[i][j] = n[i][j].derivative();
    Mat corr = matmul(nprime, ninv);
    MatrixDiffOp out;
    out.m = zeros(r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) out.m[i][j] = nmninv[i][j] - corr[i][j];
    return out;
}

std::vector<RationalLaurent> canonical_form(const MatrixDiffOp& op) {
    op.check_pre_reduction();
    const int r = op.size();
    MatrixDiffOp cur = op;
    // Clear each diagonal level l = 0..r-2 below the first row, using gauges
    // one level up: N = I + sum_a c_a e_{a,a+l+1} moves weight from entry
    // (a+1, a+1+l) to (a, a+l). Lower levels are untouched, so one sweep per
    // level suffices.
    for (int lev = 0; lev <= r - 2; ++lev) {
        Mat n = identity(r);
        // c_{a-1} = cur(a, a+lev) + c_a, solved from the bottom of the diagonal
        RationalLaurent carry;  // c_a for a one past the current row
        for (int a1 = r - lev; a1 >= 2; --a1) {
            // a1 is the 1-based row of the entry being cleared
            RationalLaurent c = cur.m[a1 - 1][a1 - 1 + lev] + carry;
            n[a1 - 2][a1 - 2 + lev + 1] = c;
            carry = c;
        }
        cur = gauge(cur, n);
        for (int a1 = 2; a1 <= r - lev; ++a1)
            if (!cur.m[a1 - 1][a1 - 1 + lev].is_zero())
                throw std::logic_error("canonical_form: level not cleared");
    }
    if (!cur.m[0][0].is_zero())
        throw std::logic_error("canonical_form: nonzero corner after reduction");
    std::vector<RationalLaurent> v;
    for (int j = 1; j < r; ++j) v.push_back(cur.m[0][j]);
    return v;
}

DiffOp scalar_eliminate(const MatrixDiffOp& op) {
    const int r = op.size();
    // psi_{i-1} = -(d psi_i + sum_{j>=i-1... } M_{ij} psi_j), using rows r..2;
    // row 1 then gives the scalar operator on psi_r.
    std::vector<DiffOp> rep(r);  // rep[j]: psi_{j+1} = rep[j][psi_r]
    rep[r - 1] = DiffOp::identity();
    for (int i = r; i >= 2; --i) {
        DiffOp acc = DiffOp::d() * rep[i - 1];
        for (int j = i - 1; j <= r - 1; ++j) {
            if (op.m[i - 1][j].is_zero()) continue;
            acc = acc + DiffOp(op.m[i - 1][j]) * rep[j];
        }
        rep[i - 2] = -acc;
    }
    DiffOp total = DiffOp::d() * rep[0];
    for (int j = 0; j <= r - 1; ++j) {
        if (op.m[0][j].is_zero()) continue;
        total = total + DiffOp(op.m[0][j]) * rep[j];
    }
    // leading coefficient is (-1)^{r-1}
    if (r % 2 == 0) total = -total;
    if (total.coefficient(total.order()) != RationalLaurent(1))
        throw std::logic_error("scalar_eliminate: operator not monic after normalization");
    return total;
}

DiffOp miura_operator(const std::vector<RationalLaurent>& u) {
    const int r = int(u.size());
    if (r < 1 || r > 5) throw std::invalid_argument("miura: r must be 1..5");
    RationalLaurent trace;
    for (const auto& ui : u) trace += ui;
    if (!trace.is_zero()) throw std::invalid_argument("miura: sum u_i must vanish");
    DiffOp out = DiffOp::identity();
    for (int i = 0; i < r; ++i) out = out * (DiffOp::d() - DiffOp(u[i]));
    return out;
}

std::vector<RationalLaurent> miura(const std::vector<RationalLaurent>& u) {
    DiffOp op = miura_operator(u);
    const int r = int(u.size());
    if (!op.coefficient(r - 1).is_zero())
        throw std::logic_error("miura: d^{r-1} coefficient should vanish for traceless u");
    std::vector<RationalLaurent> c;
    for (int i = 1; i <= r - 1; ++i) c.push_back(op.coefficient(r - i - 1));
    return c;
}

std::vector<Rational> c_of_nu(const std::vector<Rational>& nu) {
    const int r = int(nu.size());
    if (r < 1 || r > 5) throw std::invalid_argument("c_of_nu: r must be 1..5");
    Rational trace(0);
    for (const auto& n : nu) trace += n;
    if (!trace.is_zero()) throw std::invalid_argument("c_of_nu: sum nu_i must vanish");
    // Both sides of the defining identity act diagonally on powers z^s:
    //   (d - nu_1/z)...(d - nu_r/z) z^s = P(s) z^{s-r},
    //   P(s) = prod_i (s - r + i - nu_i),
    // while the normal form gives P(s) = s^(r) + sum_i (-1)^i c_i s^(r-i-1)
    // with falling factorials s^(m). Evaluating at s = 0, 1, ..., r-2 makes
    // the system triangular in the c_i.
    auto P = [&](const Rational& s) {
        Rational p(1);
        for (int i = 1; i <= r; ++i) p *= (s - Rational(r - i) - nu[i - 1]);
        return p;
    };
    auto falling = [](const Rational& s, int m) {
        Rational f(1);
        for (int j = 0; j < m; ++j) f *= (s - Rational(j));
        return f;
    };
    auto sign = [](int i) { return i % 2 == 0 ? Rational(1) : Rational(-1); };
    std::vector<Rational> c(r - 1, Rational(0));
    for (int s = 0; s <= r - 2; ++s) {
        const Rational sv(s);
        const int i_new = r - 1 - s;  // the unknown entering at this level
        Rational rhs = P(sv) - falling(sv, r);
        for (int i = i_new + 1; i <= r - 1; ++i)
            rhs -= sign(i) * c[i - 1] * falling(sv, r - i - 1);
        c[i_new - 1] = rhs / (sign(i_new) * falling(sv, r - i_new - 1));
    }
    return c;
}

} // namespace qqkit::oper
