#include "qqkit/lweight.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace qqkit::lw {

ShiftIndex::ShiftIndex(int n, int d) : num(n), den(d) {
    if (d != 1 && d != 2) throw std::invalid_argument("ShiftIndex: denominator must be 1 or 2");
    if (den == 2 && num % 2 == 0) { num /= 2; den = 1; }
}

std::string ShiftIndex::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/2";
}

PsiMonomial PsiMonomial::psi(int node, ShiftIndex k, std::int64_t e) {
    PsiMonomial m;
    m.mul(node, k, e);
    return m;
}

std::int64_t PsiMonomial::exponent(int node, ShiftIndex k) const {
    auto it = exp_.find({node, k.half_units()});
    return it == exp_.end() ? 0 : it->second;
}

PsiMonomial& PsiMonomial::mul(int node, ShiftIndex k, std::int64_t e) {
    if (e == 0) return *this;
    Key key{node, k.half_units()};
    auto [it, fresh] = exp_.emplace(key, e);
    if (!fresh) {
        it->second += e;
        if (it->second == 0) exp_.erase(it);
    }
    return *this;
}

PsiMonomial operator*(const PsiMonomial& a, const PsiMonomial& b) {
    PsiMonomial out = a;
    for (const auto& [k, e] : b.exp_) {
        auto [it, fresh] = out.exp_.emplace(k, e);
        if (!fresh) {
            it->second += e;
            if (it->second == 0) out.exp_.erase(it);
        }
    }
    return out;
}

PsiMonomial PsiMonomial::inverse() const {
    PsiMonomial out;
    for (const auto& [k, e] : exp_) out.exp_.emplace(k, -e);
    return out;
}

PsiMonomial PsiMonomial::power(std::int64_t e) const {
    PsiMonomial out;
    if (e == 0) return out;
    for (const auto& [k, v] : exp_) out.exp_.emplace(k, v * e);
    return out;
}

int PsiMonomial::min_half_shift() const {
    if (exp_.empty()) throw std::logic_error("min_half_shift on identity monomial");
    int m = exp_.begin()->first.second;
    for (const auto& [k, e] : exp_) {
        (void)e;
        m = std::min(m, k.second);
    }
    return m;
}

std::string PsiMonomial::str() const {
    std::ostringstream os;
    bool sep = false;
    for (const auto& [k, e] : exp_) {
        if (sep) os << ' ';
        sep = true;
        os << "P[" << (k.first + 1) << ',';
        if (k.second % 2 == 0) os << (k.second / 2);
        else os << k.second << "/2";
        os << ']';
        if (e != 1) os << '^' << e;
    }
    return os.str();
}

WeightVector WeightVector::fundamental(int rank, int i, std::int64_t num, int den) {
    if (den != 1 && den != 2) throw std::invalid_argument("WeightVector: denominator must divide 2");
    WeightVector w(rank);
    w.half_.at(i) = (den == 1 ? 2 * num : num);
    return w;
}

WeightVector WeightVector::simple_root(const lie::AlgebraData& g, int i, std::int64_t num, int den) {
    if (den != 1 && den != 2) throw std::invalid_argument("WeightVector: denominator must divide 2");
    WeightVector w(g.rank);
    for (int j = 0; j < g.rank; ++j)
        w.half_[j] = g.cartan[j][i] * (den == 1 ? 2 * num : num);
    return w;
}

bool WeightVector::is_zero() const {
    for (auto v : half_)
        if (v != 0) return false;
    return true;
}

int WeightVector::cmp(const WeightVector& a, const WeightVector& b) {
    const size_t n = std::max(a.half_.size(), b.half_.size());
    for (size_t j = 0; j < n; ++j) {
        const std::int64_t av = j < a.half_.size() ? a.half_[j] : 0;
        const std::int64_t bv = j < b.half_.size() ? b.half_[j] : 0;
        if (av != bv) return av < bv ? -1 : 1;
    }
    return 0;
}

WeightVector WeightVector::operator+(const WeightVector& o) const {
    if (half_.empty()) return o;
    if (o.half_.empty()) return *this;
    if (half_.size() != o.half_.size())
        throw std::invalid_argument("WeightVector: rank mismatch");
    WeightVector w(rank());
    for (int j = 0; j < rank(); ++j) w.half_[j] = half_[j] + o.half_[j];
    return w;
}

WeightVector WeightVector::operator-() const {
    WeightVector w(rank());
    for (int j = 0; j < rank(); ++j) w.half_[j] = -half_[j];
    return w;
}

WeightVector WeightVector::scaled(std::int64_t m) const {
    WeightVector w(rank());
    for (int j = 0; j < rank(); ++j) w.half_[j] = half_[j] * m;
    return w;
}

std::string WeightVector::str() const {
    std::ostringstream os;
    os << "w(";
    for (int j = 0; j < rank(); ++j) {
        if (j) os << ',';
        if (half_[j] % 2 == 0) os << half_[j] / 2;
        else os << half_[j] << "/2";
    }
    os << ')';
    return os.str();
}

std::string LWeightTerm::str() const { return to_string(*this); }

GrothElement GrothElement::one() { return term(LWeightTerm{}); }

GrothElement GrothElement::term(LWeightTerm t, std::int64_t c) {
    GrothElement e;
    e.add(t, c);
    return e;
}

std::int64_t GrothElement::coefficient(const LWeightTerm& t) const {
    auto it = terms_.find(t);
    return it == terms_.end() ? 0 : it->second;
}

GrothElement& GrothElement::add(const LWeightTerm& t, std::int64_t c) {
    if (c == 0) return *this;
    auto [it, fresh] = terms_.emplace(t, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
    return *this;
}

GrothElement operator+(const GrothElement& a, const GrothElement& b) {
    GrothElement out = a;
    for (const auto& [t, c] : b.terms_) out.add(t, c);
    return out;
}

GrothElement operator-(const GrothElement& a, const GrothElement& b) {
    GrothElement out = a;
    for (const auto& [t, c] : b.terms_) out.add(t, -c);
    return out;
}

GrothElement operator*(const GrothElement& a, const GrothElement& b) {
    GrothElement out;
    for (const auto& [ta, ca] : a.terms_)
        for (const auto& [tb, cb] : b.terms_) out.add(ta * tb, ca * cb);
    return out;
}

GrothElement GrothElement::operator-() const { return scaled(-1); }

GrothElement GrothElement::scaled(std::int64_t c) const {
    GrothElement out;
    if (c == 0) return out;
    for (const auto& [t, v] : terms_) out.terms_.emplace(t, v * c);
    return out;
}

GrothElement operator*(const GrothElement& a, const LWeightTerm& t) {
    GrothElement out;
    for (const auto& [ta, ca] : a.terms_) out.add(ta * t, ca);
    return out;
}

GrothElement GrothElement::weight_layer(const WeightVector& w) const {
    GrothElement out;
    for (const auto& [t, c] : terms_)
        if (t.weight == w) out.add(t, c);
    return out;
}

std::string GrothElement::str() const { return to_string(*this); }

// ---------------------------------------------------------------------------
// building blocks

LWeightTerm psi(const lie::AlgebraData& g, int i, int k) {
    return {PsiMonomial::psi(i, ShiftIndex(k)), WeightVector(g.rank)};
}

LWeightTerm bracket(WeightVector w) { return {PsiMonomial{}, std::move(w)}; }

LWeightTerm y_tilde(const lie::AlgebraData& g, int i, int k) {
    PsiMonomial m;
    m.mul(i, ShiftIndex(k - g.d(i)), 1);
    m.mul(i, ShiftIndex(k + g.d(i)), -1);
    return {m, WeightVector(g.rank)};
}

LWeightTerm y_monomial(const lie::AlgebraData& g, int i, int k) {
    return bracket(WeightVector::fundamental(g.rank, i)) * y_tilde(g, i, k);
}

LWeightTerm a_tilde(const lie::AlgebraData& g, int i, int k) {
    PsiMonomial m;
    m.mul(i, ShiftIndex(k - 2 * g.d(i)), 1);
    m.mul(i, ShiftIndex(k + 2 * g.d(i)), -1);
    for (int j = 0; j < g.rank; ++j) {
        if (!g.adjacent(i, j)) continue;
        const int s = g.d(j) > 1 ? g.d(j) : g.d(i);
        m.mul(j, ShiftIndex(k - s), -1);
        m.mul(j, ShiftIndex(k + s), 1);
    }
    return {m, WeightVector(g.rank)};
}

LWeightTerm a_monomial(const lie::AlgebraData& g, int i, int k) {
    return bracket(WeightVector::simple_root(g, i)) * a_tilde(g, i, k);
}

LWeightTerm psi_tilde(const lie::AlgebraData& g, int i, int k) {
    PsiMonomial m;
    m.mul(i, ShiftIndex(k), -1);
    for (int j = 0; j < g.rank; ++j) {
        switch (i == j ? 0 : g.cartan[i][j]) {
            case -1:
                m.mul(j, ShiftIndex(k + g.d(i)), 1);
                break;
            case -2:
                m.mul(j, ShiftIndex(k), 1);
                m.mul(j, ShiftIndex(k + 2), 1);
                break;
            case -3:
                m.mul(j, ShiftIndex(k - 1), 1);
                m.mul(j, ShiftIndex(k + 1), 1);
                m.mul(j, ShiftIndex(k + 3), 1);
                break;
            default:
                break;
        }
    }
    return {m, WeightVector(g.rank)};
}

// ---------------------------------------------------------------------------
// serialization

std::string to_string(const LWeightTerm& t) {
    std::string s = t.psi.str();
    if (!s.empty()) s += ' ';
    s += '@' + t.weight.str();
    return s;
}

std::string to_string(const GrothElement& e) {
    if (e.is_zero()) return "0";
    std::ostringstream os;
    bool sep = false;
    for (const auto& [t, c] : e.terms()) {
        if (sep) os << " + ";
        sep = true;
        os << c << " * {" << to_string(t) << '}';
    }
    return os.str();
}

namespace {

void skip_ws(const std::string& s, size_t& p) {
    while (p < s.size() && (s[p] == ' ' || s[p] == '\t')) ++p;
}

long long parse_int(const std::string& s, size_t& p) {
    skip_ws(s, p);
    size_t start = p;
    if (p < s.size() && (s[p] == '-' || s[p] == '+')) ++p;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
    if (p == start) throw std::invalid_argument("parse: expected integer in '" + s + "'");
    return std::stoll(s.substr(start, p - start));
}

// "n" or "n/2" as half-units
std::int64_t parse_half(const std::string& s, size_t& p) {
    long long n = parse_int(s, p);
    if (p < s.size() && s[p] == '/') {
        ++p;
        long long d = parse_int(s, p);
        if (d != 2) throw std::invalid_argument("parse: denominator must be 2");
        return n;
    }
    return 2 * n;
}

} // namespace

LWeightTerm parse_term(const std::string& s, int rank) {
    PsiMonomial m;
    size_t p = 0;
    skip_ws(s, p);
    while (p < s.size() && s[p] == 'P') {
        if (s.compare(p, 2, "P[") != 0) throw std::invalid_argument("parse: expected P[");
        p += 2;
        long long node = parse_int(s, p);
        if (p >= s.size() || s[p] != ',') throw std::invalid_argument("parse: expected ,");
        ++p;
        std::int64_t half = parse_half(s, p);
        if (p >= s.size() || s[p] != ']') throw std::invalid_argument("parse: expected ]");
        ++p;
        long long e = 1;
        if (p < s.size() && s[p] == '^') {
            ++p;
            e = parse_int(s, p);
        }
        if (node < 1 || node > rank) throw std::invalid_argument("parse: node out of range");
        m.mul(int(node - 1), ShiftIndex(int(half), 2), e);
        skip_ws(s, p);
    }
    if (s.compare(p, 3, "@w(") != 0) throw std::invalid_argument("parse: expected @w(");
    p += 3;
    WeightVector w(rank);
    std::vector<std::int64_t> halves;
    for (int j = 0; j < rank; ++j) {
        halves.push_back(parse_half(s, p));
        if (j + 1 < rank) {
            if (p >= s.size() || s[p] != ',') throw std::invalid_argument("parse: expected ,");
            ++p;
        }
    }
    if (p >= s.size() || s[p] != ')') throw std::invalid_argument("parse: expected )");
    ++p;
    skip_ws(s, p);
    if (p != s.size()) throw std::invalid_argument("parse: trailing characters");
    for (int j = 0; j < rank; ++j)
        if (halves[j] % 2 == 0) w = w + WeightVector::fundamental(rank, j, halves[j] / 2, 1);
        else w = w + WeightVector::fundamental(rank, j, halves[j], 2);
    return {m, w};
}

GrothElement parse_element(const std::string& s, int rank) {
    GrothElement e;
    size_t p = 0;
    skip_ws(s, p);
    if (s.compare(p, 1, "0") == 0 && p + 1 >= s.size()) return e;
    while (p < s.size()) {
        long long c = parse_int(s, p);
        skip_ws(s, p);
        if (s.compare(p, 1, "*") != 0) throw std::invalid_argument("parse: expected *");
        ++p;
        skip_ws(s, p);
        if (p >= s.size() || s[p] != '{') throw std::invalid_argument("parse: expected {");
        size_t close = s.find('}', p);
        if (close == std::string::npos) throw std::invalid_argument("parse: expected }");
        e.add(parse_term(s.substr(p + 1, close - p - 1), rank), c);
        p = close + 1;
        skip_ws(s, p);
        if (p < s.size()) {
            if (s[p] != '+') throw std::invalid_argument("parse: expected +");
            ++p;
            skip_ws(s, p);
        }
    }
    return e;
}

} // namespace qqkit::lw
