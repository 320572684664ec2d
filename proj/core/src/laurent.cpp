#include "qqkit/laurent.hpp"

#include <sstream>
#include <stdexcept>

namespace qqkit {

RationalLaurent RationalLaurent::monomial(const Rational& c, int power) {
    RationalLaurent p;
    p.set(power, c);
    return p;
}

Rational RationalLaurent::coefficient(int power) const {
    auto it = coef_.find(power);
    return it == coef_.end() ? Rational(0) : it->second;
}

void RationalLaurent::set(int power, const Rational& c) {
    if (c.is_zero()) coef_.erase(power);
    else coef_[power] = c;
}

int RationalLaurent::min_degree() const {
    if (coef_.empty()) throw std::logic_error("min_degree of zero polynomial");
    return coef_.begin()->first;
}

int RationalLaurent::max_degree() const {
    if (coef_.empty()) throw std::logic_error("max_degree of zero polynomial");
    return coef_.rbegin()->first;
}

RationalLaurent RationalLaurent::operator-() const {
    RationalLaurent out;
    for (const auto& [p, c] : coef_) out.coef_.emplace(p, -c);
    return out;
}

RationalLaurent operator+(const RationalLaurent& a, const RationalLaurent& b) {
    RationalLaurent out = a;
    for (const auto& [p, c] : b.coef_) out.set(p, out.coefficient(p) + c);
    return out;
}

RationalLaurent operator-(const RationalLaurent& a, const RationalLaurent& b) {
    RationalLaurent out = a;
    for (const auto& [p, c] : b.coef_) out.set(p, out.coefficient(p) - c);
    return out;
}

RationalLaurent operator*(const RationalLaurent& a, const RationalLaurent& b) {
    RationalLaurent out;
    for (const auto& [pa, ca] : a.coef_)
        for (const auto& [pb, cb] : b.coef_) out.set(pa + pb, out.coefficient(pa + pb) + ca * cb);
    return out;
}

RationalLaurent RationalLaurent::derivative() const {
    RationalLaurent out;
    for (const auto& [p, c] : coef_)
        if (p != 0) out.set(p - 1, c * Rational(p));
    return out;
}

Rational RationalLaurent::eval(const Rational& x) const {
    Rational out(0);
    for (const auto& [p, c] : coef_) out += c * pow(x, p);
    return out;
}

std::complex<double> RationalLaurent::eval(std::complex<double> x) const {
    std::complex<double> out = 0;
    for (const auto& [p, c] : coef_) out += c.to_double() * std::pow(x, p);
    return out;
}

std::string RationalLaurent::str(const std::string& var) const {
    if (coef_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [p, c] : coef_) {
        if (!first) os << " + ";
        first = false;
        os << c.str();
        if (p != 0) os << '*' << var << '^' << p;
    }
    return os.str();
}

} // namespace qqkit
