#pragma once

#include <complex>
#include <map>
#include <string>

#include "qqkit/rational.hpp"

namespace qqkit {

/// Laurent polynomial in one variable with exact rational coefficients.
class RationalLaurent {
public:
    using Map = std::map<int, Rational>;

    RationalLaurent() = default;
    RationalLaurent(const Rational& c) { set(0, c); }
    RationalLaurent(std::int64_t c) { set(0, Rational(c)); }

    static RationalLaurent monomial(const Rational& c, int power);
    /// The variable t itself.
    static RationalLaurent t(int power = 1) { return monomial(Rational(1), power); }

    bool is_zero() const { return coef_.empty(); }
    const Map& coefficients() const { return coef_; }
    Rational coefficient(int power) const;
    void set(int power, const Rational& c);

    int min_degree() const;  // throws on zero polynomial
    int max_degree() const;

    RationalLaurent operator-() const;
    friend RationalLaurent operator+(const RationalLaurent& a, const RationalLaurent& b);
    friend RationalLaurent operator-(const RationalLaurent& a, const RationalLaurent& b);
    friend RationalLaurent operator*(const RationalLaurent& a, const RationalLaurent& b);
    RationalLaurent& operator+=(const RationalLaurent& o) { return *this = *this + o; }
    RationalLaurent& operator-=(const RationalLaurent& o) { return *this = *this - o; }
    RationalLaurent& operator*=(const RationalLaurent& o) { return *this = *this * o; }

    friend bool operator==(const RationalLaurent& a, const RationalLaurent& b) {
        return a.coef_ == b.coef_;
    }
    friend bool operator!=(const RationalLaurent& a, const RationalLaurent& b) { return !(a == b); }

    /// d/dt.
    RationalLaurent derivative() const;

    Rational eval(const Rational& x) const;            // throws if negative powers at x=0
    std::complex<double> eval(std::complex<double> x) const;

    std::string str(const std::string& var = "t") const;

private:
    Map coef_;  // power -> coefficient, no zeros stored
};

} // namespace qqkit
