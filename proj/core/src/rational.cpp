#include "qqkit/rational.hpp"

#include <ostream>

namespace qqkit {

namespace {
__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}
} // namespace

Rational Rational::fromWide(wide n, wide d) {
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    wide g = gcd128(n, d);
    if (g > 1) { n /= g; d /= g; }
    constexpr wide lo = wide(INT64_MIN), hi = wide(INT64_MAX);
    if (n < lo || n > hi || d > hi)
        throw std::overflow_error("Rational: overflow");
    Rational r;
    r.num_ = std::int64_t(n);
    r.den_ = std::int64_t(d);
    return r;
}

void Rational::normalize() {
    *this = fromWide(wide(num_), wide(den_));
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
}

Rational pow(Rational base, int e) {
    if (e < 0) return pow(Rational(1) / base, -e);
    Rational out(1);
    while (e > 0) {
        if (e & 1) out *= base;
        base *= base;
        e >>= 1;
    }
    return out;
}

} // namespace qqkit
