#include "doctest.h"

#include "qqkit/laurent.hpp"
#include "qqkit/rational.hpp"

using qqkit::Rational;
using qqkit::RationalLaurent;

TEST_CASE("rational arithmetic and normalization") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-3, -6) == Rational(1, 2));
    CHECK(Rational(3, -6) == Rational(-1, 2));
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(1, 3) * Rational(3, 5) == Rational(1, 5));
    CHECK(Rational(7, 2) / Rational(7, 2) == Rational(1));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(pow(Rational(2, 3), 3) == Rational(8, 27));
    CHECK(pow(Rational(2), -2) == Rational(1, 4));
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
    CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
}

TEST_CASE("laurent polynomial basics") {
    RationalLaurent p = RationalLaurent::t(2) - RationalLaurent(1);   // t^2 - 1
    RationalLaurent q = RationalLaurent::t(-2) - RationalLaurent(1);  // t^-2 - 1
    CHECK(p * q == -(p + q));  // (t^2-1)(t^-2-1) = 2 - t^2 - t^-2
    CHECK(p.derivative() == RationalLaurent::monomial(Rational(2), 1));
    CHECK(RationalLaurent::t(-3).derivative() == RationalLaurent::monomial(Rational(-3), -4));
    CHECK(p.eval(Rational(3)) == Rational(8));
    CHECK(p.min_degree() == 0);
    CHECK(p.max_degree() == 2);
}
