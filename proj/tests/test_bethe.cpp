#include "doctest.h"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "qqkit/bethe.hpp"
#include "qqkit/laurent.hpp"
#include "support/gl1_oracle.hpp"
#include "support/testutil.hpp"

using namespace qqkit;
using namespace qqkit::bethe;
using qqkit::Rational;
using qqkit::RationalLaurent;

namespace {

BetheSystem make_sl2(double beta2, Complex v, int degree) {
    BetheSystem sys;
    sys.algebra = &lie::load_algebra('A', 1);
    sys.beta2 = beta2;
    sys.v = {v};
    sys.degrees = {degree};
    sys.branch = {std::vector<int>(degree, 0)};
    return sys;
}

constexpr double kBeta2 = 0.31830988618;  // 1/pi, safely irrational

/// Quantum numbers are inputs; tests pick the branch integers that put the
/// configuration under study on the principal branch.
void pick_branches(BetheSystem& sys, const Roots& roots) {
    auto r = bae_residuals(sys, roots);
    size_t p = 0;
    for (int i = 0; i < sys.algebra->rank; ++i) {
        if (int(sys.branch.size()) <= i) sys.branch.resize(sys.algebra->rank);
        sys.branch[i].resize(sys.degrees[i], 0);
        for (int l = 0; l < sys.degrees[i]; ++l, ++p)
            sys.branch[i][l] += int(std::llround(r[p].imag() / (2.0 * std::numbers::pi)));
    }
}

} // namespace

TEST_CASE("system validation") {
    auto sys = make_sl2(kBeta2, Complex(1.0, 0.3), 1);
    CHECK_NOTHROW(sys.validate());
    sys.beta2 = 0.5;  // q^4 = 1
    CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
    sys.beta2 = 1.0 / 3.0;
    CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
    sys.beta2 = 0.3;  // denominator 10 > safety bound, allowed
    CHECK_NOTHROW(sys.validate());
    sys = make_sl2(kBeta2, Complex(0.0, 0.0), 1);
    CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
    sys = make_sl2(kBeta2, Complex(1.0, 0.0), 1);
    sys.degrees = {-1};
    CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
}

TEST_CASE("single-root family certificate: residual independent of the root") {
    // exact Laurent identity (q^b - 1)/(q^{-b} - 1) = -q^b
    auto cert = certify_single_root_family(lie::load_algebra('A', 1), 0);
    CHECK(cert.b_ii == 2);  // v^2 = q^2
    auto cert_a2 = certify_single_root_family(lie::load_algebra('A', 2), 0);
    CHECK(cert_a2.b_ii == 2);
    auto cert_g2 = certify_single_root_family(lie::load_algebra('G', 2), 0);
    CHECK(cert_g2.b_ii == 6);

    // numerically: with v^2 = q^2 the residual vanishes (mod the 2 pi i
    // branch lattice, which the branch integers select) for any root position
    auto sys = make_sl2(kBeta2, std::exp(Complex(0.0, std::numbers::pi * kBeta2)), 1);
    auto f = build_bae(sys);
    for (double arg : {0.1, 1.0, 2.2, 4.9}) {
        Roots roots{{std::polar(0.5 + arg, arg)}};
        auto r = f(roots);
        REQUIRE(r.size() == 1);
        CHECK(testutil::mod2pi_abs(r[0]) < 1e-12);
    }
    // and with generic v it cannot vanish but stays root-independent
    auto sys2 = make_sl2(kBeta2, Complex(1.17, 0.4), 1);
    auto r1 = bae_residuals(sys2, {{Complex(0.7, 0.2)}});
    auto r2 = bae_residuals(sys2, {{Complex(-1.4, 2.2)}});
    CHECK(testutil::mod2pi_abs(r1[0] - r2[0]) < 1e-12);
    CHECK(testutil::mod2pi_abs(r1[0]) > 1e-3);
}

TEST_CASE("empty system is trivially converged") {
    BetheSystem sys;
    sys.algebra = &lie::load_algebra('A', 2);
    sys.beta2 = kBeta2;
    sys.v = {Complex(1.0, 0.2), Complex(0.8, -0.1)};
    sys.degrees = {0, 0};
    auto res = bae_residuals(sys, {{}, {}});
    CHECK(res.empty());
    auto sol = solve_newton(sys, {{}, {}});
    CHECK(sol.converged);
    CHECK(sol.status == SolveStatus::Converged);
}

TEST_CASE("underdetermined family detection at v = q") {
    const Complex q = std::exp(Complex(0.0, std::numbers::pi * kBeta2));
    auto sys = make_sl2(kBeta2, q, 1);
    auto sol = solve_newton(sys, {{Complex(0.83, 0.41)}});
    CHECK(sol.converged);
    CHECK(sol.status == SolveStatus::Underdetermined);
    CHECK(sol.iterations <= 2);
    CHECK(sol.residual_max < 1e-12);
}

TEST_CASE("sl2 N=2: pair family at v = q^2 against the elimination oracle") {
    // The two equations are linear in (w1, w2): A w1 + B w2 = 0 and
    // B w1 + A w2 = 0, so solutions need A = +-B. A = B forces w2 = -w1 and
    // v^2 = q^4, certified exactly: v^{-2}(q^4 - 1) = 1 - q^{-4} at v^2 = q^4
    // reduces to (q^4 - 1) = q^4 (1 - q^{-4}).
    RationalLaurent lhs = RationalLaurent::t(4) - RationalLaurent(1);
    RationalLaurent rhs = RationalLaurent::t(4) * (RationalLaurent(1) - RationalLaurent::t(-4));
    CHECK(lhs == rhs);

    const Complex q = std::exp(Complex(0.0, std::numbers::pi * kBeta2));
    auto sys = make_sl2(kBeta2, q * q, 2);

    // At v = q^2 Newton lands on the w2 = -w1 ray; solutions are isolated
    // modulo the structural scaling direction, so the status is Converged.
    Roots start{{Complex(0.9, 0.1), Complex(-1.1, 0.05)}};
    pick_branches(sys, start);
    auto sol = solve_newton(sys, start);
    CHECK(sol.converged);
    CHECK(sol.status == SolveStatus::Converged);
    CHECK(sol.residual_max < 1e-10);
    const Complex w1 = sol.roots[0][0], w2 = sol.roots[0][1];
    CHECK(std::abs(w2 + w1) < 1e-8 * std::abs(w1));
}

TEST_CASE("A2 N=(1,0): same one-parameter degeneracy as sl2 N=1") {
    const Complex q = std::exp(Complex(0.0, std::numbers::pi * kBeta2));
    BetheSystem sys;
    sys.algebra = &lie::load_algebra('A', 2);
    sys.beta2 = kBeta2;
    sys.v = {q, Complex(0.77, 0.31)};  // v_1^2 = q^2; v_2 unused (no node-2 roots)
    sys.degrees = {1, 0};
    sys.branch = {{0}, {}};

    // closed form: the node-2 factors are Q_2 = 1, so the equation is the
    // single-root sl2 ratio; residual is independent of w (mod branch) and
    // vanishes at v_1^2 = q^2
    auto f = build_bae(sys);
    auto r_a = f({{Complex(1.0, 0.0)}, {}});
    auto r_b = f({{Complex(-0.3, 1.9)}, {}});
    REQUIRE(r_a.size() == 1);
    CHECK(testutil::mod2pi_abs(r_a[0]) < 1e-12);
    CHECK(testutil::mod2pi_abs(r_a[0] - r_b[0]) < 1e-12);

    for (double arg : {0.0, 1.0, 2.0}) {
        Roots start{{std::polar(1.0, arg)}, {}};
        auto sys_here = sys;
        pick_branches(sys_here, start);
        auto sol = solve_newton(sys_here, start);
        CHECK(sol.converged);
        CHECK(sol.residual_max < 1e-12);
        CHECK(sol.status == SolveStatus::Underdetermined);
    }
}

TEST_CASE("A2 N=(1,1): unique ray of solutions matches the closed form") {
    // Both equations are scale-invariant and linear in the ratio rho = y/w:
    // the j = i factor contributes -q^2 exactly, so
    //   eq1:  (w q^{-1} - y)/(w q - y) = v1^2/q^2 =: A
    //   eq2:  (y q^{-1} - w)/(y q - w) = v2^2/q^2 =: B.
    // Solvability pins B to the rho implied by eq1; with v2 chosen that way
    // Newton converges onto the ray y = rho w.
    const Complex q = std::exp(Complex(0.0, std::numbers::pi * kBeta2));
    const Complex v1(1.1, 0.21);
    const Complex A = v1 * v1 / (q * q);
    const Complex rho = (A * q - 1.0 / q) / (A - 1.0);
    const Complex B = (rho / q - 1.0) / (rho * q - 1.0);
    const Complex v2 = std::sqrt(B * q * q);

    BetheSystem sys;
    sys.algebra = &lie::load_algebra('A', 2);
    sys.beta2 = kBeta2;
    sys.v = {v1, v2};
    sys.degrees = {1, 1};
    sys.branch = {{0}, {0}};

    Roots start{{Complex(1.0, 0.1)}, {rho * Complex(1.2, 0.3)}};
    pick_branches(sys, start);
    auto sol = solve_newton(sys, start);
    REQUIRE(sol.converged);
    CHECK(sol.status == SolveStatus::Converged);
    CHECK(sol.residual_max < 1e-12);

    const Complex w = sol.roots[0][0], y = sol.roots[1][0];
    CHECK(std::abs(y / w - rho) < 1e-9 * std::abs(rho));
    const Complex lhs1 = (1.0 / (v1 * v1)) * (-q * q) * (w / q - y) / (w * q - y);
    CHECK(std::abs(lhs1 + 1.0) < 1e-10);
}

TEST_CASE("collision rejection names the pair") {
    const Complex q = std::exp(Complex(0.0, std::numbers::pi * kBeta2));
    auto sys = make_sl2(kBeta2, Complex(1.0, 0.5), 2);
    Complex w1(0.8, 0.3);
    Roots colliding{{w1, w1 * std::pow(q, 2)}};  // w2 = w1 q^{B_11}
    CHECK_THROWS_AS(bae_residuals(sys, colliding), SingularConfiguration);
    try {
        bae_residuals(sys, colliding);
    } catch (const SingularConfiguration& e) {
        std::string msg = e.what();
        CHECK(msg.find("root") != std::string::npos);
        CHECK(msg.find("collides") != std::string::npos);
    }
    CHECK_THROWS_AS(solve_newton(sys, {{w1, Complex(0.0, 0.0)}}), std::invalid_argument);
    // a colliding start surfaces the same singular-configuration error
    CHECK_THROWS_AS(solve_newton(sys, colliding), SingularConfiguration);
}

TEST_CASE("scaling covariance of the residuals") {
    // multiplying every root by a common c leaves each residual unchanged
    // (the equations are degree-0 homogeneous; in log form the identity
    // holds on the branch lattice)
    BetheSystem sys;
    sys.algebra = &lie::load_algebra('B', 2);
    sys.beta2 = kBeta2;
    sys.v = {Complex(1.2, 0.3), Complex(0.7, -0.4)};
    sys.degrees = {2, 1};
    sys.branch = {{0, 1}, {0}};
    Roots roots{{Complex(1.1, 0.2), Complex(-0.5, 0.9)}, {Complex(0.3, -1.2)}};
    auto base = bae_residuals(sys, roots);
    for (Complex c : {Complex(2.3, 0.0), Complex(0.4, 1.9), Complex(-0.7, 0.1)}) {
        Roots scaled = roots;
        for (auto& node : scaled)
            for (auto& w : node) w *= c;
        auto r = bae_residuals(sys, scaled);
        for (size_t idx = 0; idx < base.size(); ++idx)
            CHECK(testutil::mod2pi_abs(r[idx] - base[idx]) < 1e-12);
    }
}

TEST_CASE("branch integers shift the residual by 2 pi i") {
    auto sys = make_sl2(kBeta2, Complex(1.0, 0.7), 1);
    auto r0 = bae_residuals(sys, {{Complex(0.9, 0.33)}});
    sys.branch = {{1}};
    auto r1 = bae_residuals(sys, {{Complex(0.9, 0.33)}});
    CHECK(std::abs((r0[0] - r1[0]) - Complex(0.0, 2.0 * std::numbers::pi)) < 1e-14);
}

TEST_CASE("functional qq-system residual: constant solution") {
    // all Q = 1, Qt = c: residual v c - v^{-1} c - 1, zero iff c = 1/(v - v^{-1})
    BetheSystem sys = make_sl2(kBeta2, Complex(1.3, 0.4), 0);
    const Complex v = sys.v[0];
    const Complex c = 1.0 / (v - 1.0 / v);
    std::vector<std::function<Complex(Complex)>> Q{[](Complex) { return Complex(1.0); }};
    std::vector<std::function<Complex(Complex)>> Qt{[&](Complex) { return c; }};
    std::vector<Complex> grid{{1.0, 0.0}, {0.3, 0.8}, {-1.1, 0.4}};
    auto res = qsyst_residual(sys, 0, Q, Qt, grid);
    CHECK(res.max_residual < 1e-14);

    std::vector<std::function<Complex(Complex)>> Qt_bad{[&](Complex) { return c + 0.1; }};
    auto res_bad = qsyst_residual(sys, 0, Q, Qt_bad, grid);
    CHECK(res_bad.max_residual > 1e-3);
}

TEST_CASE("lattice transport stays bounded exactly on Bethe data") {
    // sl2 N=2 Bethe pair {w, -w} at v = q^2: the recurrence marched through
    // the first root stays bounded; perturbing the *other* root by 1e-3
    // breaks the Bethe condition at the crossing and blows up by >= 10x.
    const Complex q = std::exp(Complex(0.0, std::numbers::pi * kBeta2));
    const Complex v = q * q;
    std::vector<Complex> roots{Complex(1.0, 0.0), Complex(-1.0, 0.0)};
    auto good = sl2_lattice_blowup(q, v, roots, 1e-6, 24);
    std::vector<Complex> perturbed{Complex(1.0, 0.0), Complex(-1.0 - 1e-3, 0.0)};
    auto bad = sl2_lattice_blowup(q, v, perturbed, 1e-6, 24);
    CAPTURE(good.blowup_indicator);
    CAPTURE(bad.blowup_indicator);
    CHECK(bad.blowup_indicator >= 10.0 * good.blowup_indicator);
    CHECK(int(good.qt_values.size()) == 25);

    // the indicator reacts proportionally: a 1e-2 perturbation is larger still
    std::vector<Complex> worse{Complex(1.0, 0.0), Complex(-1.0 - 1e-2, 0.0)};
    auto worst = sl2_lattice_blowup(q, v, worse, 1e-6, 24);
    CHECK(worst.blowup_indicator > bad.blowup_indicator);
}

TEST_CASE("twisted rhs cases") {
    const auto& a4 = lie::load_algebra('A', 4);
    auto fold_a4 = lie::fold_twisted(a4, {3, 2, 1, 0});  // d = (1, 1/2)
    const auto& a3 = lie::load_algebra('A', 3);
    auto fold_a3 = lie::fold_twisted(a3, {2, 1, 0});     // d = (1, 2), r = 2

    auto Qmark = [](int tag) {
        return [tag](Complex a) { return a + double(tag); };  // distinguishable affine probes
    };
    std::vector<std::function<Complex(Complex)>> Q2{Qmark(1), Qmark(2)};

    // d_i = 1/2 case carries Q_i(-a)
    const Complex a(0.7, 0.4);
    int half_orbit = fold_a4.d[0] == Rational(1, 2) ? 0 : 1;
    int one_orbit = 1 - half_orbit;
    Complex rhs_half = twisted_rhs(fold_a4, half_orbit, a, Q2);
    // neighbors of the half orbit: the d = 1 orbit, factor Q_j(a), plus Q_i(-a)
    Complex expect_half = Q2[half_orbit](-a) * Q2[one_orbit](a);
    CHECK(std::abs(rhs_half - expect_half) < 1e-14);

    // d_i = 1 with an r-orbit neighbor: factor Q_j(a^r)
    int r_orbit = fold_a3.d[0] == Rational(2) ? 0 : 1;
    int unit_orbit = 1 - r_orbit;
    Complex rhs_one = twisted_rhs(fold_a3, unit_orbit, a, Q2);
    CHECK(std::abs(rhs_one - Q2[r_orbit](a * a)) < 1e-14);

    // d_i = r with no short neighbors enumerates roots; with no neighbors at
    // all the product is empty. Build that from A3's r-orbit, whose only
    // neighbor is the d = 1 orbit: enumerate both square roots of a.
    Complex rhs_r = twisted_rhs(fold_a3, r_orbit, a, Q2);
    Complex b0 = std::sqrt(a);
    Complex expect_r = Q2[unit_orbit](b0) * Q2[unit_orbit](-b0);
    CHECK(std::abs(rhs_r - expect_r) < 1e-13);

    CHECK_THROWS_AS(twisted_rhs(fold_a3, r_orbit, Complex(0.0, 0.0), Q2), std::invalid_argument);
}

TEST_CASE("gl1 toroidal residuals") {
    // parameters with (q1 q3)^{-1} = q2
    const Complex q2 = std::exp(Complex(0.0, 2.0 * std::numbers::pi * kBeta2));
    const Complex q1 = Complex(0.6, 0.3);
    const Complex q3 = 1.0 / (q1 * q2);

    // single root: closed-form t makes the residual vanish for any w;
    // with q1 q2 q3 = 1 the closed form collapses to t = 1
    for (Complex w : {Complex(1.0, 0.0), Complex(0.4, -1.2)}) {
        Complex t = gl1_solve_t_single_root(w, q1, q2, q3);
        CHECK(std::abs(t - 1.0) < 1e-12);
        auto res = gl1_bae_residual({w}, q1, q2, q3, t);
        REQUIRE(res.size() == 1);
        CHECK(std::abs(res[0]) < 1e-12);
    }

    // no roots: empty residual
    CHECK(gl1_bae_residual({}, q1, q2, q3, Complex(1.0)).empty());

    // mismatched parameters and zero roots are rejected
    CHECK_THROWS_AS(gl1_bae_residual({Complex(1.0)}, q1, q2, q3 * 1.01, Complex(1.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(gl1_bae_residual({Complex(0.0)}, q1, q2, q3, Complex(1.0)),
                    std::invalid_argument);
}

TEST_CASE("gl1 degree-2 solve against the resultant oracle") {
    const Complex q2v = std::exp(Complex(0.0, 2.0 * std::numbers::pi * kBeta2));
    const Complex q1 = Complex(0.55, 0.21);
    const Complex q3 = 1.0 / (q1 * q2v);

    testutil::Gl1ResultantOracle oracle{q1, q2v, q3};
    auto [t_candidates, det_scale] = oracle.resultant_roots();

    // engine: Newton from a few starts; each solution must (a) sit near a
    // root cluster of the interpolated resultant and (b) annihilate the
    // Sylvester determinant itself, which certifies elimination-consistency
    // (the interpolated roots carry multiple-root conditioning error).
    int verified = 0;
    for (Complex t0 : t_candidates) {
        auto sol = gl1_solve_pair(q1, q2v, q3, Complex(-0.8, 0.2), t0 * 1.01);
        if (!sol.converged) continue;
        if (std::abs(sol.w2 - 1.0) < 1e-6 || std::abs(sol.w2) < 1e-9) continue; // collided pair
        double best = 1e99;
        for (Complex tc : t_candidates) best = std::min(best, std::abs(sol.t - tc));
        CHECK(best < 1e-3);
        CHECK(std::abs(oracle.sylvester_det(sol.t)) < 1e-8 * det_scale);
        auto res = gl1_bae_residual({Complex(1.0), sol.w2}, q1, q2v, q3, sol.t);
        for (const auto& r : res) CHECK(std::abs(r) < 1e-10);
        ++verified;
    }
    CHECK(verified >= 1);
}
