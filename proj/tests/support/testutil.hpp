#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "qqkit/lweight.hpp"

namespace testutil {

using Complex = std::complex<double>;

/// Numeric evaluation of an l-weight at node j: the defining rational
/// function q_j^{c_j} prod (1 - a q^{s/2} z)^e, independent of the symbolic
/// algebra. Used as an oracle for the Psi/Y/A constructions.
inline Complex eval_lweight_node(const qqkit::lw::LWeightTerm& t, const qqkit::lie::AlgebraData& g,
                                 int j, Complex q, Complex a, Complex z) {
    Complex out = std::pow(q, double(g.d(j)) * double(t.weight.half(j)) / 2.0);
    for (const auto& [key, e] : t.psi.factors()) {
        if (key.first != j) continue;
        out *= std::pow(1.0 - a * std::pow(q, key.second / 2.0) * z, double(e));
    }
    return out;
}

/// Durand-Kerner root finder for small dense complex polynomials.
/// coeffs are ascending, coeffs.back() != 0.
inline std::vector<Complex> poly_roots(std::vector<Complex> coeffs, int iters = 500) {
    while (!coeffs.empty() && std::abs(coeffs.back()) == 0.0) coeffs.pop_back();
    const int n = int(coeffs.size()) - 1;
    std::vector<Complex> r(n);
    for (int i = 0; i < n; ++i) r[i] = std::pow(Complex(0.4, 0.9), i + 1);
    auto eval = [&](Complex x) {
        Complex v = 0.0;
        for (int i = n; i >= 0; --i) v = v * x + coeffs[i];
        return v;
    };
    for (int it = 0; it < iters; ++it) {
        double moved = 0.0;
        for (int i = 0; i < n; ++i) {
            Complex denom = coeffs[n];
            for (int k = 0; k < n; ++k)
                if (k != i) denom *= (r[i] - r[k]);
            Complex step = eval(r[i]) / denom;
            r[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-14) break;
    }
    return r;
}

/// Distance of a log-form residual to the branch lattice 2 pi i Z.
inline double mod2pi_abs(Complex r) {
    const double k = std::round(r.imag() / (2.0 * std::numbers::pi));
    return std::abs(Complex(r.real(), r.imag() - 2.0 * std::numbers::pi * k));
}

inline std::mt19937& rng() {
    static std::mt19937 gen(20240717);
    return gen;
}

inline int rand_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng());
}

inline double rand_real(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline Complex rand_unit() {
    double th = rand_real(0.0, 6.28318530717958647692);
    return {std::cos(th), std::sin(th)};
}

} // namespace testutil
