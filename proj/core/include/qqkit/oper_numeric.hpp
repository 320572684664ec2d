#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qqkit/liedata.hpp"
#include "qqkit/rational.hpp"

namespace qqkit::oper {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// constants

/// Derived constants of the sl2 chain for parameters (r, k), exact where the
/// defining relations are rational:
///   c_k = 1 - 6(k+1)^2/(k+2),     Delta = ((2r+1)^2 - (k+1)^2) / (4(k+2)),
///   alpha = -(k+1)/(k+2),          beta2 = 1/(alpha+1),
///   l(l+1) = 4(alpha+1) Delta + alpha^2 - 1/4,
///   E = -(2 alpha + 2)^{2 alpha/(alpha+1)} lambda.
struct Sl2Constants {
    Rational r, k;
    Rational central_charge;
    Rational delta;
    Rational alpha;
    Rational beta2;
    Rational ell_times_ell_plus_one;
    double ell = 0.0;               // the root >= -1/2
    double e_over_lambda = 0.0;     // E = e_over_lambda * lambda
};
Sl2Constants constants(const Rational& r, const Rational& k);

/// General-g scalar data: alpha = -(k+hv-1)/(k+hv) and the coordinate change
/// z = x^{hv(alpha+1)} / (hv(alpha+1))^{hv}, under which singular points map
/// as z_j = z_denominator * w_j and the spectral parameter becomes
/// E = e_over_lambda * lambda. Twisted duals share the same reduced space;
/// only which maximal-root vector occupies the irregular slot differs, so
/// this scalar data covers both cases.
struct GeneralConstants {
    int dual_coxeter = 0;
    Rational alpha;
    Rational beta2;
    double x_exponent = 0.0;        // hv(alpha+1)
    double z_denominator = 0.0;     // (hv(alpha+1))^{hv}
    double e_over_lambda = 0.0;     // -(hv(alpha+1))^{hv alpha/(alpha+1)}
};
GeneralConstants general_constants(const lie::AlgebraData& g, const Rational& k);

// ---------------------------------------------------------------------------
// Schwarzian / projective connection

/// Jet of the coordinate change at one point: (phi, phi', phi'', phi''').
using PhiJet = std::array<double, 4>;

/// {phi,x} = phi'''/phi' - (3/2)(phi''/phi')^2. Throws for phi' = 0.
double schwarzian(const PhiJet& jet);
/// Jet of phi(x) = a x^p at x.
PhiJet power_jet(double a, double p, double x);
/// v(phi(x)) (phi')^2 - (1/2){phi,x}, from the jet of phi at x.
double transform_projective(const std::function<double(double)>& v, const PhiJet& jet);

// ---------------------------------------------------------------------------
// the z-form oper family (sl2 chain)

/// Parameters of the operator
///   d_z^2 - v(z) - lambda z^k,
///   v(z) = r(r+1)/z^2 + (lead - sum_j k/w_j)/z
///          + sum_j [ 2/(z-w_j)^2 + (k/w_j)/(z-w_j) ].
/// lead = 1 in the normalized form; it transports under z-rescaling.
struct OperSpecZ {
    double r = 0.0;
    double k = 0.0;
    std::vector<Complex> w;
    double lead = 1.0;

    int m() const { return int(w.size()); }
};

struct KdvPotential {
    OperSpecZ spec;

    /// Throws std::invalid_argument for coincident or zero w_j.
    explicit KdvPotential(OperSpecZ s);

    Complex operator()(Complex z) const;
    /// Analytic local data at w_j: constant and linear Taylor coefficients
    /// of the regular part, v_{j,0} and v_{j,1}.
    std::pair<Complex, Complex> local_expansion(int j) const;
};

/// Per-point residual of the no-monodromy condition
///   (1/4)(k/w_j)^3 - (k/w_j) v_{j,0} + v_{j,1}.
std::vector<Complex> accessory_residual(const OperSpecZ& spec);

struct AccessorySolution {
    OperSpecZ spec;
    bool converged = false;
    int iterations = 0;
    double residual_max = 0.0;
};
/// Newton on the w_j (m <= 3), starting from the given w.
AccessorySolution solve_accessory(const OperSpecZ& init, double tol = 1e-13, int max_iter = 60);

/// Monodromy of d_z^2 psi = (v(z) + lambda z^k) psi around the circle
/// w_j + rho e^{i theta} in the (psi, psi') basis. Requires m >= 1 and a
/// contour clear of the other singular points (and of 0).
struct MonodromyResult {
    Eigen::Matrix2cd matrix;
    double deviation_from_identity = 0.0;  // Frobenius norm of M - Id
    double det_error = 0.0;                // |det M - 1|
};
MonodromyResult monodromy_matrix(const OperSpecZ& spec, int j, double rho, Complex lambda,
                                 double rtol = 1e-12);

// ---------------------------------------------------------------------------
// the x-form spectral determinant (m = 0)

/// Q(E) carries an explicit log-scale so ratios across E stay meaningful
/// after the exponential renormalizations of the inward sweep.
struct QValue {
    Complex mantissa{0.0, 0.0};
    double log_scale = 0.0;

    Complex value() const { return mantissa * std::exp(log_scale); }
};
/// ratio a/b including scales.
Complex qratio(const QValue& a, const QValue& b);

struct QIntegration {
    double x_min = 1e-3;
    double x_max = 20.0;         // effective x_max = max(x_max, 1.5 (|E|+10)^{1/2a})
    double rtol = 1e-11;
    double atol = 1e-300;
    int frobenius_order = 12;
};

/// Spectral determinant of  psi'' = (l(l+1)/x^2 + x^{2a} - E) psi:
/// Q(E) is the coefficient of the x^{-l} Frobenius solution in the inward-
/// integrated subdominant solution. Normalization: the full WKB phase
/// (including its E-dependent part) is carried in log_scale for a > 1/3,
/// so values are comparable across E and across integration windows; for
/// a <= 1/3 only zeros are meaningful (bare W^{-1/4} convention).
class QFunction {
public:
    /// Requires a > 0 and l > -1/2; warns (flag) near half-integer l.
    /// A nonempty z_points list adds the excited-state potential term
    ///   2 d^2/dx^2 sum_j log(x^{2a+2} - z_j).
    /// This path is experimental: the points must stay clear of the real
    /// integration ray (contour deformation is not implemented), and ratio
    /// diagnostics on it are to be reported, not asserted.
    QFunction(double alpha, double ell, QIntegration params = {},
              std::vector<Complex> z_points = {});

    double alpha() const { return alpha_; }
    double ell() const { return ell_; }
    bool resonance_warning() const { return resonance_warning_; }
    bool experimental_excited() const { return !z_points_.empty(); }
    const QIntegration& params() const { return params_; }
    std::string normalization_tag() const;

    /// Thread-safe; results are cached by E.
    QValue operator()(Complex e) const;
    /// Evaluation bypassing the cache, with parameter overrides (stability checks).
    QValue evaluate(Complex e, const QIntegration& params) const;

    const std::vector<double>& zeros() const { return zeros_; }
    /// Locates the first `count` real-E zeros up to e_max by sign tracking
    /// plus secant refinement; caches and returns them.
    const std::vector<double>& find_zeros(double e_max, int count);

private:
    double alpha_, ell_;
    QIntegration params_;
    std::vector<Complex> z_points_;
    bool resonance_warning_ = false;
    std::vector<double> zeros_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::pair<double, double>, QValue> cache_;
};

/// |dQ/dE| at e by central difference, in the common log-scale.
double q_zero_slope(const QFunction& q, double e, double h = 1e-4);

/// Ratios R_k = Q(q^{-2} E_k) / Q(q^{+2} E_k) over the located zeros, with
/// q^2 = exp(2 i pi beta2). Both orientations are evaluated; constancy of
/// R_k in k is the Bethe property, the constant itself is reported, not
/// asserted. Rejects beta2 = 1/2 (q^4 = 1, degenerate free-fermion point).
struct RatioCheck {
    std::vector<Complex> ratios;          // Q(q^{-2}E_k)/Q(q^{+2}E_k)
    std::vector<Complex> ratios_reversed; // Q(q^{+2}E_k)/Q(q^{-2}E_k)
    double max_deviation = 0.0;           // max_k |R_k/R_1 - 1|
    double max_deviation_reversed = 0.0;
    std::string constant_orientation;     // which orientation was (more) constant
};
RatioCheck bae_ratio_check(QFunction& q, double beta2, int use_zeros = 6);

} // namespace qqkit::oper
