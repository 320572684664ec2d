#include "qqkit/oper_numeric.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qqkit::oper {

namespace {
constexpr double kPi = std::numbers::pi;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

Complex ipow(Complex z, int n) {
    if (n < 0) return 1.0 / ipow(z, -n);
    Complex out = 1.0;
    while (n > 0) {
        if (n & 1) out *= z;
        z *= z;
        n >>= 1;
    }
    return out;
}
} // namespace

// ---------------------------------------------------------------------------
// constants

Sl2Constants constants(const Rational& r, const Rational& k) {
    if (k == Rational(-2)) fail("constants: k = -2 is excluded");
    Sl2Constants c;
    c.r = r;
    c.k = k;
    const Rational one(1), two(2), four(4);
    c.central_charge = one - Rational(6) * (k + one) * (k + one) / (k + two);
    const Rational tr1 = two * r + one;
    c.delta = (tr1 * tr1 - (k + one) * (k + one)) / (four * (k + two));
    c.alpha = -(k + one) / (k + two);
    c.beta2 = one / (c.alpha + one);
    // l(l+1) two ways: via Delta and via r directly; they must agree exactly.
    const Rational a = c.alpha;
    const Rational x1 = four * (a + one) * c.delta + a * a - Rational(1, 4);
    const Rational x2 = four * (a + one) * (a + one) * r * (r + one) + a * a + two * a + Rational(3, 4);
    if (x1 != x2) throw std::logic_error("constants: l(l+1) cross-identity failed");
    // Delta(l, alpha) route: (2l+1)^2 = 1 + 4 l(l+1)
    const Rational delta_back = ((one + four * x1) - four * a * a) / (Rational(16) * (a + one));
    if (delta_back != c.delta) throw std::logic_error("constants: Delta(l,alpha) identity failed");
    c.ell_times_ell_plus_one = x1;
    const double disc = 1.0 + 4.0 * x1.to_double();
    c.ell = disc >= 0 ? (-1.0 + std::sqrt(disc)) / 2.0 : std::numeric_limits<double>::quiet_NaN();
    const double ad = a.to_double();
    c.e_over_lambda = -std::pow(2.0 * ad + 2.0, 2.0 * ad / (ad + 1.0));
    return c;
}

GeneralConstants general_constants(const lie::AlgebraData& g, const Rational& k) {
    const int hv = g.dual_coxeter;
    if (k == Rational(-hv)) fail("general_constants: k = -h_vee is excluded");
    GeneralConstants c;
    c.dual_coxeter = hv;
    c.alpha = -(k + Rational(hv - 1)) / (k + Rational(hv));
    c.beta2 = Rational(1) / (c.alpha + Rational(1));
    const double ad = c.alpha.to_double();
    c.x_exponent = hv * (ad + 1.0);
    c.z_denominator = std::pow(c.x_exponent, hv);
    c.e_over_lambda = -std::pow(c.x_exponent, hv * ad / (ad + 1.0));
    return c;
}

// ---------------------------------------------------------------------------
// Schwarzian

double schwarzian(const PhiJet& jet) {
    const double d1 = jet[1], d2 = jet[2], d3 = jet[3];
    if (d1 == 0.0) fail("schwarzian: phi' = 0");
    const double ratio = d2 / d1;
    return d3 / d1 - 1.5 * ratio * ratio;
}

PhiJet power_jet(double a, double p, double x) {
    const double v = a * std::pow(x, p);
    return {v, v * p / x, v * p * (p - 1) / (x * x), v * p * (p - 1) * (p - 2) / (x * x * x)};
}

double transform_projective(const std::function<double(double)>& v, const PhiJet& jet) {
    return v(jet[0]) * jet[1] * jet[1] - 0.5 * schwarzian(jet);
}

// ---------------------------------------------------------------------------
// z-form potential

KdvPotential::KdvPotential(OperSpecZ s) : spec(std::move(s)) {
    for (size_t a = 0; a < spec.w.size(); ++a) {
        if (std::abs(spec.w[a]) == 0.0) fail("KdvPotential: w_j = 0");
        for (size_t b = a + 1; b < spec.w.size(); ++b)
            if (std::abs(spec.w[a] - spec.w[b]) < 1e-12 * std::abs(spec.w[a]))
                fail("KdvPotential: coincident w_j (pole coalescence unsupported)");
    }
}

Complex KdvPotential::operator()(Complex z) const {
    Complex sum_kw = 0.0;
    for (const auto& w : spec.w) sum_kw += spec.k / w;
    Complex v = spec.r * (spec.r + 1.0) / (z * z) + (spec.lead - sum_kw) / z;
    for (const auto& w : spec.w) {
        const Complex dz = z - w;
        v += 2.0 / (dz * dz) + (spec.k / w) / dz;
    }
    return v;
}

std::pair<Complex, Complex> KdvPotential::local_expansion(int j) const {
    if (j < 0 || j >= spec.m()) fail("local_expansion: bad index");
    const Complex wj = spec.w[j];
    Complex sum_kw = 0.0;
    for (const auto& w : spec.w) sum_kw += spec.k / w;
    const Complex rr = spec.r * (spec.r + 1.0);
    const Complex c1 = spec.lead - sum_kw;
    Complex v0 = rr / (wj * wj) + c1 / wj;
    Complex v1 = -2.0 * rr / (wj * wj * wj) - c1 / (wj * wj);
    for (int a = 0; a < spec.m(); ++a) {
        if (a == j) continue;
        const Complex d = wj - spec.w[a];
        v0 += 2.0 / (d * d) + (spec.k / spec.w[a]) / d;
        v1 += -4.0 / (d * d * d) - (spec.k / spec.w[a]) / (d * d);
    }
    return {v0, v1};
}

std::vector<Complex> accessory_residual(const OperSpecZ& spec) {
    if (spec.m() < 1) fail("accessory_residual: m >= 1 required");
    KdvPotential pot(spec);
    std::vector<Complex> out;
    for (int j = 0; j < spec.m(); ++j) {
        auto [v0, v1] = pot.local_expansion(j);
        const Complex kw = spec.k / spec.w[j];
        out.push_back(0.25 * kw * kw * kw - kw * v0 + v1);
    }
    return out;
}

AccessorySolution solve_accessory(const OperSpecZ& init, double tol, int max_iter) {
    if (init.m() < 1 || init.m() > 3) fail("solve_accessory: m must be 1..3");
    AccessorySolution sol;
    sol.spec = init;
    const int m = init.m();
    auto rmax = [](const std::vector<Complex>& r) {
        double v = 0.0;
        for (const auto& z : r) v = std::max(v, std::abs(z));
        return v;
    };
    for (int it = 0; it < max_iter; ++it) {
        sol.iterations = it;
        std::vector<Complex> f = accessory_residual(sol.spec);
        sol.residual_max = rmax(f);
        if (sol.residual_max < tol) {
            sol.converged = true;
            return sol;
        }
        Eigen::MatrixXcd J(m, m);
        for (int c = 0; c < m; ++c) {
            OperSpecZ pert = sol.spec;
            const double h = 1e-7 * std::max(1.0, std::abs(pert.w[c]));
            pert.w[c] += h;
            std::vector<Complex> fp = accessory_residual(pert);
            for (int rr = 0; rr < m; ++rr) J(rr, c) = (fp[rr] - f[rr]) / h;
        }
        Eigen::VectorXcd rhs(m);
        for (int rr = 0; rr < m; ++rr) rhs(rr) = f[rr];
        Eigen::VectorXcd step = J.fullPivLu().solve(rhs);
        if (!step.allFinite()) break;
        // damping with collapse guard
        double damp = 1.0;
        bool ok = false;
        for (int half = 0; half < 25 && !ok; ++half, damp *= 0.5) {
            OperSpecZ trial = sol.spec;
            bool valid = true;
            for (int c = 0; c < m; ++c) {
                trial.w[c] -= damp * step(c);
                if (std::abs(trial.w[c]) < 1e-10) valid = false;
            }
            if (!valid) continue;
            try {
                if (rmax(accessory_residual(trial)) < sol.residual_max) {
                    sol.spec = trial;
                    ok = true;
                }
            } catch (const std::invalid_argument&) {
                continue;
            }
        }
        if (!ok) break;
    }
    std::vector<Complex> f = accessory_residual(sol.spec);
    sol.residual_max = rmax(f);
    sol.converged = sol.residual_max < tol;
    if (!sol.converged) {
        for (int j = 0; j < m; ++j)
            if (std::abs(sol.spec.w[j]) < 1e-8)
                throw std::runtime_error("solve_accessory: w_j collapsed toward 0");
    }
    return sol;
}

// ---------------------------------------------------------------------------
// adaptive complex integration on a real parameter, with renormalization

namespace {

namespace ode = boost::numeric::odeint;

template <size_t N>
using DState = std::array<double, 2 * N>;

template <size_t N>
void pack(const std::array<Complex, N>& y, DState<N>& s) {
    for (size_t i = 0; i < N; ++i) {
        s[2 * i] = y[i].real();
        s[2 * i + 1] = y[i].imag();
    }
}

template <size_t N>
void unpack(const DState<N>& s, std::array<Complex, N>& y) {
    for (size_t i = 0; i < N; ++i) y[i] = Complex(s[2 * i], s[2 * i + 1]);
}

/// Integrates y' = f(t, y) from t0 to t1 (either direction), rescaling the
/// linear state whenever it grows large. Returns the accumulated log of the
/// divided-out factor.
template <size_t N, class Rhs>
double integrate_rescaled(Rhs&& f, std::array<Complex, N>& y, double t0, double t1, double rtol,
                          double atol) {
    using State = DState<N>;
    auto sys = [&](const State& s, State& dsdt, double t) {
        std::array<Complex, N> yc, dy;
        unpack<N>(s, yc);
        f(t, yc, dy);
        pack<N>(dy, dsdt);
    };
    auto stepper = ode::make_controlled(atol, rtol, ode::runge_kutta_dopri5<State>());
    State s;
    pack<N>(y, s);
    double t = t0;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    double dt = dir * std::max(1e-8, 1e-3 * std::abs(t1 - t0));
    double log_scale = 0.0;
    int rejected = 0;
    while (dir * (t1 - t) > 1e-15 * std::abs(t1 - t0)) {
        if (dir * (t + dt - t1) > 0) dt = t1 - t;
        auto res = stepper.try_step(sys, s, t, dt);
        if (res == ode::controlled_step_result::fail) {
            if (++rejected > 10000)
                throw std::runtime_error("integrate: step size collapsed");
            continue;
        }
        double mag = 0.0;
        for (double c : s) mag = std::max(mag, std::abs(c));
        if (mag > 1e100) {
            for (double& c : s) c /= mag;
            log_scale += std::log(mag);
        }
        if (!std::isfinite(mag)) throw std::runtime_error("integrate: overflow despite rescaling");
    }
    unpack<N>(s, y);
    return log_scale;
}

} // namespace

// ---------------------------------------------------------------------------
// monodromy around w_j

MonodromyResult monodromy_matrix(const OperSpecZ& spec, int j, double rho, Complex lambda,
                                 double rtol) {
    if (spec.m() < 1) fail("monodromy_matrix: m = 0 has no singular points to encircle");
    if (j < 0 || j >= spec.m()) fail("monodromy_matrix: bad index");
    if (rho <= 0) fail("monodromy_matrix: rho must be positive");
    const Complex wj = spec.w[j];
    double clearance = std::abs(wj);  // distance to z = 0
    for (int a = 0; a < spec.m(); ++a)
        if (a != j) clearance = std::min(clearance, std::abs(wj - spec.w[a]));
    if (rho > 0.6 * clearance)
        fail("monodromy_matrix: contour passes near another singular point");

    KdvPotential pot(spec);
    // z^k on the disc: (w_j)^k (z/w_j)^k, both principal; z/w_j stays in the
    // unit disc around 1, so the branch is single-valued on the contour.
    const Complex wk = std::pow(wj, Complex(spec.k));
    auto zk = [&](Complex z) { return wk * std::pow(z / wj, Complex(spec.k)); };

    std::array<Complex, 4> y{1.0, 0.0, 0.0, 1.0};  // columns (psi, psi') of Id
    auto rhs = [&](double theta, const std::array<Complex, 4>& s, std::array<Complex, 4>& ds) {
        const Complex z = wj + rho * std::exp(Complex(0.0, theta));
        const Complex zp = Complex(0.0, 1.0) * rho * std::exp(Complex(0.0, theta));
        const Complex w = pot(z) + lambda * zk(z);
        ds[0] = zp * s[1];
        ds[1] = zp * w * s[0];
        ds[2] = zp * s[3];
        ds[3] = zp * w * s[2];
    };
    integrate_rescaled<4>(rhs, y, 0.0, 2.0 * kPi, rtol, 1e-14);

    MonodromyResult out;
    out.matrix << y[0], y[2], y[1], y[3];
    out.deviation_from_identity = (out.matrix - Eigen::Matrix2cd::Identity()).norm();
    out.det_error = std::abs(out.matrix.determinant() - 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// QFunction

namespace {

/// Higher-order WKB tail. The subdominant log-derivative expands as
///   y = -sqrt(W) - W'/(4W) - corr - delta,
///   corr  = W''/(8 W^{3/2}) - 5 W'^2 / (32 W^{5/2}),
///   delta = [corr' - (W'/2W) corr - corr^2] / (2 sqrt(W)),
/// and the exponent carries int_x^inf (corr + delta) dt. Adaptive Simpson
/// out to 32 x plus the analytic leading tail -a(a+2)/(8(a+1)) X^{-a-1}.
struct WkbCorrection {
    Complex tail;      // int_x^inf (corr + delta)
    Complex at_start;  // corr(x) + delta(x), for the log-derivative
};

WkbCorrection froman_tail(double a, double L, Complex e, double x) {
    auto corr = [&](double t) {
        const Complex w = Complex(L / (t * t) + std::pow(t, 2.0 * a)) - e;
        const Complex wp = Complex(-2.0 * L / (t * t * t) + 2.0 * a * std::pow(t, 2.0 * a - 1.0));
        const Complex wpp =
            Complex(6.0 * L / (t * t * t * t) + 2.0 * a * (2.0 * a - 1.0) * std::pow(t, 2.0 * a - 2.0));
        const Complex sq = std::sqrt(w);
        return wpp / (8.0 * w * sq) - 5.0 * wp * wp / (32.0 * w * w * sq);
    };
    auto integrand = [&](double t) {
        const Complex w = Complex(L / (t * t) + std::pow(t, 2.0 * a)) - e;
        const Complex wp = Complex(-2.0 * L / (t * t * t) + 2.0 * a * std::pow(t, 2.0 * a - 1.0));
        const double h = 1e-4 * t;
        const Complex cp = (corr(t + h) - corr(t - h)) / (2.0 * h);
        const Complex c = corr(t);
        const Complex delta = (cp - wp / (2.0 * w) * c - c * c) / (2.0 * std::sqrt(w));
        return c + delta;
    };
    const double X = 32.0 * x;
    std::function<Complex(double, double, Complex, Complex, Complex, int)> simp =
        [&](double lo, double hi, Complex flo, Complex fmid, Complex fhi, int depth) -> Complex {
        const double mid = 0.5 * (lo + hi);
        const Complex fl2 = integrand(0.5 * (lo + mid));
        const Complex fr2 = integrand(0.5 * (mid + hi));
        const Complex whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        const Complex left = (mid - lo) / 6.0 * (flo + 4.0 * fl2 + fmid);
        const Complex right = (hi - mid) / 6.0 * (fmid + 4.0 * fr2 + fhi);
        if (depth > 24 || std::abs(left + right - whole) < 1e-14 * (1.0 + std::abs(left + right)))
            return left + right + (left + right - whole) / 15.0;
        return simp(lo, mid, flo, fl2, fmid, depth + 1) + simp(mid, hi, fmid, fr2, fhi, depth + 1);
    };
    WkbCorrection out;
    out.at_start = integrand(x);
    out.tail = simp(x, X, out.at_start, integrand(0.5 * (x + X)), integrand(X), 0);
    out.tail += -a * (a + 2.0) / (8.0 * (a + 1.0)) * std::pow(X, -a - 1.0);
    return out;
}

struct FrobeniusBasis {
    // coefficient maps for the two indicial exponents
    struct Series {
        double s;
        std::vector<std::pair<double, Complex>> terms;  // (added exponent e, coeff)
        Complex eval(double x) const {
            Complex v = 0.0;
            for (const auto& [e, c] : terms) v += c * std::pow(x, s + e);
            return v;
        }
        Complex eval_deriv(double x) const {
            Complex v = 0.0;
            for (const auto& [e, c] : terms) v += c * (s + e) * std::pow(x, s + e - 1.0);
            return v;
        }
    };
    Series minus;  // x^{-l}
    Series plus;   // x^{l+1}
};

FrobeniusBasis frobenius_basis(double alpha, double ell, Complex e_value, int order) {
    FrobeniusBasis basis;
    const double L = ell * (ell + 1.0);
    const double step_pot = 2.0 * alpha + 2.0;
    for (double s : {-ell, ell + 1.0}) {
        auto& series = (s < 0.5 ? basis.minus : basis.plus);
        series.s = s;
        // exponents e = 2 j + (2a+2) m; coefficients from
        //   c_{j,m} [ (s+e)(s+e-1) - l(l+1) ] = c_{j,m-1} - E c_{j-1,m}
        const int jmax = order / 2;
        const int mmax = int(order / step_pot) + 1;
        std::vector<std::vector<Complex>> c(jmax + 1, std::vector<Complex>(mmax + 1, 0.0));
        for (int jj = 0; jj <= jmax; ++jj)
            for (int mm = 0; mm <= mmax; ++mm) {
                const double e = 2.0 * jj + step_pot * mm;
                if (e > order + 1e-9) continue;
                if (jj == 0 && mm == 0) {
                    c[0][0] = 1.0;
                } else {
                    Complex num = 0.0;
                    if (mm >= 1) num += c[jj][mm - 1];
                    if (jj >= 1) num -= e_value * c[jj - 1][mm];
                    const double denom = (s + e) * (s + e - 1.0) - L;
                    if (std::abs(denom) < 1e-8)
                        throw std::domain_error(
                            "QFunction: Frobenius resonance (2l+1 near an exponent step); "
                            "logarithmic terms would be needed");
                    c[jj][mm] = num / denom;
                }
                if (std::abs(c[jj][mm]) > 0 || (jj == 0 && mm == 0))
                    series.terms.emplace_back(e, c[jj][mm]);
            }
    }
    return basis;
}

} // namespace

QFunction::QFunction(double alpha, double ell, QIntegration params, std::vector<Complex> z_points)
    : alpha_(alpha), ell_(ell), params_(params), z_points_(std::move(z_points)) {
    if (alpha <= 0.0) fail("QFunction: alpha > 0 required");
    if (ell <= -0.5) fail("QFunction: ell > -1/2 required");
    for (const auto& z : z_points_) {
        if (std::abs(z) == 0.0) fail("QFunction: z_j = 0");
        // the integration runs along the positive real ray, where
        // x^{2a+2} sweeps the positive reals; keep the singular points away
        if (std::abs(z.imag()) < 1e-6 * std::abs(z) && z.real() > 0.0)
            fail("QFunction: excited-state z_j on the positive real axis; "
                 "contour deformation is not implemented");
    }
    const double tl = 2.0 * ell + 1.0;
    resonance_warning_ = std::abs(tl - std::round(tl)) < 0.05;
}

std::string QFunction::normalization_tag() const {
    std::ostringstream os;
    os << "wkb-u6-frobenius" << params_.frobenius_order
       << (alpha_ > 1.0 / 3.0 ? "-full-phase" : "-bare");
    if (!z_points_.empty()) os << "-excited-experimental";
    return os.str();
}

QValue QFunction::operator()(Complex e) const {
    const std::pair<double, double> key{e.real(), e.imag()};
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    QValue v = evaluate(e, params_);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    cache_.emplace(key, v);
    return v;
}

QValue QFunction::evaluate(Complex e, const QIntegration& p) const {
    const double a = alpha_;
    const double L = ell_ * (ell_ + 1.0);
    const double x_top = std::max(p.x_max, 1.5 * std::pow(std::abs(e) + 10.0, 1.0 / (2.0 * a)));

    // excited-state term 2 d^2/dx^2 log(x^{2a+2} - z) =
    //   2 p P [ -(p-1) z - P ] / (x^2 (P - z)^2),  P = x^p, p = 2a+2
    auto excited = [&](double x) {
        Complex sum = 0.0;
        const double pexp = 2.0 * a + 2.0;
        const double P = std::pow(x, pexp);
        for (const auto& z : z_points_) {
            const Complex d = P - z;
            sum += 2.0 * pexp * P * (-(pexp - 1.0) * z - P) / (x * x * d * d);
        }
        return sum;
    };
    auto W = [&](double x) {
        Complex w = Complex(L / (x * x) + std::pow(x, 2.0 * a)) - e;
        if (!z_points_.empty()) w += excited(x);
        return w;
    };
    auto Wp = [&](double x) {
        return Complex(-2.0 * L / (x * x * x) + 2.0 * a * std::pow(x, 2.0 * a - 1.0));
    };

    // WKB-subdominant initialization at x_top,
    //   psi ~ W^{-1/4} exp(-A(x) + S(x) + F(x)),
    // with A the antiderivative of x^a - (E/2) x^{-a}, S the convergent tail
    // integral of sqrt(W) - x^a + (E/2) x^{-a} (expanded through u^6 in
    // sqrt(1+u)), and F the second-order WKB tail added below; the exponent
    // is an antiderivative of -sqrt(W) - corr normalized to e^{-A} at
    // infinity. Carrying the full phase in log_scale keeps values at
    // different E -- and different x_top -- on one normalization. The tail
    // series needs a > 1/3; below that only zeros are meaningful and the
    // bare W^{-1/4} convention is used.
    Complex phase = 0.0;
    if (a > 1.0 / 3.0) {
        phase -= std::pow(x_top, a + 1.0) / (a + 1.0);
        if (std::abs(a - 1.0) < 1e-12)
            phase += 0.5 * e * std::log(x_top);
        else
            phase += 0.5 * e * std::pow(x_top, 1.0 - a) / (1.0 - a);
        // sqrt(1+u) = sum_m c_m u^m, u = (-E + L x^{-2}) x^{-2a}
        static const double cm[7] = {1.0, 0.5, -0.125, 0.0625, -0.0390625, 0.02734375, -0.0205078125};
        for (int m = 1; m <= 6; ++m) {
            double binom = 1.0;
            for (int jj = 0; jj <= m; ++jj) {
                if (!(m == 1 && jj == 0)) {  // (1,0) handled analytically above
                    const double pexp = 2.0 * a * m + 2.0 * jj - a;  // t^{-pexp}
                    if (pexp > 1.0) {
                        const Complex coeff =
                            cm[m] * binom * ipow(-e, m - jj) * std::pow(L, double(jj));
                        phase += coeff * std::pow(x_top, 1.0 - pexp) / (pexp - 1.0);
                    }
                }
                binom = binom * double(m - jj) / double(jj + 1);
            }
        }
    }

    Complex corr_top = 0.0;
    if (a > 1.0 / 3.0) {
        const WkbCorrection wc = froman_tail(a, L, e, x_top);
        phase += wc.tail;
        corr_top = wc.at_start;  // matching log-derivative correction
    }

    const Complex w_top = W(x_top);
    const Complex sqw = std::sqrt(w_top);
    std::array<Complex, 2> y;
    y[0] = std::pow(w_top, -0.25) * std::exp(Complex(0.0, phase.imag()));
    y[1] = y[0] * (-sqw - Wp(x_top) / (4.0 * w_top) - corr_top);
    double log_scale = phase.real();

    auto rhs = [&](double x, const std::array<Complex, 2>& s, std::array<Complex, 2>& ds) {
        ds[0] = s[1];
        ds[1] = W(x) * s[0];
    };
    log_scale += integrate_rescaled<2>(rhs, y, x_top, p.x_min, p.rtol, p.atol);

    FrobeniusBasis basis = frobenius_basis(a, ell_, e, p.frobenius_order);
    const double x0 = p.x_min;
    const Complex chp = basis.plus.eval(x0), chpd = basis.plus.eval_deriv(x0);
    const Complex chm = basis.minus.eval(x0), chmd = basis.minus.eval_deriv(x0);
    const Complex wr = chm * chpd - chmd * chp;
    const double wr_expected = 2.0 * ell_ + 1.0;
    if (std::abs(wr - wr_expected) > 1e-6 * std::abs(wr_expected))
        throw std::runtime_error("QFunction: Frobenius Wronskian check failed");

    QValue out;
    out.mantissa = (y[0] * chpd - y[1] * chp) / wr;
    out.log_scale = log_scale;
    return out;
}

Complex qratio(const QValue& a, const QValue& b) {
    return (a.mantissa / b.mantissa) * std::exp(a.log_scale - b.log_scale);
}

const std::vector<double>& QFunction::find_zeros(double e_max, int count) {
    zeros_.clear();
    const double de = 0.5;
    double e_prev = 0.05;
    QValue q_prev = (*this)(Complex(e_prev, 0.0));
    for (double e = e_prev + de; e <= e_max && int(zeros_.size()) < count; e += de) {
        QValue q_here = (*this)(Complex(e, 0.0));
        if (q_prev.mantissa.real() * q_here.mantissa.real() < 0.0) {
            // bracketed: bisection then secant polish on the scaled values
            double lo = e_prev, hi = e;
            QValue qlo = q_prev, qhi = q_here;
            for (int it = 0; it < 80 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                QValue qm = (*this)(Complex(mid, 0.0));
                if (qlo.mantissa.real() * qm.mantissa.real() <= 0.0) {
                    hi = mid;
                    qhi = qm;
                } else {
                    lo = mid;
                    qlo = qm;
                }
            }
            zeros_.push_back(0.5 * (lo + hi));
        }
        e_prev = e;
        q_prev = q_here;
    }
    return zeros_;
}

double q_zero_slope(const QFunction& q, double e, double h) {
    QValue a = q(Complex(e + h, 0.0));
    QValue b = q(Complex(e - h, 0.0));
    const double ref = std::max(a.log_scale, b.log_scale);
    const Complex da = a.mantissa * std::exp(a.log_scale - ref);
    const Complex db = b.mantissa * std::exp(b.log_scale - ref);
    return std::abs(da - db) / (2.0 * h);
}

RatioCheck bae_ratio_check(QFunction& q, double beta2, int use_zeros) {
    const Complex q2 = std::exp(Complex(0.0, 2.0 * kPi * beta2));
    if (std::abs(q2.imag()) < 1e-9)
        fail("bae_ratio_check: q^2 real (beta2 = 1/2 free-fermion point is degenerate)");
    if (int(q.zeros().size()) < use_zeros)
        fail("bae_ratio_check: not enough zeros located; call find_zeros first");
    RatioCheck out;
    for (int k = 0; k < use_zeros; ++k) {
        const double ek = q.zeros()[k];
        QValue qm = q(ek / q2);
        QValue qp = q(ek * q2);
        if (!std::isfinite(qm.mantissa.real()) || !std::isfinite(qp.mantissa.real())) {
            std::ostringstream os;
            os << "bae_ratio_check: integration failed at shifted E_k, k = " << k + 1
               << " (E_k = " << ek << ")";
            throw std::runtime_error(os.str());
        }
        out.ratios.push_back(qratio(qm, qp));
        out.ratios_reversed.push_back(qratio(qp, qm));
    }
    for (int k = 0; k < use_zeros; ++k) {
        out.max_deviation = std::max(out.max_deviation, std::abs(out.ratios[k] / out.ratios[0] - 1.0));
        out.max_deviation_reversed =
            std::max(out.max_deviation_reversed, std::abs(out.ratios_reversed[k] / out.ratios_reversed[0] - 1.0));
    }
    out.constant_orientation =
        out.max_deviation <= out.max_deviation_reversed ? "Q(q^-2 E)/Q(q^+2 E)" : "Q(q^+2 E)/Q(q^-2 E)";
    return out;
}

} // namespace qqkit::oper
