#include "qqkit/bethe.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qqkit::bethe {

namespace {
constexpr double kPi = std::numbers::pi;

std::string cplx(const Complex& z) {
    std::ostringstream os;
    os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}
} // namespace

Complex BetheSystem::q() const { return std::exp(Complex(0.0, kPi * beta2)); }

int BetheSystem::root_count() const {
    int n = 0;
    for (int d : degrees) n += d;
    return n;
}

void BetheSystem::validate() const {
    if (!algebra) throw std::invalid_argument("BetheSystem: no algebra");
    const int n = algebra->rank;
    if (int(v.size()) != n || int(degrees.size()) != n)
        throw std::invalid_argument("BetheSystem: v/degrees size must equal rank");
    for (int d : degrees)
        if (d < 0) throw std::invalid_argument("BetheSystem: negative degree");
    for (const auto& vi : v)
        if (std::abs(vi) == 0.0) throw std::invalid_argument("BetheSystem: v_i must be nonzero");
    // q must stay away from roots of unity: reject beta2 within 1e-12 of a
    // rational p/s with s <= 8 (continued-fraction convergents). Small-power
    // shifts q^{2 B_ij} must never close up.
    double x = beta2 - std::floor(beta2);
    long long p0 = 1, q0 = 0, p1 = std::llround(std::floor(x)), q1 = 1;
    double frac = x;
    for (int it = 0; it < 40; ++it) {
        double r = frac - std::floor(frac);
        if (std::abs(x - double(p1) / double(q1)) < 1e-12) {
            if (q1 <= 8)
                throw std::invalid_argument(
                    "BetheSystem: beta2 too close to a rational with denominator <= 8; q would be (near) a root of unity");
            break;
        }
        if (r < 1e-15) break;
        frac = 1.0 / r;
        long long a = std::llround(std::floor(frac));
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (q1 > 1000000) break;
    }
}

Complex eval_poly(const std::vector<Complex>& roots, Complex u) {
    Complex out = 1.0;
    for (const auto& w : roots) out *= (u - w);
    return out;
}

namespace {

void check_collisions(const BetheSystem& sys, const Roots& roots, double tol) {
    const auto& g = *sys.algebra;
    Complex q = sys.q();
    for (int i = 0; i < g.rank; ++i)
        for (size_t k = 0; k < roots[i].size(); ++k)
            for (int j = 0; j < g.rank; ++j) {
                if (g.b(i, j) == 0) continue;
                for (int sgn : {+1, -1}) {
                    Complex shifted = roots[i][k] * std::pow(q, sgn * g.b(i, j));
                    for (size_t l = 0; l < roots[j].size(); ++l) {
                        double scale = std::max(std::abs(shifted), std::abs(roots[j][l]));
                        if (std::abs(shifted - roots[j][l]) < tol * std::max(scale, 1e-300)) {
                            std::ostringstream os;
                            os << "singular configuration: root " << k + 1 << " of node " << i + 1
                               << " shifted by q^" << sgn * g.b(i, j) << " collides with root "
                               << l + 1 << " of node " << j + 1 << " (" << cplx(shifted) << " ~ "
                               << cplx(roots[j][l]) << ")";
                            throw SingularConfiguration(os.str());
                        }
                    }
                }
            }
}

} // namespace

std::vector<Complex> bae_residuals(const BetheSystem& sys, const Roots& roots) {
    sys.validate();
    const auto& g = *sys.algebra;
    if (int(roots.size()) != g.rank) throw std::invalid_argument("bae_residuals: roots size");
    check_collisions(sys, roots, 1e-8);
    const Complex q = sys.q();
    std::vector<Complex> res;
    for (int i = 0; i < g.rank; ++i) {
        for (size_t k = 0; k < roots[i].size(); ++k) {
            const Complex w = roots[i][k];
            Complex r = -2.0 * std::log(sys.v[i]);
            for (int j = 0; j < g.rank; ++j) {
                const Complex up = w * std::pow(q, g.b(i, j));
                const Complex dn = w * std::pow(q, -g.b(i, j));
                for (const auto& wl : roots[j])
                    r += std::log(up - wl) - std::log(dn - wl);
            }
            const int n = (int(sys.branch.size()) > i && sys.branch[i].size() > k)
                              ? sys.branch[i][k] : 0;
            r -= Complex(0.0, kPi * (2 * n + 1));
            res.push_back(r);
        }
    }
    return res;
}

std::function<std::vector<Complex>(const Roots&)> build_bae(const BetheSystem& sys) {
    sys.validate();
    return [sys](const Roots& roots) { return bae_residuals(sys, roots); };
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::Underdetermined: return "underdetermined";
        case SolveStatus::MaxIterations: return "max-iterations";
        case SolveStatus::SingularJacobian: return "singular-jacobian";
    }
    return "?";
}

namespace {

std::vector<Complex> flatten(const Roots& roots) {
    std::vector<Complex> x;
    for (const auto& node : roots) x.insert(x.end(), node.begin(), node.end());
    return x;
}

Roots unflatten(const std::vector<Complex>& x, const Roots& shape) {
    Roots out = shape;
    size_t p = 0;
    for (auto& node : out)
        for (auto& w : node) w = x[p++];
    return out;
}

/// Analytic Jacobian of the log-form residuals with respect to log w.
Eigen::MatrixXcd bae_jacobian(const BetheSystem& sys, const Roots& roots) {
    const auto& g = *sys.algebra;
    const Complex q = sys.q();
    const int n = sys.root_count();
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(n, n);
    std::vector<std::pair<int, int>> idx;  // (node, root)
    for (int i = 0; i < g.rank; ++i)
        for (size_t k = 0; k < roots[i].size(); ++k) idx.emplace_back(i, int(k));
    for (int row = 0; row < n; ++row) {
        auto [i, k] = idx[row];
        const Complex w = roots[i][k];
        for (int col = 0; col < n; ++col) {
            auto [j, l] = idx[col];
            const Complex wl = roots[j][l];
            const Complex qp = std::pow(q, g.b(i, j));
            const Complex qm = std::pow(q, -g.b(i, j));
            Complex d = 0.0;
            // dependence through the summed w_l^{(j)}
            d += (-1.0 / (w * qp - wl) + 1.0 / (w * qm - wl)) * wl;
            if (row == col) {
                // dependence through w itself across all (j', l') terms
                for (int jp = 0; jp < g.rank; ++jp) {
                    const Complex qpp = std::pow(q, g.b(i, jp));
                    const Complex qmm = std::pow(q, -g.b(i, jp));
                    for (const auto& wp : roots[jp])
                        d += (qpp / (w * qpp - wp) - qmm / (w * qmm - wp)) * w;
                }
            }
            J(row, col) += d;
        }
    }
    return J;
}

double max_abs(const std::vector<Complex>& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

} // namespace

BetheSolution solve_newton(const BetheSystem& sys, const Roots& initial, const NewtonOptions& opts) {
    sys.validate();
    const auto& g = *sys.algebra;
    if (int(initial.size()) != g.rank) throw std::invalid_argument("solve_newton: roots size");
    for (int i = 0; i < g.rank; ++i) {
        if (int(initial[i].size()) != sys.degrees[i])
            throw std::invalid_argument("solve_newton: initial roots must match degrees");
        for (const auto& w : initial[i])
            if (std::abs(w) == 0.0) throw std::invalid_argument("solve_newton: zero initial root");
    }

    BetheSolution sol;
    sol.roots = initial;
    const int n = sys.root_count();
    if (n == 0) {
        sol.converged = true;
        sol.status = SolveStatus::Converged;
        return sol;
    }

    std::vector<Complex> res = bae_residuals(sys, sol.roots);
    double rmax = max_abs(res);

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        sol.iterations = iter;
        if (opts.record_trajectory) sol.trajectory.push_back(sol.roots);

        Eigen::MatrixXcd J = bae_jacobian(sys, sol.roots);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double smax = sv(0);
        // The residuals are degree-0 homogeneous in the spectral parameter,
        // so the all-ones vector is always in the kernel (in log coordinates).
        // One vanishing singular value is structural; the solution is only
        // underdetermined when the kernel is larger than that, or when the
        // Jacobian carries no information at all.
        int null_dim = 0;
        for (int m = 0; m < n; ++m)
            if (smax == 0.0 || sv(m) < opts.rank_tol * smax) ++null_dim;
        const bool no_information = smax < 1e-10;
        const bool extra_degenerate = no_information || null_dim >= 2;
        sol.condition_estimate = (n >= 2 && sv(n - 2) > 0.0)
                                     ? smax / sv(n - 2)
                                     : (smax > 0 ? 1.0 : std::numeric_limits<double>::infinity());

        if (rmax < opts.tol) {
            sol.converged = true;
            sol.status = extra_degenerate ? SolveStatus::Underdetermined : SolveStatus::Converged;
            break;
        }
        if (no_information) {
            sol.status = SolveStatus::SingularJacobian;
            break;
        }

        // SVD pseudo-inverse step in log-root coordinates (rank-truncated).
        Eigen::VectorXcd r(n);
        {
            int p = 0;
            for (const auto& z : res) r(p++) = z;
        }
        Eigen::VectorXcd sr = svd.matrixU().adjoint() * r;
        for (int m = 0; m < n; ++m)
            sr(m) = (sv(m) > opts.rank_tol * smax) ? sr(m) / sv(m) : Complex(0.0);
        Eigen::VectorXcd step = svd.matrixV() * sr;

        if (!step.allFinite()) {
            sol.status = SolveStatus::SingularJacobian;
            break;
        }

        // damped update of log w
        std::vector<Complex> x = flatten(sol.roots);
        double damping = 1.0;
        bool accepted = false;
        for (int half = 0; half < 30; ++half, damping *= 0.5) {
            std::vector<Complex> xt = x;
            for (int m = 0; m < n; ++m) xt[m] = x[m] * std::exp(-damping * step(m));
            Roots trial = unflatten(xt, sol.roots);
            std::vector<Complex> rt;
            try {
                rt = bae_residuals(sys, trial);
            } catch (const SingularConfiguration&) {
                continue;  // step walked into a collision, halve further
            }
            double rtmax = max_abs(rt);
            if (rtmax < rmax || rtmax < opts.tol) {
                sol.roots = std::move(trial);
                res = std::move(rt);
                rmax = rtmax;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            sol.status = extra_degenerate ? SolveStatus::SingularJacobian : SolveStatus::MaxIterations;
            break;
        }
    }

    if (!sol.converged && rmax < opts.tol) {
        sol.converged = true;
        sol.status = SolveStatus::Converged;
    }
    sol.residuals = res;
    sol.residual_max = rmax;
    return sol;
}

SingleRootCertificate certify_single_root_family(const lie::AlgebraData& g, int i) {
    // Single root w at node i, all other degrees zero: the only surviving
    // Bethe factor is Q_i(w q^{B_ii}) / Q_i(w q^{-B_ii}) with Q_i(u) = u - w,
    //   (q^b - 1) / (q^{-b} - 1) = -q^b      (b = B_ii),
    // certified here as the exact Laurent identity
    //   (q^b - 1) + q^b (q^{-b} - 1) = 0.
    // The w-dependence cancels, so the residual is independent of the root
    // position and the equation v^{-2} (-q^b) = -1 pins v^2 = q^b.
    const int b = g.b(i, i);
    RationalLaurent lhs = RationalLaurent::t(b) - RationalLaurent(1);
    RationalLaurent rhs = RationalLaurent::t(b) * (RationalLaurent::t(-b) - RationalLaurent(1));
    if (!(lhs + rhs).is_zero())
        throw std::logic_error("single-root certificate identity failed");
    return SingleRootCertificate{i, b};
}

QsystResult qsyst_residual(const BetheSystem& sys, int i,
                           const std::vector<std::function<Complex(Complex)>>& Q,
                           const std::vector<std::function<Complex(Complex)>>& Qt,
                           const std::vector<Complex>& grid) {
    sys.validate();
    const auto& g = *sys.algebra;
    const Complex q = sys.q();
    const Complex qi = std::pow(q, g.d(i));
    QsystResult out;
    for (const auto& u : grid) {
        Complex lhs = sys.v[i] * Q[i](u / qi) * Qt[i](u * qi) -
                      (1.0 / sys.v[i]) * Q[i](u * qi) * Qt[i](u / qi);
        Complex rhs = 1.0;
        for (int j = 0; j < g.rank; ++j) {
            if (j == i) continue;
            switch (g.c(i, j)) {
                case -1: rhs *= Q[j](u); break;
                case -2: rhs *= Q[j](u / q) * Q[j](u * q); break;
                case -3: rhs *= Q[j](u / (q * q)) * Q[j](u) * Q[j](u * q * q); break;
                default: break;
            }
        }
        Complex r = lhs - rhs;
        if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) {
            std::ostringstream os;
            os << "qsyst_residual: evaluation failed at grid point " << cplx(u);
            throw std::runtime_error(os.str());
        }
        out.per_point.push_back(r);
        out.max_residual = std::max(out.max_residual, std::abs(r));
    }
    return out;
}

LatticeRun sl2_lattice_recurrence(Complex q, Complex v, const std::vector<Complex>& roots,
                                  Complex u0, Complex qt_seed, int steps) {
    LatticeRun run;
    Complex qt_prev = qt_seed;  // Qt(u0 q^{-1})
    run.qt_values.push_back(qt_prev);
    Complex u = u0;
    for (int k = 0; k < steps; ++k) {
        Complex qt_next = (1.0 + (1.0 / v) * eval_poly(roots, u * q) * qt_prev) /
                          (v * eval_poly(roots, u / q));
        run.qt_values.push_back(qt_next);
        qt_prev = qt_next;
        u *= q * q;
    }
    double base = std::max(1.0, std::abs(run.qt_values.front()));
    for (const auto& z : run.qt_values)
        run.blowup_indicator = std::max(run.blowup_indicator, std::abs(z) / base);
    return run;
}

LatticeRun sl2_lattice_blowup(Complex q, Complex v, const std::vector<Complex>& roots,
                              double offset_rel, int steps, int pre_steps) {
    if (roots.empty()) throw std::invalid_argument("sl2_lattice_blowup: no roots");
    // Anchor the lattice so that after pre_steps steps the division point
    // u q^{-1} lands offset_rel away from the first root.
    Complex w = roots.front();
    Complex u_at_root = w * q * (1.0 + offset_rel);
    Complex u0 = u_at_root * std::pow(q, -2 * pre_steps);
    return sl2_lattice_recurrence(q, v, roots, u0, Complex(1.0), steps);
}

Complex twisted_rhs(const lie::TwistedFoldData& fold, int i, Complex a,
                    const std::vector<std::function<Complex(Complex)>>& Q) {
    const int m = fold.orbit_count();
    if (i < 0 || i >= m) throw std::invalid_argument("twisted_rhs: bad orbit index");
    if (int(Q.size()) != m) throw std::invalid_argument("twisted_rhs: Q size mismatch");
    const int r = fold.twist_order;
    const Rational di = fold.d[i];

    if (di == Rational(1, 2)) {
        Complex out = Q[i](-a);
        for (int j = 0; j < m; ++j)
            if (fold.rep_adjacent(i, j)) out *= Q[j](a);
        return out;
    }
    if (di == Rational(1)) {
        Complex out = 1.0;
        for (int j = 0; j < m; ++j) {
            if (!fold.rep_adjacent(i, j)) continue;
            if (fold.d[j] == Rational(r)) out *= Q[j](std::pow(a, r));
            else out *= Q[j](a);
        }
        return out;
    }
    // d_i = r: short-orbit neighbors contribute over all r-th roots b of a.
    if (std::abs(a) == 0.0)
        throw std::invalid_argument("twisted_rhs: cannot enumerate r-th roots of a = 0");
    Complex out = 1.0;
    for (int j = 0; j < m; ++j) {
        if (!fold.rep_adjacent(i, j)) continue;
        if (fold.d[j] == Rational(r)) {
            out *= Q[j](a);
        } else {
            Complex b0 = std::pow(a, 1.0 / double(r));
            for (int s = 0; s < r; ++s) {
                Complex b = b0 * std::exp(Complex(0.0, 2.0 * kPi * s / double(r)));
                out *= Q[j](b);
            }
        }
    }
    return out;
}

std::vector<Complex> gl1_bae_residual(const std::vector<Complex>& roots, Complex q1, Complex q2,
                                      Complex q3, Complex t) {
    if (std::abs(1.0 / (q1 * q3) - q2) > 1e-9 * std::abs(q2))
        throw std::invalid_argument("gl1_bae_residual: (q1 q3)^{-1} = q2 violated");
    std::vector<Complex> out;
    for (const auto& w : roots) {
        if (std::abs(w) == 0.0) throw std::invalid_argument("gl1_bae_residual: root at 0");
        Complex plus = eval_poly(roots, w * q1) * eval_poly(roots, w * q2) * eval_poly(roots, w * q3);
        Complex minus = eval_poly(roots, w / q1) * eval_poly(roots, w / q2) * eval_poly(roots, w / q3);
        out.push_back(plus + t * minus);
    }
    return out;
}

Complex gl1_solve_t_single_root(Complex w, Complex q1, Complex q2, Complex q3) {
    if (std::abs(w) == 0.0) throw std::invalid_argument("gl1_solve_t_single_root: root at 0");
    std::vector<Complex> roots{w};
    Complex num = eval_poly(roots, w * q1) * eval_poly(roots, w * q2) * eval_poly(roots, w * q3);
    Complex den = eval_poly(roots, w / q1) * eval_poly(roots, w / q2) * eval_poly(roots, w / q3);
    return -num / den;
}

Gl1PairSolution gl1_solve_pair(Complex q1, Complex q2, Complex q3, Complex w2_init, Complex t_init,
                               double tol, int max_iter) {
    // Scaling freedom fixes w1 = 1. Unknowns (w2, t); equations are the two
    // root residuals with denominators cleared by eval_poly itself.
    Gl1PairSolution sol;
    sol.w2 = w2_init;
    sol.t = t_init;
    auto F = [&](Complex w2, Complex t) {
        std::vector<Complex> roots{Complex(1.0), w2};
        auto r = gl1_bae_residual(roots, q1, q2, q3, t);
        return std::array<Complex, 2>{r[0], r[1]};
    };
    for (int it = 0; it < max_iter; ++it) {
        sol.iterations = it;
        auto f = F(sol.w2, sol.t);
        sol.residual_max = std::max(std::abs(f[0]), std::abs(f[1]));
        if (sol.residual_max < tol) {
            sol.converged = true;
            return sol;
        }
        const double h = 1e-7;
        auto fw = F(sol.w2 + h, sol.t);
        auto ft = F(sol.w2, sol.t + h);
        Eigen::Matrix2cd J;
        J << (fw[0] - f[0]) / h, (ft[0] - f[0]) / h,
             (fw[1] - f[1]) / h, (ft[1] - f[1]) / h;
        Eigen::Vector2cd rhs(f[0], f[1]);
        Eigen::Vector2cd step = J.fullPivLu().solve(rhs);
        if (!step.allFinite()) break;
        sol.w2 -= step(0);
        sol.t -= step(1);
    }
    auto f = F(sol.w2, sol.t);
    sol.residual_max = std::max(std::abs(f[0]), std::abs(f[1]));
    sol.converged = sol.residual_max < tol;
    return sol;
}

} // namespace qqkit::bethe
