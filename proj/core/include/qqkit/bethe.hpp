#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qqkit/laurent.hpp"
#include "qqkit/liedata.hpp"

namespace qqkit::bethe {

using Complex = std::complex<double>;
/// roots[i] = multiset of roots of Q_i.
using Roots = std::vector<std::vector<Complex>>;

/// One Bethe Ansatz problem: q = exp(i pi beta2), twist values v_i, the
/// polynomial degrees N_i, and a branch integer per root fixing the log
/// branch of the -1 on the right-hand side.
struct BetheSystem {
    const lie::AlgebraData* algebra = nullptr;
    double beta2 = 0.0;
    std::vector<Complex> v;
    std::vector<int> degrees;
    std::vector<std::vector<int>> branch;  // branch[i][l], defaults to 0

    Complex q() const;
    int root_count() const;
    /// Throws std::invalid_argument when invariants fail (q a root of unity
    /// up to the safety bound, negative degrees, vanishing v_i).
    void validate() const;
};

struct SingularConfiguration : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Q_i(u) = prod_l (u - w_l), monic from its root multiset.
Complex eval_poly(const std::vector<Complex>& roots, Complex u);

/// Log-form residual of the Bethe equation for every root:
///   log v_i^{-2} + sum_j sum_l [log(w q^{B_ij} - w^{(j)}_l) - log(w q^{-B_ij} - w^{(j)}_l)]
///   - i pi (2n+1).
/// Throws SingularConfiguration naming the pair if a shifted root collides
/// with another root (relative tolerance 1e-8).
std::vector<Complex> bae_residuals(const BetheSystem& sys, const Roots& roots);

/// Functional form of the residual map (flattened in node order).
std::function<std::vector<Complex>(const Roots&)> build_bae(const BetheSystem& sys);

enum class SolveStatus { Converged, Underdetermined, MaxIterations, SingularJacobian };
std::string to_string(SolveStatus s);

struct BetheSolution {
    Roots roots;
    std::vector<Complex> residuals;
    double residual_max = 0.0;
    bool converged = false;
    SolveStatus status = SolveStatus::MaxIterations;
    int iterations = 0;
    double condition_estimate = 0.0;
    std::vector<Roots> trajectory;  // per-iteration snapshots when requested
};

struct NewtonOptions {
    double tol = 1e-12;
    int max_iterations = 200;
    /// Singular values below rank_tol * s_max count as a degenerate
    /// direction; with small residual this is the underdetermined case.
    double rank_tol = 1e-8;
    bool record_trajectory = false;
};

/// Damped Newton (step halving) on the log-form residuals in log-root
/// coordinates. Degenerate families are reported as Underdetermined, not
/// failure, when the residual is already below tolerance.
BetheSolution solve_newton(const BetheSystem& sys, const Roots& initial,
                           const NewtonOptions& opts = {});

/// Exact certificate for one-root families: for a system with a single root
/// at node i (all other degrees zero) the Bethe residual is independent of
/// the root position and vanishes iff v_i^2 = q^{B_ii}. Verified symbolically
/// in exact Laurent arithmetic over q; throws std::logic_error if the
/// underlying identity fails.
struct SingleRootCertificate {
    int node = 0;
    int b_ii = 0;  // residual vanishes iff v^2 = q^{b_ii}
};
SingleRootCertificate certify_single_root_family(const lie::AlgebraData& g, int i);

/// Max residual of the functional QQ~-system over a spectral grid:
///   v_i Q_i(u q_i^{-1}) Qt_i(u q_i) - v_i^{-1} Q_i(u q_i) Qt_i(u q_i^{-1}) - RHS_i(u).
/// Q and Qt are per-node callables. Throws std::runtime_error naming the
/// grid point on evaluation failure (non-finite values).
struct QsystResult {
    double max_residual = 0.0;
    std::vector<Complex> per_point;
};
QsystResult qsyst_residual(const BetheSystem& sys, int i,
                           const std::vector<std::function<Complex(Complex)>>& Q,
                           const std::vector<std::function<Complex(Complex)>>& Qt,
                           const std::vector<Complex>& grid);

/// sl2 lattice transport of Qt by the first-order recurrence
///   Qt(u q) = (1 + v^{-1} Q(u q) Qt(u q^{-1})) / (v Q(u q^{-1})),
/// marched along u0 q^{2k}. The blowup indicator is max_k |Qt_k| / |Qt_0|;
/// it stays O(1) when the lattice passes through a Bethe root and explodes
/// like (residual / offset) otherwise.
struct LatticeRun {
    std::vector<Complex> qt_values;
    double blowup_indicator = 0.0;
};
LatticeRun sl2_lattice_recurrence(Complex q, Complex v, const std::vector<Complex>& roots,
                                  Complex u0, Complex qt_seed, int steps);
/// Convenience: lattice anchored just below the first root, offset_rel away
/// from it, marched through the root and steps beyond.
LatticeRun sl2_lattice_blowup(Complex q, Complex v, const std::vector<Complex>& roots,
                              double offset_rel = 1e-6, int steps = 24, int pre_steps = 3);

/// Right-hand side of the twisted QQ~-system at node i (by orbit index),
/// one of the three cases depending on d_i. Q[j] evaluates the orbit-j
/// function. Throws std::invalid_argument for a = 0 in the root-enumeration
/// case. Experimental: evaluates the conjectural formula, nothing more.
Complex twisted_rhs(const lie::TwistedFoldData& fold, int i, Complex a,
                    const std::vector<std::function<Complex(Complex)>>& Q);

/// gl1 toroidal Bethe residual at every root of Q:
///   Q(w q1) Q(w q2) Q(w q3) + t Q(w q1^{-1}) Q(w q2^{-1}) Q(w q3^{-1}).
/// Requires (q1 q3)^{-1} = q2 within 1e-9 and roots away from 0.
std::vector<Complex> gl1_bae_residual(const std::vector<Complex>& roots, Complex q1, Complex q2,
                                      Complex q3, Complex t);

/// Closed-form t for a single root (independent of the root position):
/// t = - prod Q(w qi) / prod Q(w qi^{-1}).
Complex gl1_solve_t_single_root(Complex w, Complex q1, Complex q2, Complex q3);

/// Degree-2 case: scaling fixes w1 = 1; solves (w2, t) by Newton from the
/// given start so that both root residuals vanish.
struct Gl1PairSolution {
    Complex w2;
    Complex t;
    bool converged = false;
    int iterations = 0;
    double residual_max = 0.0;
};
Gl1PairSolution gl1_solve_pair(Complex q1, Complex q2, Complex q3, Complex w2_init,
                               Complex t_init, double tol = 1e-13, int max_iter = 100);

} // namespace qqkit::bethe
