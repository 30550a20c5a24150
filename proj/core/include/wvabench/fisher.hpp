#pragma once

#include <cstddef>
#include <vector>

#include "wvabench/linalg.hpp"
#include "wvabench/quantum.hpp"

namespace wvabench {

/// Probabilities at or below this make a conditional meter state
/// numerically meaningless.
inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr Eigen::Index kMaxMeterDim = 8;
inline constexpr double kFiniteDifferenceStep = 1e-5;

/// System A coupled to a finite-dimensional meter B through
/// U(x) = exp(-i x H), starting from |i> (x) |phi>. A is then measured in
/// `basis_a`. Indices of A (x) B vectors are a * d_B + b.
class JointModel {
  public:
    JointModel(CMatrix hamiltonian, PureState initial_a, PureState initial_b, OrthonormalBasis basis_a,
               double x);

    const CMatrix &hamiltonian() const noexcept { return hamiltonian_; }
    const PureState &initial_a() const noexcept { return initial_a_; }
    const PureState &initial_b() const noexcept { return initial_b_; }
    const OrthonormalBasis &basis_a() const noexcept { return basis_a_; }
    double x() const noexcept { return x_; }
    Eigen::Index dim_a() const noexcept { return initial_a_.dim(); }
    Eigen::Index dim_b() const noexcept { return initial_b_.dim(); }

    /// Same model at a different parameter value.
    JointModel at(double x) const;
    /// |i> (x) |phi>.
    CVector product_state() const;

  private:
    CMatrix hamiltonian_;
    PureState initial_a_;
    PureState initial_b_;
    OrthonormalBasis basis_a_;
    double x_;
};

struct JointEvolution {
    PureState state;     // U(x)|i,phi>
    CVector derivative;  // -i H U(x)|i,phi>
};

JointEvolution evolve_joint(const JointModel &model);

/// Central finite difference of U(x)|i,phi> in x.
CVector finite_difference_derivative(const JointModel &model, double step = kFiniteDifferenceStep);

/// 4 (<d psi|d psi> - |<d psi|psi>|^2).
double qfi_pure(const PureState &state, const CVector &derivative);

/// 4 (<H^2> - <H>^2) in |i,phi>, the closed form for unitary families.
double qfi_unitary_closed_form(const JointModel &model);

struct KrausTerm {
    CMatrix m;   // <f|U(x)|i>, acting on B
    CMatrix dm;  // <f|(-iH) U(x)|i>
    double p = 0.0;
};

std::vector<KrausTerm> kraus_family(const JointModel &model);

struct ConditionalQfi {
    double i_f = 0.0;
    double p_f = 0.0;
};

/// Conditional QFI of the post-selected meter state from the Kraus operator
/// and its derivative:
///   4 (<phi|dM^dag dM|phi> / p - |<phi|dM^dag M|phi>|^2 / p^2).
ConditionalQfi postselected_qfi(const CMatrix &m, const CMatrix &dm, const PureState &phi);

/// Same quantity computed the long way: normalize M|phi>, differentiate it
/// with the quotient rule and apply qfi_pure.
double conditional_state_qfi(const CMatrix &m, const CMatrix &dm, const PureState &phi);

enum class SmallBranchPolicy { Exclude, Throw };

struct QfiReport {
    double i_ab = 0.0;
    RVector p_f;
    /// Conditional QFI per outcome; zero for excluded outcomes.
    RVector i_cond;
    /// Same per-outcome quantity through conditional_state_qfi.
    RVector i_cond_state;
    double i_classical = 0.0;
    /// QFI of the post-measurement state: i_classical + sum_f p_f i_cond.
    double i_rho = 0.0;
    std::vector<std::size_t> excluded;
    double excluded_mass = 0.0;
    /// max_f p_f i_cond_f <= i_rho <= i_ab, with 1e-9 slack.
    bool chain_holds = false;
};

QfiReport fi_decomposition(const JointModel &model, SmallBranchPolicy policy = SmallBranchPolicy::Exclude);

/// exp(-n p delta^2 / (2 + delta)): bound on Pr[X >= (1 + delta) n p] for
/// X ~ Binomial(n, p).
double chernoff_bound(std::size_t n, double p_check, double delta);

// Random instances for sweeps and property tests.
CMatrix random_hermitian(Eigen::Index d, Rng &rng);
PureState random_state(Eigen::Index d, Rng &rng);
/// Haar-random unitary via QR of a complex Ginibre matrix.
CMatrix random_unitary(Eigen::Index d, Rng &rng);
JointModel random_joint_model(Eigen::Index dim_a, Eigen::Index dim_b, Rng &rng);

}  // namespace wvabench
