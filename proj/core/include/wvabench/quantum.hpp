#pragma once

#include <cstddef>
#include <vector>

#include "wvabench/linalg.hpp"
#include "wvabench/seeding.hpp"

namespace wvabench {

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kOrthonormalTol = 1e-10;
/// |<f|i>| at or below this leaves the weak value undefined.
inline constexpr double kOverlapFloor = 1e-10;
/// Relative imaginary part above which a weak value is rejected as complex.
inline constexpr double kComplexWeakValueTol = 1e-8;
/// x * max|eig(O)| / sigma above this flags the first-order model as suspect.
inline constexpr double kWeakRegimeLimit = 0.1;

/// Hermitian operator on the system, dimension >= 2.
class Observable {
  public:
    explicit Observable(CMatrix matrix);

    const CMatrix &matrix() const noexcept { return matrix_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }
    double max_abs_eigenvalue() const;

  private:
    CMatrix matrix_;
};

class PureState {
  public:
    /// Requires unit norm within kNormTol.
    explicit PureState(CVector amplitudes);

    /// Rescales to unit norm; rejects the zero vector.
    static PureState normalized(const CVector &amplitudes);

    const CVector &amplitudes() const noexcept { return amplitudes_; }
    Eigen::Index dim() const noexcept { return amplitudes_.size(); }

  private:
    CVector amplitudes_;
};

class OrthonormalBasis {
  public:
    explicit OrthonormalBasis(std::vector<PureState> vectors);

    /// Columns of `u` are the basis vectors.
    static OrthonormalBasis from_columns(const CMatrix &u);

    std::size_t size() const noexcept { return vectors_.size(); }
    Eigen::Index dim() const noexcept { return vectors_.front().dim(); }
    const PureState &operator[](std::size_t k) const { return vectors_.at(k); }
    const std::vector<PureState> &vectors() const noexcept { return vectors_; }

  private:
    std::vector<PureState> vectors_;
};

/// Standard deviation of the Gaussian meter intensity |Phi(q)|^2.
class MeterSpec {
  public:
    explicit MeterSpec(double sigma);
    double sigma() const noexcept { return sigma_; }

  private:
    double sigma_;
};

class CouplingConfig {
  public:
    CouplingConfig(Observable observable, PureState initial_state, OrthonormalBasis basis,
                   MeterSpec meter, double x_true);

    const Observable &observable() const noexcept { return observable_; }
    const PureState &initial_state() const noexcept { return initial_; }
    const OrthonormalBasis &basis() const noexcept { return basis_; }
    const MeterSpec &meter() const noexcept { return meter_; }
    double x_true() const noexcept { return x_true_; }

    /// x_true * max|eig(O)| / sigma.
    double weak_regime_ratio() const noexcept { return weak_ratio_; }
    bool weak_regime_warning() const noexcept { return weak_ratio_ > kWeakRegimeLimit; }

  private:
    Observable observable_;
    PureState initial_;
    OrthonormalBasis basis_;
    MeterSpec meter_;
    double x_true_;
    double weak_ratio_;
};

double weak_value(const Observable &observable, const PureState &initial, const PureState &final_state);

/// Component k is the weak value for basis vector k. Errors name the
/// offending outcome (1-based in the message).
RVector weak_value_vector(const Observable &observable, const PureState &initial,
                          const OrthonormalBasis &basis);

/// |<f|i>|^2 for each basis vector.
RVector outcome_probs(const PureState &initial, const OrthonormalBasis &basis);

/// <i|O^2|i>.
double expected_O_squared(const PureState &initial, const Observable &observable);

/// Outcome probabilities and weak values together. Outcomes whose overlap
/// is at or below kOverlapFloor are marked impossible: probability is set to
/// zero (it is at most 1e-20) and the weak value is NaN. Every other outcome
/// must have a real weak value.
struct OutcomeTable {
    RVector probabilities;
    RVector weak_values;
    std::vector<bool> possible;

    std::size_t size() const noexcept { return possible.size(); }
};

OutcomeTable outcome_table(const Observable &observable, const PureState &initial,
                           const OrthonormalBasis &basis);

struct JointSample {
    std::vector<int> outcomes;  // 0-based basis indices
    RVector meter;              // q_j
};

/// Draws n pairs (f_j, q_j) from Pr(f) N(x O_w(f), sigma^2).
JointSample sample_joint(const CouplingConfig &config, std::size_t n, Rng &rng);
JointSample sample_joint(const OutcomeTable &table, double x, double sigma, std::size_t n, Rng &rng);

// Common fixtures.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
/// k-th computational basis vector in dimension d.
PureState basis_ket(Eigen::Index d, Eigen::Index k);
/// cos(theta)|0> + sin(theta)|1>.
PureState qubit_state(double theta);
/// {(|0> - |1>)/sqrt2, (|0> + |1>)/sqrt2}.
OrthonormalBasis minus_plus_basis();
OrthonormalBasis computational_basis(Eigen::Index d);

}  // namespace wvabench
