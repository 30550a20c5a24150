#include "wvabench/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "wvabench/errors.hpp"

namespace wvabench {

Observable::Observable(CMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) {
        raise(ErrorKind::InvalidArgument, "observable must be square");
    }
    if (matrix_.rows() < 2) {
        raise(ErrorKind::InvalidArgument, "observable dimension must be at least 2");
    }
    if (hermiticity_defect(matrix_) > kHermitianTol) {
        raise(ErrorKind::InvalidArgument, "observable is not Hermitian");
    }
}

double Observable::max_abs_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

PureState::PureState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) {
        raise(ErrorKind::InvalidArgument, "state has no amplitudes");
    }
    const double norm = amplitudes_.norm();
    if (!(std::abs(norm - 1.0) <= kNormTol)) {
        raise(ErrorKind::NotNormalized,
              "state norm " + std::to_string(norm) + " differs from 1");
    }
}

PureState PureState::normalized(const CVector &amplitudes) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        raise(ErrorKind::NotNormalized, "cannot normalize a zero or non-finite vector");
    }
    return PureState(amplitudes / norm);
}

OrthonormalBasis::OrthonormalBasis(std::vector<PureState> vectors) : vectors_(std::move(vectors)) {
    if (vectors_.empty()) {
        raise(ErrorKind::InvalidArgument, "basis is empty");
    }
    const Eigen::Index d = vectors_.front().dim();
    if (static_cast<Eigen::Index>(vectors_.size()) != d) {
        raise(ErrorKind::InvalidArgument, "basis must contain exactly d vectors");
    }
    CMatrix u(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        if (vectors_[k].dim() != d) {
            raise(ErrorKind::InvalidArgument, "basis vectors have mismatched dimensions");
        }
        u.col(k) = vectors_[k].amplitudes();
    }
    const double defect = (u.adjoint() * u - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (defect > kOrthonormalTol) {
        raise(ErrorKind::InvalidArgument, "basis vectors are not orthonormal");
    }
}

OrthonormalBasis OrthonormalBasis::from_columns(const CMatrix &u) {
    std::vector<PureState> vectors;
    vectors.reserve(u.cols());
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
        vectors.emplace_back(u.col(k));
    }
    return OrthonormalBasis(std::move(vectors));
}

MeterSpec::MeterSpec(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        raise(ErrorKind::InvalidArgument, "meter sigma must be positive and finite");
    }
}

CouplingConfig::CouplingConfig(Observable observable, PureState initial_state,
                               OrthonormalBasis basis, MeterSpec meter, double x_true)
    : observable_(std::move(observable)),
      initial_(std::move(initial_state)),
      basis_(std::move(basis)),
      meter_(meter),
      x_true_(x_true) {
    if (initial_.dim() != observable_.dim() || basis_.dim() != observable_.dim()) {
        raise(ErrorKind::InvalidArgument, "observable, state and basis dimensions disagree");
    }
    if (!std::isfinite(x_true_)) {
        raise(ErrorKind::InvalidArgument, "x_true must be finite");
    }
    weak_ratio_ = std::abs(x_true_) * observable_.max_abs_eigenvalue() / meter_.sigma();
}

double weak_value(const Observable &observable, const PureState &initial, const PureState &final_state) {
    if (initial.dim() != observable.dim() || final_state.dim() != observable.dim()) {
        raise(ErrorKind::InvalidArgument, "dimension mismatch in weak_value");
    }
    const cplx overlap = final_state.amplitudes().dot(initial.amplitudes());
    if (std::abs(overlap) <= kOverlapFloor) {
        raise(ErrorKind::DegenerateOverlap, "|<f|i>| is below the overlap floor");
    }
    const cplx numerator = final_state.amplitudes().dot(observable.matrix() * initial.amplitudes());
    const cplx value = numerator / overlap;
    // The +1 keeps the test meaningful for weak values near zero, where a
    // purely relative criterion would flag round-off.
    if (std::abs(value.imag()) > kComplexWeakValueTol * (std::abs(value.real()) + 1.0)) {
        raise(ErrorKind::ComplexWeakValue,
              "weak value has imaginary part " + std::to_string(value.imag()));
    }
    return value.real();
}

RVector weak_value_vector(const Observable &observable, const PureState &initial,
                          const OrthonormalBasis &basis) {
    RVector out(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        try {
            out(static_cast<Eigen::Index>(k)) = weak_value(observable, initial, basis[k]);
        } catch (const ModelError &e) {
            throw ModelError(e.kind(), "outcome " + std::to_string(k + 1) + ": " + e.detail());
        }
    }
    return out;
}

RVector outcome_probs(const PureState &initial, const OrthonormalBasis &basis) {
    if (basis.dim() != initial.dim()) {
        raise(ErrorKind::InvalidArgument, "dimension mismatch in outcome_probs");
    }
    RVector probs(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        probs(static_cast<Eigen::Index>(k)) = std::norm(basis[k].amplitudes().dot(initial.amplitudes()));
    }
    return probs;
}

double expected_O_squared(const PureState &initial, const Observable &observable) {
    if (initial.dim() != observable.dim()) {
        raise(ErrorKind::InvalidArgument, "dimension mismatch in expected_O_squared");
    }
    // <i|O^2|i> = ||O|i>||^2 for Hermitian O.
    return (observable.matrix() * initial.amplitudes()).squaredNorm();
}

OutcomeTable outcome_table(const Observable &observable, const PureState &initial,
                           const OrthonormalBasis &basis) {
    OutcomeTable table;
    const auto d = static_cast<Eigen::Index>(basis.size());
    table.probabilities = outcome_probs(initial, basis);
    table.weak_values = RVector::Constant(d, std::numeric_limits<double>::quiet_NaN());
    table.possible.assign(basis.size(), false);
    for (Eigen::Index k = 0; k < d; ++k) {
        const cplx overlap = basis[k].amplitudes().dot(initial.amplitudes());
        if (std::abs(overlap) <= kOverlapFloor) {
            table.probabilities(k) = 0.0;
            continue;
        }
        try {
            table.weak_values(k) = weak_value(observable, initial, basis[k]);
        } catch (const ModelError &e) {
            throw ModelError(e.kind(), "outcome " + std::to_string(k + 1) + ": " + e.detail());
        }
        table.possible[k] = true;
    }
    return table;
}

JointSample sample_joint(const OutcomeTable &table, double x, double sigma, std::size_t n, Rng &rng) {
    if (n == 0) {
        raise(ErrorKind::InvalidArgument, "sample_joint needs n >= 1");
    }
    const auto &p = table.probabilities;
    std::discrete_distribution<int> pick_outcome(p.data(), p.data() + p.size());
    std::normal_distribution<double> gauss(0.0, 1.0);

    JointSample out;
    out.outcomes.resize(n);
    out.meter.resize(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        const int f = pick_outcome(rng);
        out.outcomes[j] = f;
        out.meter(static_cast<Eigen::Index>(j)) = x * table.weak_values(f) + sigma * gauss(rng);
    }
    return out;
}

JointSample sample_joint(const CouplingConfig &config, std::size_t n, Rng &rng) {
    const OutcomeTable table = outcome_table(config.observable(), config.initial_state(), config.basis());
    return sample_joint(table, config.x_true(), config.meter().sigma(), n, rng);
}

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
    return m;
}

CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

PureState basis_ket(Eigen::Index d, Eigen::Index k) {
    CVector v = CVector::Zero(d);
    v(k) = 1.0;
    return PureState(v);
}

PureState qubit_state(double theta) {
    CVector v(2);
    v << std::cos(theta), std::sin(theta);
    return PureState(v);
}

OrthonormalBasis minus_plus_basis() {
    const double h = 1.0 / std::sqrt(2.0);
    CVector minus(2), plus(2);
    minus << h, -h;
    plus << h, h;
    return OrthonormalBasis({PureState(minus), PureState(plus)});
}

OrthonormalBasis computational_basis(Eigen::Index d) {
    return OrthonormalBasis::from_columns(CMatrix::Identity(d, d));
}

}  // namespace wvabench
