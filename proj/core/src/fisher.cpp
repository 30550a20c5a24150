#include "wvabench/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "wvabench/errors.hpp"

namespace wvabench {

JointModel::JointModel(CMatrix hamiltonian, PureState initial_a, PureState initial_b, OrthonormalBasis basis_a,
                       double x)
    : hamiltonian_(std::move(hamiltonian)),
      initial_a_(std::move(initial_a)),
      initial_b_(std::move(initial_b)),
      basis_a_(std::move(basis_a)),
      x_(x) {
    const Eigen::Index d = dim_a() * dim_b();
    if (hamiltonian_.rows() != d || hamiltonian_.cols() != d) {
        raise(ErrorKind::InvalidArgument, "hamiltonian must be (d_A d_B) x (d_A d_B)");
    }
    if (hermiticity_defect(hamiltonian_) > kHermitianTol) {
        raise(ErrorKind::InvalidArgument, "hamiltonian is not Hermitian");
    }
    if (basis_a_.dim() != dim_a()) {
        raise(ErrorKind::InvalidArgument, "basis on A has the wrong dimension");
    }
    if (dim_b() > kMaxMeterDim) {
        raise(ErrorKind::BadParams, "meter dimension exceeds " + std::to_string(kMaxMeterDim));
    }
    if (!std::isfinite(x_)) {
        raise(ErrorKind::InvalidArgument, "x must be finite");
    }
}

JointModel JointModel::at(double x) const {
    return JointModel(hamiltonian_, initial_a_, initial_b_, basis_a_, x);
}

CVector JointModel::product_state() const { return kron(initial_a_.amplitudes(), initial_b_.amplitudes()); }

JointEvolution evolve_joint(const JointModel &model) {
    const CMatrix u = unitary_evolution(model.hamiltonian(), model.x());
    CVector psi = u * model.product_state();
    CVector derivative = cplx(0.0, -1.0) * (model.hamiltonian() * psi);
    return {PureState(std::move(psi)), std::move(derivative)};
}

CVector finite_difference_derivative(const JointModel &model, double step) {
    const CVector start = model.product_state();
    const CVector plus = unitary_evolution(model.hamiltonian(), model.x() + step) * start;
    const CVector minus = unitary_evolution(model.hamiltonian(), model.x() - step) * start;
    return (plus - minus) / (2.0 * step);
}

double qfi_pure(const PureState &state, const CVector &derivative) {
    if (derivative.size() != state.dim()) {
        raise(ErrorKind::InvalidArgument, "state and derivative differ in length");
    }
    const double speed = derivative.squaredNorm();
    const cplx overlap = derivative.dot(state.amplitudes());
    return 4.0 * (speed - std::norm(overlap));
}

double qfi_unitary_closed_form(const JointModel &model) {
    const CVector v = model.product_state();
    const CVector hv = model.hamiltonian() * v;
    const double mean = v.dot(hv).real();
    return 4.0 * (hv.squaredNorm() - mean * mean);
}

std::vector<KrausTerm> kraus_family(const JointModel &model) {
    const Eigen::Index da = model.dim_a();
    const Eigen::Index db = model.dim_b();
    const CMatrix u = unitary_evolution(model.hamiltonian(), model.x());
    const CMatrix du = cplx(0.0, -1.0) * (model.hamiltonian() * u);
    const CMatrix id_b = CMatrix::Identity(db, db);
    const CMatrix embed_i = kron(CMatrix(model.initial_a().amplitudes()), id_b);  // (da db) x db
    const CVector &phi = model.initial_b().amplitudes();

    std::vector<KrausTerm> out;
    out.reserve(static_cast<std::size_t>(da));
    for (std::size_t f = 0; f < model.basis_a().size(); ++f) {
        const CMatrix project_f = kron(CMatrix(model.basis_a()[f].amplitudes().adjoint()), id_b);  // db x (da db)
        KrausTerm term;
        term.m = project_f * u * embed_i;
        term.dm = project_f * du * embed_i;
        term.p = (term.m * phi).squaredNorm();
        out.push_back(std::move(term));
    }
    return out;
}

ConditionalQfi postselected_qfi(const CMatrix &m, const CMatrix &dm, const PureState &phi) {
    const CVector m_phi = m * phi.amplitudes();
    const CVector dm_phi = dm * phi.amplitudes();
    const double p = m_phi.squaredNorm();
    if (!(p > kProbabilityFloor)) {
        raise(ErrorKind::NegligibleProbability, "post-selection probability " + std::to_string(p) +
                                                    " is below the floor");
    }
    const double a = dm_phi.squaredNorm();    // <phi|dM^dag dM|phi>
    const cplx b = dm_phi.dot(m_phi);          // <phi|dM^dag M|phi>
    return {4.0 * (a / p - std::norm(b) / (p * p)), p};
}

double conditional_state_qfi(const CMatrix &m, const CMatrix &dm, const PureState &phi) {
    const CVector m_phi = m * phi.amplitudes();
    const CVector dm_phi = dm * phi.amplitudes();
    const double p = m_phi.squaredNorm();
    if (!(p > kProbabilityFloor)) {
        raise(ErrorKind::NegligibleProbability, "post-selection probability is below the floor");
    }
    const double sqrt_p = std::sqrt(p);
    // dp/dx = <phi|dM^dag M + M^dag dM|phi>.
    const double dp = 2.0 * m_phi.dot(dm_phi).real();
    const CVector psi = m_phi / sqrt_p;
    const CVector dpsi = dm_phi / sqrt_p - (dp / (2.0 * p * sqrt_p)) * m_phi;
    return qfi_pure(PureState::normalized(psi), dpsi);
}

QfiReport fi_decomposition(const JointModel &model, SmallBranchPolicy policy) {
    const std::vector<KrausTerm> kraus = kraus_family(model);
    const auto outcomes = static_cast<Eigen::Index>(kraus.size());
    const PureState &phi = model.initial_b();

    QfiReport report;
    const JointEvolution joint = evolve_joint(model);
    report.i_ab = qfi_pure(joint.state, joint.derivative);
    report.p_f = RVector::Zero(outcomes);
    report.i_cond = RVector::Zero(outcomes);
    report.i_cond_state = RVector::Zero(outcomes);

    double weighted = 0.0;
    for (Eigen::Index f = 0; f < outcomes; ++f) {
        const KrausTerm &term = kraus[static_cast<std::size_t>(f)];
        report.p_f(f) = term.p;
        if (!(term.p > kProbabilityFloor)) {
            if (policy == SmallBranchPolicy::Throw) {
                raise(ErrorKind::NegligibleProbability,
                      "outcome " + std::to_string(f + 1) + " has probability " + std::to_string(term.p));
            }
            report.excluded.push_back(static_cast<std::size_t>(f));
            report.excluded_mass += term.p;
            continue;
        }
        const ConditionalQfi cond = postselected_qfi(term.m, term.dm, phi);
        report.i_cond(f) = cond.i_f;
        report.i_cond_state(f) = conditional_state_qfi(term.m, term.dm, phi);
        const CVector m_phi = term.m * phi.amplitudes();
        const CVector dm_phi = term.dm * phi.amplitudes();
        const double dp = 2.0 * m_phi.dot(dm_phi).real();
        report.i_classical += dp * dp / term.p;
        weighted += term.p * cond.i_f;
    }
    report.i_rho = report.i_classical + weighted;

    constexpr double slack = 1e-9;
    bool holds = report.i_rho <= report.i_ab + slack;
    for (Eigen::Index f = 0; f < outcomes; ++f) {
        holds = holds && report.p_f(f) * report.i_cond(f) <= report.i_rho + slack;
    }
    report.chain_holds = holds;
    return report;
}

double chernoff_bound(std::size_t n, double p_check, double delta) {
    if (n < 1) raise(ErrorKind::BadParams, "chernoff bound needs n >= 1");
    if (!(p_check > 0.0 && p_check <= 1.0)) raise(ErrorKind::BadParams, "p_check must lie in (0, 1]");
    if (!(delta >= 0.0) || !std::isfinite(delta)) raise(ErrorKind::BadParams, "delta must be finite and >= 0");
    const double mu = static_cast<double>(n) * p_check;
    return std::exp(-mu * delta * delta / (2.0 + delta));
}

namespace {

CMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            g(i, j) = cplx(re, im);
        }
    }
    return g;
}

}  // namespace

CMatrix random_hermitian(Eigen::Index d, Rng &rng) {
    const CMatrix g = ginibre(d, d, rng);
    return 0.5 * (g + g.adjoint());
}

PureState random_state(Eigen::Index d, Rng &rng) {
    return PureState::normalized(ginibre(d, 1, rng).col(0));
}

CMatrix random_unitary(Eigen::Index d, Rng &rng) {
    const CMatrix g = ginibre(d, d, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < d; ++k) {
        const cplx diag = r(k, k);
        if (std::abs(diag) > 0.0) q.col(k) *= diag / std::abs(diag);
    }
    return q;
}

JointModel random_joint_model(Eigen::Index dim_a, Eigen::Index dim_b, Rng &rng) {
    std::uniform_real_distribution<double> pick_x(-1.5, 1.5);
    CMatrix h = random_hermitian(dim_a * dim_b, rng);
    PureState initial_a = random_state(dim_a, rng);
    PureState initial_b = random_state(dim_b, rng);
    OrthonormalBasis basis = OrthonormalBasis::from_columns(random_unitary(dim_a, rng));
    const double x = pick_x(rng);
    return JointModel(std::move(h), std::move(initial_a), std::move(initial_b), std::move(basis), x);
}

}  // namespace wvabench
