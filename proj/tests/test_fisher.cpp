#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wvabench/errors.hpp"
#include "wvabench/fisher.hpp"

using namespace wvabench;

namespace {

CMatrix sz_sx() { return kron(pauli_z(), pauli_x()); }

PureState plus() { return minus_plus_basis()[1]; }

OrthonormalBasis plus_minus() { return OrthonormalBasis({minus_plus_basis()[1], minus_plus_basis()[0]}); }

JointModel product_model(double x) {
    return JointModel(sz_sx(), basis_ket(2, 0), basis_ket(2, 0), computational_basis(2), x);
}

}  // namespace

TEST(EvolveJoint, IdentityAtZero) {
    Rng rng(1);
    const JointModel m(random_hermitian(6, rng), random_state(3, rng), random_state(2, rng),
                       OrthonormalBasis::from_columns(random_unitary(3, rng)), 0.0);
    const JointEvolution e = evolve_joint(m);
    EXPECT_LT((e.state.amplitudes() - m.product_state()).norm(), 1e-15);
}

TEST(EvolveJoint, IdentityHamiltonianIsGlobalPhase) {
    const double x = 0.8;
    const JointModel m(CMatrix::Identity(4, 4), plus(), basis_ket(2, 1), computational_basis(2), x);
    const JointEvolution e = evolve_joint(m);
    EXPECT_LT((e.state.amplitudes() - std::polar(1.0, -x) * m.product_state()).norm(), 1e-14);
    EXPECT_NEAR(qfi_pure(e.state, e.derivative), 0.0, 1e-12);
}

TEST(EvolveJoint, NormPreservedAndDerivativeMatchesFiniteDifference) {
    Rng rng(2);
    for (int k = 0; k < 100; ++k) {
        const JointModel m = random_joint_model(2 + k % 3, 1 + k % 4, rng);
        const JointEvolution e = evolve_joint(m);
        EXPECT_NEAR(e.state.amplitudes().norm(), 1.0, 1e-10);
        EXPECT_LT((e.derivative - finite_difference_derivative(m)).cwiseAbs().maxCoeff(), 1e-4);
    }
}

TEST(QfiPure, PhaseEvolutionCarriesNoInformation) {
    Rng rng(3);
    const PureState s = random_state(4, rng);
    EXPECT_NEAR(qfi_pure(s, cplx(0.0, 0.7) * s.amplitudes()), 0.0, 1e-14);
}

TEST(QfiPure, ProductHamiltonianExample) {
    for (double x : {0.0, 0.3, 1.7}) {
        const JointModel m = product_model(x);
        const JointEvolution e = evolve_joint(m);
        EXPECT_NEAR(qfi_pure(e.state, e.derivative), 4.0, 1e-8) << x;
        EXPECT_NEAR(qfi_unitary_closed_form(m), 4.0, 1e-12);
    }
}

TEST(QfiPure, RejectsLengthMismatch) {
    EXPECT_THROW(qfi_pure(basis_ket(2, 0), CVector::Zero(3)), ModelError);
}

TEST(KrausFamily, BasisContainingInitialAtZero) {
    Rng rng(4);
    const JointModel m(random_hermitian(4, rng), basis_ket(2, 1), random_state(2, rng), computational_basis(2), 0.0);
    const auto k = kraus_family(m);
    EXPECT_LT((k[1].m - CMatrix::Identity(2, 2)).norm(), 1e-15);
    EXPECT_LT(k[0].m.norm(), 1e-15);
    EXPECT_NEAR(k[1].p, 1.0, 1e-15);
}

TEST(KrausFamily, CompletenessAndNormalization) {
    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        const JointModel m = random_joint_model(2 + t % 3, 1 + t % 4, rng);
        const auto k = kraus_family(m);
        CMatrix sum = CMatrix::Zero(m.dim_b(), m.dim_b());
        double p = 0.0;
        for (const auto &term : k) {
            sum += term.m.adjoint() * term.m;
            p += term.p;
        }
        EXPECT_LT((sum - CMatrix::Identity(m.dim_b(), m.dim_b())).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_NEAR(p, 1.0, 1e-12);
    }
}

TEST(PostselectedQfi, UninformativeKraus) {
    const CMatrix m = 0.6 * CMatrix::Identity(2, 2);
    const CMatrix dm = cplx(0.0, -0.4) * m;
    EXPECT_NEAR(postselected_qfi(m, dm, basis_ket(2, 0)).i_f, 0.0, 1e-14);
}

TEST(PostselectedQfi, AgreesWithFiniteDifferenceOfConditionalState) {
    // H = sigma_z (x) sigma_x, |i> = |+>, basis {|+>, |->}, |phi> = |0>.
    const JointModel m(sz_sx(), plus(), basis_ket(2, 0), plus_minus(), 0.3);
    const auto k = kraus_family(m);
    for (std::size_t f = 0; f < k.size(); ++f) {
        auto conditional = [&](double x) {
            const auto kk = kraus_family(m.at(x));
            const CVector v = kk[f].m * m.initial_b().amplitudes();
            return CVector(v / v.norm());
        };
        const double fd = oracle::qfi_finite_difference(conditional, 0.3, 1e-5);
        const double got = postselected_qfi(k[f].m, k[f].dm, m.initial_b()).i_f;
        EXPECT_NEAR(got, fd, 1e-4) << "outcome " << f;
        EXPECT_NEAR(got, conditional_state_qfi(k[f].m, k[f].dm, m.initial_b()), 1e-6);
    }
}

TEST(PostselectedQfi, NegligibleProbability) {
    try {
        postselected_qfi(CMatrix::Zero(2, 2), CMatrix::Identity(2, 2), basis_ket(2, 0));
        FAIL();
    } catch (const ModelError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NegligibleProbability);
    }
}

TEST(FiDecomposition, SingleOutcomeBranch) {
    // |i> = |0> is an eigenstate of sigma_z, so with H = sigma_z (x) P the
    // computational outcome is certain at every x.
    const JointModel m(sz_sx(), basis_ket(2, 0), basis_ket(2, 0), computational_basis(2), 0.4);
    const QfiReport r = fi_decomposition(m);
    EXPECT_NEAR(r.i_classical, 0.0, 1e-12);
    EXPECT_NEAR(r.i_rho, r.i_cond(0), 1e-12);
    EXPECT_EQ(r.excluded.size(), 1u);
    EXPECT_THROW(fi_decomposition(m, SmallBranchPolicy::Throw), ModelError);
}

TEST(FiDecomposition, NoSystemCouplingMeansNoClassicalInformation) {
    Rng rng(6);
    const CMatrix h = kron(CMatrix(CMatrix::Identity(3, 3)), random_hermitian(2, rng));
    const JointModel m(h, random_state(3, rng), random_state(2, rng),
                       OrthonormalBasis::from_columns(random_unitary(3, rng)), 0.9);
    const QfiReport r = fi_decomposition(m);
    EXPECT_NEAR(r.i_classical, 0.0, 1e-10);
}

TEST(FiDecomposition, ChainHoldsOnRandomModels) {
    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
        const JointModel m = random_joint_model(2 + t % 3, 1 + (t / 3) % 4, rng);
        const QfiReport r = fi_decomposition(m);
        EXPECT_NEAR(r.i_ab, qfi_unitary_closed_form(m), 1e-8);
        EXPECT_NEAR(r.p_f.sum(), 1.0, 1e-10);
        EXPECT_LE(r.i_rho, r.i_ab + 1e-9);
        for (Eigen::Index f = 0; f < r.p_f.size(); ++f) {
            EXPECT_GE(r.i_cond(f), -1e-9);
            EXPECT_LE(r.p_f(f) * r.i_cond(f), r.i_rho + 1e-9);
            EXPECT_NEAR(r.i_cond(f), r.i_cond_state(f), 1e-6);
        }
        EXPECT_TRUE(r.chain_holds);
    }
}

TEST(Chernoff, Examples) {
    EXPECT_EQ(chernoff_bound(10, 0.4, 0.0), 1.0);
    EXPECT_NEAR(chernoff_bound(50, 0.3, 1.0), std::exp(-5.0), 1e-15);
    EXPECT_NEAR(chernoff_bound(50, 0.3, 1.0), 0.006738, 1e-6);
    EXPECT_THROW(chernoff_bound(0, 0.3, 1.0), ModelError);
    EXPECT_THROW(chernoff_bound(5, 0.0, 1.0), ModelError);
    EXPECT_THROW(chernoff_bound(5, 0.3, -1.0), ModelError);
}

TEST(Chernoff, BoundsExactBinomialTail) {
    for (int n : {10, 50, 200})
        for (double p : {0.05, 0.3, 0.7})
            for (double delta : {0.1, 0.5, 1.0}) {
                const int k = static_cast<int>(std::ceil((1.0 + delta) * n * p - 1e-12));
                EXPECT_LE(oracle::binomial_upper_tail(n, p, k), chernoff_bound(n, p, delta) + 1e-15);
            }
}

TEST(Chernoff, MonotoneInEveryArgument) {
    for (int n = 1; n < 100; n += 7)
        for (double p = 0.05; p < 1.0; p += 0.1)
            for (double d = 0.0; d < 3.0; d += 0.25) {
                const double b = chernoff_bound(n, p, d);
                EXPECT_LE(chernoff_bound(n + 1, p, d), b);
                EXPECT_LE(chernoff_bound(n, std::min(1.0, p + 0.01), d), b);
                EXPECT_LE(chernoff_bound(n, p, d + 0.1), b);
            }
}
