#pragma once

#include <complex>

#include <Eigen/Dense>

namespace wvabench {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Largest absolute entry of A - A^dagger.
double hermiticity_defect(const CMatrix &a);

/// Matrix exponential by scaling and squaring with a truncated Taylor
/// series. The argument is scaled until its 1-norm is at most 1/4, the
/// series is summed until the next term drops below `tol` relative to the
/// partial sum, and the result is squared back up.
CMatrix expm(const CMatrix &a, double tol = 1e-16);

/// exp(-i x H) for Hermitian H.
CMatrix unitary_evolution(const CMatrix &hamiltonian, double x);

CMatrix kron(const CMatrix &a, const CMatrix &b);
CVector kron(const CVector &a, const CVector &b);

}  // namespace wvabench
