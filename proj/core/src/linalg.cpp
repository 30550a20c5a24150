#include "wvabench/linalg.hpp"

#include <cmath>

#include "wvabench/errors.hpp"

namespace wvabench {

double hermiticity_defect(const CMatrix &a) {
    if (a.rows() != a.cols()) {
        raise(ErrorKind::InvalidArgument, "matrix is not square");
    }
    if (a.size() == 0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

double one_norm(const CMatrix &a) {
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

CMatrix expm(const CMatrix &a, double tol) {
    if (a.rows() != a.cols()) {
        raise(ErrorKind::InvalidArgument, "expm needs a square matrix");
    }
    const Eigen::Index n = a.rows();
    if (n == 0) return a;

    int squarings = 0;
    const double norm = one_norm(a);
    if (norm > 0.25) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
    }
    const CMatrix scaled = a / std::ldexp(1.0, squarings);

    CMatrix result = CMatrix::Identity(n, n);
    CMatrix term = CMatrix::Identity(n, n);
    // ||scaled|| <= 1/4 so 30 terms bounds the remainder far below 1e-16.
    for (int k = 1; k <= 30; ++k) {
        term = term * scaled / static_cast<double>(k);
        result += term;
        if (one_norm(term) <= tol * one_norm(result)) break;
    }
    for (int s = 0; s < squarings; ++s) {
        result = result * result;
    }
    return result;
}

CMatrix unitary_evolution(const CMatrix &hamiltonian, double x) {
    return expm(cplx(0.0, -x) * hamiltonian);
}

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CVector kron(const CVector &a, const CVector &b) {
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

}  // namespace wvabench
