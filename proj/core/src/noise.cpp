#include "wvabench/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "wvabench/errors.hpp"

namespace wvabench {

std::string_view to_string(CovarianceKind kind) {
    switch (kind) {
        case CovarianceKind::White: return "white";
        case CovarianceKind::Constant: return "constant";
        case CovarianceKind::Ar1: return "ar1";
        case CovarianceKind::Custom: return "custom";
    }
    return "custom";
}

CovarianceKind covariance_kind_from_string(std::string_view name) {
    if (name == "white") return CovarianceKind::White;
    if (name == "constant") return CovarianceKind::Constant;
    if (name == "ar1") return CovarianceKind::Ar1;
    if (name == "custom") return CovarianceKind::Custom;
    raise(ErrorKind::BadParams, "unknown noise kind '" + std::string(name) + "'");
}

NoiseCovariance::NoiseCovariance(RMatrix matrix, CovarianceKind kind)
    : matrix_(std::move(matrix)), kind_(kind) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
        raise(ErrorKind::BadParams, "covariance must be a non-empty square matrix");
    }
    if (!matrix_.allFinite()) {
        raise(ErrorKind::BadParams, "covariance has non-finite entries");
    }
    if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
        raise(ErrorKind::NotPSD, "covariance is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
    const double smallest = solver.eigenvalues().minCoeff();
    if (smallest < -kPsdTol) {
        raise(ErrorKind::NotPSD, "covariance has eigenvalue " + std::to_string(smallest));
    }
}

NoiseCovariance build_covariance(CovarianceKind kind, std::span<const double> params, Eigen::Index n) {
    if (n < 1) {
        raise(ErrorKind::BadParams, "covariance size must be at least 1");
    }
    auto expect_params = [&](std::size_t count) {
        if (params.size() != count) {
            raise(ErrorKind::BadParams, std::string(to_string(kind)) + " noise expects " +
                                            std::to_string(count) + " parameter(s), got " +
                                            std::to_string(params.size()));
        }
    };
    auto nonnegative = [](double v, const char *what) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            raise(ErrorKind::BadParams, std::string(what) + " must be finite and >= 0");
        }
    };

    switch (kind) {
        case CovarianceKind::White: {
            expect_params(1);
            nonnegative(params[0], "variance");
            return NoiseCovariance(params[0] * RMatrix::Identity(n, n), kind);
        }
        case CovarianceKind::Constant: {
            expect_params(1);
            nonnegative(params[0], "eta_bar^2");
            return NoiseCovariance(RMatrix::Constant(n, n, params[0]), kind);
        }
        case CovarianceKind::Ar1: {
            expect_params(2);
            nonnegative(params[0], "variance");
            const double rho = params[1];
            if (!(std::abs(rho) < 1.0)) {
                raise(ErrorKind::BadParams, "ar1 correlation must satisfy |rho| < 1");
            }
            RMatrix k(n, n);
            for (Eigen::Index j = 0; j < n; ++j) {
                for (Eigen::Index l = 0; l < n; ++l) {
                    k(j, l) = params[0] * std::pow(rho, static_cast<double>(std::abs(j - l)));
                }
            }
            return NoiseCovariance(std::move(k), kind);
        }
        case CovarianceKind::Custom: {
            expect_params(static_cast<std::size_t>(n * n));
            RMatrix k(n, n);
            for (Eigen::Index j = 0; j < n; ++j) {
                for (Eigen::Index l = 0; l < n; ++l) {
                    k(j, l) = params[static_cast<std::size_t>(j * n + l)];
                }
            }
            return NoiseCovariance(std::move(k), kind);
        }
    }
    raise(ErrorKind::BadParams, "unhandled covariance kind");
}

CorrelatedGaussianSampler::CorrelatedGaussianSampler(const NoiseCovariance &cov) {
    const RMatrix &k = cov.matrix();
    zero_ = (k.array() == 0.0).all();
    if (zero_) {
        factor_ = RMatrix::Zero(k.rows(), k.cols());
        return;
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> solver(k);
    const RVector roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factor_ = solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();
}

RVector CorrelatedGaussianSampler::operator()(Rng &rng) const {
    const Eigen::Index n = factor_.rows();
    if (zero_) return RVector::Zero(n);
    std::normal_distribution<double> gauss(0.0, 1.0);
    RVector z(n);
    for (Eigen::Index j = 0; j < n; ++j) z(j) = gauss(rng);
    return factor_ * z;
}

RVector sample_noise(const NoiseCovariance &cov, Rng &rng) {
    return CorrelatedGaussianSampler(cov)(rng);
}

NoiseCovariance sample_covariance_estimate(std::span<const RVector> samples) {
    if (samples.size() < 2) {
        raise(ErrorKind::TooFewSamples, "sample covariance needs at least 2 samples");
    }
    const Eigen::Index n = samples.front().size();
    for (const auto &s : samples) {
        if (s.size() != n) {
            raise(ErrorKind::BadParams, "calibration samples have mismatched lengths");
        }
    }
    // Accumulate in lexicographic order so the floating-point sum does not
    // depend on how the caller ordered the samples.
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(samples[a].begin(), samples[a].end(),
                                            samples[b].begin(), samples[b].end());
    });

    RMatrix sum = RMatrix::Zero(n, n);
    for (std::size_t idx : order) {
        sum.noalias() += samples[idx] * samples[idx].transpose();
    }
    RMatrix estimate = sum / static_cast<double>(samples.size() - 1);
    estimate = 0.5 * (estimate + estimate.transpose()).eval();
    return NoiseCovariance(std::move(estimate), CovarianceKind::Custom);
}

}  // namespace wvabench
