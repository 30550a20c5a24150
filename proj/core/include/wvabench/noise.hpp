#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "wvabench/linalg.hpp"
#include "wvabench/seeding.hpp"

namespace wvabench {

enum class CovarianceKind { White, Constant, Ar1, Custom };

std::string_view to_string(CovarianceKind kind);
CovarianceKind covariance_kind_from_string(std::string_view name);

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

/// Covariance K of the technical noise eta ~ N(0, K), N x N.
class NoiseCovariance {
  public:
    /// Validates symmetry (1e-12) and PSD (smallest eigenvalue >= -1e-10).
    NoiseCovariance(RMatrix matrix, CovarianceKind kind);

    const RMatrix &matrix() const noexcept { return matrix_; }
    CovarianceKind kind() const noexcept { return kind_; }
    Eigen::Index size() const noexcept { return matrix_.rows(); }

  private:
    RMatrix matrix_;
    CovarianceKind kind_;
};

/// white: (variance); constant: (eta_bar^2); ar1: (variance, rho);
/// custom: n*n row-major entries.
NoiseCovariance build_covariance(CovarianceKind kind, std::span<const double> params, Eigen::Index n);

/// Draws from N(0, K) through a symmetric square-root factor. The factor is
/// built once from an eigendecomposition with negative eigenvalues clipped
/// to zero, so rank-deficient K (the constant kind is rank one) samples
/// cleanly.
class CorrelatedGaussianSampler {
  public:
    explicit CorrelatedGaussianSampler(const NoiseCovariance &cov);

    RVector operator()(Rng &rng) const;
    Eigen::Index size() const noexcept { return factor_.rows(); }

  private:
    RMatrix factor_;
    bool zero_ = false;
};

RVector sample_noise(const NoiseCovariance &cov, Rng &rng);

/// sum_j eta_j eta_j^T / (M - 1) over M zero-mean calibration samples.
NoiseCovariance sample_covariance_estimate(std::span<const RVector> samples);

}  // namespace wvabench
