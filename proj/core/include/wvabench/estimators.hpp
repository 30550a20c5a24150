#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wvabench/linalg.hpp"
#include "wvabench/noise.hpp"
#include "wvabench/quantum.hpp"

namespace wvabench {

/// Ancilla outcomes f (0-based basis indices) paired with noisy meter
/// readings r = q + eta.
struct Dataset {
    std::vector<int> outcomes;
    RVector readings;

    std::size_t size() const noexcept { return outcomes.size(); }
};

/// Throws InvalidArgument unless lengths agree and every outcome index is
/// in [0, num_outcomes).
void validate(const Dataset &data, std::size_t num_outcomes);

enum class EstimatorKind { Mle, Smle, Wva };

std::string_view to_string(EstimatorKind kind);

struct EstimateReport {
    double estimate = 0.0;
    double analytic_variance = 0.0;
    EstimatorKind estimator = EstimatorKind::Mle;
    std::size_t n_used = 0;
    /// WVA only: the exact variance conditional on f,
    /// 1_chk^T (K + sigma^2 1) 1_chk / (N_chk O_w(chk))^2.
    std::optional<double> conditional_variance;

    /// Exact conditional variance for every estimator.
    double exact_variance() const { return conditional_variance.value_or(analytic_variance); }
};

/// The Gaussian likelihood's covariance Sigma = K + sigma^2 1 and its
/// inverse Q, held as a Cholesky factor. Build once per (K, sigma) and reuse
/// across trials.
class GaussianMetric {
  public:
    GaussianMetric(const NoiseCovariance &cov, double sigma);

    Eigen::Index size() const noexcept { return total_.rows(); }
    double sigma() const noexcept { return sigma_; }
    const RMatrix &noise() const noexcept { return noise_; }
    const RMatrix &total_covariance() const noexcept { return total_; }

    /// Q v.
    RVector precision_times(const RVector &v) const;
    /// a^T Q b.
    double precision_form(const RVector &a, const RVector &b) const;
    /// a^T (K + sigma^2 1) b.
    double covariance_form(const RVector &a, const RVector &b) const;
    /// Q as a dense matrix.
    RMatrix precision() const;

  private:
    RMatrix noise_;
    RMatrix total_;
    double sigma_;
    Eigen::LLT<RMatrix> llt_;
};

/// Weak value of each trial's outcome: the vector O_w(f).
RVector weak_value_sequence(const RVector &weak_values, std::span<const int> outcomes);

EstimateReport mle(const Dataset &data, const RVector &ow, const GaussianMetric &metric);
EstimateReport mle(const Dataset &data, const RVector &ow, const NoiseCovariance &cov, double sigma);

/// ow^T r / ||ow||^2. Needs no knowledge of K.
double smle_estimate(const Dataset &data, const RVector &ow);
/// ow^T (K + sigma^2 1) ow / ||ow||^4.
double smle_variance(const RVector &ow, const NoiseCovariance &cov, double sigma);
double smle_variance(const RVector &ow, const GaussianMetric &metric);

EstimateReport smle(const Dataset &data, const RVector &ow, const GaussianMetric &metric);
EstimateReport smle(const Dataset &data, const RVector &ow, const NoiseCovariance &cov, double sigma);

/// Post-selected estimator: keeps readings whose outcome equals
/// `check_outcome`. analytic_variance is the leading term
/// sigma^2 / (N_chk O_w(chk)^2); conditional_variance is exact.
EstimateReport wva(const Dataset &data, int check_outcome, double ow_check, const GaussianMetric &metric);
EstimateReport wva(const Dataset &data, int check_outcome, double ow_check, double sigma,
                   const NoiseCovariance &cov);

/// x / sqrt(variance).
double snr(double x, double variance);

/// Law-of-total-variance prediction for the (S)MLE averaged over outcome
/// strings of length n, with sigma^2 kept on both terms:
///   sigma^2 / (n <O^2>) + sigma^2 sum_k p_k (1 - p_k) O_w(f_k)^4 / (n^2 <O^2>^3).
double total_variance_prediction(std::size_t n, const PureState &initial, const Observable &observable,
                                 const OrthonormalBasis &basis, double sigma);

}  // namespace wvabench
