#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "wvabench/estimators.hpp"

namespace wvabench {

enum class Decision { Reject, Retain };

std::string_view to_string(Decision decision);

struct DetectionReport {
    double d_statistic = 0.0;
    /// x^2 ow^T Q ow evaluated at the MLE.
    double noncentrality = 0.0;
    /// N + noncentrality, the expected statistic as the original analysis
    /// states it. Kept for comparison only.
    double expected_d_n_offset = 0.0;
    Decision decision = Decision::Retain;
    double alpha = 0.05;
    int dof = 1;
};

/// D = r^T Q r - (r - xhat ow)^T Q (r - xhat ow), with xhat the MLE.
double lr_statistic(const Dataset &data, const RVector &ow, const GaussianMetric &metric);
double lr_statistic(const Dataset &data, const RVector &ow, const NoiseCovariance &cov, double sigma);

struct DExpectation {
    double noncentrality = 0.0;  // x^2 ow^T Q ow
    double n_offset_form = 0.0;     // N + noncentrality
};

DExpectation expected_d(double x, const RVector &ow, const GaussianMetric &metric);
DExpectation expected_d(double x, const RVector &ow, const NoiseCovariance &cov, double sigma);

/// Outcome-averaged noncentrality n x^2 <i|O^2|i> / sigma^2, plus the
/// full form n (1 + x^2 <i|O^2|i> / sigma^2).
DExpectation expected_d_total(double x, std::size_t n, const PureState &initial, const Observable &observable,
                              double sigma);

struct CategoricalSplit {
    double d_total = 0.0;
    double d_check = 0.0;
    double d_cross = 0.0;
    /// True when p_mle >= p_null on every occupied bin, the condition under
    /// which every term is nonnegative and d_check <= d_total.
    bool mle_dominates = true;
};

/// 2 sum_k n_k log(p_mle_k / p_null_k), split into the post-selected bins
/// listed in `check_bins` and the rest. Bins with n_k = 0 contribute 0.
CategoricalSplit categorical_lr_split(std::span<const double> counts, std::span<const double> p_null,
                                      std::span<const double> p_mle, std::span<const std::size_t> check_bins);

/// Upper-alpha quantile of the chi-square distribution with `dof` degrees
/// of freedom. Bisection on the regularized upper incomplete gamma
/// function, absolute accuracy 1e-8 or better.
double chi2_upper_quantile(int dof, double alpha);

Decision chi2_test(double d, int dof, double alpha);

/// Statistic, noncentrality at the MLE and the chi-square decision for one
/// dataset.
DetectionReport detect(const Dataset &data, const RVector &ow, const GaussianMetric &metric, double alpha,
                       int dof = 1);

}  // namespace wvabench
