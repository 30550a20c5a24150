#include "wvabench/detection.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "wvabench/errors.hpp"

namespace wvabench {

std::string_view to_string(Decision decision) {
    return decision == Decision::Reject ? "reject" : "retain";
}

double lr_statistic(const Dataset &data, const RVector &ow, const GaussianMetric &metric) {
    const EstimateReport fit = mle(data, ow, metric);
    const RVector &r = data.readings;
    const RVector residual = r - fit.estimate * ow;
    const double d = metric.precision_form(r, r) - metric.precision_form(residual, residual);
    // The MLE maximizes the likelihood, so any negative value is rounding.
    return std::max(0.0, d);
}

double lr_statistic(const Dataset &data, const RVector &ow, const NoiseCovariance &cov, double sigma) {
    return lr_statistic(data, ow, GaussianMetric(cov, sigma));
}

DExpectation expected_d(double x, const RVector &ow, const GaussianMetric &metric) {
    if (ow.size() != metric.size()) {
        raise(ErrorKind::InvalidArgument, "weak values and covariance sizes disagree");
    }
    if (!(ow.squaredNorm() > 0.0)) {
        raise(ErrorKind::ZeroInformation, "weak-value vector is zero");
    }
    DExpectation out;
    out.noncentrality = x * x * metric.precision_form(ow, ow);
    out.n_offset_form = static_cast<double>(ow.size()) + out.noncentrality;
    return out;
}

DExpectation expected_d(double x, const RVector &ow, const NoiseCovariance &cov, double sigma) {
    return expected_d(x, ow, GaussianMetric(cov, sigma));
}

DExpectation expected_d_total(double x, std::size_t n, const PureState &initial, const Observable &observable,
                              double sigma) {
    if (!(sigma > 0.0)) {
        raise(ErrorKind::BadParams, "sigma must be positive");
    }
    const double per_trial = x * x * expected_O_squared(initial, observable) / (sigma * sigma);
    const double nn = static_cast<double>(n);
    return {nn * per_trial, nn * (1.0 + per_trial)};
}

CategoricalSplit categorical_lr_split(std::span<const double> counts, std::span<const double> p_null,
                                      std::span<const double> p_mle, std::span<const std::size_t> check_bins) {
    const std::size_t bins = counts.size();
    if (p_null.size() != bins || p_mle.size() != bins) {
        raise(ErrorKind::BadBins, "counts and probability vectors differ in length");
    }
    std::vector<bool> is_check(bins, false);
    for (std::size_t k : check_bins) {
        if (k >= bins) raise(ErrorKind::BadBins, "post-selected bin index out of range");
        is_check[k] = true;
    }

    CategoricalSplit out;
    for (std::size_t k = 0; k < bins; ++k) {
        const double n_k = counts[k];
        if (!(n_k >= 0.0)) raise(ErrorKind::BadBins, "bin counts must be nonnegative");
        if (n_k == 0.0) continue;
        if (!(p_null[k] > 0.0)) {
            raise(ErrorKind::BadBins, "occupied bin " + std::to_string(k) + " has zero null probability");
        }
        if (!(p_mle[k] > 0.0)) {
            raise(ErrorKind::BadBins, "occupied bin " + std::to_string(k) + " has zero MLE probability");
        }
        if (p_mle[k] < p_null[k]) out.mle_dominates = false;
        const double term = 2.0 * n_k * std::log(p_mle[k] / p_null[k]);
        (is_check[k] ? out.d_check : out.d_cross) += term;
    }
    out.d_total = out.d_check + out.d_cross;
    return out;
}

double chi2_upper_quantile(int dof, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        raise(ErrorKind::BadAlpha, "alpha must lie in (0, 1)");
    }
    if (dof < 1) {
        raise(ErrorKind::BadParams, "chi-square needs dof >= 1");
    }
    const double shape = 0.5 * dof;
    auto upper_tail = [&](double d) { return boost::math::gamma_q(shape, 0.5 * d); };

    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(dof));
    while (upper_tail(hi) > alpha) {
        lo = hi;
        hi *= 2.0;
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (upper_tail(mid) > alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Decision chi2_test(double d, int dof, double alpha) {
    return d > chi2_upper_quantile(dof, alpha) ? Decision::Reject : Decision::Retain;
}

DetectionReport detect(const Dataset &data, const RVector &ow, const GaussianMetric &metric, double alpha,
                       int dof) {
    DetectionReport report;
    report.alpha = alpha;
    report.dof = dof;
    report.d_statistic = lr_statistic(data, ow, metric);
    const double xhat = mle(data, ow, metric).estimate;
    const DExpectation e = expected_d(xhat, ow, metric);
    report.noncentrality = e.noncentrality;
    report.expected_d_n_offset = e.n_offset_form;
    report.decision = chi2_test(report.d_statistic, dof, alpha);
    return report;
}

}  // namespace wvabench
