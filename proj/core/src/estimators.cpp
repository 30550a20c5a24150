#include "wvabench/estimators.hpp"

#include <cmath>
#include <string>

#include "wvabench/errors.hpp"

namespace wvabench {

void validate(const Dataset &data, std::size_t num_outcomes) {
    if (static_cast<Eigen::Index>(data.outcomes.size()) != data.readings.size()) {
        raise(ErrorKind::InvalidArgument, "dataset outcomes and readings differ in length");
    }
    for (std::size_t j = 0; j < data.outcomes.size(); ++j) {
        const int f = data.outcomes[j];
        if (f < 0 || static_cast<std::size_t>(f) >= num_outcomes) {
            raise(ErrorKind::InvalidArgument,
                  "outcome index " + std::to_string(f) + " out of range at trial " + std::to_string(j));
        }
    }
}

std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Mle: return "mle";
        case EstimatorKind::Smle: return "smle";
        case EstimatorKind::Wva: return "wva";
    }
    return "mle";
}

GaussianMetric::GaussianMetric(const NoiseCovariance &cov, double sigma)
    : noise_(cov.matrix()), sigma_(sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        raise(ErrorKind::BadParams, "sigma must be positive and finite");
    }
    total_ = noise_;
    total_.diagonal().array() += sigma * sigma;
    llt_.compute(total_);
    if (llt_.info() != Eigen::Success) {
        raise(ErrorKind::NotPSD, "K + sigma^2 1 is not positive definite");
    }
}

RVector GaussianMetric::precision_times(const RVector &v) const { return llt_.solve(v); }

double GaussianMetric::precision_form(const RVector &a, const RVector &b) const {
    return a.dot(llt_.solve(b));
}

double GaussianMetric::covariance_form(const RVector &a, const RVector &b) const {
    return a.dot(total_ * b);
}

RMatrix GaussianMetric::precision() const {
    return llt_.solve(RMatrix::Identity(size(), size()));
}

RVector weak_value_sequence(const RVector &weak_values, std::span<const int> outcomes) {
    RVector ow(static_cast<Eigen::Index>(outcomes.size()));
    for (std::size_t j = 0; j < outcomes.size(); ++j) {
        const int f = outcomes[j];
        if (f < 0 || f >= weak_values.size()) {
            raise(ErrorKind::InvalidArgument, "outcome index out of range");
        }
        ow(static_cast<Eigen::Index>(j)) = weak_values(f);
    }
    return ow;
}

namespace {

void check_lengths(const Dataset &data, const RVector &ow, Eigen::Index expected) {
    if (data.readings.size() != ow.size() || ow.size() != expected) {
        raise(ErrorKind::InvalidArgument, "readings, weak values and covariance sizes disagree");
    }
}

void require_information(const RVector &ow) {
    if (!(ow.squaredNorm() > 0.0)) {
        raise(ErrorKind::ZeroInformation, "weak-value vector is zero");
    }
}

}  // namespace

EstimateReport mle(const Dataset &data, const RVector &ow, const GaussianMetric &metric) {
    check_lengths(data, ow, metric.size());
    require_information(ow);
    const RVector q_ow = metric.precision_times(ow);
    const double information = ow.dot(q_ow);
    if (!(information > 0.0)) {
        raise(ErrorKind::ZeroInformation, "ow^T Q ow vanishes");
    }
    EstimateReport report;
    report.estimator = EstimatorKind::Mle;
    report.estimate = q_ow.dot(data.readings) / information;
    report.analytic_variance = 1.0 / information;
    report.n_used = data.size();
    return report;
}

EstimateReport mle(const Dataset &data, const RVector &ow, const NoiseCovariance &cov, double sigma) {
    return mle(data, ow, GaussianMetric(cov, sigma));
}

double smle_estimate(const Dataset &data, const RVector &ow) {
    if (data.readings.size() != ow.size()) {
        raise(ErrorKind::InvalidArgument, "readings and weak values differ in length");
    }
    require_information(ow);
    return ow.dot(data.readings) / ow.squaredNorm();
}

double smle_variance(const RVector &ow, const GaussianMetric &metric) {
    if (ow.size() != metric.size()) {
        raise(ErrorKind::InvalidArgument, "weak values and covariance sizes disagree");
    }
    require_information(ow);
    const double norm2 = ow.squaredNorm();
    return metric.covariance_form(ow, ow) / (norm2 * norm2);
}

double smle_variance(const RVector &ow, const NoiseCovariance &cov, double sigma) {
    return smle_variance(ow, GaussianMetric(cov, sigma));
}

EstimateReport smle(const Dataset &data, const RVector &ow, const GaussianMetric &metric) {
    check_lengths(data, ow, metric.size());
    EstimateReport report;
    report.estimator = EstimatorKind::Smle;
    report.estimate = smle_estimate(data, ow);
    report.analytic_variance = smle_variance(ow, metric);
    report.n_used = data.size();
    return report;
}

EstimateReport smle(const Dataset &data, const RVector &ow, const NoiseCovariance &cov, double sigma) {
    return smle(data, ow, GaussianMetric(cov, sigma));
}

EstimateReport wva(const Dataset &data, int check_outcome, double ow_check, const GaussianMetric &metric) {
    if (static_cast<Eigen::Index>(data.outcomes.size()) != data.readings.size() ||
        data.readings.size() != metric.size()) {
        raise(ErrorKind::InvalidArgument, "dataset and covariance sizes disagree");
    }
    if (!(ow_check != 0.0) || !std::isfinite(ow_check)) {
        raise(ErrorKind::ZeroInformation, "post-selected weak value must be finite and nonzero");
    }
    const Eigen::Index n = data.readings.size();
    RVector keep = RVector::Zero(n);
    std::size_t kept = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (data.outcomes[static_cast<std::size_t>(j)] == check_outcome) {
            keep(j) = 1.0;
            ++kept;
        }
    }
    if (kept == 0) {
        raise(ErrorKind::NoPostselectedEvents, "no trial produced the post-selected outcome");
    }
    const double n_chk = static_cast<double>(kept);
    const double sigma = metric.sigma();

    EstimateReport report;
    report.estimator = EstimatorKind::Wva;
    report.estimate = keep.dot(data.readings) / (n_chk * ow_check);
    report.analytic_variance = sigma * sigma / (n_chk * ow_check * ow_check);
    const double scale = n_chk * ow_check;
    report.conditional_variance = metric.covariance_form(keep, keep) / (scale * scale);
    report.n_used = kept;
    return report;
}

EstimateReport wva(const Dataset &data, int check_outcome, double ow_check, double sigma,
                   const NoiseCovariance &cov) {
    return wva(data, check_outcome, ow_check, GaussianMetric(cov, sigma));
}

double snr(double x, double variance) {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        raise(ErrorKind::BadVariance, "variance must be positive and finite");
    }
    return x / std::sqrt(variance);
}

double total_variance_prediction(std::size_t n, const PureState &initial, const Observable &observable,
                                 const OrthonormalBasis &basis, double sigma) {
    if (n == 0) {
        raise(ErrorKind::InvalidArgument, "n must be at least 1");
    }
    if (!(sigma > 0.0)) {
        raise(ErrorKind::BadParams, "sigma must be positive");
    }
    const OutcomeTable table = outcome_table(observable, initial, basis);
    const double o2 = expected_O_squared(initial, observable);
    if (!(o2 > 0.0)) {
        raise(ErrorKind::ZeroInformation, "<i|O^2|i> vanishes");
    }
    double spread = 0.0;  // sum_k p_k (1 - p_k) O_w^4
    for (std::size_t k = 0; k < table.size(); ++k) {
        if (!table.possible[k]) continue;
        const double p = table.probabilities(static_cast<Eigen::Index>(k));
        const double w2 = table.weak_values(static_cast<Eigen::Index>(k)) *
                          table.weak_values(static_cast<Eigen::Index>(k));
        spread += p * (1.0 - p) * w2 * w2;
    }
    const double nn = static_cast<double>(n);
    const double s2 = sigma * sigma;
    return s2 / (nn * o2) + s2 * spread / (nn * nn * o2 * o2 * o2);
}

}  // namespace wvabench
