#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wvabench/noise.hpp"
#include "wvabench/quantum.hpp"

namespace wvabench {

enum class RunMode { Estimate, Detect, Fisher };

std::string_view to_string(RunMode mode);

struct NoiseSpec {
    CovarianceKind kind = CovarianceKind::White;
    std::vector<double> params{0.0};
};

struct SweepSpec {
    std::string param;  // sigma | x_true | n_per_trial | theta
    std::vector<double> values;
};

/// Finite-dimensional meter model for the fisher mode. Either an explicit
/// Hamiltonian on A (x) B or a count of random instances.
struct FisherSpec {
    std::optional<CMatrix> hamiltonian;
    std::optional<CVector> meter_state;
    Eigen::Index dim_b = 2;
    double x = 0.0;
    std::size_t random_instances = 200;
    Eigen::Index random_dim_a = 2;
    Eigen::Index random_dim_b = 2;
};

struct ExperimentConfig {
    explicit ExperimentConfig(CouplingConfig c) : coupling(std::move(c)) {}

    CouplingConfig coupling;
    NoiseSpec noise;
    std::size_t n_per_trial = 100;
    std::size_t trials = 20000;
    int postselect_outcome = 0;  // 0-based index into the basis
    std::uint64_t seed = 0;
    RunMode mode = RunMode::Estimate;
    double alpha = 0.05;
    /// Use N degrees of freedom for the chi-square decision instead of 1.
    bool per_sample_dof = false;
    std::optional<SweepSpec> sweep;
    FisherSpec fisher;

    NoiseCovariance covariance() const;
};

/// Parses the `key = value` config format. Values are JSON literals;
/// a bare word is read as a string. Lines starting with '#' are comments.
/// Complex matrices and vectors are row-major lists whose entries are
/// either real numbers or [re, im] pairs. Throws ConfigError naming the
/// offending key.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Canonical JSON rendering of the effective config.
std::string canonical_config(const ExperimentConfig &config);
/// FNV-1a of canonical_config().
std::uint64_t config_hash(const ExperimentConfig &config);

/// Enforces trials >= 1, n_per_trial >= 1, a possible post-selected
/// outcome and a buildable covariance. Throws ConfigError.
void validate(const ExperimentConfig &config);

}  // namespace wvabench
