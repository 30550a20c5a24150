#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "wvabench/detection.hpp"
#include "wvabench/fisher.hpp"
#include "wvabench/harness.hpp"

namespace wvabench {

enum class OutputFormat { Csv, Jsonl };

OutputFormat output_format_from_string(std::string_view name);

inline constexpr std::string_view kCsvHeader =
    "sweep_param,sweep_value,estimator,emp_mean,emp_var,analytic_var,emp_mse,"
    "mean_d_null,mean_d_alt,reject_rate,mean_n_check,skipped_trials,seed";

/// Shortest decimal string that parses back to the same double. Non-finite
/// values render as the empty string.
std::string format_double(double v);

/// Per sweep point: one row per estimator (mle, smle, wva) and a final
/// "detect" row. Fields that do not apply to a row are left empty. LF line
/// endings, header always present.
std::string results_csv(const std::vector<RunResult> &results);
/// One JSON object per result and line. Wall time is left out so the output
/// is a pure function of (config, seed).
std::string results_jsonl(const std::vector<RunResult> &results);

/// Writes to `path`, or to stdout when path is "-". Throws IoError.
void emit_results(const std::vector<RunResult> &results, OutputFormat format, const std::string &path);

/// Per-trial records as CSV, one row per trial in index order.
std::string trial_dump_csv(const std::vector<TrialRecord> &records);

std::string qfi_jsonl(const std::vector<QfiReport> &reports);
std::string detection_json(const DetectionReport &report);

/// Writes `content` to `path` (stdout for "-"). Throws IoError.
void write_text(const std::string &path, std::string_view content);

}  // namespace wvabench
