#include "wvabench/emit.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "wvabench/errors.hpp"

namespace wvabench {

using json = nlohmann::json;

OutputFormat output_format_from_string(std::string_view name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "jsonl") return OutputFormat::Jsonl;
    raise(ErrorKind::ConfigError, "format: expected csv or jsonl, got '" + std::string(name) + "'");
}

std::string format_double(double v) {
    if (!std::isfinite(v)) return {};
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void append_row(std::string &out, std::initializer_list<std::string> fields) {
    bool first = true;
    for (const auto &f : fields) {
        if (!first) out += ',';
        out += f;
        first = false;
    }
    out += '\n';
}

}  // namespace

std::string results_csv(const std::vector<RunResult> &results) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const RunResult &r : results) {
        const std::string value = r.sweep_value ? format_double(*r.sweep_value) : std::string();
        const std::string n_check = format_double(r.mean_n_check);
        const std::string seed = std::to_string(r.seed);
        for (const EstimatorStats &e : r.estimators) {
            const std::size_t skipped = e.estimator == EstimatorKind::Wva ? r.skipped_trials : 0;
            append_row(out, {r.sweep_param, value, std::string(to_string(e.estimator)), format_double(e.emp_mean),
                             format_double(e.emp_var), format_double(e.mean_analytic_var),
                             format_double(e.emp_mse), "", "", "", n_check, std::to_string(skipped), seed});
        }
        const DetectionStats &d = r.detection;
        append_row(out, {r.sweep_param, value, "detect", "", "", "", "", format_double(d.mean_d_null),
                         format_double(d.mean_d_alt), format_double(d.reject_rate), n_check, "", seed});
    }
    return out;
}

std::string results_jsonl(const std::vector<RunResult> &results) {
    std::string out;
    for (const RunResult &r : results) {
        json estimators = json::array();
        for (const EstimatorStats &e : r.estimators) {
            estimators.push_back({{"estimator", std::string(to_string(e.estimator))},
                                  {"count", e.count},
                                  {"emp_mean", number_or_null(e.emp_mean)},
                                  {"emp_var", number_or_null(e.emp_var)},
                                  {"analytic_var", number_or_null(e.mean_analytic_var)},
                                  {"emp_mse", number_or_null(e.emp_mse)}});
        }
        const DetectionStats &d = r.detection;
        json j = {
            {"sweep_param", r.sweep_param},
            {"sweep_value", r.sweep_value ? json(*r.sweep_value) : json(nullptr)},
            {"estimators", estimators},
            {"detection",
             {{"mean_d_null", d.mean_d_null},
              {"mean_d_alt", d.mean_d_alt},
              {"reject_rate", d.reject_rate},
              {"reject_rate_null", d.reject_rate_null},
              {"alpha", d.alpha},
              {"dof", d.dof},
              {"threshold", d.threshold}}},
            {"trials", r.trials},
            {"mean_n_check", r.mean_n_check},
            {"skipped_trials", r.skipped_trials},
            {"skipped_fraction", r.skipped_fraction},
            {"seed", r.seed},
            {"config_hash", r.config_hash},
            {"weak_regime_warning", r.weak_regime_warning},
        };
        out += j.dump();
        out += '\n';
    }
    return out;
}

void write_text(const std::string &path, std::string_view content) {
    if (path == "-") {
        std::cout.write(content.data(), static_cast<std::streamsize>(content.size()));
        std::cout.flush();
        if (!std::cout) raise(ErrorKind::IoError, "failed writing to stdout");
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorKind::IoError, "cannot open " + path + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) raise(ErrorKind::IoError, "failed writing " + path);
}

void emit_results(const std::vector<RunResult> &results, OutputFormat format, const std::string &path) {
    write_text(path, format == OutputFormat::Csv ? results_csv(results) : results_jsonl(results));
}

std::string trial_dump_csv(const std::vector<TrialRecord> &records) {
    std::string out = "trial,n_check,mle,mle_var,smle,smle_var,wva,wva_var,d_null,d_alt,reject_null,reject_alt\n";
    for (std::size_t t = 0; t < records.size(); ++t) {
        const TrialRecord &r = records[t];
        append_row(out, {std::to_string(t), std::to_string(r.n_check), format_double(r.mle),
                         format_double(r.mle_variance), format_double(r.smle), format_double(r.smle_variance),
                         r.wva ? format_double(*r.wva) : "", r.wva ? format_double(r.wva_variance) : "",
                         format_double(r.d_null), format_double(r.d_alt), r.reject_null ? "1" : "0",
                         r.reject_alt ? "1" : "0"});
    }
    return out;
}

std::string qfi_jsonl(const std::vector<QfiReport> &reports) {
    std::string out;
    auto to_list = [](const RVector &v) {
        json a = json::array();
        for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
        return a;
    };
    for (std::size_t k = 0; k < reports.size(); ++k) {
        const QfiReport &q = reports[k];
        json j = {
            {"instance", k},
            {"i_ab", q.i_ab},
            {"p_f", to_list(q.p_f)},
            {"i_cond", to_list(q.i_cond)},
            {"i_cond_state", to_list(q.i_cond_state)},
            {"i_classical", q.i_classical},
            {"i_rho", q.i_rho},
            {"excluded", q.excluded},
            {"excluded_mass", q.excluded_mass},
            {"chain_holds", q.chain_holds},
        };
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string detection_json(const DetectionReport &report) {
    json j = {
        {"d", report.d_statistic},
        {"noncentrality", report.noncentrality},
        {"expected_d_n_offset", report.expected_d_n_offset},
        {"dof", report.dof},
        {"alpha", report.alpha},
        {"decision", std::string(to_string(report.decision))},
    };
    return j.dump() + "\n";
}

}  // namespace wvabench
