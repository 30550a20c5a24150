#include "wvabench/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wvabench/errors.hpp"
#include "wvabench/fisher.hpp"

namespace wvabench {

using json = nlohmann::json;

std::string_view to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Estimate: return "estimate";
        case RunMode::Detect: return "detect";
        case RunMode::Fisher: return "fisher";
    }
    return "estimate";
}

NoiseCovariance ExperimentConfig::covariance() const {
    return build_covariance(noise.kind, noise.params, static_cast<Eigen::Index>(n_per_trial));
}

namespace {

const std::set<std::string> kKnownKeys = {
    "system.dimension", "system.observable", "system.initial_state", "system.theta", "system.basis",
    "meter.sigma",      "noise.kind",        "noise.params",         "run.x_true",   "run.n_per_trial",
    "run.trials",       "run.postselect_outcome", "run.seed",        "run.mode",     "detect.alpha",
    "detect.per_sample_dof", "sweep.param",       "sweep.values",         "fisher.hamiltonian",
    "fisher.meter_state", "fisher.dim_a",    "fisher.dim_b",         "fisher.x",     "fisher.random_instances",
};

[[noreturn]] void config_error(const std::string &key, const std::string &what) {
    raise(ErrorKind::ConfigError, key + ": " + what);
}

std::string strip_comment(const std::string &line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (c == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string &s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

json parse_value(const std::string &key, const std::string &raw) {
    if (raw.empty()) config_error(key, "missing value");
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) {
        const bool bare_word = raw.find_first_of("[]{},\"") == std::string::npos;
        if (!bare_word) config_error(key, "malformed value '" + raw + "'");
        return json(raw);
    }
    return value;
}

class Fields {
  public:
    explicit Fields(std::map<std::string, json> values) : values_(std::move(values)) {}

    bool has(const std::string &key) const { return values_.count(key) != 0; }
    const json &at(const std::string &key) const {
        auto it = values_.find(key);
        if (it == values_.end()) config_error(key, "required key is missing");
        return it->second;
    }

    double number(const std::string &key) const {
        const json &v = at(key);
        if (!v.is_number()) config_error(key, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) config_error(key, "expected a finite number");
        return d;
    }
    double number_or(const std::string &key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    std::uint64_t unsigned_integer(const std::string &key) const {
        const json &v = at(key);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) {
            const auto i = v.get<std::int64_t>();
            if (i < 0) config_error(key, "expected a nonnegative integer");
            return static_cast<std::uint64_t>(i);
        }
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) {
                try {
                    return std::stoull(s);
                } catch (const std::exception &) {
                }
            }
        }
        config_error(key, "expected a nonnegative integer");
    }

    std::string word(const std::string &key) const {
        const json &v = at(key);
        if (!v.is_string()) config_error(key, "expected a word");
        return v.get<std::string>();
    }

    bool flag(const std::string &key, bool fallback) const {
        if (!has(key)) return fallback;
        const json &v = at(key);
        if (v.is_boolean()) return v.get<bool>();
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (s == "true" || s == "yes" || s == "on") return true;
            if (s == "false" || s == "no" || s == "off") return false;
        }
        config_error(key, "expected true or false");
    }

    std::vector<double> real_list(const std::string &key) const {
        const json &v = at(key);
        if (!v.is_array()) config_error(key, "expected a list of numbers");
        std::vector<double> out;
        for (const auto &e : v) {
            if (!e.is_number()) config_error(key, "expected a list of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    /// Flat row-major list whose entries are real numbers or [re, im] pairs.
    std::vector<cplx> complex_list(const std::string &key) const {
        const json &v = at(key);
        if (!v.is_array()) config_error(key, "expected a list of numbers or [re, im] pairs");
        std::vector<cplx> out;
        for (const auto &e : v) {
            if (e.is_number()) {
                out.emplace_back(e.get<double>(), 0.0);
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                out.emplace_back(e[0].get<double>(), e[1].get<double>());
            } else {
                config_error(key, "expected a list of numbers or [re, im] pairs");
            }
        }
        return out;
    }

  private:
    std::map<std::string, json> values_;
};

/// Row-major entries into a d x d matrix.
CMatrix square_matrix(const std::string &key, const std::vector<cplx> &entries, Eigen::Index d) {
    if (static_cast<Eigen::Index>(entries.size()) != d * d) {
        config_error(key, "expected " + std::to_string(d * d) + " entries, got " + std::to_string(entries.size()));
    }
    CMatrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = entries[static_cast<std::size_t>(i * d + j)];
    }
    return m;
}

CVector vector_of(const std::string &key, const std::vector<cplx> &entries, Eigen::Index d) {
    if (static_cast<Eigen::Index>(entries.size()) != d) {
        config_error(key, "expected " + std::to_string(d) + " entries, got " + std::to_string(entries.size()));
    }
    CVector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = entries[static_cast<std::size_t>(i)];
    return v;
}

template <class F>
auto wrap_model_error(const std::string &key, F &&build) -> decltype(build()) {
    try {
        return build();
    } catch (const ModelError &e) {
        if (e.kind() == ErrorKind::ConfigError) throw;
        config_error(key, e.what());
    }
}

CouplingConfig parse_coupling(const Fields &fields, RunMode mode) {
    if (!fields.has("system.dimension") && mode == RunMode::Fisher) {
        // Random-instance fisher runs never touch the estimation model.
        return CouplingConfig(Observable(pauli_z()), basis_ket(2, 0), computational_basis(2), MeterSpec(1.0), 0.0);
    }
    const std::uint64_t dim_raw = fields.unsigned_integer("system.dimension");
    if (dim_raw < 2 || dim_raw > 64) config_error("system.dimension", "must lie in [2, 64]");
    const auto d = static_cast<Eigen::Index>(dim_raw);

    Observable observable = wrap_model_error("system.observable", [&] {
        return Observable(square_matrix("system.observable", fields.complex_list("system.observable"), d));
    });

    PureState initial = [&] {
        if (fields.has("system.theta")) {
            if (fields.has("system.initial_state")) {
                config_error("system.theta", "give either system.theta or system.initial_state, not both");
            }
            if (d != 2) config_error("system.theta", "only defined for a qubit");
            return qubit_state(fields.number("system.theta"));
        }
        return wrap_model_error("system.initial_state", [&] {
            return PureState(vector_of("system.initial_state", fields.complex_list("system.initial_state"), d));
        });
    }();

    OrthonormalBasis basis = wrap_model_error("system.basis", [&] {
        const json &raw = fields.at("system.basis");
        if (!raw.is_array() || static_cast<Eigen::Index>(raw.size()) != d) {
            config_error("system.basis", "expected " + std::to_string(d) + " basis vectors");
        }
        std::vector<PureState> vectors;
        for (std::size_t k = 0; k < raw.size(); ++k) {
            const std::string key = "system.basis[" + std::to_string(k) + "]";
            Fields one({{key, raw[k]}});
            vectors.emplace_back(vector_of(key, one.complex_list(key), d));
        }
        return OrthonormalBasis(std::move(vectors));
    });

    MeterSpec meter = wrap_model_error("meter.sigma", [&] { return MeterSpec(fields.number("meter.sigma")); });
    const double x_true = fields.number("run.x_true");
    return wrap_model_error("system", [&] {
        return CouplingConfig(std::move(observable), std::move(initial), std::move(basis), meter, x_true);
    });
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    std::map<std::string, json> values;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string content = trim(strip_comment(line));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            raise(ErrorKind::ConfigError, "line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(content.substr(0, eq));
        if (!kKnownKeys.count(key)) config_error(key, "unknown key");
        if (values.count(key)) config_error(key, "duplicate key");
        values.emplace(key, parse_value(key, trim(content.substr(eq + 1))));
    }
    const Fields fields(std::move(values));

    RunMode mode = RunMode::Estimate;
    if (fields.has("run.mode")) {
        const std::string m = fields.word("run.mode");
        if (m == "estimate") mode = RunMode::Estimate;
        else if (m == "detect") mode = RunMode::Detect;
        else if (m == "fisher") mode = RunMode::Fisher;
        else config_error("run.mode", "expected estimate, detect or fisher");
    }

    ExperimentConfig config{parse_coupling(fields, mode)};
    config.mode = mode;

    if (fields.has("noise.kind")) {
        config.noise.kind = wrap_model_error("noise.kind", [&] {
            return covariance_kind_from_string(fields.word("noise.kind"));
        });
        config.noise.params = fields.real_list("noise.params");
    }
    if (fields.has("run.n_per_trial")) config.n_per_trial = fields.unsigned_integer("run.n_per_trial");
    if (fields.has("run.trials")) config.trials = fields.unsigned_integer("run.trials");
    if (fields.has("run.postselect_outcome")) {
        config.postselect_outcome = static_cast<int>(fields.unsigned_integer("run.postselect_outcome"));
    }
    if (fields.has("run.seed")) config.seed = fields.unsigned_integer("run.seed");
    config.alpha = fields.number_or("detect.alpha", 0.05);
    config.per_sample_dof = fields.flag("detect.per_sample_dof", false);

    if (fields.has("sweep.param") || fields.has("sweep.values")) {
        SweepSpec sweep;
        sweep.param = fields.word("sweep.param");
        sweep.values = fields.real_list("sweep.values");
        config.sweep = std::move(sweep);
    }

    FisherSpec &fisher = config.fisher;
    if (fields.has("fisher.dim_a")) fisher.random_dim_a = static_cast<Eigen::Index>(fields.unsigned_integer("fisher.dim_a"));
    if (fields.has("fisher.dim_b")) {
        fisher.dim_b = static_cast<Eigen::Index>(fields.unsigned_integer("fisher.dim_b"));
        fisher.random_dim_b = fisher.dim_b;
    }
    fisher.x = fields.number_or("fisher.x", 0.0);
    if (fields.has("fisher.random_instances")) fisher.random_instances = fields.unsigned_integer("fisher.random_instances");
    if (fields.has("fisher.hamiltonian")) {
        const Eigen::Index d = config.coupling.observable().dim() * fisher.dim_b;
        fisher.hamiltonian = square_matrix("fisher.hamiltonian", fields.complex_list("fisher.hamiltonian"), d);
        fisher.meter_state = vector_of("fisher.meter_state", fields.complex_list("fisher.meter_state"), fisher.dim_b);
    }

    validate(config);
    return config;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::ConfigError, "cannot read config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void validate(const ExperimentConfig &config) {
    if (config.trials < 1) config_error("run.trials", "must be at least 1");
    if (config.n_per_trial < 1) config_error("run.n_per_trial", "must be at least 1");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) config_error("detect.alpha", "must lie in (0, 1)");
    if (config.mode == RunMode::Fisher) {
        const FisherSpec &f = config.fisher;
        if (f.random_dim_a < 2 || f.random_dim_b < 1 || f.random_dim_b > kMaxMeterDim ||
            f.dim_b < 1 || f.dim_b > kMaxMeterDim) {
            config_error("fisher.dim_b", "dimensions must satisfy d_A >= 2 and 1 <= d_B <= 8");
        }
        if (!f.hamiltonian && f.random_instances < 1) config_error("fisher.random_instances", "must be at least 1");
        return;
    }
    const auto outcomes = config.coupling.basis().size();
    if (config.postselect_outcome < 0 || static_cast<std::size_t>(config.postselect_outcome) >= outcomes) {
        config_error("run.postselect_outcome", "must lie in [0, " + std::to_string(outcomes) + ")");
    }
    const OutcomeTable table = wrap_model_error("system", [&] {
        return outcome_table(config.coupling.observable(), config.coupling.initial_state(), config.coupling.basis());
    });
    if (!table.possible[static_cast<std::size_t>(config.postselect_outcome)]) {
        config_error("run.postselect_outcome", "outcome has zero overlap with the initial state");
    }
    if (table.weak_values(config.postselect_outcome) == 0.0) {
        config_error("run.postselect_outcome", "post-selected weak value is zero");
    }
    wrap_model_error("noise.params", [&] { return config.covariance(); });
    if (config.sweep) {
        const SweepSpec &s = *config.sweep;
        if (s.values.empty()) config_error("sweep.values", "value list is empty");
        if (s.param != "sigma" && s.param != "x_true" && s.param != "n_per_trial" && s.param != "theta") {
            config_error("sweep.param", "expected sigma, x_true, n_per_trial or theta");
        }
    }
}

std::string canonical_config(const ExperimentConfig &config) {
    auto complex_json = [](const auto &m) {
        json out = json::array();
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            out.push_back({m.data()[i].real(), m.data()[i].imag()});
        }
        return out;
    };
    const CouplingConfig &c = config.coupling;
    json basis = json::array();
    for (const auto &v : c.basis().vectors()) basis.push_back(complex_json(v.amplitudes()));
    // Column-major storage order is irrelevant for hashing as long as it is fixed.
    json j = {
        {"observable", complex_json(c.observable().matrix())},
        {"initial_state", complex_json(c.initial_state().amplitudes())},
        {"basis", basis},
        {"sigma", c.meter().sigma()},
        {"x_true", c.x_true()},
        {"noise_kind", std::string(to_string(config.noise.kind))},
        {"noise_params", config.noise.params},
        {"n_per_trial", config.n_per_trial},
        {"trials", config.trials},
        {"postselect_outcome", config.postselect_outcome},
        {"seed", config.seed},
        {"mode", std::string(to_string(config.mode))},
        {"alpha", config.alpha},
        {"per_sample_dof", config.per_sample_dof},
    };
    if (config.sweep) {
        j["sweep_param"] = config.sweep->param;
        j["sweep_values"] = config.sweep->values;
    }
    return j.dump();
}

std::uint64_t config_hash(const ExperimentConfig &config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_config(config)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace wvabench
