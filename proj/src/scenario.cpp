#include "ivest/scenario.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>

namespace ivest {

using nlohmann::json;

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& name) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw std::invalid_argument("scenario: " + name + " must be a nested array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw std::invalid_argument("scenario: " + name + " row " + std::to_string(r) +
                                        " has inconsistent length");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& name) {
    if (!j.is_array()) throw std::invalid_argument("scenario: " + name + " must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = j[static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

namespace {

IntervalVector interval_from_json(const json& j, const std::string& name) {
    if (j.contains("center") && j.contains("radius")) {
        return IntervalVector::from_center_radius(vector_from_json(j["center"], name + ".center"),
                                                  vector_from_json(j["radius"], name + ".radius"));
    }
    if (j.contains("lower") && j.contains("upper")) {
        return IntervalVector(vector_from_json(j["lower"], name + ".lower"),
                              vector_from_json(j["upper"], name + ".upper"));
    }
    throw std::invalid_argument("scenario: " + name +
                                " needs either center/radius or lower/upper");
}

json interval_to_json(const IntervalVector& box) {
    return json{{"center", vector_to_json(box.center())},
                {"radius", vector_to_json(box.radius())}};
}

SignalSpec signal_from_json(const json& j, const std::string& name) {
    SignalSpec spec;
    const std::string type = j.at("type").get<std::string>();
    if (type == "sinusoidal") {
        spec.type = SignalSpec::Type::sinusoidal;
        spec.center_frequency = j.at("center_frequency").get<double>();
        spec.radius_frequency = j.at("radius_frequency").get<double>();
        spec.radius_amplitude = j.at("radius_amplitude").get<double>();
        spec.center_amplitude = j.value("center_amplitude", 1.0);
    } else if (type == "constant") {
        spec.type = SignalSpec::Type::constant;
        spec.center = vector_from_json(j.at("center"), name + ".center");
        spec.radius = vector_from_json(j.at("radius"), name + ".radius");
        if ((spec.radius.array() < 0.0).any()) {
            throw std::invalid_argument("scenario: " + name + " radius must be nonnegative");
        }
    } else if (type == "table") {
        spec.type = SignalSpec::Type::table;
        for (const auto& entry : j.at("samples")) {
            spec.samples.push_back(interval_from_json(entry, name + ".samples[]"));
        }
    } else {
        throw std::invalid_argument("scenario: " + name + " has unknown type '" + type + "'");
    }
    return spec;
}

json signal_to_json(const SignalSpec& spec) {
    switch (spec.type) {
        case SignalSpec::Type::sinusoidal:
            return json{{"type", "sinusoidal"},
                        {"center_frequency", spec.center_frequency},
                        {"radius_frequency", spec.radius_frequency},
                        {"radius_amplitude", spec.radius_amplitude},
                        {"center_amplitude", spec.center_amplitude}};
        case SignalSpec::Type::constant:
            return json{{"type", "constant"},
                        {"center", vector_to_json(spec.center)},
                        {"radius", vector_to_json(spec.radius)}};
        case SignalSpec::Type::table: {
            json samples = json::array();
            for (const auto& s : spec.samples) samples.push_back(interval_to_json(s));
            return json{{"type", "table"}, {"samples", std::move(samples)}};
        }
    }
    throw std::logic_error("signal_to_json: unreachable");
}

EstimatorKind kind_from_string(const std::string& kind) {
    if (kind == "tight") return EstimatorKind::tight_open_loop;
    if (kind == "truncated") return EstimatorKind::truncated_open_loop;
    if (kind == "constant_radius") return EstimatorKind::constant_radius;
    if (kind == "closed_loop_tight") return EstimatorKind::closed_loop_tight;
    if (kind == "closed_loop_truncated") return EstimatorKind::closed_loop_truncated;
    if (kind == "gain_family_intersection") return EstimatorKind::gain_family_intersection;
    if (kind == "tight_sls") return EstimatorKind::tight_switched;
    if (kind == "truncated_sls") return EstimatorKind::truncated_switched;
    throw std::invalid_argument("scenario: unknown estimator kind '" + kind + "'");
}

EstimatorConfig estimator_from_json(const json& j) {
    EstimatorConfig config;
    config.kind = kind_from_string(j.at("kind").get<std::string>());
    config.q = j.value("q", 1);
    if (j.contains("input_radius_bound")) {
        config.input_radius_bound =
            vector_from_json(j["input_radius_bound"], "estimator.input_radius_bound");
    }
    if (j.contains("gains")) {
        if (j["gains"].is_string()) {
            if (j["gains"].get<std::string>() != "synthesize") {
                throw std::invalid_argument(
                    "scenario: estimator gains must be matrices or \"synthesize\"");
            }
            config.synthesize_gains = true;
        } else {
            for (const auto& g : j["gains"]) {
                config.gains.push_back(matrix_from_json(g, "estimator.gains[]"));
            }
        }
    }
    return config;
}

json estimator_to_json(const EstimatorConfig& config) {
    json j{{"kind", to_string(config.kind)}};
    if (config.kind == EstimatorKind::truncated_open_loop ||
        config.kind == EstimatorKind::closed_loop_truncated ||
        config.kind == EstimatorKind::truncated_switched) {
        j["q"] = config.q;
    }
    if (config.input_radius_bound.size() > 0) {
        j["input_radius_bound"] = vector_to_json(config.input_radius_bound);
    }
    if (config.synthesize_gains) {
        j["gains"] = "synthesize";
    } else if (!config.gains.empty()) {
        json gains = json::array();
        for (const auto& g : config.gains) gains.push_back(matrix_to_json(g));
        j["gains"] = std::move(gains);
    }
    return j;
}

}  // namespace

SwitchingSignal SwitchingSpec::expand(int horizon, int num_modes) const {
    if (is_explicit) {
        if (static_cast<int>(sequence.size()) < horizon) {
            throw std::invalid_argument("scenario: explicit switching sequence covers " +
                                        std::to_string(sequence.size()) +
                                        " steps but the horizon is " + std::to_string(horizon));
        }
        return SwitchingSignal(std::vector<int>(sequence.begin(), sequence.begin() + horizon),
                               num_modes);
    }
    return SwitchingSignal::dwell(pattern, dwell, horizon, num_modes);
}

Eigen::Index Scenario::state_dim() const {
    if (lti) return lti->state_dim();
    if (switched) return switched->state_dim();
    throw std::logic_error("Scenario: no system configured");
}

Scenario Scenario::from_json(const json& j) {
    Scenario scenario;
    scenario.version = j.at("version").get<int>();
    if (scenario.version != 1) {
        throw std::invalid_argument("scenario: unsupported version " +
                                    std::to_string(scenario.version));
    }
    scenario.seed = j.value("seed", static_cast<std::uint64_t>(0));
    scenario.horizon = j.at("horizon").get<int>();
    scenario.num_trajectories = j.value("num_trajectories", 0);

    const json& sys = j.at("system");
    const std::string type = sys.at("type").get<std::string>();
    if (type == "lti") {
        const Eigen::MatrixXd a = matrix_from_json(sys.at("A"), "system.A");
        const Eigen::MatrixXd b = matrix_from_json(sys.at("B"), "system.B");
        Eigen::MatrixXd c(0, a.rows());
        if (sys.contains("C")) c = matrix_from_json(sys["C"], "system.C");
        scenario.lti.emplace(a, b, c);
    } else if (type == "sls") {
        std::vector<SwitchedSystem::Mode> modes;
        for (const auto& m : sys.at("modes")) {
            modes.push_back({matrix_from_json(m.at("A"), "mode.A"),
                             matrix_from_json(m.at("B"), "mode.B"),
                             matrix_from_json(m.at("C"), "mode.C")});
        }
        scenario.switched.emplace(std::move(modes));
    } else {
        throw std::invalid_argument("scenario: unknown system type '" + type + "'");
    }

    scenario.x0 = interval_from_json(j.at("x0"), "x0");
    scenario.input_spec = signal_from_json(j.at("input"), "input");
    if (j.contains("noise")) scenario.noise_spec = signal_from_json(j["noise"], "noise");

    if (j.contains("switching")) {
        SwitchingSpec spec;
        const json& sw = j["switching"];
        const std::string sw_type = sw.at("type").get<std::string>();
        if (sw_type == "explicit") {
            spec.is_explicit = true;
            spec.sequence = sw.at("sequence").get<std::vector<int>>();
        } else if (sw_type == "dwell") {
            spec.pattern = sw.at("pattern").get<std::vector<int>>();
            spec.dwell = sw.at("dwell").get<int>();
        } else {
            throw std::invalid_argument("scenario: unknown switching type '" + sw_type + "'");
        }
        scenario.switching = std::move(spec);
    }
    if (scenario.is_switched() && !scenario.switching) {
        throw std::invalid_argument("scenario: switched system needs a switching block");
    }

    for (const auto& e : j.at("estimators")) {
        scenario.estimators.push_back(estimator_from_json(e));
    }
    if (scenario.estimators.empty()) {
        throw std::invalid_argument("scenario: at least one estimator is required");
    }
    return scenario;
}

json Scenario::to_json() const {
    json j;
    j["version"] = version;
    j["seed"] = seed;
    j["horizon"] = horizon;
    j["num_trajectories"] = num_trajectories;

    if (lti) {
        json sys{{"type", "lti"}, {"A", matrix_to_json(lti->A)}, {"B", matrix_to_json(lti->B)}};
        if (lti->output_dim() > 0) sys["C"] = matrix_to_json(lti->C);
        j["system"] = std::move(sys);
    } else if (switched) {
        json modes = json::array();
        for (const auto& m : switched->modes) {
            modes.push_back(json{{"A", matrix_to_json(m.A)},
                                 {"B", matrix_to_json(m.B)},
                                 {"C", matrix_to_json(m.C)}});
        }
        j["system"] = json{{"type", "sls"}, {"modes", std::move(modes)}};
    }

    j["x0"] = interval_to_json(x0);
    j["input"] = signal_to_json(input_spec);
    if (noise_spec) j["noise"] = signal_to_json(*noise_spec);
    if (switching) {
        if (switching->is_explicit) {
            j["switching"] = json{{"type", "explicit"}, {"sequence", switching->sequence}};
        } else {
            j["switching"] =
                json{{"type", "dwell"}, {"pattern", switching->pattern}, {"dwell", switching->dwell}};
        }
    }

    json estimators = json::array();
    for (const auto& e : this->estimators) estimators.push_back(estimator_to_json(e));
    j["estimators"] = std::move(estimators);
    return j;
}

Scenario Scenario::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("scenario: cannot open " + path);
    json j;
    in >> j;
    return from_json(j);
}

void Scenario::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("scenario: cannot write " + path);
    out << to_json().dump(2) << "\n";
}

}  // namespace ivest
