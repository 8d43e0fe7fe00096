// Scenario files: a single JSON document describing the system, the bounded
// signals, the switching pattern, and the estimators to run.

#pragma once

#include "ivest/estimator_run.hpp"
#include "ivest/lti_estimators.hpp"
#include "ivest/signals.hpp"
#include "ivest/switched_estimators.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ivest {

struct SwitchingSpec {
    bool is_explicit = false;
    std::vector<int> sequence;  // explicit
    std::vector<int> pattern;   // dwell expansion
    int dwell = 1;

    SwitchingSignal expand(int horizon, int num_modes) const;
};

struct EstimatorConfig {
    EstimatorKind kind = EstimatorKind::tight_open_loop;
    int q = 1;
    Eigen::VectorXd input_radius_bound;   // constant_radius only
    std::vector<Eigen::MatrixXd> gains;   // closed-loop kinds; family for intersections
    bool synthesize_gains = false;        // gains: "synthesize"
};

struct Scenario {
    int version = 1;
    std::uint64_t seed = 0;
    int horizon = 0;
    int num_trajectories = 0;

    std::optional<LtiSystem> lti;
    std::optional<SwitchedSystem> switched;  // carried without gains; gains are per estimator
    IntervalVector x0;
    SignalSpec input_spec;
    std::optional<SignalSpec> noise_spec;
    std::optional<SwitchingSpec> switching;
    std::vector<EstimatorConfig> estimators;

    bool is_switched() const { return switched.has_value(); }
    Eigen::Index state_dim() const;

    static Scenario from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    static Scenario load(const std::string& path);
    void save(const std::string& path) const;
};

// JSON <-> Eigen helpers shared by the scenario and the CLI file formats.
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& name);
Eigen::VectorXd vector_from_json(const nlohmann::json& j, const std::string& name);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);

}  // namespace ivest
