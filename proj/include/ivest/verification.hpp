// Monte Carlo verification rig: samples admissible trajectories, runs the
// configured estimators, and checks containment and width ordering. Every
// sampled trajectory is a pure function of (scenario seed, trajectory index),
// so any reported violation replays bit-identically.

#pragma once

#include "ivest/scenario.hpp"

#include <nlohmann/json_fwd.hpp>

#include <iosfwd>
#include <optional>

namespace ivest {

struct Trajectory {
    std::vector<Eigen::VectorXd> states;   // x(t), t = 0..horizon
    std::vector<Eigen::VectorXd> outputs;  // y(t), t = 0..horizon-1 (empty without measurements)
    int index = 0;
    std::uint64_t seed = 0;
};

// Samples x(0), w(t), v(t) uniformly inside their boxes and simulates the
// scenario dynamics. Deterministic per (scenario.seed, index).
Trajectory sample_trajectory(const Scenario& scenario, int index);

struct ScenarioRuns {
    std::vector<EstimatorRun> runs;
    std::vector<nlohmann::json> metadata;  // per-run sidecar payloads
    std::optional<SwitchingSignal> sigma;
    BoundedSignal input;
    BoundedSignal noise;      // empty horizon when the scenario has no noise block
    Trajectory reference;     // trajectory 0; its outputs feed closed-loop estimators
};

// Builds signals, synthesizes gains where requested, and runs every
// configured estimator.
ScenarioRuns run_scenario(const Scenario& scenario);

struct Violation {
    int estimator = 0;
    int trajectory = 0;
    int t = 0;
    int coordinate = 0;
    double margin = 0.0;  // how far outside the bound the point lies
    std::uint64_t seed = 0;
};

struct OrderingEntry {
    int narrower = 0;  // estimator indices
    int wider = 0;
    double fraction = 0.0;  // fraction of (t, coordinate) with width ordered
};

struct FaultInjection {
    int estimator = 0;
    int t = 0;
    int coordinate = 0;
    double epsilon = 0.0;  // added to the lower bound after the run
};

struct VerificationReport {
    bool containment_pass = true;
    std::vector<Violation> violations;
    std::vector<OrderingEntry> ordering;  // all ordered estimator pairs
    std::vector<double> max_widths;       // per estimator, max width over time and coordinates
    int trajectories_checked = 0;

    nlohmann::json to_json() const;
};

// Containment is checked against all sampled trajectories for open-loop
// estimators and against the measured trajectory (index 0) for closed-loop
// ones, whose bounds are conditioned on that trajectory's outputs.
VerificationReport run_verification(const Scenario& scenario,
                                    const std::optional<FaultInjection>& fault = std::nullopt);

// CSV schema: t,lower_1,...,lower_n,upper_1,...,upper_n[,sigma]
void write_run_csv(std::ostream& out, const EstimatorRun& run, const SwitchingSignal* sigma);

// Sidecar metadata for one run (kind, q, gains, warnings, certificates).
nlohmann::json run_metadata(const EstimatorRun& run);

}  // namespace ivest
