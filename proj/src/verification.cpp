#include "ivest/verification.hpp"

#include "ivest/gain_synthesis.hpp"

#include <nlohmann/json.hpp>

#include <ostream>
#include <stdexcept>

namespace ivest {

using nlohmann::json;

namespace {

// Disjoint counter streams for the initial state, the input and the noise.
constexpr std::uint64_t kStreamX0 = std::uint64_t{1} << 42;
constexpr std::uint64_t kStreamInput = std::uint64_t{2} << 42;
constexpr std::uint64_t kStreamNoise = std::uint64_t{3} << 42;

bool closed_loop_kind(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::closed_loop_tight:
        case EstimatorKind::closed_loop_truncated:
        case EstimatorKind::gain_family_intersection:
            return true;
        case EstimatorKind::tight_switched:
        case EstimatorKind::truncated_switched:
            return false;  // decided by the presence of gains, handled separately
        default:
            return false;
    }
}

json certificate_to_json(const SynthesisResult& result) {
    json j{{"status", to_string(result.status)},
           {"message", result.message},
           {"achieved_slack", result.certificate.achieved_slack},
           {"min_block_eigenvalue", result.certificate.min_block_eigenvalue},
           {"min_elementwise_slack", result.certificate.min_elementwise_slack},
           {"gain_spectral_radii", result.certificate.gain_spectral_radii},
           {"note", result.certificate.note}};
    if (result.certificate.set_stability) {
        const auto& cert = *result.certificate.set_stability;
        j["set_stability"] = json{{"verdict", to_string(cert.verdict)},
                                  {"jsr_lower", cert.bounds.lower},
                                  {"jsr_upper", cert.bounds.upper},
                                  {"depth", cert.bounds.depth},
                                  {"certifying_depth", cert.certifying_depth}};
    }
    json gains = json::array();
    for (const auto& g : result.gains) gains.push_back(matrix_to_json(g));
    j["gains"] = std::move(gains);
    return j;
}

}  // namespace

Trajectory sample_trajectory(const Scenario& scenario, int index) {
    const int horizon = scenario.horizon;
    const BoundedSignal input = generate_signal(scenario.input_spec, horizon);
    const bool has_noise = scenario.noise_spec.has_value();
    const BoundedSignal noise =
        has_noise ? generate_signal(*scenario.noise_spec, horizon) : BoundedSignal{};

    Trajectory traj;
    traj.index = index;
    traj.seed = scenario.seed;

    const auto idx = static_cast<std::uint64_t>(index);
    Eigen::VectorXd x = sample_in_box(scenario.x0, scenario.seed, idx, kStreamX0);
    traj.states.push_back(x);

    std::optional<SwitchingSignal> sigma;
    if (scenario.is_switched()) {
        sigma = scenario.switching->expand(horizon, scenario.switched->num_modes());
    }

    for (int t = 0; t < horizon; ++t) {
        const Eigen::VectorXd w = sample_in_box(input.at(t), scenario.seed, idx,
                                                kStreamInput + static_cast<std::uint64_t>(t));
        const Eigen::MatrixXd* a = nullptr;
        const Eigen::MatrixXd* b = nullptr;
        const Eigen::MatrixXd* c = nullptr;
        if (scenario.is_switched()) {
            const auto& mode =
                scenario.switched->modes[static_cast<std::size_t>(sigma->at(t))];
            a = &mode.A;
            b = &mode.B;
            c = &mode.C;
        } else {
            a = &scenario.lti->A;
            b = &scenario.lti->B;
            c = &scenario.lti->C;
        }
        if (has_noise && c->rows() > 0) {
            const Eigen::VectorXd v = sample_in_box(noise.at(t), scenario.seed, idx,
                                                    kStreamNoise + static_cast<std::uint64_t>(t));
            traj.outputs.push_back(*c * x + v);
        }
        x = *a * x + *b * w;
        traj.states.push_back(x);
    }
    return traj;
}

ScenarioRuns run_scenario(const Scenario& scenario) {
    ScenarioRuns out;
    out.input = generate_signal(scenario.input_spec, scenario.horizon);
    if (scenario.noise_spec) out.noise = generate_signal(*scenario.noise_spec, scenario.horizon);
    if (scenario.is_switched()) {
        out.sigma = scenario.switching->expand(scenario.horizon, scenario.switched->num_modes());
    }
    out.reference = sample_trajectory(scenario, 0);

    for (const auto& config : scenario.estimators) {
        json meta;
        std::vector<Eigen::MatrixXd> gains = config.gains;

        if (config.synthesize_gains) {
            SynthesisResult synthesis;
            if (scenario.is_switched()) {
                std::vector<SynthesisMode> modes;
                for (const auto& m : scenario.switched->modes) modes.push_back({m.A, m.C});
                synthesis = synthesize_sls_diagonal(modes);
            } else {
                synthesis = synthesize_lti(scenario.lti->A, scenario.lti->C);
            }
            meta["synthesis"] = certificate_to_json(synthesis);
            if (!synthesis.feasible()) {
                throw std::runtime_error("estimator '" + to_string(config.kind) +
                                         "': gain synthesis " + to_string(synthesis.status) +
                                         " - " + synthesis.message);
            }
            gains = synthesis.gains;
        }

        EstimatorRun run;
        if (scenario.is_switched()) {
            const SwitchedSystem sys(scenario.switched->modes, gains);
            const bool closed = !gains.empty();
            if (closed && (!scenario.noise_spec || scenario.switched->output_dim() == 0)) {
                throw std::runtime_error("closed-loop switched estimator needs a noise block and "
                                         "a measurement matrix");
            }
            const std::vector<Eigen::VectorXd> y =
                closed ? out.reference.outputs : std::vector<Eigen::VectorXd>{};
            switch (config.kind) {
                case EstimatorKind::tight_switched:
                    run = tight_switched(sys, *out.sigma, scenario.x0, out.input, y, out.noise,
                                         scenario.horizon);
                    break;
                case EstimatorKind::truncated_switched:
                    run = truncated_switched(sys, *out.sigma, scenario.x0, out.input, y, out.noise,
                                             config.q, scenario.horizon);
                    break;
                default:
                    throw std::runtime_error("estimator kind '" + to_string(config.kind) +
                                             "' does not apply to a switched system");
            }
        } else {
            const LtiSystem& sys = *scenario.lti;
            switch (config.kind) {
                case EstimatorKind::tight_open_loop:
                    run = tight_open_loop(sys, scenario.x0, out.input, scenario.horizon);
                    break;
                case EstimatorKind::truncated_open_loop:
                    run = truncated_open_loop(sys, scenario.x0, out.input, config.q,
                                              scenario.horizon);
                    break;
                case EstimatorKind::constant_radius:
                    run = constant_radius_open_loop(sys, scenario.x0, out.input,
                                                    config.input_radius_bound, scenario.horizon);
                    break;
                case EstimatorKind::closed_loop_tight:
                case EstimatorKind::closed_loop_truncated:
                case EstimatorKind::gain_family_intersection: {
                    if (!scenario.noise_spec || sys.output_dim() == 0) {
                        throw std::runtime_error("closed-loop estimator needs a noise block and a "
                                                 "measurement matrix");
                    }
                    if (gains.empty()) {
                        throw std::runtime_error("closed-loop estimator has no gains");
                    }
                    if (config.kind == EstimatorKind::closed_loop_tight) {
                        run = closed_loop_tight(sys, gains.front(), scenario.x0, out.input,
                                                out.reference.outputs, out.noise,
                                                scenario.horizon);
                    } else if (config.kind == EstimatorKind::closed_loop_truncated) {
                        run = closed_loop_truncated(sys, gains.front(), scenario.x0, out.input,
                                                    out.reference.outputs, out.noise, config.q,
                                                    scenario.horizon);
                    } else {
                        run = gain_family_intersection(sys, gains, scenario.x0, out.input,
                                                       out.reference.outputs, out.noise,
                                                       scenario.horizon);
                    }
                    break;
                }
                default:
                    throw std::runtime_error("estimator kind '" + to_string(config.kind) +
                                             "' does not apply to an LTI system");
            }
        }
        meta.update(run_metadata(run));
        out.runs.push_back(std::move(run));
        out.metadata.push_back(std::move(meta));
    }
    return out;
}

VerificationReport run_verification(const Scenario& scenario,
                                    const std::optional<FaultInjection>& fault) {
    ScenarioRuns runs = run_scenario(scenario);

    if (fault) {
        if (fault->estimator < 0 || fault->estimator >= static_cast<int>(runs.runs.size())) {
            throw std::invalid_argument("fault injection: estimator index out of range");
        }
        auto& run = runs.runs[static_cast<std::size_t>(fault->estimator)];
        const IntervalVector& box = run.at(fault->t);
        Eigen::VectorXd lower = box.lower();
        const int coord = fault->coordinate;
        lower[coord] = std::min(lower[coord] + fault->epsilon, box.upper()[coord]);
        run.intervals[static_cast<std::size_t>(fault->t)] = IntervalVector(lower, box.upper());
    }

    VerificationReport report;
    const int num_traj = std::max(scenario.num_trajectories, 1);
    report.trajectories_checked = num_traj;

    // Containment.
    for (int idx = 0; idx < num_traj; ++idx) {
        const Trajectory traj = (idx == 0) ? runs.reference : sample_trajectory(scenario, idx);
        for (std::size_t e = 0; e < runs.runs.size(); ++e) {
            const auto& run = runs.runs[e];
            const bool conditioned_on_reference =
                closed_loop_kind(run.kind) || !run.gains.empty();
            if (conditioned_on_reference && idx != 0) continue;
            for (int t = 0; t <= run.horizon(); ++t) {
                const auto& box = run.at(t);
                const auto& x = traj.states[static_cast<std::size_t>(t)];
                for (Eigen::Index i = 0; i < x.size(); ++i) {
                    double margin = 0.0;
                    if (x[i] < box.lower()[i]) margin = box.lower()[i] - x[i];
                    if (x[i] > box.upper()[i]) margin = x[i] - box.upper()[i];
                    if (margin > 0.0) {
                        report.violations.push_back({static_cast<int>(e), idx, t,
                                                     static_cast<int>(i), margin, scenario.seed});
                    }
                }
            }
        }
    }
    report.containment_pass = report.violations.empty();

    // Pairwise width ordering over all ordered pairs.
    const double tol = 1e-9;
    for (std::size_t a = 0; a < runs.runs.size(); ++a) {
        for (std::size_t b = 0; b < runs.runs.size(); ++b) {
            if (a == b) continue;
            std::size_t ordered = 0, total = 0;
            const int horizon = std::min(runs.runs[a].horizon(), runs.runs[b].horizon());
            for (int t = 0; t <= horizon; ++t) {
                const Eigen::VectorXd wa = runs.runs[a].at(t).width();
                const Eigen::VectorXd wb = runs.runs[b].at(t).width();
                for (Eigen::Index i = 0; i < wa.size(); ++i) {
                    ++total;
                    if (wa[i] <= wb[i] + tol) ++ordered;
                }
            }
            report.ordering.push_back({static_cast<int>(a), static_cast<int>(b),
                                       total ? static_cast<double>(ordered) /
                                                   static_cast<double>(total)
                                             : 0.0});
        }
    }

    for (const auto& run : runs.runs) {
        double max_width = 0.0;
        for (const auto& box : run.intervals) max_width = std::max(max_width, box.width().maxCoeff());
        report.max_widths.push_back(max_width);
    }
    return report;
}

json VerificationReport::to_json() const {
    json violations_json = json::array();
    for (const auto& v : violations) {
        violations_json.push_back(json{{"estimator", v.estimator},
                                       {"trajectory", v.trajectory},
                                       {"t", v.t},
                                       {"coordinate", v.coordinate},
                                       {"margin", v.margin},
                                       {"seed", v.seed}});
    }
    json ordering_json = json::array();
    for (const auto& o : ordering) {
        ordering_json.push_back(
            json{{"narrower", o.narrower}, {"wider", o.wider}, {"fraction", o.fraction}});
    }
    return json{{"containment_pass", containment_pass},
                {"violations", std::move(violations_json)},
                {"ordering", std::move(ordering_json)},
                {"max_widths", max_widths},
                {"trajectories_checked", trajectories_checked}};
}

void write_run_csv(std::ostream& out, const EstimatorRun& run, const SwitchingSignal* sigma) {
    const Eigen::Index n = run.intervals.empty() ? 0 : run.intervals.front().size();
    out << "t";
    for (Eigen::Index i = 1; i <= n; ++i) out << ",lower_" << i;
    for (Eigen::Index i = 1; i <= n; ++i) out << ",upper_" << i;
    if (sigma) out << ",sigma";
    out << "\n";
    out.precision(17);
    for (int t = 0; t <= run.horizon(); ++t) {
        out << t;
        const auto& box = run.at(t);
        for (Eigen::Index i = 0; i < n; ++i) out << "," << box.lower()[i];
        for (Eigen::Index i = 0; i < n; ++i) out << "," << box.upper()[i];
        if (sigma) {
            // the final row repeats the last active mode
            out << "," << sigma->at(std::min(t, sigma->horizon() - 1));
        }
        out << "\n";
    }
}

json run_metadata(const EstimatorRun& run) {
    json j{{"kind", to_string(run.kind)},
           {"horizon", run.horizon()},
           {"warnings", run.warnings}};
    if (run.truncation_order > 0) j["q"] = run.truncation_order;
    if (!run.note.empty()) j["note"] = run.note;
    if (!run.gains.empty()) {
        json gains = json::array();
        for (const auto& g : run.gains) gains.push_back(matrix_to_json(g));
        j["gains"] = std::move(gains);
    }
    return j;
}

}  // namespace ivest
