// Time-indexed interval-valued signals and their generators.

#pragma once

#include "ivest/interval.hpp"

#include <cstdint>
#include <vector>

namespace ivest {

// A bounded exogenous signal: one interval per time step.
class BoundedSignal {
public:
    BoundedSignal() = default;

    explicit BoundedSignal(std::vector<IntervalVector> samples) : samples_(std::move(samples)) {
        for (std::size_t t = 1; t < samples_.size(); ++t) {
            if (samples_[t].size() != samples_[0].size()) {
                throw std::invalid_argument("BoundedSignal: sample " + std::to_string(t) +
                                            " has dimension " + std::to_string(samples_[t].size()) +
                                            " but sample 0 has " +
                                            std::to_string(samples_[0].size()));
            }
        }
    }

    int horizon() const { return static_cast<int>(samples_.size()); }
    Eigen::Index dim() const { return samples_.empty() ? 0 : samples_[0].size(); }

    const IntervalVector& at(int t) const {
        if (t < 0 || t >= horizon()) {
            throw std::out_of_range("BoundedSignal: time " + std::to_string(t) +
                                    " outside horizon " + std::to_string(horizon()));
        }
        return samples_[static_cast<std::size_t>(t)];
    }

    const std::vector<IntervalVector>& samples() const { return samples_; }

private:
    std::vector<IntervalVector> samples_;
};

// Declarative signal description, loadable from scenario files.
struct SignalSpec {
    enum class Type { sinusoidal, constant, table };
    Type type = Type::constant;

    // sinusoidal (scalar signal):
    //   center(t) = center_amplitude * sin(2 pi center_frequency t)
    //   radius(t) = radius_amplitude * |cos(2 pi radius_frequency t)|
    double center_frequency = 0.0;
    double radius_frequency = 0.0;
    double center_amplitude = 1.0;
    double radius_amplitude = 0.0;

    // constant:
    Eigen::VectorXd center;
    Eigen::VectorXd radius;

    // table: explicit per-step intervals
    std::vector<IntervalVector> samples;
};

BoundedSignal generate_signal(const SignalSpec& spec, int horizon);

// Counter-based uniform generator: a pure hash of (seed, trajectory, time,
// coordinate), so parallel sampling is deterministic and any single draw can
// be replayed in isolation.
double counter_uniform(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t time,
                       std::uint64_t coordinate);

// Uniform sample inside a box, one counter draw per coordinate.
Eigen::VectorXd sample_in_box(const IntervalVector& box, std::uint64_t seed,
                              std::uint64_t trajectory, std::uint64_t time);

}  // namespace ivest
