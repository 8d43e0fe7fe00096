#include "ivest/signals.hpp"

#include <cmath>
#include <numbers>

namespace ivest {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

BoundedSignal generate_signal(const SignalSpec& spec, int horizon) {
    if (horizon < 0) throw std::invalid_argument("generate_signal: negative horizon");
    std::vector<IntervalVector> samples;
    samples.reserve(static_cast<std::size_t>(horizon));
    switch (spec.type) {
        case SignalSpec::Type::sinusoidal: {
            for (int t = 0; t < horizon; ++t) {
                const double c =
                    spec.center_amplitude *
                    std::sin(2.0 * std::numbers::pi * spec.center_frequency * t);
                const double p =
                    spec.radius_amplitude *
                    std::abs(std::cos(2.0 * std::numbers::pi * spec.radius_frequency * t));
                samples.push_back(IntervalVector::from_center_radius(
                    Eigen::VectorXd::Constant(1, c), Eigen::VectorXd::Constant(1, p)));
            }
            break;
        }
        case SignalSpec::Type::constant: {
            if (spec.center.size() == 0) {
                throw std::invalid_argument("generate_signal: constant spec has empty center");
            }
            const IntervalVector sample =
                IntervalVector::from_center_radius(spec.center, spec.radius);
            samples.assign(static_cast<std::size_t>(horizon), sample);
            break;
        }
        case SignalSpec::Type::table: {
            if (static_cast<int>(spec.samples.size()) < horizon) {
                throw std::invalid_argument("generate_signal: table has " +
                                            std::to_string(spec.samples.size()) +
                                            " samples but horizon is " + std::to_string(horizon));
            }
            samples.assign(spec.samples.begin(), spec.samples.begin() + horizon);
            break;
        }
    }
    return BoundedSignal(std::move(samples));
}

double counter_uniform(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t time,
                       std::uint64_t coordinate) {
    std::uint64_t h = splitmix(seed);
    h = splitmix(h ^ trajectory);
    h = splitmix(h ^ time);
    h = splitmix(h ^ coordinate);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

Eigen::VectorXd sample_in_box(const IntervalVector& box, std::uint64_t seed,
                              std::uint64_t trajectory, std::uint64_t time) {
    Eigen::VectorXd out(box.size());
    for (Eigen::Index i = 0; i < box.size(); ++i) {
        const double u = counter_uniform(seed, trajectory, time, static_cast<std::uint64_t>(i));
        out[i] = box.lower()[i] + u * (box.upper()[i] - box.lower()[i]);
    }
    return out;
}

}  // namespace ivest
