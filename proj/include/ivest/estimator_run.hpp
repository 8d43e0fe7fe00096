#pragma once

#include "ivest/interval.hpp"

#include <string>
#include <vector>

namespace ivest {

enum class EstimatorKind {
    tight_open_loop,
    truncated_open_loop,
    constant_radius,
    closed_loop_tight,
    closed_loop_truncated,
    gain_family_intersection,
    tight_switched,
    truncated_switched,
};

std::string to_string(EstimatorKind kind);

// Output of an estimator: one interval per time step, t = 0..horizon.
struct EstimatorRun {
    EstimatorKind kind = EstimatorKind::tight_open_loop;
    std::vector<IntervalVector> intervals;
    std::vector<Eigen::MatrixXd> gains;  // observer gains used, when any
    int truncation_order = 0;            // q, for truncated kinds
    std::vector<std::string> warnings;
    std::string note;

    int horizon() const { return static_cast<int>(intervals.size()) - 1; }

    const IntervalVector& at(int t) const {
        if (t < 0 || t > horizon()) {
            throw std::out_of_range("EstimatorRun: time " + std::to_string(t) +
                                    " outside horizon " + std::to_string(horizon()));
        }
        return intervals[static_cast<std::size_t>(t)];
    }
};

}  // namespace ivest
