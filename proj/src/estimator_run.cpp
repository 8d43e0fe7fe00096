#include "ivest/estimator_run.hpp"

namespace ivest {

std::string to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::tight_open_loop: return "tight";
        case EstimatorKind::truncated_open_loop: return "truncated";
        case EstimatorKind::constant_radius: return "constant_radius";
        case EstimatorKind::closed_loop_tight: return "closed_loop_tight";
        case EstimatorKind::closed_loop_truncated: return "closed_loop_truncated";
        case EstimatorKind::gain_family_intersection: return "gain_family_intersection";
        case EstimatorKind::tight_switched: return "tight_sls";
        case EstimatorKind::truncated_switched: return "truncated_sls";
    }
    return "unknown";
}

}  // namespace ivest
