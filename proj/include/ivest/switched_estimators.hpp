// Interval-valued estimators for switched linear systems
//
//   x(t+1) = A_{s(t)} x(t) + B_{s(t)} w(t),   y(t) = C_{s(t)} x(t) + v(t)
//
// under an arbitrary but known switching signal s. With per-mode gains L_i,
// the closed-loop transition matrix is Phi(t, t0) = F_{s(t-1)} ... F_{s(t0)}
// with F_i = A_i - L_i C_i, and the tight radius accumulates
// |Phi(t, j+1) G_{s(j)}| terms with the absolute value wrapping each whole
// product. The q-truncated variant slides a window of length q, exactly as
// in the LTI case.

#pragma once

#include "ivest/estimator_run.hpp"
#include "ivest/signals.hpp"

#include <vector>

namespace ivest {

struct SwitchedSystem {
    struct Mode {
        Eigen::MatrixXd A;
        Eigen::MatrixXd B;
        Eigen::MatrixXd C;
    };

    std::vector<Mode> modes;
    std::vector<Eigen::MatrixXd> gains;  // empty means L_i = 0 (open loop)

    SwitchedSystem(std::vector<Mode> mode_list, std::vector<Eigen::MatrixXd> gain_list = {});

    int num_modes() const { return static_cast<int>(modes.size()); }
    Eigen::Index state_dim() const { return modes.front().A.rows(); }
    Eigen::Index input_dim() const { return modes.front().B.cols(); }
    Eigen::Index output_dim() const { return modes.front().C.rows(); }
    bool has_gains() const { return !gains.empty(); }

    Eigen::MatrixXd closed_loop(int mode) const;   // F_i = A_i - L_i C_i
    Eigen::MatrixXd input_matrix(int mode) const;  // G_i = [B_i L_i -L_i] (B_i open loop)
};

// Mode sequence over a horizon; indices are 0-based.
class SwitchingSignal {
public:
    SwitchingSignal(std::vector<int> sequence, int num_modes);

    // Cyclic dwell-time expansion: pattern[0] for `dwell` steps, pattern[1]
    // for the next `dwell`, wrapping around until the horizon is covered.
    static SwitchingSignal dwell(const std::vector<int>& pattern, int dwell_time, int horizon,
                                 int num_modes);

    int at(int t) const;
    int horizon() const { return static_cast<int>(sequence_.size()); }
    const std::vector<int>& sequence() const { return sequence_; }

private:
    std::vector<int> sequence_;
};

// Phi(t, t0): identity at t = t0, else F_{s(t-1)} ... F_{s(t0)}.
Eigen::MatrixXd transition_matrix(const SwitchedSystem& sys, const SwitchingSignal& sigma, int t,
                                  int t0);

// Tightest switched estimator. Open loop when the system carries no gains
// and no measurements are supplied.
EstimatorRun tight_switched(const SwitchedSystem& sys, const SwitchingSignal& sigma,
                            const IntervalVector& x0, const BoundedSignal& w,
                            const std::vector<Eigen::VectorXd>& y, const BoundedSignal& v,
                            int horizon);

// Sliding-window over-approximation of order q.
EstimatorRun truncated_switched(const SwitchedSystem& sys, const SwitchingSignal& sigma,
                                const IntervalVector& x0, const BoundedSignal& w,
                                const std::vector<Eigen::VectorXd>& y, const BoundedSignal& v,
                                int q, int horizon);

// Smallest q <= q_max such that { |U| : U a length-q product of members of
// f_set } is certified u.e.s. at the given enumeration depth.
int find_truncation_order_switched(const std::vector<Eigen::MatrixXd>& f_set, int q_max,
                                   int depth);

}  // namespace ivest
