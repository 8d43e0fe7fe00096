// Interval-valued state estimators for discrete-time LTI systems
//
//   x(t+1) = A x(t) + B w(t),    y(t) = C x(t) + v(t)
//
// with x(0), w(t), v(t) confined to known boxes. Every estimator here emits a
// sequence of boxes guaranteed to contain all admissible trajectories.
//
// Open loop, the tightest such sequence has center/radius
//
//   c(t) = A^t c_x(0) + sum_k A^{t-1-k} B c_w(k)
//   p(t) = |A^t| p_x(0) + sum_k |A^{t-1-k} B| p_w(k)
//
// (absolute values wrap whole products; |A^k B| != |A|^k |B| in general).
// The radius has no one-step recursion in general, so the convolution is
// maintained incrementally at O(t) matrix products per step. Truncating the
// expansion to a sliding window of length q gives a looser radius with a
// finite-dimensional recursion; q = 1 is the classical one-step observer
// form. Feeding measurements back through a gain L turns the same machinery
// loose on x(t+1) = (A - LC) x(t) + [B L -L] (w; y; v), where the y block
// has radius zero.

#pragma once

#include "ivest/estimator_run.hpp"
#include "ivest/signals.hpp"

#include <vector>

namespace ivest {

struct LtiSystem {
    Eigen::MatrixXd A;  // n x n
    Eigen::MatrixXd B;  // n x n_w
    Eigen::MatrixXd C;  // n_y x n (n_y may be zero for pure simulation)

    LtiSystem(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c);

    Eigen::Index state_dim() const { return A.rows(); }
    Eigen::Index input_dim() const { return B.cols(); }
    Eigen::Index output_dim() const { return C.rows(); }
};

// Observer form: F = A - LC, G = [B L -L], driven by s = (w; y; v).
struct ObserverForm {
    Eigen::MatrixXd L;
    Eigen::MatrixXd F;
    Eigen::MatrixXd G;
};

ObserverForm make_observer_form(const LtiSystem& sys, const Eigen::MatrixXd& L);

// Stacks (w; y; v) into one interval signal; the measurement block is exact
// (radius zero) since y is known.
BoundedSignal stack_measurement_signal(const BoundedSignal& w,
                                       const std::vector<Eigen::VectorXd>& y,
                                       const BoundedSignal& v);

// Tightest open-loop estimator over [0, horizon].
EstimatorRun tight_open_loop(const LtiSystem& sys, const IntervalVector& x0,
                             const BoundedSignal& w, int horizon);

// Sliding-window over-approximation of order q; equals the tight radius for
// t <= q, then applies the |A^q| recursion.
EstimatorRun truncated_open_loop(const LtiSystem& sys, const IntervalVector& x0,
                                 const BoundedSignal& w, int q, int horizon);

// Smallest q <= q_max with rho(|A^q|) < 1. Requires rho(A) < 1.
int find_truncation_order(const Eigen::MatrixXd& A, int q_max);

// Constant-radius input over-approximation: replaces p_w by a constant bound
// r_o and runs the exact (M, r) realization of the resulting radius system.
EstimatorRun constant_radius_open_loop(const LtiSystem& sys, const IntervalVector& x0,
                                       const std::vector<Eigen::VectorXd>& input_centers,
                                       const Eigen::VectorXd& input_radius_bound, int horizon);

// Convenience overload: takes the true input signal, checks r_o dominates its
// radius at every step, and uses its centers.
EstimatorRun constant_radius_open_loop(const LtiSystem& sys, const IntervalVector& x0,
                                       const BoundedSignal& w,
                                       const Eigen::VectorXd& input_radius_bound, int horizon);

// Closed-loop estimators for a fixed gain L.
EstimatorRun closed_loop_tight(const LtiSystem& sys, const Eigen::MatrixXd& L,
                               const IntervalVector& x0, const BoundedSignal& w,
                               const std::vector<Eigen::VectorXd>& y, const BoundedSignal& v,
                               int horizon);

EstimatorRun closed_loop_truncated(const LtiSystem& sys, const Eigen::MatrixXd& L,
                                   const IntervalVector& x0, const BoundedSignal& w,
                                   const std::vector<Eigen::VectorXd>& y, const BoundedSignal& v,
                                   int q, int horizon);

// Componentwise intersection of closed-loop tight runs over a finite gain
// family; gains with rho(A - LC) >= 1 are rejected with a warning. This is a
// finite-family approximation of the optimum over all stabilizing gains.
EstimatorRun gain_family_intersection(const LtiSystem& sys,
                                      const std::vector<Eigen::MatrixXd>& gains,
                                      const IntervalVector& x0, const BoundedSignal& w,
                                      const std::vector<Eigen::VectorXd>& y,
                                      const BoundedSignal& v, int horizon);

}  // namespace ivest
