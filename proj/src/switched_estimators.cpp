#include "ivest/switched_estimators.hpp"

#include "ivest/lti_estimators.hpp"
#include "ivest/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ivest {

SwitchedSystem::SwitchedSystem(std::vector<Mode> mode_list, std::vector<Eigen::MatrixXd> gain_list)
    : modes(std::move(mode_list)), gains(std::move(gain_list)) {
    if (modes.empty()) throw std::invalid_argument("SwitchedSystem: needs at least one mode");
    const Eigen::Index n = modes.front().A.rows();
    const Eigen::Index nw = modes.front().B.cols();
    const Eigen::Index ny = modes.front().C.rows();
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto& m = modes[i];
        if (m.A.rows() != n || m.A.cols() != n || m.B.rows() != n || m.B.cols() != nw ||
            m.C.rows() != ny || (ny > 0 && m.C.cols() != n)) {
            throw std::invalid_argument("SwitchedSystem: mode " + std::to_string(i) +
                                        " has inconsistent dimensions");
        }
        if (!m.A.allFinite() || !m.B.allFinite() || !m.C.allFinite()) {
            throw std::invalid_argument("SwitchedSystem: mode " + std::to_string(i) +
                                        " has non-finite entries");
        }
    }
    if (!gains.empty()) {
        if (gains.size() != modes.size()) {
            throw std::invalid_argument("SwitchedSystem: " + std::to_string(gains.size()) +
                                        " gains for " + std::to_string(modes.size()) + " modes");
        }
        for (std::size_t i = 0; i < gains.size(); ++i) {
            if (gains[i].rows() != n || gains[i].cols() != ny) {
                throw std::invalid_argument("SwitchedSystem: gain " + std::to_string(i) +
                                            " must be " + std::to_string(n) + "x" +
                                            std::to_string(ny));
            }
        }
    }
}

Eigen::MatrixXd SwitchedSystem::closed_loop(int mode) const {
    const auto& m = modes[static_cast<std::size_t>(mode)];
    if (!has_gains()) return m.A;
    return m.A - gains[static_cast<std::size_t>(mode)] * m.C;
}

Eigen::MatrixXd SwitchedSystem::input_matrix(int mode) const {
    const auto& m = modes[static_cast<std::size_t>(mode)];
    if (!has_gains()) return m.B;
    const auto& l = gains[static_cast<std::size_t>(mode)];
    Eigen::MatrixXd g(state_dim(), input_dim() + 2 * output_dim());
    g << m.B, l, -l;
    return g;
}

SwitchingSignal::SwitchingSignal(std::vector<int> sequence, int num_modes)
    : sequence_(std::move(sequence)) {
    for (std::size_t t = 0; t < sequence_.size(); ++t) {
        if (sequence_[t] < 0 || sequence_[t] >= num_modes) {
            throw std::invalid_argument("SwitchingSignal: mode " + std::to_string(sequence_[t]) +
                                        " at t=" + std::to_string(t) + " outside [0, " +
                                        std::to_string(num_modes) + ")");
        }
    }
}

SwitchingSignal SwitchingSignal::dwell(const std::vector<int>& pattern, int dwell_time,
                                       int horizon, int num_modes) {
    if (pattern.empty()) throw std::invalid_argument("SwitchingSignal: empty dwell pattern");
    if (dwell_time < 1) throw std::invalid_argument("SwitchingSignal: dwell time must be >= 1");
    std::vector<int> seq;
    seq.reserve(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) {
        const auto slot = static_cast<std::size_t>((t / dwell_time) % pattern.size());
        seq.push_back(pattern[slot]);
    }
    return SwitchingSignal(std::move(seq), num_modes);
}

int SwitchingSignal::at(int t) const {
    if (t < 0 || t >= horizon()) {
        throw std::out_of_range("SwitchingSignal: time " + std::to_string(t) +
                                " outside horizon " + std::to_string(horizon()));
    }
    return sequence_[static_cast<std::size_t>(t)];
}

Eigen::MatrixXd transition_matrix(const SwitchedSystem& sys, const SwitchingSignal& sigma, int t,
                                  int t0) {
    if (t < t0) {
        throw std::invalid_argument("transition_matrix: t=" + std::to_string(t) + " < t0=" +
                                    std::to_string(t0));
    }
    Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(sys.state_dim(), sys.state_dim());
    for (int k = t0; k < t; ++k) phi = sys.closed_loop(sigma.at(k)) * phi;
    return phi;
}

namespace {

struct SwitchedInputs {
    BoundedSignal s;  // stacked (w; y; v) closed loop, or w open loop
    bool closed_loop = false;
};

SwitchedInputs prepare_inputs(const SwitchedSystem& sys, const IntervalVector& x0,
                              const BoundedSignal& w, const std::vector<Eigen::VectorXd>& y,
                              const BoundedSignal& v, int horizon) {
    if (x0.size() != sys.state_dim()) {
        throw std::invalid_argument("x0 has dimension " + std::to_string(x0.size()) +
                                    " but the system state dimension is " +
                                    std::to_string(sys.state_dim()));
    }
    if (w.horizon() < horizon) {
        throw std::invalid_argument("input signal has " + std::to_string(w.horizon()) +
                                    " samples but horizon is " + std::to_string(horizon));
    }
    if (!y.empty() && !sys.has_gains()) {
        throw std::invalid_argument("measurements supplied but the system carries no gains");
    }

    SwitchedInputs prepared;
    if (sys.has_gains()) {
        if (static_cast<int>(y.size()) < horizon || v.horizon() < horizon) {
            throw std::invalid_argument("closed-loop switched estimator needs y and v over the "
                                        "full horizon");
        }
        std::vector<Eigen::VectorXd> y_h(y.begin(), y.begin() + horizon);
        std::vector<IntervalVector> w_h(w.samples().begin(), w.samples().begin() + horizon);
        std::vector<IntervalVector> v_h(v.samples().begin(), v.samples().begin() + horizon);
        prepared.s = stack_measurement_signal(BoundedSignal(std::move(w_h)), y_h,
                                              BoundedSignal(std::move(v_h)));
        prepared.closed_loop = true;
    } else {
        prepared.s = w;
    }
    return prepared;
}

}  // namespace

EstimatorRun tight_switched(const SwitchedSystem& sys, const SwitchingSignal& sigma,
                            const IntervalVector& x0, const BoundedSignal& w,
                            const std::vector<Eigen::VectorXd>& y, const BoundedSignal& v,
                            int horizon) {
    if (sigma.horizon() < horizon) {
        throw std::invalid_argument("switching signal covers " + std::to_string(sigma.horizon()) +
                                    " steps but horizon is " + std::to_string(horizon));
    }
    const SwitchedInputs in = prepare_inputs(sys, x0, w, y, v, horizon);

    EstimatorRun run;
    run.kind = EstimatorKind::tight_switched;
    run.gains = sys.gains;

    const Eigen::VectorXd p0 = x0.radius();
    Eigen::VectorXd c = x0.center();
    run.intervals.reserve(static_cast<std::size_t>(horizon) + 1);
    run.intervals.push_back(x0);

    Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(sys.state_dim(), sys.state_dim());
    std::vector<Eigen::MatrixXd> terms;  // raw Phi(t, j+1) G_{s(j)}
    terms.reserve(static_cast<std::size_t>(horizon));

    for (int t = 0; t < horizon; ++t) {
        const int mode = sigma.at(t);
        const Eigen::MatrixXd f = sys.closed_loop(mode);
        const Eigen::MatrixXd g = sys.input_matrix(mode);

        c = f * c + g * in.s.at(t).center();
        for (auto& m : terms) m = f * m;
        terms.push_back(g);
        phi = f * phi;

        Eigen::VectorXd p = phi.cwiseAbs() * p0;
        for (int k = 0; k <= t; ++k) {
            p += terms[static_cast<std::size_t>(k)].cwiseAbs() * in.s.at(k).radius();
        }
        run.intervals.push_back(IntervalVector::from_center_radius(c, p));
    }
    return run;
}

EstimatorRun truncated_switched(const SwitchedSystem& sys, const SwitchingSignal& sigma,
                                const IntervalVector& x0, const BoundedSignal& w,
                                const std::vector<Eigen::VectorXd>& y, const BoundedSignal& v,
                                int q, int horizon) {
    if (q < 1) throw std::invalid_argument("truncated_switched: q must be >= 1");
    if (sigma.horizon() < horizon) {
        throw std::invalid_argument("switching signal covers " + std::to_string(sigma.horizon()) +
                                    " steps but horizon is " + std::to_string(horizon));
    }
    const SwitchedInputs in = prepare_inputs(sys, x0, w, y, v, horizon);

    EstimatorRun run = tight_switched(sys, sigma, x0, w, y, v, std::min(q, horizon));
    run.kind = EstimatorKind::truncated_switched;
    run.truncation_order = q;
    if (horizon <= q) return run;

    Eigen::VectorXd c = run.intervals.back().center();
    for (int t = q; t < horizon; ++t) {
        const int mode = sigma.at(t);
        c = sys.closed_loop(mode) * c + sys.input_matrix(mode) * in.s.at(t).center();

        // Window terms Phi(t+1, j+1) G_{s(j)} for j = t-q+1..t, accumulated
        // right to left so `left` ends as the full window product
        // Phi(t+1, t+1-q).
        Eigen::VectorXd p = Eigen::VectorXd::Zero(sys.state_dim());
        Eigen::MatrixXd left = Eigen::MatrixXd::Identity(sys.state_dim(), sys.state_dim());
        for (int j = t; j >= t + 1 - q; --j) {
            p += (left * sys.input_matrix(sigma.at(j))).cwiseAbs() * in.s.at(j).radius();
            left = left * sys.closed_loop(sigma.at(j));
        }
        p += left.cwiseAbs() * run.intervals[static_cast<std::size_t>(t + 1 - q)].radius();

        run.intervals.push_back(IntervalVector::from_center_radius(c, p));
    }
    return run;
}

int find_truncation_order_switched(const std::vector<Eigen::MatrixXd>& f_set, int q_max,
                                   int depth) {
    if (f_set.empty()) throw std::invalid_argument("find_truncation_order_switched: empty set");
    if (q_max < 1) throw std::invalid_argument("find_truncation_order_switched: q_max >= 1");

    // Products of length q, grown level by level.
    std::vector<Eigen::MatrixXd> products = {Eigen::MatrixXd::Identity(
        f_set.front().rows(), f_set.front().cols())};
    for (int q = 1; q <= q_max; ++q) {
        std::vector<Eigen::MatrixXd> next;
        next.reserve(products.size() * f_set.size());
        for (const auto& f : f_set) {
            for (const auto& p : products) next.push_back(f * p);
        }
        products = std::move(next);

        std::vector<Eigen::MatrixXd> abs_products;
        abs_products.reserve(products.size());
        for (const auto& p : products) abs_products.push_back(p.cwiseAbs());

        // Cap the enumeration depth so the product budget is respected even
        // when the length-q set is already large.
        const auto set_size = static_cast<double>(abs_products.size());
        int depth_q = 1;
        double total = set_size;
        while (depth_q < depth && total + std::pow(set_size, depth_q + 1) <= 1e6) {
            total += std::pow(set_size, depth_q + 1);
            ++depth_q;
        }
        const StabilityCertificate cert = ues_certificate(MatrixSet(abs_products), depth_q);
        if (cert.stable()) return q;
    }
    throw std::runtime_error("find_truncation_order_switched: no q <= " + std::to_string(q_max) +
                             " certified at depth " + std::to_string(depth));
}

}  // namespace ivest
