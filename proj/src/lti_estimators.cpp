#include "ivest/lti_estimators.hpp"

#include "ivest/spectral.hpp"

#include <stdexcept>
#include <string>

namespace ivest {

namespace {

// Tight interval chain for x(t+1) = F x(t) + G u(t) with u interval-valued.
// Keeps the raw products F^{t-1-k} G and re-absolutizes after every left
// multiplication; |F M| is not |F| |M|.
std::vector<IntervalVector> tight_chain(const Eigen::MatrixXd& F, const Eigen::MatrixXd& G,
                                        const IntervalVector& x0, const BoundedSignal& u,
                                        int horizon) {
    const Eigen::VectorXd p0 = x0.radius();
    Eigen::VectorXd c = x0.center();

    std::vector<IntervalVector> out;
    out.reserve(static_cast<std::size_t>(horizon) + 1);
    out.push_back(x0);

    Eigen::MatrixXd f_power = Eigen::MatrixXd::Identity(F.rows(), F.cols());
    std::vector<Eigen::MatrixXd> terms;  // raw F^{t-1-k} G, k = 0..t-1
    terms.reserve(static_cast<std::size_t>(horizon));

    for (int t = 0; t < horizon; ++t) {
        c = F * c + G * u.at(t).center();
        for (auto& m : terms) m = F * m;
        terms.push_back(G);
        f_power = F * f_power;

        Eigen::VectorXd p = f_power.cwiseAbs() * p0;
        for (int k = 0; k <= t; ++k) {
            p += terms[static_cast<std::size_t>(k)].cwiseAbs() * u.at(k).radius();
        }
        out.push_back(IntervalVector::from_center_radius(c, p));
    }
    return out;
}

// Truncated chain: tight for t <= q, then the |F^q| window recursion.
std::vector<IntervalVector> truncated_chain(const Eigen::MatrixXd& F, const Eigen::MatrixXd& G,
                                            const IntervalVector& x0, const BoundedSignal& u,
                                            int q, int horizon) {
    std::vector<IntervalVector> out = tight_chain(F, G, x0, u, std::min(q, horizon));
    if (horizon <= q) return out;

    // window coefficients |F^j G|, j = 0..q-1, and |F^q|
    std::vector<Eigen::MatrixXd> window;
    window.reserve(static_cast<std::size_t>(q));
    Eigen::MatrixXd f_power = Eigen::MatrixXd::Identity(F.rows(), F.cols());
    for (int j = 0; j < q; ++j) {
        window.push_back((f_power * G).cwiseAbs());
        f_power = F * f_power;
    }
    const Eigen::MatrixXd fq_abs = f_power.cwiseAbs();

    Eigen::VectorXd c = out.back().center();
    for (int t = q; t < horizon; ++t) {
        c = F * c + G * u.at(t).center();
        Eigen::VectorXd p = fq_abs * out[static_cast<std::size_t>(t + 1 - q)].radius();
        for (int j = 0; j < q; ++j) {
            p += window[static_cast<std::size_t>(j)] * u.at(t - j).radius();
        }
        out.push_back(IntervalVector::from_center_radius(c, p));
    }
    return out;
}

void check_horizon(const BoundedSignal& u, int horizon, const char* name) {
    if (horizon < 0) throw std::invalid_argument("estimator horizon must be nonnegative");
    if (u.horizon() < horizon) {
        throw std::invalid_argument(std::string(name) + " signal has " +
                                    std::to_string(u.horizon()) + " samples but horizon is " +
                                    std::to_string(horizon));
    }
}

void check_state_dims(const LtiSystem& sys, const IntervalVector& x0, const BoundedSignal& w) {
    if (x0.size() != sys.state_dim()) {
        throw std::invalid_argument("x0 has dimension " + std::to_string(x0.size()) +
                                    " but the system state dimension is " +
                                    std::to_string(sys.state_dim()));
    }
    if (w.horizon() > 0 && w.dim() != sys.input_dim()) {
        throw std::invalid_argument("input signal has dimension " + std::to_string(w.dim()) +
                                    " but B has " + std::to_string(sys.input_dim()) + " columns");
    }
}

}  // namespace

LtiSystem::LtiSystem(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)) {
    if (A.rows() != A.cols()) throw std::invalid_argument("LtiSystem: A must be square");
    if (B.rows() != A.rows()) {
        throw std::invalid_argument("LtiSystem: B has " + std::to_string(B.rows()) +
                                    " rows but A is " + std::to_string(A.rows()) + "x" +
                                    std::to_string(A.cols()));
    }
    if (C.size() > 0 && C.cols() != A.rows()) {
        throw std::invalid_argument("LtiSystem: C has " + std::to_string(C.cols()) +
                                    " columns but A is " + std::to_string(A.rows()) + "x" +
                                    std::to_string(A.cols()));
    }
    if (!A.allFinite() || !B.allFinite() || !C.allFinite()) {
        throw std::invalid_argument("LtiSystem: matrices must be finite");
    }
}

ObserverForm make_observer_form(const LtiSystem& sys, const Eigen::MatrixXd& L) {
    if (L.rows() != sys.state_dim() || L.cols() != sys.output_dim()) {
        throw std::invalid_argument("observer gain L must be " + std::to_string(sys.state_dim()) +
                                    "x" + std::to_string(sys.output_dim()) + ", got " +
                                    std::to_string(L.rows()) + "x" + std::to_string(L.cols()));
    }
    ObserverForm form;
    form.L = L;
    form.F = sys.A - L * sys.C;
    form.G.resize(sys.state_dim(), sys.input_dim() + 2 * sys.output_dim());
    form.G << sys.B, L, -L;
    return form;
}

BoundedSignal stack_measurement_signal(const BoundedSignal& w,
                                       const std::vector<Eigen::VectorXd>& y,
                                       const BoundedSignal& v) {
    if (w.horizon() != static_cast<int>(y.size()) || w.horizon() != v.horizon()) {
        throw std::invalid_argument("stack_measurement_signal: w, y, v lengths differ (" +
                                    std::to_string(w.horizon()) + ", " +
                                    std::to_string(y.size()) + ", " +
                                    std::to_string(v.horizon()) + ")");
    }
    const Eigen::Index n_w = w.dim();
    const Eigen::Index n_y = v.dim();
    std::vector<IntervalVector> samples;
    samples.reserve(static_cast<std::size_t>(w.horizon()));
    for (int t = 0; t < w.horizon(); ++t) {
        const auto& yt = y[static_cast<std::size_t>(t)];
        if (yt.size() != n_y) {
            throw std::invalid_argument("stack_measurement_signal: y(" + std::to_string(t) +
                                        ") has dimension " + std::to_string(yt.size()) +
                                        " but v has dimension " + std::to_string(n_y));
        }
        Eigen::VectorXd c(n_w + 2 * n_y), p(n_w + 2 * n_y);
        c << w.at(t).center(), yt, v.at(t).center();
        p << w.at(t).radius(), Eigen::VectorXd::Zero(n_y), v.at(t).radius();
        samples.push_back(IntervalVector::from_center_radius(c, p));
    }
    return BoundedSignal(std::move(samples));
}

EstimatorRun tight_open_loop(const LtiSystem& sys, const IntervalVector& x0,
                             const BoundedSignal& w, int horizon) {
    check_state_dims(sys, x0, w);
    check_horizon(w, horizon, "input");
    EstimatorRun run;
    run.kind = EstimatorKind::tight_open_loop;
    if (spectral_radius(sys.A) >= 1.0) {
        run.warnings.push_back("rho(A) >= 1: bounds remain valid but are not BIBO stable");
    }
    run.intervals = tight_chain(sys.A, sys.B, x0, w, horizon);
    return run;
}

EstimatorRun truncated_open_loop(const LtiSystem& sys, const IntervalVector& x0,
                                 const BoundedSignal& w, int q, int horizon) {
    if (q < 1) throw std::invalid_argument("truncated_open_loop: q must be >= 1");
    check_state_dims(sys, x0, w);
    check_horizon(w, horizon, "input");
    EstimatorRun run;
    run.kind = EstimatorKind::truncated_open_loop;
    run.truncation_order = q;
    Eigen::MatrixXd a_q = Eigen::MatrixXd::Identity(sys.state_dim(), sys.state_dim());
    for (int j = 0; j < q; ++j) a_q = sys.A * a_q;
    if (spectral_radius(a_q.cwiseAbs()) >= 1.0) {
        run.warnings.push_back("rho(|A^q|) >= 1 for q=" + std::to_string(q) +
                               ": bounds remain valid but are not BIBO stable");
    }
    run.intervals = truncated_chain(sys.A, sys.B, x0, w, q, horizon);
    return run;
}

int find_truncation_order(const Eigen::MatrixXd& A, int q_max) {
    if (q_max < 1) throw std::invalid_argument("find_truncation_order: q_max must be >= 1");
    if (spectral_radius(A) >= 1.0) {
        throw std::invalid_argument(
            "find_truncation_order: rho(A) >= 1, no finite truncation order exists");
    }
    Eigen::MatrixXd power = A;
    for (int q = 1; q <= q_max; ++q) {
        if (spectral_radius(power.cwiseAbs()) < 1.0) return q;
        power = A * power;
    }
    throw std::runtime_error("find_truncation_order: no q <= " + std::to_string(q_max) +
                             " with rho(|A^q|) < 1");
}

EstimatorRun constant_radius_open_loop(const LtiSystem& sys, const IntervalVector& x0,
                                       const std::vector<Eigen::VectorXd>& input_centers,
                                       const Eigen::VectorXd& input_radius_bound, int horizon) {
    check_state_dims(sys, x0, BoundedSignal{});
    if ((input_radius_bound.array() < 0.0).any()) {
        throw std::invalid_argument("constant_radius_open_loop: radius bound must be nonnegative");
    }
    if (input_radius_bound.size() != sys.input_dim()) {
        throw std::invalid_argument("constant_radius_open_loop: radius bound has dimension " +
                                    std::to_string(input_radius_bound.size()) + " but B has " +
                                    std::to_string(sys.input_dim()) + " columns");
    }
    if (static_cast<int>(input_centers.size()) < horizon) {
        throw std::invalid_argument("constant_radius_open_loop: " +
                                    std::to_string(input_centers.size()) +
                                    " input centers for horizon " + std::to_string(horizon));
    }

    EstimatorRun run;
    run.kind = EstimatorKind::constant_radius;
    if (spectral_radius(sys.A) >= 1.0) {
        run.warnings.push_back("rho(A) >= 1: bounds remain valid but are not BIBO stable");
    }
    run.intervals.reserve(static_cast<std::size_t>(horizon) + 1);
    run.intervals.push_back(x0);

    const Eigen::VectorXd p0 = x0.radius();
    Eigen::VectorXd c = x0.center();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(sys.state_dim(), sys.state_dim());
    Eigen::VectorXd r = Eigen::VectorXd::Zero(sys.state_dim());
    for (int t = 0; t < horizon; ++t) {
        c = sys.A * c + sys.B * input_centers[static_cast<std::size_t>(t)];
        r += (m * sys.B).cwiseAbs() * input_radius_bound;
        m = sys.A * m;
        const Eigen::VectorXd p = m.cwiseAbs() * p0 + r;
        run.intervals.push_back(IntervalVector::from_center_radius(c, p));
    }
    return run;
}

EstimatorRun constant_radius_open_loop(const LtiSystem& sys, const IntervalVector& x0,
                                       const BoundedSignal& w,
                                       const Eigen::VectorXd& input_radius_bound, int horizon) {
    check_horizon(w, horizon, "input");
    std::vector<Eigen::VectorXd> centers;
    centers.reserve(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) {
        if (((w.at(t).radius() - input_radius_bound).array() > 0.0).any()) {
            throw std::invalid_argument(
                "constant_radius_open_loop: input radius at t=" + std::to_string(t) +
                " exceeds the constant bound");
        }
        centers.push_back(w.at(t).center());
    }
    return constant_radius_open_loop(sys, x0, centers, input_radius_bound, horizon);
}

namespace {

EstimatorRun closed_loop_impl(const LtiSystem& sys, const Eigen::MatrixXd& L,
                              const IntervalVector& x0, const BoundedSignal& w,
                              const std::vector<Eigen::VectorXd>& y, const BoundedSignal& v,
                              int q, int horizon, EstimatorKind kind) {
    check_state_dims(sys, x0, w);
    check_horizon(w, horizon, "input");
    check_horizon(v, horizon, "noise");
    if (static_cast<int>(y.size()) < horizon) {
        throw std::invalid_argument("closed-loop estimator: " + std::to_string(y.size()) +
                                    " measurements for horizon " + std::to_string(horizon));
    }

    const ObserverForm form = make_observer_form(sys, L);
    std::vector<Eigen::VectorXd> y_h(y.begin(), y.begin() + horizon);
    std::vector<IntervalVector> w_h(w.samples().begin(), w.samples().begin() + horizon);
    std::vector<IntervalVector> v_h(v.samples().begin(), v.samples().begin() + horizon);
    const BoundedSignal s =
        stack_measurement_signal(BoundedSignal(std::move(w_h)), y_h, BoundedSignal(std::move(v_h)));

    EstimatorRun run;
    run.kind = kind;
    run.gains = {L};
    if (kind == EstimatorKind::closed_loop_tight) {
        if (spectral_radius(form.F) >= 1.0) {
            run.warnings.push_back("rho(A - LC) >= 1: bounds remain valid but not BIBO stable");
        }
        run.intervals = tight_chain(form.F, form.G, x0, s, horizon);
    } else {
        run.truncation_order = q;
        Eigen::MatrixXd f_q = Eigen::MatrixXd::Identity(sys.state_dim(), sys.state_dim());
        for (int j = 0; j < q; ++j) f_q = form.F * f_q;
        if (spectral_radius(f_q.cwiseAbs()) >= 1.0) {
            run.warnings.push_back("rho(|(A - LC)^q|) >= 1 for q=" + std::to_string(q) +
                                   ": bounds remain valid but not BIBO stable");
        }
        run.intervals = truncated_chain(form.F, form.G, x0, s, q, horizon);
    }
    return run;
}

}  // namespace

EstimatorRun closed_loop_tight(const LtiSystem& sys, const Eigen::MatrixXd& L,
                               const IntervalVector& x0, const BoundedSignal& w,
                               const std::vector<Eigen::VectorXd>& y, const BoundedSignal& v,
                               int horizon) {
    return closed_loop_impl(sys, L, x0, w, y, v, 0, horizon, EstimatorKind::closed_loop_tight);
}

EstimatorRun closed_loop_truncated(const LtiSystem& sys, const Eigen::MatrixXd& L,
                                   const IntervalVector& x0, const BoundedSignal& w,
                                   const std::vector<Eigen::VectorXd>& y, const BoundedSignal& v,
                                   int q, int horizon) {
    if (q < 1) throw std::invalid_argument("closed_loop_truncated: q must be >= 1");
    return closed_loop_impl(sys, L, x0, w, y, v, q, horizon,
                            EstimatorKind::closed_loop_truncated);
}

EstimatorRun gain_family_intersection(const LtiSystem& sys,
                                      const std::vector<Eigen::MatrixXd>& gains,
                                      const IntervalVector& x0, const BoundedSignal& w,
                                      const std::vector<Eigen::VectorXd>& y,
                                      const BoundedSignal& v, int horizon) {
    if (gains.empty()) throw std::invalid_argument("gain_family_intersection: empty gain family");

    EstimatorRun out;
    out.kind = EstimatorKind::gain_family_intersection;
    out.note = "componentwise intersection over a finite gain family; the optimum over all "
               "stabilizing gains is approximated, not attained";

    bool first = true;
    std::vector<Eigen::VectorXd> lowers, uppers;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        if (spectral_radius(sys.A - gains[i] * sys.C) >= 1.0) {
            out.warnings.push_back("gain " + std::to_string(i) +
                                   " rejected: rho(A - LC) >= 1");
            continue;
        }
        const EstimatorRun member = closed_loop_tight(sys, gains[i], x0, w, y, v, horizon);
        out.gains.push_back(gains[i]);
        if (first) {
            lowers.reserve(member.intervals.size());
            uppers.reserve(member.intervals.size());
            for (const auto& box : member.intervals) {
                lowers.push_back(box.lower());
                uppers.push_back(box.upper());
            }
            first = false;
        } else {
            for (std::size_t t = 0; t < member.intervals.size(); ++t) {
                lowers[t] = lowers[t].cwiseMax(member.intervals[t].lower());
                uppers[t] = uppers[t].cwiseMin(member.intervals[t].upper());
            }
        }
    }
    if (first) {
        throw std::invalid_argument("gain_family_intersection: no gain satisfies rho(A-LC) < 1");
    }
    for (std::size_t t = 0; t < lowers.size(); ++t) {
        if ((uppers[t].array() < lowers[t].array()).any()) {
            throw std::runtime_error(
                "gain_family_intersection: empty intersection at t=" + std::to_string(t) +
                "; inputs are inconsistent with the model");
        }
        out.intervals.emplace_back(lowers[t], uppers[t]);
    }
    return out;
}

}  // namespace ivest
