#include "ivest/gain_synthesis.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ivest {

namespace {

SynthesisStatus from_lmi(LmiStatus status) {
    switch (status) {
        case LmiStatus::feasible: return SynthesisStatus::feasible;
        case LmiStatus::infeasible: return SynthesisStatus::infeasible;
        case LmiStatus::unknown: return SynthesisStatus::unknown;
    }
    return SynthesisStatus::unknown;
}

// Adds the elementwise pair -X <= M <= X (exact encoding of |M| <= X).
void add_absolute_bound(LmiProblem& problem, const AffineMatrix& m, const AffineMatrix& x) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            problem.inequalities.push_back(x.at(i, j) - m.at(i, j));
            problem.inequalities.push_back(x.at(i, j) + m.at(i, j));
        }
    }
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    return m.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff();
}

void check_modes(const std::vector<SynthesisMode>& modes) {
    if (modes.empty()) throw std::invalid_argument("synthesis: no modes given");
    const Eigen::Index n = modes.front().A.rows();
    const Eigen::Index ny = modes.front().C.rows();
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto& m = modes[i];
        if (m.A.rows() != n || m.A.cols() != n || m.C.cols() != n || m.C.rows() != ny) {
            throw std::invalid_argument("synthesis: mode " + std::to_string(i) +
                                        " has inconsistent dimensions");
        }
        if (!m.A.allFinite() || !m.C.allFinite()) {
            throw std::invalid_argument("synthesis: mode " + std::to_string(i) +
                                        " has non-finite entries");
        }
    }
}

}  // namespace

SynthesisResult synthesize_lti(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                               const SynthesisOptions& options) {
    return synthesize_sls_diagonal({SynthesisMode{A, C}}, options);
}

SynthesisResult synthesize_sls_diagonal(const std::vector<SynthesisMode>& modes,
                                        const SynthesisOptions& options) {
    check_modes(modes);
    const int s = static_cast<int>(modes.size());
    const Eigen::Index n = modes.front().A.rows();
    const Eigen::Index ny = modes.front().C.rows();

    LmiProblem problem;
    problem.margin = options.margin;
    problem.variable_bound = options.variable_bound;

    // Variables: diagonal Lambda_i (init 1), Y_ji (init 0), X_ji (init |A_i|+0.1).
    std::vector<std::vector<int>> lambda(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) lambda[static_cast<std::size_t>(i)] = problem.add_variables(n, 1.0);

    std::vector<AffineMatrix> lam_mat(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) {
        lam_mat[static_cast<std::size_t>(i)] =
            AffineMatrix::diagonal_variables(lambda[static_cast<std::size_t>(i)]);
    }

    std::vector<std::vector<AffineMatrix>> y(static_cast<std::size_t>(s),
                                             std::vector<AffineMatrix>(static_cast<std::size_t>(s)));
    std::vector<std::vector<AffineMatrix>> x(static_cast<std::size_t>(s),
                                             std::vector<AffineMatrix>(static_cast<std::size_t>(s)));
    for (int j = 0; j < s; ++j) {
        for (int i = 0; i < s; ++i) {
            const int y_start = problem.num_variables;
            problem.add_variables(static_cast<int>(n * ny), 0.0);
            y[j][i] = AffineMatrix::dense_variables(n, ny, y_start);

            const int x_start = problem.num_variables;
            const Eigen::MatrixXd x_init = modes[static_cast<std::size_t>(i)].A.cwiseAbs().array() + 0.1;
            for (Eigen::Index r = 0; r < n; ++r)
                for (Eigen::Index c = 0; c < n; ++c) problem.add_variable(x_init(r, c));
            x[j][i] = AffineMatrix::dense_variables(n, n, x_start);
        }
    }

    for (int j = 0; j < s; ++j) {
        for (int i = 0; i < s; ++i) {
            problem.blocks.push_back(AffineMatrix::block2x2(lam_mat[static_cast<std::size_t>(j)],
                                                            x[j][i], x[j][i].transpose(),
                                                            lam_mat[static_cast<std::size_t>(i)]));
            const AffineMatrix residual = lam_mat[static_cast<std::size_t>(j)] *
                                              modes[static_cast<std::size_t>(i)].A -
                                          y[j][i] * modes[static_cast<std::size_t>(i)].C;
            add_absolute_bound(problem, residual, x[j][i]);
        }
    }

    const LmiSolution lmi = solve_lmi_feasibility(problem);

    SynthesisResult result;
    result.status = from_lmi(lmi.status);
    result.certificate.achieved_slack = lmi.achieved_slack;
    if (lmi.status != LmiStatus::feasible) {
        result.message = (s == 1)
                             ? "LTI gain LMI " + to_string(lmi.status) + ": " + lmi.diagnostics +
                                   " (infeasible means no gain with rho(|A-LC|) < 1 exists)"
                             : "switched diagonal LMI " + to_string(lmi.status) + ": " +
                                   lmi.diagnostics +
                                   " (the condition is sufficient only; infeasibility does not "
                                   "prove that no stabilizing gains exist)";
        return result;
    }

    // Recover gains and re-verify with independent spectral computations.
    double min_eig = std::numeric_limits<double>::infinity();
    for (const auto& block : problem.blocks) {
        min_eig = std::min(min_eig, min_eigenvalue(block.evaluate(lmi.values)));
    }
    double min_slack = std::numeric_limits<double>::infinity();
    for (const auto& ineq : problem.inequalities) {
        min_slack = std::min(min_slack, ineq.evaluate(lmi.values));
    }
    result.certificate.min_block_eigenvalue = min_eig;
    result.certificate.min_elementwise_slack = min_slack;

    std::vector<Eigen::MatrixXd> closed_loop_abs;
    bool gains_verified = true;
    for (int i = 0; i < s; ++i) {
        Eigen::VectorXd lam(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            lam[k] = lmi.values[lambda[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]];
        }
        const Eigen::MatrixXd y_ii = y[i][i].evaluate(lmi.values);
        const Eigen::MatrixXd gain = lam.cwiseInverse().asDiagonal() * y_ii;
        result.gains.push_back(gain);
        result.scalings.push_back(Eigen::MatrixXd(lam.asDiagonal()));

        const Eigen::MatrixXd f_abs =
            (modes[static_cast<std::size_t>(i)].A - gain * modes[static_cast<std::size_t>(i)].C)
                .cwiseAbs();
        const double rho = spectral_radius(f_abs);
        result.certificate.gain_spectral_radii.push_back(rho);
        if (s == 1 && rho >= 1.0) gains_verified = false;
        closed_loop_abs.push_back(f_abs);
    }

    if (s > 1) {
        const StabilityCertificate cert =
            ues_certificate(MatrixSet(closed_loop_abs), options.certify_depth, options.norm);
        result.certificate.set_stability = cert;
        gains_verified = cert.stable();
        result.certificate.note =
            "a-posteriori JSR certification of { |A_i - L_i C_i| } at depth <= " +
            std::to_string(options.certify_depth);
    } else {
        result.certificate.note = "a-posteriori spectral radius check of |A - LC|";
    }

    if (!gains_verified) {
        result.status = SynthesisStatus::unknown;
        result.message = "LMI reported feasible but the independent stability check did not "
                         "certify the closed-loop set";
        return result;
    }
    result.message = "feasible; gains verified independently";
    return result;
}

SynthesisResult synthesize_sls_nondiagonal(const std::vector<SynthesisMode>& modes,
                                           const SynthesisOptions& options) {
    check_modes(modes);
    const int s = static_cast<int>(modes.size());
    const Eigen::Index n = modes.front().A.rows();
    const Eigen::Index ny = modes.front().C.rows();

    LmiProblem problem;
    problem.margin = options.margin;
    problem.variable_bound = options.variable_bound;

    // Variables: symmetric P_i (init I), Y_ji (init 0).
    std::vector<AffineMatrix> p_mat(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) {
        const int start = problem.num_variables;
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = r; c < n; ++c) problem.add_variable(r == c ? 1.0 : 0.0);
        }
        p_mat[static_cast<std::size_t>(i)] = AffineMatrix::symmetric_variables(n, start);
    }
    std::vector<std::vector<AffineMatrix>> y(static_cast<std::size_t>(s),
                                             std::vector<AffineMatrix>(static_cast<std::size_t>(s)));
    for (int j = 0; j < s; ++j) {
        for (int i = 0; i < s; ++i) {
            const int start = problem.num_variables;
            problem.add_variables(static_cast<int>(n * ny), 0.0);
            y[j][i] = AffineMatrix::dense_variables(n, ny, start);
        }
    }

    for (int j = 0; j < s; ++j) {
        for (int i = 0; i < s; ++i) {
            const AffineMatrix off = p_mat[static_cast<std::size_t>(j)] *
                                         modes[static_cast<std::size_t>(i)].A -
                                     y[j][i] * modes[static_cast<std::size_t>(i)].C;
            problem.blocks.push_back(AffineMatrix::block2x2(p_mat[static_cast<std::size_t>(j)], off,
                                                            off.transpose(),
                                                            p_mat[static_cast<std::size_t>(i)]));
        }
    }

    const LmiSolution lmi = solve_lmi_feasibility(problem);

    SynthesisResult result;
    result.status = from_lmi(lmi.status);
    result.certificate.achieved_slack = lmi.achieved_slack;
    if (lmi.status != LmiStatus::feasible) {
        result.message = "switched non-diagonal LMI " + to_string(lmi.status) + ": " +
                         lmi.diagnostics +
                         " (the condition is sufficient only; infeasibility does not prove that "
                         "no stabilizing gains exist)";
        return result;
    }

    double min_eig = std::numeric_limits<double>::infinity();
    for (const auto& block : problem.blocks) {
        min_eig = std::min(min_eig, min_eigenvalue(block.evaluate(lmi.values)));
    }
    result.certificate.min_block_eigenvalue = min_eig;
    result.certificate.min_elementwise_slack = 0.0;

    std::vector<Eigen::MatrixXd> closed_loop;
    for (int i = 0; i < s; ++i) {
        const Eigen::MatrixXd p = p_mat[static_cast<std::size_t>(i)].evaluate(lmi.values);
        const Eigen::MatrixXd y_ii = y[i][i].evaluate(lmi.values);
        const Eigen::MatrixXd gain = p.ldlt().solve(y_ii);
        result.gains.push_back(gain);
        result.scalings.push_back(p);
        const Eigen::MatrixXd f =
            modes[static_cast<std::size_t>(i)].A - gain * modes[static_cast<std::size_t>(i)].C;
        result.certificate.gain_spectral_radii.push_back(spectral_radius(f));
        closed_loop.push_back(f);
    }

    const StabilityCertificate cert =
        ues_certificate(MatrixSet(closed_loop), options.certify_depth, options.norm);
    result.certificate.set_stability = cert;
    result.certificate.note =
        "a-posteriori JSR certification of the raw closed-loop set { A_i - L_i C_i } at depth <= " +
        std::to_string(options.certify_depth) +
        "; pair with a truncation-order search before using a truncated estimator";

    if (cert.verdict == StabilityVerdict::certified_unstable) {
        result.status = SynthesisStatus::unknown;
        result.message = "LMI reported feasible but the independent JSR check found an unstable "
                         "product";
        return result;
    }
    result.message = cert.stable()
                         ? "feasible; closed-loop set certified u.e.s. independently"
                         : "feasible; JSR bracket straddles 1 at the certification depth (not "
                           "certified, not refuted)";
    return result;
}

std::string to_string(SynthesisStatus status) {
    switch (status) {
        case SynthesisStatus::feasible: return "feasible";
        case SynthesisStatus::infeasible: return "infeasible";
        case SynthesisStatus::unknown: return "unknown";
    }
    return "unknown";
}

}  // namespace ivest
