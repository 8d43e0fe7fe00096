// Observer gain synthesis via convex feasibility.
//
// LTI: a gain L with rho(|A - LC|) < 1 exists if and only if there are a
// diagonal positive definite P, a matrix Y and a nonnegative X with
//
//   [ P  X ; X' P ] > 0   and   |P A - Y C| <= X,     L = P^{-1} Y.
//
// The absolute-value constraint splits exactly into the affine pair
// -X <= PA - YC <= X, so the whole problem is LMI feasibility. For switched
// systems the diagonal variant couples all mode pairs (i, j):
//
//   [ Lam_j  X_ji ; X_ji'  Lam_i - eta I ] >= 0,  |Lam_j A_i - Y_ji C_i| <= X_ji,
//
// which is sufficient (not necessary) for { |A_i - L_i C_i| } to be uniformly
// exponentially stable with L_i = Lam_i^{-1} Y_ii. Dropping the absolute
// values gives the non-diagonal relaxation certifying stability of the raw
// set { A_i - L_i C_i } instead. Every returned gain set is re-verified by an
// independent spectral computation; the solver is never trusted on its own.

#pragma once

#include "ivest/lmi.hpp"
#include "ivest/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ivest {

enum class SynthesisStatus { feasible, infeasible, unknown };

struct SynthesisOptions {
    double margin = 1e-6;        // slack required of the LMI solution
    double variable_bound = 1e3;
    int certify_depth = 12;      // JSR enumeration depth for the a-posteriori check
    JsrNorm norm = JsrNorm::frobenius;
};

struct SynthesisCertificate {
    double achieved_slack = 0.0;           // maximized LMI margin (plays eta / gamma)
    double min_block_eigenvalue = 0.0;     // over all LMI blocks at the solution
    double min_elementwise_slack = 0.0;    // min of X - |PA - YC| entries (diagonal forms)
    std::vector<double> gain_spectral_radii;  // rho(|A_i - L_i C_i|) (or rho(A_i - L_i C_i))
    std::optional<StabilityCertificate> set_stability;  // switched case
    std::string note;
};

struct SynthesisResult {
    SynthesisStatus status = SynthesisStatus::unknown;
    std::vector<Eigen::MatrixXd> gains;
    std::vector<Eigen::MatrixXd> scalings;  // P, or Lambda_i / P_i per mode
    SynthesisCertificate certificate;
    std::string message;

    bool feasible() const { return status == SynthesisStatus::feasible; }
};

// Single-system gain with rho(|A - LC|) < 1. Infeasibility of this LMI is
// equivalent to nonexistence of such a gain (up to solver limitations, which
// report "unknown" instead).
SynthesisResult synthesize_lti(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                               const SynthesisOptions& options = {});

struct SynthesisMode {
    Eigen::MatrixXd A;
    Eigen::MatrixXd C;
};

// Switched gains making { |A_i - L_i C_i| } u.e.s. Infeasibility here does
// NOT prove that no stabilizing gains exist; the conditions are one-way.
SynthesisResult synthesize_sls_diagonal(const std::vector<SynthesisMode>& modes,
                                        const SynthesisOptions& options = {});

// Relaxed variant without absolute values: certifies stability of the raw
// closed-loop set { A_i - L_i C_i }; pair with a truncation-order search to
// recover an interval estimator.
SynthesisResult synthesize_sls_nondiagonal(const std::vector<SynthesisMode>& modes,
                                           const SynthesisOptions& options = {});

std::string to_string(SynthesisStatus status);

}  // namespace ivest
