// Small linear-matrix-inequality feasibility solver.
//
// Problems are posed over a vector of scalar decision variables theta:
//
//   find theta such that  F_b(theta) >= slack * I   for every block b,
//                         g_i(theta) >= slack       for every inequality i,
//
// where every F_b and g_i is affine in theta. The solver maximizes the
// common slack with a log-barrier path-following method (logdet barriers on
// the blocks, log barriers on the scalar constraints, plus box bounds on the
// variables that pin the scale of homogeneous problems). The slack variable
// makes any starting point strictly feasible, so no separate phase-I is
// needed. The verdict is "feasible" when the maximized slack clears the
// requested margin, "infeasible" when the optimum is provably below zero,
// and "unknown" on solver limitations.

#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

namespace ivest {

// Affine scalar form: sum_k coeffs[k] * theta_k + constant.
struct LinearForm {
    std::map<int, double> coeffs;
    double constant = 0.0;

    static LinearForm variable(int index, double scale = 1.0);
    static LinearForm constant_value(double value);

    LinearForm& operator+=(const LinearForm& other);
    LinearForm& operator-=(const LinearForm& other);
    LinearForm& operator*=(double scale);
    double evaluate(const Eigen::VectorXd& theta) const;
};

LinearForm operator+(LinearForm a, const LinearForm& b);
LinearForm operator-(LinearForm a, const LinearForm& b);
LinearForm operator*(double scale, LinearForm form);

// Dense matrix of affine forms.
class AffineMatrix {
public:
    AffineMatrix() = default;
    AffineMatrix(Eigen::Index rows, Eigen::Index cols);

    static AffineMatrix constant(const Eigen::MatrixXd& value);
    // Diagonal matrix with entry (i, i) = theta[indices[i]].
    static AffineMatrix diagonal_variables(const std::vector<int>& indices);
    // Dense rows x cols matrix of fresh entries theta[start + i*cols + j].
    static AffineMatrix dense_variables(Eigen::Index rows, Eigen::Index cols, int start);
    // Symmetric n x n matrix over n(n+1)/2 upper-triangle variables.
    static AffineMatrix symmetric_variables(Eigen::Index n, int start);

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    LinearForm& at(Eigen::Index i, Eigen::Index j);
    const LinearForm& at(Eigen::Index i, Eigen::Index j) const;

    AffineMatrix transpose() const;
    Eigen::MatrixXd evaluate(const Eigen::VectorXd& theta) const;

    static AffineMatrix block2x2(const AffineMatrix& a, const AffineMatrix& b,
                                 const AffineMatrix& c, const AffineMatrix& d);

private:
    Eigen::Index rows_ = 0, cols_ = 0;
    std::vector<LinearForm> entries_;
};

AffineMatrix operator+(const AffineMatrix& a, const AffineMatrix& b);
AffineMatrix operator-(const AffineMatrix& a, const AffineMatrix& b);
AffineMatrix operator*(const Eigen::MatrixXd& m, const AffineMatrix& a);
AffineMatrix operator*(const AffineMatrix& a, const Eigen::MatrixXd& m);

struct LmiProblem {
    int num_variables = 0;
    std::vector<AffineMatrix> blocks;        // each required >= slack * I (symmetric)
    std::vector<LinearForm> inequalities;    // each required >= slack
    std::vector<double> initial_values;      // warm start, parallel to variables

    double margin = 1e-6;          // required slack for a "feasible" verdict
    double variable_bound = 1e3;   // |theta_k| < variable_bound
    double slack_cap = 1e6;
    double tol_gap = 1e-9;
    int max_outer = 60;
    int max_newton = 200;

    int add_variable(double initial = 0.0);
    std::vector<int> add_variables(int count, double initial = 0.0);
};

enum class LmiStatus { feasible, infeasible, unknown };

struct LmiSolution {
    LmiStatus status = LmiStatus::unknown;
    Eigen::VectorXd values;
    double achieved_slack = 0.0;
    double gap = 0.0;              // residual duality gap on the slack
    int newton_iterations = 0;
    std::string diagnostics;
};

LmiSolution solve_lmi_feasibility(const LmiProblem& problem);

std::string to_string(LmiStatus status);

}  // namespace ivest
