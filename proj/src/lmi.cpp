#include "ivest/lmi.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ivest {

LinearForm LinearForm::variable(int index, double scale) {
    LinearForm form;
    if (scale != 0.0) form.coeffs[index] = scale;
    return form;
}

LinearForm LinearForm::constant_value(double value) {
    LinearForm form;
    form.constant = value;
    return form;
}

LinearForm& LinearForm::operator+=(const LinearForm& other) {
    for (const auto& [k, v] : other.coeffs) coeffs[k] += v;
    constant += other.constant;
    return *this;
}

LinearForm& LinearForm::operator-=(const LinearForm& other) {
    for (const auto& [k, v] : other.coeffs) coeffs[k] -= v;
    constant -= other.constant;
    return *this;
}

LinearForm& LinearForm::operator*=(double scale) {
    for (auto& [k, v] : coeffs) v *= scale;
    constant *= scale;
    return *this;
}

double LinearForm::evaluate(const Eigen::VectorXd& theta) const {
    double value = constant;
    for (const auto& [k, v] : coeffs) value += v * theta[k];
    return value;
}

LinearForm operator+(LinearForm a, const LinearForm& b) { return a += b; }
LinearForm operator-(LinearForm a, const LinearForm& b) { return a -= b; }
LinearForm operator*(double scale, LinearForm form) { return form *= scale; }

AffineMatrix::AffineMatrix(Eigen::Index rows, Eigen::Index cols)
    : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows * cols)) {}

AffineMatrix AffineMatrix::constant(const Eigen::MatrixXd& value) {
    AffineMatrix m(value.rows(), value.cols());
    for (Eigen::Index i = 0; i < value.rows(); ++i)
        for (Eigen::Index j = 0; j < value.cols(); ++j)
            m.at(i, j).constant = value(i, j);
    return m;
}

AffineMatrix AffineMatrix::diagonal_variables(const std::vector<int>& indices) {
    const auto n = static_cast<Eigen::Index>(indices.size());
    AffineMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m.at(i, i) = LinearForm::variable(indices[static_cast<std::size_t>(i)]);
    }
    return m;
}

AffineMatrix AffineMatrix::dense_variables(Eigen::Index rows, Eigen::Index cols, int start) {
    AffineMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m.at(i, j) = LinearForm::variable(start + static_cast<int>(i * cols + j));
    return m;
}

AffineMatrix AffineMatrix::symmetric_variables(Eigen::Index n, int start) {
    AffineMatrix m(n, n);
    int next = start;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            m.at(i, j) = LinearForm::variable(next);
            if (i != j) m.at(j, i) = LinearForm::variable(next);
            ++next;
        }
    }
    return m;
}

LinearForm& AffineMatrix::at(Eigen::Index i, Eigen::Index j) {
    return entries_[static_cast<std::size_t>(i * cols_ + j)];
}

const LinearForm& AffineMatrix::at(Eigen::Index i, Eigen::Index j) const {
    return entries_[static_cast<std::size_t>(i * cols_ + j)];
}

AffineMatrix AffineMatrix::transpose() const {
    AffineMatrix m(cols_, rows_);
    for (Eigen::Index i = 0; i < rows_; ++i)
        for (Eigen::Index j = 0; j < cols_; ++j)
            m.at(j, i) = at(i, j);
    return m;
}

Eigen::MatrixXd AffineMatrix::evaluate(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd out(rows_, cols_);
    for (Eigen::Index i = 0; i < rows_; ++i)
        for (Eigen::Index j = 0; j < cols_; ++j)
            out(i, j) = at(i, j).evaluate(theta);
    return out;
}

AffineMatrix AffineMatrix::block2x2(const AffineMatrix& a, const AffineMatrix& b,
                                    const AffineMatrix& c, const AffineMatrix& d) {
    if (a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() ||
        b.cols() != d.cols()) {
        throw std::invalid_argument("AffineMatrix::block2x2: inconsistent block shapes");
    }
    AffineMatrix m(a.rows() + c.rows(), a.cols() + b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) m.at(i, j) = a.at(i, j);
        for (Eigen::Index j = 0; j < b.cols(); ++j) m.at(i, a.cols() + j) = b.at(i, j);
    }
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.cols(); ++j) m.at(a.rows() + i, j) = c.at(i, j);
        for (Eigen::Index j = 0; j < d.cols(); ++j) m.at(a.rows() + i, a.cols() + j) = d.at(i, j);
    }
    return m;
}

namespace {

AffineMatrix combine(const AffineMatrix& a, const AffineMatrix& b, double sign) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("AffineMatrix: shape mismatch in addition");
    }
    AffineMatrix out(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.at(i, j) = a.at(i, j) + sign * b.at(i, j);
    return out;
}

}  // namespace

AffineMatrix operator+(const AffineMatrix& a, const AffineMatrix& b) { return combine(a, b, 1.0); }
AffineMatrix operator-(const AffineMatrix& a, const AffineMatrix& b) { return combine(a, b, -1.0); }

AffineMatrix operator*(const Eigen::MatrixXd& m, const AffineMatrix& a) {
    if (m.cols() != a.rows()) throw std::invalid_argument("AffineMatrix: shape mismatch in product");
    AffineMatrix out(m.rows(), a.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            LinearForm acc;
            for (Eigen::Index k = 0; k < m.cols(); ++k) acc += m(i, k) * a.at(k, j);
            out.at(i, j) = std::move(acc);
        }
    }
    return out;
}

AffineMatrix operator*(const AffineMatrix& a, const Eigen::MatrixXd& m) {
    if (a.cols() != m.rows()) throw std::invalid_argument("AffineMatrix: shape mismatch in product");
    AffineMatrix out(a.rows(), m.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            LinearForm acc;
            for (Eigen::Index k = 0; k < a.cols(); ++k) acc += m(k, j) * a.at(i, k);
            out.at(i, j) = std::move(acc);
        }
    }
    return out;
}

int LmiProblem::add_variable(double initial) {
    initial_values.push_back(initial);
    return num_variables++;
}

std::vector<int> LmiProblem::add_variables(int count, double initial) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(add_variable(initial));
    return out;
}

namespace {

// Block compiled to F0 + sum_k theta_k * K_k form for fast assembly.
struct CompiledBlock {
    Eigen::MatrixXd f0;
    std::vector<std::pair<int, Eigen::MatrixXd>> terms;
    Eigen::Index dim = 0;
};

CompiledBlock compile_block(const AffineMatrix& block, int num_vars) {
    if (block.rows() != block.cols()) {
        throw std::invalid_argument("lmi: blocks must be square");
    }
    CompiledBlock out;
    out.dim = block.rows();
    out.f0 = Eigen::MatrixXd::Zero(block.rows(), block.cols());
    std::map<int, Eigen::MatrixXd> terms;
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
        for (Eigen::Index j = 0; j < block.cols(); ++j) {
            const LinearForm& form = block.at(i, j);
            out.f0(i, j) = form.constant;
            for (const auto& [k, v] : form.coeffs) {
                if (k < 0 || k >= num_vars) {
                    throw std::invalid_argument("lmi: block references unknown variable " +
                                                std::to_string(k));
                }
                auto [it, fresh] =
                    terms.try_emplace(k, Eigen::MatrixXd::Zero(block.rows(), block.cols()));
                it->second(i, j) += v;
            }
        }
    }
    const double scale = std::max(1.0, out.f0.norm());
    if ((out.f0 - out.f0.transpose()).norm() > 1e-12 * scale) {
        throw std::invalid_argument("lmi: block constant part is not symmetric");
    }
    for (auto& [k, m] : terms) {
        if ((m - m.transpose()).norm() > 1e-12 * std::max(1.0, m.norm())) {
            throw std::invalid_argument("lmi: block coefficient of variable " + std::to_string(k) +
                                        " is not symmetric");
        }
        m = 0.5 * (m + m.transpose());
        out.terms.emplace_back(k, std::move(m));
    }
    return out;
}

struct Workspace {
    const LmiProblem& problem;
    std::vector<CompiledBlock> blocks;
    int n;          // number of theta variables
    double bound;   // box half-width
    double cap;     // slack cap

    explicit Workspace(const LmiProblem& p) : problem(p), n(p.num_variables) {
        bound = p.variable_bound;
        cap = p.slack_cap;
        blocks.reserve(p.blocks.size());
        for (const auto& b : p.blocks) blocks.push_back(compile_block(b, n));
    }

    // z = (theta; tau)
    bool strictly_feasible(const Eigen::VectorXd& z) const {
        const double tau = z[n];
        if (!(tau < cap)) return false;
        for (int k = 0; k < n; ++k) {
            if (!(std::abs(z[k]) < bound)) return false;
        }
        const Eigen::VectorXd theta = z.head(n);
        for (const auto& ineq : problem.inequalities) {
            if (!(ineq.evaluate(theta) - tau > 0.0)) return false;
        }
        for (const auto& block : blocks) {
            Eigen::MatrixXd s = block.f0;
            for (const auto& [k, m] : block.terms) s += theta[k] * m;
            s.diagonal().array() -= tau;
            Eigen::LLT<Eigen::MatrixXd> llt(s);
            if (llt.info() != Eigen::Success) return false;
        }
        return true;
    }

    // Barrier value; +inf outside the domain.
    double barrier(const Eigen::VectorXd& z) const {
        const double inf = std::numeric_limits<double>::infinity();
        const double tau = z[n];
        double value = 0.0;
        if (!(tau < cap)) return inf;
        value -= std::log(cap - tau);
        for (int k = 0; k < n; ++k) {
            const double lo = bound + z[k];
            const double hi = bound - z[k];
            if (!(lo > 0.0) || !(hi > 0.0)) return inf;
            value -= std::log(lo) + std::log(hi);
        }
        const Eigen::VectorXd theta = z.head(n);
        for (const auto& ineq : problem.inequalities) {
            const double u = ineq.evaluate(theta) - tau;
            if (!(u > 0.0)) return inf;
            value -= std::log(u);
        }
        for (const auto& block : blocks) {
            Eigen::MatrixXd s = block.f0;
            for (const auto& [k, m] : block.terms) s += theta[k] * m;
            s.diagonal().array() -= tau;
            Eigen::LLT<Eigen::MatrixXd> llt(s);
            if (llt.info() != Eigen::Success) return inf;
            const auto& l = llt.matrixLLT();
            double logdet = 0.0;
            for (Eigen::Index i = 0; i < l.rows(); ++i) logdet += std::log(l(i, i));
            value -= 2.0 * logdet;
        }
        return value;
    }

    // Gradient and Hessian of t*(-tau) + barrier at z. Returns false when a
    // block factorization breaks down.
    bool derivatives(const Eigen::VectorXd& z, double t, Eigen::VectorXd& grad,
                     Eigen::MatrixXd& hess) const {
        const int dim = n + 1;
        grad = Eigen::VectorXd::Zero(dim);
        hess = Eigen::MatrixXd::Zero(dim, dim);
        grad[n] -= t;

        const double tau = z[n];
        const double cap_slack = cap - tau;
        grad[n] += 1.0 / cap_slack;
        hess(n, n) += 1.0 / (cap_slack * cap_slack);

        for (int k = 0; k < n; ++k) {
            const double lo = bound + z[k];
            const double hi = bound - z[k];
            grad[k] += 1.0 / hi - 1.0 / lo;
            hess(k, k) += 1.0 / (hi * hi) + 1.0 / (lo * lo);
        }

        const Eigen::VectorXd theta = z.head(n);
        for (const auto& ineq : problem.inequalities) {
            const double u = ineq.evaluate(theta) - tau;
            const double inv = 1.0 / u;
            // d = (a; -1)
            for (const auto& [k, v] : ineq.coeffs) grad[k] -= inv * v;
            grad[n] += inv;
            for (const auto& [k1, v1] : ineq.coeffs) {
                for (const auto& [k2, v2] : ineq.coeffs) hess(k1, k2) += inv * inv * v1 * v2;
                hess(k1, n) -= inv * inv * v1;
                hess(n, k1) -= inv * inv * v1;
            }
            hess(n, n) += inv * inv;
        }

        for (const auto& block : blocks) {
            Eigen::MatrixXd s = block.f0;
            for (const auto& [k, m] : block.terms) s += theta[k] * m;
            s.diagonal().array() -= tau;
            Eigen::LLT<Eigen::MatrixXd> llt(s);
            if (llt.info() != Eigen::Success) return false;
            const Eigen::MatrixXd s_inv =
                llt.solve(Eigen::MatrixXd::Identity(block.dim, block.dim));

            // M_k = S^{-1} K_k per participating variable; M_tau = -S^{-1}.
            std::vector<std::pair<int, Eigen::MatrixXd>> factors;
            factors.reserve(block.terms.size() + 1);
            for (const auto& [k, m] : block.terms) factors.emplace_back(k, s_inv * m);
            factors.emplace_back(n, -s_inv);

            for (const auto& [k, mk] : factors) {
                grad[k] -= mk.trace();
                for (const auto& [l, ml] : factors) {
                    if (l < k) continue;
                    const double h = mk.cwiseProduct(ml.transpose()).sum();
                    hess(k, l) += h;
                    if (l != k) hess(l, k) += h;
                }
            }
        }
        return true;
    }

    double total_constraint_count() const {
        double m = 1.0 + 2.0 * n;  // cap + box
        m += static_cast<double>(problem.inequalities.size());
        for (const auto& block : blocks) m += static_cast<double>(block.dim);
        return m;
    }
};

}  // namespace

LmiSolution solve_lmi_feasibility(const LmiProblem& problem) {
    Workspace ws(problem);
    const int n = ws.n;
    LmiSolution solution;

    // Starting point: warm start clamped inside the box; slack below the
    // minimum constraint slack so everything starts strictly feasible.
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n + 1);
    for (int k = 0; k < n && k < static_cast<int>(problem.initial_values.size()); ++k) {
        z[k] = std::clamp(problem.initial_values[static_cast<std::size_t>(k)],
                          -0.9 * ws.bound, 0.9 * ws.bound);
    }
    {
        double min_slack = ws.cap - 1.0;
        const Eigen::VectorXd theta = z.head(n);
        for (const auto& ineq : problem.inequalities) {
            min_slack = std::min(min_slack, ineq.evaluate(theta));
        }
        for (const auto& block : ws.blocks) {
            Eigen::MatrixXd s = block.f0;
            for (const auto& [k, m] : block.terms) s += theta[k] * m;
            const Eigen::VectorXd eig = s.selfadjointView<Eigen::Lower>().eigenvalues();
            min_slack = std::min(min_slack, eig.minCoeff());
        }
        z[n] = min_slack - 1.0;
    }
    if (!ws.strictly_feasible(z)) {
        solution.status = LmiStatus::unknown;
        solution.diagnostics = "failed to construct a strictly feasible starting point";
        return solution;
    }

    const double m_total = ws.total_constraint_count();
    double t = 1.0;
    int newton_total = 0;
    bool breakdown = false;
    bool converged = false;

    for (int outer = 0; outer < problem.max_outer; ++outer) {
        for (int it = 0; it < problem.max_newton; ++it) {
            Eigen::VectorXd grad;
            Eigen::MatrixXd hess;
            if (!ws.derivatives(z, t, grad, hess)) {
                breakdown = true;
                break;
            }

            Eigen::VectorXd step;
            double reg = 0.0;
            for (;;) {
                Eigen::MatrixXd h = hess;
                if (reg > 0.0) h.diagonal().array() += reg;
                Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
                if (ldlt.info() == Eigen::Success) {
                    step = ldlt.solve(-grad);
                    if (step.allFinite() && grad.dot(step) < 0.0) break;
                }
                reg = (reg == 0.0) ? 1e-10 : reg * 100.0;
                if (reg > 1e6) {
                    breakdown = true;
                    break;
                }
            }
            if (breakdown) break;

            const double decrement = -grad.dot(step);
            if (decrement * 0.5 < 1e-10) break;

            const double f0 = t * (-z[n]) + ws.barrier(z);
            double alpha = 1.0;
            bool moved = false;
            while (alpha > 1e-14) {
                const Eigen::VectorXd trial = z + alpha * step;
                if (ws.strictly_feasible(trial)) {
                    const double f1 = t * (-trial[n]) + ws.barrier(trial);
                    if (f1 <= f0 + 0.25 * alpha * grad.dot(step)) {
                        z = trial;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            ++newton_total;
            if (!moved) break;  // stalled at this centering accuracy
        }
        if (breakdown) break;
        if (m_total / t < problem.tol_gap) {
            converged = true;
            break;
        }
        t *= 20.0;
    }

    solution.values = z.head(n);
    solution.achieved_slack = z[n];
    solution.gap = m_total / t;
    solution.newton_iterations = newton_total;

    if (breakdown) {
        solution.status = LmiStatus::unknown;
        solution.diagnostics = "numerical breakdown in barrier Newton step";
        return solution;
    }
    if (!converged) {
        solution.status = LmiStatus::unknown;
        solution.diagnostics = "iteration budget exhausted before reaching target gap";
        return solution;
    }
    if (solution.achieved_slack >= problem.margin) {
        solution.status = LmiStatus::feasible;
        solution.diagnostics = "slack " + std::to_string(solution.achieved_slack) +
                               " >= margin " + std::to_string(problem.margin);
    } else if (solution.achieved_slack + solution.gap <= 0.0) {
        solution.status = LmiStatus::infeasible;
        solution.diagnostics = "maximized slack " + std::to_string(solution.achieved_slack) +
                               " is negative; no point satisfies the constraints within the "
                               "variable box";
    } else {
        solution.status = LmiStatus::unknown;
        solution.diagnostics = "maximized slack " + std::to_string(solution.achieved_slack) +
                               " is below the margin but not provably negative";
    }
    return solution;
}

std::string to_string(LmiStatus status) {
    switch (status) {
        case LmiStatus::feasible: return "feasible";
        case LmiStatus::infeasible: return "infeasible";
        case LmiStatus::unknown: return "unknown";
    }
    return "unknown";
}

}  // namespace ivest
