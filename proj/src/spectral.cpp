#include "ivest/spectral.hpp"

#include "ivest/interval.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ivest {

namespace {

constexpr std::size_t kProductBudget = 10'000'000;

double matrix_norm(const Eigen::MatrixXd& m, JsrNorm norm) {
    if (norm == JsrNorm::frobenius) return m.norm();
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

void check_budget(std::size_t set_size, int depth) {
    if (depth < 1) throw std::invalid_argument("jsr: depth must be >= 1");
    std::size_t total = 0;
    std::size_t level = 1;
    for (int k = 1; k <= depth; ++k) {
        if (level > kProductBudget / set_size) {
            throw std::invalid_argument(
                "jsr: depth " + std::to_string(depth) + " over a set of " +
                std::to_string(set_size) +
                " matrices exceeds the 1e7 product budget; use a smaller depth");
        }
        level *= set_size;
        total += level;
        if (total > kProductBudget) {
            throw std::invalid_argument(
                "jsr: depth " + std::to_string(depth) + " over a set of " +
                std::to_string(set_size) +
                " matrices exceeds the 1e7 product budget; use a smaller depth");
        }
    }
}

struct LevelStats {
    int length = 0;
    double max_norm = 0.0;            // max ||U|| over products of this length
    double max_rho = 0.0;             // max rho(U) over products of this length
    std::size_t argmax_rho = 0;       // index within the level
};

// Walks products level by level. Visitor returns false to stop early.
// Parent chains are kept so a witness product can be reconstructed.
template <typename Visitor>
void enumerate_products(const MatrixSet& set, int depth, JsrNorm norm, Visitor&& visit) {
    const std::size_t s = set.size();
    std::vector<Eigen::MatrixXd> level = {Eigen::MatrixXd::Identity(set.dim(), set.dim())};
    std::vector<std::vector<int>> member_idx;   // per level, the left factor of each product
    std::vector<std::vector<std::size_t>> parent;

    for (int k = 1; k <= depth; ++k) {
        std::vector<Eigen::MatrixXd> next;
        next.reserve(level.size() * s);
        member_idx.emplace_back();
        parent.emplace_back();
        auto& idx = member_idx.back();
        auto& par = parent.back();
        idx.reserve(level.size() * s);
        par.reserve(level.size() * s);

        LevelStats stats;
        stats.length = k;
        for (std::size_t m = 0; m < s; ++m) {
            for (std::size_t p = 0; p < level.size(); ++p) {
                Eigen::MatrixXd prod = set.members[m] * level[p];
                const double nrm = matrix_norm(prod, norm);
                const double rho = spectral_radius(prod);
                if (nrm > stats.max_norm) stats.max_norm = nrm;
                if (rho > stats.max_rho) {
                    stats.max_rho = rho;
                    stats.argmax_rho = next.size();
                }
                idx.push_back(static_cast<int>(m));
                par.push_back(p);
                next.push_back(std::move(prod));
            }
        }

        auto witness = [&](std::size_t leaf) {
            std::vector<int> w;
            std::size_t node = leaf;
            for (int j = k - 1; j >= 0; --j) {
                w.push_back(member_idx[static_cast<std::size_t>(j)][node]);
                node = parent[static_cast<std::size_t>(j)][node];
            }
            return w;  // left factor first
        };
        if (!visit(stats, witness)) return;
        level = std::move(next);
    }
}

}  // namespace

MatrixSet::MatrixSet(std::vector<Eigen::MatrixXd> matrices) : members(std::move(matrices)) {
    if (members.empty()) throw std::invalid_argument("MatrixSet: must be non-empty");
    const Eigen::Index n = members.front().rows();
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& m = members[i];
        if (m.rows() != m.cols() || m.rows() != n) {
            throw std::invalid_argument("MatrixSet: member " + std::to_string(i) +
                                        " is not square of dimension " + std::to_string(n));
        }
        if (!m.allFinite()) {
            throw std::invalid_argument("MatrixSet: member " + std::to_string(i) +
                                        " has non-finite entries");
        }
    }
    labels.resize(members.size());
    std::iota(labels.begin(), labels.end(), 0);
}

MatrixSet abs(const MatrixSet& set) {
    MatrixSet out = set;
    for (auto& m : out.members) m = m.cwiseAbs();
    return out;
}

MatrixSet stacked_bounds_set(const MatrixSet& set) {
    MatrixSet out = set;
    for (auto& m : out.members) m = stacked_bounds_matrix(m);
    return out;
}

double spectral_radius(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("spectral_radius: matrix must be square");
    if (!A.allFinite()) throw std::invalid_argument("spectral_radius: non-finite entries");
    if (A.rows() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(A, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

JsrBounds jsr_bounds(const MatrixSet& set, int depth, JsrNorm norm) {
    check_budget(set.size(), depth);
    JsrBounds out;
    out.depth = depth;
    out.norm_used = norm;
    out.lower = 0.0;
    out.upper = std::numeric_limits<double>::infinity();
    enumerate_products(set, depth, norm, [&](const LevelStats& stats, auto&&) {
        const double inv_k = 1.0 / stats.length;
        out.lower = std::max(out.lower, std::pow(stats.max_rho, inv_k));
        out.upper = std::min(out.upper, std::pow(stats.max_norm, inv_k));
        return true;
    });
    return out;
}

JsrIdentityReport jsr_identity_report(const MatrixSet& set, int depth, double tol) {
    JsrIdentityReport report;
    report.abs_bounds = jsr_bounds(abs(set), depth);
    report.lifted_bounds = jsr_bounds(stacked_bounds_set(set), depth);
    report.raw_bounds = jsr_bounds(set, depth);
    report.brackets_overlap =
        std::max(report.abs_bounds.lower, report.lifted_bounds.lower) <=
        std::min(report.abs_bounds.upper, report.lifted_bounds.upper) + tol;
    report.raw_below_abs = report.raw_bounds.lower <= report.abs_bounds.upper + tol;
    return report;
}

DominanceReport dominance_report(const MatrixSet& set, const MatrixSet& dominating, int depth,
                                 double tol) {
    for (std::size_t i = 0; i < set.size(); ++i) {
        if ((set.members[i].array() < 0.0).any()) {
            throw std::invalid_argument("dominance_report: member " + std::to_string(i) +
                                        " of the inner set has negative entries");
        }
    }
    for (std::size_t j = 0; j < dominating.size(); ++j) {
        if ((dominating.members[j].array() < 0.0).any()) {
            throw std::invalid_argument("dominance_report: member " + std::to_string(j) +
                                        " of the dominating set has negative entries");
        }
    }
    DominanceReport report;
    for (std::size_t i = 0; i < set.size(); ++i) {
        int found = -1;
        for (std::size_t j = 0; j < dominating.size(); ++j) {
            if ((set.members[i].array() <= dominating.members[j].array()).all()) {
                found = static_cast<int>(j);
                break;
            }
        }
        if (found < 0) {
            throw std::invalid_argument("dominance_report: member " + std::to_string(i) +
                                        " of the inner set is dominated by no member of the "
                                        "dominating set");
        }
        report.dominating_index.push_back(found);
    }
    report.inner_bounds = jsr_bounds(set, depth);
    report.outer_bounds = jsr_bounds(dominating, depth);
    report.ordered = report.inner_bounds.lower <= report.outer_bounds.upper + tol;
    return report;
}

StabilityCertificate ues_certificate(const MatrixSet& set, int depth, JsrNorm norm) {
    check_budget(set.size(), depth);
    StabilityCertificate cert;
    cert.bounds.depth = depth;
    cert.bounds.norm_used = norm;
    cert.bounds.lower = 0.0;
    cert.bounds.upper = std::numeric_limits<double>::infinity();
    enumerate_products(set, depth, norm, [&](const LevelStats& stats, auto&& witness) {
        const double inv_k = 1.0 / stats.length;
        const double lower_k = std::pow(stats.max_rho, inv_k);
        const double upper_k = std::pow(stats.max_norm, inv_k);
        cert.bounds.lower = std::max(cert.bounds.lower, lower_k);
        cert.bounds.upper = std::min(cert.bounds.upper, upper_k);
        if (lower_k >= 1.0) {
            cert.verdict = StabilityVerdict::certified_unstable;
            cert.witness_product = witness(stats.argmax_rho);
            cert.bounds.depth = stats.length;
            return false;
        }
        if (upper_k < 1.0) {
            cert.verdict = StabilityVerdict::certified_stable;
            cert.certifying_depth = stats.length;
            cert.bounds.depth = stats.length;
            return false;
        }
        return true;
    });
    return cert;
}

std::string to_string(StabilityVerdict verdict) {
    switch (verdict) {
        case StabilityVerdict::certified_stable: return "certified_stable";
        case StabilityVerdict::certified_unstable: return "certified_unstable";
        case StabilityVerdict::not_certified: return "not_certified";
    }
    return "unknown";
}

}  // namespace ivest
