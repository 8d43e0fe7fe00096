// Spectral radius, joint spectral radius bounds, and stability predicates for
// finite matrix sets.
//
// The joint spectral radius rho(S) of a finite set S is the worst-case growth
// rate of products drawn from S. Exhaustive depth-limited enumeration gives a
// monotone bracket:
//
//   lower(d) = max over products U of length k <= d of rho(U)^{1/k}
//   upper(d) = min over k <= d of ( max over products of length k of ||U|| )^{1/k}
//
// The lower bound is nondecreasing and the upper nonincreasing in d, and
// lower <= rho(S) <= upper at every depth (the norm must be submultiplicative;
// Frobenius and spectral both are). upper < 1 at any depth certifies uniform
// exponential stability; lower >= 1 certifies instability with the witnessing
// product.

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace ivest {

struct MatrixSet {
    std::vector<Eigen::MatrixXd> members;
    std::vector<int> labels;  // mode labels; defaults to 0..m-1 when empty

    MatrixSet() = default;
    explicit MatrixSet(std::vector<Eigen::MatrixXd> matrices);

    Eigen::Index dim() const { return members.empty() ? 0 : members.front().rows(); }
    std::size_t size() const { return members.size(); }
};

// { |A| : A in S }
MatrixSet abs(const MatrixSet& set);

// { lift(A) : A in S }, lift as in interval.hpp
MatrixSet stacked_bounds_set(const MatrixSet& set);

enum class JsrNorm { frobenius, spectral };

struct JsrBounds {
    double lower = 0.0;
    double upper = 0.0;
    int depth = 0;
    JsrNorm norm_used = JsrNorm::frobenius;
};

// Largest eigenvalue modulus via a dense eigensolver. Throws on non-finite
// or non-square input.
double spectral_radius(const Eigen::MatrixXd& A);

// Exhaustive product enumeration up to the given depth. Throws when the
// enumeration would exceed 1e7 products.
JsrBounds jsr_bounds(const MatrixSet& set, int depth, JsrNorm norm = JsrNorm::frobenius);

struct JsrIdentityReport {
    JsrBounds abs_bounds;     // bounds for |S|
    JsrBounds lifted_bounds;  // bounds for lift(S)
    JsrBounds raw_bounds;     // bounds for S itself
    bool brackets_overlap = false;      // rho(|S|) = rho(lift(S)) consistent
    bool raw_below_abs = false;         // rho(S) <= rho(|S|) consistent
    bool pass() const { return brackets_overlap && raw_below_abs; }
};

// Checks rho(|S|) = rho(lift(S)) and rho(S) <= rho(|S|) at the bound level.
JsrIdentityReport jsr_identity_report(const MatrixSet& set, int depth, double tol = 1e-9);

struct DominanceReport {
    std::vector<int> dominating_index;  // for each member of S, a dominating member of Sbar
    JsrBounds inner_bounds;             // bounds for S
    JsrBounds outer_bounds;             // bounds for Sbar
    bool ordered = false;               // lower(S) <= upper(Sbar) + tol
};

// Requires both sets elementwise nonnegative and every member of S dominated
// by some member of Sbar; throws otherwise, identifying the offender.
DominanceReport dominance_report(const MatrixSet& set, const MatrixSet& dominating, int depth,
                                 double tol = 1e-9);

enum class StabilityVerdict { certified_stable, certified_unstable, not_certified };

struct StabilityCertificate {
    StabilityVerdict verdict = StabilityVerdict::not_certified;
    JsrBounds bounds;
    int certifying_depth = -1;         // product length at which upper < 1
    std::vector<int> witness_product;  // member indices (left factor first) when unstable

    bool stable() const { return verdict == StabilityVerdict::certified_stable; }
};

// Uniform exponential stability test: certified stable when the norm bound
// drops below one at some product length <= depth, certified unstable when a
// product with rho^{1/k} >= 1 is found, not certified otherwise.
StabilityCertificate ues_certificate(const MatrixSet& set, int depth,
                                     JsrNorm norm = JsrNorm::frobenius);

std::string to_string(StabilityVerdict verdict);

}  // namespace ivest
