// Interval boxes in R^n and the tightest affine image.
//
// A box is stored by its lower/upper corners; the equivalent center/radius
// representation is derived on demand. The affine image of a box under
// x = M z + N f is again enclosed by a box whose center is the image of the
// centers and whose radius is |M| p_z + |N| p_f; that box is the tightest
// interval enclosure (every face is attained by some vertex of the operand
// boxes). The stacked-bounds matrix
//
//   lift(M) = [ (M+|M|)/2  (M-|M|)/2 ;  (M-|M|)/2  (M+|M|)/2 ]
//
// propagates (lower; upper) pairs directly and is similar to
// blockdiag(M, |M|) under the change of basis T_n = [I -I; I I].

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>

namespace ivest {

struct CenterRadius {
    Eigen::VectorXd center;
    Eigen::VectorXd radius;
};

class IntervalVector {
public:
    IntervalVector() = default;

    // Requires lower <= upper componentwise, exactly; violations throw.
    IntervalVector(Eigen::VectorXd lower, Eigen::VectorXd upper)
        : lower_(std::move(lower)), upper_(std::move(upper)) {
        if (lower_.size() != upper_.size()) {
            throw std::invalid_argument(
                "IntervalVector: lower has dimension " + std::to_string(lower_.size()) +
                " but upper has dimension " + std::to_string(upper_.size()));
        }
        if (!lower_.allFinite() || !upper_.allFinite()) {
            throw std::invalid_argument("IntervalVector: bounds must be finite");
        }
        for (Eigen::Index i = 0; i < lower_.size(); ++i) {
            if (lower_[i] > upper_[i]) {
                throw std::invalid_argument(
                    "IntervalVector: lower > upper at coordinate " + std::to_string(i));
            }
        }
    }

    static IntervalVector from_center_radius(const Eigen::VectorXd& center,
                                             const Eigen::VectorXd& radius) {
        if (center.size() != radius.size()) {
            throw std::invalid_argument(
                "IntervalVector: center has dimension " + std::to_string(center.size()) +
                " but radius has dimension " + std::to_string(radius.size()));
        }
        if ((radius.array() < 0.0).any()) {
            throw std::invalid_argument("IntervalVector: radius must be nonnegative");
        }
        return IntervalVector(center - radius, center + radius);
    }

    // Degenerate box {point}; radius zero propagates exactly.
    static IntervalVector degenerate(const Eigen::VectorXd& point) {
        return IntervalVector(point, point);
    }

    Eigen::Index size() const { return lower_.size(); }
    const Eigen::VectorXd& lower() const { return lower_; }
    const Eigen::VectorXd& upper() const { return upper_; }

    Eigen::VectorXd center() const { return 0.5 * (upper_ + lower_); }
    Eigen::VectorXd radius() const { return 0.5 * (upper_ - lower_); }
    Eigen::VectorXd width() const { return upper_ - lower_; }

    CenterRadius center_radius() const { return {center(), radius()}; }

    bool contains(const Eigen::VectorXd& point, double tol = 0.0) const {
        return (point.array() >= lower_.array() - tol).all() &&
               (point.array() <= upper_.array() + tol).all();
    }

    bool contains(const IntervalVector& other, double tol = 0.0) const {
        return (other.lower_.array() >= lower_.array() - tol).all() &&
               (other.upper_.array() <= upper_.array() + tol).all();
    }

private:
    Eigen::VectorXd lower_;
    Eigen::VectorXd upper_;
};

// Tightest interval containing { M z' : z' in z }.
IntervalVector tightest_affine_image(const Eigen::MatrixXd& M, const IntervalVector& z);

// Tightest interval containing { M z' + N f' : z' in z, f' in f }.
IntervalVector tightest_affine_image(const Eigen::MatrixXd& M, const IntervalVector& z,
                                     const Eigen::MatrixXd& N, const IntervalVector& f);

// The 2n x 2m stacked-bounds propagation matrix lift(M) (see file header).
Eigen::MatrixXd stacked_bounds_matrix(const Eigen::MatrixXd& M);

// T_n = [I -I; I I]; maps stacked (center; radius) to stacked (lower; upper).
Eigen::MatrixXd stacked_bounds_basis(Eigen::Index n);

struct SimilarityCheck {
    Eigen::MatrixXd transformed;  // T_n^{-1} lift(M) T_n
    double residual;              // Frobenius distance to blockdiag(M, |M|)
};

// Verifies the similarity between lift(M) and blockdiag(M, |M|) numerically.
SimilarityCheck stacked_bounds_similarity(const Eigen::MatrixXd& M);

}  // namespace ivest
