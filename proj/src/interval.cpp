#include "ivest/interval.hpp"

namespace ivest {

namespace {

void check_conformant(const Eigen::MatrixXd& M, const IntervalVector& z, const char* m_name,
                      const char* z_name) {
    if (M.cols() != z.size()) {
        throw std::invalid_argument(std::string("tightest_affine_image: ") + m_name + " has " +
                                    std::to_string(M.cols()) + " columns but " + z_name +
                                    " has dimension " + std::to_string(z.size()));
    }
}

}  // namespace

IntervalVector tightest_affine_image(const Eigen::MatrixXd& M, const IntervalVector& z) {
    check_conformant(M, z, "M", "z");
    const Eigen::VectorXd c = M * z.center();
    const Eigen::VectorXd p = M.cwiseAbs() * z.radius();
    return IntervalVector(c - p, c + p);
}

IntervalVector tightest_affine_image(const Eigen::MatrixXd& M, const IntervalVector& z,
                                     const Eigen::MatrixXd& N, const IntervalVector& f) {
    check_conformant(M, z, "M", "z");
    check_conformant(N, f, "N", "f");
    if (M.rows() != N.rows()) {
        throw std::invalid_argument("tightest_affine_image: M has " + std::to_string(M.rows()) +
                                    " rows but N has " + std::to_string(N.rows()));
    }
    const Eigen::VectorXd c = M * z.center() + N * f.center();
    const Eigen::VectorXd p = M.cwiseAbs() * z.radius() + N.cwiseAbs() * f.radius();
    return IntervalVector(c - p, c + p);
}

Eigen::MatrixXd stacked_bounds_matrix(const Eigen::MatrixXd& M) {
    const Eigen::MatrixXd pos = 0.5 * (M + M.cwiseAbs());
    const Eigen::MatrixXd neg = 0.5 * (M - M.cwiseAbs());
    Eigen::MatrixXd out(2 * M.rows(), 2 * M.cols());
    out << pos, neg, neg, pos;
    return out;
}

Eigen::MatrixXd stacked_bounds_basis(Eigen::Index n) {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd t(2 * n, 2 * n);
    t << id, -id, id, id;
    return t;
}

SimilarityCheck stacked_bounds_similarity(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) {
        throw std::invalid_argument("stacked_bounds_similarity: M must be square");
    }
    const Eigen::Index n = M.rows();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    // T_n^{-1} = 0.5 [I I; -I I]
    Eigen::MatrixXd t_inv(2 * n, 2 * n);
    t_inv << 0.5 * id, 0.5 * id, -0.5 * id, 0.5 * id;

    const Eigen::MatrixXd transformed = t_inv * stacked_bounds_matrix(M) * stacked_bounds_basis(n);

    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    expected.topLeftCorner(n, n) = M;
    expected.bottomRightCorner(n, n) = M.cwiseAbs();

    return {transformed, (transformed - expected).norm()};
}

}  // namespace ivest
