// LTI realization of the open-loop radius dynamics.
//
// The tight radius p_x(t) = |A^t| p_x(0) + sum_k |A^{t-1-k} B| p_w(k) is the
// output of a convolution with kernel H(t) = [ |A^t B|  |A^t| p_x(0) ]. When
// the block Hankel matrix built from H has finite stabilizing rank m, that
// convolution admits an m-dimensional state-space realization
//
//   phi(t+1) = Ar phi(t) + Br p_w(t),   p_x(t) = Cr phi(t),   phi(0) = phi0,
//
// recovered here by SVD factorization of the Hankel matrix (Ho-Kalman). Rank
// stabilization can only be checked up to the available data; the result
// records how far it was verified.

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace ivest {

struct ImpulseResponse {
    std::vector<Eigen::MatrixXd> blocks;  // H(t), each n x (n_w + 1), entries >= 0

    int length() const { return static_cast<int>(blocks.size()); }
    Eigen::Index block_rows() const { return blocks.empty() ? 0 : blocks.front().rows(); }
    Eigen::Index block_cols() const { return blocks.empty() ? 0 : blocks.front().cols(); }

    const Eigen::MatrixXd& at(int t) const;
};

// H(t) = [ |A^t B|  |A^t| p0 ] for t = 0..length-1.
ImpulseResponse radius_impulse_response(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                        const Eigen::VectorXd& p0, int length);

// Block Hankel with block (r, c) = H(r + c - 2 + shift), 1-indexed blocks.
Eigen::MatrixXd block_hankel(const ImpulseResponse& h, int i, int j, int shift = 0);

struct RealizabilityResult {
    bool realizable = false;
    int rank = -1;                 // stabilized rank m when realizable
    int stable_from = -1;          // smallest k with rank(H_{k,k}) = m
    int verified_rows = -1;        // largest Hankel shape checked against m
    int verified_cols = -1;
    std::vector<int> rank_by_size;  // rank of H_{k,k}, k = 1..
};

// Finite-data rank stabilization check. Hankel rank is monotone in the block
// shape, so rank(H_{k,k}) equal to the rank of the largest Hankel the data
// supports certifies every intermediate shape. A finite window can only be a
// strong heuristic for the unbounded-extension condition.
RealizabilityResult realizability_test(const ImpulseResponse& h, int r_max,
                                       double rank_tol = -1.0);

struct StateSpaceRealization {
    Eigen::MatrixXd A;             // d x d
    Eigen::MatrixXd B;             // d x n_w
    Eigen::MatrixXd C;             // n x d
    Eigen::VectorXd initial_state; // phi0, d
    int dimension = 0;
    double max_relative_residual = 0.0;  // reconstruction error over the data
    std::vector<double> singular_values;
};

// Balanced SVD realization of the given order. Throws when the singular-value
// spectrum gives no clear rank-m gap, or when the reconstruction residual
// exceeds 1e-8 relative on any available block.
StateSpaceRealization ho_kalman(const ImpulseResponse& h, int order);

// Runs phi(t+1) = Ar phi(t) + Br u(t), out(t) = Cr phi(t) from phi0.
std::vector<Eigen::VectorXd> simulate_realization(const StateSpaceRealization& real,
                                                  const std::vector<Eigen::VectorXd>& inputs,
                                                  int horizon);

}  // namespace ivest
