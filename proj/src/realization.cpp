#include "ivest/realization.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ivest {

namespace {

int numerical_rank(const Eigen::VectorXd& sv, Eigen::Index rows, Eigen::Index cols, double tol) {
    if (sv.size() == 0) return 0;
    const double threshold =
        tol > 0.0 ? tol
                  : static_cast<double>(std::max(rows, cols)) *
                        std::numeric_limits<double>::epsilon() * sv(0);
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(k) > threshold) ++rank;
    }
    return rank;
}

}  // namespace

const Eigen::MatrixXd& ImpulseResponse::at(int t) const {
    if (t < 0 || t >= length()) {
        throw std::out_of_range("ImpulseResponse: index " + std::to_string(t) +
                                " outside length " + std::to_string(length()));
    }
    return blocks[static_cast<std::size_t>(t)];
}

ImpulseResponse radius_impulse_response(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                        const Eigen::VectorXd& p0, int length) {
    if (A.rows() != A.cols()) throw std::invalid_argument("radius_impulse_response: A not square");
    if (B.rows() != A.rows() || p0.size() != A.rows()) {
        throw std::invalid_argument("radius_impulse_response: B or p0 dimension mismatch");
    }
    ImpulseResponse h;
    h.blocks.reserve(static_cast<std::size_t>(length));
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(A.rows(), A.cols());
    for (int t = 0; t < length; ++t) {
        Eigen::MatrixXd block(A.rows(), B.cols() + 1);
        block << (power * B).cwiseAbs(), power.cwiseAbs() * p0;
        h.blocks.push_back(std::move(block));
        power = A * power;
    }
    return h;
}

Eigen::MatrixXd block_hankel(const ImpulseResponse& h, int i, int j, int shift) {
    if (i < 1 || j < 1) throw std::invalid_argument("block_hankel: block counts must be >= 1");
    if (i + j - 1 + shift > h.length()) {
        throw std::invalid_argument("block_hankel: needs " + std::to_string(i + j - 1 + shift) +
                                    " impulse blocks, have " + std::to_string(h.length()));
    }
    const Eigen::Index n = h.block_rows();
    const Eigen::Index m = h.block_cols();
    Eigen::MatrixXd out(i * n, j * m);
    for (int r = 0; r < i; ++r) {
        for (int c = 0; c < j; ++c) {
            out.block(r * n, c * m, n, m) = h.at(r + c + shift);
        }
    }
    return out;
}

RealizabilityResult realizability_test(const ImpulseResponse& h, int r_max, double rank_tol) {
    if (r_max < 1) throw std::invalid_argument("realizability_test: r_max must be >= 1");
    if (h.length() < 2 * r_max) {
        throw std::invalid_argument("realizability_test: needs at least 2*r_max = " +
                                    std::to_string(2 * r_max) + " impulse blocks, have " +
                                    std::to_string(h.length()));
    }

    RealizabilityResult result;
    const int k_max = std::min(r_max, (h.length() + 1) / 2);
    for (int k = 1; k <= k_max; ++k) {
        const Eigen::MatrixXd hankel = block_hankel(h, k, k);
        const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(hankel).singularValues();
        result.rank_by_size.push_back(numerical_rank(sv, hankel.rows(), hankel.cols(), rank_tol));
    }

    // Largest Hankel the data supports with k_max block rows.
    const int l_max = h.length() + 1 - k_max;
    const Eigen::MatrixXd largest = block_hankel(h, k_max, l_max);
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(largest).singularValues();
    const int full_rank = numerical_rank(sv, largest.rows(), largest.cols(), rank_tol);

    for (int k = 1; k < k_max; ++k) {
        if (result.rank_by_size[static_cast<std::size_t>(k - 1)] == full_rank) {
            result.realizable = true;
            result.rank = full_rank;
            result.stable_from = k;
            result.verified_rows = k_max;
            result.verified_cols = l_max;
            break;
        }
    }
    return result;
}

StateSpaceRealization ho_kalman(const ImpulseResponse& h, int order) {
    if (order < 0) throw std::invalid_argument("ho_kalman: order must be >= 0");
    const Eigen::Index n = h.block_rows();
    const Eigen::Index m = h.block_cols();
    const Eigen::Index n_w = m - 1;

    if (order == 0) {
        StateSpaceRealization real;
        real.A.resize(0, 0);
        real.B.resize(0, n_w);
        real.C = Eigen::MatrixXd::Zero(n, 0);
        real.initial_state.resize(0);
        return real;
    }

    // Square-ish Hankel with one extra block for the shifted factorization.
    const int blocks = h.length() / 2;
    if (blocks < 1 || h.length() < 2) {
        throw std::invalid_argument("ho_kalman: impulse response too short");
    }
    const Eigen::MatrixXd h0 = block_hankel(h, blocks, blocks);
    const Eigen::MatrixXd h1 = block_hankel(h, blocks, blocks, /*shift=*/1);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(h0, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    if (order > sv.size()) {
        throw std::invalid_argument("ho_kalman: order " + std::to_string(order) +
                                    " exceeds Hankel rank capacity " + std::to_string(sv.size()));
    }
    // Require a clear spectral gap at the requested order.
    if (order < sv.size()) {
        const double gap = sv(order - 1) / std::max(sv(order), 1e-300);
        if (gap < 1e3) {
            std::ostringstream msg;
            msg << "ho_kalman: ambiguous numerical rank at order " << order
                << " (sigma_m/sigma_{m+1} = " << gap << "); singular values:";
            for (Eigen::Index k = 0; k < sv.size() && k < 16; ++k) msg << " " << sv(k);
            throw std::runtime_error(msg.str());
        }
    }

    const Eigen::VectorXd sqrt_sv = sv.head(order).cwiseSqrt();
    const Eigen::MatrixXd observability =
        svd.matrixU().leftCols(order) * sqrt_sv.asDiagonal();                   // (n*blocks) x d
    const Eigen::MatrixXd controllability =
        sqrt_sv.asDiagonal() * svd.matrixV().leftCols(order).transpose();       // d x (m*blocks)

    const Eigen::VectorXd inv_sqrt = sqrt_sv.cwiseInverse();
    StateSpaceRealization real;
    real.dimension = order;
    real.A = inv_sqrt.asDiagonal() * svd.matrixU().leftCols(order).transpose() * h1 *
             svd.matrixV().leftCols(order) * inv_sqrt.asDiagonal();
    const Eigen::MatrixXd b_ext = controllability.leftCols(m);  // [B phi0]
    real.B = b_ext.leftCols(n_w);
    real.initial_state = b_ext.col(n_w);
    real.C = observability.topRows(n);
    real.singular_values.assign(sv.data(), sv.data() + sv.size());

    // Reconstruction residual over all available blocks.
    Eigen::MatrixXd a_power = Eigen::MatrixXd::Identity(order, order);
    double worst = 0.0;
    for (int t = 0; t < h.length(); ++t) {
        const Eigen::MatrixXd rebuilt = real.C * a_power * b_ext;
        const double rel = (rebuilt - h.at(t)).norm() / (1.0 + h.at(t).norm());
        worst = std::max(worst, rel);
        a_power = real.A * a_power;
    }
    real.max_relative_residual = worst;
    if (worst > 1e-8) {
        throw std::runtime_error(
            "ho_kalman: reconstruction residual " + std::to_string(worst) +
            " exceeds 1e-8; the impulse response is not realizable at order " +
            std::to_string(order));
    }
    return real;
}

std::vector<Eigen::VectorXd> simulate_realization(const StateSpaceRealization& real,
                                                  const std::vector<Eigen::VectorXd>& inputs,
                                                  int horizon) {
    if (static_cast<int>(inputs.size()) < horizon) {
        throw std::invalid_argument("simulate_realization: " + std::to_string(inputs.size()) +
                                    " inputs for horizon " + std::to_string(horizon));
    }
    std::vector<Eigen::VectorXd> outputs;
    outputs.reserve(static_cast<std::size_t>(horizon) + 1);
    Eigen::VectorXd phi = real.initial_state;
    outputs.push_back(real.C * phi);
    for (int t = 0; t < horizon; ++t) {
        phi = real.A * phi + real.B * inputs[static_cast<std::size_t>(t)];
        outputs.push_back(real.C * phi);
    }
    return outputs;
}

}  // namespace ivest
