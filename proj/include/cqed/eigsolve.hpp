#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "cqed/operators.hpp"

namespace cqed {

struct EigenResult {
    Eigen::VectorXd values;    // ascending
    Eigen::MatrixXcd vectors;  // column-orthonormal
};

struct EigenOptions {
    int dense_threshold = 8192;
    double residual_tol = 1e-8;  // relative to the spectral scale
    int max_basis = 0;           // 0: choose automatically
    uint64_t seed = 0x5eedC0DEull;
};

using MatVec = std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

/// Lowest `count` eigenpairs of a dense Hermitian matrix.
EigenResult lowest_eigenpairs(const Eigen::MatrixXcd& H, int count);

/// Dense below opts.dense_threshold, Lanczos above.
EigenResult lowest_eigenpairs(const SparseCd& H, int count, const EigenOptions& opts = {});

/// Lanczos with full reorthogonalization on a matrix-free operator.
EigenResult lanczos_lowest(const MatVec& apply, long long dim, int count,
                           const EigenOptions& opts = {});

} // namespace cqed
