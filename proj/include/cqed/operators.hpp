#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cqed/errors.hpp"

namespace cqed {

using Complex = std::complex<double>;
using SparseCd = Eigen::SparseMatrix<Complex>;

/// Charge-basis operators of a single transmon mode with Cooper-pair
/// cutoff N: n = diag(-N..N), cos/sin of the phase operator.
struct ModeOperators {
    int cutoff_N = 0;
    Eigen::MatrixXcd n_op;
    Eigen::MatrixXcd cos_op;
    Eigen::MatrixXcd sin_op;

    int dim() const { return 2 * cutoff_N + 1; }
};

ModeOperators single_mode_operators(int N);

/// A single- or two-site operator embedded into the tensor-product space
/// (identities elsewhere, factors ordered by ascending site index).
struct EmbeddedOperator {
    std::vector<int> dims;
    std::vector<int> sites;
    SparseCd matrix;

    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix); }
};

EmbeddedOperator embed_operator(const Eigen::MatrixXcd& op, int site,
                                const std::vector<int>& dims);

EmbeddedOperator embed_two_site(const Eigen::MatrixXcd& op_a, int site_a,
                                const Eigen::MatrixXcd& op_b, int site_b,
                                const std::vector<int>& dims);

/// The four trigonometric products of a loop junction on modes a and b,
/// combined as cos(phi_b - phi_a - theta)
///   = cos(theta) (CC + SS) + sin(theta) (CS - SC).
struct TrigBundle {
    EmbeddedOperator CC;  // cos_a cos_b
    EmbeddedOperator SS;  // sin_a sin_b
    EmbeddedOperator CS;  // cos_a sin_b
    EmbeddedOperator SC;  // sin_a cos_b

    SparseCd combined(double theta) const;
};

TrigBundle loop_junction_term(int site_a, int site_b, const std::vector<int>& dims);

} // namespace cqed
