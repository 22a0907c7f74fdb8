#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "cqed/circuit.hpp"
#include "cqed/units.hpp"

// Independent brute-force constructions used as test oracles. These stay
// off the library code paths on purpose.
namespace cqed::oracles {

using Complex = std::complex<double>;

/// Charge-basis shift matrix: ones on the subdiagonal (raises the Cooper
/// pair number by one); plays the role of e^{i phi}.
inline Eigen::MatrixXcd shift_matrix(int dim) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = 0; k + 1 < dim; ++k)
        d(k + 1, k) = 1.0;
    return d;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// cos(phi_b - phi_a - theta) on a two-mode space built directly from
/// shift operators: (e^{-i theta} S_b S_a^T + h.c.) / 2 with modes ordered
/// (a, b) in the tensor product.
inline Eigen::MatrixXcd loop_cos_brute(int dim_a, int dim_b, double theta) {
    const Eigen::MatrixXcd sa = shift_matrix(dim_a);
    const Eigen::MatrixXcd sb = shift_matrix(dim_b);
    const Eigen::MatrixXcd up = kron(sa.adjoint(), sb);  // e^{-i phi_a} e^{i phi_b}
    const Eigen::MatrixXcd term = std::exp(Complex(0.0, -theta)) * up;
    return 0.5 * (term + term.adjoint());
}

/// Dense two-transmon-plus-loop Hamiltonian assembled from raw formulas,
/// independent of the library assembly path. Members (a, b) with a loop
/// junction omega_J_loop * cos(phi_b - phi_a - theta).
inline Eigen::MatrixXcd two_mode_loop_hamiltonian(double W_aa, double W_bb, double W_ab,
                                                  double omega_Ja, double omega_Jb,
                                                  double omega_J_loop, double theta, int N) {
    const int d = 2 * N + 1;
    Eigen::MatrixXcd n1 = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k)
        n1(k, k) = k - N;
    const Eigen::MatrixXcd s = shift_matrix(d);
    const Eigen::MatrixXcd cosp = 0.5 * (s + s.adjoint());
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(d, d);

    Eigen::MatrixXcd H = 4.0 * W_aa * kron(n1 * n1, eye) + 4.0 * W_bb * kron(eye, n1 * n1) +
                         8.0 * W_ab * kron(n1, n1);
    H -= omega_Ja * kron(cosp, eye);
    H -= omega_Jb * kron(eye, cosp);
    H -= omega_J_loop * loop_cos_brute(d, d, theta);
    return H;
}

inline Eigen::MatrixXcd random_unitary(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            a(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < dim; ++k) {
        const Complex d = r(k, k);
        if (std::abs(d) > 0.0)
            q.col(k) *= d / std::abs(d);
    }
    return q;
}

inline Eigen::VectorXcd haar_state(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd v(dim);
    for (int i = 0; i < dim; ++i)
        v(i) = Complex(gauss(rng), gauss(rng));
    v.normalize();
    return v;
}

} // namespace cqed::oracles
