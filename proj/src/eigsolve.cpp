#include "cqed/eigsolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace cqed {

EigenResult lowest_eigenpairs(const Eigen::MatrixXcd& H, int count) {
    if (count < 1 || count > H.rows())
        throw Error(ErrorCode::InvalidCutoff, "requested eigenpair count out of range");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::EigensolveFailure, "dense Hermitian eigensolve failed");
    EigenResult out;
    out.values = solver.eigenvalues().head(count);
    out.vectors = solver.eigenvectors().leftCols(count);
    return out;
}

EigenResult lowest_eigenpairs(const SparseCd& H, int count, const EigenOptions& opts) {
    const long long dim = H.rows();
    if (dim <= opts.dense_threshold)
        return lowest_eigenpairs(Eigen::MatrixXcd(H), count);
    MatVec apply = [&H](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y.noalias() = H * x; };
    return lanczos_lowest(apply, dim, count, opts);
}

EigenResult lanczos_lowest(const MatVec& apply, long long dim, int count,
                           const EigenOptions& opts) {
    if (count < 1 || count > dim)
        throw Error(ErrorCode::InvalidCutoff, "requested eigenpair count out of range");

    const int max_basis = opts.max_basis > 0
        ? opts.max_basis
        : static_cast<int>(std::min<long long>(dim, std::max(2 * count + 80, 160)));

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Eigen::MatrixXcd V(dim, max_basis + 1);
    std::vector<double> alpha, beta;
    alpha.reserve(max_basis);
    beta.reserve(max_basis);

    Eigen::VectorXcd v(dim);
    for (long long i = 0; i < dim; ++i)
        v(i) = Complex(gauss(rng), gauss(rng));
    v.normalize();
    V.col(0) = v;

    Eigen::VectorXcd w(dim);
    double spectral_scale = 0.0;
    Eigen::MatrixXd tri_vectors;
    Eigen::VectorXd tri_values;
    int m = 0;

    auto solve_tridiagonal = [&](int size) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(size, size);
        for (int i = 0; i < size; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < size) {
                T(i, i + 1) = beta[i];
                T(i + 1, i) = beta[i];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        tri_values = es.eigenvalues();
        tri_vectors = es.eigenvectors();
        spectral_scale = std::max(std::abs(tri_values(0)), std::abs(tri_values(size - 1)));
    };

    bool converged = false;
    while (m < max_basis) {
        apply(V.col(m), w);
        if (m > 0)
            w -= beta[m - 1] * V.col(m - 1);
        double a = std::real(V.col(m).dot(w));
        w -= a * V.col(m);
        // Full reorthogonalization, twice.
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXcd proj = V.leftCols(m + 1).adjoint() * w;
            w.noalias() -= V.leftCols(m + 1) * proj;
        }
        alpha.push_back(a);
        double b = w.norm();
        if (b < 1e-14) {
            // Invariant subspace found; restart with a fresh random direction.
            for (long long i = 0; i < dim; ++i)
                w(i) = Complex(gauss(rng), gauss(rng));
            for (int pass = 0; pass < 2; ++pass) {
                Eigen::VectorXcd proj = V.leftCols(m + 1).adjoint() * w;
                w.noalias() -= V.leftCols(m + 1) * proj;
            }
            b = w.norm();
            if (b < 1e-14)
                break;  // space exhausted
        }
        beta.push_back(b);
        V.col(m + 1) = w / b;
        ++m;

        if (m >= count + 2 && (m % 20 == 0 || m == max_basis)) {
            solve_tridiagonal(m);
            bool all_ok = true;
            const double tol_abs = opts.residual_tol * std::max(spectral_scale, 1e-30);
            for (int k = 0; k < count; ++k) {
                const double resid = std::abs(beta[m - 1] * tri_vectors(m - 1, k));
                if (resid > tol_abs) {
                    all_ok = false;
                    break;
                }
            }
            if (all_ok) {
                converged = true;
                break;
            }
        }
    }

    if (alpha.empty())
        throw Error(ErrorCode::EigensolveFailure, "Lanczos failed to build a basis");
    if (!converged) {
        solve_tridiagonal(m);
        const double tol_abs = opts.residual_tol * std::max(spectral_scale, 1e-30);
        for (int k = 0; k < count; ++k)
            if (std::abs(beta.empty() ? 0.0 : beta[m - 1] * tri_vectors(m - 1, k)) > tol_abs)
                throw Error(ErrorCode::EigensolveFailure,
                            "Lanczos did not converge within the basis budget");
    }

    EigenResult out;
    out.values = tri_values.head(count);
    out.vectors.resize(dim, count);
    out.vectors.noalias() =
        V.leftCols(m) * tri_vectors.leftCols(count).cast<Complex>();
    for (int k = 0; k < count; ++k)
        out.vectors.col(k).normalize();
    return out;
}

} // namespace cqed
