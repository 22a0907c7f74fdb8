#include "cqed/operators.hpp"

#include <cmath>

namespace cqed {

ModeOperators single_mode_operators(int N) {
    if (N < 1)
        throw Error(ErrorCode::InvalidCutoff, "charge cutoff N must be >= 1");
    const int d = 2 * N + 1;
    ModeOperators ops;
    ops.cutoff_N = N;
    ops.n_op = Eigen::MatrixXcd::Zero(d, d);
    ops.cos_op = Eigen::MatrixXcd::Zero(d, d);
    ops.sin_op = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k)
        ops.n_op(k, k) = static_cast<double>(k - N);
    // cos = (1/2) on both off-diagonals; sin = (1/2i) with -1 above and
    // +1 below the diagonal.
    for (int k = 0; k + 1 < d; ++k) {
        ops.cos_op(k, k + 1) = Complex(0.5, 0.0);
        ops.cos_op(k + 1, k) = Complex(0.5, 0.0);
        ops.sin_op(k, k + 1) = Complex(0.0, 0.5);
        ops.sin_op(k + 1, k) = Complex(0.0, -0.5);
    }
    return ops;
}

namespace {

long long product_dim(const std::vector<int>& dims) {
    long long p = 1;
    for (int d : dims)
        p *= d;
    return p;
}

void check_site(int site, const std::vector<int>& dims) {
    if (site < 0 || site >= static_cast<int>(dims.size()))
        throw Error(ErrorCode::DimensionMismatch, "site index outside dims");
}

} // namespace

EmbeddedOperator embed_operator(const Eigen::MatrixXcd& op, int site,
                                const std::vector<int>& dims) {
    check_site(site, dims);
    const int ds = dims[site];
    if (op.rows() != ds || op.cols() != ds)
        throw Error(ErrorCode::DimensionMismatch, "operator dimension does not match dims[site]");

    long long pre = 1, post = 1;
    for (int k = 0; k < site; ++k)
        pre *= dims[k];
    for (int k = site + 1; k < static_cast<int>(dims.size()); ++k)
        post *= dims[k];
    const long long full = pre * ds * post;

    std::vector<Eigen::Triplet<Complex>> trips;
    for (int r = 0; r < ds; ++r)
        for (int c = 0; c < ds; ++c) {
            const Complex v = op(r, c);
            if (v == Complex(0.0, 0.0))
                continue;
            for (long long p = 0; p < pre; ++p)
                for (long long q = 0; q < post; ++q) {
                    const long long row = (p * ds + r) * post + q;
                    const long long col = (p * ds + c) * post + q;
                    trips.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
                }
        }

    EmbeddedOperator out;
    out.dims = dims;
    out.sites = {site};
    out.matrix = SparseCd(full, full);
    out.matrix.setFromTriplets(trips.begin(), trips.end());
    return out;
}

EmbeddedOperator embed_two_site(const Eigen::MatrixXcd& op_a, int site_a,
                                const Eigen::MatrixXcd& op_b, int site_b,
                                const std::vector<int>& dims) {
    check_site(site_a, dims);
    check_site(site_b, dims);
    if (site_a == site_b)
        throw Error(ErrorCode::DimensionMismatch, "two-site embedding requires distinct sites");
    // Normalize so s1 < s2, carrying the operators with their sites.
    int s1 = site_a, s2 = site_b;
    const Eigen::MatrixXcd* o1 = &op_a;
    const Eigen::MatrixXcd* o2 = &op_b;
    if (s1 > s2) {
        std::swap(s1, s2);
        std::swap(o1, o2);
    }
    const int d1 = dims[s1], d2 = dims[s2];
    if (o1->rows() != d1 || o1->cols() != d1 || o2->rows() != d2 || o2->cols() != d2)
        throw Error(ErrorCode::DimensionMismatch, "operator dimensions do not match dims at sites");

    long long pre = 1, mid = 1, post = 1;
    for (int k = 0; k < s1; ++k)
        pre *= dims[k];
    for (int k = s1 + 1; k < s2; ++k)
        mid *= dims[k];
    for (int k = s2 + 1; k < static_cast<int>(dims.size()); ++k)
        post *= dims[k];
    const long long full = product_dim(dims);

    std::vector<Eigen::Triplet<Complex>> trips;
    for (int r1 = 0; r1 < d1; ++r1)
        for (int c1 = 0; c1 < d1; ++c1) {
            const Complex v1 = (*o1)(r1, c1);
            if (v1 == Complex(0.0, 0.0))
                continue;
            for (int r2 = 0; r2 < d2; ++r2)
                for (int c2 = 0; c2 < d2; ++c2) {
                    const Complex v = v1 * (*o2)(r2, c2);
                    if (v == Complex(0.0, 0.0))
                        continue;
                    for (long long p = 0; p < pre; ++p)
                        for (long long m = 0; m < mid; ++m)
                            for (long long q = 0; q < post; ++q) {
                                const long long row = (((p * d1 + r1) * mid + m) * d2 + r2) * post + q;
                                const long long col = (((p * d1 + c1) * mid + m) * d2 + c2) * post + q;
                                trips.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
                            }
                }
        }

    EmbeddedOperator out;
    out.dims = dims;
    out.sites = {site_a, site_b};
    out.matrix = SparseCd(full, full);
    out.matrix.setFromTriplets(trips.begin(), trips.end());
    return out;
}

SparseCd TrigBundle::combined(double theta) const {
    // Exact 2pi periodicity: IEEE remainder is exact, so theta and
    // theta + 2pi evaluate identically.
    const double reduced = std::remainder(theta, 2.0 * 3.14159265358979323846);
    const double c = std::cos(reduced);
    const double s = std::sin(reduced);
    SparseCd out = c * (CC.matrix + SS.matrix) + s * (CS.matrix - SC.matrix);
    out.prune(0.0, 0.0);
    return out;
}

TrigBundle loop_junction_term(int site_a, int site_b, const std::vector<int>& dims) {
    check_site(site_a, dims);
    check_site(site_b, dims);
    if (site_a == site_b)
        throw Error(ErrorCode::DimensionMismatch, "loop junction requires two distinct modes");
    const auto mode_a = single_mode_operators((dims[site_a] - 1) / 2);
    const auto mode_b = single_mode_operators((dims[site_b] - 1) / 2);
    if (mode_a.dim() != dims[site_a] || mode_b.dim() != dims[site_b])
        throw Error(ErrorCode::DimensionMismatch, "dims must be odd charge-basis dimensions");

    TrigBundle bundle;
    bundle.CC = embed_two_site(mode_a.cos_op, site_a, mode_b.cos_op, site_b, dims);
    bundle.SS = embed_two_site(mode_a.sin_op, site_a, mode_b.sin_op, site_b, dims);
    bundle.CS = embed_two_site(mode_a.cos_op, site_a, mode_b.sin_op, site_b, dims);
    bundle.SC = embed_two_site(mode_a.sin_op, site_a, mode_b.cos_op, site_b, dims);
    return bundle;
}

} // namespace cqed
