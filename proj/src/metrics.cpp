#include "cqed/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace cqed {

namespace {

using Complex = std::complex<double>;

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigen::MatrixXcd pz(const Eigen::VectorXd& psi) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int q = 0; q < psi.size(); ++q) {
        Eigen::MatrixXcd z(2, 2);
        z << 1.0, 0.0, 0.0, std::exp(Complex(0.0, -psi(q)));
        out = kron(out, z);
    }
    return out;
}

double arg_checked(Complex v, const char* what) {
    if (std::abs(v) < 1e-12)
        throw Error(ErrorCode::UndefinedArg,
                    std::string("phase extraction entry is numerically dead: ") + what);
    return std::arg(v);
}

int bit_index(int qubit, int n_qubits) { return 1 << (n_qubits - 1 - qubit); }

} // namespace

Eigen::MatrixXcd ideal_gate(GateKind kind, const std::vector<int>& acting, int n_qubits) {
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(2, 2);
    if (kind == GateKind::CZ) {
        if (acting.size() != 2)
            throw Error(ErrorCode::InvalidArgument, "CZ acts on exactly two qubits");
        const int d = 1 << n_qubits;
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(d, d);
        const int ba = bit_index(acting[0], n_qubits);
        const int bb = bit_index(acting[1], n_qubits);
        for (int s = 0; s < d; ++s)
            if ((s & ba) && (s & bb))
                out(s, s) = -1.0;
        return out;
    }
    if (acting.size() != 1)
        throw Error(ErrorCode::InvalidArgument, "pi/2 pulse acts on exactly one qubit");
    Eigen::MatrixXcd u(2, 2);
    u << 1.0, -1.0, 1.0, 1.0;
    u /= std::sqrt(2.0);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int q = 0; q < n_qubits; ++q)
        out = kron(out, q == acting[0] ? u : eye);
    return out;
}

Eigen::MatrixXcd fix_global_phase(const Eigen::MatrixXcd& u_raw) {
    const Complex anchor = u_raw(0, 0);
    if (std::abs(anchor) < 1e-12)
        throw Error(ErrorCode::ZeroAnchor, "ground-state overlap vanished; gate failed grossly");
    return (std::conj(anchor) / std::abs(anchor)) * u_raw;
}

Calibration calibrate_phases(const Eigen::MatrixXcd& u_prime, GateKind kind,
                             const std::vector<int>& acting, int n_qubits) {
    const int d = 1 << n_qubits;
    if (u_prime.rows() != d || u_prime.cols() != d)
        throw Error(ErrorCode::DimensionMismatch, "u' dimension does not match qubit count");

    Calibration cal;
    cal.psi = Eigen::VectorXd::Zero(n_qubits);
    cal.psi_prime = Eigen::VectorXd::Zero(n_qubits);

    for (int q = 0; q < n_qubits; ++q) {
        const int s = bit_index(q, n_qubits);
        cal.psi(q) = arg_checked(u_prime(s, s), "u'[e_q][e_q]");
    }
    if (kind == GateKind::PiHalf) {
        const int q = acting[0];
        const int s = bit_index(q, n_qubits);
        const double phi_a = arg_checked(-u_prime(0, s), "-u'[0][e_q]");
        cal.psi(q) -= phi_a;
        cal.psi_prime(q) = -phi_a;
    }
    cal.U = pz(cal.psi) * u_prime * pz(cal.psi_prime).adjoint();
    return cal;
}

double average_gate_fidelity(const Eigen::MatrixXcd& U_id, const Eigen::MatrixXcd& U_prime) {
    if (U_id.rows() != U_prime.rows() || U_id.cols() != U_prime.cols() ||
        U_id.rows() != U_id.cols())
        throw Error(ErrorCode::DimensionMismatch, "gate matrices must be square and equal-sized");
    const double d = static_cast<double>(U_id.rows());
    const Complex tr = (U_id.adjoint() * U_prime).trace();
    const double tr2 = (U_prime.adjoint() * U_prime).trace().real();
    return (std::norm(tr) + tr2) / (d * (d + 1.0));
}

GateDiagnostics diagnostics(const Eigen::MatrixXcd& U_prime,
                            const std::vector<double>& leakage,
                            const std::vector<int>& acting, int n_qubits,
                            double transition_threshold) {
    GateDiagnostics out;
    const int d = static_cast<int>(U_prime.rows());
    out.column_leakage = leakage;

    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            if (r == c)
                continue;
            const double mag = std::abs(U_prime(r, c));
            out.max_offdiagonal = std::max(out.max_offdiagonal, mag);
            if (mag > transition_threshold)
                out.large_transitions.push_back(
                    {static_cast<double>(r), static_cast<double>(c), mag});
        }
    if (!out.large_transitions.empty())
        out.flags.push_back("transition elements above " +
                            std::to_string(transition_threshold));

    // Spectator rotations from the {0, e_i} sub-blocks.
    for (int q = 0; q < n_qubits; ++q) {
        if (std::find(acting.begin(), acting.end(), q) != acting.end())
            continue;
        const int s = bit_index(q, n_qubits);
        Eigen::Matrix2cd block;
        block << U_prime(0, 0), U_prime(0, s), U_prime(s, 0), U_prime(s, s);
        Eigen::JacobiSVD<Eigen::Matrix2cd> svd(block);
        const double scale = svd.singularValues()(0);
        if (scale < 1e-12) {
            out.spectator_rotation[q] = 0.0;
            continue;
        }
        const double off =
            0.5 * (std::abs(block(0, 1)) + std::abs(block(1, 0))) / scale;
        out.spectator_rotation[q] = 2.0 * std::asin(std::min(1.0, off));
    }
    return out;
}

GateReport make_gate_report(const Eigen::MatrixXcd& u_raw, GateKind kind,
                            const std::vector<int>& acting, int n_qubits,
                            const std::vector<double>& leakage) {
    GateReport report;
    report.u_raw = u_raw;
    report.u_prime = fix_global_phase(u_raw);
    report.calibration = calibrate_phases(report.u_prime, kind, acting, n_qubits);
    report.U_prime = report.calibration.U;
    report.fidelity =
        average_gate_fidelity(ideal_gate(kind, acting, n_qubits), report.U_prime);
    report.diag = diagnostics(report.U_prime, leakage, acting, n_qubits);
    return report;
}

} // namespace cqed
