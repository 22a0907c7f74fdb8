#include "cqed/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Cholesky>

#include "cqed/units.hpp"

namespace cqed {

bool CircuitSpec::is_qubit(int i) const {
    return std::find(qubit_indices.begin(), qubit_indices.end(), i) != qubit_indices.end();
}

bool CircuitSpec::is_coupler(int i) const {
    return std::find(coupler_indices.begin(), coupler_indices.end(), i) != coupler_indices.end();
}

namespace {

void add(std::vector<Diagnostic>& out, std::string code, std::string msg) {
    out.push_back({std::move(code), std::move(msg)});
}

std::string ij(int i, int j) {
    std::ostringstream os;
    os << "(" << i + 1 << "," << j + 1 << ")";
    return os.str();
}

} // namespace

std::vector<Diagnostic> validate_spec(const CircuitSpec& spec) {
    std::vector<Diagnostic> out;
    const int n = spec.transmon_count;
    if (n < 1) {
        add(out, "EmptyCircuit", "transmon_count must be >= 1");
        return out;
    }
    if (spec.cap_matrix_fF.rows() != n || spec.cap_matrix_fF.cols() != n)
        add(out, "CapacitanceShape", "cap_matrix must be transmon_count x transmon_count");
    if (spec.bare_freqs_GHz.size() != n)
        add(out, "FrequencyCount", "bare_freqs must have one entry per transmon");
    if (!out.empty())
        return out;  // shape errors make the remaining checks meaningless

    for (int i = 0; i < n; ++i) {
        if (spec.cap_matrix_fF(i, i) <= 0.0)
            add(out, "NonPositiveShunt", "C_" + ij(i, i) + " must be > 0");
        if (spec.bare_freqs_GHz(i) <= 0.0)
            add(out, "NonPositiveFrequency", "omega_" + std::to_string(i + 1) + " must be > 0");
        for (int j = i + 1; j < n; ++j) {
            if (spec.cap_matrix_fF(i, j) != spec.cap_matrix_fF(j, i))
                add(out, "AsymmetricCapacitance", "C_" + ij(i, j) + " != C_" + ij(j, i));
            if (spec.cap_matrix_fF(i, j) < 0.0)
                add(out, "NegativeCoupling", "C_" + ij(i, j) + " must be >= 0");
        }
    }

    std::set<int> qubits(spec.qubit_indices.begin(), spec.qubit_indices.end());
    std::set<int> couplers(spec.coupler_indices.begin(), spec.coupler_indices.end());
    for (int q : qubits)
        if (couplers.count(q))
            add(out, "IndexSetsOverlap", "transmon " + std::to_string(q + 1) + " is both qubit and coupler");
    if (static_cast<int>(qubits.size() + couplers.size()) != n)
        add(out, "IndexSetsIncomplete", "qubit and coupler sets must partition the transmons");
    for (int q : qubits)
        if (q < 0 || q >= n)
            add(out, "IndexOutOfRange", "qubit index " + std::to_string(q + 1));
    for (int c : couplers)
        if (c < 0 || c >= n)
            add(out, "IndexOutOfRange", "coupler index " + std::to_string(c + 1));

    std::set<int> loop_members;
    for (const auto& loop : spec.loops) {
        if (loop.node_a < 0 || loop.node_a >= n || loop.node_b < 0 || loop.node_b >= n) {
            add(out, "IndexOutOfRange", "loop nodes " + ij(loop.node_a, loop.node_b));
            continue;
        }
        if (loop.node_a == loop.node_b)
            add(out, "LoopNodesEqual", "loop nodes must be distinct");
        for (int node : {loop.node_a, loop.node_b}) {
            if (qubits.count(node))
                add(out, "LoopOnQubit", "loop references qubit " + std::to_string(node + 1));
            if (!loop_members.insert(node).second)
                add(out, "OverlappingLoops", "transmon " + std::to_string(node + 1) + " in two loops");
        }
        if (!(loop.ratio_rJ > 0.0 && loop.ratio_rJ < 1.0))
            add(out, "BadJunctionRatio", "r_J must satisfy 0 < r_J < 1");
        if (loop.flux_line.empty())
            add(out, "MissingFluxLine", "loop has no flux line id");
    }
    for (const auto& squid : spec.squids) {
        if (squid.node < 0 || squid.node >= n) {
            add(out, "IndexOutOfRange", "squid node " + std::to_string(squid.node + 1));
            continue;
        }
        if (qubits.count(squid.node))
            add(out, "SquidOnQubit", "squid references qubit " + std::to_string(squid.node + 1));
        if (loop_members.count(squid.node))
            add(out, "OverlappingLoops", "transmon " + std::to_string(squid.node + 1) + " in loop and squid");
        if (!(squid.asymmetry > 0.0))
            add(out, "BadSquidAsymmetry", "asymmetry must be > 0");
        if (squid.flux_line.empty())
            add(out, "MissingFluxLine", "squid has no flux line id");
    }
    for (int p : spec.drive_ports)
        if (p < 0 || p >= n)
            add(out, "IndexOutOfRange", "drive port " + std::to_string(p + 1));
    return out;
}

void require_valid(const CircuitSpec& spec) {
    auto diags = validate_spec(spec);
    if (diags.empty())
        return;
    std::ostringstream os;
    os << "invalid circuit spec:";
    for (const auto& d : diags)
        os << "\n  [" << d.code << "] " << d.message;
    throw Error(ErrorCode::InvalidArgument, os.str());
}

Eigen::MatrixXd build_capacitance_matrix(const CircuitSpec& spec) {
    const int n = spec.transmon_count;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j)
            row_sum += spec.cap_matrix_fF(i, j);
        M(i, i) = row_sum;
        for (int j = 0; j < n; ++j)
            if (j != i)
                M(i, j) = -spec.cap_matrix_fF(i, j);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::NonPositiveDefinite, "capacitance matrix is not positive definite");
    return M;
}

Eigen::MatrixXd derive_energy_matrix(const Eigen::MatrixXd& M_fF) {
    Eigen::LLT<Eigen::MatrixXd> llt(M_fF);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::SingularMatrix, "capacitance matrix not invertible (not SPD)");
    const int n = static_cast<int>(M_fF.rows());
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd W = units::charging_rate_coeff * 0.5 * (inv + inv.transpose());
    return W;
}

DerivedParams derive_junctions(const CircuitSpec& spec, const Eigen::MatrixXd& W) {
    const int n = spec.transmon_count;
    DerivedParams out;
    out.W = W;

    out.omega_J.resize(n);
    out.I_c_nA.resize(n);
    for (int i = 0; i < n; ++i) {
        const double w_i = units::ghz_to_radns(spec.bare_freqs_GHz(i));
        const double W_ii = W(i, i);
        out.omega_J(i) = (w_i + W_ii) * (w_i + W_ii) / (8.0 * W_ii);
        out.I_c_nA(i) = units::critical_current_nA(out.omega_J(i));
    }

    out.g = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double w_i = units::ghz_to_radns(spec.bare_freqs_GHz(i));
        for (int j = i + 1; j < n; ++j) {
            const double w_j = units::ghz_to_radns(spec.bare_freqs_GHz(j));
            const double gij = 0.5 * W(i, j) *
                std::sqrt((w_i + W(i, i)) * (w_j + W(j, j)) / (W(i, i) * W(j, j)));
            out.g(i, j) = gij;
            out.g(j, i) = gij;
        }
    }

    for (const auto& loop : spec.loops) {
        const double mean = 0.5 * (out.omega_J(loop.node_a) + out.omega_J(loop.node_b));
        out.loop_omega_J.push_back(loop.ratio_rJ * mean);
        out.loop_I_c_nA.push_back(units::critical_current_nA(loop.ratio_rJ * mean));
    }
    for (const auto& squid : spec.squids) {
        // omega_JA + omega_JB = omega_J with omega_JB/omega_JA = asymmetry.
        const double total = out.omega_J(squid.node);
        const double a_part = total / (1.0 + squid.asymmetry);
        out.squid_omega_J.emplace_back(a_part, total - a_part);
    }

    out.inv_omega_C = spec.cap_matrix_fF / units::charging_rate_coeff;
    return out;
}

DerivedParams derive_all(const CircuitSpec& spec) {
    require_valid(spec);
    return derive_junctions(spec, derive_energy_matrix(build_capacitance_matrix(spec)));
}

} // namespace cqed
