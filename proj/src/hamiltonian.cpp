#include "cqed/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

namespace cqed {

SparseCd FluxElement::potential_at(double theta) const {
    const double reduced = std::remainder(theta, 2.0 * 3.14159265358979323846);
    const double cc = coeff_static + coeff_cos * std::cos(reduced);
    const double cs = coeff_sin * std::sin(reduced);
    SparseCd out = (-cc) * Gc + (-cs) * Gs;
    out.prune(0.0, 0.0);
    return out;
}

long long HamiltonianParts::full_dim() const {
    long long p = 1;
    for (int d : dims)
        p *= d;
    return p;
}

SparseCd HamiltonianParts::weighted_n(const Eigen::VectorXd& coeff) const {
    SparseCd out(full_dim(), full_dim());
    for (int j = 0; j < spec.transmon_count; ++j)
        if (coeff(j) != 0.0)
            out = out + SparseCd(coeff(j) * n_ops[j]);
    return out;
}

namespace {

std::vector<int> mode_dims(int count, int N) { return std::vector<int>(count, 2 * N + 1); }

// Position of `value` in `spec.squids` / `spec.loops` lists.
int squid_index(const CircuitSpec& spec, int node) {
    for (size_t k = 0; k < spec.squids.size(); ++k)
        if (spec.squids[k].node == node)
            return static_cast<int>(k);
    return -1;
}

} // namespace

HamiltonianParts assemble_static(const CircuitSpec& spec, const DerivedParams& derived, int N) {
    if (N < 1)
        throw Error(ErrorCode::InvalidCutoff, "charge cutoff N must be >= 1");
    const int n = spec.transmon_count;

    HamiltonianParts parts;
    parts.spec = spec;
    parts.derived = derived;
    parts.cutoff_N = N;
    parts.dims = mode_dims(n, N);

    const auto mode = single_mode_operators(N);
    const long long full = [&] {
        long long p = 1;
        for (int d : parts.dims)
            p *= d;
        return p;
    }();

    parts.n_ops.reserve(n);
    for (int i = 0; i < n; ++i)
        parts.n_ops.push_back(embed_operator(mode.n_op, i, parts.dims).matrix);

    // Charging: 4 n^T W n = sum_i 4 W_ii n_i^2 + sum_{i<j} 8 W_ij n_i n_j.
    SparseCd charging(full, full);
    for (int i = 0; i < n; ++i) {
        const Eigen::MatrixXcd n2 = mode.n_op * mode.n_op;
        charging = charging + SparseCd(4.0 * derived.W(i, i) *
                                       embed_operator(n2, i, parts.dims).matrix);
        for (int j = i + 1; j < n; ++j) {
            if (derived.W(i, j) == 0.0)
                continue;
            charging = charging + SparseCd(8.0 * derived.W(i, j) *
                embed_two_site(mode.n_op, i, mode.n_op, j, parts.dims).matrix);
        }
    }
    charging.prune(0.0, 0.0);
    parts.charging = charging;

    // Flux-free junctions. SQUID modes keep their Theta-dependent junction
    // coefficients in the flux elements instead.
    SparseCd junctions(full, full);
    for (int i = 0; i < n; ++i) {
        if (squid_index(spec, i) >= 0)
            continue;
        junctions = junctions + SparseCd((-derived.omega_J(i)) *
                                         embed_operator(mode.cos_op, i, parts.dims).matrix);
    }
    junctions.prune(0.0, 0.0);
    parts.bare_junctions = junctions;
    return parts;
}

std::vector<FluxElement> assemble_flux_dependent(const CircuitSpec& spec,
                                                 const DerivedParams& derived, int N) {
    const int n = spec.transmon_count;
    const auto dims = mode_dims(n, N);
    const auto mode = single_mode_operators(N);
    std::vector<FluxElement> out;

    for (size_t k = 0; k < spec.loops.size(); ++k) {
        const auto& loop = spec.loops[k];
        FluxElement el;
        el.flux_line = loop.flux_line;
        el.sites = {loop.node_a, loop.node_b};
        el.coeff_static = 0.0;
        el.coeff_cos = derived.loop_omega_J[k];
        el.coeff_sin = derived.loop_omega_J[k];
        auto bundle = loop_junction_term(loop.node_a, loop.node_b, dims);
        el.Gc = bundle.CC.matrix + bundle.SS.matrix;
        el.Gs = bundle.CS.matrix - bundle.SC.matrix;
        // t_D has -1/omega_C(a,b) at node_a and +1/omega_C(a,b) at node_b.
        Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
        t(loop.node_a) = -derived.inv_omega_C(loop.node_a, loop.node_b);
        t(loop.node_b) = +derived.inv_omega_C(loop.node_a, loop.node_b);
        el.rate_coeff = derived.W.transpose() * t;
        out.push_back(std::move(el));
    }

    for (size_t k = 0; k < spec.squids.size(); ++k) {
        const auto& squid = spec.squids[k];
        FluxElement el;
        el.flux_line = squid.flux_line;
        el.sites = {squid.node};
        el.coeff_static = derived.squid_omega_J[k].first;
        el.coeff_cos = derived.squid_omega_J[k].second;
        el.coeff_sin = derived.squid_omega_J[k].second;
        el.Gc = embed_operator(mode.cos_op, squid.node, dims).matrix;
        el.Gs = embed_operator(mode.sin_op, squid.node, dims).matrix;
        // t_S = (1/2) [ -1/omega_C(j,s) for j != s;
        //               sum_i 1/omega_C(i,s) (shunt included) at j = s ].
        Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
        double col_sum = 0.0;
        for (int j = 0; j < n; ++j)
            col_sum += derived.inv_omega_C(j, squid.node);
        for (int j = 0; j < n; ++j)
            t(j) = (j == squid.node) ? 0.5 * col_sum
                                     : -0.5 * derived.inv_omega_C(j, squid.node);
        el.rate_coeff = derived.W.transpose() * t;
        out.push_back(std::move(el));
    }
    return out;
}

HamiltonianParts assemble(const CircuitSpec& spec, const DerivedParams& derived, int N) {
    HamiltonianParts parts = assemble_static(spec, derived, N);
    parts.flux_elements = assemble_flux_dependent(spec, derived, N);
    for (int port : spec.drive_ports)
        parts.drive_coeff.push_back(derived.W.row(port).transpose());
    return parts;
}

SparseCd hamiltonian_at(const HamiltonianParts& parts, const FluxValues& fluxes) {
    SparseCd H = parts.charging + parts.bare_junctions;
    for (const auto& el : parts.flux_elements) {
        auto it = fluxes.find(el.flux_line);
        if (it == fluxes.end())
            throw Error(ErrorCode::MissingFlux, "no flux value for line '" + el.flux_line + "'");
        H = H + el.potential_at(it->second);
    }
    H.prune(0.0, 0.0);
    return H;
}

Eigen::MatrixXcd dense_hamiltonian_at(const HamiltonianParts& parts, const FluxValues& fluxes) {
    return Eigen::MatrixXcd(hamiltonian_at(parts, fluxes));
}

ControlOperators control_operators(const HamiltonianParts& parts) {
    ControlOperators ops;
    for (const auto& el : parts.flux_elements)
        ops.flux_rate[el.flux_line] = parts.weighted_n(el.rate_coeff);
    for (size_t k = 0; k < parts.spec.drive_ports.size(); ++k)
        ops.drive[parts.spec.drive_ports[k]] = parts.weighted_n(parts.drive_coeff[k]);
    return ops;
}

long long GroupProblem::dim() const {
    long long p = 1;
    for (int d : dims)
        p *= d;
    return p;
}

SparseCd GroupProblem::at(const FluxValues& fluxes) const {
    SparseCd H = static_part;
    for (const auto& el : flux) {
        auto it = fluxes.find(el.flux_line);
        if (it == fluxes.end())
            throw Error(ErrorCode::MissingFlux, "no flux value for line '" + el.flux_line + "'");
        const double reduced = std::remainder(it->second, 2.0 * 3.14159265358979323846);
        const double cc = el.coeff_static + el.coeff_cos * std::cos(reduced);
        const double cs = el.coeff_sin * std::sin(reduced);
        H = H + SparseCd((-cc) * el.Gc) + SparseCd((-cs) * el.Gs);
    }
    H.prune(0.0, 0.0);
    return H;
}

GroupProblem group_problem(const HamiltonianParts& parts, const std::vector<int>& members,
                           bool allow_straddle) {
    GroupProblem g;
    g.members = members;
    std::sort(g.members.begin(), g.members.end());
    const int m = static_cast<int>(g.members.size());
    for (int i : g.members)
        g.dims.push_back(parts.dims[i]);
    const auto mode = single_mode_operators(parts.cutoff_N);
    const auto& spec = parts.spec;
    const auto& derived = parts.derived;

    auto local_of = [&](int global) {
        auto it = std::find(g.members.begin(), g.members.end(), global);
        return it == g.members.end() ? -1 : static_cast<int>(it - g.members.begin());
    };

    const long long full = g.dim();
    SparseCd H(full, full);
    for (int a = 0; a < m; ++a) {
        const int i = g.members[a];
        const Eigen::MatrixXcd n2 = mode.n_op * mode.n_op;
        H = H + SparseCd(4.0 * derived.W(i, i) * embed_operator(n2, a, g.dims).matrix);
        if (squid_index(spec, i) < 0)
            H = H + SparseCd((-derived.omega_J(i)) *
                             embed_operator(mode.cos_op, a, g.dims).matrix);
        for (int b = a + 1; b < m; ++b) {
            const int j = g.members[b];
            if (derived.W(i, j) == 0.0)
                continue;
            H = H + SparseCd(8.0 * derived.W(i, j) *
                             embed_two_site(mode.n_op, a, mode.n_op, b, g.dims).matrix);
        }
        g.n_ops.push_back(embed_operator(mode.n_op, a, g.dims).matrix);
    }
    H.prune(0.0, 0.0);
    g.static_part = H;

    for (size_t k = 0; k < spec.loops.size(); ++k) {
        const auto& loop = spec.loops[k];
        const int la = local_of(loop.node_a);
        const int lb = local_of(loop.node_b);
        if (la < 0 && lb < 0)
            continue;
        if (la < 0 || lb < 0) {
            if (allow_straddle)
                continue;
            throw Error(ErrorCode::IncompleteCover,
                        "loop junction straddles a group boundary");
        }
        GroupProblem::LocalFlux lf;
        lf.flux_line = loop.flux_line;
        lf.coeff_static = 0.0;
        lf.coeff_cos = derived.loop_omega_J[k];
        lf.coeff_sin = derived.loop_omega_J[k];
        auto bundle = loop_junction_term(la, lb, g.dims);
        lf.Gc = bundle.CC.matrix + bundle.SS.matrix;
        lf.Gs = bundle.CS.matrix - bundle.SC.matrix;
        g.flux.push_back(std::move(lf));
    }
    for (size_t k = 0; k < spec.squids.size(); ++k) {
        const auto& squid = spec.squids[k];
        const int ls = local_of(squid.node);
        if (ls < 0)
            continue;
        GroupProblem::LocalFlux lf;
        lf.flux_line = squid.flux_line;
        lf.coeff_static = derived.squid_omega_J[k].first;
        lf.coeff_cos = derived.squid_omega_J[k].second;
        lf.coeff_sin = derived.squid_omega_J[k].second;
        lf.Gc = embed_operator(mode.cos_op, ls, g.dims).matrix;
        lf.Gs = embed_operator(mode.sin_op, ls, g.dims).matrix;
        g.flux.push_back(std::move(lf));
    }
    return g;
}

} // namespace cqed
