#include "cqed/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cqed/units.hpp"

namespace cqed {

namespace {

void check_keys(const Json& j, const std::string& where,
                const std::set<std::string>& allowed) {
    if (!j.is_object())
        throw Error(ErrorCode::ParseError, where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (allowed.count(key))
            continue;
        // A known quantity spelled without its unit suffix gets the more
        // specific error.
        for (const auto& a : allowed)
            if (a.rfind(key + "_", 0) == 0)
                throw Error(ErrorCode::MissingUnits,
                            where + ": key '" + key + "' is missing its unit suffix ('" +
                                a + "')");
        throw Error(ErrorCode::UnknownKey, where + ": unknown key '" + key + "'");
    }
}

double require_number(const Json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw Error(ErrorCode::ParseError, where + ": missing numeric key '" + key + "'");
    return j.at(key).get<double>();
}

} // namespace

CircuitSpec circuit_from_json(const Json& j) {
    check_keys(j, "circuit", {"transmons", "capacitances", "loops", "squids", "drives"});
    if (!j.contains("transmons") || !j.at("transmons").is_array())
        throw Error(ErrorCode::ParseError, "circuit: 'transmons' array required");

    CircuitSpec spec;
    const auto& transmons = j.at("transmons");
    spec.transmon_count = static_cast<int>(transmons.size());
    spec.bare_freqs_GHz.resize(spec.transmon_count);
    spec.cap_matrix_fF = Eigen::MatrixXd::Zero(spec.transmon_count, spec.transmon_count);

    std::set<int> seen;
    for (const auto& t : transmons) {
        check_keys(t, "transmon", {"index", "role", "frequency_GHz"});
        const int idx = static_cast<int>(require_number(t, "index", "transmon")) - 1;
        if (idx < 0 || idx >= spec.transmon_count || !seen.insert(idx).second)
            throw Error(ErrorCode::ParseError, "transmon indices must be 1..count, unique");
        spec.bare_freqs_GHz(idx) = require_number(t, "frequency_GHz", "transmon");
        const std::string role = t.value("role", "");
        if (role == "qubit")
            spec.qubit_indices.push_back(idx);
        else if (role == "coupler")
            spec.coupler_indices.push_back(idx);
        else
            throw Error(ErrorCode::ParseError, "transmon role must be 'qubit' or 'coupler'");
    }

    if (j.contains("capacitances")) {
        for (const auto& entry : j.at("capacitances")) {
            if (!entry.is_array() || entry.size() != 3)
                throw Error(ErrorCode::ParseError,
                            "capacitances entries must be [i, j, fF] triples");
            const int a = entry.at(0).get<int>() - 1;
            const int b = entry.at(1).get<int>() - 1;
            const double c = entry.at(2).get<double>();
            if (a < 0 || a >= spec.transmon_count || b < 0 || b >= spec.transmon_count)
                throw Error(ErrorCode::ParseError, "capacitance index out of range");
            spec.cap_matrix_fF(a, b) = c;
            spec.cap_matrix_fF(b, a) = c;
        }
    }
    if (j.contains("loops")) {
        for (const auto& l : j.at("loops")) {
            check_keys(l, "loop", {"nodes", "junction_ratio", "flux_line"});
            LoopSpec loop;
            const auto& nodes = l.at("nodes");
            if (!nodes.is_array() || nodes.size() != 2)
                throw Error(ErrorCode::ParseError, "loop 'nodes' must be a pair");
            loop.node_a = nodes.at(0).get<int>() - 1;
            loop.node_b = nodes.at(1).get<int>() - 1;
            loop.ratio_rJ = require_number(l, "junction_ratio", "loop");
            loop.flux_line = l.value("flux_line", "");
            spec.loops.push_back(loop);
        }
    }
    if (j.contains("squids")) {
        for (const auto& s : j.at("squids")) {
            check_keys(s, "squid", {"node", "asymmetry", "flux_line"});
            SquidSpec squid;
            squid.node = static_cast<int>(require_number(s, "node", "squid")) - 1;
            squid.asymmetry = require_number(s, "asymmetry", "squid");
            squid.flux_line = s.value("flux_line", "");
            spec.squids.push_back(squid);
        }
    }
    if (j.contains("drives"))
        for (const auto& d : j.at("drives"))
            spec.drive_ports.push_back(d.get<int>() - 1);
    return spec;
}

namespace {

FluxValues flux_map_from(const Json& j, const std::string& where) {
    FluxValues out;
    if (!j.is_object())
        throw Error(ErrorCode::ParseError, where + " must map flux lines to numbers");
    for (const auto& [line, value] : j.items()) {
        if (!value.is_number())
            throw Error(ErrorCode::ParseError, where + ": value for '" + line +
                                                   "' must be a number");
        out[line] = value.get<double>() * units::pi;
    }
    return out;
}

} // namespace

JobConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw Error(ErrorCode::ParseError, "cannot open config '" + path + "'");
    Json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("config JSON: ") + e.what());
    }

    check_keys(j, "config",
               {"circuit", "job", "cutoffs", "flux", "frames", "gate", "propagation",
                "optimizer", "convergence", "seed", "threads", "output_dir", "cache_dir"});

    JobConfig cfg;
    if (!j.contains("job") || !j.at("job").is_string())
        throw Error(ErrorCode::ParseError, "config: 'job' string required");
    cfg.job = j.at("job").get<std::string>();

    Json circuit_json;
    if (!j.contains("circuit"))
        throw Error(ErrorCode::ParseError, "config: 'circuit' required");
    if (j.at("circuit").is_string()) {
        std::string cpath = j.at("circuit").get<std::string>();
        // Relative circuit paths resolve against the config file location.
        if (!cpath.empty() && cpath.front() != '/') {
            const auto slash = path.find_last_of('/');
            if (slash != std::string::npos)
                cpath = path.substr(0, slash + 1) + cpath;
        }
        std::ifstream cis(cpath);
        if (!cis)
            throw Error(ErrorCode::ParseError, "cannot open circuit '" + cpath + "'");
        try {
            cis >> circuit_json;
        } catch (const std::exception& e) {
            throw Error(ErrorCode::ParseError, std::string("circuit JSON: ") + e.what());
        }
    } else {
        circuit_json = j.at("circuit");
    }
    cfg.circuit = circuit_from_json(circuit_json);

    if (j.contains("cutoffs")) {
        const auto& c = j.at("cutoffs");
        check_keys(c, "cutoffs", {"N", "qubit_group", "coupler_group", "N0"});
        cfg.N = c.value("N", cfg.N);
        cfg.qubit_group_cutoff = c.value("qubit_group", cfg.qubit_group_cutoff);
        cfg.coupler_group_cutoff = c.value("coupler_group", cfg.coupler_group_cutoff);
        cfg.n0 = c.value("N0", cfg.n0);
    }
    if (cfg.N < 1)
        throw Error(ErrorCode::InvalidCutoff, "cutoffs.N must be >= 1");
    if (cfg.qubit_group_cutoff < 1 || cfg.coupler_group_cutoff < 1 || cfg.n0 < 1)
        throw Error(ErrorCode::InvalidCutoff, "group cutoffs and N0 must be >= 1");

    if (j.contains("flux")) {
        const auto& f = j.at("flux");
        check_keys(f, "flux",
                   {"line", "start_over_pi", "stop_over_pi", "step_over_pi", "held_over_pi",
                    "zeta_qubits"});
        cfg.sweep_line = f.value("line", cfg.sweep_line);
        cfg.sweep_start = f.value("start_over_pi", 0.0) * units::pi;
        cfg.sweep_stop = f.value("stop_over_pi", 1.0) * units::pi;
        cfg.sweep_step = f.value("step_over_pi", 0.05) * units::pi;
        if (f.contains("held_over_pi"))
            cfg.held = flux_map_from(f.at("held_over_pi"), "flux.held_over_pi");
        if (f.contains("zeta_qubits"))
            for (const auto& q : f.at("zeta_qubits"))
                cfg.zeta_qubits.push_back(q.get<int>() - 1);
    } else {
        cfg.sweep_stop = units::pi;
        cfg.sweep_step = 0.05 * units::pi;
    }

    cfg.frames_stop = units::pi;
    cfg.frames_step = 0.05 * units::pi;
    if (j.contains("frames")) {
        const auto& f = j.at("frames");
        check_keys(f, "frames", {"start_over_pi", "stop_over_pi", "step_over_pi"});
        cfg.frames_start = f.value("start_over_pi", 0.0) * units::pi;
        cfg.frames_stop = f.value("stop_over_pi", 1.0) * units::pi;
        cfg.frames_step = f.value("step_over_pi", 0.05) * units::pi;
    }

    cfg.peak_step = 0.01 * units::pi;  // paper default
    if (j.contains("gate")) {
        const auto& g = j.at("gate");
        check_keys(g, "gate",
                   {"kind", "qubits", "duration_ns", "peak_start_over_pi",
                    "peak_stop_over_pi", "peak_step_over_pi", "lambda1", "lambda2",
                    "peak_over_pi", "amp_a", "amp_b"});
        cfg.gate_kind = g.value("kind", cfg.gate_kind);
        if (g.contains("qubits"))
            for (const auto& q : g.at("qubits"))
                cfg.gate_qubits.push_back(q.get<int>() - 1);
        cfg.duration_ns = g.value("duration_ns", cfg.duration_ns);
        cfg.peak_start = g.value("peak_start_over_pi", 0.0) * units::pi;
        cfg.peak_stop = g.value("peak_stop_over_pi", 1.0) * units::pi;
        cfg.peak_step = g.value("peak_step_over_pi", 0.01) * units::pi;
        cfg.lambda1 = g.value("lambda1", 1.0);
        cfg.lambda2 = g.value("lambda2", 0.0);
        cfg.peak = g.value("peak_over_pi", 0.0) * units::pi;
        cfg.amp_a = g.value("amp_a", 0.0);
        cfg.amp_b = g.value("amp_b", 0.0);
    }

    if (j.contains("propagation")) {
        const auto& p = j.at("propagation");
        check_keys(p, "propagation", {"tolerance_per_ns"});
        cfg.prop_tol = p.value("tolerance_per_ns", cfg.prop_tol);
    }
    if (j.contains("optimizer")) {
        const auto& o = j.at("optimizer");
        check_keys(o, "optimizer",
                   {"max_iterations", "max_evaluations", "gradient_step", "threads"});
        cfg.optimizer.max_iterations = o.value("max_iterations", cfg.optimizer.max_iterations);
        cfg.optimizer.max_evaluations =
            o.value("max_evaluations", cfg.optimizer.max_evaluations);
        cfg.optimizer.grad_step = o.value("gradient_step", cfg.optimizer.grad_step);
        cfg.optimizer.threads = o.value("threads", cfg.optimizer.threads);
    }
    if (j.contains("convergence")) {
        const auto& c = j.at("convergence");
        check_keys(c, "convergence", {"ladder"});
        if (c.contains("ladder"))
            for (const auto& rung : c.at("ladder"))
                cfg.ladder.push_back(rung);
    }

    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.cache_dir = j.value("cache_dir", cfg.cache_dir);
    cfg.optimizer.seed = cfg.seed;

    // Resolved configuration with defaults applied, for hashing/manifests.
    cfg.raw = j;
    cfg.raw["circuit"] = circuit_json;
    cfg.raw["cutoffs"] = {{"N", cfg.N},
                          {"qubit_group", cfg.qubit_group_cutoff},
                          {"coupler_group", cfg.coupler_group_cutoff},
                          {"N0", cfg.n0}};
    return cfg;
}

SystemModel::Config model_config_for(const CircuitSpec& spec, int N, int qubit_cutoff,
                                     int coupler_cutoff, long long dense_limit) {
    SystemModel::Config cfg;
    cfg.dense_limit = dense_limit;
    const long long mode_dim = 2LL * N + 1;

    std::vector<int> qubits = spec.qubit_indices;
    std::sort(qubits.begin(), qubits.end());
    long long qdim = 1;
    for (size_t k = 0; k < qubits.size(); ++k)
        qdim = std::min<long long>(qdim * mode_dim, 1LL << 40);
    cfg.groups.push_back(qubits);
    cfg.cutoffs.push_back(static_cast<int>(std::min<long long>(qubit_cutoff, qdim)));

    std::set<int> placed(qubits.begin(), qubits.end());
    for (const auto& loop : spec.loops) {
        std::vector<int> g{std::min(loop.node_a, loop.node_b),
                           std::max(loop.node_a, loop.node_b)};
        cfg.groups.push_back(g);
        cfg.cutoffs.push_back(static_cast<int>(
            std::min<long long>(coupler_cutoff, mode_dim * mode_dim)));
        placed.insert(g.begin(), g.end());
    }
    for (const auto& squid : spec.squids) {
        cfg.groups.push_back({squid.node});
        cfg.cutoffs.push_back(static_cast<int>(std::min<long long>(coupler_cutoff, mode_dim)));
        placed.insert(squid.node);
    }
    for (int c : spec.coupler_indices)
        if (!placed.count(c)) {
            cfg.groups.push_back({c});
            cfg.cutoffs.push_back(
                static_cast<int>(std::min<long long>(coupler_cutoff, mode_dim)));
        }
    return cfg;
}

Json derived_to_json(const CircuitSpec& spec, const DerivedParams& derived) {
    Json out;
    const int n = spec.transmon_count;
    Json w = Json::array(), g = Json::array();
    for (int i = 0; i < n; ++i) {
        Json wrow = Json::array(), grow = Json::array();
        for (int k = 0; k < n; ++k) {
            wrow.push_back(units::radns_to_mhz(derived.W(i, k)));
            grow.push_back(units::radns_to_mhz(derived.g(i, k)));
        }
        w.push_back(wrow);
        g.push_back(grow);
    }
    out["W_MHz"] = w;
    out["g_MHz"] = g;
    Json wj = Json::array(), ic = Json::array();
    for (int i = 0; i < n; ++i) {
        wj.push_back(units::radns_to_ghz(derived.omega_J(i)));
        ic.push_back(derived.I_c_nA(i));
    }
    out["omega_J_GHz"] = wj;
    out["I_c_nA"] = ic;
    for (size_t k = 0; k < spec.loops.size(); ++k) {
        out["loops"].push_back(
            {{"flux_line", spec.loops[k].flux_line},
             {"omega_J_GHz", units::radns_to_ghz(derived.loop_omega_J[k])},
             {"I_c_nA", derived.loop_I_c_nA[k]}});
    }
    for (size_t k = 0; k < spec.squids.size(); ++k) {
        out["squids"].push_back(
            {{"flux_line", spec.squids[k].flux_line},
             {"omega_JA_GHz", units::radns_to_ghz(derived.squid_omega_J[k].first)},
             {"omega_JB_GHz", units::radns_to_ghz(derived.squid_omega_J[k].second)},
             {"I_cA_nA", units::critical_current_nA(derived.squid_omega_J[k].first)},
             {"I_cB_nA", units::critical_current_nA(derived.squid_omega_J[k].second)}});
    }
    return out;
}

std::string derived_table_text(const CircuitSpec& spec, const DerivedParams& derived) {
    std::ostringstream os;
    const int n = spec.transmon_count;
    char buf[128];
    for (int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof(buf), "I_c%-2d (nA)        %8.1f\n", i + 1,
                      derived.I_c_nA(i));
        os << buf;
    }
    for (int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof(buf), "omega_J%-2d/2pi (GHz) %7.1f\n", i + 1,
                      units::radns_to_ghz(derived.omega_J(i)));
        os << buf;
    }
    for (size_t k = 0; k < spec.loops.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "loop %s: I_c (nA) %7.1f  omega_J/2pi (GHz) %6.2f\n",
                      spec.loops[k].flux_line.c_str(), derived.loop_I_c_nA[k],
                      units::radns_to_ghz(derived.loop_omega_J[k]));
        os << buf;
    }
    for (size_t k = 0; k < spec.squids.size(); ++k) {
        std::snprintf(buf, sizeof(buf),
                      "squid %s: omega_JA/2pi (GHz) %5.1f  omega_JB/2pi (GHz) %5.1f\n",
                      spec.squids[k].flux_line.c_str(),
                      units::radns_to_ghz(derived.squid_omega_J[k].first),
                      units::radns_to_ghz(derived.squid_omega_J[k].second));
        os << buf;
    }
    for (int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof(buf), "W_%d%d/2pi (MHz)     %7.0f\n", i + 1, i + 1,
                      units::radns_to_mhz(derived.W(i, i)));
        os << buf;
    }
    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k) {
            std::snprintf(buf, sizeof(buf), "g_%d%d/2pi (MHz)     %8.2f\n", i + 1, k + 1,
                          units::radns_to_mhz(derived.g(i, k)));
            os << buf;
        }
    return os.str();
}

std::string config_hash(const Json& j) {
    const std::string dump = j.dump();
    uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    if (!os)
        throw Error(ErrorCode::ParseError, "cannot write '" + path + "'");
    os << content;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path);
    if (!os)
        throw Error(ErrorCode::ParseError, "cannot write '" + path + "'");
    for (size_t k = 0; k < header.size(); ++k)
        os << (k ? "," : "") << header[k];
    os << "\n";
    for (const auto& row : rows) {
        for (size_t k = 0; k < row.size(); ++k)
            os << (k ? "," : "") << format_double(row[k]);
        os << "\n";
    }
}

} // namespace cqed
