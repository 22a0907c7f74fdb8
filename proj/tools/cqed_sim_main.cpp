// cqed-sim: circuit-level simulator for transmon networks with tunable
// couplers. Subcommands ingest a JSON job config and write result.json,
// CSV tables, and a manifest into the output directory.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cqed/config.hpp"
#include "cqed/gates.hpp"
#include "cqed/spectral.hpp"
#include "cqed/units.hpp"

namespace fs = std::filesystem;
using namespace cqed;
using namespace cqed::units;

namespace {

constexpr const char* kVersion = "cqed-sim 0.1.0";

struct JobIO {
    JobConfig cfg;
    fs::path out;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void finish(const Json& result) const {
        Json manifest;
        manifest["tool"] = kVersion;
        manifest["job"] = cfg.job;
        manifest["config_hash"] = config_hash(cfg.raw);
        manifest["cutoffs"] = cfg.raw.at("cutoffs");
        manifest["seed"] = cfg.seed;
        manifest["threads"] = cfg.threads;
        manifest["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_text_file((out / "manifest.json").string(), manifest.dump(2) + "\n");
        write_text_file((out / "result.json").string(), result.dump(2) + "\n");
    }
};

std::string occ_name(const std::vector<int>& occ) {
    std::string s;
    for (int v : occ)
        s += std::to_string(v);
    return s;
}

SystemModel build_model(const JobConfig& cfg) {
    require_valid(cfg.circuit);
    auto mc = model_config_for(cfg.circuit, cfg.N, cfg.qubit_group_cutoff,
                               cfg.coupler_group_cutoff);
    return SystemModel(cfg.circuit, cfg.N, mc);
}

std::vector<double> sweep_grid(const JobConfig& cfg) {
    std::vector<double> thetas;
    const int n = static_cast<int>(
        std::floor((cfg.sweep_stop - cfg.sweep_start) / cfg.sweep_step + 0.5));
    for (int k = 0; k <= n; ++k)
        thetas.push_back(cfg.sweep_start + k * cfg.sweep_step);
    return thetas;
}

std::pair<int, int> zeta_pair(const JobConfig& cfg) {
    std::vector<int> qubits = cfg.circuit.qubit_indices;
    std::sort(qubits.begin(), qubits.end());
    int qa = 0, qb = 1;
    if (cfg.zeta_qubits.size() == 2) {
        auto pos = [&](int global) {
            return static_cast<int>(std::find(qubits.begin(), qubits.end(), global) -
                                    qubits.begin());
        };
        qa = pos(cfg.zeta_qubits[0]);
        qb = pos(cfg.zeta_qubits[1]);
        if (qa >= static_cast<int>(qubits.size()) || qb >= static_cast<int>(qubits.size()))
            throw Error(ErrorCode::InvalidArgument, "zeta_qubits are not qubits");
    }
    return {qa, qb};
}

double zeta_of(const CouplingReport& rep, int qa, int qb) {
    const int lo = std::min(qa, qb), hi = std::max(qa, qb);
    if (lo == 0 && hi == 1)
        return rep.zeta12;
    if (lo == 1 && hi == 2)
        return rep.zeta23;
    if (lo == 0 && hi == 2)
        return rep.zeta13;
    throw Error(ErrorCode::InvalidArgument, "unsupported qubit pair");
}

Json couplings_json(const CouplingReport& rep) {
    Json j;
    auto put = [&](const char* key, double v) {
        if (std::isfinite(v))
            j[key] = radns_to_khz(v);
    };
    put("zeta12_kHz", rep.zeta12);
    put("zeta23_kHz", rep.zeta23);
    put("zeta13_kHz", rep.zeta13);
    put("zetaZZZ_kHz", rep.zeta_zzz);
    for (const auto& [q, eta] : rep.anharmonicity)
        j["anharmonicity_MHz"][std::to_string(q + 1)] = radns_to_mhz(eta);
    return j;
}

int run_derive(JobIO& io) {
    require_valid(io.cfg.circuit);
    auto derived = derive_all(io.cfg.circuit);
    Json result = derived_to_json(io.cfg.circuit, derived);
    write_text_file((io.out / "derived_table.txt").string(),
                    derived_table_text(io.cfg.circuit, derived));
    io.finish(result);
    return 0;
}

Json spectrum_json(const LabeledSpectrum& s) {
    Json out;
    for (const auto& level : s.levels) {
        Json entry;
        entry["omega_GHz"] = radns_to_ghz(level.omega);
        entry["confidence"] = level.confidence;
        out["levels"][occ_name(level.occ)] = entry;
    }
    for (const auto& w : s.warnings)
        out["warnings"].push_back(w);
    return out;
}

int run_spectrum(JobIO& io) {
    SystemModel model = build_model(io.cfg);
    auto targets = default_label_targets(io.cfg.circuit);
    LabeledSpectrum s = spectrum_at(model, io.cfg.held, targets);
    Json result = spectrum_json(s);
    result["couplings"] = couplings_json(coupling_strengths(s, io.cfg.circuit));
    io.finish(result);
    return 0;
}

int run_zz_scan(JobIO& io, std::vector<double>* thetas_out = nullptr,
                std::vector<double>* zetas_out = nullptr, SystemModel** model_out = nullptr) {
    static std::optional<SystemModel> model_holder;
    model_holder.emplace(build_model(io.cfg));
    SystemModel& model = *model_holder;
    auto targets = default_label_targets(io.cfg.circuit);
    auto thetas = sweep_grid(io.cfg);
    auto sweep =
        sweep_flux(model, io.cfg.sweep_line, thetas, io.cfg.held, targets, io.cfg.threads);

    const auto [qa, qb] = zeta_pair(io.cfg);
    std::vector<std::string> header{"theta_over_pi"};
    std::vector<std::vector<int>> label_cols;
    for (const auto& level : sweep.front().levels) {
        header.push_back("omega_" + occ_name(level.occ) + "_GHz");
        label_cols.push_back(level.occ);
    }
    header.push_back("zeta_kHz");
    std::vector<std::vector<double>> rows;
    std::vector<double> zetas;
    for (size_t p = 0; p < sweep.size(); ++p) {
        std::vector<double> row{thetas[p] / pi};
        for (const auto& occ : label_cols) {
            const auto* level = sweep[p].find(occ);
            row.push_back(level ? radns_to_ghz(level->omega) : std::nan(""));
        }
        auto rep = coupling_strengths(sweep[p], io.cfg.circuit);
        const double z = zeta_of(rep, qa, qb);
        zetas.push_back(z);
        row.push_back(radns_to_khz(z));
        rows.push_back(std::move(row));
    }
    write_csv((io.out / "zz_scan.csv").string(), header, rows);

    Json result;
    result["points"] = rows.size();
    result["zeta_min_abs_kHz"] = radns_to_khz(
        *std::min_element(zetas.begin(), zetas.end(),
                          [](double a, double b) { return std::abs(a) < std::abs(b); }));
    io.finish(result);
    if (thetas_out)
        *thetas_out = thetas;
    if (zetas_out)
        *zetas_out = zetas;
    if (model_out)
        *model_out = &model;
    return 0;
}

int run_idle(JobIO& io) {
    std::vector<double> thetas, zetas;
    SystemModel* model = nullptr;
    run_zz_scan(io, &thetas, &zetas, &model);
    const auto [qa, qb] = zeta_pair(io.cfg);
    auto targets = default_label_targets(io.cfg.circuit);
    auto zeta_at = [&](double theta) {
        FluxValues fluxes = io.cfg.held;
        fluxes[io.cfg.sweep_line] = theta;
        auto s = spectrum_at(*model, fluxes, targets);
        return zeta_of(coupling_strengths(s, io.cfg.circuit), qa, qb);
    };
    IdleResult idle = find_idle(thetas, zetas, zeta_at);
    Json result;
    result["theta_idle_over_pi"] = idle.theta_id / pi;
    result["zeta_idle_kHz"] = radns_to_khz(idle.zeta_id);
    io.finish(result);
    return 0;
}

Json report_json(const GateReport& report) {
    Json j;
    char fid[16];
    std::snprintf(fid, sizeof(fid), "%.4f", report.fidelity);
    j["fidelity"] = report.fidelity;
    j["fidelity_4dp"] = fid;
    j["max_offdiagonal"] = report.diag.max_offdiagonal;
    for (double leak : report.diag.column_leakage)
        j["leakage"].push_back(leak);
    for (const auto& [q, angle] : report.diag.spectator_rotation)
        j["spectator_rotation_rad"][std::to_string(q + 1)] = angle;
    for (const auto& flag : report.diag.flags)
        j["flags"].push_back(flag);
    Json u;
    for (int r = 0; r < report.U_prime.rows(); ++r) {
        Json row;
        for (int c = 0; c < report.U_prime.cols(); ++c)
            row.push_back(Json::array(
                {std::real(report.U_prime(r, c)), std::imag(report.U_prime(r, c))}));
        u.push_back(row);
    }
    j["U_prime"] = u;
    return j;
}

struct GateSetup {
    std::optional<SystemModel> model;
    std::optional<Frames> frames;
    std::optional<GateContext> ctx;
    FluxValues idle;
    std::string driven_line;
};

GateSetup gate_setup(const JobConfig& cfg) {
    GateSetup setup;
    setup.model.emplace(build_model(cfg));
    setup.driven_line = cfg.sweep_line;
    setup.idle = cfg.held;
    if (!setup.idle.count(setup.driven_line))
        throw Error(ErrorCode::MissingFlux,
                    "flux.held_over_pi must include the driven line's idle value");

    std::string cache_path;
    if (!cfg.cache_dir.empty()) {
        Json key;
        key["circuit"] = cfg.raw.at("circuit");
        key["cutoffs"] = cfg.raw.at("cutoffs");
        key["frames"] = Json{{"start", cfg.frames_start},
                             {"stop", cfg.frames_stop},
                             {"step", cfg.frames_step},
                             {"line", setup.driven_line}};
        for (const auto& [line, v] : setup.idle)
            if (line != setup.driven_line)
                key["held"][line] = v;
        fs::create_directories(cfg.cache_dir);
        cache_path = (fs::path(cfg.cache_dir) / ("frames_" + config_hash(key) + ".bin")).string();
        if (auto cached = load_frames_file(cache_path)) {
            setup.frames = std::move(*cached);
        }
    }
    if (!setup.frames) {
        FluxValues held = setup.idle;
        held.erase(setup.driven_line);
        setup.frames = build_frames(*setup.model, setup.driven_line, held,
                                    {cfg.frames_start, cfg.frames_stop, cfg.frames_step},
                                    cfg.n0);
        if (!cache_path.empty())
            save_frames_file(*setup.frames, cache_path);
    }
    setup.ctx = make_gate_context(*setup.model, *setup.frames, setup.idle);
    return setup;
}

std::vector<int> gate_pair(const JobConfig& cfg) {
    if (cfg.gate_qubits.size() >= 2)
        return {cfg.gate_qubits[0], cfg.gate_qubits[1]};
    std::vector<int> qubits = cfg.circuit.qubit_indices;
    std::sort(qubits.begin(), qubits.end());
    return {qubits[0], qubits[1]};
}

int run_gate_cz(JobIO& io) {
    GateSetup setup = gate_setup(io.cfg);
    CzPulseParams pulse;
    pulse.lambda1 = io.cfg.lambda1;
    pulse.lambda2 = io.cfg.lambda2;
    pulse.theta_peak = io.cfg.peak;
    pulse.duration = io.cfg.duration_ns;
    PropagateOptions popt;
    popt.tol = io.cfg.prop_tol;
    GateReport report = run_cz(*setup.ctx, gate_pair(io.cfg), pulse, FluxMap::identity(), popt);

    auto schedule = flux_pulse(pulse.lambda1, pulse.lambda2, pulse.theta_peak, pulse.duration,
                               setup.ctx->theta_idle, FluxMap::identity(), setup.driven_line);
    std::vector<std::vector<double>> samples;
    for (const auto& [t, theta] : sample_flux(schedule, 201))
        samples.push_back({t, theta / pi});
    write_csv((io.out / "pulse.csv").string(), {"t_ns", "theta_over_pi"}, samples);

    Json result = report_json(report);
    result["pulse"] = {{"lambda1", pulse.lambda1},
                       {"lambda2", pulse.lambda2},
                       {"peak_over_pi", pulse.theta_peak / pi},
                       {"duration_ns", pulse.duration}};
    io.finish(result);
    return 0;
}

int run_gate_x90(JobIO& io) {
    GateSetup setup = gate_setup(io.cfg);
    const int qubit = io.cfg.gate_qubits.empty() ? setup.ctx->qubits[0]
                                                 : io.cfg.gate_qubits[0];
    Pi2PulseParams pulse;
    pulse.amp_a = io.cfg.amp_a;
    pulse.amp_b = io.cfg.amp_b;
    pulse.duration = io.cfg.duration_ns;
    PropagateOptions popt;
    popt.tol = io.cfg.prop_tol;
    GateReport report = run_pi2(*setup.ctx, qubit, pulse, popt);

    Json result = report_json(report);
    result["pulse"] = {{"amp_a", pulse.amp_a != 0.0
                                     ? pulse.amp_a
                                     : pi2_seed_amplitude(*setup.ctx, qubit, pulse.duration)},
                       {"amp_b", pulse.amp_b},
                       {"duration_ns", pulse.duration},
                       {"qubit", qubit + 1}};
    io.finish(result);
    return 0;
}

int run_optimize(JobIO& io) {
    GateSetup setup = gate_setup(io.cfg);
    GateOptimizationConfig gcfg;
    gcfg.opt = io.cfg.optimizer;
    gcfg.propagate.tol = io.cfg.prop_tol;
    gcfg.threads = io.cfg.threads;

    Json result;
    if (io.cfg.gate_kind == "cz") {
        std::vector<double> peaks;
        const double start = std::max(io.cfg.peak_start, setup.ctx->theta_idle);
        for (double p = start; p <= io.cfg.peak_stop + 1e-12; p += io.cfg.peak_step)
            peaks.push_back(p);
        if (peaks.empty())
            throw Error(ErrorCode::InvalidArgument, "empty peak grid");
        auto opt = optimize_cz(*setup.ctx, gate_pair(io.cfg), io.cfg.duration_ns, peaks,
                               FluxMap::identity(), gcfg);
        std::vector<std::vector<double>> rows;
        for (const auto& c : opt.trace)
            rows.push_back({c.theta_peak / pi, c.fidelity, c.lambda1, c.lambda2,
                            static_cast<double>(c.evaluations)});
        write_csv((io.out / "optimization_trace.csv").string(),
                  {"peak_over_pi", "fidelity", "lambda1", "lambda2", "evaluations"}, rows);
        result = report_json(opt.best_report);
        result["best"] = {{"peak_over_pi", opt.best.theta_peak / pi},
                          {"lambda1", opt.best.lambda1},
                          {"lambda2", opt.best.lambda2},
                          {"fidelity", opt.best.fidelity}};
    } else if (io.cfg.gate_kind == "x90") {
        const int qubit = io.cfg.gate_qubits.empty() ? setup.ctx->qubits[0]
                                                     : io.cfg.gate_qubits[0];
        auto opt = optimize_pi2(*setup.ctx, qubit, io.cfg.duration_ns, gcfg);
        std::vector<std::vector<double>> rows;
        for (const auto& p : opt.trace)
            rows.push_back({p.x(0), p.x(1), 1.0 - p.value});
        write_csv((io.out / "optimization_trace.csv").string(),
                  {"amp_a", "amp_b", "fidelity"}, rows);
        result = report_json(opt.best_report);
        result["best"] = {{"amp_a", opt.amp_a},
                          {"amp_b", opt.amp_b},
                          {"fidelity", opt.fidelity}};
    } else {
        throw Error(ErrorCode::InvalidArgument, "gate.kind must be 'cz' or 'x90'");
    }
    io.finish(result);
    return 0;
}

int run_convergence(JobIO& io) {
    if (io.cfg.ladder.empty())
        throw Error(ErrorCode::InvalidArgument, "convergence.ladder required");
    const auto [qa, qb] = zeta_pair(io.cfg);
    auto targets = default_label_targets(io.cfg.circuit);
    std::vector<std::vector<double>> rows;
    Json result;
    for (const auto& rung : io.cfg.ladder) {
        const int N = rung.value("N", io.cfg.N);
        const int qc = rung.value("qubit_group", io.cfg.qubit_group_cutoff);
        const int cc = rung.value("coupler_group", io.cfg.coupler_group_cutoff);
        SystemModel model(io.cfg.circuit, N, model_config_for(io.cfg.circuit, N, qc, cc));
        FluxValues fluxes = io.cfg.held;
        fluxes[io.cfg.sweep_line] = io.cfg.sweep_start;
        auto s = spectrum_at(model, fluxes, targets);
        const double zeta = zeta_of(coupling_strengths(s, io.cfg.circuit), qa, qb);
        rows.push_back({static_cast<double>(N), static_cast<double>(qc),
                        static_cast<double>(cc), radns_to_khz(zeta)});
    }
    write_csv((io.out / "convergence.csv").string(),
              {"N", "qubit_group", "coupler_group", "zeta_kHz"}, rows);
    result["rungs"] = rows.size();
    result["zeta_final_kHz"] = rows.back()[3];
    result["zeta_drift_kHz"] =
        rows.size() > 1 ? std::abs(rows.back()[3] - rows[rows.size() - 2][3]) : 0.0;
    io.finish(result);
    return 0;
}

int run_full_paper(JobIO& io) {
    // Full-cutoff run at the published sizes. This is hours of compute and
    // tens of GB; it is deliberately excluded from CI and from acceptance.
    std::fprintf(stderr,
                 "full-paper mode: running at the published cutoffs (N=%d, qubit group %d, "
                 "coupler group %d, N0=%d). Expect hours of runtime.\n",
                 io.cfg.N, io.cfg.qubit_group_cutoff, io.cfg.coupler_group_cutoff, io.cfg.n0);
    return run_idle(io);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kVersion) +
                 " — transmon network simulator with tunable couplers"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    int threads_override = 0;
    long long seed_override = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "job configuration JSON")->required();
        sub->add_option("--out", out_override, "output directory override");
        sub->add_option("--threads", threads_override, "worker thread count override");
        sub->add_option("--seed", seed_override, "seed override");
    };

    const std::vector<std::pair<std::string, std::string>> jobs = {
        {"derive", "derive circuit parameters from design values"},
        {"spectrum", "labeled spectrum at a flux point"},
        {"zz-scan", "residual coupling sweep over external flux"},
        {"idle", "locate the idling point of a coupler"},
        {"gate-cz", "simulate a CZ flux pulse"},
        {"gate-x90", "simulate a pi/2 microwave pulse"},
        {"optimize", "optimize pulse hyperparameters"},
        {"convergence", "cutoff ladder for a coupling value"},
        {"full-paper", "full-size run at the published cutoffs (hours)"},
    };
    for (const auto& [name, desc] : jobs)
        add_common(app.add_subcommand(name, desc));

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        JobIO io;
        io.cfg = load_config(config_path);
        if (io.cfg.job != sub)
            throw Error(ErrorCode::InvalidArgument,
                        "config job '" + io.cfg.job + "' does not match subcommand '" + sub +
                            "'");
        if (!out_override.empty())
            io.cfg.output_dir = out_override;
        if (threads_override > 0)
            io.cfg.threads = threads_override;
        if (seed_override >= 0) {
            io.cfg.seed = static_cast<uint64_t>(seed_override);
            io.cfg.optimizer.seed = io.cfg.seed;
        }
        io.out = io.cfg.output_dir;
        fs::create_directories(io.out);

        if (sub == "derive")
            return run_derive(io);
        if (sub == "spectrum")
            return run_spectrum(io);
        if (sub == "zz-scan")
            return run_zz_scan(io);
        if (sub == "idle")
            return run_idle(io);
        if (sub == "gate-cz")
            return run_gate_cz(io);
        if (sub == "gate-x90")
            return run_gate_x90(io);
        if (sub == "optimize")
            return run_optimize(io);
        if (sub == "convergence")
            return run_convergence(io);
        if (sub == "full-paper")
            return run_full_paper(io);
        std::fprintf(stderr, "unknown subcommand\n");
        return 2;
    } catch (const Error& e) {
        Json err;
        err["code"] = static_cast<int>(e.code());
        err["message"] = e.what();
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        switch (e.code()) {
            case ErrorCode::ParseError:
            case ErrorCode::UnknownKey:
            case ErrorCode::MissingUnits:
            case ErrorCode::InvalidArgument:
            case ErrorCode::InvalidCutoff:
            case ErrorCode::MissingFlux:
            case ErrorCode::DimensionMismatch:
                return 2;
            default:
                return 3;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "{\"message\":\"%s\"}\n", e.what());
        return 3;
    }
}
