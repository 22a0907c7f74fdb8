#include "cqed/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace cqed {

namespace {

std::string occ_string(const std::vector<int>& occ) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < occ.size(); ++i)
        os << (i ? "," : "") << occ[i];
    os << ")";
    return os.str();
}

} // namespace

const LabeledLevel* LabeledSpectrum::find(const std::vector<int>& occ) const {
    for (const auto& level : levels)
        if (level.occ == occ)
            return &level;
    return nullptr;
}

double LabeledSpectrum::omega(const std::vector<int>& occ) const {
    const LabeledLevel* level = find(occ);
    if (!level)
        throw Error(ErrorCode::MissingLabel, "label " + occ_string(occ) + " not in spectrum");
    return level->omega;
}

std::vector<std::vector<int>> default_label_targets(const CircuitSpec& spec) {
    const int n = spec.transmon_count;
    std::vector<int> qubits = spec.qubit_indices;
    std::sort(qubits.begin(), qubits.end());
    std::vector<std::vector<int>> out;
    const int nq = static_cast<int>(qubits.size());
    for (int mask = 0; mask < (1 << nq); ++mask) {
        std::vector<int> occ(n, 0);
        for (int b = 0; b < nq; ++b)
            if (mask & (1 << (nq - 1 - b)))
                occ[qubits[b]] = 1;
        out.push_back(occ);
    }
    for (int q : qubits) {
        std::vector<int> occ(n, 0);
        occ[q] = 2;
        out.push_back(occ);
    }
    for (int c : spec.coupler_indices) {
        std::vector<int> occ(n, 0);
        occ[c] = 1;
        out.push_back(occ);
    }
    return out;
}

int GroupLevelLabels::level_of(int slot, const std::vector<int>& target) const {
    const auto& slot_occ = occ[slot];
    for (size_t k = 0; k < slot_occ.size(); ++k)
        if (slot_occ[k] == target)
            return static_cast<int>(k);
    return -1;
}

GroupLevelLabels label_group_levels(const ReducedModel& model,
                                    const std::vector<Eigen::MatrixXcd>& mode_bases) {
    GroupLevelLabels out;
    out.occ.resize(model.groups.size());
    out.confidence.resize(model.groups.size());

    for (size_t g = 0; g < model.groups.size(); ++g) {
        const auto& gr = model.groups[g];
        const int m = static_cast<int>(gr.members.size());
        std::vector<int> local_dims;
        for (int member : gr.members)
            local_dims.push_back(static_cast<int>(mode_bases[member].rows()));

        // Express the retained group basis in the product of isolated-mode
        // eigenbases; a row index then decodes directly to an occupation tuple.
        Eigen::MatrixXcd tilde = gr.basis;
        for (int s = 0; s < m; ++s) {
            Eigen::MatrixXcd u_dag = mode_bases[gr.members[s]].adjoint();
            tilde = slot_apply(u_dag, s, local_dims, tilde);
        }

        const long long rows = tilde.rows();
        const int levels = gr.cutoff;
        struct Entry {
            double mag2;
            long long row;
            int level;
        };
        std::vector<Entry> entries;
        for (int k = 0; k < levels; ++k)
            for (long long r = 0; r < rows; ++r) {
                const double mag2 = std::norm(tilde(r, k));
                if (mag2 > 1e-6)
                    entries.push_back({mag2, r, k});
            }
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& a, const Entry& b) { return a.mag2 > b.mag2; });

        out.occ[g].assign(levels, {});
        out.confidence[g].assign(levels, 0.0);
        std::vector<char> row_taken(rows, 0);
        std::vector<char> level_taken(levels, 0);
        int assigned = 0;
        for (const auto& e : entries) {
            if (level_taken[e.level] || row_taken[e.row])
                continue;
            level_taken[e.level] = 1;
            row_taken[e.row] = 1;
            std::vector<int> occ(m);
            long long rem = e.row;
            for (int s = m - 1; s >= 0; --s) {
                occ[s] = static_cast<int>(rem % local_dims[s]);
                rem /= local_dims[s];
            }
            out.occ[g][e.level] = occ;
            out.confidence[g][e.level] = e.mag2;
            if (++assigned == levels)
                break;
        }
    }
    return out;
}

namespace {

// Global occupation -> flat product-basis reference index, or -1 when a
// group lacks a level with the matching local occupation.
long long reference_index(const ReducedModel& model, const GroupLevelLabels& labels,
                          const std::vector<int>& occ) {
    std::vector<int> group_levels(model.groups.size());
    for (size_t g = 0; g < model.groups.size(); ++g) {
        std::vector<int> local;
        for (int member : model.groups[g].members)
            local.push_back(occ[member]);
        const int level = labels.level_of(static_cast<int>(g), local);
        if (level < 0)
            return -1;
        group_levels[g] = level;
    }
    return model.flat_index(group_levels);
}

} // namespace

LabeledSpectrum label_eigenstates(const Eigen::VectorXd& evals,
                                  const Eigen::MatrixXcd& evecs,
                                  const ReducedModel& model,
                                  const GroupLevelLabels& group_labels,
                                  const std::vector<std::vector<int>>& targets,
                                  const LabeledSpectrum* seed) {
    LabeledSpectrum out;
    const int n_eig = static_cast<int>(evals.size());
    const int n_targets = static_cast<int>(targets.size());

    // Confidence of eigenvector k for target t is |<ref_t|v_k>|^2, one
    // squared entry of the product-basis row.
    Eigen::MatrixXd conf = Eigen::MatrixXd::Zero(n_targets, n_eig);
    std::vector<long long> refs(n_targets, -1);
    for (int t = 0; t < n_targets; ++t) {
        refs[t] = reference_index(model, group_labels, targets[t]);
        if (refs[t] < 0) {
            out.warnings.push_back("no group reference for label " + occ_string(targets[t]));
            continue;
        }
        conf.row(t) = evecs.row(refs[t]).cwiseAbs2();
    }

    // Greedy injective assignment by descending confidence; the sweep seed
    // breaks near-ties in favor of frequency continuity.
    std::vector<int> assigned_eig(n_targets, -1);
    std::vector<char> eig_taken(n_eig, 0);
    std::vector<char> target_done(n_targets, 0);
    for (int round = 0; round < n_targets; ++round) {
        int best_t = -1, best_k = -1;
        double best = -1.0;
        for (int t = 0; t < n_targets; ++t) {
            if (target_done[t] || refs[t] < 0)
                continue;
            for (int k = 0; k < n_eig; ++k) {
                if (eig_taken[k])
                    continue;
                if (conf(t, k) > best) {
                    best = conf(t, k);
                    best_t = t;
                    best_k = k;
                }
            }
        }
        if (best_t < 0)
            break;
        if (seed && best < 0.55) {
            const LabeledLevel* prev = seed->find(targets[best_t]);
            if (prev) {
                double best_dist = std::numeric_limits<double>::max();
                int pick = best_k;
                for (int k = 0; k < n_eig; ++k) {
                    if (eig_taken[k] || conf(best_t, k) < 0.8 * best)
                        continue;
                    const double dist = std::abs((evals(k) - evals(0)) - prev->omega);
                    if (dist < best_dist) {
                        best_dist = dist;
                        pick = k;
                    }
                }
                best_k = pick;
                best = conf(best_t, best_k);
            }
        }
        assigned_eig[best_t] = best_k;
        eig_taken[best_k] = 1;
        target_done[best_t] = 1;
        if (best < 0.5)
            out.warnings.push_back("ambiguous label " + occ_string(targets[best_t]) +
                                   " (confidence " + std::to_string(best) + ")");
    }

    int anchor_eig = -1;
    for (int t = 0; t < n_targets; ++t) {
        if (std::all_of(targets[t].begin(), targets[t].end(), [](int v) { return v == 0; }) &&
            assigned_eig[t] >= 0)
            anchor_eig = assigned_eig[t];
    }
    if (anchor_eig < 0)
        throw Error(ErrorCode::MissingLabel, "ground label could not be assigned");
    out.ground_energy = evals(anchor_eig);

    for (int t = 0; t < n_targets; ++t) {
        if (assigned_eig[t] < 0)
            continue;
        LabeledLevel level;
        level.occ = targets[t];
        level.omega = evals(assigned_eig[t]) - out.ground_energy;
        level.confidence = conf(t, assigned_eig[t]);
        level.eig_index = assigned_eig[t];
        out.levels.push_back(std::move(level));
    }
    return out;
}

LabeledSpectrum spectrum_at(const SystemModel& model, const FluxValues& fluxes,
                            const std::vector<std::vector<int>>& targets,
                            const LabeledSpectrum* seed) {
    ReducedModel reduced = model.reduced_at(fluxes);
    if (!reduced.materialized)
        throw Error(ErrorCode::InvalidCutoff,
                    "reduced dimension too large for a dense spectrum pass");
    EigenResult eig = lowest_eigenpairs(reduced.h_total, static_cast<int>(reduced.dim()));
    GroupLevelLabels labels = label_group_levels(reduced, model.mode_bases(fluxes));
    LabeledSpectrum out =
        label_eigenstates(eig.values, eig.vectors, reduced, labels, targets, seed);
    out.fluxes = fluxes;
    return out;
}

CouplingReport coupling_strengths(const LabeledSpectrum& spectrum, const CircuitSpec& spec) {
    CouplingReport report;
    report.fluxes = spectrum.fluxes;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.zeta12 = report.zeta23 = report.zeta13 = report.zeta_zzz = nan;

    std::vector<int> qubits = spec.qubit_indices;
    std::sort(qubits.begin(), qubits.end());
    const int n = spec.transmon_count;
    const int nq = static_cast<int>(qubits.size());

    auto occ_of = [&](std::initializer_list<int> excited) {
        std::vector<int> occ(n, 0);
        for (int q : excited)
            occ[qubits[q]] = 1;
        return occ;
    };

    if (nq >= 2) {
        report.zeta12 = spectrum.omega(occ_of({0, 1})) -
                        (spectrum.omega(occ_of({0})) + spectrum.omega(occ_of({1})));
    }
    if (nq >= 3) {
        report.zeta23 = spectrum.omega(occ_of({1, 2})) -
                        (spectrum.omega(occ_of({1})) + spectrum.omega(occ_of({2})));
        report.zeta13 = spectrum.omega(occ_of({0, 2})) -
                        (spectrum.omega(occ_of({0})) + spectrum.omega(occ_of({2})));
        report.zeta_zzz = spectrum.omega(occ_of({0, 1, 2})) -
                          (spectrum.omega(occ_of({0})) + spectrum.omega(occ_of({1})) +
                           spectrum.omega(occ_of({2}))) -
                          (report.zeta12 + report.zeta23 + report.zeta13);
    }
    for (int q : qubits) {
        std::vector<int> two(n, 0), one(n, 0);
        two[q] = 2;
        one[q] = 1;
        const LabeledLevel* l2 = spectrum.find(two);
        const LabeledLevel* l1 = spectrum.find(one);
        if (l1 && l2)
            report.anharmonicity[q] = l2->omega - 2.0 * l1->omega;
    }
    return report;
}

std::vector<LabeledSpectrum> sweep_flux(const SystemModel& model, const std::string& line,
                                        const std::vector<double>& thetas,
                                        const FluxValues& held,
                                        const std::vector<std::vector<int>>& targets,
                                        int threads) {
    const int n_pts = static_cast<int>(thetas.size());
    struct Point {
        Eigen::VectorXd evals;
        Eigen::MatrixXcd evecs;
        ReducedModel reduced;
        GroupLevelLabels labels;
    };
    std::vector<Point> points(n_pts);

    auto worker = [&](int begin, int end) {
        for (int p = begin; p < end; ++p) {
            FluxValues fluxes = held;
            fluxes[line] = thetas[p];
            points[p].reduced = model.reduced_at(fluxes);
            if (!points[p].reduced.materialized)
                throw Error(ErrorCode::InvalidCutoff,
                            "reduced dimension too large for a dense sweep");
            EigenResult eig = lowest_eigenpairs(points[p].reduced.h_total,
                                                static_cast<int>(points[p].reduced.dim()));
            points[p].evals = eig.values;
            points[p].evecs = eig.vectors;
            points[p].labels = label_group_levels(points[p].reduced, model.mode_bases(fluxes));
        }
    };
    if (threads <= 1 || n_pts <= 1) {
        worker(0, n_pts);
    } else {
        const int n_workers = std::min(threads, n_pts);
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(n_workers);
        for (int w = 0; w < n_workers; ++w) {
            const int begin = w * n_pts / n_workers;
            const int end = (w + 1) * n_pts / n_workers;
            pool.emplace_back([&, begin, end, w] {
                try {
                    worker(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool)
            t.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    std::vector<LabeledSpectrum> out;
    out.reserve(n_pts);
    for (int p = 0; p < n_pts; ++p) {
        const LabeledSpectrum* seed = p > 0 ? &out.back() : nullptr;
        LabeledSpectrum s = label_eigenstates(points[p].evals, points[p].evecs,
                                              points[p].reduced, points[p].labels,
                                              targets, seed);
        s.fluxes = held;
        s.fluxes[line] = thetas[p];
        out.push_back(std::move(s));
    }
    return out;
}

IdleResult find_idle(const std::vector<double>& thetas, const std::vector<double>& zetas,
                     const std::function<double(double)>& zeta_at, double theta_tol) {
    const int n = static_cast<int>(thetas.size());
    if (n < 3 || zetas.size() != thetas.size())
        throw Error(ErrorCode::InvalidArgument, "need at least three sweep points");
    int m = 0;
    for (int k = 1; k < n; ++k)
        if (std::abs(zetas[k]) < std::abs(zetas[m]))
            m = k;
    if (m == 0 || m == n - 1)
        throw Error(ErrorCode::NoBracket, "|zeta| minimum sits on the sweep boundary");

    // Parabola through the bracketing triple, in local coordinates u = x - x1.
    const double x0 = thetas[m - 1], x1 = thetas[m], x2 = thetas[m + 1];
    const double y0 = zetas[m - 1], y1 = zetas[m], y2 = zetas[m + 1];
    const double u0 = x0 - x1, u2 = x2 - x1;
    const double det = u0 * u2 * (u0 - u2);
    double candidate = x1;
    if (std::abs(det) > 1e-300) {
        const double a = (u2 * (y0 - y1) - u0 * (y2 - y1)) / det;
        const double b = (u0 * u0 * (y2 - y1) - u2 * u2 * (y0 - y1)) / det;
        const bool sign_change = (y0 * y1 < 0.0) || (y1 * y2 < 0.0) || (y0 * y2 < 0.0);
        if (sign_change && std::abs(a) > 1e-300) {
            const double disc = b * b - 4.0 * a * y1;
            if (disc >= 0.0) {
                const double r1 = (-b + std::sqrt(disc)) / (2.0 * a);
                const double r2 = (-b - std::sqrt(disc)) / (2.0 * a);
                const double r = std::abs(r1) <= std::abs(r2) ? r1 : r2;
                candidate = std::clamp(x1 + r, x0, x2);
            }
        } else if (sign_change && std::abs(b) > 1e-300) {
            candidate = std::clamp(x1 - y1 / b, x0, x2);
        } else if (std::abs(a) > 1e-300) {
            candidate = std::clamp(x1 - b / (2.0 * a), x0, x2);
        }
    }

    double best_theta = candidate;
    double best_zeta = zeta_at(best_theta);
    double a_pt = x0, b_pt = x2;
    double za = y0, zb = y2;
    for (int iter = 0; iter < 12 && (b_pt - a_pt) > theta_tol; ++iter) {
        if (za * zb < 0.0) {
            double next = (std::abs(zb - za) > 1e-300)
                              ? (a_pt - za * (b_pt - a_pt) / (zb - za))
                              : 0.5 * (a_pt + b_pt);
            if (next <= a_pt || next >= b_pt)
                next = 0.5 * (a_pt + b_pt);
            const double zn = zeta_at(next);
            if (std::abs(zn) < std::abs(best_zeta)) {
                best_zeta = zn;
                best_theta = next;
            }
            if (za * zn <= 0.0) {
                b_pt = next;
                zb = zn;
            } else {
                a_pt = next;
                za = zn;
            }
        } else {
            const double g = 0.381966011250105;
            const double p1 = a_pt + g * (b_pt - a_pt);
            const double p2 = b_pt - g * (b_pt - a_pt);
            const double z1 = zeta_at(p1);
            const double z2 = zeta_at(p2);
            if (std::abs(z1) < std::abs(best_zeta)) {
                best_zeta = z1;
                best_theta = p1;
            }
            if (std::abs(z2) < std::abs(best_zeta)) {
                best_zeta = z2;
                best_theta = p2;
            }
            if (std::abs(z1) < std::abs(z2)) {
                b_pt = p2;
                zb = z2;
            } else {
                a_pt = p1;
                za = z1;
            }
        }
    }
    return {best_theta, best_zeta};
}

} // namespace cqed
