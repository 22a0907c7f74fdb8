#include "cqed/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>

namespace cqed {

GroupReduction reduce_group(const Eigen::MatrixXcd& H_group,
                            const std::vector<Eigen::MatrixXcd>& n_ops, int cutoff) {
    if (cutoff < 1 || cutoff > H_group.rows())
        throw Error(ErrorCode::InvalidCutoff, "group cutoff out of range");
    EigenResult eig = lowest_eigenpairs(H_group, cutoff);
    GroupReduction out;
    out.cutoff = cutoff;
    out.eigvals = eig.values;
    out.basis = eig.vectors;
    out.reduced_n.reserve(n_ops.size());
    for (const auto& n : n_ops) {
        Eigen::MatrixXcd r = out.basis.adjoint() * (n * out.basis);
        out.reduced_n.push_back(0.5 * (r + r.adjoint().eval()));
    }
    return out;
}

GroupReduction reduce_group(const GroupProblem& problem, const FluxValues& fluxes,
                            int cutoff, const EigenOptions& opts) {
    const long long dim = problem.dim();
    if (cutoff < 1 || cutoff > dim)
        throw Error(ErrorCode::InvalidCutoff, "group cutoff out of range");
    SparseCd H = problem.at(fluxes);
    EigenResult eig = lowest_eigenpairs(H, cutoff, opts);
    GroupReduction out;
    out.members = problem.members;
    out.cutoff = cutoff;
    out.eigvals = eig.values;
    out.basis = eig.vectors;
    out.reduced_n.reserve(problem.n_ops.size());
    for (const auto& n : problem.n_ops) {
        Eigen::MatrixXcd r = out.basis.adjoint() * (n * out.basis);
        out.reduced_n.push_back(0.5 * (r + r.adjoint().eval()));
    }
    return out;
}

Eigen::MatrixXcd slot_embed(const Eigen::MatrixXcd& op, int slot, const std::vector<int>& dims) {
    long long pre = 1, post = 1;
    for (int k = 0; k < slot; ++k)
        pre *= dims[k];
    for (int k = slot + 1; k < static_cast<int>(dims.size()); ++k)
        post *= dims[k];
    const int d = dims[slot];
    const long long full = pre * d * post;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(full, full);
    for (long long p = 0; p < pre; ++p)
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                if (op(r, c) == Complex(0.0, 0.0))
                    continue;
                for (long long q = 0; q < post; ++q)
                    out((p * d + r) * post + q, (p * d + c) * post + q) = op(r, c);
            }
    return out;
}

Eigen::MatrixXcd slot_embed_two(const Eigen::MatrixXcd& op_a, int slot_a,
                                const Eigen::MatrixXcd& op_b, int slot_b,
                                const std::vector<int>& dims) {
    int s1 = slot_a, s2 = slot_b;
    const Eigen::MatrixXcd* o1 = &op_a;
    const Eigen::MatrixXcd* o2 = &op_b;
    if (s1 > s2) {
        std::swap(s1, s2);
        std::swap(o1, o2);
    }
    long long pre = 1, mid = 1, post = 1;
    for (int k = 0; k < s1; ++k)
        pre *= dims[k];
    for (int k = s1 + 1; k < s2; ++k)
        mid *= dims[k];
    for (int k = s2 + 1; k < static_cast<int>(dims.size()); ++k)
        post *= dims[k];
    const int d1 = dims[s1], d2 = dims[s2];
    const long long full = pre * d1 * mid * d2 * post;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(full, full);
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
                                const long long row =
                                    (((p * d1 + r1) * mid + m) * d2 + r2) * post + q;
                                const long long col =
                                    (((p * d1 + c1) * mid + m) * d2 + c2) * post + q;
                                out(row, col) = v;
                            }
                }
        }
    return out;
}

/// Applies `op` acting on one slot of the product space to every column of X.
Eigen::MatrixXcd slot_apply(const Eigen::MatrixXcd& op, int slot,
                            const std::vector<int>& dims, const Eigen::MatrixXcd& X) {
    long long pre = 1, post = 1;
    for (int k = 0; k < slot; ++k)
        pre *= dims[k];
    for (int k = slot + 1; k < static_cast<int>(dims.size()); ++k)
        post *= dims[k];
    const int d = dims[slot];
    Eigen::MatrixXcd Y(X.rows(), X.cols());
    using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    for (Eigen::Index col = 0; col < X.cols(); ++col) {
        const Complex* xc = X.col(col).data();
        Complex* yc = Y.col(col).data();
        for (long long p = 0; p < pre; ++p) {
            Eigen::Map<const RowMat> xin(xc + p * d * post, d, post);
            Eigen::Map<RowMat> yout(yc + p * d * post, d, post);
            yout.noalias() = op * xin;
        }
    }
    return Y;
}

long long ReducedModel::dim() const {
    long long p = 1;
    for (int d : slot_dims)
        p *= d;
    return p;
}

long long ReducedModel::flat_index(const std::vector<int>& group_levels) const {
    long long idx = 0;
    for (size_t s = 0; s < slot_dims.size(); ++s)
        idx = idx * slot_dims[s] + group_levels[s];
    return idx;
}

ReducedModel assemble_reduced(const std::vector<GroupReduction>& groups,
                              const Eigen::MatrixXd& W, int transmon_count,
                              long long dense_limit) {
    ReducedModel model;
    model.groups = groups;
    model.group_of.assign(transmon_count, -1);
    std::set<int> covered;
    for (size_t g = 0; g < groups.size(); ++g) {
        model.slot_dims.push_back(groups[g].cutoff);
        for (int member : groups[g].members) {
            if (member < 0 || member >= transmon_count || !covered.insert(member).second)
                throw Error(ErrorCode::IncompleteCover, "groups must partition the transmons");
            model.group_of[member] = static_cast<int>(g);
        }
    }
    if (static_cast<int>(covered.size()) != transmon_count)
        throw Error(ErrorCode::IncompleteCover, "groups must cover every transmon");

    const long long dim = model.dim();
    if (dim > dense_limit)
        return model;  // matrix-free; use apply_reduced

    model.n_prime.resize(transmon_count);
    for (int j = 0; j < transmon_count; ++j) {
        const int g = model.group_of[j];
        const auto& gr = groups[g];
        const int local =
            static_cast<int>(std::find(gr.members.begin(), gr.members.end(), j) -
                             gr.members.begin());
        model.n_prime[j] = slot_embed(gr.reduced_n[local], g, model.slot_dims);
    }

    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
    for (size_t g = 0; g < groups.size(); ++g) {
        Eigen::MatrixXcd e = groups[g].eigvals.cast<Complex>().asDiagonal();
        H += slot_embed(e, static_cast<int>(g), model.slot_dims);
    }
    for (int i = 0; i < transmon_count; ++i)
        for (int j = i + 1; j < transmon_count; ++j) {
            if (model.group_of[i] == model.group_of[j] || W(i, j) == 0.0)
                continue;
            const int gi = model.group_of[i];
            const int gj = model.group_of[j];
            const auto& gri = groups[gi];
            const auto& grj = groups[gj];
            const int li = static_cast<int>(
                std::find(gri.members.begin(), gri.members.end(), i) - gri.members.begin());
            const int lj = static_cast<int>(
                std::find(grj.members.begin(), grj.members.end(), j) - grj.members.begin());
            H += slot_embed_two(8.0 * W(i, j) * gri.reduced_n[li], gi,
                                grj.reduced_n[lj], gj, model.slot_dims);
        }
    model.h_total = 0.5 * (H + H.adjoint().eval());
    model.materialized = true;
    return model;
}

void apply_reduced(const ReducedModel& model, const Eigen::MatrixXd& W,
                   const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
    const long long dim = model.dim();
    y.setZero(dim);
    // Group-energy diagonal.
    const int n_slots = static_cast<int>(model.slot_dims.size());
    std::vector<long long> post(n_slots, 1);
    for (int s = n_slots - 2; s >= 0; --s)
        post[s] = post[s + 1] * model.slot_dims[s + 1];
    for (long long idx = 0; idx < dim; ++idx) {
        double e = 0.0;
        long long rem = idx;
        for (int s = 0; s < n_slots; ++s) {
            const long long level = rem / post[s];
            rem %= post[s];
            e += model.groups[s].eigvals(static_cast<int>(level));
        }
        y(idx) = e * x(idx);
    }
    // Inter-group charge couplings.
    const int n = static_cast<int>(model.group_of.size());
    Eigen::MatrixXcd xm = x;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (model.group_of[i] == model.group_of[j] || W(i, j) == 0.0)
                continue;
            const int gi = model.group_of[i];
            const int gj = model.group_of[j];
            const auto& gri = model.groups[gi];
            const auto& grj = model.groups[gj];
            const int li = static_cast<int>(
                std::find(gri.members.begin(), gri.members.end(), i) - gri.members.begin());
            const int lj = static_cast<int>(
                std::find(grj.members.begin(), grj.members.end(), j) - grj.members.begin());
            Eigen::MatrixXcd t = slot_apply(grj.reduced_n[lj], gj, model.slot_dims, xm);
            t = slot_apply(gri.reduced_n[li], gi, model.slot_dims, t);
            y += 8.0 * W(i, j) * t.col(0);
        }
}

namespace {

// Permutation within near-degenerate blocks + per-column phase fix, given
// the overlap matrix O(prev, cur).
void align_from_overlap(Eigen::MatrixXcd& cur, Eigen::VectorXd& evals,
                        const Eigen::MatrixXcd& O, double degeneracy_gap) {
    const int n = static_cast<int>(cur.cols());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    int b = 0;
    while (b < n) {
        int e = b + 1;
        while (e < n && evals(e) - evals(e - 1) < degeneracy_gap)
            ++e;
        if (e - b > 1) {
            std::vector<int> pool(perm.begin() + b, perm.begin() + e);
            for (int k = b; k < e; ++k) {
                int best = 0;
                double best_mag = -1.0;
                for (size_t c = 0; c < pool.size(); ++c) {
                    const double mag = std::abs(O(k, pool[c]));
                    if (mag > best_mag) {
                        best_mag = mag;
                        best = static_cast<int>(c);
                    }
                }
                perm[k] = pool[best];
                pool.erase(pool.begin() + best);
            }
        }
        b = e;
    }

    Eigen::MatrixXcd permuted(cur.rows(), n);
    Eigen::VectorXd pvals(n);
    for (int k = 0; k < n; ++k) {
        permuted.col(k) = cur.col(perm[k]);
        pvals(k) = evals(perm[k]);
        const Complex o = O(k, perm[k]);
        if (std::abs(o) > 1e-300)
            permuted.col(k) *= std::conj(o) / std::abs(o);
    }
    cur = std::move(permuted);
    evals = pvals;
}

} // namespace

void align_columns(Eigen::MatrixXcd& cur, Eigen::VectorXd& evals,
                   const Eigen::MatrixXcd& prev,
                   const Eigen::MatrixXcd* overlap_transform,
                   double degeneracy_gap) {
    Eigen::MatrixXcd O;
    if (overlap_transform)
        O = prev.adjoint() * (*overlap_transform) * cur;
    else
        O = prev.adjoint() * cur;
    align_from_overlap(cur, evals, O, degeneracy_gap);
}

SystemModel::SystemModel(CircuitSpec spec, int N, Config cfg)
    : spec_(std::move(spec)), cfg_(std::move(cfg)),
      parts_(assemble(spec_, derive_all(spec_), N)) {
    if (cfg_.groups.size() != cfg_.cutoffs.size())
        throw Error(ErrorCode::InvalidArgument, "one cutoff per group required");
    std::set<int> covered;
    for (const auto& g : cfg_.groups)
        for (int m : g)
            if (m < 0 || m >= spec_.transmon_count || !covered.insert(m).second)
                throw Error(ErrorCode::IncompleteCover, "groups must partition the transmons");
    if (static_cast<int>(covered.size()) != spec_.transmon_count)
        throw Error(ErrorCode::IncompleteCover, "groups must cover every transmon");

    for (const auto& g : cfg_.groups)
        problems_.push_back(group_problem(parts_, g));
    static_cache_.resize(problems_.size());
    for (size_t g = 0; g < problems_.size(); ++g)
        if (!problems_[g].flux_dependent())
            static_cache_[g] = reduce_group(problems_[g], {}, cfg_.cutoffs[g], cfg_.eig);
}

std::vector<GroupReduction> SystemModel::reduce_groups(const FluxValues& fluxes) const {
    std::vector<GroupReduction> out;
    out.reserve(problems_.size());
    for (size_t g = 0; g < problems_.size(); ++g) {
        if (static_cache_[g])
            out.push_back(*static_cache_[g]);
        else
            out.push_back(reduce_group(problems_[g], fluxes, cfg_.cutoffs[g], cfg_.eig));
    }
    return out;
}

ReducedModel SystemModel::reduced_at(const FluxValues& fluxes) const {
    return assemble_reduced(reduce_groups(fluxes), parts_.derived.W,
                            spec_.transmon_count, cfg_.dense_limit);
}

std::vector<Eigen::MatrixXcd> SystemModel::mode_bases(const FluxValues& fluxes) const {
    std::vector<Eigen::MatrixXcd> out;
    for (int i = 0; i < spec_.transmon_count; ++i) {
        GroupProblem p = group_problem(parts_, {i}, /*allow_straddle=*/true);
        Eigen::MatrixXcd H(p.at(fluxes));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        if (es.info() != Eigen::Success)
            throw Error(ErrorCode::EigensolveFailure, "mode eigensolve failed");
        out.push_back(es.eigenvectors());
    }
    return out;
}

int SystemModel::flux_group_slot(const std::string& line) const {
    for (const auto& el : parts_.flux_elements) {
        if (el.flux_line != line)
            continue;
        for (size_t g = 0; g < cfg_.groups.size(); ++g)
            if (std::find(cfg_.groups[g].begin(), cfg_.groups[g].end(), el.sites[0]) !=
                cfg_.groups[g].end())
                return static_cast<int>(g);
    }
    throw Error(ErrorCode::MissingFlux, "no flux element on line '" + line + "'");
}

int Frames::bin_of(double theta) const {
    const double rel = (theta - (theta_start - 0.5 * step)) / step;
    const int m = static_cast<int>(std::floor(rel));
    if (m < 0 || m >= node_count())
        return -1;
    return m;
}

Frames build_frames(const SystemModel& model, const std::string& driven_line,
                    const FluxValues& held, const FrameGrid& grid, int n0) {
    if (grid.step <= 0.0 || grid.stop < grid.start)
        throw Error(ErrorCode::InvalidArgument, "bad frame grid");
    Frames frames;
    frames.driven_line = driven_line;
    frames.held = held;
    frames.theta_start = grid.start;
    frames.step = grid.step;
    frames.n0 = n0;

    const auto& parts = model.parts();
    const FluxElement* element = nullptr;
    for (const auto& el : parts.flux_elements)
        if (el.flux_line == driven_line)
            element = &el;
    if (!element)
        throw Error(ErrorCode::MissingFlux, "no flux element on line '" + driven_line + "'");
    frames.coeff_cos = element->coeff_cos;
    frames.coeff_sin = element->coeff_sin;
    frames.drive_ports = model.spec().drive_ports;

    const int flux_slot = model.flux_group_slot(driven_line);
    const int n_nodes = static_cast<int>(std::floor((grid.stop - grid.start) / grid.step + 0.5)) + 1;
    const int n_transmons = model.spec().transmon_count;

    // The driven element's flux group problem, for Gc/Gs projection.
    GroupProblem flux_problem = group_problem(parts, model.config().groups[flux_slot]);
    std::vector<int> local_sites;
    for (int s : element->sites)
        local_sites.push_back(static_cast<int>(
            std::find(flux_problem.members.begin(), flux_problem.members.end(), s) -
            flux_problem.members.begin()));
    const GroupProblem::LocalFlux* local_flux = nullptr;
    for (const auto& lf : flux_problem.flux)
        if (lf.flux_line == driven_line)
            local_flux = &lf;
    if (!local_flux)
        throw Error(ErrorCode::MissingFlux, "flux element not local to its group");

    for (int m = 0; m < n_nodes; ++m) {
        const double theta = frames.node_theta(m);
        FluxValues fluxes = held;
        fluxes[driven_line] = theta;

        auto groups = model.reduce_groups(fluxes);
        if (m > 0) {
            // Keep the flux group's basis continuous across nodes.
            const auto& prev = frames.nodes[m - 1].flux_group;
            align_columns(groups[flux_slot].basis, groups[flux_slot].eigvals, prev.basis);
            // Recompute the reduced charge operators in the aligned basis.
            for (size_t k = 0; k < flux_problem.n_ops.size(); ++k) {
                Eigen::MatrixXcd r = groups[flux_slot].basis.adjoint() *
                                     (flux_problem.n_ops[k] * groups[flux_slot].basis);
                groups[flux_slot].reduced_n[k] = 0.5 * (r + r.adjoint().eval());
            }
        }

        ReducedModel reduced = assemble_reduced(groups, parts.derived.W, n_transmons,
                                                model.config().dense_limit);
        if (n0 > reduced.dim())
            throw Error(ErrorCode::InvalidCutoff, "N0 exceeds the reduced dimension");

        FrameNode node;
        node.theta = theta;
        node.flux_group = groups[flux_slot];

        if (reduced.materialized) {
            EigenResult eig = lowest_eigenpairs(reduced.h_total, n0);
            node.e0 = eig.values;
            node.v0 = eig.vectors;
        } else {
            MatVec apply = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
                apply_reduced(reduced, parts.derived.W, x, y);
            };
            EigenResult eig = lanczos_lowest(apply, reduced.dim(), n0, model.config().eig);
            node.e0 = eig.values;
            node.v0 = eig.vectors;
        }

        if (m > 0) {
            const auto& prev = frames.nodes[m - 1];
            // Basis change between the node-dependent product bases.
            Eigen::MatrixXcd M_g = prev.flux_group.basis.adjoint() * node.flux_group.basis;
            Eigen::MatrixXcd transformed =
                slot_apply(M_g, flux_slot, reduced.slot_dims, node.v0);
            Eigen::MatrixXcd O = prev.v0.adjoint() * transformed;
            align_from_overlap(node.v0, node.e0, O, 1e-9);
        }

        // Frame-basis control operators.
        auto project_weighted_n = [&](const Eigen::VectorXd& coeff) {
            Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(node.v0.rows(), node.v0.cols());
            for (int j = 0; j < n_transmons; ++j) {
                if (coeff(j) == 0.0)
                    continue;
                const int g = reduced.group_of[j];
                const auto& gr = groups[g];
                const int local = static_cast<int>(
                    std::find(gr.members.begin(), gr.members.end(), j) - gr.members.begin());
                Y += coeff(j) * slot_apply(gr.reduced_n[local], g, reduced.slot_dims, node.v0);
            }
            Eigen::MatrixXcd P = node.v0.adjoint() * Y;
            return Eigen::MatrixXcd(0.5 * (P + P.adjoint().eval()));
        };
        node.rate_op = project_weighted_n(element->rate_coeff);
        for (const auto& dc : parts.drive_coeff)
            node.drive_ops.push_back(project_weighted_n(dc));

        const auto& vg = node.flux_group.basis;
        Eigen::MatrixXcd gc_red = vg.adjoint() * (local_flux->Gc * vg);
        Eigen::MatrixXcd gs_red = vg.adjoint() * (local_flux->Gs * vg);
        gc_red = 0.5 * (gc_red + gc_red.adjoint().eval());
        gs_red = 0.5 * (gs_red + gs_red.adjoint().eval());
        Eigen::MatrixXcd pc = node.v0.adjoint() *
                              slot_apply(gc_red, flux_slot, reduced.slot_dims, node.v0);
        Eigen::MatrixXcd ps = node.v0.adjoint() *
                              slot_apply(gs_red, flux_slot, reduced.slot_dims, node.v0);
        node.gc_op = 0.5 * (pc + pc.adjoint().eval());
        node.gs_op = 0.5 * (ps + ps.adjoint().eval());

        frames.nodes.push_back(std::move(node));
    }

    // Switch matrices between adjacent nodes.
    std::vector<int> slot_dims;
    for (size_t g = 0; g < model.config().groups.size(); ++g)
        slot_dims.push_back(model.config().cutoffs[g]);
    for (int m = 0; m + 1 < n_nodes; ++m) {
        auto& cur = frames.nodes[m];
        auto& next = frames.nodes[m + 1];
        cur.t_inc = frame_transfer(cur, next, flux_slot, slot_dims);
        next.t_dec = frame_transfer(next, cur, flux_slot, slot_dims);
    }
    return frames;
}

Eigen::MatrixXcd frame_transfer(const FrameNode& from, const FrameNode& to,
                                int flux_slot, const std::vector<int>& slot_dims) {
    Eigen::MatrixXcd M_g = to.flux_group.basis.adjoint() * from.flux_group.basis;
    return to.v0.adjoint() * slot_apply(M_g, flux_slot, slot_dims, from.v0);
}

const Eigen::MatrixXcd& frame_switch(const Frames& frames, int m, int direction) {
    if (m < 0 || m >= frames.node_count())
        throw Error(ErrorCode::GridEdge, "frame node out of range");
    if (direction == +1) {
        if (m + 1 >= frames.node_count())
            throw Error(ErrorCode::GridEdge, "no next frame node");
        return frames.nodes[m].t_inc;
    }
    if (direction == -1) {
        if (m == 0)
            throw Error(ErrorCode::GridEdge, "no previous frame node");
        return frames.nodes[m].t_dec;
    }
    throw Error(ErrorCode::InvalidArgument, "direction must be +1 or -1");
}

namespace {

constexpr char kFramesMagic[8] = {'C', 'Q', 'F', 'R', '0', '0', '0', '1'};

void write_string(std::ostream& os, const std::string& s) {
    const uint64_t n = s.size();
    os.write(reinterpret_cast<const char*>(&n), sizeof(n));
    os.write(s.data(), static_cast<std::streamsize>(n));
}

std::string read_string(std::istream& is) {
    uint64_t n = 0;
    is.read(reinterpret_cast<char*>(&n), sizeof(n));
    std::string s(n, '\0');
    is.read(s.data(), static_cast<std::streamsize>(n));
    return s;
}

template <typename Scalar>
void write_matrix(std::ostream& os, const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m) {
    const int64_t rows = m.rows(), cols = m.cols();
    os.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    os.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(sizeof(Scalar) * rows * cols));
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> read_matrix(std::istream& is) {
    int64_t rows = 0, cols = 0;
    is.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    is.read(reinterpret_cast<char*>(&cols), sizeof(cols));
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
    is.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(Scalar) * rows * cols));
    return m;
}

void write_vector(std::ostream& os, const Eigen::VectorXd& v) {
    Eigen::MatrixXd m = v;
    write_matrix(os, m);
}

Eigen::VectorXd read_vector(std::istream& is) {
    Eigen::MatrixXd m = read_matrix<double>(is);
    return Eigen::VectorXd(m.col(0));
}

void write_group(std::ostream& os, const GroupReduction& g) {
    const uint64_t nm = g.members.size();
    os.write(reinterpret_cast<const char*>(&nm), sizeof(nm));
    for (int m : g.members)
        os.write(reinterpret_cast<const char*>(&m), sizeof(m));
    os.write(reinterpret_cast<const char*>(&g.cutoff), sizeof(g.cutoff));
    write_vector(os, g.eigvals);
    write_matrix(os, g.basis);
    const uint64_t nr = g.reduced_n.size();
    os.write(reinterpret_cast<const char*>(&nr), sizeof(nr));
    for (const auto& r : g.reduced_n)
        write_matrix(os, r);
}

GroupReduction read_group(std::istream& is) {
    GroupReduction g;
    uint64_t nm = 0;
    is.read(reinterpret_cast<char*>(&nm), sizeof(nm));
    g.members.resize(nm);
    for (auto& m : g.members)
        is.read(reinterpret_cast<char*>(&m), sizeof(m));
    is.read(reinterpret_cast<char*>(&g.cutoff), sizeof(g.cutoff));
    g.eigvals = read_vector(is);
    g.basis = read_matrix<Complex>(is);
    uint64_t nr = 0;
    is.read(reinterpret_cast<char*>(&nr), sizeof(nr));
    g.reduced_n.resize(nr);
    for (auto& r : g.reduced_n)
        r = read_matrix<Complex>(is);
    return g;
}

} // namespace

void save_frames(const Frames& frames, std::ostream& os) {
    os.write(kFramesMagic, sizeof(kFramesMagic));
    write_string(os, frames.driven_line);
    const uint64_t nheld = frames.held.size();
    os.write(reinterpret_cast<const char*>(&nheld), sizeof(nheld));
    for (const auto& [line, value] : frames.held) {
        write_string(os, line);
        os.write(reinterpret_cast<const char*>(&value), sizeof(value));
    }
    os.write(reinterpret_cast<const char*>(&frames.theta_start), sizeof(double));
    os.write(reinterpret_cast<const char*>(&frames.step), sizeof(double));
    os.write(reinterpret_cast<const char*>(&frames.n0), sizeof(int));
    os.write(reinterpret_cast<const char*>(&frames.coeff_cos), sizeof(double));
    os.write(reinterpret_cast<const char*>(&frames.coeff_sin), sizeof(double));
    const uint64_t np = frames.drive_ports.size();
    os.write(reinterpret_cast<const char*>(&np), sizeof(np));
    for (int p : frames.drive_ports)
        os.write(reinterpret_cast<const char*>(&p), sizeof(p));
    const uint64_t nn = frames.nodes.size();
    os.write(reinterpret_cast<const char*>(&nn), sizeof(nn));
    for (const auto& node : frames.nodes) {
        os.write(reinterpret_cast<const char*>(&node.theta), sizeof(double));
        write_vector(os, node.e0);
        write_matrix(os, node.v0);
        write_group(os, node.flux_group);
        write_matrix(os, node.rate_op);
        write_matrix(os, node.gc_op);
        write_matrix(os, node.gs_op);
        const uint64_t nd = node.drive_ops.size();
        os.write(reinterpret_cast<const char*>(&nd), sizeof(nd));
        for (const auto& d : node.drive_ops)
            write_matrix(os, d);
        write_matrix(os, node.t_inc);
        write_matrix(os, node.t_dec);
    }
}

Frames load_frames(std::istream& is) {
    char magic[8];
    is.read(magic, sizeof(magic));
    if (std::memcmp(magic, kFramesMagic, sizeof(magic)) != 0)
        throw Error(ErrorCode::ParseError, "not a frames cache file");
    Frames frames;
    frames.driven_line = read_string(is);
    uint64_t nheld = 0;
    is.read(reinterpret_cast<char*>(&nheld), sizeof(nheld));
    for (uint64_t k = 0; k < nheld; ++k) {
        std::string line = read_string(is);
        double value = 0.0;
        is.read(reinterpret_cast<char*>(&value), sizeof(value));
        frames.held[line] = value;
    }
    is.read(reinterpret_cast<char*>(&frames.theta_start), sizeof(double));
    is.read(reinterpret_cast<char*>(&frames.step), sizeof(double));
    is.read(reinterpret_cast<char*>(&frames.n0), sizeof(int));
    is.read(reinterpret_cast<char*>(&frames.coeff_cos), sizeof(double));
    is.read(reinterpret_cast<char*>(&frames.coeff_sin), sizeof(double));
    uint64_t np = 0;
    is.read(reinterpret_cast<char*>(&np), sizeof(np));
    frames.drive_ports.resize(np);
    for (auto& p : frames.drive_ports)
        is.read(reinterpret_cast<char*>(&p), sizeof(p));
    uint64_t nn = 0;
    is.read(reinterpret_cast<char*>(&nn), sizeof(nn));
    frames.nodes.resize(nn);
    for (auto& node : frames.nodes) {
        is.read(reinterpret_cast<char*>(&node.theta), sizeof(double));
        node.e0 = read_vector(is);
        node.v0 = read_matrix<Complex>(is);
        node.flux_group = read_group(is);
        node.rate_op = read_matrix<Complex>(is);
        node.gc_op = read_matrix<Complex>(is);
        node.gs_op = read_matrix<Complex>(is);
        uint64_t nd = 0;
        is.read(reinterpret_cast<char*>(&nd), sizeof(nd));
        node.drive_ops.resize(nd);
        for (auto& d : node.drive_ops)
            d = read_matrix<Complex>(is);
        node.t_inc = read_matrix<Complex>(is);
        node.t_dec = read_matrix<Complex>(is);
    }
    if (!is)
        throw Error(ErrorCode::ParseError, "truncated frames cache file");
    return frames;
}

void save_frames_file(const Frames& frames, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error(ErrorCode::ParseError, "cannot open '" + path + "' for writing");
    save_frames(frames, os);
}

std::optional<Frames> load_frames_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        return std::nullopt;
    return load_frames(is);
}

} // namespace cqed
