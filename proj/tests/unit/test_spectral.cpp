#include <doctest.h>

#include <cmath>

#include "cqed/config.hpp"
#include "cqed/spectral.hpp"
#include "cqed/units.hpp"
#include "../support/circuits.hpp"

using namespace cqed;
using namespace cqed::units;
namespace ct = cqed::testing;

namespace {

LabeledSpectrum synthetic_spectrum(double w100, double w010, double w001, double w110,
                                   double w101, double w011, double w111) {
    LabeledSpectrum s;
    auto put = [&](std::vector<int> occ, double w) {
        s.levels.push_back({std::move(occ), w, 1.0, 0});
    };
    put({0, 0, 0}, 0.0);
    put({1, 0, 0}, w100);
    put({0, 1, 0}, w010);
    put({0, 0, 1}, w001);
    put({1, 1, 0}, w110);
    put({1, 0, 1}, w101);
    put({0, 1, 1}, w011);
    put({1, 1, 1}, w111);
    return s;
}

CircuitSpec three_qubit_shell() {
    CircuitSpec spec;
    spec.transmon_count = 3;
    spec.qubit_indices = {0, 1, 2};
    return spec;
}

} // namespace

TEST_SUITE("spectral-analysis") {

TEST_CASE("decoupled transmons label with full confidence and zero coupling") {
    auto spec = ct::two_transmon(5.0, 5.5, 0.0);
    SystemModel model(spec, 3, model_config_for(spec, 3, 10, 7));
    auto s = spectrum_at(model, {}, default_label_targets(spec));
    CHECK(s.warnings.empty());
    for (const auto& level : s.levels)
        CHECK(level.confidence > 0.999999);
    auto rep = coupling_strengths(s, spec);
    CHECK(std::abs(radns_to_khz(rep.zeta12)) < 1e-6);
}

TEST_CASE("additive pair frequencies give zero ZZ") {
    auto s = synthetic_spectrum(1.0, 2.0, 3.0, 3.0, 4.0, 5.0, 6.0);
    auto rep = coupling_strengths(s, three_qubit_shell());
    CHECK(rep.zeta12 == doctest::Approx(0.0));
    CHECK(rep.zeta13 == doctest::Approx(0.0));
    CHECK(rep.zeta23 == doctest::Approx(0.0));
    CHECK(rep.zeta_zzz == doctest::Approx(0.0));
}

TEST_CASE("commuting two-qubit blocks carry no three-body coupling") {
    const double z12 = -0.002, z23 = 0.0015;
    const double a = 1.0, b = 2.0, c = 3.0;
    auto s = synthetic_spectrum(a, b, c, a + b + z12, a + c, b + c + z23,
                                a + b + c + z12 + z23);
    auto rep = coupling_strengths(s, three_qubit_shell());
    CHECK(rep.zeta12 == doctest::Approx(z12));
    CHECK(rep.zeta23 == doctest::Approx(z23));
    CHECK(rep.zeta13 == doctest::Approx(0.0));
    CHECK(std::abs(rep.zeta_zzz) < 1e-15);
}

TEST_CASE("couplings ignore a global energy shift") {
    auto spec = ct::stc_two_qubit_L();
    SystemModel model(spec, 4, model_config_for(spec, 4, 15, 9));
    ReducedModel reduced = model.reduced_at({{"L", 0.0}});
    auto eig = lowest_eigenpairs(reduced.h_total, static_cast<int>(reduced.dim()));
    auto labels = label_group_levels(reduced, model.mode_bases({{"L", 0.0}}));
    auto targets = default_label_targets(spec);

    auto plain = label_eigenstates(eig.values, eig.vectors, reduced, labels, targets);
    Eigen::VectorXd shifted = eig.values.array() + 17.3;
    auto moved = label_eigenstates(shifted, eig.vectors, reduced, labels, targets);
    auto r1 = coupling_strengths(plain, spec);
    auto r2 = coupling_strengths(moved, spec);
    CHECK(r1.zeta12 == doctest::Approx(r2.zeta12).epsilon(1e-12));
    CHECK(moved.omega({0, 0, 0}) == 0.0);
}

TEST_CASE("near-degenerate pair resolves by overlap rather than energy order") {
    // Strongly hybridized resonant pair: the two single-excitation
    // eigenstates are half-half mixtures; labeling must stay injective and
    // flag the ambiguity instead of failing.
    auto spec = ct::two_transmon(5.0, 5.0, 2.0, 80.0);
    SystemModel model(spec, 3, model_config_for(spec, 3, 12, 7));
    auto s = spectrum_at(model, {}, default_label_targets(spec));
    const auto* l10 = s.find({1, 0});
    const auto* l01 = s.find({0, 1});
    REQUIRE(l10);
    REQUIRE(l01);
    CHECK(l10->eig_index != l01->eig_index);
    CHECK(!s.warnings.empty());  // ~0.5 confidences get reported

    // Detuned pair with moderate coupling: labels follow the dominant
    // character even where hybridization shifts the energy order.
    auto spec2 = ct::two_transmon(5.0, 5.02, 0.5, 80.0);
    SystemModel model2(spec2, 3, model_config_for(spec2, 3, 12, 7));
    auto s2 = spectrum_at(model2, {}, default_label_targets(spec2));
    const auto* a = s2.find({1, 0});
    const auto* b = s2.find({0, 1});
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->confidence > 0.5);
    CHECK(b->confidence > 0.5);
}

TEST_CASE("sweep of a nearly flux-free model is constant") {
    auto spec = ct::dtc_two_qubit_L();
    spec.loops[0].ratio_rJ = 1e-6;
    SystemModel model(spec, 2, model_config_for(spec, 2, 15, 9));
    std::vector<double> thetas{0.0, 0.25 * pi, 0.5 * pi};
    auto sweep = sweep_flux(model, "L", thetas, {}, default_label_targets(spec), 2);
    REQUIRE(sweep.size() == 3);
    const double base = sweep[0].omega({1, 0, 0, 0});
    for (const auto& s : sweep)
        CHECK(std::abs(s.omega({1, 0, 0, 0}) - base) < 1e-7);
}

TEST_CASE("labels track smoothly through a fine sweep") {
    auto spec = ct::dtc_two_qubit_L();
    SystemModel model(spec, 2, model_config_for(spec, 2, 15, 9));
    std::vector<double> thetas;
    for (int k = 0; k <= 10; ++k)
        thetas.push_back((0.30 + 0.01 * k) * pi);
    auto sweep = sweep_flux(model, "L", thetas, {}, default_label_targets(spec), 2);
    for (size_t p = 1; p < sweep.size(); ++p) {
        for (const auto& level : sweep[p].levels) {
            const auto* prev = sweep[p - 1].find(level.occ);
            if (!prev || level.occ == std::vector<int>{0, 0, 0, 0})
                continue;
            // Local spacing at this point: distance to the nearest other
            // labeled frequency.
            double spacing = 1e300;
            for (const auto& other : sweep[p].levels)
                if (other.occ != level.occ)
                    spacing = std::min(spacing, std::abs(other.omega - level.omega));
            CHECK(std::abs(level.omega - prev->omega) < 0.05 * spacing + 1e-9);
        }
    }
}

TEST_CASE("idle search finds the analytic zero of a cosine") {
    std::vector<double> thetas, zetas;
    for (int k = 0; k <= 20; ++k) {
        thetas.push_back(pi * k / 20.0);
        zetas.push_back(std::cos(thetas.back()));
    }
    auto idle = find_idle(thetas, zetas, [](double t) { return std::cos(t); });
    CHECK(std::abs(idle.theta_id - 0.5 * pi) < 1e-3 * pi);
    CHECK(std::abs(idle.zeta_id) < 1e-3);
}

TEST_CASE("monotone coupling reports no bracket") {
    std::vector<double> thetas{0.0, 0.5, 1.0, 1.5};
    std::vector<double> zetas{1.0, 2.0, 3.0, 4.0};
    CHECK_THROWS_AS(find_idle(thetas, zetas, [](double t) { return 1.0 + t; }), Error);
}

TEST_CASE("missing labels are reported as errors") {
    auto s = synthetic_spectrum(1, 2, 3, 3, 4, 5, 6);
    CHECK_THROWS_AS(s.omega({2, 0, 0}), Error);
}

} // TEST_SUITE
