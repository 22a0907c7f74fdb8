#include <doctest.h>

#include "cqed/circuit.hpp"
#include "cqed/units.hpp"
#include "../support/circuits.hpp"

using namespace cqed;
using namespace cqed::units;
namespace ct = cqed::testing;

TEST_SUITE("circuit-model") {

TEST_CASE("capacitance matrix of a single transmon") {
    auto spec = ct::single_transmon(5.0, 80.0);
    auto M = build_capacitance_matrix(spec);
    REQUIRE(M.rows() == 1);
    CHECK(M(0, 0) == doctest::Approx(80.0));
}

TEST_CASE("capacitance matrix of two coupled nodes") {
    auto spec = ct::two_transmon(5.0, 5.5, 0.05);
    auto M = build_capacitance_matrix(spec);
    CHECK(M(0, 0) == doctest::Approx(80.05));
    CHECK(M(1, 1) == doctest::Approx(80.05));
    CHECK(M(0, 1) == doctest::Approx(-0.05));
    CHECK(M(1, 0) == doctest::Approx(-0.05));
}

TEST_CASE("published capacitance table: diagonal entries are row sums") {
    auto spec = ct::dtc_three_qubit();
    auto M = build_capacitance_matrix(spec);
    for (int i = 0; i < 7; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < 7; ++j)
            row_sum += spec.cap_matrix_fF(i, j);
        CHECK(M(i, i) == doctest::Approx(row_sum));
    }
    // Row 4 by hand: shunt + all couplings of transmon 4.
    CHECK(M(3, 3) ==
          doctest::Approx(80.0 + 8.0 + 0.1 + 0.006 + 1.0 + 0.05 + 0.01));
}

TEST_CASE("energy matrix of an isolated 80 fF transmon") {
    Eigen::MatrixXd M = Eigen::MatrixXd::Constant(1, 1, 80.0);
    auto W = derive_energy_matrix(M);
    CHECK(radns_to_mhz(W(0, 0)) == doctest::Approx(242.1).epsilon(1e-3));
}

TEST_CASE("energy matrix reproduces the published diagonal") {
    auto spec = ct::dtc_three_qubit();
    auto W = derive_energy_matrix(build_capacitance_matrix(spec));
    CHECK(radns_to_mhz(W(0, 0)) == doctest::Approx(221.0).epsilon(0.005));
    CHECK(radns_to_mhz(W(1, 1)) == doctest::Approx(204.0).epsilon(0.005));
}

TEST_CASE("doubling every capacitance halves the energy matrix") {
    auto spec = ct::dtc_three_qubit();
    auto M = build_capacitance_matrix(spec);
    auto W1 = derive_energy_matrix(M);
    auto W2 = derive_energy_matrix(Eigen::MatrixXd(2.0 * M));
    CHECK((W2 - 0.5 * W1).norm() < 1e-12 * W1.norm());
}

TEST_CASE("junction derivation matches the published rows") {
    auto spec = ct::dtc_three_qubit();
    auto derived = derive_all(spec);
    CHECK(radns_to_ghz(derived.omega_J(0)) == doctest::Approx(15.4).epsilon(0.01));
    CHECK(derived.I_c_nA(0) == doctest::Approx(31.0).epsilon(0.01));
    CHECK(radns_to_mhz(derived.g(0, 3)) == doctest::Approx(283.0).epsilon(0.01));
    CHECK(radns_to_mhz(derived.g(0, 1)) == doctest::Approx(2.34).epsilon(0.01));
    CHECK(radns_to_ghz(derived.loop_omega_J[0]) == doctest::Approx(9.69).epsilon(0.01));
    CHECK(derived.loop_I_c_nA[0] == doctest::Approx(19.5).epsilon(0.01));
}

TEST_CASE("loop junction with equal neighbors scales by the ratio") {
    auto spec = ct::dtc_two_qubit_L();
    auto derived = derive_all(spec);
    // omega_4 == omega_5 by design, so omega_J8 = r_J * omega_J4 almost
    // exactly (W_44 and W_55 differ only through tiny parasitics).
    const double mean = 0.5 * (derived.omega_J(2) + derived.omega_J(3));
    CHECK(derived.loop_omega_J[0] == doctest::Approx(0.3 * mean));
}

TEST_CASE("squid split preserves the total and the asymmetry ratio") {
    auto spec = ct::stc_two_qubit_L();
    auto derived = derive_all(spec);
    const auto [a, b] = derived.squid_omega_J[0];
    CHECK(a + b == doctest::Approx(derived.omega_J(2)));
    CHECK(b / a == doctest::Approx(1.0 / 1.71));
}

TEST_CASE("validation accepts the published circuits") {
    CHECK(validate_spec(ct::dtc_three_qubit()).empty());
    CHECK(validate_spec(ct::stc_three_qubit()).empty());
    CHECK(validate_spec(ct::dtc_two_qubit_L()).empty());
    CHECK(validate_spec(ct::stc_two_qubit_L()).empty());
}

TEST_CASE("validation flags an asymmetric capacitance entry") {
    auto spec = ct::two_transmon(5.0, 5.5, 0.05);
    spec.cap_matrix_fF(0, 1) = 0.06;  // break the symmetry by hand
    auto diags = validate_spec(spec);
    REQUIRE(!diags.empty());
    CHECK(diags[0].code == "AsymmetricCapacitance");
}

TEST_CASE("validation flags a loop that references a qubit") {
    auto spec = ct::dtc_two_qubit_L();
    spec.loops[0].node_a = 0;
    bool found = false;
    for (const auto& d : validate_spec(spec))
        if (d.code == "LoopOnQubit")
            found = true;
    CHECK(found);
}

TEST_CASE("unphysical capacitances fail the definiteness check") {
    CircuitSpec spec = ct::two_transmon(5.0, 5.5, 0.0, 1.0);
    spec.cap_matrix_fF(0, 1) = -200.0;
    spec.cap_matrix_fF(1, 0) = -200.0;
    CHECK_THROWS_AS(build_capacitance_matrix(spec), Error);
}

TEST_CASE("energy matrix is exactly symmetric") {
    auto spec = ct::dtc_three_qubit();
    auto W = derive_energy_matrix(build_capacitance_matrix(spec));
    CHECK((W - W.transpose()).norm() == 0.0);
}

TEST_CASE("couplings are invariant under transmon relabeling") {
    auto spec = ct::two_transmon(5.0, 5.5, 0.4);
    auto swapped = ct::two_transmon(5.5, 5.0, 0.4);
    auto d1 = derive_all(spec);
    auto d2 = derive_all(swapped);
    CHECK(d1.g(0, 1) == doctest::Approx(d2.g(1, 0)));
    CHECK(d1.g(0, 1) == doctest::Approx(d1.g(1, 0)));
}

TEST_CASE("decoupled nodes give a diagonal energy matrix and zero couplings") {
    auto spec = ct::two_transmon(5.0, 5.5, 0.0);
    auto derived = derive_all(spec);
    CHECK(derived.W(0, 1) == doctest::Approx(0.0));
    CHECK(derived.g(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("flux-rate weight tables follow the capacitances") {
    auto spec = ct::dtc_two_qubit_L();
    auto derived = derive_all(spec);
    CHECK(derived.inv_omega_C(2, 3) ==
          doctest::Approx(spec.cap_matrix_fF(2, 3) / charging_rate_coeff));
}

} // TEST_SUITE
