#include <doctest.h>

#include "cqed/eigsolve.hpp"
#include "cqed/hamiltonian.hpp"
#include "cqed/units.hpp"
#include "../support/circuits.hpp"
#include "../support/oracles.hpp"

using namespace cqed;
using namespace cqed::units;
namespace ct = cqed::testing;

namespace {

HamiltonianParts assembled(const CircuitSpec& spec, int N) {
    return assemble(spec, derive_all(spec), N);
}

} // namespace

TEST_SUITE("hamiltonian-builder") {

TEST_CASE("single transmon spectrum sits at the design frequency") {
    auto spec = ct::single_transmon(5.0, 80.0);
    auto parts = assembled(spec, 10);
    Eigen::MatrixXcd H = dense_hamiltonian_at(parts, {});
    auto eig = lowest_eigenpairs(H, 3);
    const double f01 = radns_to_ghz(eig.values(1) - eig.values(0));
    CHECK(std::abs(f01 - 5.0) / 5.0 < 0.02);
}

TEST_CASE("diagonal energy matrix produces no charge cross terms") {
    auto spec = ct::two_transmon(5.0, 5.5, 0.0);
    auto parts = assembled(spec, 3);
    // Separable Hamiltonian: spectrum is the set of sums of mode spectra.
    Eigen::MatrixXcd H = dense_hamiltonian_at(parts, {});
    auto full = lowest_eigenpairs(H, 4);

    auto mode_problem_a = group_problem(parts, {0});
    auto mode_problem_b = group_problem(parts, {1});
    auto ea = lowest_eigenpairs(Eigen::MatrixXcd(mode_problem_a.at({})), 2);
    auto eb = lowest_eigenpairs(Eigen::MatrixXcd(mode_problem_b.at({})), 2);
    std::vector<double> sums;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            sums.push_back(ea.values(i) + eb.values(j));
    std::sort(sums.begin(), sums.end());
    for (int k = 0; k < 4; ++k)
        CHECK(full.values(k) == doctest::Approx(sums[k]).epsilon(1e-10));
}

TEST_CASE("two-transmon Hamiltonian commutes with the charge parity mirror") {
    auto spec = ct::two_transmon(5.0, 5.5, 0.3);
    auto parts = assembled(spec, 2);
    Eigen::MatrixXcd H = dense_hamiltonian_at(parts, {});
    const int d = 5;
    // n -> -n per mode: reverse each mode's basis.
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            P(i * d + j, (d - 1 - i) * d + (d - 1 - j)) = 1.0;
    CHECK((P * H * P - H).cwiseAbs().maxCoeff() < 1e-12 * H.cwiseAbs().maxCoeff());
}

TEST_CASE("flux periodicity is exact") {
    auto spec = ct::dtc_two_qubit_L();
    auto parts = assembled(spec, 1);
    Eigen::MatrixXcd a = dense_hamiltonian_at(parts, {{"L", 0.65 * pi}});
    Eigen::MatrixXcd b = dense_hamiltonian_at(parts, {{"L", 0.65 * pi + 2.0 * pi}});
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assembled Hamiltonian is Hermitian at a generic flux") {
    auto spec = ct::dtc_two_qubit_L();
    auto parts = assembled(spec, 2);
    Eigen::MatrixXcd H = dense_hamiltonian_at(parts, {{"L", 0.65 * pi}});
    CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * H.cwiseAbs().maxCoeff());
}

TEST_CASE("missing flux value is reported") {
    auto spec = ct::dtc_two_qubit_L();
    auto parts = assembled(spec, 1);
    CHECK_THROWS_AS(hamiltonian_at(parts, {}), Error);
}

TEST_CASE("assembly matches an independent dense construction") {
    // Coupler pair with the loop junction, against the raw-formula oracle.
    auto spec = ct::dtc_two_qubit_L();
    auto derived = derive_all(spec);
    auto parts = assemble(spec, derived, 3);
    const double theta = 0.65 * pi;

    auto group = group_problem(parts, {2, 3});
    Eigen::MatrixXcd mine(group.at({{"L", theta}}));
    Eigen::MatrixXcd brute = oracles::two_mode_loop_hamiltonian(
        derived.W(2, 2), derived.W(3, 3), derived.W(2, 3), derived.omega_J(2),
        derived.omega_J(3), derived.loop_omega_J[0], theta, 3);
    CHECK((mine - brute).cwiseAbs().maxCoeff() < 1e-12 * brute.cwiseAbs().maxCoeff());

    auto eig_mine = lowest_eigenpairs(mine, 10);
    auto eig_brute = lowest_eigenpairs(brute, 10);
    for (int k = 0; k < 10; ++k)
        CHECK(eig_mine.values(k) ==
              doctest::Approx(eig_brute.values(k)).epsilon(1e-10));
}

TEST_CASE("spectrum is invariant under flux sign flip") {
    auto spec = ct::dtc_two_qubit_L();
    auto parts = assembled(spec, 2);
    auto plus = lowest_eigenpairs(dense_hamiltonian_at(parts, {{"L", 0.4 * pi}}), 8);
    auto minus = lowest_eigenpairs(dense_hamiltonian_at(parts, {{"L", -0.4 * pi}}), 8);
    for (int k = 0; k < 8; ++k)
        CHECK(plus.values(k) == doctest::Approx(minus.values(k)).epsilon(1e-11));
}

TEST_CASE("STC SQUID reduces to a plain junction at zero flux") {
    auto spec = ct::stc_two_qubit_L();
    auto derived = derive_all(spec);
    auto parts = assemble(spec, derived, 4);

    auto group = group_problem(parts, {2});
    Eigen::MatrixXcd at0(group.at({{"L", 0.0}}));
    // Hand-built fixed-frequency transmon with omega_J = omega_JA + omega_JB.
    auto mode = single_mode_operators(4);
    Eigen::MatrixXcd plain = 4.0 * derived.W(2, 2) * (mode.n_op * mode.n_op) -
                             derived.omega_J(2) * mode.cos_op;
    CHECK((at0 - plain).cwiseAbs().maxCoeff() < 1e-12 * plain.cwiseAbs().maxCoeff());

    // At pi the effective cos coefficient is omega_JA - omega_JB.
    Eigen::MatrixXcd at_pi(group.at({{"L", pi}}));
    Eigen::MatrixXcd flipped =
        4.0 * derived.W(2, 2) * (mode.n_op * mode.n_op) -
        (derived.squid_omega_J[0].first - derived.squid_omega_J[0].second) * mode.cos_op;
    CHECK((at_pi - flipped).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("DTC flux-rate weights live on the coupler pair") {
    auto spec = ct::dtc_two_qubit_L();
    auto derived = derive_all(spec);
    auto parts = assemble(spec, derived, 1);
    REQUIRE(parts.flux_elements.size() == 1);
    const auto& el = parts.flux_elements[0];
    // rate_coeff = W^T t with t = (1/omega_C45) (0, 0, -1, +1).
    Eigen::VectorXd t = Eigen::VectorXd::Zero(4);
    t(2) = -derived.inv_omega_C(2, 3);
    t(3) = +derived.inv_omega_C(2, 3);
    Eigen::VectorXd expect = derived.W.transpose() * t;
    CHECK((el.rate_coeff - expect).norm() < 1e-14 * expect.norm());
}

TEST_CASE("STC flux-rate weights touch every transmon") {
    auto spec = ct::stc_two_qubit_L();
    auto derived = derive_all(spec);
    auto parts = assemble(spec, derived, 1);
    REQUIRE(parts.flux_elements.size() == 1);
    const auto& el = parts.flux_elements[0];
    Eigen::VectorXd t = Eigen::VectorXd::Zero(3);
    double sum = 0.0;
    for (int j = 0; j < 3; ++j)
        sum += derived.inv_omega_C(j, 2);
    t(0) = -0.5 * derived.inv_omega_C(0, 2);
    t(1) = -0.5 * derived.inv_omega_C(1, 2);
    t(2) = 0.5 * sum;
    Eigen::VectorXd expect = derived.W.transpose() * t;
    CHECK((el.rate_coeff - expect).norm() < 1e-14 * expect.norm());
    for (int j = 0; j < 3; ++j)
        CHECK(t(j) != 0.0);
}

TEST_CASE("drive operator reduces to the diagonal term for diagonal W") {
    auto spec = ct::two_transmon(5.0, 5.5, 0.0);
    auto parts = assembled(spec, 1);
    auto controls = control_operators(parts);
    const auto& d0 = controls.drive.at(0);
    Eigen::MatrixXcd expect =
        parts.derived.W(0, 0) * Eigen::MatrixXcd(parts.n_ops[0]);
    CHECK((Eigen::MatrixXcd(d0) - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("control operators are Hermitian") {
    auto spec = ct::dtc_two_qubit_L();
    auto parts = assembled(spec, 2);
    auto controls = control_operators(parts);
    for (const auto& [line, op] : controls.flux_rate) {
        Eigen::MatrixXcd m(op);
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
    }
    for (const auto& [port, op] : controls.drive) {
        Eigen::MatrixXcd m(op);
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
    }
}

} // TEST_SUITE
