#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "entdyn/haar.hpp"
#include "entdyn/phase_sums.hpp"
#include "entdyn/quantum_sim.hpp"
#include "entdyn/rng.hpp"

using namespace entdyn;

namespace {

const std::vector<double> kSpectrum{-1.3, -0.2, 0.45, 1.9};

// Independent evaluation of Tr rho_A^n for one unitary V: evolve |1> under V e^{-i E t} V^dag.
double trace_moment(const Eigen::MatrixXcd& V, const std::vector<double>& E, double t, int n, int dA, int dB) {
    const int d = dA * dB;
    Eigen::VectorXcd phase(d);
    for (int k = 0; k < d; ++k) phase(k) = std::exp(std::complex<double>(0.0, -E[static_cast<std::size_t>(k)] * t));
    const Eigen::VectorXcd psi = V * phase.asDiagonal() * V.adjoint().col(0);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dA, dA);
    for (int a = 0; a < dA; ++a)
        for (int a2 = 0; a2 < dA; ++a2)
            for (int b = 0; b < dB; ++b) rho(a, a2) += psi(a * dB + b) * std::conj(psi(a2 * dB + b));
    Eigen::MatrixXcd p = rho;
    for (int k = 1; k < n; ++k) p = p * rho;
    return p.trace().real();
}

}  // namespace

TEST_SUITE("haar") {

TEST_CASE("trace moment spec for n = 1 and 2") {
    const auto s1 = build_trace_moment_spec(1);
    CHECK(s1.q == 2);
    CHECK(s1.I == std::vector<Slot>{Slot::composite(0, 0), Slot::fixed()});
    CHECK(s1.I_prime == std::vector<Slot>{Slot::fixed(), Slot::composite(0, 0)});
    CHECK(s1.phase_coeffs == std::vector<int>{-1, 1});

    const auto s2 = build_trace_moment_spec(2);
    CHECK(s2.q == 4);
    CHECK(s2.num_a == 2);
    CHECK(s2.num_b == 2);
    CHECK(s2.phase_coeffs == std::vector<int>{-1, 1, -1, 1});
    CHECK(!s2.is_open());
    CHECK(build_matrix_element_spec(2).is_open());
}

TEST_CASE("every Q is phase balanced") {
    for (int n = 1; n <= 2; ++n) {
        const auto spec = build_trace_moment_spec(n);
        for (const auto& tau : all_permutations(spec.q)) CHECK(compute_Q(spec, tau).balance() == 0);
    }
}

TEST_CASE("R and Q sample entries for the purity") {
    const auto spec = build_trace_moment_spec(2);
    const auto id = Permutation::identity(4);
    CHECK(compute_R(spec, id) == RValue{0, 0, OperatorShape::Scalar});
    CHECK(compute_Q(spec, id).iota_multiples == std::vector<int>{-1, -1, 1, 1});
    const auto full = Permutation::from_cycles(4, {{1, 2, 3, 4}});
    CHECK(compute_R(spec, full).exponent_dA == 1);
    CHECK(compute_R(spec, full).exponent_dB == 2);
    CHECK(compute_Q(spec, full).iota_multiples == std::vector<int>{0});
    const auto swap13 = Permutation::from_cycles(4, {{1, 3}});
    CHECK(compute_Q(spec, swap13).iota_multiples == std::vector<int>{-2, 1, 1});
}

TEST_CASE("t = 0 and degenerate spectra keep the state pure") {
    const std::vector<double> flat(4, 0.7);
    for (int n = 1; n <= 3; ++n) {
        const auto avg = haar_average_moment(n, 2, 2);
        CHECK(evaluate_average(avg, kSpectrum, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(evaluate_average(avg, flat, 2.3) == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("trivial subsystem gives a pure reduced state") {
    const auto avg = haar_average_moment(2, 1, 4);
    for (double t : {0.3, 1.1, 3.0}) CHECK(evaluate_average(avg, kSpectrum, t) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("trace moments are symmetric under A <-> B") {
    const std::vector<double> E{-1.0, -0.6, -0.1, 0.2, 0.9, 1.4};
    for (int n = 2; n <= 3; ++n) {
        const auto ab = haar_average_moment(n, 2, 3);
        const auto ba = haar_average_moment(n, 3, 2);
        for (double t : {0.4, 1.7}) CHECK(evaluate_average(ab, E, t) == doctest::Approx(evaluate_average(ba, E, t)).epsilon(1e-12));
    }
}

TEST_CASE("matrix average traces to the trace moment") {
    const auto m = haar_average_matrix(2, 2, 2);
    const auto s = haar_average_moment(2, 2, 2);
    for (double t : {0.0, 0.5, 2.2}) {
        const auto M = evaluate_matrix_average(m, kSpectrum, t);
        CHECK(M.trace().real() == doctest::Approx(evaluate_average(s, kSpectrum, t)).epsilon(1e-12));
        CHECK(std::abs(M.trace().imag()) < 1e-12);
        CHECK((M - M.adjoint()).norm() < 1e-12);
    }
}

TEST_CASE("n = 1 matrix average has the projector-plus-mixed form") {
    const std::vector<double> E{-0.9, -0.3, 0.1, 0.4, 0.8, 1.6};
    const auto m = haar_average_matrix(1, 3, 2);
    for (double t : {0.2, 0.9, 2.5}) {
        const auto M = evaluate_matrix_average(m, E, t);
        const double c = chi(E, t), d = 6.0;
        const double proj = (c - 1) / (d * d - 1), mixed = (d * d - c) / (d * d - 1) / 3.0;
        CHECK(M(0, 0).real() == doctest::Approx(proj + mixed).epsilon(1e-12));
        CHECK(M(1, 1).real() == doctest::Approx(mixed).epsilon(1e-12));
        CHECK(M(2, 2).real() == doctest::Approx(mixed).epsilon(1e-12));
        CHECK(std::abs(M(0, 1)) < 1e-13);
        CHECK(std::abs(M(1, 2)) < 1e-13);
    }
}

TEST_CASE("small dimensions need the generalized Weingarten function") {
    // d = 2 < q = 4: only the general function reproduces the exact value 1 at d_A = 1.
    const std::vector<double> E{-0.4, 0.9};
    const auto avg = haar_average_moment(2, 1, 2);
    CHECK(evaluate_average(avg, E, 1.3) == doctest::Approx(1.0).epsilon(1e-13));
    const auto avg2 = haar_average_moment(2, 2, 1);
    // d_B = 1: rho_A is the full pure state.
    CHECK(evaluate_average(avg2, E, 1.3) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("engine agrees with brute-force Haar sampling") {
    // 20000 unitaries; each moment estimate is checked within 5 standard errors.
    const std::size_t n = 20000;
    const std::vector<double> times{0.3, 0.8, 1.5, 3.0};
    const auto a2 = haar_average_moment(2, 2, 2);
    const auto a3 = haar_average_moment(3, 2, 2);
    std::vector<std::vector<double>> s2(times.size()), s3(times.size());
    for (std::size_t i = 0; i < n; ++i) {
        RngStream rng(20240, i);
        const auto V = sample_haar_unitary(4, rng);
        for (std::size_t k = 0; k < times.size(); ++k) {
            s2[k].push_back(trace_moment(V, kSpectrum, times[k], 2, 2, 2));
            s3[k].push_back(trace_moment(V, kSpectrum, times[k], 3, 2, 2));
        }
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto m2 = mean_and_stderr(s2[k]);
        const auto m3 = mean_and_stderr(s3[k]);
        CHECK(std::abs(m2.mean - evaluate_average(a2, kSpectrum, times[k])) < 5 * m2.stderr_);
        CHECK(std::abs(m3.mean - evaluate_average(a3, kSpectrum, times[k])) < 5 * m3.stderr_);
    }
}

TEST_CASE("evaluation rejects a mismatched spectrum") {
    const auto avg = haar_average_moment(1, 2, 2);
    const std::vector<double> E{0.1, 0.2, 0.3};
    CHECK_THROWS(evaluate_average(avg, E, 1.0));
}

}  // TEST_SUITE
