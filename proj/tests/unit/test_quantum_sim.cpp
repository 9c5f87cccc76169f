#include <doctest.h>

#include <cmath>
#include <complex>
#include <set>
#include <vector>

#include "entdyn/error.hpp"
#include "entdyn/phase_sums.hpp"
#include "entdyn/quantum_sim.hpp"
#include "entdyn/rng.hpp"
#include "entdyn/symgroup.hpp"

using namespace entdyn;
using cd = std::complex<double>;

TEST_SUITE("quantum_sim") {

TEST_CASE("rng streams are pure functions of seed, stream and counter") {
    RngStream a(9, 3), b(9, 3), c(9, 4), d(10, 3);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a();
        CHECK(x == b());
        CHECK(x != c());
        CHECK(x != d());
        seen.insert(x);
    }
    CHECK(seen.size() == 1000);
    CHECK(a.counter() == 1000);
    CHECK(RngStream(9, 3).substream(1)() == RngStream(9, 3).substream(1)());
    CHECK(RngStream(9, 3).substream(1)() != RngStream(9, 3).substream(2)());
}

TEST_CASE("rng distribution moments") {
    RngStream rng(1, 0);
    std::vector<double> u, z, e;
    for (int i = 0; i < 200000; ++i) {
        u.push_back(rng.uniform());
        z.push_back(rng.normal());
        e.push_back(rng.exponential(2.0));
    }
    const auto mu = mean_and_stderr(u), mz = mean_and_stderr(z), me = mean_and_stderr(e);
    CHECK(std::abs(mu.mean - 0.5) < 5 * mu.stderr_);
    CHECK(std::abs(mz.mean) < 5 * mz.stderr_);
    CHECK(std::abs(me.mean - 0.5) < 5 * me.stderr_);
    double z2 = 0;
    for (double v : z) z2 += v * v;
    CHECK(z2 / static_cast<double>(z.size()) == doctest::Approx(1.0).epsilon(0.01));
    for (double v : u) REQUIRE((v >= 0.0 && v < 1.0));
    CHECK(RngStream(2, 2).uniform_open_low() > 0.0);
}

TEST_CASE("GUE entries have the Gaussian-weight variances") {
    const int d = 4;
    double diag = 0, off_re = 0, off_im = 0, mean00 = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        RngStream rng(3, static_cast<std::uint64_t>(i));
        const auto H = sample_gue(d, 1.0, rng);
        REQUIRE((H - H.adjoint()).norm() == 0.0);
        mean00 += H(0, 0).real();
        diag += std::norm(H(0, 0));
        off_re += H(0, 1).real() * H(0, 1).real();
        off_im += H(0, 1).imag() * H(0, 1).imag();
    }
    CHECK(std::abs(mean00 / n) < 0.03);
    CHECK(diag / n == doctest::Approx(1.0).epsilon(0.03));
    CHECK(off_re / n == doctest::Approx(0.5).epsilon(0.03));
    CHECK(off_im / n == doctest::Approx(0.5).epsilon(0.03));

    double diag4 = 0;
    for (int i = 0; i < n; ++i) {
        RngStream rng(4, static_cast<std::uint64_t>(i));
        diag4 += std::norm(sample_gue(d, 4.0, rng)(1, 1));
    }
    CHECK(diag4 / n == doctest::Approx(0.25).epsilon(0.03));
    RngStream rng(0, 0);
    CHECK_THROWS_AS(sample_gue(3, 0.0, rng), ArgumentError);
}

TEST_CASE("Haar unitaries are unitary with the Weingarten second moments") {
    const int d = 4, n = 60000;
    double v00 = 0, v00v11 = 0;
    for (int i = 0; i < n; ++i) {
        RngStream rng(11, static_cast<std::uint64_t>(i));
        const auto V = sample_haar_unitary(d, rng);
        if (i < 50) REQUIRE((V * V.adjoint() - Eigen::MatrixXcd::Identity(d, d)).norm() < 1e-13);
        v00 += std::norm(V(0, 0));
        v00v11 += std::norm(V(0, 0)) * std::norm(V(1, 1));
    }
    CHECK(v00 / n == doctest::Approx(1.0 / d).epsilon(0.02));
    // E|V00|^2 |V11|^2 = Wg(d, Id) since only sigma = tau = Id pairs the indices.
    const double wg = weingarten(d, Partition{1, 1}).get_d();
    CHECK(v00v11 / n == doctest::Approx(wg).epsilon(0.04));

    double two = 0;
    for (int i = 0; i < n; ++i) {
        RngStream rng(12, static_cast<std::uint64_t>(i));
        two += std::norm(sample_haar_unitary(2, rng)(0, 0));
    }
    CHECK(two / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("Haar states are unit vectors with uniform weights") {
    double w = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        RngStream rng(13, static_cast<std::uint64_t>(i));
        const auto psi = sample_haar_state(5, rng);
        REQUIRE(psi.norm() == doctest::Approx(1.0).epsilon(1e-14));
        w += std::norm(psi(3));
    }
    CHECK(w / n == doctest::Approx(0.2).epsilon(0.02));
}

TEST_CASE("SO(3) samples are proper rotations with vanishing mean") {
    Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        RngStream rng(14, static_cast<std::uint64_t>(i));
        const auto R = sample_so3(rng);
        REQUIRE((R * R.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-13);
        REQUIRE(R.determinant() == doctest::Approx(1.0).epsilon(1e-13));
        sum += R;
    }
    CHECK((sum / n).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("evolution") {
    RngStream rng(15, 0);
    const auto H = sample_gue(6, 1.0, rng);
    const auto psi0 = sample_haar_state(6, rng);
    CHECK((evolve(H, psi0, 0.0) - psi0).norm() < 1e-13);
    CHECK(evolve(H, psi0, 2.7).norm() == doctest::Approx(1.0).epsilon(1e-13));

    // Energy shift only changes a global phase.
    const HermitianOperator H2 = H + 3.0 * HermitianOperator::Identity(6, 6);
    const auto a = evolve(H, psi0, 1.1), b = evolve(H2, psi0, 1.1);
    CHECK(std::abs(std::abs(a.dot(b)) - 1.0) < 1e-12);

    // Agrees with a Taylor series of exp(-iHt) for a short time.
    const double t = 0.05;
    StateVector term = psi0, sum = psi0;
    for (int k = 1; k < 30; ++k) {
        term = (cd(0, -t) / static_cast<double>(k)) * (H * term);
        sum += term;
    }
    CHECK((evolve(H, psi0, t) - sum).norm() < 1e-13);

    const std::vector<double> times{0.0, 0.5, 1.0};
    const Evolver ev(H, psi0);
    const auto S = ev.states(times);
    for (std::size_t k = 0; k < times.size(); ++k) CHECK((S.col(static_cast<Eigen::Index>(k)) - ev.state(times[k])).norm() < 1e-13);
}

TEST_CASE("partial traces of product and Bell states") {
    StateVector a(2), b(3);
    a << cd(0.6, 0), cd(0, 0.8);
    b << cd(1, 0), cd(1, 1), cd(0, -1);
    b.normalize();
    StateVector psi(6);
    for (int i = 0; i < 2; ++i) psi.segment(i * 3, 3) = a(i) * b;
    const auto rhoA = partial_trace(psi, 2, 3);
    const auto rhoB = partial_trace_a(psi, 2, 3);
    CHECK((rhoA - a * a.adjoint()).norm() < 1e-14);
    CHECK((rhoB - b * b.adjoint()).norm() < 1e-14);
    CHECK(purity(rhoA) == doctest::Approx(1.0));

    StateVector bell = StateVector::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    CHECK((partial_trace(bell, 2, 2) - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-15);
    CHECK(purity(partial_trace(bell, 2, 2)) == doctest::Approx(0.5));

    DensityMatrix m = DensityMatrix::Zero(2, 2);
    m(0, 0) = 0.75;
    m(1, 1) = 0.25;
    CHECK(purity(m) == doctest::Approx(5.0 / 8.0));

    RngStream rng(16, 0);
    const auto r = sample_haar_state(12, rng);
    CHECK(purity(partial_trace(r, 3, 4)) == doctest::Approx(purity(partial_trace_a(r, 3, 4))).epsilon(1e-13));
    CHECK_THROWS_AS(partial_trace(r, 5, 2), ArgumentError);
}

TEST_CASE("basis completion") {
    RngStream rng(17, 0);
    const auto a = sample_haar_state(5, rng);
    const auto U = basis_with_first_vector(a);
    CHECK((U.adjoint() * U - Eigen::MatrixXcd::Identity(5, 5)).norm() < 1e-13);
    CHECK((U.col(0) - a).norm() < 1e-14);

    // Standard basis vector: the completion is the remaining standard vectors in order.
    const auto E = basis_with_first_vector(StateVector::Unit(3, 1));
    CHECK((E.col(1) - StateVector::Unit(3, 0)).norm() < 1e-15);
    CHECK((E.col(2) - StateVector::Unit(3, 2)).norm() < 1e-15);
}

TEST_CASE("single-sample Monte Carlo equals the direct trajectory") {
    const std::vector<double> times{0.0, 0.4, 1.3};
    McOptions opt;
    opt.seed = 21;
    const auto res = mc_average(gue_generator(6), 2, 3, times, 1, opt);
    auto h = sample_stream(21, 0, kHamiltonianStream);
    const auto H = sample_gue(6, 1.0, h);
    auto s = sample_stream(21, 0, kInitialStateStream);
    const auto a = sample_haar_state(2, s);
    const auto b = sample_haar_state(3, s);
    StateVector psi0(6);
    for (int i = 0; i < 2; ++i) psi0.segment(i * 3, 3) = a(i) * b;
    const auto U = basis_with_first_vector(a);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto rho = partial_trace(evolve(H, psi0, times[k]), 2, 3);
        CHECK((res.rho_mean[k] - U.adjoint() * rho * U).norm() < 1e-12);
        CHECK(res.purity_mean[k] == doctest::Approx(purity(rho)).epsilon(1e-12));
        CHECK(res.purity_stderr[k] == 0.0);
    }
    CHECK(std::abs(res.rho_mean[0](0, 0).real() - 1.0) < 1e-12);
}

TEST_CASE("Monte Carlo results do not depend on the thread count") {
    const std::vector<double> times{0.0, 0.7, 2.0};
    McOptions one, four;
    one.seed = four.seed = 5;
    one.threads = 1;
    four.threads = 4;
    const auto a = mc_average(gue_generator(4), 2, 2, times, 300, one);
    const auto b = mc_average(gue_generator(4), 2, 2, times, 300, four);
    for (std::size_t k = 0; k < times.size(); ++k) {
        CHECK(a.rho_mean[k] == b.rho_mean[k]);
        CHECK(a.rho_stderr_re[k] == b.rho_stderr_re[k]);
        CHECK(a.purity_mean[k] == b.purity_mean[k]);
        CHECK(a.purity_stderr[k] == b.purity_stderr[k]);
    }
}

TEST_CASE("Monte Carlo purity with a fixed spectrum follows the Haar average") {
    const std::vector<double> E{-1.1, -0.3, 0.2, 1.5};
    const std::vector<double> times{0.5, 1.5};
    McOptions opt;
    opt.seed = 8;
    opt.random_initial_state = false;
    const auto res = mc_average(fixed_spectrum_generator(E), 2, 2, times, 4000, opt);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double expected = purity_from_xi(2, 2, xi(E, times[k]));
        CHECK(std::abs(res.purity_mean[k] - expected) < 5 * res.purity_stderr[k]);
        CHECK(res.purity_mean[k] <= 1.0);
        CHECK(res.purity_mean[k] >= 0.5);
    }
}

TEST_CASE("Poisson generator spectra have the intended rate") {
    auto gen = poisson_generator(4);
    std::vector<double> e;
    for (std::size_t i = 0; i < 20000; ++i) {
        RngStream rng(19, i);
        const auto es = gen(rng);
        for (int j = 0; j < 4; ++j) e.push_back(es.energies(j));
    }
    const auto m = mean_and_stderr(e);
    CHECK(std::abs(m.mean - std::sqrt(5.0)) < 5 * m.stderr_);
}

TEST_CASE("gap statistics") {
    const std::vector<std::vector<double>> even{{0.0, 1.0, 2.0, 3.0}};
    const auto s = gap_statistics(even);
    CHECK(s.gaps == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(s.mean_ratio() == doctest::Approx(1.0));

    const std::vector<std::vector<double>> degenerate{{0.0, 0.0, 0.0, 3.0}, {1.0, 1.0, 1.0, 1.0}};
    const auto g = gap_statistics(degenerate);
    CHECK(g.skipped_spectra == 1);
    CHECK(g.skipped_ratios == 1);
    CHECK(g.ratios == std::vector<double>{0.0});
    CHECK_THROWS_AS(gap_statistics({{2.0, 1.0, 3.0}}), ArgumentError);

    // Wigner-Dyson and Poisson reference values of <r> are about 0.60 and 0.39.
    std::vector<std::vector<double>> gue, poi;
    for (std::size_t i = 0; i < 300; ++i) {
        RngStream r1(30, i), r2(31, i);
        const Eigen::VectorXd e = eigenvalues(sample_gue(64, 1.0, r1));
        gue.emplace_back(e.data(), e.data() + e.size());
        std::vector<double> p(64);
        for (auto& x : p) x = r2.exponential(1.0);
        std::sort(p.begin(), p.end());
        poi.push_back(p);
    }
    CHECK(gap_statistics(gue).mean_ratio() == doctest::Approx(0.60).epsilon(0.03));
    CHECK(gap_statistics(poi).mean_ratio() == doctest::Approx(0.386).epsilon(0.05));
}

TEST_CASE("mean and standard error") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto m = mean_and_stderr(v);
    CHECK(m.mean == doctest::Approx(2.5));
    CHECK(m.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

}  // TEST_SUITE
