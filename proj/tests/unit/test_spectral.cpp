#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "entdyn/error.hpp"
#include "entdyn/phase_sums.hpp"
#include "entdyn/quantum_sim.hpp"
#include "entdyn/rng.hpp"
#include "entdyn/spectral.hpp"

using namespace entdyn;
using cd = std::complex<double>;

namespace {

// F_{mu nu} for mu <= nu by the explicit Laguerre sum in long double.
cd f_direct(int mu, int nu, double t) {
    if (mu > nu) std::swap(mu, nu);
    const int a = nu - mu;
    const long double x = static_cast<long double>(t) * t;
    long double sum = 0;
    for (int k = 0; k <= mu; ++k) {
        const long double logc = std::lgamma(static_cast<long double>(mu + a + 1)) - std::lgamma(static_cast<long double>(mu - k + 1)) -
                                 std::lgamma(static_cast<long double>(a + k + 1)) - std::lgamma(static_cast<long double>(k + 1));
        sum += (k % 2 ? -1 : 1) * std::exp(logc) * std::pow(x, static_cast<long double>(k));
    }
    const long double pref = std::exp(-x / 2 + 0.5L * (std::lgamma(static_cast<long double>(mu + 1)) - std::lgamma(static_cast<long double>(nu + 1)))) *
                             std::pow(static_cast<long double>(t), static_cast<long double>(a));
    const double v = static_cast<double>(pref * sum);
    static const cd ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return v * ipow[a % 4];
}

// Top-left d x d block of exp(i t X_N) for a large truncation N.
Eigen::MatrixXcd f_expm(int d, double t, int N) {
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(N, N);
    for (int k = 0; k + 1 < N; ++k) X(k, k + 1) = X(k + 1, k) = std::sqrt(k + 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X);
    Eigen::VectorXcd ph(N);
    for (int k = 0; k < N; ++k) ph(k) = std::exp(cd(0, t * es.eigenvalues()(k)));
    const Eigen::MatrixXcd V = es.eigenvectors().cast<cd>();
    return (V * ph.asDiagonal() * V.transpose()).topLeftCorner(d, d);
}

struct Quadrature {
    std::vector<double> x, w;
};

// Gauss quadrature for the weight exp(-x^2/2) (Golub-Welsch).
Quadrature gauss_hermite(int N) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);
    for (int k = 1; k < N; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Quadrature q;
    for (int k = 0; k < N; ++k) {
        q.x.push_back(es.eigenvalues()(k));
        const double v = es.eigenvectors()(0, k);
        q.w.push_back(std::sqrt(2 * M_PI) * v * v);
    }
    return q;
}

// Integral of det[K(x_a, x_b)] prod_a exp(i c_a x_a t) against the Gaussian weight, where
// K carries the d lowest orthonormal Hermite functions.
double correlator_quadrature(const std::vector<int>& c, int d, double t, int N) {
    const auto q = gauss_hermite(N);
    const std::size_t n = c.size();
    Eigen::MatrixXd He(N, d);
    for (int i = 0; i < N; ++i) {
        He(i, 0) = 1.0;
        if (d > 1) He(i, 1) = q.x[static_cast<std::size_t>(i)];
        for (int k = 2; k < d; ++k) He(i, k) = q.x[static_cast<std::size_t>(i)] * He(i, k - 1) - (k - 1) * He(i, k - 2);
    }
    Eigen::VectorXd inv_norm(d);
    double fact = 1.0;
    for (int k = 0; k < d; ++k) {
        if (k > 0) fact *= k;
        inv_norm(k) = 1.0 / (fact * std::sqrt(2 * M_PI));
    }
    const Eigen::MatrixXd K = He * inv_norm.asDiagonal() * He.transpose();
    std::vector<int> idx(n, 0);
    cd total = 0;
    Eigen::MatrixXd M(n, n);
    while (true) {
        double w = 1.0;
        double phase = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            w *= q.w[static_cast<std::size_t>(idx[a])];
            phase += c[a] * q.x[static_cast<std::size_t>(idx[a])] * t;
            for (std::size_t b = 0; b < n; ++b) M(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = K(idx[a], idx[b]);
        }
        total += w * M.determinant() * std::exp(cd(0, phase));
        std::size_t a = 0;
        while (a < n && ++idx[a] == N) idx[a++] = 0;
        if (a == n) break;
    }
    CHECK(std::abs(total.imag()) < 1e-9);
    return total.real();
}

double j1_series(double x) {
    double term = x / 2, sum = term;
    for (int m = 1; m < 80; ++m) {
        term *= -(x / 2) * (x / 2) / (m * (m + 1.0));
        sum += term;
    }
    return sum;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("F matrix basic structure") {
    const auto F0 = f_matrix(6, 0.0);
    CHECK((F0.entries - Eigen::MatrixXcd::Identity(6, 6)).norm() < 1e-15);
    const auto F = f_matrix(7, 1.3);
    CHECK((F.entries - F.entries.transpose()).norm() < 1e-14);
    CHECK((f_matrix(7, -1.3).entries - F.entries.conjugate()).norm() < 1e-14);
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) {
            if ((i + j) % 2) CHECK(std::abs(F.entries(i, j).real()) < 1e-15);
            else CHECK(std::abs(F.entries(i, j).imag()) < 1e-15);
        }
    CHECK(F.entries(0, 0).real() == doctest::Approx(std::exp(-0.5 * 1.69)).epsilon(1e-14));
    CHECK(F.entries(0, 1).imag() == doctest::Approx(1.3 * std::exp(-0.5 * 1.69)).epsilon(1e-14));
}

TEST_CASE("F matrix agrees with the direct Laguerre sum") {
    for (int d : {2, 5, 12, 20})
        for (double t : {0.25, 0.9, 1.8}) {
            const auto F = f_matrix(d, t);
            double worst = 0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) worst = std::max(worst, std::abs(F.entries(i, j) - f_direct(i, j, t)));
            CHECK_MESSAGE(worst < 1e-10, "d=" << d << " t=" << t << " dev=" << worst);
        }
}

TEST_CASE("F matrix agrees with the exponential of the truncated position operator") {
    for (int d : {4, 30, 80})
        for (double t : {0.5, 2.0, 3.5}) {
            const auto F = f_matrix(d, t);
            const double dev = (F.entries - f_expm(d, t, d + 160)).cwiseAbs().maxCoeff();
            CHECK_MESSAGE(dev < 1e-10, "d=" << d << " t=" << t << " dev=" << dev);
        }
}

TEST_CASE("F stays bounded for large d and t") {
    const auto F = f_matrix(400, 25.0);
    CHECK(F.entries.allFinite());
    // Rows of a unitary truncation have norm at most one.
    CHECK(F.entries.rowwise().norm().maxCoeff() <= 1.0 + 1e-10);
}

TEST_CASE("F derivative matches finite differences") {
    const double h = 1e-5;
    for (double t : {0.4, 1.7}) {
        const Eigen::MatrixXcd fd = (f_matrix(9, t + h).entries - f_matrix(9, t - h).entries) / (2 * h);
        CHECK((f_matrix_derivative(9, t) - fd).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("laguerre small cases") {
    CHECK(laguerre(0, 1.0, 0.7) == 1.0);
    CHECK(laguerre(1, 1.0, 0.7) == doctest::Approx(2.0 - 0.7));
    CHECK(laguerre(2, 0.0, 0.7) == doctest::Approx(0.5 * (0.49 - 2.8 + 2.0)));
    CHECK(trace_f(4, 1.0) == doctest::Approx(std::exp(-0.5) * (4 - 6 + 2 - 1.0 / 6)).epsilon(1e-14));
}

TEST_CASE("trace_f equals the diagonal of F") {
    for (int d : {1, 3, 17, 40})
        for (double t : {0.0, 0.6, 2.4}) CHECK(trace_f(d, t) == doctest::Approx(f_matrix(d, t).entries.trace().real()).epsilon(1e-12));
}

TEST_CASE("correlator normalization and symmetries") {
    const std::vector<int> c3{2, -1, -1}, c3r{1, 1, -2}, c4{1, 1, -1, -1}, c2{1, -1};
    CHECK(correlator(c4, 6, 0.0) == doctest::Approx(360.0));
    CHECK(correlator(c3, 5, 0.0) == doctest::Approx(60.0));
    CHECK(correlator(c3, 7, 0.8) == doctest::Approx(correlator(c3r, 7, 0.8)).epsilon(1e-12));
    // Two-point function: (Tr F)^2 - Tr(F conj F).
    const auto F = f_matrix(6, 0.9).entries;
    CHECK(correlator(c2, 6, 0.9) == doctest::Approx(std::pow(F.trace().real(), 2) - F.squaredNorm()).epsilon(1e-12));
    CHECK_THROWS_AS(correlator(c4, 3, 0.5), ArgumentError);
    const std::vector<int> bad{1, 0};
    CHECK_THROWS_AS(correlator(bad, 5, 0.5), ArgumentError);
}

TEST_CASE("correlators agree with Gauss-Hermite quadrature of the kernel determinant") {
    const int d = 5;
    const double t = 0.7;
    for (const std::vector<int>& c : {std::vector<int>{1, -1}, std::vector<int>{2, -1, -1}, std::vector<int>{2, -2},
                                      std::vector<int>{1, 1, -1, -1}}) {
        const int N = c.size() == 4 ? 28 : 40;
        CHECK(correlator(c, d, t) == doctest::Approx(correlator_quadrature(c, d, t, N)).epsilon(1e-9));
    }
}

TEST_CASE("chi and xi means agree with GUE sampling") {
    const std::size_t n = 50000;
    const double t = 0.6;
    std::vector<double> c4, x5;
    for (std::size_t i = 0; i < n; ++i) {
        RngStream r4(77, i), r5(78, i);
        const Eigen::VectorXd e4 = eigenvalues(sample_gue(4, 1.0, r4));
        const Eigen::VectorXd e5 = eigenvalues(sample_gue(5, 1.0, r5));
        c4.push_back(chi(std::span<const double>(e4.data(), 4), t));
        x5.push_back(xi(std::span<const double>(e5.data(), 5), t));
    }
    const auto mc = mean_and_stderr(c4);
    const auto mx = mean_and_stderr(x5);
    CHECK(std::abs(mc.mean - chi_mean(4, t)) < 5 * mc.stderr_);
    CHECK(std::abs(mx.mean - xi_mean(5, t)) < 5 * mx.stderr_);
}

TEST_CASE("chi_mean boundary and parity") {
    for (int d = 2; d <= 30; ++d) {
        CHECK(chi_mean(d, 0.0) == doctest::Approx(static_cast<double>(d) * d).epsilon(1e-13));
        CHECK(chi_mean(d, -0.8) == doctest::Approx(chi_mean(d, 0.8)).epsilon(1e-13));
    }
    for (int d = 4; d <= 12; ++d) CHECK(xi_mean(d, 0.0) == doctest::Approx(d * d * (d - 1.0) * (d + 3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(xi_mean(3, 1.0), ArgumentError);
}

TEST_CASE("chi_mean derivative matches finite differences") {
    const double h = 1e-5;
    for (int d : {3, 8, 25})
        for (double t : {0.3, 1.1, 2.6}) {
            const double fd = (chi_mean(d, t + h) - chi_mean(d, t - h)) / (2 * h);
            CHECK(chi_mean_derivative(d, t) == doctest::Approx(fd).epsilon(1e-6).scale(d));
        }
}

TEST_CASE("averaged density matrix coefficients are a convex split") {
    for (long dA : {2L, 4L})
        for (long dB : {1L, 2L, 8L})
            for (int k = 0; k <= 200; ++k) {
                const auto c = rho_mean_coeffs(dA, dB, 0.05 * k);
                CHECK(c.p1 >= -1e-12);
                CHECK(c.pmix >= -1e-12);
                CHECK(c.p1 + c.pmix == doctest::Approx(1.0).epsilon(1e-12));
            }
}

TEST_CASE("purity limits and symmetry") {
    CHECK(purity_limit(2, 2) == doctest::Approx(57.0 / 70.0).epsilon(1e-14));
    CHECK(purity_mean(2, 2, 60.0) == doctest::Approx(57.0 / 70.0).epsilon(1e-6));
    CHECK(purity_mean(2, 3, 1.2) == doctest::Approx(purity_mean(3, 2, 1.2)).epsilon(1e-13));
    CHECK(purity_mean(1, 7, 1.2) == 1.0);
    CHECK(purity_mean(2, 2, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("Poisson closed forms") {
    CHECK(chi_poisson(6, 0.0) == doctest::Approx(36.0));
    CHECK(chi_poisson(6, 1e6) == doctest::Approx(6.0));
    CHECK(xi_poisson(6, 0.0) == doctest::Approx(36.0 * 5 * 9));
    CHECK(xi_poisson(6, 1e6) == doctest::Approx(60.0).epsilon(1e-6));
    CHECK(purity_poisson(2, 2, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("xi_poisson agrees with exponential sampling") {
    const int d = 5;
    const double t = 0.4, rate = 1.0 / std::sqrt(d + 1.0);
    std::vector<double> xs, cs;
    for (std::size_t i = 0; i < 200000; ++i) {
        RngStream rng(5, i);
        std::vector<double> E(d);
        for (auto& e : E) e = rng.exponential(rate);
        xs.push_back(xi(E, t));
        cs.push_back(chi(E, t));
    }
    const auto mx = mean_and_stderr(xs), mc = mean_and_stderr(cs);
    CHECK(std::abs(mx.mean - xi_poisson(d, t)) < 5 * mx.stderr_);
    CHECK(std::abs(mc.mean - chi_poisson(d, t)) < 5 * mc.stderr_);
}

TEST_CASE("Bessel limit") {
    CHECK(bessel_limit(0.0, 2) == 1.0);
    for (double tau : {0.2, 1.0, 2.7, 4.5}) {
        const double b = j1_series(2 * tau) / tau;
        CHECK(bessel_limit(tau, 2) == doctest::Approx(b * b).epsilon(1e-12));
        CHECK(bessel_limit(tau, 4) == doctest::Approx(b * b * b * b).epsilon(1e-12));
    }
    double lo = 1.5, hi = 2.2;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (j1_series(2 * lo) * j1_series(2 * mid) <= 0 ? hi : lo) = mid;
    }
    CHECK(bessel_limit(lo, 2) < 1e-20);
    CHECK_THROWS_AS(bessel_limit(1.0, 3), ArgumentError);
}

TEST_CASE("extrema alternate and sit on zeros of the derivative") {
    for (int d : {2, 4, 9}) {
        const auto ex = find_extrema(d, 6.0);
        REQUIRE(!ex.empty());
        CHECK(ex.front().is_minimum);
        for (std::size_t k = 0; k < ex.size(); ++k) {
            CHECK(std::abs(chi_mean_derivative(d, ex[k].t)) < 1e-5 * d * d);
            CHECK(ex[k].value == doctest::Approx(chi_mean(d, ex[k].t)).epsilon(1e-12));
            if (k > 0) CHECK(ex[k].is_minimum != ex[k - 1].is_minimum);
        }
    }
}

TEST_CASE("first-minimum value rises toward a constant near 1.19") {
    double prev = 0;
    for (int d : {4, 10, 20, 40, 60, 100}) {
        const auto ex = find_extrema(d, 3.0);
        REQUIRE(ex.front().is_minimum);
        CHECK(ex.front().value > prev);
        prev = ex.front().value;
    }
    CHECK(prev == doctest::Approx(1.1908).epsilon(1e-3));

    // Sampling oracle at d = 60.
    const double t = find_extrema(60, 3.0).front().t;
    std::vector<double> v;
    for (std::size_t i = 0; i < 4000; ++i) {
        RngStream rng(60, i);
        const Eigen::VectorXd e = eigenvalues(sample_gue(60, 1.0, rng));
        v.push_back(chi(std::span<const double>(e.data(), 60), t));
    }
    const auto m = mean_and_stderr(v);
    CHECK(std::abs(m.mean - chi_mean(60, t)) < 5 * m.stderr_);
}

}  // TEST_SUITE
