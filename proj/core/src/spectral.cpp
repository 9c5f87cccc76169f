#include "entdyn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "entdyn/error.hpp"
#include "entdyn/symgroup.hpp"

namespace entdyn {

namespace {

using cd = std::complex<double>;

constexpr double kRescaleAbove = 1e150;

// i^k for k >= 0.
cd i_power(int k) {
    switch (k & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

Eigen::MatrixXcd build_f(int d, double t) {
    if (d < 1) throw ArgumentError("F matrix dimension must be >= 1");
    Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(d, d);
    if (t == 0.0) {
        F.setIdentity();
        return F;
    }
    const double at = std::abs(t);
    const double x = at * at;
    const double log_t = std::log(at);
    const double sign = t < 0 ? -1.0 : 1.0;

    // Diagonal k holds F_{m, m+k} = e^{-x/2} sqrt(m!/(m+k)!) (it)^k L_m^{(k)}(x).
    for (int k = 0; k < d; ++k) {
        const cd phase = i_power(k) * ((k & 1) ? sign : 1.0);
        double log_scale = -0.5 * x + k * log_t - 0.5 * std::lgamma(k + 1.0);
        double prev = 0.0, cur = 1.0;
        for (int m = 0; m + k < d; ++m) {
            if (m > 0) {
                const double next =
                    ((2.0 * (m - 1) + 1.0 + k - x) * cur - std::sqrt((m - 1.0) * (m - 1.0 + k)) * prev) /
                    std::sqrt(static_cast<double>(m) * (m + k));
                prev = cur;
                cur = next;
                const double mag = std::max(std::abs(cur), std::abs(prev));
                if (mag > kRescaleAbove) {
                    cur /= mag;
                    prev /= mag;
                    log_scale += std::log(mag);
                }
            }
            const double value = cur == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(cur)) + log_scale), cur);
            F(m, m + k) = phase * value;
            F(m + k, m) = F(m, m + k);
        }
    }
    return F;
}

void require_dimension(int d, int minimum, const char* what) {
    if (d < minimum)
        throw ArgumentError(std::string(what) + " requires d >= " + std::to_string(minimum) + ", got " +
                            std::to_string(d));
}

// Sum over i, j of A_ij B_ji; for symmetric A, B this is the elementwise sum.
cd trace_product(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) { return (A.array() * B.array()).sum(); }

class FCache {
public:
    FCache(int d, double t) : d_(d), t_(t) {}
    const Eigen::MatrixXcd& at(int c) {
        auto it = cache_.find(c);
        if (it != cache_.end()) return it->second;
        auto neg = cache_.find(-c);
        if (neg != cache_.end()) return cache_.emplace(c, neg->second.conjugate()).first->second;
        return cache_.emplace(c, build_f(d_, c * t_)).first->second;
    }
    cd trace(int c) { return at(c).trace(); }

private:
    int d_;
    double t_;
    std::map<int, Eigen::MatrixXcd> cache_;
};

double checked_real(cd value, double scale, const char* what) {
    if (std::abs(value.imag()) > 1e-10 * std::max(1.0, scale))
        throw NumericalError(std::string(what) + ": imaginary residue " + std::to_string(value.imag()));
    return value.real();
}

cd correlator_cached(std::span<const int> coeffs, FCache& cache, double& scale) {
    const int n = static_cast<int>(coeffs.size());
    cd total = 0.0;
    scale = 0.0;
    for (const auto& sigma : all_permutations(n)) {
        cd prod = static_cast<double>(sigma.sign());
        for (const auto& cycle : sigma.cycles()) {
            if (cycle.size() == 1) {
                prod *= cache.trace(coeffs[static_cast<std::size_t>(cycle[0])]);
            } else if (cycle.size() == 2) {
                prod *= trace_product(cache.at(coeffs[static_cast<std::size_t>(cycle[0])]),
                                      cache.at(coeffs[static_cast<std::size_t>(cycle[1])]));
            } else {
                Eigen::MatrixXcd acc = cache.at(coeffs[static_cast<std::size_t>(cycle[0])]);
                for (std::size_t k = 1; k + 1 < cycle.size(); ++k)
                    acc = acc * cache.at(coeffs[static_cast<std::size_t>(cycle[k])]);
                prod *= trace_product(acc, cache.at(coeffs[static_cast<std::size_t>(cycle.back())]).transpose());
            }
        }
        total += prod;
        scale += std::abs(prod);
    }
    return total;
}

}  // namespace

FMatrix f_matrix(int d, double t) { return {d, t, build_f(d, t)}; }

Eigen::MatrixXcd f_matrix_derivative(int d, double t) {
    require_dimension(d, 1, "f_matrix_derivative");
    const Eigen::MatrixXcd big = build_f(d + 1, t);
    Eigen::MatrixXcd out(d, d);
    for (int mu = 0; mu < d; ++mu) {
        for (int nu = 0; nu < d; ++nu) {
            cd v = std::sqrt(mu + 1.0) * big(mu + 1, nu);
            if (mu > 0) v += std::sqrt(static_cast<double>(mu)) * big(mu - 1, nu);
            out(mu, nu) = cd(0.0, 1.0) * v;
        }
    }
    return out;
}

double laguerre(int n, double alpha, double x) {
    if (n < 0) throw ArgumentError("laguerre: degree must be >= 0");
    if (n == 0) return 1.0;
    double prev = 1.0, cur = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double trace_f(int d, double t) {
    require_dimension(d, 1, "trace_f");
    return std::exp(-0.5 * t * t) * laguerre(d - 1, 1.0, t * t);
}

double correlator(std::span<const int> coeffs, int d, double t) {
    if (coeffs.empty()) throw ArgumentError("correlator: at least one coefficient required");
    if (static_cast<int>(coeffs.size()) > d)
        throw ArgumentError("correlator: n = " + std::to_string(coeffs.size()) + " exceeds d = " + std::to_string(d));
    for (int c : coeffs)
        if (c == 0) throw ArgumentError("correlator: coefficients must be nonzero");
    FCache cache(d, t);
    double scale = 0.0;
    const cd value = correlator_cached(coeffs, cache, scale);
    return checked_real(value, scale, "correlator");
}

double chi_mean(int d, double t) {
    require_dimension(d, 1, "chi_mean");
    // (Tr F)^2 - Tr[F(t) F(-t)] + d, and F(-t) = conj F(t).
    const Eigen::MatrixXcd F = build_f(d, t);
    const double tr = F.trace().real();
    return tr * tr - F.squaredNorm() + d;
}

double chi_mean_derivative(int d, double t) {
    require_dimension(d, 1, "chi_mean_derivative");
    const Eigen::MatrixXcd F = build_f(d, t);
    const Eigen::MatrixXcd dF = f_matrix_derivative(d, t);
    return 2.0 * F.trace().real() * dF.trace().real() - 2.0 * (dF.array() * F.conjugate().array()).sum().real();
}

double xi_mean(int d, double t) {
    require_dimension(d, 4, "xi_mean");
    FCache cache(d, t);
    double s = 0.0, scale = 0.0;
    const std::vector<int> c22{2, -2}, c211{2, -1, -1}, c112{1, 1, -2}, c1111{1, 1, -1, -1}, c11{1, -1};
    cd total = 4.0 * correlator_cached(c22, cache, s);
    scale += 4.0 * s;
    total += 2.0 * correlator_cached(c211, cache, s);
    scale += 2.0 * s;
    total += 2.0 * correlator_cached(c112, cache, s);
    scale += 2.0 * s;
    total += correlator_cached(c1111, cache, s);
    scale += s;
    total += 4.0 * (d - 1.0) * correlator_cached(c11, cache, s);
    scale += 4.0 * (d - 1.0) * s;
    total += 2.0 * d * (d - 1.0);
    return checked_real(total, scale, "xi_mean");
}

RhoCoefficients rho_mean_coeffs(long d_A, long d_B, double t) {
    return rho_coefficients_from_chi(d_A, d_B, chi_mean(static_cast<int>(d_A * d_B), t));
}

double purity_mean(long d_A, long d_B, double t) {
    if (d_A < 1 || d_B < 1) throw ArgumentError("subsystem dimensions must be >= 1");
    if (d_A == 1 || d_B == 1) return 1.0;
    return purity_from_xi(d_A, d_B, xi_mean(static_cast<int>(d_A * d_B), t));
}

double purity_limit(long d_A, long d_B) {
    if (d_A < 1 || d_B < 1) throw ArgumentError("subsystem dimensions must be >= 1");
    if (d_A == 1 || d_B == 1) return 1.0;
    const double d = static_cast<double>(d_A * d_B);
    const double s = static_cast<double>(d_A + d_B);
    return 2.0 / (d * (d + 3.0)) * (1.0 - s / (d + 1.0)) + s / (d + 1.0);
}

double chi_poisson(int d, double t) {
    require_dimension(d, 2, "chi_poisson");
    return d + d * (d - 1.0) / ((d + 1.0) * t * t + 1.0);
}

double xi_poisson(int d, double t) {
    require_dimension(d, 4, "xi_poisson");
    const double m2 = 1.0 / (d + 1.0);
    const double t2 = t * t;
    const double dd = d;
    const double falling3 = dd * (dd - 1) * (dd - 2);
    const double falling4 = falling3 * (dd - 3);
    const double one = m2 / (m2 + t2);
    return 4.0 * dd * (dd - 1) * m2 / (m2 + 4.0 * t2) +
           4.0 * falling3 * m2 * m2 * (m2 + 3.0 * t2) / ((m2 + t2) * (m2 + t2) * (m2 + 4.0 * t2)) +
           falling4 * one * one + 4.0 * dd * (dd - 1) * (dd - 1) * one + 2.0 * dd * (dd - 1);
}

double purity_poisson(long d_A, long d_B, double t) {
    if (d_A < 1 || d_B < 1) throw ArgumentError("subsystem dimensions must be >= 1");
    if (d_A == 1 || d_B == 1) return 1.0;
    return purity_from_xi(d_A, d_B, xi_poisson(static_cast<int>(d_A * d_B), t));
}

double bessel_limit(double tau, int power) {
    if (power != 2 && power != 4) throw ArgumentError("bessel_limit: power must be 2 or 4");
    if (tau < 0) throw ArgumentError("bessel_limit: tau must be >= 0");
    const double base = tau < 1e-8 ? 1.0 - 0.5 * tau * tau : std::cyl_bessel_j(1.0, 2.0 * tau) / tau;
    const double sq = base * base;
    return power == 2 ? sq : sq * sq;
}

std::vector<Extremum> find_extrema(int d, double t_max) {
    require_dimension(d, 2, "find_extrema");
    if (!(t_max > 0)) throw ArgumentError("find_extrema: t_max must be positive");
    const int steps = static_cast<int>(std::ceil(t_max / 1e-3));
    const double h = t_max / steps;

    std::vector<Extremum> out;
    double prev_t = h;
    double prev_g = chi_mean_derivative(d, prev_t);
    for (int k = 2; k <= steps; ++k) {
        const double t = k * h;
        const double g = chi_mean_derivative(d, t);
        if ((prev_g < 0) != (g < 0) && prev_g != 0.0) {
            double lo = prev_t, hi = t, glo = prev_g;
            while (hi - lo > 1e-8) {
                const double mid = 0.5 * (lo + hi);
                const double gm = chi_mean_derivative(d, mid);
                if ((gm < 0) == (glo < 0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            const double te = 0.5 * (lo + hi);
            out.push_back({te, chi_mean(d, te), prev_g < 0});
        }
        prev_t = t;
        prev_g = g;
    }
    return out;
}

}  // namespace entdyn
