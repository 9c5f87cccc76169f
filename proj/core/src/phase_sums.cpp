#include "entdyn/phase_sums.hpp"

#include <cmath>

#include "entdyn/error.hpp"

namespace entdyn {

std::complex<double> iota(std::span<const double> spectrum, double t) {
    double re = 0.0, im = 0.0;
    for (double e : spectrum) {
        re += std::cos(e * t);
        im += std::sin(e * t);
    }
    return {re, im};
}

double chi(std::span<const double> spectrum, double t) { return std::norm(iota(spectrum, t)); }

double xi(std::span<const double> spectrum, double t) {
    const auto i1 = iota(spectrum, t);
    const auto i2 = iota(spectrum, 2 * t);
    return std::norm(i1 * i1 + i2) - 4.0 * std::norm(i1);
}

double zeta(std::span<const double> spectrum, double t) {
    const auto i1 = iota(spectrum, t);
    const auto i2 = iota(spectrum, 2 * t);
    const auto i3 = iota(spectrum, 3 * t);
    return std::norm(i1 * i1 * i1 + 2.0 * i3 + 3.0 * i1 * i2) - 36.0 * std::norm(i1);
}

RhoCoefficients rho_coefficients_from_chi(long d_A, long d_B, double chi_value) {
    const double d = static_cast<double>(d_A) * static_cast<double>(d_B);
    if (d < 2) throw ArgumentError("rho coefficients need d = d_A d_B >= 2");
    const double denom = d * d - 1.0;
    return {(chi_value - 1.0) / denom, (d * d - chi_value) / denom};
}

double purity_from_xi(long d_A, long d_B, double xi_value) {
    if (d_A < 1 || d_B < 1) throw ArgumentError("subsystem dimensions must be >= 1");
    if (d_A == 1 || d_B == 1) return 1.0;
    const double d = static_cast<double>(d_A * d_B);
    const double s = static_cast<double>(d_A + d_B);
    return xi_value / (d * d * (d - 1.0) * (d + 3.0)) * (1.0 - s / (d + 1.0)) + s / (d + 1.0);
}

}  // namespace entdyn
