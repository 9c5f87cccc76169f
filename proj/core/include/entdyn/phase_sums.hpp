#pragma once

// Spectral phase sums of a single, fixed spectrum.
//
//   iota(m t) = sum_j exp(i m E_j t)
//   chi  = |iota(t)|^2
//   xi   = |iota(t)^2 + iota(2t)|^2 - 4 |iota(t)|^2
//   zeta = |iota(t)^3 + 2 iota(3t) + 3 iota(t) iota(2t)|^2 - 36 |iota(t)|^2

#include <complex>
#include <span>

namespace entdyn {

std::complex<double> iota(std::span<const double> spectrum, double t);
double chi(std::span<const double> spectrum, double t);
double xi(std::span<const double> spectrum, double t);
double zeta(std::span<const double> spectrum, double t);

/// Coefficients of |1_A><1_A| and of 1_A/d_A in the Haar average of rho_A.
struct RhoCoefficients {
    double p1 = 0.0;
    double pmix = 0.0;
};

/// Requires d = d_A d_B >= 2; chi is the spectral average (or the single-spectrum value).
RhoCoefficients rho_coefficients_from_chi(long d_A, long d_B, double chi_value);

/// Haar average of the purity given xi. d_A == 1 or d_B == 1 returns 1 exactly.
double purity_from_xi(long d_A, long d_B, double xi_value);

}  // namespace entdyn
