#pragma once

// GUE eigenvalue averages at Gaussian weight exp(-Tr H^2 / 2).
//
// F(t) is the matrix of e^{itX} in the orthonormal Hermite basis, where X is
// the position operator with X_{mu, mu+1} = sqrt(mu + 1). It is complex
// symmetric, F(0) = 1, F(-t) = conj F(t), and entries with mu + nu odd are
// purely imaginary. Correlators are traces of products of F at scaled times.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "entdyn/phase_sums.hpp"

namespace entdyn {

struct FMatrix {
    int d = 0;
    double t = 0.0;
    Eigen::MatrixXcd entries;
};

/// Built diagonal by diagonal from a normalized Laguerre recurrence carried on a
/// running log scale; no cancellation and no overflow for any d, t.
FMatrix f_matrix(int d, double t);

/// dF/dt = i X F, truncated to d x d (uses one extra row internally).
Eigen::MatrixXcd f_matrix_derivative(int d, double t);

/// Generalized Laguerre polynomial L_n^{(alpha)}(x) by the three-term recurrence.
double laguerre(int n, double alpha, double x);

/// Tr F(t) = e^{-t^2/2} L^{(1)}_{d-1}(t^2).
double trace_f(int d, double t);

/// (d! / (d-n)!) < prod_j exp(i c_j E_j t) > over n distinct eigenvalues.
/// Requires 1 <= n <= d and all c_j nonzero.
double correlator(std::span<const int> coeffs, int d, double t);

double chi_mean(int d, double t);
double chi_mean_derivative(int d, double t);
/// Requires d >= 4.
double xi_mean(int d, double t);

RhoCoefficients rho_mean_coeffs(long d_A, long d_B, double t);
double purity_mean(long d_A, long d_B, double t);
/// t -> infinity value of purity_mean.
double purity_limit(long d_A, long d_B);

/// Poisson spectra: i.i.d. exponential levels of mean (d + 1)^{-1/2}.
double chi_poisson(int d, double t);
double xi_poisson(int d, double t);
double purity_poisson(long d_A, long d_B, double t);

/// (J_1(2 tau) / tau)^power, power in {2, 4}; value 1 at tau = 0.
double bessel_limit(double tau, int power);

struct Extremum {
    double t = 0.0;
    double value = 0.0;
    bool is_minimum = false;
};

/// Interior extrema of chi_mean(d, .) on (0, t_max], ordered by t. Located by
/// sampling the analytic derivative at step <= 1e-3, then bisection to 1e-8.
std::vector<Extremum> find_extrema(int d, double t_max);

}  // namespace entdyn
