#pragma once

// Randomized spin-model ensembles, ensemble energy rescaling, and the
// time-integrated distance between averaged reduced-density-matrix trajectories.
//
// Couplings g, h are standard normal, rotations X, Y are Haar on SO(3). Rows of
// a rotation define the rotated axes: X^{1a} sigma^a is the new sigma^1. Chains
// are periodic and need at least two sites.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "entdyn/pauli.hpp"
#include "entdyn/quantum_sim.hpp"

namespace entdyn {

enum class ModelFamily { TFIM, DTFIM, XXZ, DXXZ, SYK, SG, CS, GUE, POISSON };

std::string_view family_name(ModelFamily family);
/// Case-insensitive; throws ArgumentError for unknown names.
ModelFamily parse_family(std::string_view name);
const std::vector<ModelFamily>& all_families();

struct ModelSpec {
    ModelFamily family = ModelFamily::GUE;
    int s_A = 1;  // sites of subsystem A (central spins for CS)
    int s_B = 1;  // sites of subsystem B
    double J = 1.0;
    double B = 1.0;
    double J1 = 1.0;
    double J2 = 1.0;
    double J3 = 1.0;
    double lambda = 1.0;  // GUE weight
    /// Rotate each eigenbasis by an independent Haar unitary.
    bool scramble = false;

    int sites() const noexcept { return s_A + s_B; }
    int dim() const noexcept { return 1 << sites(); }
    int d_A() const noexcept { return 1 << s_A; }
    int d_B() const noexcept { return 1 << s_B; }
    void validate() const;
};

/// Physical families get the ensemble-global energy rescale; GUE and POISSON do not.
bool is_physical(ModelFamily family);

HermitianOperator build_model(const ModelSpec& spec, RngStream& rng);

/// Deterministic builders behind build_model.
HermitianOperator tfim_hamiltonian(int sites, double J, double g, const Eigen::Matrix3d& X);
HermitianOperator xxz_hamiltonian(int sites, double B, double J, double g, double h, const Eigen::Matrix3d& X);
/// Coefficients in lexicographic order of i < j < k < l over the 2s Majoranas.
HermitianOperator syk_hamiltonian(int sites, double J2, const std::vector<double>& couplings);

/// 2s Hermitian, traceless, pairwise anticommuting operators squaring to 1.
std::vector<Eigen::MatrixXcd> jordan_wigner_majoranas(int sites);

/// Scale s making the pooled mean of (s E_i - s E_j)^2 over i != j equal 2(d + 1).
double rescale_energies(const std::vector<std::vector<double>>& spectra);

/// Same scale for n_samples Hamiltonians of the ensemble, computed from traces
/// (sum_{i != j} (E_i - E_j)^2 = 2 d Tr H^2 - 2 (Tr H)^2) without diagonalizing.
double ensemble_energy_scale(const ModelSpec& spec, std::size_t n_samples, std::uint64_t seed, int threads = 1);

/// Eigensystem per sample stream for the family, before any energy rescale.
EigensystemGenerator model_generator(const ModelSpec& spec);

struct DynamicsTrace {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> rho;
};

/// Two passes: an energy-scale pilot (physical families only), then mc_average
/// with the same sample streams.
McResult ensemble_dynamics(const ModelSpec& spec, std::span<const double> times, std::size_t n_samples,
                           const McOptions& options = {});

DynamicsTrace trace_from(const McResult& result);
/// p1 |1_A><1_A| + pmix 1_A / d_A with the GUE or Poisson coefficients.
DynamicsTrace analytic_gue_trace(int d_A, int d_B, std::span<const double> times);
DynamicsTrace analytic_poisson_trace(int d_A, int d_B, std::span<const double> times);

/// Trapezoid integral over t in [0, 6] of the spectral norm of a(t) - b(t).
/// Grids must match, start at 0 and reach 6; later points are ignored.
double distance_d6(const DynamicsTrace& a, const DynamicsTrace& b);

/// Sorted eigenvalues of n_samples ensemble members, with the ensemble rescale applied.
std::vector<std::vector<double>> ensemble_spectra(const ModelSpec& spec, std::size_t n_samples, std::uint64_t seed,
                                                  int threads = 1);

}  // namespace entdyn
