#pragma once

// Dense Monte Carlo of bipartite pure-state dynamics.
//
// Basis labels are A-major: k = k_A * d_B + k_B, so the A factor is the slow
// index and, for spin chains, site 0 is the most significant bit.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "entdyn/rng.hpp"

namespace entdyn {

using HermitianOperator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

/// H = (A1 + A1^T)/2 + i (A2 - A2^T)/2 with i.i.d. N(0, 1/lambda) entries in A1, A2.
HermitianOperator sample_gue(int d, double lambda, RngStream& rng);

/// Q from the QR factorization of a complex Ginibre matrix, columns rephased by R_jj / |R_jj|.
Eigen::MatrixXcd sample_haar_unitary(int d, RngStream& rng);

/// Uniform unit vector in C^d.
StateVector sample_haar_state(int d, RngStream& rng);

/// Haar on SO(3): sign-fixed real QR, negated as a whole when det = -1.
Eigen::Matrix3d sample_so3(RngStream& rng);

struct Eigensystem {
    Eigen::VectorXd energies;
    Eigen::MatrixXcd vectors;  // columns are eigenvectors
};

/// Throws NumericalError if the solver does not converge.
Eigensystem diagonalize(const HermitianOperator& H);
Eigen::VectorXd eigenvalues(const HermitianOperator& H);

/// Time evolution with a single eigendecomposition reused across times.
class Evolver {
public:
    Evolver(Eigensystem system, const StateVector& psi0);
    explicit Evolver(const HermitianOperator& H, const StateVector& psi0);

    StateVector state(double t) const;
    /// Column j is the state at times[j]; one matrix product for the whole grid.
    Eigen::MatrixXcd states(std::span<const double> times) const;

private:
    Eigensystem system_;
    Eigen::VectorXcd coeffs_;  // V^dag psi0
};

StateVector evolve(const HermitianOperator& H, const StateVector& psi0, double t);

/// rho_A = Tr_B |psi><psi|.
DensityMatrix partial_trace(const StateVector& psi, int d_A, int d_B);
/// rho_B = Tr_A |psi><psi|.
DensityMatrix partial_trace_a(const StateVector& psi, int d_A, int d_B);

double purity(const DensityMatrix& rho);

/// Unitary whose first column is a (unit norm), completed by Gram-Schmidt over the
/// standard basis with the vector of largest |a_k| skipped (ties: lowest k).
Eigen::MatrixXcd basis_with_first_vector(const StateVector& a);

/// Generates the eigensystem for one sample from that sample's stream.
using EigensystemGenerator = std::function<Eigensystem(RngStream&)>;

struct McOptions {
    std::uint64_t seed = 0;
    int threads = 1;
    /// Multiplies every sampled energy.
    double energy_scale = 1.0;
    /// Initial product state; when false the state is |1_A; 1_B>.
    bool random_initial_state = true;
};

struct McResult {
    std::vector<double> times;
    std::size_t n_samples = 0;
    /// Per time: mean of rho_A in the basis whose first vector is the initial A state.
    std::vector<Eigen::MatrixXcd> rho_mean;
    std::vector<Eigen::MatrixXd> rho_stderr_re;
    std::vector<Eigen::MatrixXd> rho_stderr_im;
    std::vector<double> purity_mean;
    std::vector<double> purity_stderr;
};

/// Stream of sample i for a given purpose; shared by every pass that must see the same sample.
RngStream sample_stream(std::uint64_t seed, std::uint64_t sample_index, std::uint64_t purpose);

inline constexpr std::uint64_t kHamiltonianStream = 0;
inline constexpr std::uint64_t kInitialStateStream = 1;

/// Deterministic for a given seed and independent of `threads`: samples are grouped
/// in fixed index blocks and block sums are combined in index order.
McResult mc_average(const EigensystemGenerator& generator, int d_A, int d_B, std::span<const double> times,
                    std::size_t n_samples, const McOptions& options = {});

EigensystemGenerator gue_generator(int d, double lambda = 1.0);
/// Haar eigenvectors with i.i.d. exponential energies of rate (d + 1)^{-1/2}.
EigensystemGenerator poisson_generator(int d);
/// Haar eigenvectors with a fixed spectrum.
EigensystemGenerator fixed_spectrum_generator(std::vector<double> spectrum);

struct GapStats {
    std::vector<double> gaps;    // consecutive spacings divided by the spectrum's mean spacing
    std::vector<double> ratios;  // min(s_j, s_{j+1}) / max(s_j, s_{j+1})
    std::size_t skipped_spectra = 0;
    std::size_t skipped_ratios = 0;

    double mean_ratio() const;
    double mean_ratio_stderr() const;
};

/// Spacings below 1e-10 of the mean spacing count as exact degeneracies; ratios of
/// two degenerate spacings are undefined and skipped.
GapStats gap_statistics(const std::vector<std::vector<double>>& spectra);

/// Sample mean and standard error of the mean.
struct MeanError {
    double mean = 0.0;
    double stderr_ = 0.0;
};
MeanError mean_and_stderr(std::span<const double> values);

}  // namespace entdyn
