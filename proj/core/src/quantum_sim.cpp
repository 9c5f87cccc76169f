#include "entdyn/quantum_sim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <type_traits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "entdyn/error.hpp"
#include "entdyn/parallel.hpp"

namespace entdyn {

namespace {

using cd = std::complex<double>;
using RowMajorMatrixXcd = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_positive(int d, const char* what) {
    if (d < 1) throw ArgumentError(std::string(what) + ": dimension must be >= 1");
}

Eigen::MatrixXcd ginibre(int d, RngStream& rng) {
    Eigen::MatrixXcd Z(d, d);
    const double s = std::sqrt(0.5);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            const double re = rng.normal();
            const double im = rng.normal();
            Z(i, j) = cd(s * re, s * im);
        }
    return Z;
}

// Running mean and centered second moment (Welford); blocks merge with Chan's update.
template <class T>
struct Moments {
    T mean;
    T m2;
};

struct BlockSums {
    double count = 0.0;
    std::vector<Moments<Eigen::MatrixXd>> re, im;
    std::vector<Moments<double>> purity;

    BlockSums(std::size_t n_times, int d_A)
        : re(n_times, {Eigen::MatrixXd::Zero(d_A, d_A), Eigen::MatrixXd::Zero(d_A, d_A)}),
          im(re),
          purity(n_times, {0.0, 0.0}) {}

    template <class T>
    static void push(Moments<T>& m, const T& x, double n) {
        const T delta = x - m.mean;
        m.mean += delta / n;
        if constexpr (std::is_same_v<T, double>)
            m.m2 += delta * (x - m.mean);
        else
            m.m2.array() += delta.array() * (x - m.mean).array();
    }

    template <class T>
    static void merge(Moments<T>& a, const Moments<T>& b, double na, double nb) {
        const double n = na + nb;
        const T delta = b.mean - a.mean;
        a.mean += delta * (nb / n);
        if constexpr (std::is_same_v<T, double>)
            a.m2 += b.m2 + delta * delta * (na * nb / n);
        else
            a.m2.array() += b.m2.array() + delta.array().square() * (na * nb / n);
    }

    void add_sample(std::size_t k, const Eigen::MatrixXcd& rho, double g, double n) {
        push<Eigen::MatrixXd>(re[k], rho.real(), n);
        push<Eigen::MatrixXd>(im[k], rho.imag(), n);
        push(purity[k], g, n);
    }

    void add(const BlockSums& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        for (std::size_t k = 0; k < re.size(); ++k) {
            merge(re[k], o.re[k], count, o.count);
            merge(im[k], o.im[k], count, o.count);
            merge(purity[k], o.purity[k], count, o.count);
        }
        count += o.count;
    }
};

double stderr_from_m2(double m2, double n) {
    if (n < 2) return 0.0;
    return std::sqrt(std::max(0.0, m2) / (n - 1.0) / n);
}

double stderr_from_sums(double sum, double sum_sq, std::size_t n) {
    if (n < 2) return 0.0;
    const double dn = static_cast<double>(n);
    const double mean = sum / dn;
    const double var = std::max(0.0, (sum_sq - dn * mean * mean) / (dn - 1.0));
    return std::sqrt(var / dn);
}

}  // namespace

HermitianOperator sample_gue(int d, double lambda, RngStream& rng) {
    require_positive(d, "sample_gue");
    if (!(lambda > 0)) throw ArgumentError("sample_gue: lambda must be positive");
    const double sd = 1.0 / std::sqrt(lambda);
    Eigen::MatrixXd A1(d, d), A2(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) A1(i, j) = sd * rng.normal();
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) A2(i, j) = sd * rng.normal();
    HermitianOperator H(d, d);
    H.real() = 0.5 * (A1 + A1.transpose());
    H.imag() = 0.5 * (A2 - A2.transpose());
    return H;
}

Eigen::MatrixXcd sample_haar_unitary(int d, RngStream& rng) {
    require_positive(d, "sample_haar_unitary");
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre(d, rng));
    Eigen::MatrixXcd Q = qr.householderQ();
    const Eigen::MatrixXcd& R = qr.matrixQR();
    for (int j = 0; j < d; ++j) {
        const double mag = std::abs(R(j, j));
        if (mag > 0) Q.col(j) *= R(j, j) / mag;
    }
    return Q;
}

StateVector sample_haar_state(int d, RngStream& rng) {
    require_positive(d, "sample_haar_state");
    StateVector v(d);
    for (int i = 0; i < d; ++i) {
        const double re = rng.normal();
        const double im = rng.normal();
        v(i) = cd(re, im);
    }
    return v / v.norm();
}

Eigen::Matrix3d sample_so3(RngStream& rng) {
    Eigen::Matrix3d G;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) G(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::Matrix3d> qr(G);
    Eigen::Matrix3d Q = qr.householderQ();
    for (int j = 0; j < 3; ++j)
        if (qr.matrixQR()(j, j) < 0) Q.col(j) = -Q.col(j);
    if (Q.determinant() < 0) Q = -Q;
    return Q;
}

Eigensystem diagonalize(const HermitianOperator& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXd eigenvalues(const HermitianOperator& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
    return solver.eigenvalues();
}

Evolver::Evolver(Eigensystem system, const StateVector& psi0) : system_(std::move(system)) {
    if (psi0.size() != system_.vectors.rows()) throw ArgumentError("Evolver: state dimension mismatch");
    coeffs_ = system_.vectors.adjoint() * psi0;
}

Evolver::Evolver(const HermitianOperator& H, const StateVector& psi0) : Evolver(diagonalize(H), psi0) {}

StateVector Evolver::state(double t) const {
    Eigen::VectorXcd phased(coeffs_.size());
    for (Eigen::Index j = 0; j < coeffs_.size(); ++j) phased(j) = std::polar(1.0, -system_.energies(j) * t) * coeffs_(j);
    return system_.vectors * phased;
}

Eigen::MatrixXcd Evolver::states(std::span<const double> times) const {
    const auto n = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXcd phased(coeffs_.size(), n);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index j = 0; j < coeffs_.size(); ++j)
            phased(j, k) = std::polar(1.0, -system_.energies(j) * times[static_cast<std::size_t>(k)]) * coeffs_(j);
    return system_.vectors * phased;
}

StateVector evolve(const HermitianOperator& H, const StateVector& psi0, double t) {
    if (H.rows() != psi0.size()) throw ArgumentError("evolve: dimension mismatch");
    return Evolver(H, psi0).state(t);
}

DensityMatrix partial_trace(const StateVector& psi, int d_A, int d_B) {
    if (d_A < 1 || d_B < 1 || psi.size() != static_cast<Eigen::Index>(d_A) * d_B)
        throw ArgumentError("partial_trace: state length does not equal d_A * d_B");
    Eigen::Map<const RowMajorMatrixXcd> M(psi.data(), d_A, d_B);
    return M * M.adjoint();
}

DensityMatrix partial_trace_a(const StateVector& psi, int d_A, int d_B) {
    if (d_A < 1 || d_B < 1 || psi.size() != static_cast<Eigen::Index>(d_A) * d_B)
        throw ArgumentError("partial_trace_a: state length does not equal d_A * d_B");
    Eigen::Map<const RowMajorMatrixXcd> M(psi.data(), d_A, d_B);
    return (M.adjoint() * M).transpose();
}

double purity(const DensityMatrix& rho) {
    // Tr rho^2 = sum |rho_ij|^2 for Hermitian rho.
    return rho.squaredNorm();
}

Eigen::MatrixXcd basis_with_first_vector(const StateVector& a) {
    const auto d = a.size();
    if (d < 1) throw ArgumentError("basis_with_first_vector: empty vector");
    Eigen::Index skip = 0;
    for (Eigen::Index k = 1; k < d; ++k)
        if (std::abs(a(k)) > std::abs(a(skip))) skip = k;

    Eigen::MatrixXcd U(d, d);
    U.col(0) = a / a.norm();
    Eigen::Index filled = 1;
    for (Eigen::Index k = 0; k < d; ++k) {
        if (k == skip) continue;
        Eigen::VectorXcd v = Eigen::VectorXcd::Unit(d, k);
        for (int pass = 0; pass < 2; ++pass)
            v -= U.leftCols(filled) * (U.leftCols(filled).adjoint() * v);
        U.col(filled++) = v / v.norm();
    }
    return U;
}

RngStream sample_stream(std::uint64_t seed, std::uint64_t sample_index, std::uint64_t purpose) {
    return RngStream(seed, sample_index).substream(purpose);
}

McResult mc_average(const EigensystemGenerator& generator, int d_A, int d_B, std::span<const double> times,
                    std::size_t n_samples, const McOptions& options) {
    if (n_samples < 1) throw ArgumentError("mc_average: n_samples must be >= 1");
    if (d_A < 1 || d_B < 1) throw ArgumentError("mc_average: subsystem dimensions must be >= 1");
    const std::size_t n_times = times.size();
    const int d = d_A * d_B;

    // Block layout depends only on n_samples, never on the worker count.
    const std::size_t block = std::max<std::size_t>(64, (n_samples + 63) / 64);
    const std::size_t n_blocks = (n_samples + block - 1) / block;
    std::vector<BlockSums> sums(n_blocks, BlockSums(n_times, d_A));

    parallel_for(n_blocks, options.threads, [&](std::size_t b) {
        BlockSums& acc = sums[b];
        const std::size_t end = std::min(n_samples, (b + 1) * block);
        for (std::size_t i = b * block; i < end; ++i) {
            RngStream h_rng = sample_stream(options.seed, i, kHamiltonianStream);
            Eigensystem es = generator(h_rng);
            if (es.vectors.rows() != d) throw ArgumentError("mc_average: generator dimension does not match d_A * d_B");
            es.energies *= options.energy_scale;

            StateVector a = StateVector::Unit(d_A, 0);
            StateVector bvec = StateVector::Unit(d_B, 0);
            if (options.random_initial_state) {
                RngStream s_rng = sample_stream(options.seed, i, kInitialStateStream);
                a = sample_haar_state(d_A, s_rng);
                bvec = sample_haar_state(d_B, s_rng);
            }
            StateVector psi0(d);
            for (int ka = 0; ka < d_A; ++ka) psi0.segment(ka * d_B, d_B) = a(ka) * bvec;
            const Eigen::MatrixXcd U = basis_with_first_vector(a);

            const Eigen::MatrixXcd psi_t = Evolver(std::move(es), psi0).states(times);
            for (std::size_t k = 0; k < n_times; ++k) {
                Eigen::Map<const RowMajorMatrixXcd> M(psi_t.col(static_cast<Eigen::Index>(k)).data(), d_A, d_B);
                const Eigen::MatrixXcd rho = U.adjoint() * (M * M.adjoint()) * U;
                acc.add_sample(k, rho, purity(rho), acc.count + 1.0);
            }
            acc.count += 1.0;
        }
    });

    BlockSums total(n_times, d_A);
    for (const auto& s : sums) total.add(s);

    McResult out;
    out.times.assign(times.begin(), times.end());
    out.n_samples = n_samples;
    const double n = total.count;
    for (std::size_t k = 0; k < n_times; ++k) {
        Eigen::MatrixXcd mean(d_A, d_A);
        mean.real() = total.re[k].mean;
        mean.imag() = total.im[k].mean;
        out.rho_mean.push_back(mean);
        out.rho_stderr_re.push_back(total.re[k].m2.unaryExpr([n](double m2) { return stderr_from_m2(m2, n); }));
        out.rho_stderr_im.push_back(total.im[k].m2.unaryExpr([n](double m2) { return stderr_from_m2(m2, n); }));
        out.purity_mean.push_back(total.purity[k].mean);
        out.purity_stderr.push_back(stderr_from_m2(total.purity[k].m2, n));
    }
    return out;
}

EigensystemGenerator gue_generator(int d, double lambda) {
    require_positive(d, "gue_generator");
    return [d, lambda](RngStream& rng) { return diagonalize(sample_gue(d, lambda, rng)); };
}

EigensystemGenerator poisson_generator(int d) {
    require_positive(d, "poisson_generator");
    return [d](RngStream& rng) {
        Eigensystem es;
        es.energies.resize(d);
        const double rate = 1.0 / std::sqrt(d + 1.0);
        for (int j = 0; j < d; ++j) es.energies(j) = rng.exponential(rate);
        es.vectors = sample_haar_unitary(d, rng);
        return es;
    };
}

EigensystemGenerator fixed_spectrum_generator(std::vector<double> spectrum) {
    if (spectrum.empty()) throw ArgumentError("fixed_spectrum_generator: empty spectrum");
    return [spectrum = std::move(spectrum)](RngStream& rng) {
        Eigensystem es;
        es.energies = Eigen::Map<const Eigen::VectorXd>(spectrum.data(), static_cast<Eigen::Index>(spectrum.size()));
        es.vectors = sample_haar_unitary(static_cast<int>(spectrum.size()), rng);
        return es;
    };
}

GapStats gap_statistics(const std::vector<std::vector<double>>& spectra) {
    GapStats stats;
    for (const auto& spectrum : spectra) {
        if (spectrum.size() < 3) throw ArgumentError("gap_statistics: each spectrum needs at least 3 levels");
        if (!std::is_sorted(spectrum.begin(), spectrum.end()))
            throw ArgumentError("gap_statistics: spectra must be sorted ascending");
        const double mean_gap = (spectrum.back() - spectrum.front()) / static_cast<double>(spectrum.size() - 1);
        if (!(mean_gap > 0)) {
            ++stats.skipped_spectra;
            continue;
        }
        std::vector<double> s;
        for (std::size_t j = 0; j + 1 < spectrum.size(); ++j) {
            double g = (spectrum[j + 1] - spectrum[j]) / mean_gap;
            if (g < 1e-10) g = 0.0;
            s.push_back(g);
            stats.gaps.push_back(g);
        }
        for (std::size_t j = 0; j + 1 < s.size(); ++j) {
            const double hi = std::max(s[j], s[j + 1]);
            if (hi == 0.0) {
                ++stats.skipped_ratios;
                continue;
            }
            stats.ratios.push_back(std::min(s[j], s[j + 1]) / hi);
        }
    }
    std::sort(stats.gaps.begin(), stats.gaps.end());
    return stats;
}

double GapStats::mean_ratio() const { return mean_and_stderr(ratios).mean; }

double GapStats::mean_ratio_stderr() const { return mean_and_stderr(ratios).stderr_; }

MeanError mean_and_stderr(std::span<const double> values) {
    MeanError out;
    if (values.empty()) return out;
    double sum = 0.0, sum_sq = 0.0;
    for (double v : values) {
        sum += v;
        sum_sq += v * v;
    }
    out.mean = sum / static_cast<double>(values.size());
    out.stderr_ = stderr_from_sums(sum, sum_sq, values.size());
    return out;
}

}  // namespace entdyn
