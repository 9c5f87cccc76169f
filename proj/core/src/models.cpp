#include "entdyn/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "entdyn/error.hpp"
#include "entdyn/parallel.hpp"
#include "entdyn/spectral.hpp"

namespace entdyn {

namespace {

using cd = std::complex<double>;
using Axis = Eigen::Vector3d;

struct Names {
    ModelFamily family;
    std::string_view name;
};

constexpr Names kNames[] = {
    {ModelFamily::TFIM, "TFIM"}, {ModelFamily::DTFIM, "DTFIM"}, {ModelFamily::XXZ, "XXZ"},
    {ModelFamily::DXXZ, "DXXZ"}, {ModelFamily::SYK, "SYK"},     {ModelFamily::SG, "SG"},
    {ModelFamily::CS, "CS"},     {ModelFamily::GUE, "GUE"},     {ModelFamily::POISSON, "POISSON"},
};

HermitianOperator zero_operator(int sites) {
    const Eigen::Index dim = Eigen::Index{1} << sites;
    return HermitianOperator::Zero(dim, dim);
}

// coeff * (n . sigma_j)
void add_field(HermitianOperator& H, int sites, int j, double coeff, const Axis& n) {
    for (int a = 0; a < 3; ++a)
        if (n(a) != 0.0) accumulate(H, coeff * n(a), PauliString::single(sites, j, a + 1));
}

// coeff * (n . sigma_j)(m . sigma_k), j != k
void add_bond(HermitianOperator& H, int sites, int j, int k, double coeff, const Axis& n, const Axis& m) {
    for (int a = 0; a < 3; ++a) {
        if (n(a) == 0.0) continue;
        const auto pa = PauliString::single(sites, j, a + 1);
        for (int b = 0; b < 3; ++b)
            if (m(b) != 0.0) accumulate(H, coeff * n(a) * m(b), pa * PauliString::single(sites, k, b + 1));
    }
}

// coeff * sum_{a,b} c_ab sigma_j^a sigma_k^b; j == k multiplies on the same site
void add_coupling(HermitianOperator& H, int sites, int j, int k, const Eigen::Matrix3d& c) {
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (c(a, b) != 0.0)
                accumulate(H, c(a, b), PauliString::single(sites, j, a + 1) * PauliString::single(sites, k, b + 1));
}

Eigen::Matrix3d normal_matrix3(RngStream& rng) {
    Eigen::Matrix3d m;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) m(a, b) = rng.normal();
    return m;
}

Axis normal_vector3(RngStream& rng) {
    Axis v;
    for (int a = 0; a < 3; ++a) v(a) = rng.normal();
    return v;
}

void require_chain(const ModelSpec& spec) {
    if (spec.sites() < 2) throw ArgumentError(std::string(family_name(spec.family)) + " needs at least 2 sites");
}

HermitianOperator build_dtfim(const ModelSpec& spec, RngStream& rng) {
    const int s = spec.sites();
    HermitianOperator H = zero_operator(s);
    for (int j = 0; j < s; ++j) {
        const Eigen::Matrix3d X = sample_so3(rng);
        const Eigen::Matrix3d Y = sample_so3(rng);
        const double g = rng.normal();
        add_bond(H, s, j, (j + 1) % s, 1.0, X.row(0), X.row(0));
        add_field(H, s, j, spec.J * g, Y.row(2));
    }
    return H;
}

HermitianOperator build_dxxz(const ModelSpec& spec, RngStream& rng) {
    const int s = spec.sites();
    HermitianOperator H = zero_operator(s);
    for (int j = 0; j < s; ++j) {
        const Eigen::Matrix3d X = sample_so3(rng);
        const Eigen::Matrix3d Y = sample_so3(rng);
        const double g = rng.normal();
        const double h = rng.normal();
        const int k = (j + 1) % s;
        add_bond(H, s, j, k, 1.0, X.row(0), X.row(0));
        add_bond(H, s, j, k, 1.0, X.row(1), X.row(1));
        add_bond(H, s, j, k, spec.J * g, X.row(2), X.row(2));
        add_field(H, s, j, spec.B * h, Y.row(2));
    }
    return H;
}

HermitianOperator build_sg(const ModelSpec& spec, RngStream& rng) {
    const int s = spec.sites();
    const Axis h_diag = normal_vector3(rng);
    const Eigen::Matrix3d h_global = normal_matrix3(rng);
    const Axis g_global = normal_vector3(rng);
    HermitianOperator H = zero_operator(s);
    for (int j = 0; j < s; ++j) {
        const Eigen::Matrix3d h_site = normal_matrix3(rng);
        const Axis g_site = normal_vector3(rng);
        Eigen::Matrix3d c = spec.J1 * h_global + spec.J2 * h_site;
        c.diagonal() += h_diag;
        add_coupling(H, s, j, (j + 1) % s, c);
        for (int a = 0; a < 3; ++a)
            accumulate(H, g_global(a) + spec.J3 * g_site(a), PauliString::single(s, j, a + 1));
    }
    return H;
}

HermitianOperator build_cs(const ModelSpec& spec, RngStream& rng) {
    const int s = spec.sites();
    HermitianOperator H = zero_operator(s);
    for (int j = 0; j < spec.s_A; ++j) accumulate(H, spec.B * rng.normal(), PauliString::single(s, j, 3));
    // Central block: every ordered pair (j, k), j == k included.
    for (int j = 0; j < spec.s_A; ++j)
        for (int k = 0; k < spec.s_A; ++k) {
            const Axis h = normal_vector3(rng);
            add_coupling(H, s, j, k, spec.J * Eigen::Matrix3d(h.asDiagonal()));
        }
    for (int j = 0; j < spec.s_A; ++j)
        for (int k = spec.s_A; k < s; ++k) {
            const Axis h = normal_vector3(rng);
            add_coupling(H, s, j, k, Eigen::Matrix3d(h.asDiagonal()));
        }
    return H;
}

HermitianOperator poisson_operator(int d, RngStream& rng) {
    const double rate = 1.0 / std::sqrt(d + 1.0);
    Eigen::VectorXd E(d);
    for (int j = 0; j < d; ++j) E(j) = rng.exponential(rate);
    const Eigen::MatrixXcd V = sample_haar_unitary(d, rng);
    return V * E.cast<cd>().asDiagonal() * V.adjoint();
}

std::size_t syk_term_count(int majoranas) {
    const std::size_t n = static_cast<std::size_t>(majoranas);
    return n < 4 ? 0 : n * (n - 1) * (n - 2) * (n - 3) / 24;
}

DynamicsTrace analytic_trace(int d_A, int d_B, std::span<const double> times, bool poisson) {
    DynamicsTrace out;
    out.times.assign(times.begin(), times.end());
    const int d = d_A * d_B;
    for (double t : times) {
        const auto c = poisson ? rho_coefficients_from_chi(d_A, d_B, chi_poisson(d, t)) : rho_mean_coeffs(d_A, d_B, t);
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(d_A, d_A) * (c.pmix / d_A);
        rho(0, 0) += c.p1;
        out.rho.push_back(std::move(rho));
    }
    return out;
}

}  // namespace

std::string_view family_name(ModelFamily family) {
    for (const auto& n : kNames)
        if (n.family == family) return n.name;
    return "?";
}

ModelFamily parse_family(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    if (upper == "EXPONENTIAL") upper = "POISSON";
    for (const auto& n : kNames)
        if (n.name == upper) return n.family;
    throw ArgumentError("unknown model family '" + std::string(name) + "'");
}

const std::vector<ModelFamily>& all_families() {
    static const std::vector<ModelFamily> families = [] {
        std::vector<ModelFamily> f;
        for (const auto& n : kNames) f.push_back(n.family);
        return f;
    }();
    return families;
}

bool is_physical(ModelFamily family) { return family != ModelFamily::GUE && family != ModelFamily::POISSON; }

void ModelSpec::validate() const {
    if (s_A < 1 || s_B < 0) throw ArgumentError("model needs s_A >= 1 and s_B >= 0");
    if (sites() > 12) throw ArgumentError("at most 12 sites are supported by dense diagonalization");
    if (!(lambda > 0)) throw ArgumentError("lambda must be positive");
    switch (family) {
        case ModelFamily::TFIM:
        case ModelFamily::DTFIM:
        case ModelFamily::XXZ:
        case ModelFamily::DXXZ:
        case ModelFamily::SG: require_chain(*this); break;
        case ModelFamily::SYK:
            if (2 * sites() < 4) throw ArgumentError("SYK needs at least 4 Majoranas (2 sites)");
            break;
        default: break;
    }
}

HermitianOperator tfim_hamiltonian(int sites, double J, double g, const Eigen::Matrix3d& X) {
    if (sites < 2) throw ArgumentError("TFIM needs at least 2 sites");
    HermitianOperator H = zero_operator(sites);
    for (int j = 0; j < sites; ++j) {
        add_bond(H, sites, j, (j + 1) % sites, 1.0, X.row(0), X.row(0));
        add_field(H, sites, j, J * g, X.row(2));
    }
    return H;
}

HermitianOperator xxz_hamiltonian(int sites, double B, double J, double g, double h, const Eigen::Matrix3d& X) {
    if (sites < 2) throw ArgumentError("XXZ needs at least 2 sites");
    HermitianOperator H = zero_operator(sites);
    for (int j = 0; j < sites; ++j) {
        const int k = (j + 1) % sites;
        add_bond(H, sites, j, k, 1.0, X.row(0), X.row(0));
        add_bond(H, sites, j, k, 1.0, X.row(1), X.row(1));
        add_bond(H, sites, j, k, J * g, X.row(2), X.row(2));
        add_field(H, sites, j, B * h, X.row(2));
    }
    return H;
}

HermitianOperator syk_hamiltonian(int sites, double J2, const std::vector<double>& couplings) {
    const auto f = jordan_wigner_strings(sites);
    const int n = static_cast<int>(f.size());
    if (couplings.size() != syk_term_count(n))
        throw ArgumentError("SYK needs C(2s, 4) = " + std::to_string(syk_term_count(n)) + " couplings");
    HermitianOperator H = zero_operator(sites);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const auto fij = f[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(j)];
            for (int k = j + 1; k < n; ++k) {
                const auto fijk = fij * f[static_cast<std::size_t>(k)];
                for (int l = k + 1; l < n; ++l) accumulate(H, J2 * couplings[idx++], fijk * f[static_cast<std::size_t>(l)]);
            }
        }
    return H;
}

HermitianOperator build_model(const ModelSpec& spec, RngStream& rng) {
    spec.validate();
    const int s = spec.sites();
    HermitianOperator H;
    switch (spec.family) {
        case ModelFamily::TFIM: {
            const Eigen::Matrix3d X = sample_so3(rng);
            const double g = rng.normal();
            H = tfim_hamiltonian(s, spec.J, g, X);
            break;
        }
        case ModelFamily::DTFIM: H = build_dtfim(spec, rng); break;
        case ModelFamily::XXZ: {
            const Eigen::Matrix3d X = sample_so3(rng);
            const double g = rng.normal();
            const double h = rng.normal();
            H = xxz_hamiltonian(s, spec.B, spec.J, g, h, X);
            break;
        }
        case ModelFamily::DXXZ: H = build_dxxz(spec, rng); break;
        case ModelFamily::SYK: {
            std::vector<double> g(syk_term_count(2 * s));
            for (auto& v : g) v = rng.normal();
            H = syk_hamiltonian(s, spec.J2, g);
            break;
        }
        case ModelFamily::SG: H = build_sg(spec, rng); break;
        case ModelFamily::CS: H = build_cs(spec, rng); break;
        case ModelFamily::GUE: H = sample_gue(spec.dim(), spec.lambda, rng); break;
        case ModelFamily::POISSON: H = poisson_operator(spec.dim(), rng); break;
    }
    // Removes rounding asymmetry so H is Hermitian to the last bit.
    HermitianOperator Hh = 0.5 * (H + H.adjoint());
    return Hh;
}

std::vector<Eigen::MatrixXcd> jordan_wigner_majoranas(int sites) {
    std::vector<Eigen::MatrixXcd> out;
    for (const auto& p : jordan_wigner_strings(sites)) out.push_back(to_dense(p));
    return out;
}

double rescale_energies(const std::vector<std::vector<double>>& spectra) {
    if (spectra.empty()) throw ArgumentError("rescale_energies: no spectra");
    const std::size_t d = spectra.front().size();
    if (d < 2) throw ArgumentError("rescale_energies: spectra need at least 2 levels");
    double total = 0.0;
    for (const auto& s : spectra) {
        if (s.size() != d) throw ArgumentError("rescale_energies: spectra of different lengths");
        double sum = 0.0, sum_sq = 0.0;
        for (double e : s) {
            sum += e;
            sum_sq += e * e;
        }
        total += 2.0 * static_cast<double>(d) * sum_sq - 2.0 * sum * sum;
    }
    const double m2 = total / (static_cast<double>(spectra.size()) * static_cast<double>(d) * (d - 1.0));
    if (!(m2 > 0)) throw NumericalError("rescale_energies: ensemble is fully degenerate");
    return std::sqrt(2.0 * (static_cast<double>(d) + 1.0) / m2);
}

double ensemble_energy_scale(const ModelSpec& spec, std::size_t n_samples, std::uint64_t seed, int threads) {
    if (n_samples < 1) throw ArgumentError("ensemble_energy_scale: n_samples must be >= 1");
    spec.validate();
    const double d = spec.dim();
    std::vector<double> per_sample(n_samples);
    parallel_for(n_samples, threads, [&](std::size_t i) {
        RngStream rng = sample_stream(seed, i, kHamiltonianStream);
        const HermitianOperator H = build_model(spec, rng);
        const double tr = H.trace().real();
        per_sample[i] = 2.0 * d * H.squaredNorm() - 2.0 * tr * tr;
    });
    double total = 0.0;
    for (double v : per_sample) total += v;
    const double m2 = total / (static_cast<double>(n_samples) * d * (d - 1.0));
    if (!(m2 > 0)) throw NumericalError("ensemble_energy_scale: ensemble is fully degenerate");
    return std::sqrt(2.0 * (d + 1.0) / m2);
}

EigensystemGenerator model_generator(const ModelSpec& spec) {
    spec.validate();
    if (spec.family == ModelFamily::POISSON && !spec.scramble) return poisson_generator(spec.dim());
    return [spec](RngStream& rng) {
        Eigensystem es;
        if (spec.family == ModelFamily::POISSON) {
            es = poisson_generator(spec.dim())(rng);
        } else {
            es = diagonalize(build_model(spec, rng));
        }
        if (spec.scramble) es.vectors = sample_haar_unitary(spec.dim(), rng) * es.vectors;
        return es;
    };
}

McResult ensemble_dynamics(const ModelSpec& spec, std::span<const double> times, std::size_t n_samples,
                           const McOptions& options) {
    spec.validate();
    McOptions opts = options;
    if (is_physical(spec.family))
        opts.energy_scale *= ensemble_energy_scale(spec, n_samples, options.seed, options.threads);
    return mc_average(model_generator(spec), spec.d_A(), spec.d_B(), times, n_samples, opts);
}

DynamicsTrace trace_from(const McResult& result) { return {result.times, result.rho_mean}; }

DynamicsTrace analytic_gue_trace(int d_A, int d_B, std::span<const double> times) {
    return analytic_trace(d_A, d_B, times, false);
}

DynamicsTrace analytic_poisson_trace(int d_A, int d_B, std::span<const double> times) {
    return analytic_trace(d_A, d_B, times, true);
}

double distance_d6(const DynamicsTrace& a, const DynamicsTrace& b) {
    constexpr double kWindow = 6.0;
    constexpr double kTol = 1e-9;
    if (a.times != b.times) throw ArgumentError("distance_d6: time grids differ");
    if (a.rho.size() != a.times.size() || b.rho.size() != b.times.size())
        throw ArgumentError("distance_d6: trace length does not match its grid");
    if (a.times.empty() || std::abs(a.times.front()) > kTol || a.times.back() < kWindow - kTol)
        throw ArgumentError("distance_d6: grid must span [0, 6]");
    auto norm_at = [&](std::size_t k) {
        const Eigen::MatrixXcd diff = a.rho[k] - b.rho[k];
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(diff);
        return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    };
    double integral = 0.0;
    double prev = norm_at(0);
    for (std::size_t k = 1; k < a.times.size() && a.times[k] <= kWindow + kTol; ++k) {
        const double cur = norm_at(k);
        integral += 0.5 * (a.times[k] - a.times[k - 1]) * (prev + cur);
        prev = cur;
    }
    return integral;
}

std::vector<std::vector<double>> ensemble_spectra(const ModelSpec& spec, std::size_t n_samples, std::uint64_t seed,
                                                  int threads) {
    spec.validate();
    const double scale = is_physical(spec.family) ? ensemble_energy_scale(spec, n_samples, seed, threads) : 1.0;
    std::vector<std::vector<double>> out(n_samples);
    parallel_for(n_samples, threads, [&](std::size_t i) {
        RngStream rng = sample_stream(seed, i, kHamiltonianStream);
        std::vector<double> e;
        if (spec.family == ModelFamily::POISSON) {
            const double rate = 1.0 / std::sqrt(spec.dim() + 1.0);
            for (int j = 0; j < spec.dim(); ++j) e.push_back(rng.exponential(rate));
            std::sort(e.begin(), e.end());
        } else {
            const Eigen::VectorXd ev = eigenvalues(build_model(spec, rng));
            e.assign(ev.data(), ev.data() + ev.size());
        }
        for (auto& v : e) v *= scale;
        out[i] = std::move(e);
    });
    return out;
}

}  // namespace entdyn
