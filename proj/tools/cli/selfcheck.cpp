#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "cli.hpp"
#include "entdyn/haar.hpp"
#include "entdyn/models.hpp"
#include "entdyn/phase_sums.hpp"
#include "entdyn/spectral.hpp"
#include "entdyn/symgroup.hpp"

namespace entdyn::cli {

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

// Numerators over prod_{z<q} (d^2 - z^2), as polynomials in d (lowest degree first).
struct Table1Row {
    Partition mu;
    std::vector<long> numerator;
};

BigInt poly(const std::vector<long>& c, long d) {
    BigInt v = 0, p = 1;
    for (long k : c) {
        v += p * k;
        p *= d;
    }
    return v;
}

SelfcheckLine check_table1(int q, const std::vector<Table1Row>& rows) {
    for (long d = 4; d <= 12; ++d) {
        BigInt den = 1;
        for (long z = 0; z < q; ++z) den *= d * d - z * z;
        for (const auto& row : rows) {
            BigRational expected(poly(row.numerator, d), den);
            expected.canonicalize();
            if (weingarten(d, row.mu) != expected)
                return {"table1", false, "q=" + std::to_string(q) + " mismatch at d=" + std::to_string(d) + " mu=" +
                                             row.mu.to_string()};
        }
    }
    return {"table1", true, "exact q=" + std::to_string(q) + " d=4..12"};
}

struct Table2Row {
    std::vector<std::vector<int>> cycles;
    int a, b;                    // R = d_A^a d_B^b
    std::vector<int> multiples;  // Q
};

SelfcheckLine check_table2() {
    const std::vector<int> chi2{-1, -1, 1, 1}, dchi{-1, 0, 1}, chi{-1, 1}, dd{0, 0}, d1{0};
    const std::vector<Table2Row> rows{
        {{}, 0, 0, chi2},           {{{1, 2, 3}}, 0, 1, chi},     {{{1, 3, 2}}, 1, 0, chi},
        {{{1, 2, 4}}, 0, 1, chi},   {{{1, 4, 2}}, 1, 0, chi},     {{{1, 3, 4}}, 0, 1, chi},
        {{{1, 4, 3}}, 1, 0, chi},   {{{2, 3, 4}}, 0, 1, chi},     {{{2, 4, 3}}, 1, 0, chi},
        {{{1, 2}, {3, 4}}, 1, 2, dd}, {{{1, 3}, {2, 4}}, 0, 0, {-2, 2}}, {{{1, 4}, {2, 3}}, 2, 1, dd},
        {{{1, 2}}, 0, 1, dchi},     {{{1, 3}}, 0, 0, {-2, 1, 1}}, {{{1, 4}}, 1, 0, dchi},
        {{{2, 3}}, 1, 0, dchi},     {{{2, 4}}, 0, 0, {-1, -1, 2}}, {{{3, 4}}, 0, 1, dchi},
        {{{1, 2, 3, 4}}, 1, 2, d1}, {{{1, 2, 4, 3}}, 0, 1, d1},  {{{1, 3, 2, 4}}, 1, 0, d1},
        {{{1, 3, 4, 2}}, 0, 1, d1}, {{{1, 4, 2, 3}}, 1, 0, d1},  {{{1, 4, 3, 2}}, 2, 1, d1},
    };
    const auto spec = build_trace_moment_spec(2);
    int matched = 0;
    for (const auto& row : rows) {
        const auto p = Permutation::from_cycles(4, row.cycles);
        const auto r = compute_R(spec, p);
        const auto qv = compute_Q(spec, p);
        if (r.exponent_dA != row.a || r.exponent_dB != row.b)
            return {"table2", false, "R mismatch at " + p.to_string()};
        if (qv.iota_multiples != row.multiples) return {"table2", false, "Q mismatch at " + p.to_string()};
        matched += 2;
    }
    return {"table2", true, "exact " + std::to_string(matched) + " entries"};
}

double chi4(double t) {
    const double x = t * t;
    return (12 - 48 * x + 46 * x * x - 64.0 / 3 * std::pow(x, 3) + 25.0 / 6 * std::pow(x, 4) - std::pow(x, 5) / 3) *
               std::exp(-x) +
           4;
}

double xi4(double t) {
    const double x = t * t, x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x;
    const double e = std::exp(-x);
    return 24 + (144 - 576 * x + 552 * x2 - 256 * x3 + 50 * x4 - 4 * x5) * e +
           (24 - 192 * x + 448 * x2 - 1024.0 / 3 * x3 + 256.0 / 3 * x4) * e * e +
           (96 - 1152 * x + 3312 * x2 - 3328 * x3 + 1548 * x4 - 216 * x5) * e * e * e +
           (48 - 768 * x + 2944 * x2 - 16384.0 / 3 * x3 + 12800.0 / 3 * x4 - 4096.0 / 3 * x5) * e * e * e * e;
}

SelfcheckLine check_polynomial(const char* name, double (*analytic)(int, double), double (*closed)(double), double tol) {
    double worst = 0.0;
    for (int k = 0; k <= 600; ++k) {
        const double t = 0.01 * k;
        worst = std::max(worst, std::abs(analytic(4, t) - closed(t)));
    }
    return {name, worst < tol, "d=4 closed form max deviation " + sci(worst) + " over t in [0,6]"};
}

SelfcheckLine check_haar() {
    const std::vector<double> E{-1.3, -0.2, 0.45, 1.9};
    const auto m1 = haar_average_matrix(1, 2, 2);
    const auto avg2 = haar_average_moment(2, 2, 2);
    double worst = 0.0;
    for (double t : {0.0, 0.3, 0.8, 1.7, 4.2}) {
        const auto M = evaluate_matrix_average(m1, E, t);
        const auto c = rho_coefficients_from_chi(2, 2, chi(E, t));
        worst = std::max(worst, std::abs(M(0, 0).real() - (c.p1 + c.pmix / 2)));
        worst = std::max(worst, std::abs(M(1, 1).real() - c.pmix / 2));
        worst = std::max(worst, std::abs(M(0, 1)));
        worst = std::max(worst, std::abs(evaluate_average(avg2, E, t) - purity_from_xi(2, 2, xi(E, t))));
    }
    return {"haar", worst < 1e-12, "n=1,2 engine vs closed forms max deviation " + sci(worst)};
}

SelfcheckLine check_majoranas() {
    double worst = 0.0;
    for (int s = 1; s <= 4; ++s) {
        const auto f = jordan_wigner_majoranas(s);
        const auto I = Eigen::MatrixXcd::Identity(f[0].rows(), f[0].cols());
        for (std::size_t a = 0; a < f.size(); ++a)
            for (std::size_t b = a; b < f.size(); ++b) {
                const Eigen::MatrixXcd ac = f[a] * f[b] + f[b] * f[a] - (a == b ? 2.0 : 0.0) * I;
                worst = std::max(worst, ac.cwiseAbs().maxCoeff());
            }
    }
    return {"majorana", worst <= 1e-12, "anticommutator max deviation " + sci(worst) + " for s<=4"};
}

SelfcheckLine check_characters() {
    for (int q = 1; q <= 6; ++q) {
        const auto parts = partitions_of(q);
        for (const auto& l1 : parts)
            for (const auto& l2 : parts) {
                BigInt sum = 0;
                for (const auto& mu : parts)
                    sum += mu.class_size() * BigInt(static_cast<long>(character(l1, mu) * character(l2, mu)));
                if (sum != (l1 == l2 ? factorial(q) : BigInt(0)))
                    return {"characters", false, "orthogonality fails at q=" + std::to_string(q)};
            }
    }
    return {"characters", true, "orthogonality exact for q<=6"};
}

}  // namespace

std::vector<SelfcheckLine> run_selfcheck() {
    std::vector<SelfcheckLine> out;
    out.push_back(check_characters());
    out.push_back(check_table1(2, {{{1, 1}, {0, 0, 1}}, {{2}, {0, -1}}}));
    out.push_back(check_table1(4, {{{1, 1, 1, 1}, {6, 0, -8, 0, 1}},
                                   {{2, 1, 1}, {0, 4, 0, -1}},
                                   {{2, 2}, {6, 0, 1}},
                                   {{3, 1}, {-3, 0, 2}},
                                   {{4}, {0, -5}}}));
    out.push_back(check_table2());
    out.push_back(check_haar());
    out.push_back(check_polynomial("chi", chi_mean, chi4, 1e-9));
    out.push_back(check_polynomial("xi", xi_mean, xi4, 1e-9));
    out.push_back(check_majoranas());
    return out;
}

}  // namespace entdyn::cli
