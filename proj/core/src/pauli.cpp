#include "entdyn/pauli.hpp"

#include <bit>

#include "entdyn/error.hpp"

namespace entdyn {

namespace {

constexpr int kMaxSites = 16;

std::uint32_t site_bit(int sites, int site) {
    if (site < 0 || site >= sites) throw ArgumentError("Pauli site index out of range");
    return std::uint32_t{1} << (sites - 1 - site);
}

}  // namespace

PauliString PauliString::identity(int sites) {
    if (sites < 1 || sites > kMaxSites) throw ArgumentError("Pauli strings support 1..16 sites");
    return {sites, 0, 0, 0};
}

PauliString PauliString::single(int sites, int site, int a) {
    PauliString p = identity(sites);
    const std::uint32_t bit = site_bit(sites, site);
    switch (a) {
        case 1: p.x = bit; break;
        case 2:
            p.x = bit;
            p.z = bit;
            p.phase = 1;  // Y = i X Z
            break;
        case 3: p.z = bit; break;
        default: throw ArgumentError("Pauli axis must be 1, 2 or 3");
    }
    return p;
}

PauliString operator*(const PauliString& p, const PauliString& q) {
    if (p.sites != q.sites) throw ArgumentError("Pauli product: site counts differ");
    // Z^z1 X^x2 = (-1)^{|z1 & x2|} X^x2 Z^z1.
    const int swaps = std::popcount(p.z & q.x);
    return {p.sites, p.x ^ q.x, p.z ^ q.z, (p.phase + q.phase + 2 * swaps) & 3};
}

PauliString PauliString::adjoint() const {
    // (X^x Z^z)^dag = Z^z X^x = (-1)^{|x & z|} X^x Z^z.
    const int swaps = std::popcount(x & z);
    return {sites, x, z, ((4 - phase) + 2 * swaps) & 3};
}

std::complex<double> PauliString::phase_factor() const {
    static const std::complex<double> powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return powers[phase & 3];
}

void accumulate(Eigen::MatrixXcd& H, std::complex<double> coeff, const PauliString& P) {
    const Eigen::Index dim = Eigen::Index{1} << P.sites;
    if (H.rows() != dim || H.cols() != dim) throw ArgumentError("accumulate: matrix size does not match 2^sites");
    const std::complex<double> c = coeff * P.phase_factor();
    for (std::uint32_t b = 0; b < static_cast<std::uint32_t>(dim); ++b) {
        const double sign = (std::popcount(P.z & b) & 1) ? -1.0 : 1.0;
        H(static_cast<Eigen::Index>(b ^ P.x), static_cast<Eigen::Index>(b)) += sign * c;
    }
}

Eigen::MatrixXcd to_dense(const PauliString& P) {
    const Eigen::Index dim = Eigen::Index{1} << P.sites;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
    accumulate(M, 1.0, P);
    return M;
}

std::vector<PauliString> jordan_wigner_strings(int sites) {
    std::vector<PauliString> out;
    PauliString string = PauliString::identity(sites);
    for (int j = 0; j < sites; ++j) {
        out.push_back(string * PauliString::single(sites, j, 1));
        out.push_back(string * PauliString::single(sites, j, 2));
        string = string * PauliString::single(sites, j, 3);
    }
    return out;
}

}  // namespace entdyn
