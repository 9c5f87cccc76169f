#pragma once

// Pauli strings on s qubits, stored as i^phase X^x Z^z with bit masks x, z.
// Site j is bit (s - 1 - j) of a basis label, so site 0 is the most
// significant bit and the A-major convention of quantum_sim holds when A is
// the leading block of sites.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace entdyn {

struct PauliString {
    int sites = 0;
    std::uint32_t x = 0;
    std::uint32_t z = 0;
    int phase = 0;  // power of i, kept in [0, 4)

    static PauliString identity(int sites);
    /// sigma^a on one site; a = 1, 2, 3 for X, Y, Z.
    static PauliString single(int sites, int site, int a);

    friend PauliString operator*(const PauliString& p, const PauliString& q);
    friend bool operator==(const PauliString&, const PauliString&) = default;

    PauliString adjoint() const;
    bool is_hermitian() const { return adjoint() == *this; }
    std::complex<double> phase_factor() const;
};

/// H += coeff * P, dense 2^s x 2^s.
void accumulate(Eigen::MatrixXcd& H, std::complex<double> coeff, const PauliString& P);
Eigen::MatrixXcd to_dense(const PauliString& P);

/// f_{2j} = (prod_{k<j} Z_k) X_j and f_{2j+1} = (prod_{k<j} Z_k) Y_j, zero-based j.
std::vector<PauliString> jordan_wigner_strings(int sites);

}  // namespace entdyn
