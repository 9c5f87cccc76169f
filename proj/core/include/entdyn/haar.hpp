#pragma once

// Exact Haar averages over U(d) of trace moments of the reduced density matrix
//
//   rho_A(t) = Tr_B V e^{-i Lambda t} V^dag |1><1| V e^{i Lambda t} V^dag
//
// with d = d_A d_B. A moment is a sum over sigma, tau in S_q of
// R_sigma Q_tau Wg(d, sigma tau^-1), where R_sigma contracts the external
// index deltas and Q_tau the internal ones.
//
// Conventions: slot positions are zero-based. R_sigma imposes I[l] = I'[sigma(l)].
// Each cycle C of tau contributes iota((sum_{a in C} c_a) t), with iota(0) = d.

#include <complex>
#include <compare>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "entdyn/symgroup.hpp"

namespace entdyn {

/// An external slot: either the fixed basis label ONE or a composite (a, b) of symbol ids.
struct Slot {
    bool one = true;
    int a = -1;
    int b = -1;

    static Slot fixed() { return {}; }
    static Slot composite(int a, int b) { return {false, a, b}; }
    friend bool operator==(const Slot&, const Slot&) = default;
};

struct MonomialSpec {
    int q = 0;
    std::vector<Slot> I;
    std::vector<Slot> I_prime;
    std::vector<int> phase_coeffs;
    int num_a = 0;  // A-symbols are 0 .. num_a-1
    int num_b = 0;  // B-symbols are 0 .. num_b-1
    // Open A-symbols for matrix elements <row| rho_A^n |col>; -1 when the moment is a full trace.
    int open_row = -1;
    int open_col = -1;

    bool is_open() const noexcept { return open_row >= 0; }
};

/// Tr rho_A^n: factor m contributes ((a_m, b_m), ONE) to I and (ONE, (a_{m+1}, b_m)) to I',
/// closing cyclically.
MonomialSpec build_trace_moment_spec(int n);

/// <row| rho_A^n |col>: as build_trace_moment_spec but a_1 = row and a_{n+1} = col stay open.
MonomialSpec build_matrix_element_spec(int n);

/// Structure of the open A-indices of a matrix-element term.
enum class OperatorShape {
    Scalar,     // trace moment, nothing open
    Projector,  // |1><1|
    Identity,   // delta(row, col)
    RowPinned,  // row = 1, col free
    ColPinned,  // col = 1, row free
    AllOnes,    // row and col independent and free
};

struct RValue {
    int exponent_dA = 0;
    int exponent_dB = 0;
    OperatorShape shape = OperatorShape::Scalar;

    friend bool operator==(const RValue&, const RValue&) = default;
    friend auto operator<=>(const RValue&, const RValue&) = default;
};

/// Sorted multiset of iota multiples; a zero stands for a factor d.
struct QValue {
    std::vector<int> iota_multiples;

    int balance() const;
    friend bool operator==(const QValue&, const QValue&) = default;
    friend auto operator<=>(const QValue&, const QValue&) = default;
};

RValue compute_R(const MonomialSpec& spec, const Permutation& sigma);
QValue compute_Q(const MonomialSpec& spec, const Permutation& tau);

struct SymbolicAverage {
    int n = 0;
    long d_A = 0;
    long d_B = 0;
    bool open = false;
    /// Raw contraction: coefficient is sum Wg(d, sigma tau^-1) over pairs with these (R, Q).
    std::map<std::pair<RValue, QValue>, BigRational> terms;

    long d() const noexcept { return d_A * d_B; }
    /// Terms grouped by (shape, Q) with d_A^a d_B^b multiplied into the coefficient.
    std::map<std::pair<OperatorShape, QValue>, BigRational> collapsed() const;
};

/// Average of Tr rho_A^n. Uses the Weingarten function valid for every d >= 1, so d < 2n is allowed.
SymbolicAverage haar_average_moment(int n, long d_A, long d_B);

/// Average of the d_A x d_A matrix rho_A^n.
SymbolicAverage haar_average_matrix(int n, long d_A, long d_B);

/// Numeric value of a trace moment. Throws NumericalError if the imaginary residue exceeds 1e-10.
double evaluate_average(const SymbolicAverage& avg, std::span<const double> spectrum, double t);

/// Numeric d_A x d_A value of a matrix average.
Eigen::MatrixXcd evaluate_matrix_average(const SymbolicAverage& avg, std::span<const double> spectrum, double t);

}  // namespace entdyn
