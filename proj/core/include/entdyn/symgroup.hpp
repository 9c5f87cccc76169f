#pragma once

// Combinatorics of the symmetric group S_q and exact Weingarten functions.
//
// Permutations are stored in zero-based one-line notation. Composition is
// (a * b)(i) = a(b(i)). Cycle notation in from_cycles() is one-based, so
// from_cycles(4, {{1, 2, 3}}) maps 1 -> 2 -> 3 -> 1.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace entdyn {

using BigInt = mpz_class;
using BigRational = mpq_class;

class Partition {
public:
    Partition() = default;
    /// Parts must be positive; they are sorted into non-increasing order.
    explicit Partition(std::vector<int> parts);
    Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}

    const std::vector<int>& parts() const noexcept { return parts_; }
    int weight() const noexcept { return weight_; }
    int length() const noexcept { return static_cast<int>(parts_.size()); }
    int operator[](std::size_t i) const { return parts_.at(i); }

    /// Size of the conjugacy class of this cycle type in S_weight.
    BigInt class_size() const;
    /// z_mu = prod_i i^{m_i} m_i!, the centralizer order.
    BigInt centralizer_order() const;

    std::string to_string() const;

    friend bool operator==(const Partition&, const Partition&) = default;
    friend auto operator<=>(const Partition& a, const Partition& b) { return a.parts_ <=> b.parts_; }

private:
    std::vector<int> parts_;
    int weight_ = 0;
};

/// All partitions of q, starting at {q} and ending at {1,...,1}.
std::vector<Partition> partitions_of(int q);

class Permutation {
public:
    Permutation() = default;
    /// Zero-based images; must be a bijection on {0, ..., q-1}.
    explicit Permutation(std::vector<int> images);

    static Permutation identity(int q);
    /// One-based one-line notation, e.g. {2, 1, 3} swaps the first two symbols.
    static Permutation from_one_line(const std::vector<int>& one_based);
    /// One-based disjoint cycles.
    static Permutation from_cycles(int q, const std::vector<std::vector<int>>& cycles);

    int size() const noexcept { return static_cast<int>(images_.size()); }
    int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& images() const noexcept { return images_; }

    Permutation inverse() const;
    /// Zero-based cycles, each starting at its smallest element, ordered by that element.
    std::vector<std::vector<int>> cycles() const;
    Partition cycle_type() const;
    int num_cycles() const;
    int sign() const;

    /// One-based cycle notation with fixed points omitted, "Id" for the identity.
    std::string to_string() const;

    friend Permutation operator*(const Permutation& a, const Permutation& b);
    friend bool operator==(const Permutation&, const Permutation&) = default;
    friend auto operator<=>(const Permutation& a, const Permutation& b) { return a.images_ <=> b.images_; }

private:
    std::vector<int> images_;
};

/// Every element of S_q in lexicographic order of one-line notation (identity first).
std::vector<Permutation> all_permutations(int q);

/// q! as a big integer.
BigInt factorial(int q);

/// Dimension of the irreducible representation lambda, q! / prod(hook lengths).
BigInt hook_dimension(const Partition& lambda);

/// Irreducible character chi^lambda at the class mu (Murnaghan-Nakayama). Memoized, thread-safe.
std::int64_t character(const Partition& lambda, const Partition& mu);

/// prod over cells (i, j) of lambda of (d + j - i).
BigInt content_polynomial(const Partition& lambda, long d);

/// Exact Wg(d, mu) via the character expansion. Requires d >= q; smaller d throws
/// SingularDimensionError because some content factor vanishes.
BigRational weingarten(long d, const Partition& mu);

/// Weingarten function valid for every d >= 1: the character sum restricted to
/// irreps with at most d rows. Equals weingarten() when d >= q; for d < q it is
/// the pseudo-inverse of the Gram matrix d^{#cycles(sigma tau^-1)}, which is what
/// Haar integrals over U(d) require.
BigRational weingarten_general(long d, const Partition& mu);

struct WeingartenTable {
    int q = 0;
    long d = 0;
    std::map<Partition, BigRational> values;

    const BigRational& at(const Partition& mu) const { return values.at(mu); }
};

/// One entry per partition of q. `general` selects weingarten_general().
WeingartenTable weingarten_table(long d, int q, bool general = false);

/// Dense square matrix of exact rationals, row-major.
class RationalMatrix {
public:
    RationalMatrix() = default;
    explicit RationalMatrix(std::size_t n) : n_(n), data_(n * n) {}
    std::size_t size() const noexcept { return n_; }
    BigRational& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const BigRational& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<BigRational> data_;
};

/// M[sigma][tau] = Wg(d, sigma * tau^-1), indexed in all_permutations(q) order.
RationalMatrix weingarten_matrix(long d, int q, bool general = false);

}  // namespace entdyn
