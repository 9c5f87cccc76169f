#include "entdyn/haar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "entdyn/error.hpp"
#include "entdyn/phase_sums.hpp"

namespace entdyn {

namespace {

struct UnionFind {
    std::vector<int> parent;
    std::vector<char> pinned;

    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)), pinned(static_cast<std::size_t>(n), 0) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int x, int y) {
        x = find(x);
        y = find(y);
        if (x == y) return;
        parent[static_cast<std::size_t>(y)] = x;
        pinned[static_cast<std::size_t>(x)] |= pinned[static_cast<std::size_t>(y)];
    }
    void pin(int x) { pinned[static_cast<std::size_t>(find(x))] = 1; }
    bool is_pinned(int x) { return pinned[static_cast<std::size_t>(find(x))] != 0; }
};

MonomialSpec moment_spec(int n, bool open) {
    if (n < 1) throw ArgumentError("trace moment order must be >= 1");
    MonomialSpec spec;
    spec.q = 2 * n;
    spec.num_a = open ? n + 1 : n;
    spec.num_b = n;
    for (int m = 0; m < n; ++m) {
        const int next_a = open ? m + 1 : (m + 1) % n;
        spec.I.push_back(Slot::composite(m, m));
        spec.I.push_back(Slot::fixed());
        spec.I_prime.push_back(Slot::fixed());
        spec.I_prime.push_back(Slot::composite(next_a, m));
        spec.phase_coeffs.push_back(-1);
        spec.phase_coeffs.push_back(+1);
    }
    if (open) {
        spec.open_row = 0;
        spec.open_col = n;
    }
    return spec;
}

// Packs a cycle type (lengths <= 15, at most 16 parts) into a sortable key.
std::uint64_t cycle_type_key(const std::vector<int>& images, std::vector<char>& seen, std::vector<int>& lengths) {
    const std::size_t q = images.size();
    std::fill(seen.begin(), seen.end(), 0);
    lengths.clear();
    for (std::size_t i = 0; i < q; ++i) {
        if (seen[i]) continue;
        int len = 0;
        for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(images[j])) {
            seen[j] = 1;
            ++len;
        }
        lengths.push_back(len);
    }
    std::sort(lengths.begin(), lengths.end(), std::greater<>());
    std::uint64_t key = 0;
    for (int len : lengths) key = (key << 4) | static_cast<std::uint64_t>(len);
    return key;
}

SymbolicAverage average(const MonomialSpec& spec, int n, long d_A, long d_B) {
    if (d_A < 1 || d_B < 1) throw ArgumentError("subsystem dimensions must be >= 1");
    if (spec.q > 15) throw ArgumentError("trace moment order too large");
    const long d = d_A * d_B;
    const auto perms = all_permutations(spec.q);

    std::vector<RValue> r_keys;
    std::vector<QValue> q_keys;
    std::vector<int> r_index(perms.size()), q_index(perms.size());
    {
        std::map<RValue, int> r_lookup;
        std::map<QValue, int> q_lookup;
        for (std::size_t i = 0; i < perms.size(); ++i) {
            auto r = compute_R(spec, perms[i]);
            auto [rit, rnew] = r_lookup.emplace(r, static_cast<int>(r_keys.size()));
            if (rnew) r_keys.push_back(r);
            r_index[i] = rit->second;
            auto qv = compute_Q(spec, perms[i]);
            auto [qit, qnew] = q_lookup.emplace(qv, static_cast<int>(q_keys.size()));
            if (qnew) q_keys.push_back(qv);
            q_index[i] = qit->second;
        }
    }

    // Class values keyed by packed cycle type.
    const auto table = weingarten_table(d, spec.q, /*general=*/true);
    std::vector<std::uint64_t> class_keys;
    std::vector<BigRational> class_values;
    for (const auto& [mu, value] : table.values) {
        std::uint64_t key = 0;
        for (int p : mu.parts()) key = (key << 4) | static_cast<std::uint64_t>(p);
        class_keys.push_back(key);
        class_values.push_back(value);
    }
    const std::size_t n_classes = class_keys.size();
    std::map<std::uint64_t, std::size_t> class_lookup;
    for (std::size_t c = 0; c < n_classes; ++c) class_lookup[class_keys[c]] = c;

    // Pair counts per (R, Q, class); exact integer arithmetic until the final contraction.
    std::vector<std::int64_t> counts(r_keys.size() * q_keys.size() * n_classes, 0);
    std::vector<std::vector<int>> inverses;
    inverses.reserve(perms.size());
    for (const auto& p : perms) inverses.push_back(p.inverse().images());

    std::vector<int> composed(static_cast<std::size_t>(spec.q));
    std::vector<char> seen(static_cast<std::size_t>(spec.q));
    std::vector<int> lengths;
    for (std::size_t s = 0; s < perms.size(); ++s) {
        const auto& sigma = perms[s].images();
        for (std::size_t t = 0; t < perms.size(); ++t) {
            const auto& tau_inv = inverses[t];
            for (std::size_t i = 0; i < composed.size(); ++i)
                composed[i] = sigma[static_cast<std::size_t>(tau_inv[i])];
            const std::size_t c = class_lookup.at(cycle_type_key(composed, seen, lengths));
            const std::size_t slot =
                (static_cast<std::size_t>(r_index[s]) * q_keys.size() + static_cast<std::size_t>(q_index[t])) *
                    n_classes +
                c;
            ++counts[slot];
        }
    }

    SymbolicAverage avg;
    avg.n = n;
    avg.d_A = d_A;
    avg.d_B = d_B;
    avg.open = spec.is_open();
    for (std::size_t r = 0; r < r_keys.size(); ++r) {
        for (std::size_t qi = 0; qi < q_keys.size(); ++qi) {
            BigRational coeff = 0;
            for (std::size_t c = 0; c < n_classes; ++c) {
                const auto k = counts[(r * q_keys.size() + qi) * n_classes + c];
                if (k != 0) coeff += class_values[c] * BigRational(static_cast<long>(k));
            }
            coeff.canonicalize();
            if (coeff != 0) avg.terms.emplace(std::make_pair(r_keys[r], q_keys[qi]), coeff);
        }
    }
    return avg;
}

BigRational power(long base, int exponent) {
    BigInt r = 1;
    for (int i = 0; i < exponent; ++i) r *= base;
    return BigRational(r);
}

std::complex<double> q_factor(const QValue& qv, const std::map<int, std::complex<double>>& cache) {
    std::complex<double> prod = 1.0;
    for (int m : qv.iota_multiples) prod *= cache.at(m);
    return prod;
}

std::map<int, std::complex<double>> iota_cache(const SymbolicAverage& avg, std::span<const double> spectrum, double t) {
    if (static_cast<long>(spectrum.size()) != avg.d())
        throw ArgumentError("spectrum length " + std::to_string(spectrum.size()) + " does not match d = " +
                            std::to_string(avg.d()));
    std::map<int, std::complex<double>> cache;
    for (const auto& [key, coeff] : avg.terms)
        for (int m : key.second.iota_multiples)
            if (!cache.count(m)) cache.emplace(m, m == 0 ? std::complex<double>(static_cast<double>(avg.d()), 0.0)
                                                         : iota(spectrum, m * t));
    return cache;
}

}  // namespace

MonomialSpec build_trace_moment_spec(int n) { return moment_spec(n, false); }

MonomialSpec build_matrix_element_spec(int n) { return moment_spec(n, true); }

int QValue::balance() const { return std::accumulate(iota_multiples.begin(), iota_multiples.end(), 0); }

RValue compute_R(const MonomialSpec& spec, const Permutation& sigma) {
    if (sigma.size() != spec.q) throw ArgumentError("compute_R: permutation size does not match spec");
    UnionFind ua(spec.num_a), ub(spec.num_b);
    for (int l = 0; l < spec.q; ++l) {
        const Slot& x = spec.I[static_cast<std::size_t>(l)];
        const Slot& y = spec.I_prime[static_cast<std::size_t>(sigma(l))];
        if (x.one && y.one) continue;
        if (x.one || y.one) {
            const Slot& c = x.one ? y : x;
            ua.pin(c.a);
            ub.pin(c.b);
            continue;
        }
        ua.unite(x.a, y.a);
        ub.unite(x.b, y.b);
    }

    RValue r;
    std::vector<char> counted_a(static_cast<std::size_t>(spec.num_a), 0);
    const int row_root = spec.is_open() ? ua.find(spec.open_row) : -1;
    const int col_root = spec.is_open() ? ua.find(spec.open_col) : -1;
    for (int a = 0; a < spec.num_a; ++a) {
        const int root = ua.find(a);
        if (counted_a[static_cast<std::size_t>(root)]) continue;
        counted_a[static_cast<std::size_t>(root)] = 1;
        if (root == row_root || root == col_root) continue;
        if (!ua.is_pinned(root)) ++r.exponent_dA;
    }
    std::vector<char> counted_b(static_cast<std::size_t>(spec.num_b), 0);
    for (int b = 0; b < spec.num_b; ++b) {
        const int root = ub.find(b);
        if (counted_b[static_cast<std::size_t>(root)]) continue;
        counted_b[static_cast<std::size_t>(root)] = 1;
        if (!ub.is_pinned(root)) ++r.exponent_dB;
    }

    if (spec.is_open()) {
        const bool row_pinned = ua.is_pinned(row_root);
        const bool col_pinned = ua.is_pinned(col_root);
        if (row_pinned && col_pinned)
            r.shape = OperatorShape::Projector;
        else if (row_root == col_root)
            r.shape = OperatorShape::Identity;
        else if (row_pinned)
            r.shape = OperatorShape::RowPinned;
        else if (col_pinned)
            r.shape = OperatorShape::ColPinned;
        else
            r.shape = OperatorShape::AllOnes;
    }
    return r;
}

QValue compute_Q(const MonomialSpec& spec, const Permutation& tau) {
    if (tau.size() != spec.q) throw ArgumentError("compute_Q: permutation size does not match spec");
    QValue qv;
    for (const auto& cycle : tau.cycles()) {
        int sum = 0;
        for (int a : cycle) sum += spec.phase_coeffs[static_cast<std::size_t>(a)];
        qv.iota_multiples.push_back(sum);
    }
    std::sort(qv.iota_multiples.begin(), qv.iota_multiples.end());
    return qv;
}

std::map<std::pair<OperatorShape, QValue>, BigRational> SymbolicAverage::collapsed() const {
    std::map<std::pair<OperatorShape, QValue>, BigRational> out;
    for (const auto& [key, coeff] : terms) {
        BigRational c = coeff * power(d_A, key.first.exponent_dA) * power(d_B, key.first.exponent_dB);
        auto& slot = out[{key.first.shape, key.second}];
        slot += c;
        slot.canonicalize();
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
}

SymbolicAverage haar_average_moment(int n, long d_A, long d_B) {
    return average(build_trace_moment_spec(n), n, d_A, d_B);
}

SymbolicAverage haar_average_matrix(int n, long d_A, long d_B) {
    return average(build_matrix_element_spec(n), n, d_A, d_B);
}

double evaluate_average(const SymbolicAverage& avg, std::span<const double> spectrum, double t) {
    if (avg.open) throw ArgumentError("evaluate_average: matrix average; use evaluate_matrix_average");
    auto cache = iota_cache(avg, spectrum, t);
    std::complex<double> total = 0.0;
    double scale = 0.0;
    for (const auto& [key, coeff] : avg.collapsed()) {
        const auto term = coeff.get_d() * q_factor(key.second, cache);
        total += term;
        scale += std::abs(term);
    }
    if (std::abs(total.imag()) > 1e-10 * std::max(1.0, scale))
        throw NumericalError("evaluate_average: imaginary residue " + std::to_string(total.imag()));
    return total.real();
}

Eigen::MatrixXcd evaluate_matrix_average(const SymbolicAverage& avg, std::span<const double> spectrum, double t) {
    if (!avg.open) throw ArgumentError("evaluate_matrix_average: trace average; use evaluate_average");
    auto cache = iota_cache(avg, spectrum, t);
    const auto dA = static_cast<Eigen::Index>(avg.d_A);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dA, dA);
    for (const auto& [key, coeff] : avg.collapsed()) {
        const auto w = coeff.get_d() * q_factor(key.second, cache);
        switch (key.first) {
            case OperatorShape::Projector: out(0, 0) += w; break;
            case OperatorShape::Identity: out.diagonal().array() += w; break;
            case OperatorShape::RowPinned: out.row(0).array() += w; break;
            case OperatorShape::ColPinned: out.col(0).array() += w; break;
            case OperatorShape::AllOnes: out.array() += w; break;
            case OperatorShape::Scalar: throw NumericalError("scalar term in a matrix average");
        }
    }
    return out;
}

}  // namespace entdyn
