#include "entdyn/symgroup.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>

#include "entdyn/error.hpp"

namespace entdyn {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (int p : parts_) {
        if (p < 1) throw ArgumentError("partition parts must be positive");
    }
    std::sort(parts_.begin(), parts_.end(), std::greater<>());
    weight_ = std::accumulate(parts_.begin(), parts_.end(), 0);
}

BigInt Partition::centralizer_order() const {
    BigInt z = 1;
    std::map<int, int> multiplicity;
    for (int p : parts_) ++multiplicity[p];
    for (auto [part, m] : multiplicity) {
        for (int i = 0; i < m; ++i) z *= part;
        z *= factorial(m);
    }
    return z;
}

BigInt Partition::class_size() const { return factorial(weight_) / centralizer_order(); }

std::string Partition::to_string() const {
    std::ostringstream out;
    out << '{';
    for (std::size_t i = 0; i < parts_.size(); ++i) out << (i ? "," : "") << parts_[i];
    out << '}';
    return out.str();
}

std::vector<Partition> partitions_of(int q) {
    if (q < 0) throw ArgumentError("partitions_of: q must be non-negative");
    std::vector<Partition> result;
    std::vector<int> current;
    std::function<void(int, int)> rec = [&](int remaining, int max_part) {
        if (remaining == 0) {
            result.emplace_back(current);
            return;
        }
        for (int p = std::min(remaining, max_part); p >= 1; --p) {
            current.push_back(p);
            rec(remaining - p, p);
            current.pop_back();
        }
    };
    rec(q, q);
    return result;
}

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
    std::vector<char> seen(images_.size(), 0);
    for (int v : images_) {
        if (v < 0 || v >= size() || seen[static_cast<std::size_t>(v)])
            throw ArgumentError("Permutation: images are not a bijection");
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

Permutation Permutation::identity(int q) {
    std::vector<int> im(static_cast<std::size_t>(q));
    std::iota(im.begin(), im.end(), 0);
    return Permutation(std::move(im));
}

Permutation Permutation::from_one_line(const std::vector<int>& one_based) {
    std::vector<int> im;
    im.reserve(one_based.size());
    for (int v : one_based) im.push_back(v - 1);
    return Permutation(std::move(im));
}

Permutation Permutation::from_cycles(int q, const std::vector<std::vector<int>>& cycles) {
    std::vector<int> im(static_cast<std::size_t>(q));
    std::iota(im.begin(), im.end(), 0);
    std::vector<char> used(static_cast<std::size_t>(q), 0);
    for (const auto& c : cycles) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            int from = c[k] - 1;
            int to = c[(k + 1) % c.size()] - 1;
            if (from < 0 || from >= q || used[static_cast<std::size_t>(from)])
                throw ArgumentError("from_cycles: cycles must be disjoint and within 1..q");
            used[static_cast<std::size_t>(from)] = 1;
            im[static_cast<std::size_t>(from)] = to;
        }
    }
    return Permutation(std::move(im));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(images_.size());
    for (int i = 0; i < size(); ++i) inv[static_cast<std::size_t>(images_[static_cast<std::size_t>(i)])] = i;
    return Permutation(std::move(inv));
}

std::vector<std::vector<int>> Permutation::cycles() const {
    std::vector<std::vector<int>> out;
    std::vector<char> seen(images_.size(), 0);
    for (int i = 0; i < size(); ++i) {
        if (seen[static_cast<std::size_t>(i)]) continue;
        std::vector<int> c;
        for (int j = i; !seen[static_cast<std::size_t>(j)]; j = images_[static_cast<std::size_t>(j)]) {
            seen[static_cast<std::size_t>(j)] = 1;
            c.push_back(j);
        }
        out.push_back(std::move(c));
    }
    return out;
}

Partition Permutation::cycle_type() const {
    std::vector<int> lengths;
    for (const auto& c : cycles()) lengths.push_back(static_cast<int>(c.size()));
    return Partition(std::move(lengths));
}

int Permutation::num_cycles() const { return static_cast<int>(cycles().size()); }

int Permutation::sign() const { return ((size() - num_cycles()) % 2 == 0) ? 1 : -1; }

std::string Permutation::to_string() const {
    std::ostringstream out;
    bool any = false;
    for (const auto& c : cycles()) {
        if (c.size() < 2) continue;
        any = true;
        out << '(';
        for (int v : c) out << v + 1;
        out << ')';
    }
    return any ? out.str() : "Id";
}

Permutation operator*(const Permutation& a, const Permutation& b) {
    if (a.size() != b.size()) throw ArgumentError("Permutation composition: size mismatch");
    std::vector<int> im(a.images_.size());
    for (std::size_t i = 0; i < im.size(); ++i) im[i] = a.images_[static_cast<std::size_t>(b.images_[i])];
    return Permutation(std::move(im));
}

std::vector<Permutation> all_permutations(int q) {
    std::vector<int> im(static_cast<std::size_t>(q));
    std::iota(im.begin(), im.end(), 0);
    std::vector<Permutation> out;
    do {
        out.emplace_back(im);
    } while (std::next_permutation(im.begin(), im.end()));
    return out;
}

BigInt factorial(int q) {
    if (q < 0) throw ArgumentError("factorial of negative number");
    BigInt r = 1;
    for (int i = 2; i <= q; ++i) r *= i;
    return r;
}

namespace {

// Conjugate partition lengths: column heights of the Young diagram.
std::vector<int> column_heights(const std::vector<int>& parts) {
    std::vector<int> cols(parts.empty() ? 0 : static_cast<std::size_t>(parts.front()), 0);
    for (int p : parts)
        for (int j = 0; j < p; ++j) ++cols[static_cast<std::size_t>(j)];
    return cols;
}

std::int64_t murnaghan_nakayama(const std::vector<int>& lambda, const std::vector<int>& mu, std::size_t next);

struct CharacterCache {
    std::mutex mutex;
    std::map<std::pair<std::vector<int>, std::vector<int>>, std::int64_t> values;
};

CharacterCache& character_cache() {
    static CharacterCache cache;
    return cache;
}

// Border strips of length r correspond to sliding one bead of the beta-set down by r.
std::int64_t murnaghan_nakayama(const std::vector<int>& lambda, const std::vector<int>& mu, std::size_t next) {
    if (next == mu.size()) return lambda.empty() ? 1 : 0;

    std::vector<int> rest(mu.begin() + static_cast<std::ptrdiff_t>(next), mu.end());
    auto& cache = character_cache();
    {
        std::lock_guard lock(cache.mutex);
        auto it = cache.values.find({lambda, rest});
        if (it != cache.values.end()) return it->second;
    }

    const int r = mu[next];
    const int len = static_cast<int>(lambda.size());
    std::vector<int> beta(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) beta[static_cast<std::size_t>(i)] = lambda[static_cast<std::size_t>(i)] + (len - 1 - i);

    std::int64_t total = 0;
    for (int i = 0; i < len; ++i) {
        const int target = beta[static_cast<std::size_t>(i)] - r;
        if (target < 0) continue;
        if (std::find(beta.begin(), beta.end(), target) != beta.end()) continue;
        int between = 0;
        for (int b : beta)
            if (b > target && b < beta[static_cast<std::size_t>(i)]) ++between;
        std::vector<int> moved = beta;
        moved[static_cast<std::size_t>(i)] = target;
        std::sort(moved.begin(), moved.end(), std::greater<>());
        std::vector<int> shape;
        for (int k = 0; k < len; ++k) {
            int part = moved[static_cast<std::size_t>(k)] - (len - 1 - k);
            if (part > 0) shape.push_back(part);
        }
        const std::int64_t sub = murnaghan_nakayama(shape, mu, next + 1);
        total += (between % 2 == 0) ? sub : -sub;
    }

    std::lock_guard lock(cache.mutex);
    cache.values.emplace(std::make_pair(lambda, std::move(rest)), total);
    return total;
}

void require_same_weight(const Partition& a, const Partition& b) {
    if (a.weight() != b.weight())
        throw ArgumentError("partitions " + a.to_string() + " and " + b.to_string() + " have different weights");
}

BigRational weingarten_sum(long d, const Partition& mu, bool restrict_rows) {
    const int q = mu.weight();
    BigRational sum = 0;
    for (const auto& lambda : partitions_of(q)) {
        if (restrict_rows && lambda.length() > d) continue;
        const std::int64_t chi = character(lambda, mu);
        if (chi == 0) continue;
        BigRational term(hook_dimension(lambda) * BigInt(static_cast<long>(chi)), content_polynomial(lambda, d));
        term.canonicalize();
        sum += term;
    }
    sum /= BigRational(factorial(q));
    sum.canonicalize();
    return sum;
}

}  // namespace

BigInt hook_dimension(const Partition& lambda) {
    const auto cols = column_heights(lambda.parts());
    BigInt hooks = 1;
    for (int i = 0; i < lambda.length(); ++i) {
        for (int j = 0; j < lambda[static_cast<std::size_t>(i)]; ++j) {
            const int arm = lambda[static_cast<std::size_t>(i)] - j - 1;
            const int leg = cols[static_cast<std::size_t>(j)] - i - 1;
            hooks *= arm + leg + 1;
        }
    }
    return factorial(lambda.weight()) / hooks;
}

std::int64_t character(const Partition& lambda, const Partition& mu) {
    require_same_weight(lambda, mu);
    return murnaghan_nakayama(lambda.parts(), mu.parts(), 0);
}

BigInt content_polynomial(const Partition& lambda, long d) {
    BigInt prod = 1;
    for (int i = 0; i < lambda.length(); ++i)
        for (int j = 0; j < lambda[static_cast<std::size_t>(i)]; ++j) prod *= d + j - i;
    return prod;
}

BigRational weingarten(long d, const Partition& mu) {
    if (d < 1) throw ArgumentError("weingarten: dimension must be positive");
    if (d < mu.weight())
        throw SingularDimensionError("weingarten: d = " + std::to_string(d) + " < q = " + std::to_string(mu.weight()) +
                                     " makes a content factor vanish");
    return weingarten_sum(d, mu, false);
}

BigRational weingarten_general(long d, const Partition& mu) {
    if (d < 1) throw ArgumentError("weingarten_general: dimension must be positive");
    return weingarten_sum(d, mu, true);
}

WeingartenTable weingarten_table(long d, int q, bool general) {
    WeingartenTable table{q, d, {}};
    for (const auto& mu : partitions_of(q))
        table.values.emplace(mu, general ? weingarten_general(d, mu) : weingarten(d, mu));
    return table;
}

RationalMatrix weingarten_matrix(long d, int q, bool general) {
    const auto table = weingarten_table(d, q, general);
    const auto perms = all_permutations(q);
    RationalMatrix m(perms.size());
    for (std::size_t i = 0; i < perms.size(); ++i) {
        for (std::size_t j = i; j < perms.size(); ++j) {
            m(i, j) = table.at((perms[i] * perms[j].inverse()).cycle_type());
            m(j, i) = m(i, j);
        }
    }
    return m;
}

}  // namespace entdyn
