#include "cokflag/partition.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace cokflag {

namespace {
void normalize(std::vector<std::uint32_t>& v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    while (!v.empty() && v.back() == 0) v.pop_back();
}
}  // namespace

Partition::Partition(std::initializer_list<std::uint32_t> parts) : parts_(parts) {
    normalize(parts_);
}

Partition::Partition(std::vector<std::uint32_t> parts) : parts_(std::move(parts)) {
    normalize(parts_);
}

std::uint64_t Partition::size() const {
    return std::accumulate(parts_.begin(), parts_.end(), std::uint64_t{0});
}

std::uint32_t Partition::multiplicity(std::uint32_t i) const {
    return std::uint32_t(std::count(parts_.begin(), parts_.end(), i));
}

std::string Partition::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i) os << ',';
        os << parts_[i];
    }
    os << ']';
    return os.str();
}

Partition conjugate(const Partition& lambda) {
    std::vector<std::uint32_t> out;
    if (lambda.empty()) return Partition{};
    out.resize(lambda.parts()[0], 0);
    for (std::uint32_t part : lambda.parts())
        for (std::uint32_t i = 0; i < part; ++i) out[i]++;
    return Partition(std::move(out));
}

bool dominates(const Partition& mu, const Partition& lambda) {
    if (mu.size() != lambda.size()) return false;
    std::uint64_t smu = 0, sla = 0;
    std::size_t n = std::max(mu.length(), lambda.length());
    for (std::size_t i = 0; i < n; ++i) {
        smu += mu.part(i);
        sla += lambda.part(i);
        if (smu < sla) return false;
    }
    return true;
}

namespace {
void gen_partitions(std::uint64_t n, std::uint32_t max_part, std::size_t max_len,
                    std::vector<std::uint32_t>& cur, std::vector<Partition>& out) {
    if (n == 0) {
        out.emplace_back(cur);
        return;
    }
    if (cur.size() >= max_len) return;
    for (std::uint32_t k = std::uint32_t(std::min<std::uint64_t>(n, max_part)); k >= 1; --k) {
        cur.push_back(k);
        gen_partitions(n - k, k, max_len, cur, out);
        cur.pop_back();
    }
}
}  // namespace

std::vector<Partition> partitions_of(std::uint64_t n, std::size_t max_len) {
    std::vector<Partition> out;
    std::vector<std::uint32_t> cur;
    gen_partitions(n, n ? std::uint32_t(n) : 1, max_len, cur, out);
    return out;
}

std::vector<Partition> partitions_of(std::uint64_t n) {
    return partitions_of(n, n + 1);
}

Rat q_pochhammer(std::uint64_t p, std::int64_t m) {
    if (m < 0) throw std::invalid_argument("q_pochhammer: m < 0");
    Rat prod = 1;
    Int pk = 1;
    for (std::int64_t i = 1; i <= m; ++i) {
        pk *= Int(static_cast<unsigned long>(p));
        prod *= Rat(pk - 1, pk);
    }
    prod.canonicalize();
    return prod;
}

Rat gaussian_binomial(std::uint64_t p, std::int64_t k, std::int64_t l) {
    if (l < 0 || l > k) return 0;
    Rat r = q_pochhammer(p, k) / (q_pochhammer(p, l) * q_pochhammer(p, k - l));
    r.canonicalize();
    return r;
}

TruncatedProduct cohen_lenstra_constant(std::uint64_t p, const Rat& precision) {
    if (precision <= 0) throw std::invalid_argument("cohen_lenstra_constant: precision <= 0");
    // The omitted tail multiplies the truncation by a factor in
    // [1 - 2 p^-I, 1], so the absolute error is at most 2 p^-I.
    unsigned long depth = 1;
    Rat tail(2, static_cast<unsigned long>(p));
    while (tail >= precision) {
        tail /= static_cast<unsigned long>(p);
        ++depth;
        if (depth > 100000) throw std::runtime_error("cohen_lenstra_constant: depth overflow");
    }
    TruncatedProduct out;
    out.value = q_pochhammer(p, std::int64_t(depth));
    out.error = tail;
    out.error.canonicalize();
    return out;
}

Int group_order(const Partition& lambda, std::uint64_t p) {
    return int_pow(p, static_cast<unsigned long>(lambda.size()));
}

Int aut_order(const Partition& lambda, std::uint64_t p) {
    Partition conj = conjugate(lambda);
    std::uint64_t sq = 0;
    for (std::uint32_t c : conj.parts()) sq += std::uint64_t(c) * c;
    // p^{sum lambda'_i^2} * prod_i prod_{j=1}^{m_i} (1 - p^-j), as an integer:
    // pull p^{-j} factors out of the power.
    std::uint64_t pulled = 0;
    Int units = 1;
    std::uint32_t max_part = lambda.empty() ? 0 : lambda.parts()[0];
    for (std::uint32_t i = 1; i <= max_part; ++i) {
        std::uint32_t m = lambda.multiplicity(i);
        for (std::uint32_t j = 1; j <= m; ++j) {
            pulled += j;
            units *= int_pow(p, j) - 1;
        }
    }
    return int_pow(p, static_cast<unsigned long>(sq - pulled)) * units;
}

Int alt2_order(const Partition& lambda, std::uint64_t p) {
    Partition conj = conjugate(lambda);
    std::uint64_t e = 0;
    for (std::uint32_t c : conj.parts()) e += std::uint64_t(c) * (c - 1) / 2;
    return int_pow(p, static_cast<unsigned long>(e));
}

GroupType::GroupType(std::map<std::uint64_t, Partition> per_prime) : per_prime_(std::move(per_prime)) {
    for (auto it = per_prime_.begin(); it != per_prime_.end();)
        it = it->second.empty() ? per_prime_.erase(it) : std::next(it);
}

Partition GroupType::at(std::uint64_t p) const {
    auto it = per_prime_.find(p);
    return it == per_prime_.end() ? Partition{} : it->second;
}

Int GroupType::order() const {
    Int o = 1;
    for (const auto& [p, lambda] : per_prime_) o *= group_order(lambda, p);
    return o;
}

std::string GroupType::to_string() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [p, lambda] : per_prime_) {
        if (!first) os << ',';
        first = false;
        os << '"' << p << "\":" << lambda.to_string();
    }
    os << '}';
    return os.str();
}

}  // namespace cokflag
