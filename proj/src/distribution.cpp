#include "cokflag/distribution.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cokflag {

EntryDistribution EntryDistribution::uniform_range(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_range: lo > hi");
    if (std::uint64_t(hi - lo) >= (std::uint64_t(1) << 62))
        throw std::invalid_argument("uniform_range: range too wide");
    EntryDistribution d;
    d.kind_ = Kind::UniformRange;
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
}

EntryDistribution EntryDistribution::finite_support(std::vector<std::int64_t> values,
                                                    std::vector<Rat> weights) {
    if (values.empty() || values.size() != weights.size())
        throw std::invalid_argument("finite_support: values/weights mismatch");
    Rat total = 0;
    for (const Rat& w : weights) {
        if (w <= 0) throw std::invalid_argument("finite_support: weights must be positive");
        total += w;
    }
    if (total != 1) throw std::invalid_argument("finite_support: weights must sum to 1");
    EntryDistribution d;
    d.kind_ = Kind::FiniteSupport;
    d.values_ = std::move(values);
    d.weights_ = std::move(weights);
    // Common denominator for exact sampling.
    Int denom = 1;
    for (const Rat& w : d.weights_) {
        Int wd = w.get_den();
        Int g;
        mpz_gcd(g.get_mpz_t(), denom.get_mpz_t(), wd.get_mpz_t());
        denom = denom / g * wd;
    }
    if (!denom.fits_ulong_p() || denom.get_ui() >= (std::uint64_t(1) << 62))
        throw std::invalid_argument("finite_support: weight denominator too large");
    d.weight_denom_ = denom.get_ui();
    std::uint64_t acc = 0;
    for (const Rat& w : d.weights_) {
        Int num = w.get_num() * (denom / w.get_den());
        acc += num.get_ui();
        d.cumulative_.push_back(acc);
    }
    if (acc != d.weight_denom_) throw std::logic_error("finite_support: cumulative mismatch");
    return d;
}

EntryDistribution EntryDistribution::haar_proxy(std::uint32_t N) {
    if (N < 1) throw std::invalid_argument("haar_proxy: N >= 1");
    EntryDistribution d;
    d.kind_ = Kind::HaarProxy;
    d.haar_N_ = N;
    return d;
}

EntryDistribution EntryDistribution::parse(const std::string& spec) {
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "uniform") {
        auto dots = rest.find("..");
        if (dots == std::string::npos) throw std::invalid_argument("uniform spec: " + spec);
        return uniform_range(std::stoll(rest.substr(0, dots)), std::stoll(rest.substr(dots + 2)));
    }
    if (head == "const") {
        return finite_support({std::stoll(rest)}, {Rat(1)});
    }
    if (head == "finite") {
        std::vector<std::int64_t> values;
        std::vector<Rat> weights;
        std::istringstream is(rest);
        std::string item;
        while (std::getline(is, item, ',')) {
            auto sep = item.find(':');
            if (sep == std::string::npos) throw std::invalid_argument("finite spec: " + spec);
            values.push_back(std::stoll(item.substr(0, sep)));
            weights.push_back(parse_rational(item.substr(sep + 1)));
        }
        return finite_support(std::move(values), std::move(weights));
    }
    if (head == "haar") {
        return haar_proxy(std::uint32_t(std::stoul(rest)));
    }
    throw std::invalid_argument("unknown distribution spec: " + spec);
}

std::string EntryDistribution::to_string() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::UniformRange:
            os << "uniform:" << lo_ << ".." << hi_;
            break;
        case Kind::FiniteSupport:
            os << "finite:";
            for (std::size_t i = 0; i < values_.size(); ++i) {
                if (i) os << ',';
                os << values_[i] << ':' << rat_string(weights_[i]);
            }
            break;
        case Kind::HaarProxy:
            os << "haar:" << haar_N_;
            break;
    }
    return os.str();
}

std::map<std::uint64_t, Rat> EntryDistribution::residue_masses(std::uint64_t p) const {
    std::map<std::uint64_t, Rat> m;
    for (std::uint64_t r = 0; r < p; ++r) m[r] = 0;
    auto residue = [&](std::int64_t v) {
        std::int64_t r = v % std::int64_t(p);
        return std::uint64_t(r < 0 ? r + std::int64_t(p) : r);
    };
    switch (kind_) {
        case Kind::UniformRange: {
            std::uint64_t total = std::uint64_t(hi_ - lo_ + 1);
            for (std::uint64_t r = 0; r < p; ++r) {
                // Count of x in [lo, hi] with x === r (mod p).
                std::int64_t first = lo_ + std::int64_t((r + p - residue(lo_)) % p);
                std::uint64_t count = first > hi_ ? 0 : std::uint64_t((hi_ - first) / std::int64_t(p)) + 1;
                m[r] = Rat(Int(static_cast<unsigned long>(count)),
                           Int(static_cast<unsigned long>(total)));
                m[r].canonicalize();
            }
            break;
        }
        case Kind::FiniteSupport:
            for (std::size_t i = 0; i < values_.size(); ++i) m[residue(values_[i])] += weights_[i];
            for (auto& [r, w] : m) w.canonicalize();
            break;
        case Kind::HaarProxy:
            for (std::uint64_t r = 0; r < p; ++r) m[r] = Rat(1, static_cast<unsigned long>(p));
            break;
    }
    return m;
}

std::int64_t EntryDistribution::sample(std::uint64_t p, Rng& rng) const {
    switch (kind_) {
        case Kind::UniformRange:
            return lo_ + std::int64_t(rng.bounded(std::uint64_t(hi_ - lo_) + 1));
        case Kind::FiniteSupport: {
            std::uint64_t u = rng.bounded(weight_denom_);
            std::size_t i =
                std::size_t(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                            cumulative_.begin());
            return values_[i];
        }
        case Kind::HaarProxy: {
            std::uint64_t mod = 1;
            for (std::uint32_t i = 0; i < haar_N_; ++i) {
                if (mod > (std::uint64_t(1) << 62) / p)
                    throw std::invalid_argument("haar_proxy: p^N exceeds the 63-bit guard");
                mod *= p;
            }
            return std::int64_t(rng.bounded(mod));
        }
    }
    return 0;
}

Alpha alpha_of(const EntryDistribution& dist, std::uint64_t p) {
    Alpha out;
    Rat max_mass = 0;
    for (const auto& [r, w] : dist.residue_masses(p))
        if (w > max_mass) max_mass = w;
    if (max_mass == 1) {
        out.degenerate = true;
        return out;
    }
    out.alpha = Rat(1) - max_mass;
    if (out.alpha > Rat(1, 2)) out.alpha = Rat(1, 2);
    out.alpha.canonicalize();
    return out;
}

}  // namespace cokflag
