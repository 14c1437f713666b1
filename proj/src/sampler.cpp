#include "cokflag/sampler.hpp"

#include <cmath>
#include <thread>

namespace cokflag {

std::uint32_t max_feasible_N(std::uint64_t p) {
    std::uint32_t n = 0;
    std::uint64_t m = 1;
    while (m <= (std::uint64_t(1) << 62) / p) {
        m *= p;
        ++n;
    }
    return n;
}

MatrixMod sample_matrix(const EntryDistribution& dist, std::size_t n, const RingSpec& ring,
                        Rng& rng) {
    MatrixMod m(ring, n, n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t* row = m.row(i);
        for (std::size_t j = 0; j < n; ++j) row[j] = ring.reduce_int(dist.sample(ring.p, rng));
    }
    return m;
}

BitMatrix sample_bitmatrix(const EntryDistribution& dist, std::size_t n, Rng& rng) {
    BitMatrix m(n, n);
    Rat q = dist.odd_mass();
    if (q == Rat(1, 2)) {
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t* row = m.row(i);
            for (std::size_t w = 0; w < m.words_per_row(); ++w) row[w] = rng.next();
        }
        m.mask_tail();
        return m;
    }
    std::uint64_t den = q.get_den().get_ui();
    std::uint64_t num = q.get_num().get_ui();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (rng.bounded(den) < num) m.set(i, j, true);
    return m;
}

namespace {

struct PipelineResult {
    bool saturated = false;
    std::vector<Partition> types, factor_types;
    SnfResult full_snf;
    std::vector<MatrixMod> partials;
    MatrixMod factor0;  // unused; partials hold products only
};

// One pass at a fixed precision; reports saturation instead of escalating.
bool run_pipeline(const EntryDistribution& dist, std::size_t n, std::uint32_t k,
                  const RingSpec& ring, std::uint64_t master_seed, std::uint64_t stream,
                  bool want_factors, bool need_transforms, PipelineResult& out) {
    Rng rng(master_seed, stream);
    std::vector<MatrixMod> ms;
    ms.reserve(k);
    for (std::uint32_t i = 0; i < k; ++i) ms.push_back(sample_matrix(dist, n, ring, rng));
    out.partials = product_chain(ms);
    out.types.clear();
    out.factor_types.clear();
    for (std::uint32_t i = 0; i + 1 < k; ++i) {
        CokernelType ct = cokernel_type(out.partials[i]);
        if (ct.saturated) return false;
        out.types.push_back(std::move(ct.type));
    }
    // Full product: keep transforms when the chain is needed.
    if (need_transforms && k >= 2) {
        out.full_snf = snf(out.partials[k - 1]);
        Partition full_type;
        std::vector<std::uint32_t> parts;
        for (std::uint32_t v : out.full_snf.valuations) {
            if (v >= ring.N) return false;
            if (v > 0) parts.push_back(v);
        }
        out.types.push_back(Partition(std::move(parts)));
    } else {
        CokernelType ct = cokernel_type(out.partials[k - 1]);
        if (ct.saturated) return false;
        out.types.push_back(std::move(ct.type));
    }
    if (want_factors) {
        for (std::uint32_t i = 0; i < k; ++i) {
            if (i == 0) {
                out.factor_types.push_back(out.types[0]);
                continue;
            }
            CokernelType ct = cokernel_type(ms[i]);
            if (ct.saturated) return false;
            out.factor_types.push_back(std::move(ct.type));
        }
    }
    return true;
}

}  // namespace

SampleRecord sample_flag(const EntryDistribution& dist, std::size_t n, std::uint32_t k,
                         std::uint64_t p, const PrecisionPolicy& policy,
                         std::uint64_t master_seed, std::uint64_t stream,
                         const SampleOptions& opts, const EnumerationBounds& b) {
    if (k < 1) throw std::invalid_argument("sample_flag: k >= 1");
    SampleRecord rec;
    rec.stream = stream;
    const std::uint32_t cap = std::min(policy.max_N, max_feasible_N(p));
    std::vector<std::uint32_t> ladder;
    for (std::uint32_t N = std::min(policy.start_N, cap);; N *= 2) {
        ladder.push_back(std::min(N, cap));
        if (N >= cap || ladder.back() == cap) break;
    }
    const bool need_chain =
        k >= 2 && (opts.want_flag || opts.want_chain || (k == 2 && opts.want_kernel));
    PipelineResult pipe;
    bool ok = false;
    for (std::uint32_t N : ladder) {
        RingSpec ring = RingSpec::make(p, N);
        rec.used_N = N;
        if (run_pipeline(dist, n, k, ring, master_seed, stream, opts.want_factors, need_chain,
                         pipe)) {
            ok = true;
            break;
        }
    }
    if (!ok) {
        rec.saturated = true;
        return rec;
    }
    rec.types = pipe.types;
    rec.factor_types = pipe.factor_types;
    if (!need_chain) return rec;

    // Kernel chain in explicit coordinates: U maps Z^n columns to the
    // cokernel coordinates; H_i is spanned by the U-images of the columns of
    // M_1...M_{k-i}.
    const Partition& nu = rec.types[k - 1];
    const std::size_t ell = nu.length();
    const auto& vals = pipe.full_snf.valuations;  // ascending, positives last
    const MatrixMod& U = pipe.full_snf.U;
    const RingSpec& ring = U.ring();
    try {
        const ExplicitGroup& gnu = GroupCache::instance().group(p, nu);
        std::vector<Subgroup> chain;
        for (std::uint32_t i = 1; i + 1 <= k; ++i) {
            const MatrixMod& B = pipe.partials[k - 1 - i];
            std::vector<Element> gens(n, Element(ell, 0));
            for (std::size_t ci = 0; ci < ell; ++ci) {
                const std::size_t r = n - 1 - ci;  // coordinate ci <-> SNF row r
                const std::uint64_t mod = gnu.moduli()[ci];
                const std::uint64_t* urow = U.row(r);
                for (std::size_t col = 0; col < n; ++col) {
                    std::uint64_t acc = 0;
                    for (std::size_t t = 0; t < n; ++t)
                        acc = ring.add(acc, ring.mul(urow[t], B.at(t, col)));
                    gens[col][ci] = acc % mod;
                }
            }
            chain.push_back(span(gnu, gens));
        }
        (void)vals;
        if (k == 2) rec.kernel_type = subgroup_type(gnu, chain[0]);
        if (opts.want_flag) {
            try {
                rec.flag = canonicalize_flag(gnu, chain, b);
            } catch (const BoundExceeded&) {
                rec.marginal_only = true;
            }
        }
        if (opts.want_chain) rec.chain = std::move(chain);
    } catch (const BoundExceeded&) {
        rec.marginal_only = true;
    }
    return rec;
}

MomentEstimate estimate_moment(const EntryDistribution& dist, std::size_t n, std::uint32_t k,
                               std::uint64_t p, const Partition& target_nu,
                               const std::vector<Subgroup>& target_chain, std::uint64_t samples,
                               std::uint64_t master_seed, const PrecisionPolicy& policy,
                               const EnumerationBounds& b, unsigned threads) {
    if (target_chain.size() + 1 != k)
        throw std::invalid_argument("estimate_moment: target chain length must be k-1");
    const ExplicitGroup& tgt = GroupCache::instance().group(p, target_nu);
    struct Acc {
        Int sum = 0, sum_sq = 0;
        std::uint64_t valid = 0, excluded = 0;
    };
    std::vector<Acc> accs(threads);
    SampleOptions opts;
    opts.want_chain = true;
    opts.want_factors = false;
    parallel_for(samples, threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
        for (std::uint64_t s = lo; s < hi; ++s) {
            SampleRecord rec = sample_flag(dist, n, k, p, policy, master_seed, s, opts, b);
            if (rec.saturated || rec.marginal_only) {
                accs[w].excluded++;
                continue;
            }
            try {
                const ExplicitGroup& src = GroupCache::instance().group(p, rec.types[k - 1]);
                Int c = count_surjections_with_flag(src, rec.chain, tgt, target_chain, b);
                accs[w].sum += c;
                accs[w].sum_sq += c * c;
                accs[w].valid++;
            } catch (const BoundExceeded&) {
                accs[w].excluded++;
            }
        }
    });
    Acc total;
    for (const Acc& a : accs) {
        total.sum += a.sum;
        total.sum_sq += a.sum_sq;
        total.valid += a.valid;
        total.excluded += a.excluded;
    }
    MomentEstimate out;
    out.samples = total.valid;
    out.excluded = total.excluded;
    if (total.valid > 0) {
        Rat mean = Rat(total.sum) / Rat(Int(static_cast<unsigned long>(total.valid)));
        out.mean = to_double(mean);
        if (total.valid > 1) {
            Rat ex2 = Rat(total.sum_sq) / Rat(Int(static_cast<unsigned long>(total.valid)));
            Rat var = (ex2 - mean * mean) *
                      Rat(Int(static_cast<unsigned long>(total.valid)),
                          Int(static_cast<unsigned long>(total.valid - 1)));
            if (var < 0) var = 0;
            out.stderr_ = std::sqrt(to_double(var) / double(total.valid));
        }
    }
    return out;
}

void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& fn) {
    if (threads <= 1 || count == 0) {
        fn(0, count, 0);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        std::uint64_t lo = count * w / threads;
        std::uint64_t hi = count * (w + 1) / threads;
        pool.emplace_back([&fn, lo, hi, w] { fn(lo, hi, w); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace cokflag
