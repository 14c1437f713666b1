#include "cokflag/experiments.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "cokflag/hall_littlewood.hpp"
#include "cokflag/theory.hpp"

namespace cokflag {

using nlohmann::json;

namespace {

std::string fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

json partition_json(const Partition& la) {
    json a = json::array();
    for (std::uint32_t x : la.parts()) a.push_back(x);
    return a;
}

const char* version_string() {
#ifdef COKFLAG_VERSION
    return COKFLAG_VERSION;
#else
    return "dev";
#endif
}

void validate_common(const ExperimentConfig& cfg, const EntryDistribution& dist) {
    if (cfg.primes.empty()) throw ConfigError("at least one prime required");
    if (cfg.k < 1) throw ConfigError("k >= 1 required");
    for (std::uint64_t p : cfg.primes) {
        if (p < 2) throw ConfigError("primes must be >= 2");
        Alpha a = alpha_of(dist, p);
        if (a.degenerate)
            throw DegenerateDistribution("entry distribution is degenerate mod " +
                                         std::to_string(p));
    }
}

json alpha_json(const ExperimentConfig& cfg, const EntryDistribution& dist) {
    json out = json::object();
    for (std::uint64_t p : cfg.primes)
        out[std::to_string(p)] = rat_string(alpha_of(dist, p).alpha);
    return out;
}

json histogram_json(const Histogram& h) {
    json counts = json::object();
    for (const auto& [k, c] : h.counts) counts[k] = c;
    return json{{"counts", counts}, {"total", h.total}, {"excluded", h.excluded}};
}

struct SimOutcome {
    Histogram hist;
    std::uint64_t saturated = 0, marginal = 0;
    std::vector<std::string> lines;  // emit-samples JSON lines, stream order
};

std::string flag_key(const std::vector<std::uint64_t>& primes,
                     const std::vector<SampleRecord>& per_prime) {
    std::ostringstream os;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        if (i) os << '&';
        if (per_prime[i].flag) {
            os << per_prime[i].flag->to_string();
        } else {
            FlagClass cls{primes[i], per_prime[i].types.back(), ""};
            os << cls.to_string();
        }
    }
    return os.str();
}

}  // namespace

std::string type_key(const std::vector<std::uint64_t>& primes,
                     const std::vector<Partition>& per_prime) {
    std::map<std::uint64_t, Partition> comps;
    for (std::size_t i = 0; i < primes.size(); ++i) comps[primes[i]] = per_prime[i];
    return GroupType(std::move(comps)).to_string();
}

json ExperimentConfig::to_json() const {
    json cells = json::array();
    for (auto [a, b] : corank_cells) cells.push_back(json::array({a, b}));
    return json{{"command", command},
                {"mode", mode},
                {"primes", primes},
                {"n", n},
                {"k", k},
                {"samples", samples},
                {"dist", dist},
                {"dist2", dist2},
                {"seed", seed},
                {"start_N", policy.start_N},
                {"max_N", policy.max_N},
                {"max_group_order", bounds.max_group_order},
                {"max_aut", bounds.max_aut},
                {"max_hom_candidates", bounds.max_hom_candidates},
                {"max_top_order", max_top_order},
                {"tv_threshold", tv_threshold},
                {"abs_threshold", abs_threshold},
                {"min_mass", rat_string(min_mass)},
                {"precision", rat_string(precision)},
                {"cond_H", partition_json(cond_H)},
                {"cond_K", partition_json(cond_K)},
                {"corank_cells", cells},
                {"emit_samples", emit_samples}};
}

std::string ExperimentConfig::hash() const { return fnv1a(to_json().dump()); }

std::string report_without_timing(const json& report) {
    json copy = report;
    copy.erase("timing");
    return copy.dump(2);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

namespace {

SimOutcome simulate_flags(const ExperimentConfig& cfg, const EntryDistribution& dist) {
    SampleOptions opts;
    opts.want_flag = cfg.k >= 2;
    opts.want_kernel = cfg.k == 2 && cfg.emit_samples;
    opts.want_factors = cfg.emit_samples;
    const unsigned T = std::max(1u, cfg.threads);
    std::vector<SimOutcome> parts(T);
    parallel_for(cfg.samples, T, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
        for (std::uint64_t s = lo; s < hi; ++s) {
            std::vector<SampleRecord> recs;
            recs.reserve(cfg.primes.size());
            bool saturated = false, marginal = false;
            for (std::uint64_t p : cfg.primes) {
                recs.push_back(
                    sample_flag(dist, cfg.n, cfg.k, p, cfg.policy, cfg.seed, s, opts, cfg.bounds));
                saturated |= recs.back().saturated;
                marginal |= recs.back().marginal_only;
            }
            if (saturated) {
                parts[w].hist.add_excluded();
                parts[w].saturated++;
            } else if (marginal) {
                std::vector<Partition> tops;
                for (auto& r : recs) tops.push_back(r.types.back());
                parts[w].hist.add("marginal:" + type_key(cfg.primes, tops));
                parts[w].marginal++;
            } else {
                parts[w].hist.add(flag_key(cfg.primes, recs));
            }
            if (cfg.emit_samples) {
                json line{{"stream", s}, {"saturated", saturated}};
                json types = json::object(), factors = json::object(), kernels = json::object();
                for (std::size_t i = 0; i < cfg.primes.size(); ++i) {
                    json tp = json::array();
                    for (const Partition& t : recs[i].types) tp.push_back(partition_json(t));
                    types[std::to_string(cfg.primes[i])] = tp;
                    json fp = json::array();
                    for (const Partition& t : recs[i].factor_types) fp.push_back(partition_json(t));
                    factors[std::to_string(cfg.primes[i])] = fp;
                    if (recs[i].kernel_type)
                        kernels[std::to_string(cfg.primes[i])] = partition_json(*recs[i].kernel_type);
                    line["N"] = recs[i].used_N;
                }
                line["types"] = types;
                line["factors"] = factors;
                line["kernel"] = kernels;
                if (!saturated && !marginal) line["key"] = flag_key(cfg.primes, recs);
                parts[w].lines.push_back(line.dump());
            }
        }
    });
    SimOutcome out;
    for (SimOutcome& p : parts) {
        out.hist = merge(out.hist, p.hist);
        out.saturated += p.saturated;
        out.marginal += p.marginal;
        for (auto& l : p.lines) out.lines.push_back(std::move(l));
    }
    return out;
}

json base_report(const ExperimentConfig& cfg, const EntryDistribution& dist) {
    return json{{"schema", 1},
                {"version", version_string()},
                {"command", cfg.command},
                {"mode", cfg.mode},
                {"config", cfg.to_json()},
                {"config_hash", cfg.hash()},
                {"seed", cfg.seed},
                {"alpha", alpha_json(cfg, dist)}};
}

}  // namespace

RunResult run_simulate(const ExperimentConfig& cfg) {
    EntryDistribution dist = EntryDistribution::parse(cfg.dist);
    validate_common(cfg, dist);
    auto t0 = std::chrono::steady_clock::now();
    SimOutcome sim = simulate_flags(cfg, dist);
    auto t1 = std::chrono::steady_clock::now();
    RunResult out;
    out.report = base_report(cfg, dist);
    out.report["histogram"] = histogram_json(sim.hist);
    out.report["exclusions"] = json{{"saturated", sim.saturated}, {"marginal", sim.marginal}};
    out.report["timing"] = json{{"seconds", std::chrono::duration<double>(t1 - t0).count()}};
    if (cfg.emit_samples && !cfg.samples_path.empty()) {
        std::ofstream f(cfg.samples_path);
        for (const std::string& l : sim.lines) f << l << '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// compare modes
// ---------------------------------------------------------------------------

namespace {

void require_single_prime(const ExperimentConfig& cfg) {
    if (cfg.primes.size() != 1)
        throw ConfigError("mode '" + cfg.mode + "' requires a single prime");
}

struct CondOutcome {
    std::map<std::string, Histogram> by_cond;
    std::uint64_t saturated = 0;
};

// Joint corank sampling over F_p: histogram of c conditioned on (a, b).
CondOutcome run_corank_samples(const ExperimentConfig& cfg, const EntryDistribution& dist) {
    const std::uint64_t p = cfg.primes[0];
    const unsigned T = std::max(1u, cfg.threads);
    std::vector<CondOutcome> parts(T);
    parallel_for(cfg.samples, T, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
        for (std::uint64_t s = lo; s < hi; ++s) {
            Rng rng(cfg.seed, s);
            std::size_t a, b, c;
            if (p == 2) {
                BitMatrix m1 = sample_bitmatrix(dist, cfg.n, rng);
                BitMatrix m2 = sample_bitmatrix(dist, cfg.n, rng);
                a = cfg.n - bit_rank(m1);
                b = cfg.n - bit_rank(m2);
                c = cfg.n - bit_rank(bit_mul(m1, m2));
            } else {
                RingSpec ring = RingSpec::make(p, 1);
                MatrixMod m1 = sample_matrix(dist, cfg.n, ring, rng);
                MatrixMod m2 = sample_matrix(dist, cfg.n, ring, rng);
                a = cfg.n - rank_mod_p(m1);
                b = cfg.n - rank_mod_p(m2);
                c = cfg.n - rank_mod_p(mat_mul(m1, m2));
            }
            std::string cond = "a=" + std::to_string(a) + ",b=" + std::to_string(b);
            parts[w].by_cond[cond].add("c=" + std::to_string(c));
        }
    });
    CondOutcome out;
    for (CondOutcome& q : parts)
        for (auto& [k, h] : q.by_cond) out.by_cond[k] = merge(out.by_cond[k], h);
    return out;
}

// k=2 factor-type conditioning: histogram of cok(M1 M2) type given the pair
// (cok(M1), cok(M2)) of factor types.
CondOutcome run_factor_conditioned(const ExperimentConfig& cfg, const EntryDistribution& dist) {
    const std::uint64_t p = cfg.primes[0];
    const unsigned T = std::max(1u, cfg.threads);
    SampleOptions opts;
    opts.want_factors = true;
    std::vector<CondOutcome> parts(T);
    parallel_for(cfg.samples, T, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
        for (std::uint64_t s = lo; s < hi; ++s) {
            SampleRecord rec = sample_flag(dist, cfg.n, 2, p, cfg.policy, cfg.seed, s, opts,
                                           cfg.bounds);
            if (rec.saturated) {
                parts[w].saturated++;
                continue;
            }
            std::string cond = "H=" + rec.factor_types[0].to_string() +
                               ",K=" + rec.factor_types[1].to_string();
            parts[w].by_cond[cond].add(rec.types[1].to_string());
        }
    });
    CondOutcome out;
    for (CondOutcome& q : parts) {
        out.saturated += q.saturated;
        for (auto& [k, h] : q.by_cond) out.by_cond[k] = merge(out.by_cond[k], h);
    }
    return out;
}

// k=1 cokernel types.
Histogram run_k1_types(const ExperimentConfig& cfg, const EntryDistribution& dist,
                       std::uint64_t* saturated) {
    const std::uint64_t p = cfg.primes[0];
    const unsigned T = std::max(1u, cfg.threads);
    SampleOptions opts;
    opts.want_factors = false;
    std::vector<Histogram> parts(T);
    parallel_for(cfg.samples, T, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
        for (std::uint64_t s = lo; s < hi; ++s) {
            SampleRecord rec =
                sample_flag(dist, cfg.n, 1, p, cfg.policy, cfg.seed, s, opts, cfg.bounds);
            if (rec.saturated)
                parts[w].add_excluded();
            else
                parts[w].add(rec.types[0].to_string());
        }
    });
    Histogram out;
    for (Histogram& h : parts) out = merge(out, h);
    if (saturated) *saturated = out.excluded;
    return out;
}

json check_json(const std::string& name, double observed, double expected, double tol,
                bool* pass) {
    bool ok = std::abs(observed - expected) <= tol;
    if (!ok && pass) *pass = false;
    return json{{"check", name},
                {"observed", observed},
                {"expected", expected},
                {"tolerance", tol},
                {"pass", ok}};
}

json threshold_json(const std::string& name, double value, double threshold, bool* pass) {
    bool ok = value <= threshold;
    if (!ok && pass) *pass = false;
    return json{{"check", name}, {"value", value}, {"threshold", threshold}, {"pass", ok}};
}

json compare_corank(const ExperimentConfig& cfg, const EntryDistribution& dist, bool* pass) {
    const std::uint64_t p = cfg.primes[0];
    CondOutcome data = run_corank_samples(cfg, dist);
    json modes = json::object();
    json checks = json::array();
    for (auto [a, b] : cfg.corank_cells) {
        std::string cond = "a=" + std::to_string(a) + ",b=" + std::to_string(b);
        auto it = data.by_cond.find(cond);
        std::uint64_t nobs = it == data.by_cond.end() ? 0 : it->second.observed();
        json cell{{"cond", cond}, {"observations", nobs}};
        if (nobs == 0) {
            *pass = false;
            cell["pass"] = false;
            checks.push_back(cell);
            continue;
        }
        const Histogram& h = it->second;
        std::map<std::string, Rat> theory;
        Rat covered = 0;
        for (std::uint32_t c = std::max(a, b); c <= a + b; ++c) {
            Rat mass = corank_conditional(p, a, b, c);
            theory["c=" + std::to_string(c)] = mass;
            covered += mass;
        }
        json per_c = json::array();
        for (const auto& [key, mass] : theory) {
            auto cit = h.counts.find(key);
            double freq = double(cit == h.counts.end() ? 0 : cit->second) / double(h.observed());
            per_c.push_back(json{{"c", key},
                                 {"theory_exact", rat_string(mass)},
                                 {"theory", to_double(mass)},
                                 {"empirical", freq},
                                 {"pass", std::abs(freq - to_double(mass)) <= cfg.abs_threshold}});
            if (std::abs(freq - to_double(mass)) > cfg.abs_threshold) *pass = false;
        }
        cell["cells"] = per_c;
        cell["tv"] = tv_distance(h, theory, Rat(1) - covered);
        ChiSquareReport chi = chi_square_report(h, theory);
        cell["chi_square"] =
            json{{"statistic", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value},
                 {"degenerate", chi.degenerate}};
        checks.push_back(cell);
    }
    modes["cells"] = checks;
    return modes;
}

json conditional_report(const Histogram& h, const std::map<std::string, Rat>& theory,
                        const ExperimentConfig& cfg, bool* pass) {
    json rows = json::array();
    for (const auto& [key, mass] : theory) {
        auto it = h.counts.find(key);
        double freq = double(it == h.counts.end() ? 0 : it->second) / double(h.observed());
        WilsonInterval ci = wilson_interval(it == h.counts.end() ? 0 : it->second, h.observed());
        bool ok = std::abs(freq - to_double(mass)) <= cfg.abs_threshold;
        if (!ok) *pass = false;
        rows.push_back(json{{"key", key},
                            {"theory_exact", rat_string(mass)},
                            {"theory", to_double(mass)},
                            {"empirical", freq},
                            {"ci99", json::array({ci.lo, ci.hi})},
                            {"pass", ok}});
    }
    Rat covered = 0;
    for (const auto& [k, m] : theory) covered += m;
    return json{{"observations", h.observed()},
                {"rows", rows},
                {"tv", tv_distance(h, theory, Rat(1) - covered)}};
}

json compare_conv(const ExperimentConfig& cfg, const EntryDistribution& dist, bool* pass,
                  Histogram* cond_hist_out) {
    const std::uint64_t p = cfg.primes[0];
    CondOutcome data = run_factor_conditioned(cfg, dist);
    std::string cond = "H=" + cfg.cond_H.to_string() + ",K=" + cfg.cond_K.to_string();
    auto it = data.by_cond.find(cond);
    if (it == data.by_cond.end()) {
        *pass = false;
        return json{{"cond", cond}, {"observations", 0}, {"pass", false}};
    }
    std::map<std::string, Rat> theory;
    for (const Partition& G : partitions_of(cfg.cond_H.size() + cfg.cond_K.size())) {
        Rat v = conditional_convolution(p, G, cfg.cond_H, cfg.cond_K, cfg.bounds);
        if (v != 0) theory[G.to_string()] = v;
    }
    if (cond_hist_out) *cond_hist_out = it->second;
    json out = conditional_report(it->second, theory, cfg, pass);
    out["cond"] = cond;
    out["saturated"] = data.saturated;
    return out;
}

json compare_vp(const ExperimentConfig& cfg, const EntryDistribution& dist, bool* pass) {
    const std::uint64_t p = cfg.primes[0];
    CondOutcome data = run_factor_conditioned(cfg, dist);
    std::string cond = "H=" + cfg.cond_H.to_string() + ",K=" + cfg.cond_K.to_string();
    auto it = data.by_cond.find(cond);
    if (it == data.by_cond.end()) {
        *pass = false;
        return json{{"cond", cond}, {"observations", 0}, {"pass", false}};
    }
    std::map<std::string, Rat> theory;
    for (const auto& [nu, v] : normalized_constants(cfg.cond_H, cfg.cond_K, p, cfg.n))
        theory[nu.to_string()] = v;
    json out = conditional_report(it->second, theory, cfg, pass);
    out["cond"] = cond;
    out["saturated"] = data.saturated;
    out["law"] = "finite-n normalized HL structure constants";
    return out;
}

json compare_cl(const ExperimentConfig& cfg, const EntryDistribution& dist, bool* pass,
                Histogram* hist_out) {
    const std::uint64_t p = cfg.primes[0];
    std::uint64_t saturated = 0;
    Histogram h = run_k1_types(cfg, dist, &saturated);
    TheoryTable table = cl_table_k1(p, cfg.min_mass, cfg.precision);
    std::map<std::string, Rat> theory;
    Rat covered = 0;
    for (const auto& [la, mass] : table.mass) {
        theory[la.to_string()] = mass;
        covered += mass;
    }
    if (hist_out) *hist_out = h;
    bool dummy = true;
    json out = conditional_report(h, theory, cfg, &dummy);  // per-cell CIs, not gating
    double tv = tv_distance(h, theory, Rat(1) - covered);
    json checks = json::array();
    checks.push_back(threshold_json("tv_types", tv, cfg.tv_threshold, pass));
    auto trivial = h.counts.find(Partition{}.to_string());
    double p_trivial =
        double(trivial == h.counts.end() ? 0 : trivial->second) / double(h.observed());
    checks.push_back(check_json("P(cok trivial)", p_trivial,
                                to_double(table.mass.at(Partition{})), cfg.abs_threshold, pass));
    ChiSquareReport chi = chi_square_report(h, theory);
    out["chi_square"] = json{{"statistic", chi.statistic},
                             {"dof", chi.dof},
                             {"p_value", chi.p_value},
                             {"degenerate", chi.degenerate}};
    out["checks"] = checks;
    out["saturated"] = saturated;
    out["constant_error"] = rat_string(table.constant_error);
    return out;
}

json compare_flag(const ExperimentConfig& cfg, const EntryDistribution& dist, bool* pass) {
    const std::uint64_t p = cfg.primes[0];
    if (cfg.k != 2) throw ConfigError("flag compare mode requires k = 2");
    SimOutcome sim = simulate_flags(cfg, dist);
    std::vector<FlagClassRow> rows =
        flag_class_table_k2(p, cfg.max_top_order, cfg.precision, cfg.bounds);
    std::map<std::string, Rat> theory;
    Rat covered = 0;
    for (const FlagClassRow& r : rows) {
        theory[r.cls.to_string()] = r.mass;
        covered += r.mass;
    }
    double tv = tv_distance(sim.hist, theory, Rat(1) - covered);
    json checks = json::array();
    checks.push_back(threshold_json("tv_flag_classes", tv, cfg.tv_threshold, pass));
    // The class separating the flag law from the marginal: (Z/2)^2 ->> Z/2.
    for (const FlagClassRow& r : rows) {
        if (r.nu == Partition{1, 1} && r.kernel_type == Partition{1}) {
            auto it = sim.hist.counts.find(r.cls.to_string());
            double freq =
                double(it == sim.hist.counts.end() ? 0 : it->second) / double(sim.hist.observed());
            checks.push_back(
                check_json("P(flag [1,1]->>[1])", freq, to_double(r.mass), cfg.abs_threshold, pass));
        }
    }
    json table = json::array();
    for (const FlagClassRow& r : rows) {
        auto it = sim.hist.counts.find(r.cls.to_string());
        double freq =
            double(it == sim.hist.counts.end() ? 0 : it->second) / double(sim.hist.observed());
        table.push_back(json{{"class", r.cls.to_string()},
                             {"kernel_type", r.kernel_type.to_string()},
                             {"quotient_type", r.quotient_type.to_string()},
                             {"stabilizer", r.stabilizer.get_str()},
                             {"mass_exact",
                              rat_string(Rat(1) / Rat(r.stabilizer)) + " * C^2"},
                             {"mass", to_double(r.mass)},
                             {"empirical", freq}});
    }
    return json{{"tv", tv},
                {"checks", checks},
                {"classes", table},
                {"histogram", histogram_json(sim.hist)},
                {"exclusions", json{{"saturated", sim.saturated}, {"marginal", sim.marginal}}}};
}

json compare_moment(const ExperimentConfig& cfg, const EntryDistribution& dist, bool* pass) {
    const std::uint64_t p = cfg.primes[0];
    if (cfg.k != 2) throw ConfigError("moment compare mode requires k = 2");
    std::vector<FlagClassRow> rows =
        flag_class_table_k2(p, cfg.max_top_order, cfg.precision, cfg.bounds);
    struct Acc {
        std::vector<Int> sum, sum_sq;
        std::uint64_t valid = 0, excluded = 0;
    };
    const unsigned T = std::max(1u, cfg.threads);
    std::vector<Acc> accs(T);
    for (Acc& a : accs) {
        a.sum.assign(rows.size(), 0);
        a.sum_sq.assign(rows.size(), 0);
    }
    SampleOptions opts;
    opts.want_chain = true;
    opts.want_factors = false;
    auto& cache = GroupCache::instance();
    parallel_for(cfg.samples, T, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
        for (std::uint64_t s = lo; s < hi; ++s) {
            SampleRecord rec =
                sample_flag(dist, cfg.n, 2, p, cfg.policy, cfg.seed, s, opts, cfg.bounds);
            if (rec.saturated || rec.marginal_only) {
                accs[w].excluded++;
                continue;
            }
            bool counted = true;
            std::vector<Int> counts(rows.size());
            try {
                const ExplicitGroup& src = cache.group(p, rec.types[1]);
                for (std::size_t t = 0; t < rows.size(); ++t) {
                    const ExplicitGroup& tgt = cache.group(p, rows[t].nu);
                    std::vector<Subgroup> tchain{rows[t].kernel_rep};
                    counts[t] = count_surjections_with_flag(src, rec.chain, tgt, tchain,
                                                            cfg.bounds);
                }
            } catch (const BoundExceeded&) {
                counted = false;
            }
            if (!counted) {
                accs[w].excluded++;
                continue;
            }
            for (std::size_t t = 0; t < rows.size(); ++t) {
                accs[w].sum[t] += counts[t];
                accs[w].sum_sq[t] += counts[t] * counts[t];
            }
            accs[w].valid++;
        }
    });
    Acc total;
    total.sum.assign(rows.size(), 0);
    total.sum_sq.assign(rows.size(), 0);
    for (const Acc& a : accs) {
        total.valid += a.valid;
        total.excluded += a.excluded;
        for (std::size_t t = 0; t < rows.size(); ++t) {
            total.sum[t] += a.sum[t];
            total.sum_sq[t] += a.sum_sq[t];
        }
    }
    json targets = json::array();
    for (std::size_t t = 0; t < rows.size(); ++t) {
        double mean = 0, se = 0;
        if (total.valid) {
            Rat m = Rat(total.sum[t]) / Rat(Int(static_cast<unsigned long>(total.valid)));
            mean = to_double(m);
            Rat ex2 = Rat(total.sum_sq[t]) / Rat(Int(static_cast<unsigned long>(total.valid)));
            double var = to_double(ex2) - mean * mean;
            if (var < 0) var = 0;
            se = std::sqrt(var / double(total.valid));
        }
        bool ok = std::abs(mean - 1.0) <= cfg.abs_threshold;
        if (!ok) *pass = false;
        targets.push_back(json{{"target", rows[t].cls.to_string()},
                               {"kernel_type", rows[t].kernel_type.to_string()},
                               {"mean", mean},
                               {"stderr", se},
                               {"expected", 1.0},
                               {"pass", ok}});
    }
    double excl_rate = double(total.excluded) / double(std::max<std::uint64_t>(1, cfg.samples));
    bool excl_ok = excl_rate < 1e-3;
    if (!excl_ok) *pass = false;
    return json{{"targets", targets},
                {"valid", total.valid},
                {"excluded", total.excluded},
                {"exclusion_rate", excl_rate},
                {"exclusion_pass", excl_ok}};
}

}  // namespace

RunResult run_compare(const ExperimentConfig& cfg) {
    EntryDistribution dist = EntryDistribution::parse(cfg.dist);
    validate_common(cfg, dist);
    std::vector<EntryDistribution> dists{dist};
    if (!cfg.dist2.empty()) {
        dists.push_back(EntryDistribution::parse(cfg.dist2));
        validate_common(cfg, dists[1]);
    }
    auto t0 = std::chrono::steady_clock::now();
    RunResult out;
    out.report = base_report(cfg, dist);
    json per_dist = json::array();
    std::vector<Histogram> cross_hists;
    for (const EntryDistribution& d : dists) {
        bool pass = true;
        json body;
        if (cfg.mode == "corank") {
            require_single_prime(cfg);
            body = compare_corank(cfg, d, &pass);
        } else if (cfg.mode == "cl") {
            require_single_prime(cfg);
            Histogram h;
            body = compare_cl(cfg, d, &pass, &h);
            cross_hists.push_back(std::move(h));
        } else if (cfg.mode == "conv") {
            require_single_prime(cfg);
            Histogram h;
            body = compare_conv(cfg, d, &pass, &h);
            cross_hists.push_back(std::move(h));
        } else if (cfg.mode == "vp") {
            require_single_prime(cfg);
            body = compare_vp(cfg, d, &pass);
        } else if (cfg.mode == "flag") {
            require_single_prime(cfg);
            body = compare_flag(cfg, d, &pass);
        } else if (cfg.mode == "moment") {
            require_single_prime(cfg);
            body = compare_moment(cfg, d, &pass);
        } else {
            throw ConfigError("unknown compare mode: " + cfg.mode);
        }
        body["dist"] = d.to_string();
        body["pass"] = pass;
        if (!pass) out.pass = false;
        per_dist.push_back(std::move(body));
    }
    json verdict{{"per_dist", per_dist}};
    if (cross_hists.size() == 2) {
        double cross = tv_empirical(cross_hists[0], cross_hists[1]);
        bool ok = cross <= cfg.tv_threshold;
        if (!ok) out.pass = false;
        verdict["cross_tv"] = json{{"value", cross}, {"threshold", cfg.tv_threshold}, {"pass", ok}};
    }
    verdict["pass"] = out.pass;
    auto t1 = std::chrono::steady_clock::now();
    out.report["verdict"] = verdict;
    out.report["timing"] = json{{"seconds", std::chrono::duration<double>(t1 - t0).count()}};
    return out;
}

// ---------------------------------------------------------------------------
// theory / hl tables
// ---------------------------------------------------------------------------

std::string theory_csv(const std::string& which, const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "query,exact,decimal\n";
    const std::uint64_t p = cfg.primes.empty() ? 2 : cfg.primes[0];
    if (which == "conv") {
        for (const Partition& G : partitions_of(cfg.cond_H.size() + cfg.cond_K.size())) {
            Rat v = conditional_convolution(p, G, cfg.cond_H, cfg.cond_K, cfg.bounds);
            if (v == 0) continue;
            os << "conv[p=" << p << ";G=" << G.to_string() << ";H=" << cfg.cond_H.to_string()
               << ";K=" << cfg.cond_K.to_string() << "]," << rat_string(v) << ',' << to_double(v)
               << '\n';
        }
    } else if (which == "corank") {
        for (std::uint32_t a = 0; a <= 2; ++a)
            for (std::uint32_t b = 0; b <= 2; ++b)
                for (std::uint32_t c = std::max(a, b); c <= a + b; ++c) {
                    Rat v = corank_conditional(p, a, b, c);
                    os << "corank[p=" << p << ";a=" << a << ";b=" << b << ";c=" << c << "],"
                       << rat_string(v) << ',' << to_double(v) << '\n';
                }
    } else if (which == "flag") {
        for (const FlagClassRow& r :
             flag_class_table_k2(p, cfg.max_top_order, cfg.precision, cfg.bounds)) {
            os << "flag[p=" << p << ";class=" << r.cls.orbit << ";nu=" << r.nu.to_string()
               << ";kernel=" << r.kernel_type.to_string() << "],1/" << r.stabilizer.get_str()
               << "*C^2," << to_double(r.mass) << '\n';
        }
    } else if (which == "cl") {
        TheoryTable t = cl_table_k1(p, cfg.min_mass, cfg.precision);
        for (const auto& [la, mass] : t.mass)
            os << "cl[p=" << p << ";type=" << la.to_string() << "]," << rat_string(mass) << ','
               << to_double(mass) << '\n';
    } else if (!which.empty()) {
        throw ConfigError("unknown theory table: " + which);
    }
    return os.str();
}

std::string hl_csv(const Partition& lambda, const Partition& mu, std::uint64_t p,
                   std::size_t n_vars) {
    std::ostringstream os;
    os << "nu,c_hat_exact,c_hat_decimal\n";
    for (const auto& [nu, v] : normalized_constants(lambda, mu, p, n_vars))
        os << nu.to_string() << ',' << rat_string(v) << ',' << to_double(v) << '\n';
    return os.str();
}

}  // namespace cokflag
