#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "cokflag/rational.hpp"

namespace cokflag {

/// Count accumulator over canonical string keys. total = sum(counts) +
/// excluded; merge is associative and commutative so reductions are
/// schedule-independent.
struct Histogram {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;
    std::uint64_t excluded = 0;

    void add(const std::string& key) {
        counts[key]++;
        total++;
    }
    void add_excluded() {
        excluded++;
        total++;
    }
    std::uint64_t observed() const { return total - excluded; }
};

Histogram merge(const Histogram& a, const Histogram& b);

/// (1/2) sum_key |emp - theory| + (1/2)|emp_other - other_mass|, where keys
/// not in the theoretical table are pooled into "other". Frequencies are
/// relative to the non-excluded observations.
double tv_distance(const Histogram& emp, const std::map<std::string, Rat>& theory,
                   const Rat& other_mass);

/// TV between two empirical histograms over the union of their keys.
double tv_empirical(const Histogram& a, const Histogram& b);

struct ChiSquareReport {
    double statistic = 0;
    std::uint64_t dof = 0;
    double p_value = 1;
    bool degenerate = false;  // everything pooled into a single cell
    std::uint64_t pooled_cells = 0;
};

/// Pearson statistic against theoretical masses; cells with expected count
/// below min_expected are pooled into "other".
ChiSquareReport chi_square_report(const Histogram& emp, const std::map<std::string, Rat>& theory,
                                  double min_expected = 5.0);

struct WilsonInterval {
    double lo = 0, hi = 1;
};
/// Wilson score interval for a binomial frequency (z = 2.5758... at 99%).
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = 2.5758293035489004);

/// Regularized upper incomplete gamma Q(a, x); chi-square tail probability is
/// Q(dof/2, stat/2).
double gamma_q(double a, double x);

/// Groups records by a condition key.
template <class Record, class CondFn, class ValFn>
std::map<std::string, Histogram> conditional_histogram(std::span<const Record> records,
                                                       CondFn cond, ValFn val) {
    std::map<std::string, Histogram> out;
    for (const Record& r : records) out[cond(r)].add(val(r));
    return out;
}

}  // namespace cokflag
