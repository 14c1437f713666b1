#include "cokflag/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace cokflag {

Histogram merge(const Histogram& a, const Histogram& b) {
    Histogram out = a;
    for (const auto& [k, c] : b.counts) out.counts[k] += c;
    out.total += b.total;
    out.excluded += b.excluded;
    return out;
}

double tv_distance(const Histogram& emp, const std::map<std::string, Rat>& theory,
                   const Rat& other_mass) {
    const double n = double(emp.observed());
    if (n == 0) return 1.0;
    double sum = 0;
    std::uint64_t matched = 0;
    for (const auto& [key, mass] : theory) {
        auto it = emp.counts.find(key);
        std::uint64_t c = it == emp.counts.end() ? 0 : it->second;
        matched += c;
        sum += std::abs(double(c) / n - to_double(mass));
    }
    double emp_other = double(emp.observed() - matched) / n;
    sum += std::abs(emp_other - to_double(other_mass));
    return sum / 2.0;
}

double tv_empirical(const Histogram& a, const Histogram& b) {
    const double na = double(a.observed()), nb = double(b.observed());
    if (na == 0 || nb == 0) return 1.0;
    double sum = 0;
    for (const auto& [k, c] : a.counts) {
        auto it = b.counts.find(k);
        double fb = it == b.counts.end() ? 0.0 : double(it->second) / nb;
        sum += std::abs(double(c) / na - fb);
    }
    for (const auto& [k, c] : b.counts)
        if (!a.counts.count(k)) sum += double(c) / nb;
    return sum / 2.0;
}

namespace {

double gamma_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0) return 1;
    if (x < a + 1) return 1 - gamma_series(a, x);
    return gamma_cf(a, x);
}

ChiSquareReport chi_square_report(const Histogram& emp, const std::map<std::string, Rat>& theory,
                                  double min_expected) {
    ChiSquareReport out;
    const double n = double(emp.observed());
    double stat = 0;
    std::uint64_t cells = 0;
    double other_expected = n;
    std::uint64_t other_observed = emp.observed();
    for (const auto& [key, mass] : theory) {
        double expected = n * to_double(mass);
        if (expected < min_expected) {
            out.pooled_cells++;
            continue;
        }
        auto it = emp.counts.find(key);
        std::uint64_t c = it == emp.counts.end() ? 0 : it->second;
        stat += (double(c) - expected) * (double(c) - expected) / expected;
        cells++;
        other_expected -= expected;
        other_observed -= c;
    }
    if (other_expected > min_expected) {
        stat += (double(other_observed) - other_expected) * (double(other_observed) - other_expected) /
                other_expected;
        cells++;
    }
    if (cells < 2) {
        out.degenerate = true;
        out.dof = 0;
        out.statistic = stat;
        return out;
    }
    out.statistic = stat;
    out.dof = cells - 1;
    out.p_value = gamma_q(double(out.dof) / 2.0, stat / 2.0);
    return out;
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
    WilsonInterval w;
    if (n == 0) return w;
    double phat = double(successes) / double(n);
    double z2 = z * z;
    double denom = 1 + z2 / double(n);
    double center = (phat + z2 / (2 * double(n))) / denom;
    double half = z * std::sqrt(phat * (1 - phat) / double(n) + z2 / (4.0 * double(n) * double(n))) / denom;
    w.lo = std::max(0.0, center - half);
    w.hi = std::min(1.0, center + half);
    return w;
}

}  // namespace cokflag
