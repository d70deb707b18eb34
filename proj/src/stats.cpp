#include "tscp/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tscp {

double kolmogorov_sf(double x)
{
    if (x <= 0.0) return 1.0;
    if (x < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    const double ne = na * nb / (na + nb);
    const double sq = std::sqrt(ne);
    KsResult r;
    r.statistic = d;
    r.p_value = kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d);
    return r;
}

ChiSquareResult chi_square_poisson(const std::vector<long>& counts, double mu, double min_expected)
{
    if (counts.empty() || !(mu > 0)) throw std::invalid_argument("chi-square needs data and a positive mean");
    const boost::math::poisson_distribution<double> pois(mu);
    const double n = static_cast<double>(counts.size());
    long kmax = *std::max_element(counts.begin(), counts.end());

    // Bins [lo_k, hi_k]; the last bin is open to the right.
    std::vector<double> expected, observed;
    std::vector<long> hist(kmax + 1, 0);
    for (long c : counts) ++hist[c];
    double acc_e = 0, acc_o = 0;
    for (long k = 0; k <= kmax; ++k) {
        acc_e += n * boost::math::pdf(pois, static_cast<double>(k));
        acc_o += hist[k];
        if (acc_e >= min_expected) {
            expected.push_back(acc_e);
            observed.push_back(acc_o);
            acc_e = acc_o = 0;
        }
    }
    // Remaining mass, including the unbounded tail.
    const double tail = n * boost::math::cdf(boost::math::complement(pois, static_cast<double>(kmax)));
    acc_e += tail;
    if (!expected.empty() && acc_e < min_expected) {
        expected.back() += acc_e;
        observed.back() += acc_o;
    } else {
        expected.push_back(acc_e);
        observed.push_back(acc_o);
    }

    ChiSquareResult r;
    for (std::size_t k = 0; k < expected.size(); ++k)
        r.statistic += (observed[k] - expected[k]) * (observed[k] - expected[k]) / expected[k];
    r.dof = static_cast<double>(expected.size()) - 1.0;
    if (r.dof < 1) return r;
    const boost::math::chi_squared_distribution<double> chi(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(chi, r.statistic));
    return r;
}

double mean(const std::vector<double>& x)
{
    if (x.empty()) return 0.0;
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x)
{
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double standard_error(const std::vector<double>& x)
{
    if (x.size() < 2) return 0.0;
    return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double correlation(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("correlation needs paired samples");
    const double mx = mean(x), my = mean(y);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

double quantile(std::vector<double> x, double q)
{
    if (x.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(x.begin(), x.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(x.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

} // namespace tscp
