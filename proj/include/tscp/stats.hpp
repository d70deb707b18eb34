#pragma once

#include <cstddef>
#include <vector>

namespace tscp {

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_sf(double x);

struct ChiSquareResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

/// Goodness of fit of integer counts to Poisson(mean). Tail bins are pooled
/// until every expected count is at least `min_expected`.
ChiSquareResult chi_square_poisson(const std::vector<long>& counts, double mean, double min_expected = 5.0);

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);
double standard_error(const std::vector<double>& x);

/// Pearson correlation of the paired samples.
double correlation(const std::vector<double>& x, const std::vector<double>& y);

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> x, double q);

} // namespace tscp
