#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sirsn::stats {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double dof = 0.0;
};

double mean(std::span<const double> x);
double standard_error(std::span<const double> x);
double median(std::vector<double> x);

// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

TestResult ks_one_sample(std::vector<double> data, const std::function<double(double)>& cdf);
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Pearson chi-square; adjacent cells are pooled until every expected count is >= min_expected.
// dof = pooled cells - 1 - fitted_parameters.
TestResult chi_square(std::span<const double> observed, std::span<const double> expected,
                      int fitted_parameters = 0, double min_expected = 5.0);

}  // namespace sirsn::stats
