#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mtcp::stats {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

// Two-sided normal quantile for confidence level conf (0.95 -> 1.95996...).
double z_two_sided(double conf);
double normal_cdf(double z);

// Wilson score interval for k successes out of n.
Interval wilson(std::size_t k, std::size_t n, double conf = 0.95);

// Newcombe hybrid score interval for p1 - p2, independent samples.
Interval newcombe_unpaired(std::size_t k1, std::size_t n1, std::size_t k2,
                           std::size_t n2, double conf = 0.95);

// Newcombe interval for p1 - p2 from paired binary outcomes, given the 2x2
// table counts: both (a), first only (b), second only (c), neither (d).
Interval newcombe_paired(std::size_t a, std::size_t b, std::size_t c,
                         std::size_t d, double conf = 0.95);

struct TrendTest {
  double z = 0.0;
  double p_decreasing = 1.0;  // one-sided, H1: proportion decreases in score
  double p_increasing = 1.0;
};

// Cochran-Armitage test for trend in k[i]/n[i] against scores[i].
TrendTest cochran_armitage(std::span<const std::size_t> k,
                           std::span<const std::size_t> n,
                           std::span<const double> scores);

struct ChiSquare {
  double statistic = 0.0;
  int df = 0;
  double p = 1.0;
};

// Pearson goodness of fit. expected must be positive; bins with small
// expectation are the caller's business.
ChiSquare chi_square_gof(std::span<const double> observed,
                         std::span<const double> expected, int fitted = 0);

// Poisson(mean) fit of integer counts with tail bins merged until every bin
// expects at least min_expected observations.
ChiSquare poisson_gof(std::span<const std::size_t> counts, double mean,
                      double min_expected = 5.0);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
  // One-sided p-values for the sign of the slope (normal approximation).
  double p_negative = 1.0;
  double p_positive = 1.0;
};

// Weighted least squares y = a + b x.
LinearFit weighted_fit(std::span<const double> x, std::span<const double> y,
                       std::span<const double> w);

// Fit of log p against x from k[i] successes out of n[i]; weights are the
// inverse delta-method variances n p / (1 - p). Points with k = 0 or k = n
// are dropped.
LinearFit log_linear_fit(std::span<const double> x,
                         std::span<const std::size_t> k,
                         std::span<const std::size_t> n);

struct KsTest {
  double d = 0.0;
  double p = 1.0;
};

// Two-sample Kolmogorov-Smirnov with the asymptotic Kolmogorov tail.
KsTest ks_two_sample(std::vector<double> a, std::vector<double> b);
double kolmogorov_tail(double lambda);

struct MeanCi {
  double mean = 0.0;
  double se = 0.0;
  Interval ci;
  std::size_t n = 0;
};

// Student-t interval for the mean.
MeanCi mean_ci(std::span<const double> v, double conf = 0.95);

double quantile(std::vector<double> v, double q);

// Total variation distance between two probability vectors.
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace mtcp::stats
