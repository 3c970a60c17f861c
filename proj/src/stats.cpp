#include "mtcp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace mtcp::stats {

double z_two_sided(double conf) {
  if (!(conf > 0.0 && conf < 1.0))
    throw std::invalid_argument("confidence must lie in (0, 1)");
  boost::math::normal_distribution<> n;
  return boost::math::quantile(n, 0.5 + conf / 2.0);
}

double normal_cdf(double z) {
  boost::math::normal_distribution<> n;
  return boost::math::cdf(n, z);
}

Interval wilson(std::size_t k, std::size_t n, double conf) {
  if (k > n) throw std::invalid_argument("wilson: k > n");
  if (n == 0) return {0.0, 1.0};
  double z = z_two_sided(conf);
  double nn = static_cast<double>(n);
  double p = static_cast<double>(k) / nn;
  double z2 = z * z;
  double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  // Exact endpoints at the boundary.
  double lo = k == 0 ? 0.0 : std::max(0.0, centre - half);
  double hi = k == n ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

Interval newcombe_unpaired(std::size_t k1, std::size_t n1, std::size_t k2,
                           std::size_t n2, double conf) {
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("newcombe: empty sample");
  double p1 = static_cast<double>(k1) / static_cast<double>(n1);
  double p2 = static_cast<double>(k2) / static_cast<double>(n2);
  Interval w1 = wilson(k1, n1, conf), w2 = wilson(k2, n2, conf);
  double d = p1 - p2;
  return {d - std::hypot(p1 - w1.lo, w2.hi - p2),
          d + std::hypot(w1.hi - p1, p2 - w2.lo)};
}

Interval newcombe_paired(std::size_t a, std::size_t b, std::size_t c,
                         std::size_t d, double conf) {
  std::size_t n = a + b + c + d;
  if (n == 0) throw std::invalid_argument("newcombe: empty sample");
  double nn = static_cast<double>(n);
  double p1 = static_cast<double>(a + b) / nn;
  double p2 = static_cast<double>(a + c) / nn;
  Interval w1 = wilson(a + b, n, conf), w2 = wilson(a + c, n, conf);
  double den = static_cast<double>(a + b) * static_cast<double>(c + d) *
               static_cast<double>(a + c) * static_cast<double>(b + d);
  double phi = 0.0;
  if (den > 0.0)
    phi = (static_cast<double>(a) * static_cast<double>(d) -
           static_cast<double>(b) * static_cast<double>(c)) /
          std::sqrt(den);
  double dl1 = p1 - w1.lo, du1 = w1.hi - p1;
  double dl2 = p2 - w2.lo, du2 = w2.hi - p2;
  double diff = p1 - p2;
  double lo2 = dl1 * dl1 - 2 * phi * dl1 * du2 + du2 * du2;
  double hi2 = du1 * du1 - 2 * phi * du1 * dl2 + dl2 * dl2;
  return {diff - std::sqrt(std::max(0.0, lo2)),
          diff + std::sqrt(std::max(0.0, hi2))};
}

TrendTest cochran_armitage(std::span<const std::size_t> k,
                           std::span<const std::size_t> n,
                           std::span<const double> scores) {
  if (k.size() != n.size() || k.size() != scores.size() || k.size() < 2)
    throw std::invalid_argument("cochran_armitage: need >= 2 matching groups");
  double N = 0, K = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    N += static_cast<double>(n[i]);
    K += static_cast<double>(k[i]);
  }
  double pbar = K / N;
  double t = 0, sn = 0, sn2 = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    double ni = static_cast<double>(n[i]);
    t += scores[i] * (static_cast<double>(k[i]) - ni * pbar);
    sn += ni * scores[i];
    sn2 += ni * scores[i] * scores[i];
  }
  double var = pbar * (1 - pbar) * (sn2 - sn * sn / N);
  TrendTest r;
  if (var <= 0.0) return r;
  r.z = t / std::sqrt(var);
  r.p_decreasing = normal_cdf(r.z);
  r.p_increasing = 1.0 - r.p_decreasing;
  return r;
}

ChiSquare chi_square_gof(std::span<const double> observed,
                         std::span<const double> expected, int fitted) {
  if (observed.size() != expected.size() || observed.size() < 2)
    throw std::invalid_argument("chi_square_gof: need >= 2 matching bins");
  ChiSquare r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0))
      throw std::invalid_argument("chi_square_gof: expected must be positive");
    double d = observed[i] - expected[i];
    r.statistic += d * d / expected[i];
  }
  r.df = static_cast<int>(observed.size()) - 1 - fitted;
  if (r.df < 1) throw std::invalid_argument("chi_square_gof: no degrees of freedom");
  boost::math::chi_squared_distribution<> chi(r.df);
  r.p = boost::math::cdf(boost::math::complement(chi, r.statistic));
  return r;
}

ChiSquare poisson_gof(std::span<const std::size_t> counts, double mean,
                      double min_expected) {
  if (counts.empty()) throw std::invalid_argument("poisson_gof: no data");
  boost::math::poisson_distribution<> pois(mean);
  const double n = static_cast<double>(counts.size());
  std::size_t top = *std::max_element(counts.begin(), counts.end());
  std::size_t hi = std::max<std::size_t>(
      top, static_cast<std::size_t>(mean + 10.0 * std::sqrt(mean) + 10.0));
  std::vector<double> obs_k(hi + 1, 0.0);
  for (std::size_t c : counts) obs_k[c] += 1.0;

  std::vector<double> obs, exp;
  double o = 0, e = 0;
  for (std::size_t k = 0; k <= hi; ++k) {
    o += obs_k[k];
    e += n * boost::math::pdf(pois, static_cast<double>(k));
    if (e >= min_expected) {
      obs.push_back(o);
      exp.push_back(e);
      o = e = 0;
    }
  }
  // Upper tail P[X > hi] and any leftover join the last bin.
  e += n * boost::math::cdf(boost::math::complement(pois, static_cast<double>(hi)));
  if (obs.empty()) {
    obs.push_back(o);
    exp.push_back(e);
  } else {
    obs.back() += o;
    exp.back() += e;
  }
  if (obs.size() < 2) {
    ChiSquare r;
    r.df = 0;
    r.p = 1.0;
    return r;
  }
  return chi_square_gof(obs, exp);
}

LinearFit weighted_fit(std::span<const double> x, std::span<const double> y,
                       std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size() || x.size() < 2)
    throw std::invalid_argument("weighted_fit: need >= 2 points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("weighted_fit: degenerate x");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  // Inverse-variance weights give 1/sxx; inflate by the reduced chi-square
  // when the points scatter more than their weights claim.
  double scale = 1.0;
  if (x.size() > 2) {
    double chi = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double r = y[i] - f.intercept - f.slope * x[i];
      chi += w[i] * r * r;
    }
    scale = std::max(1.0, chi / static_cast<double>(x.size() - 2));
  }
  f.slope_se = std::sqrt(scale / sxx);
  double z = f.slope / f.slope_se;
  f.p_negative = normal_cdf(z);
  f.p_positive = 1.0 - f.p_negative;
  return f;
}

LinearFit log_linear_fit(std::span<const double> x,
                         std::span<const std::size_t> k,
                         std::span<const std::size_t> n) {
  if (x.size() != k.size() || x.size() != n.size())
    throw std::invalid_argument("log_linear_fit: size mismatch");
  std::vector<double> xs, ys, ws;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (k[i] == 0 || k[i] >= n[i]) continue;
    double p = static_cast<double>(k[i]) / static_cast<double>(n[i]);
    xs.push_back(x[i]);
    ys.push_back(std::log(p));
    ws.push_back(static_cast<double>(n[i]) * p / (1 - p));
  }
  if (xs.size() < 2)
    throw std::invalid_argument("log_linear_fit: fewer than 2 usable points");
  return weighted_fit(xs, ys, ws);
}

double kolmogorov_tail(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsTest ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  double en = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_tail((en + 0.12 + 0.11 / en) * d)};
}

MeanCi mean_ci(std::span<const double> v, double conf) {
  MeanCi r;
  r.n = v.size();
  if (v.size() < 2) throw std::invalid_argument("mean_ci: need >= 2 values");
  r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  r.se = sd / std::sqrt(static_cast<double>(v.size()));
  boost::math::students_t_distribution<> t(static_cast<double>(v.size() - 1));
  double q = boost::math::quantile(t, 0.5 + conf / 2.0);
  r.ci = {r.mean - q * r.se, r.mean + q * r.se};
  return r;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  q = std::clamp(q, 0.0, 1.0);
  std::sort(v.begin(), v.end());
  // Type 7 (linear interpolation between order statistics).
  double pos = q * static_cast<double>(v.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = std::min(lo + 1, v.size() - 1);
  double f = pos - static_cast<double>(lo);
  return v[lo] + f * (v[hi] - v[lo]);
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv: size mismatch");
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return s / 2.0;
}

}  // namespace mtcp::stats
