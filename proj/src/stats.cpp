#include "dpplab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace dpplab {

namespace {

constexpr double kPi = std::numbers::pi;

double kolmogorov_lambda(double n_eff, double d) {
  const double s = std::sqrt(n_eff);
  return (s + 0.12 + 0.11 / s) * d;
}

}  // namespace

double linear_statistic(const Configuration& config, const TestFunction& phi) {
  double sum = 0.0;
  for (const ChartPoint& p : config.points) sum += phi(p).real();
  return sum;
}

LinearStatSample linear_statistics(const SampleBatch& batch, const TestFunction& phi, double centre,
                                   Centering centering) {
  LinearStatSample s;
  s.centering = centering;
  s.centre = centre;
  s.phi = phi.name();
  s.values.reserve(batch.configurations.size());
  for (const Configuration& c : batch.configurations) {
    s.n = c.size();
    s.values.push_back(linear_statistic(c, phi) - c.size() * centre);
  }
  return s;
}

TailEstimate empirical_tail(const std::vector<double>& means, double lambda, double mean, double confidence) {
  if (means.empty()) throw std::invalid_argument("empirical_tail: empty batch");
  TailEstimate t;
  t.lambda = lambda;
  t.total = means.size();
  t.confidence = confidence;
  for (double m : means) {
    if (std::abs(m - mean) > lambda) ++t.exceedances;
  }
  t.estimate = double(t.exceedances) / double(t.total);
  using boost::math::binomial_distribution;
  const double alpha = 0.5 * (1.0 - confidence);
  const auto trials = double(t.total), successes = double(t.exceedances);
  t.lower = binomial_distribution<>::find_lower_bound_on_p(trials, successes, alpha);
  t.upper = binomial_distribution<>::find_upper_bound_on_p(trials, successes, alpha);
  return t;
}

TailEstimate empirical_tail(const SampleBatch& batch, const TestFunction& phi, double lambda, double mean,
                            double confidence) {
  std::vector<double> means;
  means.reserve(batch.configurations.size());
  for (const Configuration& c : batch.configurations) means.push_back(linear_statistic(c, phi) / c.size());
  return empirical_tail(means, lambda, mean, confidence);
}

double tail_bound(int n, double lambda, double dirichlet, int genus) {
  const double nn = n;
  return 2.0 * std::exp(-nn * nn * 2.0 * lambda * lambda / (dirichlet * (1.0 + (1.0 - genus) / nn)));
}

double chernoff_tail_bound(int n, double lambda, double dirichlet, int genus) {
  const double nn = n;
  return 2.0 * std::exp(-nn * nn * lambda * lambda * (1.0 + (1.0 - genus) / nn) / (2.0 * dirichlet));
}

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // 1 - (√(2π)/λ) Σ exp(-(2j-1)²π²/(8λ²))
    const double a = -kPi * kPi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int j = 1; j <= 8; ++j) sum += std::exp(a * (2 * j - 1) * (2 * j - 1));
    return std::clamp(1.0 - std::sqrt(2.0 * kPi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::vector<double> values, const std::function<double(double)>& cdf) {
  if (values.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(values.begin(), values.end());
  const double n = double(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max({d, (double(i) + 1.0) / n - f, f - double(i) / n});
  }
  return {d, kolmogorov_survival(kolmogorov_lambda(n, d))};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  return {d, kolmogorov_survival(kolmogorov_lambda(na * nb / (na + nb), d))};
}

ChiSquareResult chi_square_uniform(const std::vector<std::size_t>& counts) {
  if (counts.size() < 2) throw std::invalid_argument("chi_square_uniform: at least two cells required");
  double total = 0.0;
  for (std::size_t c : counts) total += double(c);
  if (total <= 0.0) throw std::invalid_argument("chi_square_uniform: no observations");
  const double expected = total / double(counts.size());
  ChiSquareResult r;
  for (std::size_t c : counts) r.statistic += (double(c) - expected) * (double(c) - expected) / expected;
  r.dof = static_cast<int>(counts.size()) - 1;
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<>(r.dof), r.statistic));
  return r;
}

CltReport clt_check(const LinearStatSample& sample, double exact_variance, double dirichlet) {
  const auto& v = sample.values;
  if (v.size() < 2) throw std::invalid_argument("clt_check: at least two replicas required");
  CltReport r;
  r.replicas = v.size();
  r.n = sample.n;
  r.reference_exact = exact_variance;
  r.reference_dirichlet = dirichlet;
  const double m = double(v.size());
  for (double x : v) r.mean += x;
  r.mean /= m;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - r.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  r.variance = m2 / (m - 1.0);
  m2 /= m;
  m3 /= m;
  m4 /= m;
  r.mean_standard_error = std::sqrt(r.variance / m);
  if (m2 > 0.0) {
    r.skewness = m3 / std::pow(m2, 1.5);
    r.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  r.degenerate = exact_variance < 1e-14;
  if (r.degenerate) return r;
  r.variance_relative_error = std::abs(r.variance / exact_variance - 1.0);
  const boost::math::normal_distribution<> normal(0.0, std::sqrt(exact_variance));
  r.ks = ks_one_sample(v, [&normal](double x) { return boost::math::cdf(normal, x); });
  return r;
}

std::vector<MgfRow> mgf_cross_check(const std::vector<double>& values, const std::vector<double>& ts,
                                    const std::function<double(double)>& exact_log_mgf) {
  if (values.empty()) throw std::invalid_argument("mgf_cross_check: empty sample");
  std::vector<MgfRow> rows;
  const double m = double(values.size());
  for (double t : ts) {
    MgfRow row;
    row.t = t;
    row.exact = exact_log_mgf(t);
    double top = -std::numeric_limits<double>::infinity();
    for (double x : values) top = std::max(top, -t * x);
    double s1 = 0.0, s2 = 0.0;
    for (double x : values) {
      const double e = std::exp(-t * x - top);
      s1 += e;
      s2 += e * e;
    }
    const double mean = s1 / m;
    row.empirical = top + std::log(mean);
    const double var = std::max(0.0, s2 / m - mean * mean) * m / std::max(1.0, m - 1.0);
    row.standard_error = std::sqrt(var / m) / mean;
    row.discrepancy = row.empirical - row.exact;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dpplab
