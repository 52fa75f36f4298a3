#ifndef DPPLAB_STATS_HPP
#define DPPLAB_STATS_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "dpplab/dpp.hpp"
#include "dpplab/test_function.hpp"
#include "dpplab/toeplitz.hpp"

namespace dpplab {

/// Σφ(x_i), real part.
double linear_statistic(const Configuration& config, const TestFunction& phi);

struct LinearStatSample {
  std::vector<double> values;  // Σφ(x_i) - N·centre, one per configuration
  Centering centering = Centering::MeanOmega;
  double centre = 0.0;
  int n = 0;
  std::string phi;
};

LinearStatSample linear_statistics(const SampleBatch& batch, const TestFunction& phi, double centre = 0.0,
                                   Centering centering = Centering::MeanOmega);

struct TailEstimate {
  double lambda = 0.0;
  std::size_t exceedances = 0;
  std::size_t total = 0;
  double estimate = 0.0;
  double lower = 0.0;  // Clopper–Pearson interval at `confidence`
  double upper = 1.0;
  double confidence = 0.99;
};

/// Fraction of configurations with |Σφ/N - mean| > λ, with a two-sided
/// Clopper–Pearson interval.
TailEstimate empirical_tail(const SampleBatch& batch, const TestFunction& phi, double lambda, double mean,
                            double confidence = 0.99);
TailEstimate empirical_tail(const std::vector<double>& means, double lambda, double mean, double confidence = 0.99);

/// 2 exp(-N² · 2λ² / (∥dφ∥² (1 + (1-g)/N))).
double tail_bound(int n, double lambda, double dirichlet, int genus = 0);

/// 2 exp(-N² λ² (1 + (1-g)/N) / (2∥dφ∥²)): Chernoff bound from the quadratic
/// log-MGF bound (N/(N + 1 - g))·t²∥dφ∥²/2.
double chernoff_tail_bound(int n, double lambda, double dirichlet, int genus = 0);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// P(K > λ) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

/// Asymptotic p-values with Stephens' finite-sample correction.
KsResult ks_one_sample(std::vector<double> values, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson test of equal cell probabilities.
ChiSquareResult chi_square_uniform(const std::vector<std::size_t>& counts);

struct CltReport {
  std::size_t replicas = 0;
  int n = 0;
  double mean = 0.0;
  double mean_standard_error = 0.0;
  double variance = 0.0;            // unbiased sample variance
  double reference_dirichlet = 0.0;  // ∥dφ∥²
  double reference_exact = 0.0;      // trace-formula variance at this N
  double variance_relative_error = 0.0;
  KsResult ks;  // against normal(0, reference_exact)
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  bool degenerate = false;  // reference variance ~0: not tested
};

/// values must be centred (Σφ - N·centre).
CltReport clt_check(const LinearStatSample& sample, double exact_variance, double dirichlet);

struct MgfRow {
  double t = 0.0;
  double empirical = 0.0;  // log mean exp(-t Σφ)
  double exact = 0.0;
  double discrepancy = 0.0;
  double standard_error = 0.0;  // delta-method MC error of `empirical`
};

/// Compares log mean exp(-t·v) over the sample with exact_log_mgf(t).
std::vector<MgfRow> mgf_cross_check(const std::vector<double>& values, const std::vector<double>& ts,
                                    const std::function<double(double)>& exact_log_mgf);

}  // namespace dpplab

#endif  // DPPLAB_STATS_HPP
