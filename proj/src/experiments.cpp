#include "dpplab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dpplab/bergman.hpp"
#include "dpplab/dpp.hpp"
#include "dpplab/error.hpp"
#include "dpplab/rng.hpp"
#include "dpplab/stats.hpp"
#include "dpplab/toeplitz.hpp"

namespace dpplab {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, double>) {
      out += format_double(xs[i]);
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

std::vector<int> range(int first, int last, int step = 1) {
  std::vector<int> out;
  for (int k = first; k <= last; k += step) out.push_back(k);
  return out;
}

struct ExperimentDef {
  std::string description;
  std::vector<int> criteria;
  std::set<std::string> keys;
};

const std::map<std::string, ExperimentDef>& definitions() {
  static const std::map<std::string, ExperimentDef> table{
      {"bergman-decay",
       {"dimension law, sphere Bergman constancy, torus and local-model exponential decay",
        {1, 2, 3, 4},
        {"sphere_k_max", "torus_k_min", "torus_k_max", "constancy_ks", "tau_re", "tau_im", "decay_ks",
         "local_ks", "local_eps", "local_curvature", "rate_tolerance"}}},
      {"clt-check",
       {"Monte Carlo CLT for a linear statistic against the exact trace variance",
        {10},
        {"n", "phi", "sampler", "variance_tolerance", "p_threshold"}}},
      {"mobius-identities",
       {"Mobius involution and polarized weight identities on random chart samples",
        {5},
        {"samples", "curvatures", "radius_fraction", "tolerance"}}},
      {"mt-check",
       {"scaling identity and Moser-Trudinger gap over a bandlimited family on the sphere",
        {6, 7},
        {"ns", "family_l", "family_size", "amplitudes", "phi", "scaling_trials"}}},
      {"sampler-agreement",
       {"chain-rule vs eigenvalue-model samplers, density normalization checks",
        {11, 13},
        {"n", "phi", "p_threshold", "density_resolution", "z3_samples", "slater_n", "slater_trials"}}},
      {"szego-table",
       {"strong Szego defect of the fluctuation log-MGF over N",
        {8},
        {"phi", "ns", "threshold"}}},
      {"tail-check",
       {"Chernoff-side log-MGF bound and Monte Carlo tail against the stated tail bound",
        {12},
        {"ns", "phi", "t_min", "t_max", "t_step", "lambdas", "confidence"}}},
      {"variance-table",
       {"exact variance of a linear statistic against its Dirichlet norm over N",
        {9},
        {"phi", "ns", "ratio_low", "ratio_high"}}},
  };
  return table;
}

const ExperimentDef& definition_for(const std::string& id) {
  const auto it = definitions().find(id);
  if (it == definitions().end()) throw ConfigError("unknown experiment '" + id + "'");
  return it->second;
}

const std::map<int, std::string>& criterion_names() {
  static const std::map<int, std::string> names{
      {1, "dimension law"},
      {2, "sphere Bergman constancy"},
      {3, "torus Bergman decay"},
      {4, "local model reproducing error"},
      {5, "Mobius and polarization identities"},
      {6, "scaling identity"},
      {7, "Moser-Trudinger on the sphere"},
      {8, "strong Szego limit"},
      {9, "variance convergence"},
      {10, "CLT Monte Carlo"},
      {11, "sampler agreement"},
      {12, "tail bound"},
      {13, "density normalization"},
  };
  return names;
}

// Reads settings and records the effective value of each one.
class Settings {
 public:
  explicit Settings(const ExperimentConfig& c) : c_(c), effective_(c.values()) {}

  std::string str(const std::string& key, const std::string& fallback) {
    return note(key, c_.get_string(key, fallback));
  }
  int integer(const std::string& key, int fallback) {
    const int v = c_.get_int(key, fallback);
    note(key, std::to_string(v));
    return v;
  }
  std::uint64_t seed(std::uint64_t fallback) {
    const std::uint64_t v = c_.get_seed("seed", fallback);
    note("seed", std::to_string(v));
    return v;
  }
  double real(const std::string& key, double fallback) {
    const double v = c_.get_double(key, fallback);
    note(key, format_double(v));
    return v;
  }
  std::vector<int> ints(const std::string& key, const std::vector<int>& fallback) {
    const auto v = c_.get_int_list(key, fallback);
    if (v.empty()) throw ConfigError("'" + key + "' must not be empty");
    note(key, join(v));
    return v;
  }
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) {
    const auto v = c_.get_double_list(key, fallback);
    if (v.empty()) throw ConfigError("'" + key + "' must not be empty");
    note(key, join(v));
    return v;
  }
  int replicas(int fallback) {
    const int v = integer("replicas", fallback);
    if (v < 2) throw ConfigError("'replicas' must be at least 2");
    return v;
  }
  TestFunction phi(const std::string& fallback) {
    const std::string name = str("phi", fallback);
    try {
      return make_preset(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  const std::map<std::string, std::string>& effective() const { return effective_; }

 private:
  std::string note(const std::string& key, std::string value) {
    effective_[key] = value;
    return value;
  }
  const ExperimentConfig& c_;
  std::map<std::string, std::string> effective_;
};

// Level-k sphere basis with a Toeplitz grid; members are kept alive together
// because the assembler refers to them.
struct SphereLevel {
  SurfaceModel model = make_sphere();
  SectionBasis basis;
  QuadGrid grid;
  std::unique_ptr<ToeplitzAssembler> assembler;

  explicit SphereLevel(int n)
      : basis(sphere_basis(model, n - 1)), grid(quadrature_grid(model, toeplitz_resolution(basis))) {
    assembler = std::make_unique<ToeplitzAssembler>(basis, grid);
  }
  Eigen::VectorXd real_samples(const TestFunction& f) const { return f.sample(grid).real(); }
};

void require_real(const TestFunction& phi) {
  if (!phi.is_real()) throw ConfigError("'phi' must be real-valued for this experiment");
}

void check_ns(const std::vector<int>& ns) {
  for (int n : ns)
    if (n < 1) throw ConfigError("particle numbers must be positive");
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

using Row = std::vector<std::string>;

struct Context {
  Settings settings;
  ExperimentReport& report;
  void criterion(int id, bool passed, std::string detail) {
    report.criteria.push_back({id, criterion_names().at(id), passed, std::move(detail)});
  }
  void row(Row r) { report.rows.push_back(std::move(r)); }
};

std::string d(double x) { return format_double(x); }
std::string i(long long x) { return std::to_string(x); }
// short form for human-readable criterion details
std::string g(double x) { return fmt("%.6g", x); }

void run_bergman_decay(Context& ctx) {
  auto& s = ctx.settings;
  const int sphere_max = s.integer("sphere_k_max", 64);
  const int torus_min = s.integer("torus_k_min", 2);
  const int torus_max = s.integer("torus_k_max", 32);
  const std::vector<int> constancy = s.ints("constancy_ks", {1, 2, 4, 8, 16, 32, 64});
  const cdouble tau(s.real("tau_re", 0.0), s.real("tau_im", 3.0));
  const std::vector<int> decay_ks = s.ints("decay_ks", range(8, 40, 4));
  const std::vector<int> local_ks = s.ints("local_ks", range(20, 120, 10));
  const double eps = s.real("local_eps", 0.3);
  const double curvature = s.real("local_curvature", -2.0);
  const double tolerance = s.real("rate_tolerance", 0.15);
  if (tau.imag() <= 0.0) throw ConfigError("'tau_im' must be positive");
  ctx.report.header = {"part", "k", "value", "reference", "residual"};

  const SurfaceModel sphere = make_sphere();
  const SurfaceModel torus = make_torus(tau);
  bool dims_ok = true;
  int checked = 0;
  const auto dimension_rows = [&](const char* part, const SurfaceModel& model, int k, int dimension) {
    const int expected = k * int(model.volume()) - (model.genus() - 1);
    dims_ok &= dimension == expected && dimension_law(model, k) == expected;
    ++checked;
    ctx.row({part, i(k), i(dimension), i(expected), i(dimension - expected)});
  };
  for (int k = 1; k <= sphere_max; ++k) dimension_rows("dimension-sphere", sphere, k, sphere_basis(sphere, k).dimension());
  for (int k = torus_min; k <= torus_max; ++k)
    dimension_rows("dimension-torus", torus, k, torus_theta_basis(torus, k).dimension());
  ctx.criterion(1, dims_ok, std::to_string(checked) + " levels checked, sphere k=1.." + std::to_string(sphere_max) +
                               ", torus k=" + std::to_string(torus_min) + ".." + std::to_string(torus_max));

  double worst = 0.0;
  for (int k : constancy) {
    const SectionBasis basis = sphere_basis(sphere, k);
    const QuadGrid grid = quadrature_grid(sphere, basis.min_resolution() + 8);
    const ToeplitzAssembler assembler(basis, grid);
    const double sup = (assembler.bergman_function().array() - double(k + 1)).abs().maxCoeff();
    worst = std::max(worst, sup);
    ctx.row({"sphere-constancy", i(k), d(assembler.bergman_function().maxCoeff()), i(k + 1), d(sup)});
  }
  ctx.criterion(2, worst < 1e-9, "max sup|B_k - (k+1)| = " + g(worst) + " (threshold 1e-9)");

  const DecayFit fit = torus_bergman_error(tau, decay_ks);
  bool monotone = true;
  for (std::size_t j = 0; j < fit.ks.size(); ++j) {
    if (j && fit.errors[j] >= fit.errors[j - 1]) monotone = false;
    ctx.row({"torus-decay", i(fit.ks[j]), d(fit.errors[j]), d(std::exp(fit.intercept - fit.oracle_rate * fit.ks[j])),
             d(std::log(fit.errors[j]) - (fit.intercept - fit.rate * fit.ks[j]))});
  }
  const double rel = std::abs(fit.rate / fit.oracle_rate - 1.0);
  ctx.criterion(3, monotone && rel <= tolerance && fit.oracle_rate >= fit.bound_rate,
                "fitted rate " + g(fit.rate) + ", lattice oracle " + g(fit.oracle_rate) + " (relative error " +
                    fmt("%.4f", rel) + "), injectivity-radius rate " + g(fit.bound_rate) +
                    (monotone ? ", monotone" : ", NOT monotone"));

  std::vector<double> local_errors;
  for (int k : local_ks) local_errors.push_back(local_reproduce_error({1.0}, k, eps, curvature));
  const DecayFit local = fit_decay(local_ks, local_errors);
  const double delta = model_weight(cdouble(eps, 0.0), curvature);
  for (std::size_t j = 0; j < local_ks.size(); ++j) {
    ctx.row({"local-decay", i(local_ks[j]), d(local_errors[j]),
             d(local_errors[0] * std::exp(-delta * (local_ks[j] - local_ks[0]))),
             d(std::log(local_errors[j]) - (local.intercept - local.rate * local_ks[j]))});
  }
  const double local_rel = std::abs(local.rate / delta - 1.0);
  ctx.criterion(4, local_rel <= tolerance,
                "fitted rate " + g(local.rate) + ", Phi(eps^2) = " + g(delta) + " (relative error " +
                    fmt("%.2e", local_rel) + ")");
}

void run_mobius(Context& ctx) {
  auto& s = ctx.settings;
  const std::uint64_t seed = s.seed(2024);
  const int samples = s.integer("samples", 1000);
  const std::vector<double> curvatures = s.reals("curvatures", {-2.0, -0.5, 2.0});
  const double fraction = s.real("radius_fraction", 0.5);
  const double tolerance = s.real("tolerance", 1e-12);
  if (samples < 1) throw ConfigError("'samples' must be positive");
  if (!(fraction > 0.0 && fraction < 1.0 / std::sqrt(3.0))) throw ConfigError("'radius_fraction' must lie in (0, 1/sqrt 3)");
  ctx.report.header = {"curvature", "sample", "re_z", "im_z", "re_w", "im_w", "inversion", "polarization", "transfer", "shift"};
  double worst = 0.0;
  for (std::size_t c = 0; c < curvatures.size(); ++c) {
    const double R = curvatures[c];
    if (R == 0.0) throw ConfigError("curvatures must be nonzero");
    // |z|, |w| < f/sqrt|R| gives |R z w| <= f² and |R z ζ| <= 2f²/(1 - f²) for
    // ζ = F_z(w), so every polarized weight stays on its principal branch when f² < 1/3
    const double radius = fraction / std::sqrt(std::abs(R));
    CounterRng rng(seed, c);
    const auto draw = [&] { return std::polar(radius * std::sqrt(rng.uniform()), 2.0 * kPi * rng.uniform()); };
    for (int j = 0; j < samples; ++j) {
      const cdouble z = draw(), w = draw();
      const RelationResiduals r = relation_residuals(z, w, R);
      worst = std::max(worst, r.max());
      ctx.row({d(R), i(j), d(z.real()), d(z.imag()), d(w.real()), d(w.imag()), d(r.inversion), d(r.polarization),
               d(r.transfer), d(r.shift)});
    }
  }
  ctx.criterion(5, worst < tolerance,
                std::to_string(samples) + " samples per curvature, max residual " + g(worst) + " (threshold " +
                    g(tolerance) + ")");
}

void run_mt_check(Context& ctx) {
  auto& s = ctx.settings;
  const std::uint64_t seed = s.seed(7);
  const std::vector<int> ns = s.ints("ns", {2, 4, 8, 16, 32});
  const std::vector<double> amplitudes = s.reals("amplitudes", {0.5, 1.0, 2.0, 4.0});
  const int trials = s.integer("scaling_trials", 5);
  check_ns(ns);
  std::vector<TestFunction> family;
  if (ctx.settings.effective().count("phi")) {
    family.push_back(s.phi("zero"));
    require_real(family.back());
  } else {
    const int l = s.integer("family_l", 8);
    const int size = s.integer("family_size", 20);
    if (l < 1 || size < 1) throw ConfigError("'family_l' and 'family_size' must be positive");
    for (int seed_f = 1; seed_f <= size; ++seed_f)
      family.push_back(make_preset("harmonic:" + std::to_string(l) + "," + std::to_string(seed_f)));
  }
  ctx.report.header = {"part", "n", "function", "amplitude", "value", "reference", "residual"};
  const SurfaceModel sphere = make_sphere();
  std::vector<double> norms;
  for (const TestFunction& f : family) norms.push_back(dirichlet_norm(f, sphere));

  double worst_scaling = 0.0, worst_gap = std::numeric_limits<double>::infinity();
  int evaluated = 0;
  CounterRng rng(seed, 0);
  for (int n : ns) {
    const SphereLevel level(n);
    for (int t = 0; t < trials; ++t) {
      const TestFunction f = make_preset("harmonic:4," + std::to_string(1000 + t));
      const Eigen::VectorXd phi = level.real_samples(f);
      const double c = 4.0 * rng.uniform() - 2.0;
      const double lhs = log_expectation_real(*level.assembler, (phi.array() + c).matrix());
      const double rhs = log_expectation_real(*level.assembler, phi) - n * c;
      worst_scaling = std::max(worst_scaling, std::abs(lhs - rhs));
      ctx.row({"scaling", i(n), f.name(), d(c), d(lhs), d(rhs), d(std::abs(lhs - rhs))});
    }
    for (std::size_t j = 0; j < family.size(); ++j) {
      const Eigen::VectorXd phi = level.real_samples(family[j]);
      for (double a : amplitudes) {
        const double dirichlet = a * a * norms[j];
        const double gap = mt_gap(*level.assembler, a * phi, dirichlet);
        const double bound = dirichlet / (2.0 * (1.0 + 1.0 / n));
        worst_gap = std::min(worst_gap, gap);
        ++evaluated;
        ctx.row({"moser-trudinger", i(n), family[j].name(), d(a), d(bound - gap), d(bound), d(gap)});
      }
    }
  }
  ctx.criterion(6, worst_scaling < 1e-12,
                std::to_string(trials * ns.size()) + " (phi, c) pairs, max residual " + g(worst_scaling) +
                    " (threshold 1e-12)");
  ctx.criterion(7, worst_gap >= -1e-8,
                std::to_string(evaluated) + " (function, amplitude, N) cases, min gap " + g(worst_gap) +
                    " (threshold -1e-8)");
}

void run_szego(Context& ctx) {
  auto& s = ctx.settings;
  const TestFunction phi = s.phi("cos-theta");
  const std::vector<int> ns = s.ints("ns", {8, 16, 32, 64});
  const double threshold = s.real("threshold", 0.05);
  check_ns(ns);
  ctx.report.header = {"n", "defect_re", "defect_im", "abs_defect", "reference"};
  const cdouble q = dirichlet_energy_bilinear(phi, make_sphere());
  std::vector<double> defects;
  for (int n : ns) {
    const SphereLevel level(n);
    const cdouble defect = szego_defect(*level.assembler, phi.sample(level.grid), q);
    defects.push_back(std::abs(defect));
    ctx.row({i(n), d(defect.real()), d(defect.imag()), d(std::abs(defect)), d(0.5 * q.real())});
  }
  bool monotone = true;
  for (std::size_t j = 1; j < defects.size(); ++j) monotone &= defects[j] < defects[j - 1];
  const bool ok = defects.size() >= 2 && defects.back() < defects.front() && defects.back() < threshold;
  ctx.criterion(8, ok,
                "|defect| " + g(defects.front()) + " at N=" + std::to_string(ns.front()) + ", " + g(defects.back()) +
                    " at N=" + std::to_string(ns.back()) + " (threshold " + g(threshold) + "), reference " +
                    g(0.5 * q.real()) + (monotone ? ", monotone" : ", not monotone"));
}

void run_variance(Context& ctx) {
  auto& s = ctx.settings;
  const TestFunction phi = s.phi("cos-theta");
  const std::vector<int> ns = s.ints("ns", {8, 16, 32, 64});
  const double low = s.real("ratio_low", 0.9), high = s.real("ratio_high", 1.01);
  check_ns(ns);
  require_real(phi);
  ctx.report.header = {"n", "variance", "dirichlet", "ratio", "bound"};
  const double dirichlet = dirichlet_norm(phi, make_sphere());
  if (dirichlet <= 0.0) throw ConfigError("'phi' has zero Dirichlet norm");
  std::vector<double> ratios;
  bool bounded = true;
  for (int n : ns) {
    const SphereLevel level(n);
    const double v = variance_exact(*level.assembler, level.real_samples(phi));
    ratios.push_back(v / dirichlet);
    bounded &= v <= 4.0 * dirichlet + 1e-8;
    ctx.row({i(n), d(v), d(dirichlet), d(v / dirichlet), d(4.0 * dirichlet)});
  }
  bool increasing = true;
  for (std::size_t j = 1; j < ratios.size(); ++j) increasing &= ratios[j] > ratios[j - 1];
  const bool ok = increasing && bounded && ratios.back() >= low && ratios.back() <= high;
  ctx.criterion(9, ok,
                "ratio " + g(ratios.back()) + " at N=" + std::to_string(ns.back()) + " (window [" + g(low) + ", " +
                    g(high) + "])" + (increasing ? ", increasing" : ", NOT increasing") +
                    (bounded ? "" : ", variance bound violated"));
}

SamplerId sampler_setting(Settings& s) {
  try {
    return sampler_from_string(s.str("sampler", "chain-rule"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void run_clt(Context& ctx) {
  auto& s = ctx.settings;
  const std::uint64_t seed = s.seed(20241);
  const int n = s.integer("n", 32);
  const int replicas = s.replicas(2000);
  const TestFunction phi = s.phi("cos-theta");
  const SamplerId sampler = sampler_setting(s);
  const double tolerance = s.real("variance_tolerance", 0.1);
  const double threshold = s.real("p_threshold", 0.01);
  check_ns({n});
  require_real(phi);
  ctx.report.header = {"replica", "value"};
  const SphereLevel level(n);
  const Eigen::VectorXd samples = level.real_samples(phi);
  const double centre = centering_value(*level.assembler, samples.cast<cdouble>(), Centering::MeanProcess).real();
  const double exact = variance_exact(*level.assembler, samples);
  const double dirichlet = dirichlet_norm(phi, level.model);
  const SampleBatch batch = sample_batch(sampler, level.basis, replicas, seed);
  const LinearStatSample stat = linear_statistics(batch, phi, centre, Centering::MeanProcess);
  for (std::size_t r = 0; r < stat.values.size(); ++r) ctx.row({i(static_cast<long long>(r)), d(stat.values[r])});
  const CltReport rep = clt_check(stat, exact, dirichlet);
  const bool ok = !rep.degenerate && rep.variance_relative_error <= tolerance && rep.ks.p_value > threshold;
  ctx.criterion(10, ok,
                "variance " + g(rep.variance) + " vs exact " + g(exact) + " (relative error " +
                    fmt("%.4f", rep.variance_relative_error) + "), KS D = " + fmt("%.5f", rep.ks.statistic) +
                    ", p = " + fmt("%.4f", rep.ks.p_value) + ", skewness " + fmt("%.4f", rep.skewness) +
                    ", excess kurtosis " + fmt("%.4f", rep.excess_kurtosis) +
                    (rep.degenerate ? ", degenerate" : ""));
}

void run_sampler_agreement(Context& ctx) {
  auto& s = ctx.settings;
  const std::uint64_t seed = s.seed(31337);
  const int n = s.integer("n", 8);
  const int replicas = s.replicas(5000);
  const TestFunction phi = s.phi("cos-theta");
  const double threshold = s.real("p_threshold", 0.01);
  const int resolution = s.integer("density_resolution", 6);
  const int z3_samples = s.integer("z3_samples", 200000);
  const int slater_n = s.integer("slater_n", 4);
  const int slater_trials = s.integer("slater_trials", 100);
  check_ns({n, slater_n});
  require_real(phi);
  if (resolution < 3 || z3_samples < 1 || slater_trials < 1) throw ConfigError("density check sizes must be positive");
  ctx.report.header = {"sampler", "replica", "value"};

  const SectionBasis basis = sphere_basis(make_sphere(), n - 1);
  const SampleBatch chain = sample_batch(SamplerId::ChainRule, basis, replicas, seed);
  const SampleBatch eigen = sample_batch(SamplerId::EigenvalueModel, basis, replicas, seed + 1);
  const std::vector<double> a = linear_statistics(chain, phi).values;
  const std::vector<double> b = linear_statistics(eigen, phi).values;
  for (std::size_t r = 0; r < a.size(); ++r) ctx.row({to_string(SamplerId::ChainRule), i(static_cast<long long>(r)), d(a[r])});
  for (std::size_t r = 0; r < b.size(); ++r)
    ctx.row({to_string(SamplerId::EigenvalueModel), i(static_cast<long long>(r)), d(b[r])});
  const KsResult ks = ks_two_sample(a, b);
  ctx.criterion(11, ks.p_value > threshold,
                "two-sample KS D = " + fmt("%.5f", ks.statistic) + ", p = " + fmt("%.4f", ks.p_value) + " (threshold " +
                    g(threshold) + "), eigenvalue-model retries " + std::to_string(eigen.retries));

  const QuadGrid grid = quadrature_grid(make_sphere(), resolution);
  double total = 0.0;
  for (std::size_t p = 0; p < grid.nodes.size(); ++p)
    for (std::size_t q = 0; q < grid.nodes.size(); ++q)
      total += grid.weights[Eigen::Index(p)] * grid.weights[Eigen::Index(q)] * joint_density({grid.nodes[p], grid.nodes[q]});
  CounterRng mc(seed, 0x7a33);
  double z3 = 0.0;
  for (int j = 0; j < z3_samples; ++j)
    z3 += joint_density({uniform_sphere_point(mc), uniform_sphere_point(mc), uniform_sphere_point(mc)});
  z3 /= z3_samples;
  const SectionBasis small = sphere_basis(make_sphere(), slater_n - 1);
  double slater = 0.0;
  for (int j = 0; j < slater_trials; ++j) {
    std::vector<ChartPoint> pts;
    for (int p = 0; p < slater_n; ++p) pts.push_back(uniform_sphere_point(mc));
    const double product = joint_density(pts);
    slater = std::max(slater, std::abs(product - joint_density_slater(small, pts)) / std::max(1.0, product));
  }
  const bool ok = std::abs(total - 1.0) < 1e-8 && std::abs(z3 - 1.0) < 0.02 && slater < 1e-10;
  ctx.criterion(13, ok,
                "two-point integral - 1 = " + g(total - 1.0) + ", three-point Monte Carlo mean " + fmt("%.5f", z3) +
                    ", max Slater/product discrepancy " + g(slater) + " at N=" + std::to_string(slater_n));
}

void run_tail(Context& ctx) {
  auto& s = ctx.settings;
  const std::uint64_t seed = s.seed(4711);
  const std::vector<int> ns = s.ints("ns", {8, 16, 32});
  const int replicas = s.replicas(5000);
  const TestFunction phi = s.phi("cos-theta");
  const double t_min = s.real("t_min", -4.0), t_max = s.real("t_max", 4.0), t_step = s.real("t_step", 0.25);
  const std::vector<double> lambdas = s.reals("lambdas", {0.02, 0.05, 0.1});
  const double confidence = s.real("confidence", 0.99);
  check_ns(ns);
  require_real(phi);
  if (!(t_step > 0.0) || t_max < t_min) throw ConfigError("invalid t grid");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("'confidence' must lie in (0, 1)");
  ctx.report.header = {"part", "n", "t", "lambda", "value", "reference", "lower", "upper", "chernoff"};
  const double dirichlet = dirichlet_norm(phi, make_sphere());
  const int steps = static_cast<int>(std::floor((t_max - t_min) / t_step + 1e-9));

  double worst = -std::numeric_limits<double>::infinity();
  int violations = 0, cells = 0;
  std::string first_violation;
  for (int n : ns) {
    const SphereLevel level(n);
    const Eigen::VectorXcd samples = phi.sample(level.grid);
    for (int j = 0; j <= steps; ++j) {
      const double t = t_min + j * t_step;
      // log E exp(t φ̃)
      const double value = fluctuation_log_mgf(*level.assembler, samples, -t).real();
      const double bound = (double(n) / (n + 1.0)) * t * t * dirichlet / 2.0;
      worst = std::max(worst, value - bound);
      ctx.row({"chernoff", i(n), d(t), "", d(value), d(bound), "", "", ""});
    }
    const double mean = centering_value(*level.assembler, samples, Centering::MeanOmega).real();
    const SampleBatch batch = sample_batch(SamplerId::ChainRule, level.basis, replicas, seed + std::uint64_t(n));
    std::vector<double> means;
    for (const Configuration& c : batch.configurations) means.push_back(linear_statistic(c, phi) / n);
    for (double lambda : lambdas) {
      const TailEstimate tail = empirical_tail(means, lambda, mean, confidence);
      const double bound = tail_bound(n, lambda, dirichlet);
      ++cells;
      if (tail.lower > bound) {
        if (!violations) first_violation = "N=" + std::to_string(n) + ", lambda=" + g(lambda) + ": estimate " +
                                           g(tail.estimate) + ", lower " + g(tail.lower) + " > bound " + g(bound);
        ++violations;
      }
      ctx.row({"monte-carlo", i(n), "", d(lambda), d(tail.estimate), d(bound), d(tail.lower), d(tail.upper),
               d(chernoff_tail_bound(n, lambda, dirichlet))});
    }
  }
  const bool chernoff_ok = worst <= 1e-8;
  std::string detail = "max log-MGF excess over the quadratic bound " + d(worst) + (chernoff_ok ? " (ok)" : " (FAIL)") +
                       "; Monte Carlo: " + std::to_string(violations) + " of " + std::to_string(cells) +
                       " (N, lambda) cells exceed the stated tail bound at the lower " +
                       fmt("%.0f", 100.0 * confidence) + "% limit";
  if (violations) detail += ", e.g. " + first_violation;
  ctx.criterion(12, chernoff_ok && violations == 0, detail);
}

const std::map<std::string, std::function<void(Context&)>>& runners() {
  static const std::map<std::string, std::function<void(Context&)>> table{
      {"bergman-decay", run_bergman_decay}, {"clt-check", run_clt},         {"mobius-identities", run_mobius},
      {"mt-check", run_mt_check},           {"sampler-agreement", run_sampler_agreement},
      {"szego-table", run_szego},           {"tail-check", run_tail},       {"variance-table", run_variance},
  };
  return table;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> list = [] {
    std::vector<ExperimentInfo> out;
    for (const auto& [id, def] : definitions()) out.push_back({id, def.description});
    return out;
  }();
  return list;
}

ExperimentConfig::ExperimentConfig(std::string experiment) : experiment_(std::move(experiment)) {
  definition_for(experiment_);
}

ExperimentConfig ExperimentConfig::parse(const std::string& experiment, std::istream& is) {
  ExperimentConfig c(experiment);
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    if (c.has(key)) throw ConfigError("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
    c.values_[key] = trim(t.substr(eq + 1));
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& experiment, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  return parse(experiment, is);
}

void ExperimentConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

void ExperimentConfig::validate() const {
  const ExperimentDef& def = definition_for(experiment_);
  for (const auto& [key, value] : values_) {
    if (key == "seed" || key == "replicas") continue;
    if (!def.keys.count(key)) throw ConfigError("unknown key '" + key + "' for experiment " + experiment_);
  }
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int ExperimentConfig::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const int v = std::stoi(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' must be an integer, got '" + it->second + "'");
}

std::uint64_t ExperimentConfig::get_seed(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    if (!it->second.empty() && it->second[0] != '-') {
      const std::uint64_t v = std::stoull(it->second, &used);
      if (used == it->second.size()) return v;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' must be a non-negative integer, got '" + it->second + "'");
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used == it->second.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' must be a finite number, got '" + it->second + "'");
}

std::vector<int> ExperimentConfig::get_int_list(const std::string& key, const std::vector<int>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  for (const std::string& item : split_list(it->second)) {
    ExperimentConfig one(experiment_);
    one.values_[key] = item;
    out.push_back(one.get_int(key, 0));
  }
  return out;
}

std::vector<double> ExperimentConfig::get_double_list(const std::string& key,
                                                      const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const std::string& item : split_list(it->second)) {
    ExperimentConfig one(experiment_);
    one.values_[key] = item;
    out.push_back(one.get_double(key, 0.0));
  }
  return out;
}

bool ExperimentReport::passed() const {
  if (failure || criteria.empty()) return false;
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed; });
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  report.experiment = config.experiment();
  report.version = DPPLAB_VERSION;
  report.csv_schema = "dpplab-" + config.experiment() + "/1";
  Context ctx{Settings(config), report};
  const auto start = std::chrono::steady_clock::now();
  try {
    runners().at(config.experiment())(ctx);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    report.failure = e.what();
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.config = ctx.settings.effective();
  for (int id : definition_for(config.experiment()).criteria) {
    const bool present = std::any_of(report.criteria.begin(), report.criteria.end(),
                                     [id](const CriterionResult& c) { return c.id == id; });
    if (!present)
      report.criteria.push_back({id, criterion_names().at(id), false,
                                 "not evaluated: " + report.failure.value_or("experiment stopped early")});
  }
  std::sort(report.criteria.begin(), report.criteria.end(),
            [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
  return report;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& os, const ExperimentReport& report) {
  os << "# schema: " << report.csv_schema << " version=" << report.version << '\n';
  for (std::size_t j = 0; j < report.header.size(); ++j) os << (j ? "," : "") << report.header[j];
  os << '\n';
  for (const auto& row : report.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << row[j];
    os << '\n';
  }
}

std::string report_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["experiment"] = report.experiment;
  j["version"] = report.version;
  j["config"] = report.config;
  j["csv"] = {{"file", report.experiment + ".csv"}, {"schema", report.csv_schema}, {"columns", report.header},
              {"rows", report.rows.size()}};
  nlohmann::json criteria = nlohmann::json::array();
  for (const CriterionResult& c : report.criteria)
    criteria.push_back({{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["criteria"] = criteria;
  j["failure"] = report.failure ? nlohmann::json(*report.failure) : nlohmann::json(nullptr);
  j["passed"] = report.passed();
  return j.dump(2) + "\n";
}

std::string timing_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["experiment"] = report.experiment;
  j["wall_seconds"] = report.wall_seconds;
  return j.dump(2) + "\n";
}

void write_outputs(const ExperimentReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto write = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ofstream os(fs::path(dir) / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    body(os);
  };
  write(report.experiment + ".csv", [&](std::ostream& os) { write_csv(os, report); });
  write("report.json", [&](std::ostream& os) { os << report_json(report); });
  write("timing.json", [&](std::ostream& os) { os << timing_json(report); });
}

std::string list_presets() {
  std::ostringstream os;
  os << "phi presets:\n";
  for (const PresetInfo& p : preset_catalog()) os << "  " << p.name << "  " << p.description << '\n';
  os << "experiments:\n";
  for (const ExperimentInfo& e : experiment_catalog()) os << "  " << e.id << "  " << e.description << '\n';
  return os.str();
}

}  // namespace dpplab
