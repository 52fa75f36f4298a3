#include "dpplab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/QR>

#include "dpplab/error.hpp"

namespace dpplab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFlatCutoff = 1e-8;

void require_chart(cdouble w, double curvature) {
  if (curvature < 0.0 && !(1.0 + curvature * std::norm(w) > 0.0)) {
    throw std::invalid_argument("model kernel: point outside the chart 1 + R|w|^2 > 0");
  }
}

}  // namespace

double model_weight(cdouble w, double curvature) {
  const double s = std::norm(w);
  if (std::abs(curvature) < kFlatCutoff) return 2.0 * s;
  return 2.0 / curvature * std::log1p(curvature * s);
}

KernelEval global_kernel(const SectionBasis& basis) {
  KernelEval k;
  k.source_ = KernelEval::Source::BasisSum;
  k.basis_ = std::make_shared<const SectionBasis>(basis);
  k.level_ = basis.level();
  k.curvature_ = basis.model().curvature();
  return k;
}

KernelEval model_kernel(double curvature, int k) {
  if (k < 1) throw std::invalid_argument("model_kernel: k >= 1 required");
  KernelEval kernel;
  kernel.source_ = KernelEval::Source::ModelClosedForm;
  kernel.level_ = k;
  kernel.curvature_ = curvature;
  return kernel;
}

double KernelEval::chart_weight(const ChartPoint& p) const {
  if (source_ == Source::BasisSum) return basis_->level_weight(p);
  return level_ * model_weight(p.z, curvature_);
}

cdouble KernelEval::normalized(const ChartPoint& z, const ChartPoint& w) const {
  if (source_ == Source::BasisSum) {
    return (basis_->scaled_values(z).array() * basis_->scaled_values(w).conjugate().array()).sum();
  }
  require_chart(z.z, curvature_);
  require_chart(w.z, curvature_);
  const double k = level_;
  const double R = curvature_;
  const cdouble zw = z.z * std::conj(w.z);
  cdouble log_kernel;
  if (std::abs(R) < kFlatCutoff) {
    log_kernel = 2.0 * k * zw;
  } else {
    log_kernel = 2.0 * k / R * std::log(1.0 + R * zw);
  }
  const double half = 0.5 * (chart_weight(z) + chart_weight(w));
  return (k + 0.5 * R) * std::exp(log_kernel - half);
}

cdouble KernelEval::operator()(const ChartPoint& z, const ChartPoint& w) const {
  return normalized(z, w) * std::exp(0.5 * (chart_weight(z) + chart_weight(w)));
}

cdouble mobius_map(cdouble z, cdouble w, double curvature) {
  const cdouble den = 1.0 + curvature * std::conj(z) * w;
  if (std::abs(den) < 1e-300) throw std::domain_error("mobius_map: vanishing denominator");
  return (z - w) / den;
}

cdouble polarized_weight(cdouble z, cdouble w, double curvature) {
  if (std::abs(curvature) < kFlatCutoff) return 2.0 * z * w;
  if (!(std::abs(curvature * z * w) < 1.0)) {
    throw std::domain_error("polarized_weight: |R z w| < 1 required for the principal branch");
  }
  return 2.0 / curvature * std::log(1.0 + curvature * z * w);
}

double RelationResiduals::max() const {
  return std::max({inversion, polarization, transfer, shift});
}

RelationResiduals relation_residuals(cdouble z, cdouble w, double curvature) {
  const double R = curvature;
  const cdouble zeta = mobius_map(z, w, R);
  const auto phi = [R](cdouble p) { return model_weight(p, R); };
  const auto psi = [R](cdouble a, cdouble b) { return polarized_weight(a, b, R); };
  RelationResiduals r;
  r.inversion = std::abs(mobius_map(z, zeta, R) - w);
  r.polarization = std::abs(psi(std::conj(z), z) - phi(z));
  r.transfer = std::abs(psi(std::conj(z), w) + psi(z, std::conj(w)) - phi(w) - phi(z) + phi(zeta));
  r.shift = std::abs((psi(std::conj(z), w) - phi(w)) - (psi(z, std::conj(zeta)) - phi(zeta)));
  return r;
}

double local_tail_mass(int k, double radius, double curvature) {
  const double R = curvature;
  const double s = radius * radius;
  // e^{-kΦ} dd^cΦ = d/ds[-(1+Rs)^{-2k/R-1}/(k+R/2)] ds dθ/2π
  if (std::abs(R) < kFlatCutoff) return std::exp(-2.0 * k * s) / k;
  return std::pow(1.0 + R * s, -2.0 * k / R - 1.0) / (k + 0.5 * R);
}

double local_reproduce_error(const std::vector<cdouble>& coefficients, int k, double radius,
                             double curvature) {
  if (coefficients.empty()) throw std::invalid_argument("local_reproduce_error: empty polynomial");
  const double R = curvature;
  if (R < 0.0 && !(radius < 1.0 / std::sqrt(-R))) {
    throw std::invalid_argument("local_reproduce_error: radius outside the chart");
  }
  const int degree = static_cast<int>(coefficients.size()) - 1;
  const int n_azimuth = degree + 2;
  const double smax = radius * radius;
  const double k_eff = k + 0.5 * R;

  const auto disc_integral = [&](int n_radial) {
    Eigen::VectorXd x, wx;
    gauss_legendre(n_radial, x, wx);
    cdouble total(0.0, 0.0);
    for (int i = 0; i < n_radial; ++i) {
      const double s = 0.5 * smax * (x[i] + 1.0);
      const double one_rs = 1.0 + R * s;
      // e^{-kΦ} · 2(1+Rs)^{-2}: the density of e^{-kΦ}dd^cΦ in ds dθ/2π
      const double radial = std::abs(R) < kFlatCutoff ? 2.0 * std::exp(-2.0 * k * s)
                                                      : 2.0 * std::pow(one_rs, -2.0 * k / R - 2.0);
      cdouble ring(0.0, 0.0);
      for (int a = 0; a < n_azimuth; ++a) {
        const cdouble w = std::polar(std::sqrt(s), 2.0 * kPi * a / n_azimuth);
        cdouble f(0.0, 0.0);
        for (int p = degree; p >= 0; --p) f = f * w + coefficients[static_cast<std::size_t>(p)];
        ring += f;
      }
      total += 0.5 * smax * wx[i] * radial * ring / double(n_azimuth);
    }
    return total;
  };

  int n = 64;
  cdouble previous = disc_integral(n);
  for (; n <= 4096; n *= 2) {
    const cdouble current = disc_integral(2 * n);
    if (std::abs(current - previous) <= 1e-15 * std::max(1.0, std::abs(current))) {
      return std::abs(coefficients[0] - k_eff * current);
    }
    previous = current;
  }
  throw NumericalError("local_reproduce_error: radial quadrature did not converge");
}

DecayFit fit_decay(const std::vector<int>& ks, const std::vector<double>& errors) {
  if (ks.size() != errors.size()) throw std::invalid_argument("fit_decay: size mismatch");
  if (ks.size() < 4) throw std::invalid_argument("fit_decay: at least four k values required");
  for (double e : errors) {
    if (!(e > 1e-300)) throw NumericalError("fit_decay: error underflow in the fit window");
  }
  const auto n = static_cast<Eigen::Index>(ks.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = ks[static_cast<std::size_t>(i)];
    rhs[i] = std::log(errors[static_cast<std::size_t>(i)]);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  DecayFit fit;
  fit.ks = ks;
  fit.errors = errors;
  fit.intercept = coef[0];
  fit.rate = -coef[1];
  fit.residual = std::sqrt((design * coef - rhs).squaredNorm() / double(n));
  return fit;
}

double torus_lattice_rate(cdouble tau, double volume) {
  // Enumerate m + nτ; the shortest vector of a reduced basis has small
  // coefficients, a window of ±8 is ample for any τ in the upper half plane
  // that make_torus accepts after reduction.
  double best = std::numeric_limits<double>::infinity();
  const int window = 8 + static_cast<int>(std::ceil(std::abs(tau.real())));
  for (int n = -window; n <= window; ++n) {
    for (int m = -window; m <= window; ++m) {
      if (m == 0 && n == 0) continue;
      best = std::min(best, std::norm(double(m) + double(n) * tau));
    }
  }
  return kPi * volume * best / (2.0 * tau.imag());
}

double injectivity_rate_bound(double injectivity_radius, double volume, double curvature) {
  const double I = injectivity_radius;
  const double R = curvature;
  if (std::abs(R) < kFlatCutoff) return kPi * I * I / (2.0 * volume);
  if (R > 0.0) return 2.0 / (R * volume) * std::log(std::cosh(std::sqrt(kPi * R / 2.0) * I));
  return 2.0 / (R * volume) * std::log(std::cos(std::sqrt(-kPi * R / 2.0) * I));
}

DecayFit torus_bergman_error(cdouble tau, const std::vector<int>& ks, int truncation, double volume) {
  const SurfaceModel model = make_torus(tau, volume);
  std::vector<double> errors;
  errors.reserve(ks.size());
  for (int k : ks) {
    const SectionBasis raw = torus_theta_basis(model, k, truncation);
    const QuadGrid grid = quadrature_grid(model, raw.min_resolution());
    const SectionBasis basis = orthonormalize(raw, grid);
    const ToeplitzAssembler assembler(basis, grid);
    const Eigen::VectorXd b = assembler.bergman_function();
    errors.push_back((b.array() / double(basis.dimension()) - 1.0).abs().maxCoeff());
  }
  DecayFit fit = fit_decay(ks, errors);
  fit.oracle_rate = torus_lattice_rate(tau, volume);
  fit.bound_rate = injectivity_rate_bound(*injectivity_radius(model), volume);
  return fit;
}

}  // namespace dpplab
