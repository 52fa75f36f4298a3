#ifndef DPPLAB_BERGMAN_HPP
#define DPPLAB_BERGMAN_HPP

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "dpplab/hilbert.hpp"
#include "dpplab/surface.hpp"

namespace dpplab {

/// Reproducing kernel K(z, w), holomorphic in z and anti-holomorphic in w.
///
/// BasisSum kernels are built from an orthonormal SectionBasis,
/// K(z,w) = Σ f_j(z) conj(f_j(w)). ModelClosedForm kernels are the local
/// constant-curvature kernels (k + R/2)(1 + R z w̄)^{2k/R} for the chart
/// weight Φ(w) = (2/R) log(1 + R|w|²), with the R → 0 limit k·e^{2k z w̄}.
class KernelEval {
 public:
  enum class Source { BasisSum, ModelClosedForm };

  Source source() const { return source_; }
  int level() const { return level_; }
  double curvature() const { return curvature_; }

  /// K(z, w) in the trivialization. May overflow for large k far from the
  /// chart origin; prefer normalized().
  cdouble operator()(const ChartPoint& z, const ChartPoint& w) const;

  /// K(z, w) e^{-kΦ(z)/2 - kΦ(w)/2}; its modulus is the point-wise norm.
  cdouble normalized(const ChartPoint& z, const ChartPoint& w) const;

  /// B(x) = ‖K(x, x)‖.
  double diagonal_norm(const ChartPoint& x) const { return normalized(x, x).real(); }

  friend KernelEval global_kernel(const SectionBasis& basis);
  friend KernelEval model_kernel(double curvature, int k);

 private:
  KernelEval() = default;
  double chart_weight(const ChartPoint& p) const;

  Source source_ = Source::BasisSum;
  std::shared_ptr<const SectionBasis> basis_;
  int level_ = 0;
  double curvature_ = 0.0;
};

KernelEval global_kernel(const SectionBasis& basis);

/// Throws std::invalid_argument for evaluation outside 1 + R|w|² > 0.
KernelEval model_kernel(double curvature, int k);

/// Model chart weight Φ(w) = (2/R) log(1 + R|w|²), 2|w|² at R = 0.
double model_weight(cdouble w, double curvature);

/// Möbius map F_z(w) = (z - w)/(1 + R z̄ w). It is an involution: F_z(F_z(w)) = w.
/// Throws std::domain_error when the denominator vanishes.
cdouble mobius_map(cdouble z, cdouble w, double curvature);

/// Polarization ψ(z, w) = (2/R) log(1 + R z w) (principal branch), so that
/// ψ(z̄, z) = Φ(z). Throws std::domain_error unless |R z w| < 1.
cdouble polarized_weight(cdouble z, cdouble w, double curvature);

struct RelationResiduals {
  double inversion = 0.0;      // |F_z(F_z(w)) - w|
  double polarization = 0.0;   // |ψ(z̄, z) - Φ(z)|
  double transfer = 0.0;       // ψ(z̄,w) + ψ(z,w̄) - Φ(w) - Φ(z) = -Φ(ζ)
  double shift = 0.0;          // ψ(z̄,w) - Φ(w) = ψ(z,ζ̄) - Φ(ζ)
  double max() const;
};

RelationResiduals relation_residuals(cdouble z, cdouble w, double curvature);

/// Absolute error |f(0) - (k + R/2) ∫_{|w|<ε} f e^{-kΦ} dd^cΦ| for a
/// polynomial f (coefficients in increasing degree), computed with a
/// Gauss–Legendre rule in s = |w|² and a uniform azimuthal rule. The radial
/// rule is doubled until stable; NumericalError if it never settles.
double local_reproduce_error(const std::vector<cdouble>& coefficients, int k, double radius,
                             double curvature);

/// Closed-form mass of e^{-kΦ} dd^cΦ outside |w| < ε (to the chart boundary).
double local_tail_mass(int k, double radius, double curvature);

struct DecayFit {
  std::vector<int> ks;
  std::vector<double> errors;
  double rate = 0.0;      // δ̂ = -slope of log(error) against k
  double intercept = 0.0;
  double residual = 0.0;  // RMS residual of the log-linear fit
  /// Filled by torus_bergman_error: leading lattice-sum exponent and the
  /// R → 0 limit πI²/(2V) of the injectivity-radius formula.
  double oracle_rate = 0.0;
  double bound_rate = 0.0;
};

/// Least-squares fit of log(error) = a - δ̂ k. Needs at least four points
/// with errors above 1e-300.
DecayFit fit_decay(const std::vector<int>& ks, const std::vector<double>& errors);

/// sup over a grid of |B_k/N_k - 1| for the theta basis on the torus, fitted
/// over ks.
DecayFit torus_bergman_error(cdouble tau, const std::vector<int>& ks, int truncation = 0,
                             double volume = 1.0);

/// min over nonzero lattice vectors λ of π V |λ|² / (2 Im τ): the decay exponent
/// of the first periodization correction to the flat Bergman function.
double torus_lattice_rate(cdouble tau, double volume = 1.0);

/// (2/(RV)) log cosh(sqrt(πR/2) I) continued to R → 0, i.e. πI²/(2V).
double injectivity_rate_bound(double injectivity_radius, double volume, double curvature = 0.0);

}  // namespace dpplab

#endif  // DPPLAB_BERGMAN_HPP
