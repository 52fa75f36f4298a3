#ifndef DPPLAB_HILBERT_HPP
#define DPPLAB_HILBERT_HPP

#include <string>

#include <Eigen/Core>

#include "dpplab/surface.hpp"

namespace dpplab {

/// Orthonormal basis of H⁰(X, kL) for ν = ω/V and the weight e^{-kΦ}.
///
/// Sections are represented by their trivialized holomorphic functions f_j.
/// Most consumers only need the unitarily-scaled values f_j(z)e^{-kΦ(z)/2},
/// whose moduli are the point-wise norms and which stay finite for large k.
class SectionBasis {
 public:
  enum class Family { SpherePolynomial, TorusTheta };

  const SurfaceModel& model() const { return model_; }
  Family family() const { return family_; }
  int level() const { return level_; }
  int dimension() const { return dimension_; }
  /// Number of lattice translates kept on each side of the dominant one (torus).
  int truncation() const { return truncation_; }

  /// (f_j(z) e^{-kΦ(z)/2})_j for all basis indices.
  Eigen::VectorXcd scaled_values(const ChartPoint& p) const;
  /// Trivialized f_j(z). Overflows for large k away from the chart origin;
  /// prefer scaled_values.
  cdouble value(int j, const ChartPoint& p) const;
  /// kΦ(z).
  double level_weight(const ChartPoint& p) const { return level_ * model_.weight(p); }

  /// Rows are scaled_values at the grid nodes (M × N).
  Eigen::MatrixXcd sample(const QuadGrid& grid) const;

  /// Smallest grid resolution at which products of two basis elements are
  /// integrated exactly (sphere) or to spectral accuracy (torus).
  int min_resolution() const;

  /// Change of basis applied on top of the analytic family: f = M · f_raw.
  const Eigen::MatrixXcd& transform() const { return transform_; }

  friend SectionBasis sphere_basis(const SurfaceModel&, int);
  friend SectionBasis torus_theta_basis(const SurfaceModel&, int, int);
  friend SectionBasis orthonormalize(const SectionBasis&, const QuadGrid&);

 private:
  SectionBasis(SurfaceModel model, Family family, int level, int dimension)
      : model_(model), family_(family), level_(level), dimension_(dimension) {}

  Eigen::VectorXcd raw_scaled_values(const ChartPoint& p) const;

  SurfaceModel model_;
  Family family_;
  int level_;
  int dimension_;
  int degree_ = 0;  // kV
  int truncation_ = 0;
  Eigen::VectorXd log_norms_;  // log of the analytic normalizers
  Eigen::MatrixXcd transform_;
};

/// Polynomials c_j z^j, j = 0..kV, with c_j² = (kV+1)·C(kV, j).
SectionBasis sphere_basis(const SurfaceModel& model, int k);

/// Level-kV theta functions with characteristics j/(kV). truncation <= 0
/// selects the smallest truncation keeping every term ≥ 1e-18 of the peak.
/// Throws std::invalid_argument when a given truncation drops terms above
/// 1e-15 of the peak.
SectionBasis torus_theta_basis(const SurfaceModel& model, int k, int truncation = 0);

/// N = kV − (g − 1).
int dimension_law(const SurfaceModel& model, int k);

struct GramMatrix {
  Eigen::MatrixXcd entries;
  std::string symbol;
  bool hermitian = true;
};

/// Assembles Toeplitz matrices T[f]_{ij} = ∫ f ψ_i conj(ψ_j) dν for many
/// symbols on one grid. The basis samples are computed once.
class ToeplitzAssembler {
 public:
  ToeplitzAssembler(const SectionBasis& basis, const QuadGrid& grid);

  const SectionBasis& basis() const { return *basis_; }
  const QuadGrid& grid() const { return *grid_; }
  /// Scaled basis values at the nodes (M × N).
  const Eigen::MatrixXcd& samples() const { return samples_; }

  /// T[f] for symbol values f sampled at the grid nodes.
  template <typename Derived>
  Eigen::MatrixXcd assemble(const Eigen::MatrixBase<Derived>& symbol) const {
    const Eigen::VectorXcd w =
        (grid_->weights.cast<cdouble>().array() * symbol.template cast<cdouble>().array()) /
        grid_->weights.sum();
    return samples_.transpose() * (w.asDiagonal() * samples_.conjugate());
  }

  /// Σ_j |ψ_j|² at every node (the Bergman function B_k).
  Eigen::VectorXd bergman_function() const { return samples_.rowwise().squaredNorm(); }

 private:
  const SectionBasis* basis_;
  const QuadGrid* grid_;
  Eigen::MatrixXcd samples_;
};

/// Gram matrix ⟨e^{-φ}ψ_i, ψ_j⟩ for φ sampled at the grid nodes. Real φ gives
/// a Hermitian matrix. Throws std::invalid_argument if the grid resolution is
/// below basis.min_resolution().
GramMatrix gram(const SectionBasis& basis, const Eigen::VectorXcd& phi, const QuadGrid& grid,
                std::string symbol = "exp(-phi)");

/// Re-orthonormalize with respect to the grid measure (Cholesky of the Gram
/// matrix). Throws NumericalError for a numerically singular Gram matrix.
SectionBasis orthonormalize(const SectionBasis& basis, const QuadGrid& grid);

}  // namespace dpplab

#endif  // DPPLAB_HILBERT_HPP
