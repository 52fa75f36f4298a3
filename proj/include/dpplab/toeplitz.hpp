#ifndef DPPLAB_TOEPLITZ_HPP
#define DPPLAB_TOEPLITZ_HPP

#include <Eigen/Core>

#include "dpplab/hilbert.hpp"
#include "dpplab/test_function.hpp"

namespace dpplab {

// Dirichlet form B(u, v) = (1/4π) ∫ ∇u·∇v dA, extended bilinearly (no
// conjugation) to complex functions, so that B(φ, φ) = Q(Re φ) - Q(Im φ) +
// 2i B(Re φ, Im φ). Conformally invariant: computed in the chart.

enum class DirichletPath { Auto, Spectral, Quadrature };

/// Spectral path: (1/4π) Σ l(l+1) a_lm b_lm over real orthonormal harmonics.
cdouble dirichlet_form(const HarmonicExpansion& u, const HarmonicExpansion& v);

/// Quadrature path on successively doubled grids starting at `resolution`.
/// Throws NumericalError if two consecutive grids differ by more than 1e-10
/// (relative) up to resolution 1024.
cdouble dirichlet_form(const TestFunction& u, const TestFunction& v, const SurfaceModel& model,
                       int resolution = 16);

/// ∥dφ∥² = B(φ, φ) for real φ. Auto uses the expansion when one is attached.
double dirichlet_norm(const TestFunction& phi, const SurfaceModel& model,
                      DirichletPath path = DirichletPath::Auto);

/// Bilinear B(φ, φ) for complex φ.
cdouble dirichlet_energy_bilinear(const TestFunction& phi, const SurfaceModel& model,
                                  DirichletPath path = DirichletPath::Auto);

/// ℰ(φ) = -∥dφ∥²/(2V) + ∫φ dν.
double energy(const TestFunction& phi, const SurfaceModel& model,
              DirichletPath path = DirichletPath::Auto);

/// log det T[e^{-φ}] and the matrix it came from.
struct ToeplitzMatrix {
  GramMatrix gram;
  cdouble log_det{0.0, 0.0};
  /// Number of accepted homotopy steps (complex symbols), 0 for real ones.
  int homotopy_steps = 0;
};

/// Assembles T[e^{-φ}] from φ sampled at the assembler's grid nodes. Real φ
/// uses a Cholesky factorization and throws NumericalError when the matrix
/// is not positive definite. Complex φ follows the branch of log det along
/// s ↦ T[e^{-sφ}], s ∈ [0, 1], with step halving.
ToeplitzMatrix toeplitz_matrix(const ToeplitzAssembler& assembler, const Eigen::VectorXcd& phi);

/// log E exp(-Σφ(x_i)) = log det T[e^{-φ}].
cdouble log_expectation(const ToeplitzAssembler& assembler, const Eigen::VectorXcd& phi);
double log_expectation_real(const ToeplitzAssembler& assembler, const Eigen::VectorXd& phi);

enum class Centering { MeanOmega, MeanProcess };

/// ∫φ dν (MeanOmega) or ∫φ B_k dν / N (MeanProcess).
cdouble centering_value(const ToeplitzAssembler& assembler, const Eigen::VectorXcd& phi,
                        Centering centering);

/// log E exp(-t Σ(φ(x_i) - c)) = log det T[e^{-tφ}] + t N c.
cdouble fluctuation_log_mgf(const ToeplitzAssembler& assembler, const Eigen::VectorXcd& phi, cdouble t,
                            Centering centering = Centering::MeanOmega);

/// Var Σφ(x_i) = Tr T[φ²] - Tr T[φ]² for real φ. Throws NumericalError if the
/// value is below -1e-10; tiny negative values are returned as 0.
double variance_exact(const ToeplitzAssembler& assembler, const Eigen::VectorXd& phi);

/// (1/(1 + (1-g)/N))·∥dφ∥²/2 - log E exp(-(Σφ(x_i) - N∫φdν)). Sphere only.
double mt_gap(const ToeplitzAssembler& assembler, const Eigen::VectorXd& phi, double dirichlet);

/// B(φ, φ)/2 - log E exp(-(Σφ(x_i) - N∫φdν)).
cdouble szego_defect(const ToeplitzAssembler& assembler, const Eigen::VectorXcd& phi,
                     cdouble dirichlet_bilinear);

/// Grid resolution used for Toeplitz symbols that are not polynomial:
/// basis.min_resolution() + margin.
int toeplitz_resolution(const SectionBasis& basis, int margin = 64);

}  // namespace dpplab

#endif  // DPPLAB_TOEPLITZ_HPP
