#include "dpplab/hilbert.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "dpplab/error.hpp"

namespace dpplab {

namespace {

constexpr double kPi = std::numbers::pi;
// log(1e18): theta terms below 1e-18 of the peak are dropped
constexpr double kThetaKeep = 41.446531673892822;
// log(1e15): a user truncation must not drop terms above 1e-15 of the peak
constexpr double kThetaTolerated = 34.538776394910684;

int integer_degree(const SurfaceModel& model, int k) {
  const double kv = k * model.volume();
  const double rounded = std::round(kv);
  if (std::abs(kv - rounded) > 1e-9) {
    throw std::invalid_argument("section basis: k·V must be an integer");
  }
  return static_cast<int>(rounded);
}

}  // namespace

int dimension_law(const SurfaceModel& model, int k) {
  return integer_degree(model, k) - (model.genus() - 1);
}

SectionBasis sphere_basis(const SurfaceModel& model, int k) {
  if (model.kind() != SurfaceKind::Sphere) throw std::invalid_argument("sphere_basis: sphere model required");
  if (k < 0) throw std::invalid_argument("sphere_basis: k >= 0 required");
  const int n = integer_degree(model, k);
  SectionBasis basis(model, SectionBasis::Family::SpherePolynomial, k, n + 1);
  basis.degree_ = n;
  basis.log_norms_.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    // c_j² = 1 / ∫ s^j (1+s)^{-n-2} ds = (n+1)! / (j! (n-j)!)
    basis.log_norms_[j] = 0.5 * (std::lgamma(n + 2.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0));
  }
  basis.transform_ = Eigen::MatrixXcd::Identity(n + 1, n + 1);
  return basis;
}

SectionBasis torus_theta_basis(const SurfaceModel& model, int k, int truncation) {
  if (model.kind() != SurfaceKind::FlatTorus) {
    throw std::invalid_argument("torus_theta_basis: flat torus model required");
  }
  if (k < 1) throw std::invalid_argument("torus_theta_basis: k >= 1 required");
  const int n = integer_degree(model, k);
  const double t2 = model.tau().imag();
  // The first dropped term sits at distance ≥ truncation + 1/2 from the
  // Gaussian centre, with relative size exp(-π n Im τ (T + 1/2)²).
  const auto dropped_log = [&](int trunc) {
    const double d = trunc + 0.5;
    return kPi * n * t2 * d * d;
  };
  if (truncation <= 0) {
    truncation = 1;
    while (dropped_log(truncation) < kThetaKeep) ++truncation;
  } else if (dropped_log(truncation) - std::log(2.0) < kThetaTolerated) {
    throw std::invalid_argument("torus_theta_basis: truncation too small, dropped lattice terms exceed 1e-15");
  }
  SectionBasis basis(model, SectionBasis::Family::TorusTheta, k, n);
  basis.degree_ = n;
  basis.truncation_ = truncation;
  // ∫ |θ_j|² e^{-kΦ} dν = (2 n Im τ)^{-1/2}
  basis.log_norms_ = Eigen::VectorXd::Constant(n, 0.25 * std::log(2.0 * n * t2));
  basis.transform_ = Eigen::MatrixXcd::Identity(n, n);
  return basis;
}

Eigen::VectorXcd SectionBasis::raw_scaled_values(const ChartPoint& p) const {
  Eigen::VectorXcd out(dimension_);
  switch (family_) {
    case Family::SpherePolynomial: {
      const int n = degree_;
      const double r2 = std::norm(p.z);
      const double log_r = 0.5 * std::log(r2);
      const double arg = std::arg(p.z);
      const double log_w = -0.5 * n * std::log1p(r2);
      for (int j = 0; j <= n; ++j) {
        // secondary chart (w = 1/z): c_j w^{n-j}, up to a gauge phase common to all j
        const int power = p.chart == Chart::Primary ? j : n - j;
        if (r2 == 0.0) {
          out[j] = power == 0 ? cdouble(std::exp(log_norms_[j] + log_w)) : cdouble(0.0);
        } else {
          out[j] = std::polar(std::exp(log_norms_[j] + power * log_r + log_w), power * arg);
        }
      }
      break;
    }
    case Family::TorusTheta: {
      const int n = degree_;
      const cdouble tau = model_.tau();
      const double t1 = tau.real(), t2 = tau.imag();
      const double x = p.z.real(), y = p.z.imag();
      const double c = std::exp(log_norms_[0]);
      for (int j = 0; j < n; ++j) {
        const double shift = double(j) / n;
        const long centre = std::lround(-y / t2 - shift);
        cdouble acc(0.0, 0.0);
        for (long m = centre - truncation_; m <= centre + truncation_; ++m) {
          const double a = double(m) + shift;
          const double d = y / t2 + a;
          const double re = -kPi * n * t2 * d * d;
          const double im = kPi * n * (t1 * a * a + 2.0 * a * x);
          acc += std::polar(std::exp(re), im);
        }
        out[j] = c * acc;
      }
      break;
    }
  }
  return out;
}

Eigen::VectorXcd SectionBasis::scaled_values(const ChartPoint& p) const {
  return transform_ * raw_scaled_values(p);
}

cdouble SectionBasis::value(int j, const ChartPoint& p) const {
  if (j < 0 || j >= dimension_) throw std::out_of_range("SectionBasis::value: index");
  return scaled_values(p)[j] * std::exp(0.5 * level_weight(p));
}

Eigen::MatrixXcd SectionBasis::sample(const QuadGrid& grid) const {
  Eigen::MatrixXcd out(grid.size(), dimension_);
  for (Eigen::Index m = 0; m < grid.size(); ++m) {
    out.row(m) = scaled_values(grid.nodes[static_cast<std::size_t>(m)]).transpose();
  }
  return out;
}

int SectionBasis::min_resolution() const {
  switch (family_) {
    case Family::SpherePolynomial:
      return degree_ + 2;
    case Family::TorusTheta:
      return std::max(24, 3 * degree_ + 8);
  }
  return 1;
}

ToeplitzAssembler::ToeplitzAssembler(const SectionBasis& basis, const QuadGrid& grid)
    : basis_(&basis), grid_(&grid) {
  if (grid.resolution < basis.min_resolution()) {
    throw std::invalid_argument("Toeplitz assembly: grid resolution " + std::to_string(grid.resolution) +
                                " below the sufficiency bound " + std::to_string(basis.min_resolution()));
  }
  samples_ = basis.sample(grid);
}

GramMatrix gram(const SectionBasis& basis, const Eigen::VectorXcd& phi, const QuadGrid& grid,
                std::string symbol) {
  if (phi.size() != grid.size()) throw std::invalid_argument("gram: field size does not match grid");
  const ToeplitzAssembler assembler(basis, grid);
  GramMatrix g;
  g.entries = assembler.assemble((-phi.array()).exp().matrix());
  g.symbol = std::move(symbol);
  g.hermitian = phi.imag().cwiseAbs().maxCoeff() == 0.0;
  return g;
}

SectionBasis orthonormalize(const SectionBasis& basis, const QuadGrid& grid) {
  const ToeplitzAssembler assembler(basis, grid);
  const Eigen::MatrixXcd g = assembler.assemble(Eigen::VectorXd::Ones(grid.size()));
  const Eigen::LLT<Eigen::MatrixXcd> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalError("orthonormalize: Gram matrix not positive definite");
  const Eigen::VectorXd pivots = llt.matrixLLT().diagonal().real();
  if (pivots.minCoeff() < 1e-12 * pivots.maxCoeff()) {
    throw NumericalError("orthonormalize: Gram matrix numerically singular");
  }
  // Gram = L Lᴴ with G_ij = ⟨f_i, f_j⟩, so L⁻¹ f is orthonormal.
  const Eigen::MatrixXcd l_inv =
      llt.matrixL().solve(Eigen::MatrixXcd::Identity(basis.dimension(), basis.dimension()));
  SectionBasis out = basis;
  out.transform_ = l_inv * basis.transform_;
  return out;
}

}  // namespace dpplab
