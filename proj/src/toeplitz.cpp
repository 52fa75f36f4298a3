#include "dpplab/toeplitz.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dpplab/error.hpp"
#include "dpplab/linalg.hpp"

namespace dpplab {

namespace {

constexpr double kPi = std::numbers::pi;

cdouble dirichlet_on_grid(const TestFunction& u, const TestFunction& v, const SurfaceModel& model,
                          const QuadGrid& grid) {
  cdouble sum(0.0, 0.0);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const ChartPoint& p = grid.nodes[static_cast<std::size_t>(i)];
    const ChartGradient gu = u.gradient(p);
    const ChartGradient gv = v.gradient(p);
    sum += grid.weights[i] * model.chart_area_density(p) * (gu.dx * gv.dx + gu.dy * gv.dy);
  }
  return sum / (4.0 * kPi * grid.weights.sum());
}

bool all_real(const Eigen::VectorXcd& v) { return v.imag().cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

cdouble dirichlet_form(const HarmonicExpansion& u, const HarmonicExpansion& v) {
  const int l_max = std::min(u.l_max, v.l_max);
  cdouble sum(0.0, 0.0);
  for (int l = 1; l <= l_max; ++l) {
    for (int m = -l; m <= l; ++m) {
      const Eigen::Index i = HarmonicExpansion::index(l, m);
      sum += double(l) * (l + 1) * u.coefficients[i] * v.coefficients[i];
    }
  }
  return sum / (4.0 * kPi);
}

cdouble dirichlet_form(const TestFunction& u, const TestFunction& v, const SurfaceModel& model,
                       int resolution) {
  cdouble previous = dirichlet_on_grid(u, v, model, quadrature_grid(model, resolution));
  for (int n = 2 * resolution; n <= 1024; n *= 2) {
    const cdouble current = dirichlet_on_grid(u, v, model, quadrature_grid(model, n));
    if (std::abs(current - previous) <= 1e-10 * std::max(1.0, std::abs(current))) return current;
    previous = current;
  }
  throw NumericalError("dirichlet_form: quadrature did not converge under grid doubling");
}

cdouble dirichlet_energy_bilinear(const TestFunction& phi, const SurfaceModel& model, DirichletPath path) {
  const bool spectral = path == DirichletPath::Spectral ||
                        (path == DirichletPath::Auto && phi.harmonics().has_value() &&
                         model.kind() == SurfaceKind::Sphere);
  if (spectral) {
    if (!phi.harmonics()) throw std::invalid_argument("dirichlet_norm: no harmonic expansion attached");
    if (model.kind() != SurfaceKind::Sphere) {
      throw std::invalid_argument("dirichlet_norm: harmonic expansions live on the sphere");
    }
    return dirichlet_form(*phi.harmonics(), *phi.harmonics());
  }
  return dirichlet_form(phi, phi, model);
}

double dirichlet_norm(const TestFunction& phi, const SurfaceModel& model, DirichletPath path) {
  if (!phi.is_real()) throw std::invalid_argument("dirichlet_norm: real test function required");
  return dirichlet_energy_bilinear(phi, model, path).real();
}

double energy(const TestFunction& phi, const SurfaceModel& model, DirichletPath path) {
  const double d = dirichlet_norm(phi, model, path);
  int resolution = 32;
  if (phi.harmonics()) resolution = std::max(resolution, phi.harmonics()->l_max + 2);
  const QuadGrid grid = quadrature_grid(model, resolution);
  const double mean = integrate(grid, model.volume(), phi.sample(grid).real().array());
  return -d / (2.0 * model.volume()) + mean;
}

ToeplitzMatrix toeplitz_matrix(const ToeplitzAssembler& assembler, const Eigen::VectorXcd& phi) {
  if (phi.size() != assembler.grid().size()) throw std::invalid_argument("toeplitz_matrix: sample size mismatch");
  ToeplitzMatrix out;
  if (all_real(phi)) {
    const Eigen::VectorXd symbol = (-phi.real().array()).exp();
    out.gram = {assembler.assemble(symbol), "exp(-phi)", true};
    out.log_det = log_det_hpd(out.gram.entries);
    return out;
  }

  const auto matrix_at = [&](double s) { return assembler.assemble((-s * phi.array()).exp().matrix()); };
  cdouble current = log_det_hpd(assembler.assemble(Eigen::VectorXd::Ones(phi.size())));
  double s = 0.0;
  double h = 0.125;
  constexpr double kMaxJump = 0.5;
  while (s < 1.0) {
    const double next = std::min(1.0, s + h);
    cdouble candidate = log_det_lu(matrix_at(next));
    const double turns = std::round((candidate.imag() - current.imag()) / (2.0 * kPi));
    candidate -= cdouble(0.0, 2.0 * kPi * turns);
    const double jump = std::abs(candidate.imag() - current.imag());
    if (jump > kMaxJump) {
      h *= 0.5;
      if (h < 1e-6) throw NumericalError("toeplitz_matrix: log-determinant branch could not be followed");
      continue;
    }
    s = next;
    current = candidate;
    ++out.homotopy_steps;
    if (jump < 0.1) h = std::min(2.0 * h, 0.25);
  }
  out.gram = {matrix_at(1.0), "exp(-phi)", false};
  out.log_det = current;
  return out;
}

cdouble log_expectation(const ToeplitzAssembler& assembler, const Eigen::VectorXcd& phi) {
  return toeplitz_matrix(assembler, phi).log_det;
}

double log_expectation_real(const ToeplitzAssembler& assembler, const Eigen::VectorXd& phi) {
  const Eigen::VectorXd symbol = (-phi.array()).exp();
  return log_det_hpd(assembler.assemble(symbol));
}

cdouble centering_value(const ToeplitzAssembler& assembler, const Eigen::VectorXcd& phi, Centering centering) {
  const QuadGrid& grid = assembler.grid();
  const double total = grid.weights.sum();
  if (centering == Centering::MeanOmega) {
    return grid.weights.cast<cdouble>().dot(phi) / total;
  }
  const Eigen::VectorXd b = assembler.bergman_function();
  const double n = assembler.basis().dimension();
  return (grid.weights.array() * b.array()).matrix().cast<cdouble>().dot(phi) / (total * n);
}

cdouble fluctuation_log_mgf(const ToeplitzAssembler& assembler, const Eigen::VectorXcd& phi, cdouble t,
                            Centering centering) {
  if (t == cdouble(0.0, 0.0)) return {0.0, 0.0};
  const double n = assembler.basis().dimension();
  const cdouble c = centering_value(assembler, phi, centering);
  const Eigen::VectorXcd scaled = t * phi;
  return log_expectation(assembler, scaled) + t * n * c;
}

double variance_exact(const ToeplitzAssembler& assembler, const Eigen::VectorXd& phi) {
  const Eigen::MatrixXcd t1 = assembler.assemble(phi);
  const Eigen::MatrixXcd t2 = assembler.assemble(phi.array().square().matrix());
  const double v = t2.trace().real() - t1.squaredNorm();
  if (v < -1e-10) throw NumericalError("variance_exact: negative variance, Toeplitz assembly is inaccurate");
  return std::max(v, 0.0);
}

double mt_gap(const ToeplitzAssembler& assembler, const Eigen::VectorXd& phi, double dirichlet) {
  const SurfaceModel& model = assembler.basis().model();
  if (model.kind() != SurfaceKind::Sphere) throw std::invalid_argument("mt_gap: sphere model required");
  const double n = assembler.basis().dimension();
  const double factor = 1.0 / (1.0 + (1.0 - model.genus()) / n);
  const double lmgf = fluctuation_log_mgf(assembler, phi.cast<cdouble>(), 1.0, Centering::MeanOmega).real();
  return factor * 0.5 * dirichlet - lmgf;
}

cdouble szego_defect(const ToeplitzAssembler& assembler, const Eigen::VectorXcd& phi, cdouble dirichlet_bilinear) {
  return 0.5 * dirichlet_bilinear - fluctuation_log_mgf(assembler, phi, 1.0, Centering::MeanOmega);
}

int toeplitz_resolution(const SectionBasis& basis, int margin) { return basis.min_resolution() + margin; }

}  // namespace dpplab
