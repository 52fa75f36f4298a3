#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include <Eigen/LU>

#include "dpplab/rng.hpp"
#include "dpplab/toeplitz.hpp"

using namespace dpplab;

namespace {

constexpr double kPi = std::numbers::pi;

struct SphereSetup {
  SurfaceModel model = make_sphere();
  SectionBasis basis;
  QuadGrid grid;
  std::unique_ptr<ToeplitzAssembler> assembler;

  explicit SphereSetup(int k, int margin = 64)
      : basis(sphere_basis(model, k)), grid(quadrature_grid(model, toeplitz_resolution(basis, margin))) {
    assembler = std::make_unique<ToeplitzAssembler>(basis, grid);
  }
  Eigen::VectorXd real_samples(const TestFunction& f) const { return f.sample(grid).real(); }
};

// ∫₋₁¹ e^{-tu} du and ∫₋₁¹ u e^{-tu} du in closed form
double i0(double t) { return t == 0.0 ? 2.0 : 2.0 * std::sinh(t) / t; }
double i1(double t) { return -2.0 * std::cosh(t) / t + 2.0 * std::sinh(t) / (t * t); }

}  // namespace

TEST_CASE("dirichlet norm: constants, cosθ, and the two paths") {
  const SurfaceModel sphere = make_sphere();
  const TestFunction c("const", [](const ChartPoint&) { return cdouble(3.0); });
  CHECK(dirichlet_norm(c, sphere) == doctest::Approx(0.0).scale(1.0));
  const TestFunction cos = make_preset("cos-theta");
  CHECK(dirichlet_norm(cos, sphere, DirichletPath::Spectral) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(dirichlet_norm(cos, sphere, DirichletPath::Quadrature) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const TestFunction f = make_preset("harmonic:8," + std::to_string(seed));
    const double spectral = dirichlet_norm(f, sphere, DirichletPath::Spectral);
    const double quad = dirichlet_norm(f, sphere, DirichletPath::Quadrature);
    CHECK(std::abs(spectral - quad) < 1e-9);
  }
  CHECK_THROWS_AS(dirichlet_norm(cos.scaled({0, 1}), sphere), std::invalid_argument);
  CHECK_THROWS_AS(dirichlet_norm(c, sphere, DirichletPath::Spectral), std::invalid_argument);
}

TEST_CASE("dirichlet norm on the torus") {
  // φ = cos(2πx): (1/4π) ∫ (2π)² sin²(2πx) dx dy over a cell of area Im τ
  const cdouble tau(0.0, 1.5);
  const SurfaceModel torus = make_torus(tau);
  const double oracle = (4.0 * kPi * kPi) * 0.5 * tau.imag() / (4.0 * kPi);
  CHECK(dirichlet_norm(make_preset("lattice-cos"), torus) == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("bilinear extension for complex functions") {
  const SurfaceModel sphere = make_sphere();
  const TestFunction u = make_preset("harmonic:3,5"), v = make_preset("harmonic:3,6");
  const double qu = dirichlet_norm(u, sphere), qv = dirichlet_norm(v, sphere);
  const cdouble buv = dirichlet_form(*u.harmonics(), *v.harmonics());
  HarmonicExpansion w = *u.harmonics();
  w.coefficients += cdouble(0.0, 1.0) * v.harmonics()->coefficients;
  const TestFunction phi = TestFunction::from_harmonics("u+iv", w);
  const cdouble q = dirichlet_energy_bilinear(phi, sphere);
  CHECK(std::abs(q - (qu - qv + cdouble(0.0, 2.0) * buv)) < 1e-13);
  CHECK(std::abs(dirichlet_energy_bilinear(phi, sphere, DirichletPath::Quadrature) - q) < 1e-9);
  // i·s·cosθ → -s²·(2/3)
  const TestFunction is = make_preset("cos-theta").scaled({0.0, 1.5});
  CHECK(std::abs(dirichlet_energy_bilinear(is, sphere) - cdouble(-1.5 * 1.5 * 2.0 / 3.0, 0.0)) < 1e-13);
}

TEST_CASE("energy functional") {
  const SurfaceModel sphere = make_sphere();
  const TestFunction c("const", [](const ChartPoint&) { return cdouble(0.7); },
                       [](const ChartPoint&) { return ChartGradient{}; });
  CHECK(energy(c, sphere) == doctest::Approx(0.7).epsilon(1e-14));
  const TestFunction cos = make_preset("cos-theta");
  CHECK(energy(cos, sphere) == doctest::Approx(-1.0 / 3.0).epsilon(1e-13));
  const TestFunction f = make_preset("harmonic:5,9");
  CHECK(std::abs(energy(f.shifted(2.25), sphere) - energy(f, sphere) - 2.25) < 1e-12);
}

TEST_CASE("log expectation: trivial symbols and the k = 1 Gram oracle") {
  SphereSetup s(6);
  const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(s.grid.size());
  CHECK(std::abs(log_expectation(*s.assembler, zero)) < 1e-13);
  const Eigen::VectorXcd c = Eigen::VectorXcd::Constant(s.grid.size(), 0.8);
  CHECK(std::abs(log_expectation(*s.assembler, c) - cdouble(-7 * 0.8, 0.0)) < 1e-12);

  SphereSetup one(1);
  const Eigen::VectorXd cos = one.real_samples(make_preset("cos-theta"));
  for (double t : {0.3, 1.0, 2.5, -1.7}) {
    const double a_plus = i0(t) + i1(t), a_minus = i0(t) - i1(t);
    const double oracle = std::log(0.25 * a_plus * a_minus);
    CHECK(log_expectation_real(*one.assembler, t * cos) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("scaling identity for random φ and c") {
  CounterRng rng(77);
  for (int k : {1, 7, 31}) {
    SphereSetup s(k);
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::VectorXd phi =
          s.real_samples(make_preset("harmonic:4," + std::to_string(100 + trial)));
      const double c = 4.0 * rng.uniform() - 2.0;
      const double lhs = log_expectation_real(*s.assembler, (phi.array() + c).matrix());
      const double rhs = log_expectation_real(*s.assembler, phi) - (k + 1) * c;
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("complex symbols follow a continuous branch") {
  SphereSetup s(8);
  const Eigen::VectorXd cos = s.real_samples(make_preset("cos-theta"));
  const Eigen::VectorXcd phi = cdouble(0.0, 3.0) * cos.cast<cdouble>();
  const ToeplitzMatrix t = toeplitz_matrix(*s.assembler, phi);
  CHECK(t.homotopy_steps >= 4);
  CHECK_FALSE(t.gram.hermitian);
  // cosθ is odd under the antipodal map, so E e^{-i s Σφ} is real
  CHECK(std::abs(std::exp(t.log_det).imag()) < 1e-12);
  // the branch starts at 0 and its value matches the principal log of det
  const cdouble principal = std::log(t.gram.entries.determinant());
  CHECK(std::abs(std::exp(t.log_det) - std::exp(principal)) < 1e-12);
  // real part is log of the modulus
  CHECK(t.log_det.real() == doctest::Approx(principal.real()).epsilon(1e-12));
}

TEST_CASE("fluctuation log-MGF") {
  SphereSetup s(10);
  const Eigen::VectorXcd phi = make_preset("harmonic:5,8").sample(s.grid);
  CHECK(std::abs(fluctuation_log_mgf(*s.assembler, phi, 0.0)) == 0.0);
  const double h = 1e-4;
  const cdouble d = (fluctuation_log_mgf(*s.assembler, phi, h, Centering::MeanProcess) -
                     fluctuation_log_mgf(*s.assembler, phi, -h, Centering::MeanProcess)) /
                    (2 * h);
  CHECK(std::abs(d) < 1e-8);
  for (double t : {-1.0, 0.5, 2.0}) {
    const cdouble a = fluctuation_log_mgf(*s.assembler, phi, t, Centering::MeanOmega);
    const cdouble b = fluctuation_log_mgf(*s.assembler, phi, t, Centering::MeanProcess);
    CHECK(std::abs(a - b) < 1e-10);
  }
}

TEST_CASE("exact variance") {
  SphereSetup s0(0);
  const TestFunction cos = make_preset("cos-theta");
  CHECK(variance_exact(*s0.assembler, s0.real_samples(cos)) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  SphereSetup s(12);
  CHECK(variance_exact(*s.assembler, Eigen::VectorXd::Constant(s.grid.size(), 2.0)) < 1e-13);
  const Eigen::VectorXd c = s.real_samples(cos);
  CHECK(variance_exact(*s.assembler, c) == doctest::Approx(2.0 / 3.0 * 13.0 / 14.0).epsilon(1e-12));
  // second difference of the log-MGF at 0
  const Eigen::VectorXd phi = s.real_samples(make_preset("harmonic:6,2"));
  const double h = 1e-3;
  const double l0 = log_expectation_real(*s.assembler, Eigen::VectorXd::Zero(phi.size()));
  const double lp = log_expectation_real(*s.assembler, h * phi);
  const double lm = log_expectation_real(*s.assembler, -h * phi);
  CHECK(std::abs((lp - 2 * l0 + lm) / (h * h) - variance_exact(*s.assembler, phi)) < 1e-6);
}

TEST_CASE("variance bound and convergence") {
  const TestFunction cos = make_preset("cos-theta");
  double previous = 0.0;
  for (int k : {7, 15, 31, 63}) {
    SphereSetup s(k);
    const double v = variance_exact(*s.assembler, s.real_samples(cos));
    CHECK(v <= 4.0 * (2.0 / 3.0) + 1e-8);
    CHECK(v > previous);
    previous = v;
  }
  CHECK(previous / (2.0 / 3.0) == doctest::Approx(64.0 / 65.0).epsilon(1e-10));
}

TEST_CASE("Moser–Trudinger gap") {
  const SurfaceModel sphere = make_sphere();
  SphereSetup s0(0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(s0.grid.size());
  CHECK(std::abs(mt_gap(*s0.assembler, zero, 0.0)) < 1e-14);
  // N = 1: Onofri, gap = ∥dφ∥²/4 - log(sinh a / a) for φ = a cosθ
  const TestFunction cos = make_preset("cos-theta");
  for (double a : {0.5, 2.0, 5.0}) {
    const double oracle = a * a * (2.0 / 3.0) / 4.0 - std::log(std::sinh(a) / a);
    CHECK(mt_gap(*s0.assembler, a * s0.real_samples(cos), a * a * 2.0 / 3.0) ==
          doctest::Approx(oracle).epsilon(1e-11));
  }
  for (int n : {2, 8, 32}) {
    SphereSetup s(n - 1);
    CHECK(mt_gap(*s.assembler, 2.0 * s.real_samples(cos), 4.0 * 2.0 / 3.0) >= -1e-8);
  }
  // random family
  for (int n : {2, 4, 8}) {
    SphereSetup s(n - 1);
    for (int seed = 1; seed <= 5; ++seed) {
      const TestFunction f = make_preset("harmonic:8," + std::to_string(seed));
      const Eigen::VectorXd phi = s.real_samples(f);
      const double d = dirichlet_norm(f, sphere);
      for (double a : {0.5, 4.0}) CHECK(mt_gap(*s.assembler, a * phi, a * a * d) >= -1e-8);
    }
  }
  const SurfaceModel torus = make_torus({0.0, 1.0});
  const SectionBasis tb = torus_theta_basis(torus, 4);
  const QuadGrid tg = quadrature_grid(torus, tb.min_resolution());
  const ToeplitzAssembler ta(tb, tg);
  CHECK_THROWS_AS(mt_gap(ta, Eigen::VectorXd::Zero(tg.size()), 0.0), std::invalid_argument);
}

TEST_CASE("convexity of t ↦ log E e^{-tφ}") {
  SphereSetup s(9);
  const Eigen::VectorXd phi = s.real_samples(make_preset("harmonic:8,11"));
  const double h = 0.25;
  for (double t = -3.0; t <= 3.0; t += 0.5) {
    const double a = log_expectation_real(*s.assembler, (t - h) * phi);
    const double b = log_expectation_real(*s.assembler, t * phi);
    const double c = log_expectation_real(*s.assembler, (t + h) * phi);
    CHECK(a - 2 * b + c >= -1e-9);
  }
}

TEST_CASE("Szegő defect") {
  const SurfaceModel sphere = make_sphere();
  SphereSetup s8(7), s64(63);
  const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(s8.grid.size());
  CHECK(std::abs(szego_defect(*s8.assembler, zero, 0.0)) < 1e-13);
  const TestFunction cos = make_preset("cos-theta");
  const cdouble q = dirichlet_energy_bilinear(cos, sphere);
  CHECK(q.real() / 2 == doctest::Approx(1.0 / 3.0));
  const double d8 = std::abs(szego_defect(*s8.assembler, cos.sample(s8.grid), q));
  const double d64 = std::abs(szego_defect(*s64.assembler, cos.sample(s64.grid), q));
  CHECK(d64 < d8);
  CHECK(d64 < 0.05);
  // imaginary multiple: the limit of log E e^{-φ̃} is -s²/3
  const TestFunction is = cos.scaled({0.0, 1.2});
  const cdouble qi = dirichlet_energy_bilinear(is, sphere);
  CHECK(qi.real() / 2 == doctest::Approx(-1.2 * 1.2 / 3.0));
  const double e8 = std::abs(szego_defect(*s8.assembler, is.sample(s8.grid), qi));
  const double e64 = std::abs(szego_defect(*s64.assembler, is.sample(s64.grid), qi));
  CHECK(e64 < e8);
  CHECK(e64 < 0.05);
}
