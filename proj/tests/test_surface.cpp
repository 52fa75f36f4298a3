#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "dpplab/rng.hpp"
#include "dpplab/surface.hpp"

using namespace dpplab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("gauss_legendre weights sum to two and integrate monomials") {
  for (int n : {1, 2, 3, 7, 8, 31, 64}) {
    Eigen::VectorXd x, w;
    gauss_legendre(n, x, w);
    CHECK(w.sum() == doctest::Approx(2.0).epsilon(1e-14));
    for (int i = 1; i < n; ++i) CHECK(x[i] > x[i - 1]);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      const double oracle = p % 2 == 0 ? 2.0 / (p + 1) : 0.0;
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += w[i] * std::pow(x[i], p);
      CHECK(std::abs(q - oracle) < 1e-13);
    }
  }
}

TEST_CASE("sphere grid is a probability rule exact for low degree") {
  const SurfaceModel sphere = make_sphere();
  const QuadGrid grid = quadrature_grid(sphere, 10);
  CHECK(grid.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(grid.exact_degree == 19);
  // ∫ x₃² dν = 1/3, ∫ x₁² x₂² dν = 1/15 on the unit sphere
  Eigen::VectorXd a(grid.size()), b(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Eigen::Vector3d x = sphere_embed(grid.nodes[static_cast<std::size_t>(i)]);
    CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-14));
    a[i] = x[2] * x[2];
    b[i] = x[0] * x[0] * x[1] * x[1];
  }
  CHECK(integrate(grid, 1.0, a.array()) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(integrate(grid, 1.0, b.array()) == doctest::Approx(1.0 / 15.0).epsilon(1e-14));
}

TEST_CASE("sphere grid weights match the chart density") {
  // Total ν-mass of the cap |z| < 1 (southern hemisphere) is 1/2.
  const SurfaceModel sphere = make_sphere(3.0);
  const QuadGrid grid = quadrature_grid(sphere, 12);
  CHECK(grid.weights.sum() == doctest::Approx(3.0));
  double south = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (sphere_cos_theta(grid.nodes[static_cast<std::size_t>(i)]) > 0.0) south += grid.weights[i];
  }
  CHECK(south / 3.0 == doctest::Approx(0.5));
}

TEST_CASE("torus and hyperbolic grids") {
  const SurfaceModel torus = make_torus({0.5, 1.2}, 2.0);
  const QuadGrid tg = quadrature_grid(torus, 16);
  CHECK(tg.size() == 256);
  CHECK(tg.weights.sum() == doctest::Approx(2.0));

  // ω-mass of the disc |w| < r is 2r²/(1 + R r²) for Φ = (2/R)log(1+R|w|²)
  const double R = -2.0, r = 0.5;
  const SurfaceModel disc = make_hyperbolic_chart(R, r);
  const QuadGrid hg = quadrature_grid(disc, 20);
  CHECK(hg.weights.sum() == doctest::Approx(2.0 * r * r / (1.0 + R * r * r)).epsilon(1e-13));
  CHECK_THROWS_AS(make_hyperbolic_chart(R, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(make_hyperbolic_chart(1.0, 0.1), std::invalid_argument);
}

TEST_CASE("grid csv has a header and one row per node") {
  const QuadGrid grid = quadrature_grid(make_sphere(), 3);
  std::ostringstream os;
  write_grid_csv(os, grid);
  const std::string text = os.str();
  CHECK(text.rfind("re_z,im_z,weight\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == grid.size() + 1);
}

TEST_CASE("sphere embedding conventions") {
  CHECK((sphere_embed({0.0, Chart::Primary}) - Eigen::Vector3d(0, 0, -1)).norm() < 1e-15);
  CHECK((sphere_embed({0.0, Chart::Secondary}) - Eigen::Vector3d(0, 0, 1)).norm() < 1e-15);
  CHECK(sphere_cos_theta({0.0, Chart::Primary}) == doctest::Approx(1.0));
  CHECK(sphere_cos_theta({1.0, Chart::Primary}) == doctest::Approx(0.0));

  CounterRng rng(11);
  for (int i = 0; i < 200; ++i) {
    const cdouble z(3.0 * rng.normal(), 3.0 * rng.normal());
    const ChartPoint p{z, Chart::Primary};
    const ChartPoint q{1.0 / z, Chart::Secondary};
    CHECK((sphere_embed(p) - sphere_embed(q)).norm() < 1e-13);
    CHECK(sphere_cos_theta(p) == doctest::Approx(sphere_cos_theta(q)));
    CHECK(std::cos(sphere_azimuth(p) - sphere_azimuth(q)) == doctest::Approx(1.0));
    const Eigen::Vector3d x = sphere_embed(p);
    CHECK((sphere_embed(sphere_unembed(x)) - x).norm() < 1e-13);
    CHECK(sphere_cos_theta(p) == doctest::Approx(-x[2]).epsilon(1e-13));
  }
}

TEST_CASE("chordal distance is half the Euclidean distance") {
  CHECK(chordal_distance({0.0, Chart::Primary}, {0.0, Chart::Secondary}) == doctest::Approx(1.0));
  CounterRng rng(5);
  for (int i = 0; i < 100; ++i) {
    const ChartPoint a{{rng.normal(), rng.normal()}, Chart::Primary};
    const ChartPoint b{{rng.normal(), rng.normal()}, i % 2 ? Chart::Primary : Chart::Secondary};
    CHECK(chordal_distance(a, b) == doctest::Approx(0.5 * (sphere_embed(a) - sphere_embed(b)).norm()));
  }
}

TEST_CASE("lattice geometry") {
  CHECK(shortest_lattice_vector({0.0, 1.0}) == doctest::Approx(1.0));
  CHECK(shortest_lattice_vector({0.0, 3.0}) == doctest::Approx(1.0));
  CHECK(shortest_lattice_vector({0.5, std::sqrt(3.0) / 2}) == doctest::Approx(1.0));
  // τ = 0.1 + 0.3i: brute-force enumeration oracle
  const cdouble tau(0.1, 0.3);
  double best = 1e300;
  for (int m = -20; m <= 20; ++m)
    for (int n = -20; n <= 20; ++n)
      if (m || n) best = std::min(best, std::abs(double(m) + double(n) * tau));
  CHECK(shortest_lattice_vector(tau) == doctest::Approx(best).epsilon(1e-14));
  CHECK(*injectivity_radius(make_torus({0.0, 1.0})) == doctest::Approx(0.5));
  CHECK_FALSE(injectivity_radius(make_sphere()).has_value());
  CHECK_THROWS_AS(injectivity_radius(make_hyperbolic_chart(-2.0, 0.5)), std::invalid_argument);
}

TEST_CASE("torus canonical representative stays in the fundamental domain") {
  const SurfaceModel torus = make_torus({0.3, 1.1});
  CounterRng rng(3);
  for (int i = 0; i < 100; ++i) {
    const ChartPoint p{{5 * rng.normal(), 5 * rng.normal()}, Chart::Primary};
    const ChartPoint q = torus.canonical(p);
    CHECK(q.z.imag() >= 0.0);
    CHECK(q.z.imag() < 1.1);
    const cdouble d = p.z - q.z;
    const double b = d.imag() / 1.1;
    const double a = d.real() - b * 0.3;
    CHECK(std::abs(b - std::round(b)) < 1e-9);
    CHECK(std::abs(a - std::round(a)) < 1e-9);
  }
}

TEST_CASE("chart weights") {
  const SurfaceModel sphere = make_sphere(2.0);
  CHECK(sphere.curvature() == doctest::Approx(1.0));
  CHECK(sphere.weight({1.0, Chart::Primary}) == doctest::Approx(2.0 * std::log(2.0)));
  CHECK(make_torus({0.0, 2.0}).weight({{0.0, 1.0}, Chart::Primary}) == doctest::Approx(kPi));
  CHECK(sphere.genus() == 0);
  CHECK(make_torus({0.0, 1.0}).genus() == 1);
}
