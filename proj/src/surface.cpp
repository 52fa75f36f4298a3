#include "dpplab/surface.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <boost/math/special_functions/legendre.hpp>

namespace dpplab {

namespace {
constexpr double kPi = std::numbers::pi;
}

int SurfaceModel::genus() const {
  switch (kind_) {
    case SurfaceKind::Sphere:
      return 0;
    case SurfaceKind::FlatTorus:
      return 1;
    case SurfaceKind::HyperbolicChart:
      break;
  }
  throw std::invalid_argument("genus: hyperbolic chart is a local model");
}

double SurfaceModel::weight(const ChartPoint& p) const {
  switch (kind_) {
    case SurfaceKind::Sphere:
      return volume_ * std::log1p(std::norm(p.z));
    case SurfaceKind::FlatTorus: {
      const double y = p.z.imag();
      return 2.0 * kPi * volume_ * y * y / tau_.imag();
    }
    case SurfaceKind::HyperbolicChart:
      return 2.0 / curvature_ * std::log1p(curvature_ * std::norm(p.z));
  }
  return 0.0;
}

double SurfaceModel::chart_area_density(const ChartPoint& p) const {
  switch (kind_) {
    case SurfaceKind::Sphere: {
      const double s = 1.0 + std::norm(p.z);
      return kPi * s * s;
    }
    case SurfaceKind::FlatTorus:
      return tau_.imag();
    case SurfaceKind::HyperbolicChart: {
      const double s = 1.0 + curvature_ * std::norm(p.z);
      return 0.5 * kPi * s * s;
    }
  }
  return 0.0;
}

ChartPoint SurfaceModel::canonical(const ChartPoint& p) const {
  switch (kind_) {
    case SurfaceKind::Sphere:
      if (p.chart == Chart::Secondary && std::abs(p.z) > 0.0) {
        return {1.0 / p.z, Chart::Primary};
      }
      return p;
    case SurfaceKind::FlatTorus: {
      const double b = std::floor(p.z.imag() / tau_.imag());
      cdouble z = p.z - b * tau_;
      z -= std::floor(z.real());
      return {z, Chart::Primary};
    }
    case SurfaceKind::HyperbolicChart:
      return p;
  }
  return p;
}

SurfaceModel make_sphere(double volume) {
  if (!(volume > 0.0)) throw std::invalid_argument("make_sphere: volume must be positive");
  SurfaceModel m;
  m.kind_ = SurfaceKind::Sphere;
  m.volume_ = volume;
  m.curvature_ = 2.0 / volume;
  return m;
}

SurfaceModel make_torus(cdouble tau, double volume) {
  if (!(tau.imag() > 0.0)) throw std::invalid_argument("make_torus: Im tau must be positive");
  if (!(volume > 0.0)) throw std::invalid_argument("make_torus: volume must be positive");
  SurfaceModel m;
  m.kind_ = SurfaceKind::FlatTorus;
  m.tau_ = tau;
  m.volume_ = volume;
  m.curvature_ = 0.0;
  return m;
}

SurfaceModel make_hyperbolic_chart(double curvature, double r_max) {
  if (!(curvature < 0.0)) throw std::invalid_argument("make_hyperbolic_chart: R must be negative");
  if (!(r_max > 0.0) || !(r_max < 1.0 / std::sqrt(-curvature))) {
    throw std::invalid_argument("make_hyperbolic_chart: r_max outside the chart 1 + R|w|^2 > 0");
  }
  SurfaceModel m;
  m.kind_ = SurfaceKind::HyperbolicChart;
  m.curvature_ = curvature;
  m.r_max_ = r_max;
  m.volume_ = 1.0;
  return m;
}

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  // legendre_p_zeros returns the nonnegative zeros in increasing order.
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
  nodes.resize(n);
  weights.resize(n);
  const int half = static_cast<int>(zeros.size());
  for (int i = 0; i < half; ++i) {
    const double x = zeros[i];
    const double dp = boost::math::legendre_p_prime<double>(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // zeros[0] is 0 for odd n
    const int hi = n / 2 + i;
    const int lo = (n - 1) / 2 - i;
    nodes[hi] = x;
    weights[hi] = w;
    nodes[lo] = -x;
    weights[lo] = w;
  }
}

QuadGrid quadrature_grid(const SurfaceModel& model, int resolution) {
  if (resolution < 1) throw std::invalid_argument("quadrature_grid: resolution >= 1 required");
  QuadGrid grid;
  grid.resolution = resolution;
  switch (model.kind()) {
    case SurfaceKind::Sphere: {
      Eigen::VectorXd u, wu;
      gauss_legendre(resolution, u, wu);
      const int naz = 2 * resolution + 1;
      grid.nodes.reserve(static_cast<std::size_t>(resolution) * naz);
      grid.weights.resize(static_cast<Eigen::Index>(resolution) * naz);
      Eigen::Index idx = 0;
      for (int i = 0; i < resolution; ++i) {
        // tan(θ/2) with cosθ = u; the northern hemisphere uses w = 1/z
        const bool north = u[i] < 0.0;
        const double r = north ? std::sqrt((1.0 + u[i]) / (1.0 - u[i])) : std::sqrt((1.0 - u[i]) / (1.0 + u[i]));
        for (int j = 0; j < naz; ++j) {
          const double phi = 2.0 * kPi * j / naz;
          if (north) {
            grid.nodes.push_back({std::polar(r, -phi), Chart::Secondary});
          } else {
            grid.nodes.push_back({std::polar(r, phi), Chart::Primary});
          }
          grid.weights[idx++] = model.volume() * 0.5 * wu[i] / naz;
        }
      }
      grid.exact_degree = 2 * resolution - 1;
      break;
    }
    case SurfaceKind::FlatTorus: {
      const cdouble tau = model.tau();
      const int n = resolution;
      grid.nodes.reserve(static_cast<std::size_t>(n) * n);
      grid.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n) * n,
                                               model.volume() / (double(n) * n));
      for (int b = 0; b < n; ++b) {
        for (int a = 0; a < n; ++a) {
          grid.nodes.push_back({(double(a) + double(b) * tau) / double(n), Chart::Primary});
        }
      }
      break;
    }
    case SurfaceKind::HyperbolicChart: {
      Eigen::VectorXd x, wx;
      gauss_legendre(resolution, x, wx);
      const double smax = model.chart_radius() * model.chart_radius();
      const double R = model.curvature();
      const int naz = 2 * resolution + 1;
      grid.weights.resize(static_cast<Eigen::Index>(resolution) * naz);
      Eigen::Index idx = 0;
      for (int i = 0; i < resolution; ++i) {
        const double s = 0.5 * smax * (x[i] + 1.0);
        const double ds = 0.5 * smax * wx[i];
        // dd^cΦ = 2(1+Rs)^{-2} ds dθ/2π
        const double radial = 2.0 * ds / ((1.0 + R * s) * (1.0 + R * s));
        for (int j = 0; j < naz; ++j) {
          grid.nodes.push_back({std::polar(std::sqrt(s), 2.0 * kPi * j / naz), Chart::Primary});
          grid.weights[idx++] = radial / naz;
        }
      }
      break;
    }
  }
  return grid;
}

void write_grid_csv(std::ostream& os, const QuadGrid& grid) {
  os << "re_z,im_z,weight\n";
  char buf[96];
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const auto& p = grid.nodes[static_cast<std::size_t>(i)];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.z.real(), p.z.imag(), grid.weights[i]);
    os << buf;
  }
}

Eigen::Vector3d sphere_embed(const ChartPoint& p) {
  const cdouble z = p.z;
  const double r2 = std::norm(z);
  const double d = 1.0 + r2;
  if (p.chart == Chart::Primary) {
    return {2.0 * z.real() / d, 2.0 * z.imag() / d, (r2 - 1.0) / d};
  }
  // w = 1/z: z/(1+|z|^2) = conj(w)/(1+|w|^2)
  return {2.0 * z.real() / d, -2.0 * z.imag() / d, (1.0 - r2) / d};
}

ChartPoint sphere_unembed(const Eigen::Vector3d& x) {
  if (x[2] > 1.0 - 1e-15 && std::hypot(x[0], x[1]) < 1e-15) {
    return {cdouble(0.0, 0.0), Chart::Secondary};
  }
  if (x[2] > 0.0) {
    // Stable near the north pole: z = (x1 + i x2)/(1 - x3), with
    // 1 - x3 = (x1^2 + x2^2)/(1 + x3).
    const double rho2 = x[0] * x[0] + x[1] * x[1];
    return {cdouble(x[0], x[1]) * (1.0 + x[2]) / rho2, Chart::Primary};
  }
  return {cdouble(x[0], x[1]) / (1.0 - x[2]), Chart::Primary};
}

double sphere_cos_theta(const ChartPoint& p) {
  const double r2 = std::norm(p.z);
  const double c = (1.0 - r2) / (1.0 + r2);
  return p.chart == Chart::Primary ? c : -c;
}

double sphere_azimuth(const ChartPoint& p) {
  return p.chart == Chart::Primary ? std::arg(p.z) : -std::arg(p.z);
}

double chordal_distance(const ChartPoint& a, const ChartPoint& b) {
  if (a.chart == b.chart) {
    return std::abs(a.z - b.z) / std::sqrt((1.0 + std::norm(a.z)) * (1.0 + std::norm(b.z)));
  }
  return 0.5 * (sphere_embed(a) - sphere_embed(b)).norm();
}

double shortest_lattice_vector(cdouble tau) {
  // Lagrange–Gauss reduction of the basis (1, τ).
  cdouble u(1.0, 0.0), v = tau;
  if (std::norm(v) < std::norm(u)) std::swap(u, v);
  for (int it = 0; it < 64; ++it) {
    const double mu = std::round((u.real() * v.real() + u.imag() * v.imag()) / std::norm(u));
    if (mu == 0.0) break;
    v -= mu * u;
    if (std::norm(v) < std::norm(u)) std::swap(u, v);
  }
  return std::abs(u);
}

std::optional<double> injectivity_radius(const SurfaceModel& model) {
  switch (model.kind()) {
    case SurfaceKind::Sphere:
      return std::nullopt;
    case SurfaceKind::FlatTorus:
      return 0.5 * shortest_lattice_vector(model.tau());
    case SurfaceKind::HyperbolicChart:
      break;
  }
  throw std::invalid_argument("injectivity_radius: local chart has no global geometry");
}

}  // namespace dpplab
