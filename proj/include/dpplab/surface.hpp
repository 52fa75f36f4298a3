#ifndef DPPLAB_SURFACE_HPP
#define DPPLAB_SURFACE_HPP

#include <complex>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace dpplab {

using cdouble = std::complex<double>;

enum class SurfaceKind { Sphere, FlatTorus, HyperbolicChart };

/// Which trivializing chart a point is expressed in. On the sphere the
/// secondary chart is w = 1/z and covers the north pole.
enum class Chart { Primary, Secondary };

struct ChartPoint {
  cdouble z{0.0, 0.0};
  Chart chart = Chart::Primary;
};

/// Constant-curvature surface together with the weight Φ of the metric on L.
///
/// Weights (V = degree of L):
///   Sphere            Φ(z) = V·log(1 + |z|²),           R = 2/V
///   FlatTorus         Φ(z) = 2πV·(Im z)²/Im τ,          R = 0
///   HyperbolicChart   Φ(w) = (2/R)·log(1 + R|w|²),      R < 0, |w| ≤ r_max
/// so that dd^cΦ is the constant-curvature form of total mass V
/// (local mass density for the chart).
class SurfaceModel {
 public:
  SurfaceKind kind() const { return kind_; }
  int genus() const;
  double curvature() const { return curvature_; }
  double volume() const { return volume_; }
  cdouble tau() const { return tau_; }
  double chart_radius() const { return r_max_; }
  bool is_global() const { return kind_ != SurfaceKind::HyperbolicChart; }

  /// Weight Φ at a chart point (level 1).
  double weight(const ChartPoint& p) const;

  /// Density of Lebesgue measure dx dy of the chart with respect to ν = ω/V.
  double chart_area_density(const ChartPoint& p) const;

  /// Map a point into the canonical fundamental domain / primary chart.
  ChartPoint canonical(const ChartPoint& p) const;

  friend SurfaceModel make_sphere(double volume);
  friend SurfaceModel make_torus(cdouble tau, double volume);
  friend SurfaceModel make_hyperbolic_chart(double curvature, double r_max);

 private:
  SurfaceModel() = default;

  SurfaceKind kind_ = SurfaceKind::Sphere;
  double curvature_ = 2.0;
  double volume_ = 1.0;
  cdouble tau_{0.0, 1.0};
  double r_max_ = 0.0;
};

SurfaceModel make_sphere(double volume = 1.0);
SurfaceModel make_torus(cdouble tau, double volume = 1.0);
SurfaceModel make_hyperbolic_chart(double curvature, double r_max);

/// Quadrature rule for ν-weighted integrals: Σ weights = V.
struct QuadGrid {
  std::vector<ChartPoint> nodes;
  Eigen::VectorXd weights;
  int resolution = 0;
  /// Highest spherical-harmonic degree integrated exactly (sphere only, else -1).
  int exact_degree = -1;

  Eigen::Index size() const { return weights.size(); }
};

/// Sphere: Gauss–Legendre in u = cosθ (resolution nodes) times 2·resolution+1
/// uniform azimuths. Torus: resolution² uniform nodes z = (a + bτ)/resolution.
/// Hyperbolic chart: Gauss–Legendre in r² on [0, r_max²] times uniform azimuth.
QuadGrid quadrature_grid(const SurfaceModel& model, int resolution);

/// Integral of f against ν (not ω) over the grid.
template <typename Values>
auto integrate(const QuadGrid& grid, double volume, const Values& values) {
  return grid.weights.dot(values.matrix()) / volume;
}

void write_grid_csv(std::ostream& os, const QuadGrid& grid);

/// Gauss–Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

// Sphere geometry. Convention: z = tan(θ/2)e^{iϕ}, z = 0 is the south pole
// (0,0,-1) and x₃ = (|z|²-1)/(|z|²+1) = -cosθ.

Eigen::Vector3d sphere_embed(const ChartPoint& p);
/// Inverse of sphere_embed. Returns the secondary chart (w = 0) at the north
/// pole, and the primary chart everywhere else.
ChartPoint sphere_unembed(const Eigen::Vector3d& x);

/// cosθ with the convention above.
double sphere_cos_theta(const ChartPoint& p);
double sphere_azimuth(const ChartPoint& p);

/// Chordal distance on the Riemann sphere of diameter one,
/// |z - w| / sqrt((1+|z|²)(1+|w|²)) = ‖x - y‖/2 for the unit-sphere embedding.
double chordal_distance(const ChartPoint& a, const ChartPoint& b);

/// Half the shortest closed geodesic. Torus: in lattice (z-chart) units.
/// Sphere: returns std::nullopt (not needed by any sphere computation).
/// Throws std::invalid_argument for the local hyperbolic chart.
std::optional<double> injectivity_radius(const SurfaceModel& model);

/// Shortest nonzero vector length of the lattice Z + τZ.
double shortest_lattice_vector(cdouble tau);

}  // namespace dpplab

#endif  // DPPLAB_SURFACE_HPP
