#include "dpplab/dpp.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "dpplab/error.hpp"

namespace dpplab {

namespace {

constexpr double kPi = std::numbers::pi;

ChartPoint propose(const SurfaceModel& model, CounterRng& rng) {
  switch (model.kind()) {
    case SurfaceKind::Sphere:
      return uniform_sphere_point(rng);
    case SurfaceKind::FlatTorus: {
      const double a = rng.uniform();
      const double b = rng.uniform();
      return {a + b * model.tau(), Chart::Primary};
    }
    case SurfaceKind::HyperbolicChart:
      break;
  }
  throw std::invalid_argument("sample_chain_rule: compact surface required");
}

void fill_embeddings(Configuration& c) {
  c.embedded.clear();
  c.embedded.reserve(c.points.size());
  for (const ChartPoint& p : c.points) c.embedded.push_back(sphere_embed(p));
}

cdouble ginibre_entry(CounterRng& rng) {
  const double re = rng.normal();
  const double im = rng.normal();
  return cdouble(re, im) * std::sqrt(0.5);
}

template <typename T>
void put(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little, "binary batch format is little-endian");
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  os.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  char buf[sizeof(T)];
  if (!is.read(buf, sizeof(T))) throw std::runtime_error("read_batch_binary: truncated input");
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

constexpr char kMagic[4] = {'D', 'P', 'P', 'B'};
constexpr std::uint32_t kBinaryVersion = 1;

}  // namespace

std::string to_string(SamplerId id) {
  return id == SamplerId::ChainRule ? "chain-rule" : "eigenvalue-model";
}

SamplerId sampler_from_string(const std::string& name) {
  if (name == "chain-rule") return SamplerId::ChainRule;
  if (name == "eigenvalue-model") return SamplerId::EigenvalueModel;
  throw std::invalid_argument("unknown sampler '" + name + "' (chain-rule, eigenvalue-model)");
}

double log_z_n(int n) {
  if (n < 1) throw std::invalid_argument("log_z_n: N >= 1 required");
  double log_inv = n * std::log(double(n)) - std::lgamma(n + 1.0);
  for (int j = 0; j < n; ++j) {
    log_inv += std::lgamma(double(n)) - std::lgamma(j + 1.0) - std::lgamma(double(n - j));
  }
  return -log_inv;
}

double z_n(int n) { return std::exp(log_z_n(n)); }

double joint_density(const std::vector<ChartPoint>& points) {
  const int n = static_cast<int>(points.size());
  double log_rho = -log_z_n(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = chordal_distance(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
      if (d == 0.0) return 0.0;
      log_rho += 2.0 * std::log(d);
    }
  }
  return std::exp(log_rho);
}

double joint_density_slater(const SectionBasis& basis, const std::vector<ChartPoint>& points) {
  const int n = basis.dimension();
  if (static_cast<int>(points.size()) != n) {
    throw std::invalid_argument("joint_density_slater: need exactly N points");
  }
  Eigen::MatrixXcd m(n, n);
  for (int j = 0; j < n; ++j) m.col(j) = basis.scaled_values(points[static_cast<std::size_t>(j)]);
  return std::norm(m.determinant()) / std::exp(std::lgamma(n + 1.0));
}

double chain_rule_envelope(const SectionBasis& basis) {
  const SurfaceModel& model = basis.model();
  if (model.kind() == SurfaceKind::Sphere) return basis.dimension();
  if (!model.is_global()) throw std::invalid_argument("chain_rule_envelope: compact surface required");
  const QuadGrid grid = quadrature_grid(model, 2 * basis.min_resolution());
  const ToeplitzAssembler assembler(basis, grid);
  return assembler.bergman_function().maxCoeff() * (1.0 + 1e-6);
}

ChartPoint uniform_sphere_point(CounterRng& rng) {
  const double u = 2.0 * rng.uniform() - 1.0;
  const double phi = 2.0 * kPi * rng.uniform();
  if (u >= 0.0) return {std::polar(std::sqrt((1.0 - u) / (1.0 + u)), phi), Chart::Primary};
  return {std::polar(std::sqrt((1.0 + u) / (1.0 - u)), -phi), Chart::Secondary};
}

Configuration sample_chain_rule(const SectionBasis& basis, double envelope, CounterRng& rng,
                                ChainRuleStats* stats) {
  const SurfaceModel& model = basis.model();
  const int n = basis.dimension();
  Configuration config;
  config.level = basis.level();
  config.points.reserve(static_cast<std::size_t>(n));

  // Columns of frame span the coefficient subspace of the remaining kernel.
  Eigen::MatrixXcd frame = Eigen::MatrixXcd::Identity(n, n);
  for (int rank = n; rank > 0; --rank) {
    for (;;) {
      const ChartPoint x = propose(model, rng);
      const double u = rng.uniform();
      if (stats) ++stats->proposals;
      const Eigen::VectorXcd coords = frame.adjoint() * basis.scaled_values(x).conjugate();
      const double diag = coords.squaredNorm();
      if (diag > envelope * (1.0 + 1e-12)) {
        throw NumericalError("sample_chain_rule: kernel diagonal exceeds the rejection envelope");
      }
      if (u * envelope >= diag) continue;
      config.points.push_back(x);
      if (rank > 1) {
        const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(coords);
        const Eigen::MatrixXcd h = qr.householderQ();
        frame = (frame * h.rightCols(rank - 1)).eval();
      }
      break;
    }
  }
  if (model.kind() == SurfaceKind::Sphere) fill_embeddings(config);
  return config;
}

Configuration sample_eigenvalue_model(int n, CounterRng& rng, int max_retries, std::uint64_t* retries) {
  if (n < 1) throw std::invalid_argument("sample_eigenvalue_model: N >= 1 required");
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    Eigen::MatrixXcd a(n, n), b(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) a(i, j) = ginibre_entry(rng);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) b(i, j) = ginibre_entry(rng);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(b);
    bool ok = lu.rcond() > 1e-13;
    Configuration config;
    if (ok) {
      const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(lu.solve(a), false);
      ok = es.info() == Eigen::Success;
      if (ok) {
        for (Eigen::Index i = 0; i < n; ++i) {
          const cdouble z = es.eigenvalues()[i];
          if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            ok = false;
            break;
          }
          config.points.push_back(std::abs(z) <= 1.0 ? ChartPoint{z, Chart::Primary}
                                                     : ChartPoint{1.0 / z, Chart::Secondary});
        }
      }
    }
    if (ok) {
      config.level = n - 1;
      fill_embeddings(config);
      return config;
    }
    if (retries) ++*retries;
  }
  throw NumericalError("sample_eigenvalue_model: degenerate pencil after the maximum number of redraws");
}

SampleBatch sample_batch(SamplerId sampler, const SectionBasis& basis, int replicas, std::uint64_t master_seed,
                         int workers) {
  if (replicas < 1) throw std::invalid_argument("sample_batch: replicas >= 1 required");
  SampleBatch batch;
  batch.sampler = sampler;
  batch.master_seed = master_seed;
  batch.configurations.resize(static_cast<std::size_t>(replicas));
  std::vector<std::uint64_t> retries(static_cast<std::size_t>(replicas), 0);
  const double envelope = sampler == SamplerId::ChainRule ? chain_rule_envelope(basis) : 0.0;
  if (sampler == SamplerId::EigenvalueModel && basis.model().kind() != SurfaceKind::Sphere) {
    throw std::invalid_argument("sample_batch: the eigenvalue model samples the sphere only");
  }

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  const auto work = [&] {
    try {
      for (int r = next++; r < replicas && !failed; r = next++) {
        CounterRng rng(master_seed, static_cast<std::uint64_t>(r));
        const auto idx = static_cast<std::size_t>(r);
        Configuration c = sampler == SamplerId::ChainRule
                              ? sample_chain_rule(basis, envelope, rng)
                              : sample_eigenvalue_model(basis.dimension(), rng, 16, &retries[idx]);
        c.seed = master_seed;
        c.replica = static_cast<std::uint64_t>(r);
        batch.configurations[idx] = std::move(c);
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, replicas);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  for (std::uint64_t r : retries) batch.retries += r;
  return batch;
}

void write_batch_csv(std::ostream& os, const SampleBatch& batch, const SurfaceModel& model) {
  os << "# schema: dpplab-batch/1 sampler=" << to_string(batch.sampler) << " seed=" << batch.master_seed << "\n";
  os << "replica,point,re_z,im_z\n";
  char buf[128];
  for (const Configuration& c : batch.configurations) {
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      const ChartPoint p = model.canonical(c.points[i]);
      std::snprintf(buf, sizeof buf, "%llu,%zu,%.17g,%.17g\n", static_cast<unsigned long long>(c.replica), i,
                    p.z.real(), p.z.imag());
      os << buf;
    }
  }
}

void write_batch_binary(std::ostream& os, const SampleBatch& batch) {
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kBinaryVersion);
  put<std::uint32_t>(os, batch.sampler == SamplerId::ChainRule ? 0u : 1u);
  put<std::uint64_t>(os, batch.master_seed);
  put<std::uint64_t>(os, batch.retries);
  put<std::uint64_t>(os, batch.configurations.size());
  for (const Configuration& c : batch.configurations) {
    put<std::uint64_t>(os, c.replica);
    put<std::uint64_t>(os, c.seed);
    put<std::int32_t>(os, c.level);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(c.points.size()));
    for (const ChartPoint& p : c.points) {
      put<double>(os, p.z.real());
      put<double>(os, p.z.imag());
      put<std::uint8_t>(os, p.chart == Chart::Primary ? 0 : 1);
    }
  }
}

SampleBatch read_batch_binary(std::istream& is, bool sphere) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("read_batch_binary: not a dpplab batch");
  }
  if (get<std::uint32_t>(is) != kBinaryVersion) throw std::runtime_error("read_batch_binary: unsupported version");
  SampleBatch batch;
  batch.sampler = get<std::uint32_t>(is) == 0 ? SamplerId::ChainRule : SamplerId::EigenvalueModel;
  batch.master_seed = get<std::uint64_t>(is);
  batch.retries = get<std::uint64_t>(is);
  const auto count = get<std::uint64_t>(is);
  batch.configurations.resize(count);
  for (Configuration& c : batch.configurations) {
    c.replica = get<std::uint64_t>(is);
    c.seed = get<std::uint64_t>(is);
    c.level = get<std::int32_t>(is);
    const auto n = get<std::uint32_t>(is);
    c.points.resize(n);
    for (ChartPoint& p : c.points) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      p = {cdouble(re, im), get<std::uint8_t>(is) == 0 ? Chart::Primary : Chart::Secondary};
    }
    if (sphere) fill_embeddings(c);
  }
  return batch;
}

}  // namespace dpplab
