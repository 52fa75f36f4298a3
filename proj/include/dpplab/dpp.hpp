#ifndef DPPLAB_DPP_HPP
#define DPPLAB_DPP_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dpplab/hilbert.hpp"
#include "dpplab/rng.hpp"

namespace dpplab {

struct Configuration {
  std::vector<ChartPoint> points;
  /// Unit-sphere embeddings, filled for sphere configurations only.
  std::vector<Eigen::Vector3d> embedded;
  int level = 0;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;

  int size() const { return static_cast<int>(points.size()); }
};

enum class SamplerId { ChainRule, EigenvalueModel };

std::string to_string(SamplerId id);
SamplerId sampler_from_string(const std::string& name);

struct SampleBatch {
  std::vector<Configuration> configurations;
  SamplerId sampler = SamplerId::ChainRule;
  std::uint64_t master_seed = 0;
  /// Degenerate pencils redrawn by the eigenvalue model, summed over replicas.
  std::uint64_t retries = 0;
};

/// log Z_N with 1/Z_N = N^N Π_j C(N-1, j) / N!.
double log_z_n(int n);
double z_n(int n);

/// Π_{i<j} d(x_i, x_j)² / Z_N with the chordal distance of the diameter-one
/// sphere, relative to ν^N. Coincident points give 0.
double joint_density(const std::vector<ChartPoint>& points);

/// |det ψ_i(x_j)|² / N! relative to ν^N, for any orthonormal basis.
double joint_density_slater(const SectionBasis& basis, const std::vector<ChartPoint>& points);

/// Envelope for the chain-rule sampler: sup B_k over a grid times (1 + slack),
/// or exactly N on the sphere.
double chain_rule_envelope(const SectionBasis& basis);

struct ChainRuleStats {
  std::uint64_t proposals = 0;
};

/// One exact sample of the projection process onto span(basis) by sequential
/// conditioning: each point is drawn from (remaining kernel diagonal)/(remaining
/// rank)·ν by rejection against ν, then the kernel is deflated. The basis must
/// be orthonormal for ν. Throws NumericalError on an envelope violation.
Configuration sample_chain_rule(const SectionBasis& basis, double envelope, CounterRng& rng,
                                ChainRuleStats* stats = nullptr);

/// Generalized eigenvalues of (A, B) for independent standard complex Ginibre
/// matrices, used as points of the N-particle process on the sphere (level
/// N - 1). Degenerate pencils are redrawn up to max_retries times.
Configuration sample_eigenvalue_model(int n, CounterRng& rng, int max_retries = 16,
                                      std::uint64_t* retries = nullptr);

/// Uniform point on the sphere under ν.
ChartPoint uniform_sphere_point(CounterRng& rng);

/// Replica r uses CounterRng(master_seed, r). Results are in replica order and
/// independent of the worker count. basis is ignored by the eigenvalue model,
/// which uses N = basis.dimension().
SampleBatch sample_batch(SamplerId sampler, const SectionBasis& basis, int replicas, std::uint64_t master_seed,
                         int workers = 0);

/// CSV: replica,point,re_z,im_z with canonical chart coordinates.
void write_batch_csv(std::ostream& os, const SampleBatch& batch, const SurfaceModel& model);

/// Compact little-endian binary form. read_batch_binary restores the points
/// exactly (embeddings are recomputed for sphere batches).
void write_batch_binary(std::ostream& os, const SampleBatch& batch);
SampleBatch read_batch_binary(std::istream& is, bool sphere = true);

}  // namespace dpplab

#endif  // DPPLAB_DPP_HPP
