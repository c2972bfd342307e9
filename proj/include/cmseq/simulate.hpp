#pragma once

// Seeded trajectory sampling from CM_c models and Monte Carlo checks of the
// induced covariance.
//
// Replicate m draws its noise from a generator seeded by (seed, m) alone, so
// the OpenMP kernels and their serial:: references produce identical bits
// for any thread count.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cmseq/core.hpp"
#include "cmseq/models.hpp"

namespace cmseq {

class InsufficientSamples : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// M trajectories of N+1 states in R^d, stored replicate-major, then time,
/// then component.
struct SampleBatch {
  std::size_t replicates = 0;
  std::size_t last_index = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::vector<double> data;

  std::size_t trajectory_size() const noexcept { return (last_index + 1) * dim; }

  Eigen::Map<const Vector> trajectory(std::size_t m) const {
    return {data.data() + m * trajectory_size(), static_cast<Eigen::Index>(trajectory_size())};
  }
  Eigen::Map<const Vector> state(std::size_t m, std::size_t k) const {
    return {data.data() + m * trajectory_size() + k * dim, static_cast<Eigen::Index>(dim)};
  }

  friend bool operator==(const SampleBatch&, const SampleBatch&) = default;
};

SampleBatch sample_forward(const ForwardCmcModel& model, std::size_t replicates, std::uint64_t seed);
SampleBatch sample_backward(const BackwardCmcModel& model, std::size_t replicates,
                            std::uint64_t seed);

/// (1/M) sum_m x_m x_m' with no mean subtraction. Throws InsufficientSamples
/// for M < 2.
BlockMatrix sample_covariance(const SampleBatch& batch);

namespace serial {
SampleBatch sample_forward(const ForwardCmcModel& model, std::size_t replicates, std::uint64_t seed);
SampleBatch sample_backward(const BackwardCmcModel& model, std::size_t replicates,
                            std::uint64_t seed);
BlockMatrix sample_covariance(const SampleBatch& batch);
}  // namespace serial

struct McReport {
  bool pass = false;
  double worst_deviation = 0.0;
  std::size_t worst_row = 0;
  std::size_t worst_col = 0;
  double tol_abs = 0.0;
};

/// Smallest tolerance mc_validate accepts: 4 sqrt(2/M) max diag(C).
double min_mc_tolerance(const BlockMatrix& covariance, std::size_t replicates);

/// Entrywise comparison of the sample covariance of M forward (backward)
/// trajectories with `reference`, or with the model's own law when no
/// reference is given. Throws std::invalid_argument when tol_abs is below
/// min_mc_tolerance.
McReport mc_validate(const ForwardCmcModel& model, std::size_t replicates, std::uint64_t seed,
                     double tol_abs, const std::optional<SequenceLaw>& reference = std::nullopt);
McReport mc_validate(const BackwardCmcModel& model, std::size_t replicates, std::uint64_t seed,
                     double tol_abs, const std::optional<SequenceLaw>& reference = std::nullopt);

}  // namespace cmseq
