#include "cmseq/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <type_traits>

namespace cmseq {

namespace {

struct Term {
  Matrix gain;
  std::size_t source;
};

struct Step {
  std::size_t target;
  std::vector<Term> terms;
  Matrix noise_factor;
};

/// Generation order and coefficients of a model, fixed once per call.
std::vector<Step> generation_plan(const CmcModel& model, Direction direction) {
  validate(model, direction);
  const std::size_t n = model.last_index;
  const std::size_t c = model.conditioning_index();
  auto step = [&](std::size_t k, std::vector<Term> terms) {
    return Step{k, std::move(terms), cholesky_lower(model.noise[k])};
  };

  std::vector<Step> plan;
  const bool forward = direction == Direction::Forward;
  const bool has_link = model.boundary_gain.has_value();
  if (has_link) {
    // Forward BC1 / backward BC2 start from x_0; the others start from x_N.
    const bool zero_first = forward == (model.bc == BoundaryCondition::BC1);
    const std::size_t anchor = zero_first ? 0 : n;
    const std::size_t driven = zero_first ? n : 0;
    plan.push_back(step(anchor, {}));
    plan.push_back(step(driven, {{*model.boundary_gain, anchor}}));
  } else {
    plan.push_back(step(c, {}));
  }

  auto indices = recursion_indices(direction, n, model.side);
  if (!forward) std::reverse(indices.begin(), indices.end());
  for (std::size_t k : indices) {
    const std::size_t nb = forward ? k - 1 : k + 1;
    plan.push_back(step(k, {{model.trans[k], nb}, {model.cond[k], c}}));
  }
  return plan;
}

std::mt19937_64 replicate_engine(std::uint64_t seed, std::uint64_t replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(replicate >> 32)};
  return std::mt19937_64(seq);
}

void draw_replicate(const std::vector<Step>& plan, std::size_t dim, std::uint64_t seed,
                    std::size_t m, double* out) {
  auto engine = replicate_engine(seed, m);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(dim);
  Vector z(d);
  for (const Step& s : plan) {
    for (Eigen::Index i = 0; i < d; ++i) z(i) = normal(engine);
    Eigen::Map<Vector> x(out + s.target * dim, d);
    x = s.noise_factor * z;
    for (const Term& t : s.terms) {
      x += t.gain * Eigen::Map<const Vector>(out + t.source * dim, d);
    }
  }
}

SampleBatch empty_batch(const CmcModel& model, std::size_t replicates, std::uint64_t seed) {
  SampleBatch batch;
  batch.replicates = replicates;
  batch.last_index = model.last_index;
  batch.dim = model.dim;
  batch.seed = seed;
  batch.data.assign(replicates * batch.trajectory_size(), 0.0);
  return batch;
}

SampleBatch sample_parallel(const CmcModel& model, Direction direction, std::size_t replicates,
                            std::uint64_t seed) {
  const auto plan = generation_plan(model, direction);
  SampleBatch batch = empty_batch(model, replicates, seed);
  const std::size_t stride = batch.trajectory_size();
  const auto count = static_cast<std::ptrdiff_t>(replicates);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < count; ++m) {
    const auto r = static_cast<std::size_t>(m);
    draw_replicate(plan, model.dim, seed, r, batch.data.data() + r * stride);
  }
  return batch;
}

SampleBatch sample_serial(const CmcModel& model, Direction direction, std::size_t replicates,
                          std::uint64_t seed) {
  const auto plan = generation_plan(model, direction);
  SampleBatch batch = empty_batch(model, replicates, seed);
  const std::size_t stride = batch.trajectory_size();
  for (std::size_t m = 0; m < replicates; ++m) {
    draw_replicate(plan, model.dim, seed, m, batch.data.data() + m * stride);
  }
  return batch;
}

void check_samples(const SampleBatch& batch) {
  if (batch.replicates < 2) throw InsufficientSamples("sample covariance needs at least 2 replicates");
}

BlockMatrix finish_covariance(Matrix lower, const SampleBatch& batch) {
  const Eigen::Index n = lower.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      lower(i, j) /= static_cast<double>(batch.replicates);
      lower(j, i) = lower(i, j);
    }
  }
  return BlockMatrix(std::move(lower), batch.dim);
}

template <typename Model>
McReport validate_mc(const Model& model, std::size_t replicates, std::uint64_t seed, double tol_abs,
                     const std::optional<SequenceLaw>& reference) {
  const SequenceLaw truth = reference ? *reference : model_covariance(model);
  const Matrix& expected = truth.covariance().dense();
  if (truth.last_index() != model.last_index || truth.dim() != model.dim) {
    throw BoundsError("reference law has the wrong shape");
  }
  if (tol_abs < min_mc_tolerance(truth.covariance(), replicates)) {
    throw std::invalid_argument("Monte Carlo tolerance is below 4 sqrt(2/M) max diag(C)");
  }
  SampleBatch batch;
  if constexpr (std::is_same_v<Model, ForwardCmcModel>) {
    batch = sample_forward(model, replicates, seed);
  } else {
    batch = sample_backward(model, replicates, seed);
  }
  const Matrix diff = (sample_covariance(batch).dense() - expected).cwiseAbs();

  McReport report;
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  report.worst_deviation = diff.maxCoeff(&row, &col);
  report.worst_row = static_cast<std::size_t>(row);
  report.worst_col = static_cast<std::size_t>(col);
  report.tol_abs = tol_abs;
  report.pass = report.worst_deviation < tol_abs;
  return report;
}

}  // namespace

SampleBatch sample_forward(const ForwardCmcModel& model, std::size_t replicates, std::uint64_t seed) {
  return sample_parallel(model, Direction::Forward, replicates, seed);
}

SampleBatch sample_backward(const BackwardCmcModel& model, std::size_t replicates,
                            std::uint64_t seed) {
  return sample_parallel(model, Direction::Backward, replicates, seed);
}

BlockMatrix sample_covariance(const SampleBatch& batch) {
  check_samples(batch);
  const auto n = static_cast<Eigen::Index>(batch.trajectory_size());
  Matrix lower = Matrix::Zero(n, n);
  const double* data = batch.data.data();
  const std::size_t stride = batch.trajectory_size();
  // One output row per task; each entry sums replicates in order.
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> row(static_cast<std::size_t>(i) + 1, 0.0);
    for (std::size_t m = 0; m < batch.replicates; ++m) {
      const double* x = data + m * stride;
      for (Eigen::Index j = 0; j <= i; ++j) row[static_cast<std::size_t>(j)] += x[i] * x[j];
    }
    for (Eigen::Index j = 0; j <= i; ++j) lower(i, j) = row[static_cast<std::size_t>(j)];
  }
  return finish_covariance(std::move(lower), batch);
}

namespace serial {

SampleBatch sample_forward(const ForwardCmcModel& model, std::size_t replicates, std::uint64_t seed) {
  return sample_serial(model, Direction::Forward, replicates, seed);
}

SampleBatch sample_backward(const BackwardCmcModel& model, std::size_t replicates,
                            std::uint64_t seed) {
  return sample_serial(model, Direction::Backward, replicates, seed);
}

BlockMatrix sample_covariance(const SampleBatch& batch) {
  check_samples(batch);
  const auto n = static_cast<Eigen::Index>(batch.trajectory_size());
  Matrix lower = Matrix::Zero(n, n);
  for (std::size_t m = 0; m < batch.replicates; ++m) {
    const Eigen::Map<const Vector> x = batch.trajectory(m);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) lower(i, j) += x(i) * x(j);
    }
  }
  return finish_covariance(std::move(lower), batch);
}

}  // namespace serial

double min_mc_tolerance(const BlockMatrix& covariance, std::size_t replicates) {
  if (replicates == 0) throw InsufficientSamples("no replicates");
  return 4.0 * std::sqrt(2.0 / static_cast<double>(replicates)) *
         covariance.dense().diagonal().maxCoeff();
}

McReport mc_validate(const ForwardCmcModel& model, std::size_t replicates, std::uint64_t seed,
                     double tol_abs, const std::optional<SequenceLaw>& reference) {
  return validate_mc(model, replicates, seed, tol_abs, reference);
}

McReport mc_validate(const BackwardCmcModel& model, std::size_t replicates, std::uint64_t seed,
                     double tol_abs, const std::optional<SequenceLaw>& reference) {
  return validate_mc(model, replicates, seed, tol_abs, reference);
}

}  // namespace cmseq
