#include "cmseq/models.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

#include "cmseq/structure.hpp"

namespace cmseq {

namespace {

const Matrix kEmpty(0, 0);

/// Neighbour that the recursion regresses on besides x_c.
std::size_t neighbour(Direction direction, std::size_t k) {
  return direction == Direction::Forward ? k - 1 : k + 1;
}

/// Forward c = N and backward c = 0 carry a gain between x_0 and x_N in the
/// boundary condition. Returns (driven endpoint, anchor endpoint).
std::optional<std::pair<std::size_t, std::size_t>> boundary_link(Direction direction,
                                                                  ConditioningSide side,
                                                                  BoundaryCondition bc,
                                                                  std::size_t n) {
  const bool forward_last = direction == Direction::Forward && side == ConditioningSide::Last;
  const bool backward_first = direction == Direction::Backward && side == ConditioningSide::First;
  if (!forward_last && !backward_first) return std::nullopt;
  // Forward BC1 and backward BC2 draw x_0 first and drive x_N from it.
  const bool zero_first = (forward_last && bc == BoundaryCondition::BC1) ||
                          (backward_first && bc == BoundaryCondition::BC2);
  return zero_first ? std::make_pair(n, std::size_t{0}) : std::make_pair(std::size_t{0}, n);
}

Matrix stack_blocks(const BlockMatrix& c, std::size_t row_a, std::size_t row_b, std::size_t col_a,
                    std::size_t col_b) {
  const auto d = static_cast<Eigen::Index>(c.block_dim());
  Matrix out(2 * d, 2 * d);
  out << c.block(row_a, col_a), c.block(row_a, col_b), c.block(row_b, col_a), c.block(row_b, col_b);
  return out;
}

CmcModel build(const SequenceLaw& law, Direction direction, ConditioningSide side,
               BoundaryCondition bc) {
  if (!is_valid_variant(direction, side, bc)) {
    throw std::invalid_argument(std::string("no ") + to_string(bc) + " boundary condition for " +
                                to_string(direction) + " models with c = " + to_string(side));
  }
  const std::size_t n = law.last_index();
  if (n < 2) throw std::invalid_argument("CM_c models need N >= 2");
  const auto d = static_cast<Eigen::Index>(law.dim());
  const BlockMatrix& cov = law.covariance();

  CmcModel model;
  model.last_index = n;
  model.dim = law.dim();
  model.side = side;
  model.bc = bc;
  model.trans.assign(n + 1, kEmpty);
  model.cond.assign(n + 1, kEmpty);
  model.noise.assign(n + 1, kEmpty);
  const std::size_t c = model.conditioning_index();

  for (std::size_t k : recursion_indices(direction, n, side)) {
    const std::size_t nb = neighbour(direction, k);
    if (nb == c) {
      const Matrix gain = cov.block(k, c) * invert_spd(cov.block(c, c));
      model.trans[k] = 0.5 * gain;
      model.cond[k] = 0.5 * gain;
      model.noise[k] = cov.block(k, k) - gain * cov.block(c, k);
    } else {
      Matrix cross(d, 2 * d);
      cross << cov.block(k, nb), cov.block(k, c);
      const Matrix gain = cross * invert_spd(stack_blocks(cov, nb, c, nb, c));
      model.trans[k] = gain.leftCols(d);
      model.cond[k] = gain.rightCols(d);
      model.noise[k] = cov.block(k, k) - gain * cross.transpose();
    }
  }

  if (const auto link = boundary_link(direction, side, bc, n)) {
    const auto [driven, anchor] = *link;
    model.noise[anchor] = cov.block(anchor, anchor);
    const Matrix gain = cov.block(driven, anchor) * invert_spd(cov.block(anchor, anchor));
    model.boundary_gain = gain;
    model.noise[driven] = cov.block(driven, driven) - gain * cov.block(anchor, driven);
  } else {
    // The conditioning endpoint starts the recursion: x_c = e_c.
    model.noise[c] = cov.block(c, c);
  }

  for (auto& g : model.noise) g = (0.5 * (g + g.transpose())).eval();
  return model;
}

BlockMatrix script_g(const CmcModel& model, Direction direction) {
  validate(model, direction);
  const std::size_t n = model.last_index;
  const std::size_t c = model.conditioning_index();
  BlockMatrix g = BlockMatrix::identity(n + 1, model.dim);
  for (std::size_t k : recursion_indices(direction, n, model.side)) {
    g.add_to_block(k, neighbour(direction, k), -model.trans[k]);
    g.add_to_block(k, c, -model.cond[k]);
  }
  if (const auto link = boundary_link(direction, model.side, model.bc, n)) {
    g.add_to_block(link->first, link->second, -*model.boundary_gain);
  }
  return g;
}

BlockMatrix precision(const CmcModel& model, Direction direction) {
  const BlockMatrix g = script_g(model, direction);
  const auto d = static_cast<Eigen::Index>(model.dim);
  Matrix noise_inv = Matrix::Zero(g.dense().rows(), g.dense().cols());
  for (std::size_t k = 0; k <= model.last_index; ++k) {
    noise_inv.block(static_cast<Eigen::Index>(k) * d, static_cast<Eigen::Index>(k) * d, d, d) =
        invert_spd(model.noise[k]);
  }
  const Matrix a = g.dense().transpose() * noise_inv * g.dense();
  return BlockMatrix(0.5 * (a + a.transpose()), model.dim);
}

/// Residual bookkeeping shared by the parameter-condition checks.
class ResidualScan {
 public:
  ResidualScan(const CmcModel& model, const Tolerance& tol) : tol_(tol) {
    tol.validate();
    noise_inv_.reserve(model.noise.size());
    for (const auto& g : model.noise) {
      noise_inv_.push_back(invert_spd(g));
      scale_ = std::max(scale_, noise_inv_.back().norm());
    }
  }

  const Matrix& noise_inv(std::size_t k) const { return noise_inv_[k]; }

  void record(std::size_t k, const Matrix& residual) {
    const double r = scale_ > 0.0 ? residual.norm() / scale_ : residual.norm();
    if (!result_.worst_index || r > result_.max_residual) {
      result_.max_residual = r;
      result_.worst_index = k;
    }
  }

  ConditionCheck finish() {
    result_.holds = result_.max_residual <= tol_.residual_tol;
    return result_;
  }

 private:
  Tolerance tol_;
  std::vector<Matrix> noise_inv_;
  double scale_ = 0.0;
  ConditionCheck result_;
};

}  // namespace

const char* to_string(BoundaryCondition bc) noexcept {
  return bc == BoundaryCondition::BC1 ? "bc1" : "bc2";
}

const char* to_string(Direction direction) noexcept {
  return direction == Direction::Forward ? "forward" : "backward";
}

const char* to_string(LawClass cls) noexcept {
  switch (cls) {
    case LawClass::Markov: return "markov";
    case LawClass::Reciprocal: return "reciprocal";
    case LawClass::CmLOnly: return "cml";
    case LawClass::CmFOnly: return "cmf";
    case LawClass::Generic: return "generic";
  }
  return "unknown";
}

std::vector<std::size_t> recursion_indices(Direction direction, std::size_t last_index,
                                           ConditioningSide side) {
  const std::size_t c = side == ConditioningSide::First ? 0 : last_index;
  std::vector<std::size_t> out;
  const std::size_t lo = direction == Direction::Forward ? 1 : 0;
  const std::size_t hi = direction == Direction::Forward ? last_index : last_index - 1;
  for (std::size_t k = lo; k <= hi; ++k) {
    if (k != c) out.push_back(k);
  }
  return out;
}

bool is_valid_variant(Direction direction, ConditioningSide side, BoundaryCondition bc) noexcept {
  if (bc == BoundaryCondition::BC1) return true;
  return direction == Direction::Forward ? side == ConditioningSide::Last
                                         : side == ConditioningSide::First;
}

void validate(const CmcModel& model, Direction direction) {
  const std::size_t n = model.last_index;
  const auto d = static_cast<Eigen::Index>(model.dim);
  if (n < 2 || d < 1) throw std::invalid_argument("model needs N >= 2 and d >= 1");
  if (!is_valid_variant(direction, model.side, model.bc)) {
    throw std::invalid_argument("invalid (c, bc) combination for this model direction");
  }
  if (model.trans.size() != n + 1 || model.cond.size() != n + 1 || model.noise.size() != n + 1) {
    throw std::invalid_argument("model parameter lists must have N+1 entries");
  }
  auto square = [d](const Matrix& m) { return m.rows() == d && m.cols() == d; };
  const std::size_t c = model.conditioning_index();
  for (std::size_t k : recursion_indices(direction, n, model.side)) {
    if (!square(model.trans[k]) || !square(model.cond[k])) {
      throw std::invalid_argument("gain at k = " + std::to_string(k) + " has the wrong shape");
    }
    if (neighbour(direction, k) == c) {
      const double scale = std::max(1.0, model.trans[k].cwiseAbs().maxCoeff());
      if ((model.trans[k] - model.cond[k]).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw std::invalid_argument("gains at k = " + std::to_string(k) +
                                    " share x_c and must be split equally");
      }
    }
  }
  for (std::size_t k = 0; k <= n; ++k) {
    if (!square(model.noise[k])) {
      throw std::invalid_argument("noise covariance at k = " + std::to_string(k) +
                                  " has the wrong shape");
    }
    cholesky_lower(symmetrized(model.noise[k]));
  }
  const bool needs_gain = boundary_link(direction, model.side, model.bc, n).has_value();
  if (needs_gain != model.boundary_gain.has_value() ||
      (needs_gain && !square(*model.boundary_gain))) {
    throw std::invalid_argument("boundary gain missing, unexpected, or misshapen");
  }
}

ForwardCmcModel build_forward(const SequenceLaw& law, ConditioningSide side, BoundaryCondition bc) {
  return {build(law, Direction::Forward, side, bc)};
}

BackwardCmcModel build_backward(const SequenceLaw& law, ConditioningSide side,
                                BoundaryCondition bc) {
  return {build(law, Direction::Backward, side, bc)};
}

BlockMatrix assemble_script_g(const ForwardCmcModel& model) {
  return script_g(model, Direction::Forward);
}

BlockMatrix assemble_script_g(const BackwardCmcModel& model) {
  return script_g(model, Direction::Backward);
}

BlockMatrix assemble_precision(const ForwardCmcModel& model) {
  return precision(model, Direction::Forward);
}

BlockMatrix assemble_precision(const BackwardCmcModel& model) {
  return precision(model, Direction::Backward);
}

SequenceLaw model_covariance(const ForwardCmcModel& model) {
  return SequenceLaw::from_covariance(invert_spd(assemble_precision(model)));
}

SequenceLaw model_covariance(const BackwardCmcModel& model) {
  return SequenceLaw::from_covariance(invert_spd(assemble_precision(model)));
}

ConditionCheck check_reciprocity(const ForwardCmcModel& model, const Tolerance& tol) {
  validate(model, Direction::Forward);
  ResidualScan scan(model, tol);
  const std::size_t n = model.last_index;
  // k in (0, N-1) for c = N, (1, N) for c = 0.
  const bool last_side = model.side == ConditioningSide::Last;
  const std::size_t first = last_side ? 1 : 2;
  const std::size_t end = last_side ? n - 1 : n;
  for (std::size_t k = first; k < end; ++k) {
    const Matrix lhs = scan.noise_inv(k) * model.cond[k];
    const Matrix rhs = model.trans[k + 1].transpose() * scan.noise_inv(k + 1) * model.cond[k + 1];
    scan.record(k, lhs - rhs);
  }
  return scan.finish();
}

ConditionCheck check_reciprocity(const BackwardCmcModel& model, const Tolerance& tol) {
  validate(model, Direction::Backward);
  ResidualScan scan(model, tol);
  const std::size_t n = model.last_index;
  // k in (0, N-1) for c = 0, [0, N-2) for c = N.
  const bool first_side = model.side == ConditioningSide::First;
  const std::size_t first = first_side ? 1 : 0;
  const std::size_t end = first_side ? n - 1 : n - 2;
  for (std::size_t k = first; k < end; ++k) {
    const Matrix lhs = scan.noise_inv(k + 1) * model.cond[k + 1];
    const Matrix rhs = model.trans[k].transpose() * scan.noise_inv(k) * model.cond[k];
    scan.record(k, lhs - rhs);
  }
  return scan.finish();
}

ConditionCheck check_markov(const ForwardCmcModel& model, const Tolerance& tol) {
  validate(model, Direction::Forward);
  ResidualScan scan(model, tol);
  const std::size_t n = model.last_index;
  if (model.side == ConditioningSide::First) {
    scan.record(n, scan.noise_inv(n) * model.cond[n]);
  } else if (model.bc == BoundaryCondition::BC1) {
    scan.record(n, scan.noise_inv(n) * *model.boundary_gain -
                       model.cond[1].transpose() * scan.noise_inv(1) * model.trans[1]);
  } else {
    scan.record(0, scan.noise_inv(0) * *model.boundary_gain -
                       model.trans[1].transpose() * scan.noise_inv(1) * model.cond[1]);
  }
  return scan.finish();
}

ConditionCheck check_markov(const BackwardCmcModel& model, const Tolerance& tol) {
  validate(model, Direction::Backward);
  ResidualScan scan(model, tol);
  const std::size_t n = model.last_index;
  if (model.side == ConditioningSide::Last) {
    scan.record(0, scan.noise_inv(0) * model.cond[0]);
  } else if (model.bc == BoundaryCondition::BC1) {
    scan.record(0, scan.noise_inv(0) * *model.boundary_gain -
                       model.cond[n - 1].transpose() * scan.noise_inv(n - 1) * model.trans[n - 1]);
  } else {
    scan.record(n, scan.noise_inv(n) * *model.boundary_gain -
                       model.trans[n - 1].transpose() * scan.noise_inv(n - 1) * model.cond[n - 1]);
  }
  return scan.finish();
}

BlockMatrix random_precision(LawClass cls, std::size_t last_index, std::size_t dim,
                             std::uint64_t seed) {
  const std::size_t n = last_index;
  if (n < 2 || dim < 1) throw std::invalid_argument("random laws need N >= 2 and d >= 1");
  if ((cls == LawClass::CmLOnly || cls == LawClass::CmFOnly) && n < 3) {
    throw std::invalid_argument("CM_L-only / CM_F-only laws need N >= 3");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-0.5, 0.5);
  const auto d = static_cast<Eigen::Index>(dim);
  auto draw_block = [&] {
    Matrix b(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index s = 0; s < d; ++s) b(r, s) = entry(rng);
    }
    return b;
  };
  auto draw_strong_block = [&] {
    Matrix b = draw_block();
    while (b.norm() < 0.1) b = draw_block();
    return b;
  };

  auto on_support = [&](std::size_t i, std::size_t j) {
    switch (cls) {
      case LawClass::Markov: return in_support(PatternSpec::tridiagonal(n), i, j);
      case LawClass::Reciprocal: return in_support(PatternSpec::cyclic_tridiagonal(n), i, j);
      case LawClass::CmLOnly: return in_support(PatternSpec::cm_l(n), i, j);
      case LawClass::CmFOnly: return in_support(PatternSpec::cm_f(n), i, j);
      case LawClass::Generic: return true;
    }
    return false;
  };

  BlockMatrix a(n + 1, dim);
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      if (!on_support(i, j)) continue;
      const Matrix b = draw_block();
      a.set_block(i, j, b);
      a.set_block(j, i, b.transpose());
    }
  }

  std::optional<BlockIndex> strong;
  if (cls == LawClass::Reciprocal) {
    strong = BlockIndex{0, n};
  } else if (cls == LawClass::CmLOnly || cls == LawClass::CmFOnly) {
    std::uniform_int_distribution<std::size_t> pick(1, n - 2);
    const std::size_t k = pick(rng);
    strong = cls == LawClass::CmLOnly ? BlockIndex{k, n} : BlockIndex{0, n - k};
  }
  if (strong) {
    const Matrix b = draw_strong_block();
    a.set_block(strong->first, strong->second, b);
    a.set_block(strong->second, strong->first, b.transpose());
  }

  for (std::size_t i = 0; i <= n; ++i) {
    const Matrix row = a.dense().middleRows(static_cast<Eigen::Index>(i) * d, d);
    const double dominance = row.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    a.set_block(i, i, dominance * Matrix::Identity(d, d));
  }
  return a;
}

SequenceLaw random_law(LawClass cls, std::size_t last_index, std::size_t dim, std::uint64_t seed) {
  return SequenceLaw::from_covariance(invert_spd(random_precision(cls, last_index, dim, seed)));
}

}  // namespace cmseq
