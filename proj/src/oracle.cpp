#include "cmseq/oracle.hpp"

#include <algorithm>

namespace cmseq {

namespace {

Matrix gather(const BlockMatrix& c, const IndexSet& rows, const IndexSet& cols) {
  const auto d = static_cast<Eigen::Index>(c.block_dim());
  Matrix out(static_cast<Eigen::Index>(rows.size()) * d, static_cast<Eigen::Index>(cols.size()) * d);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t s = 0; s < cols.size(); ++s) {
      out.block(static_cast<Eigen::Index>(r) * d, static_cast<Eigen::Index>(s) * d, d, d) =
          c.block(rows[r], cols[s]);
    }
  }
  return out;
}

void check_disjoint(const IndexSet& a, const IndexSet& b) {
  for (auto i : a) {
    if (std::find(b.begin(), b.end(), i) != b.end()) {
      throw std::invalid_argument("partial covariance index sets must be disjoint");
    }
  }
}

void check_oracle_size(const SequenceLaw& law) {
  if (law.covariance().size() > kMaxOracleDim) {
    throw OracleTooLarge("oracle sweeps are limited to stacked dimension " +
                         std::to_string(kMaxOracleDim));
  }
}

IndexSet retained_pair(std::size_t j, std::size_t c) {
  return j == c ? IndexSet{j} : IndexSet{j, c};
}

double residual(const BlockMatrix& c, const CiQuery& q, double scale) {
  const double norm = partial_covariance(c, {q.target}, q.dropped, q.retained).norm();
  return scale > 0.0 ? norm / scale : norm;
}

OracleVerdict reduce(const std::vector<CiQuery>& queries, const std::vector<double>& residuals,
                     const Tolerance& tol) {
  OracleVerdict verdict;
  std::size_t worst = queries.size();
  for (std::size_t q = 0; q < queries.size(); ++q) {
    if (worst == queries.size() || residuals[q] > verdict.worst_residual) {
      worst = q;
      verdict.worst_residual = residuals[q];
    }
  }
  if (worst < queries.size()) verdict.witness = queries[worst];
  verdict.holds = verdict.worst_residual <= tol.residual_tol;
  return verdict;
}

}  // namespace

Matrix partial_covariance(const BlockMatrix& c, const IndexSet& a, const IndexSet& b,
                          const IndexSet& s) {
  check_disjoint(a, b);
  check_disjoint(a, s);
  check_disjoint(b, s);
  Matrix cross = gather(c, a, b);
  if (s.empty()) return cross;

  const Matrix css = gather(c, s, s);
  Eigen::LLT<Matrix> llt(css);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(0);
  cross -= gather(c, a, s) * llt.solve(gather(c, s, b));
  return cross;
}

std::vector<CiQuery> cm_interval_queries(IndexInterval interval, ConditioningSide side,
                                         HistorySide form) {
  const std::size_t c = interval.conditioning_index(side);
  std::vector<CiQuery> queries;
  for (std::size_t j = interval.lo; j <= interval.hi; ++j) {
    for (std::size_t k = interval.lo; k <= interval.hi; ++k) {
      const bool ordered = form == HistorySide::Past ? j < k : k < j;
      if (!ordered || k == c) continue;
      CiQuery q{k, retained_pair(j, c), {}};
      if (form == HistorySide::Past) {
        for (std::size_t i = interval.lo; i < j; ++i) {
          if (i != c) q.dropped.push_back(i);
        }
      } else {
        for (std::size_t i = j + 1; i <= interval.hi; ++i) {
          if (i != c) q.dropped.push_back(i);
        }
      }
      if (!q.dropped.empty()) queries.push_back(std::move(q));
    }
  }
  return queries;
}

std::vector<CiQuery> reciprocal_queries(std::size_t last_index) {
  std::vector<CiQuery> queries;
  for (std::size_t j = 0; j <= last_index; ++j) {
    for (std::size_t k = j + 1; k <= last_index; ++k) {
      for (std::size_t l = k + 1; l <= last_index; ++l) {
        CiQuery q{k, {j, l}, {}};
        for (std::size_t i = 0; i < j; ++i) q.dropped.push_back(i);
        for (std::size_t i = l + 1; i <= last_index; ++i) q.dropped.push_back(i);
        if (!q.dropped.empty()) queries.push_back(std::move(q));
      }
    }
  }
  return queries;
}

std::vector<CiQuery> markov_queries(std::size_t last_index) {
  std::vector<CiQuery> queries;
  for (std::size_t j = 1; j <= last_index; ++j) {
    for (std::size_t k = j + 1; k <= last_index; ++k) {
      CiQuery q{k, {j}, {}};
      for (std::size_t i = 0; i < j; ++i) q.dropped.push_back(i);
      queries.push_back(std::move(q));
    }
  }
  return queries;
}

OracleVerdict sweep(const SequenceLaw& law, const std::vector<CiQuery>& queries,
                    const Tolerance& tol) {
  tol.validate();
  check_oracle_size(law);
  const BlockMatrix& c = law.covariance();
  const double scale = c.max_block_norm();
  std::vector<double> residuals(queries.size());
  const auto n = static_cast<std::ptrdiff_t>(queries.size());

  // Exceptions may not cross the parallel region boundary.
  bool failed = false;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t q = 0; q < n; ++q) {
    try {
      residuals[static_cast<std::size_t>(q)] = residual(c, queries[static_cast<std::size_t>(q)], scale);
    } catch (...) {
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed) return serial::sweep(law, queries, tol);
  return reduce(queries, residuals, tol);
}

namespace serial {

OracleVerdict sweep(const SequenceLaw& law, const std::vector<CiQuery>& queries,
                    const Tolerance& tol) {
  tol.validate();
  check_oracle_size(law);
  const BlockMatrix& c = law.covariance();
  const double scale = c.max_block_norm();
  std::vector<double> residuals;
  residuals.reserve(queries.size());
  for (const auto& q : queries) residuals.push_back(residual(c, q, scale));
  return reduce(queries, residuals, tol);
}

}  // namespace serial

OracleVerdict oracle_cm_interval(const SequenceLaw& law, IndexInterval interval,
                                 ConditioningSide side, const Tolerance& tol, HistorySide form) {
  interval.validate(law.last_index());
  return sweep(law, cm_interval_queries(interval, side, form), tol);
}

OracleVerdict oracle_reciprocal(const SequenceLaw& law, const Tolerance& tol) {
  return sweep(law, reciprocal_queries(law.last_index()), tol);
}

OracleVerdict oracle_markov(const SequenceLaw& law, const Tolerance& tol) {
  return sweep(law, markov_queries(law.last_index()), tol);
}

}  // namespace cmseq
