#include "cmseq/classify.hpp"

#include <algorithm>

namespace cmseq {

namespace {

ClassVerdict verdict_of(const BlockMatrix& m, const PatternSpec& pattern, const Tolerance& tol) {
  ClassVerdict v;
  v.witness = detect(m, pattern, tol);
  v.holds = v.witness.conforms;
  return v;
}

ClassVerdict cmc_from_precision(const BlockMatrix& a, ConditioningSide side, const Tolerance& tol) {
  return verdict_of(a, PatternSpec::cm_c(side, a.last_index()), tol);
}

ClassVerdict interval_from_precision(const BlockMatrix& a, IndexInterval interval,
                                     ConditioningSide side, const Tolerance& tol) {
  const std::size_t n = a.last_index();
  interval.validate(n);
  BlockMatrix marginal;
  if (interval.lo == 0 && interval.hi >= 1 && interval.hi + 1 <= n) {
    marginal = schur_complement(a, interval.hi, Keep::Leading);
  } else if (interval.hi == n && interval.lo >= 1 && interval.lo + 1 <= n) {
    marginal = schur_complement(a, interval.lo, Keep::Trailing);
  } else {
    throw UnsupportedInterval("interval [" + std::to_string(interval.lo) + ", " +
                              std::to_string(interval.hi) +
                              "] is not [0,k2] or [k1,N] with an interior endpoint");
  }
  return cmc_from_precision(marginal, side, tol);
}

ReciprocalVerdict reciprocal_from_precision(const BlockMatrix& a, const ClassVerdict& cm_l,
                                            const ClassVerdict& cm_f, const Tolerance& tol) {
  ReciprocalVerdict r;
  r.witness = detect(a, PatternSpec::cyclic_tridiagonal(a.last_index()), tol);
  r.holds = r.witness.conforms;
  r.cm_l_and_cm_f = cm_l.holds && cm_f.holds;
  r.routes_agree = r.holds == r.cm_l_and_cm_f;
  return r;
}

/// Both compositions, given every boundary-anchored interval verdict.
bool compositions_agree(bool reciprocal, bool cm_l, bool cm_f,
                        const std::vector<IntervalVerdict>& intervals, std::size_t n) {
  bool tail_cm_f = cm_f && cm_l;
  bool head_cm_l = cm_l && cm_f;
  for (const auto& iv : intervals) {
    if (iv.interval.hi == n && iv.interval.lo >= 1 && iv.side == ConditioningSide::First) {
      tail_cm_f = tail_cm_f && iv.verdict.holds;
    }
    if (iv.interval.lo == 0 && iv.interval.hi + 1 <= n && iv.side == ConditioningSide::Last) {
      head_cm_l = head_cm_l && iv.verdict.holds;
    }
  }
  return reciprocal == tail_cm_f && reciprocal == head_cm_l;
}

std::vector<IntervalVerdict> intervals_serial(const BlockMatrix& a, const Tolerance& tol) {
  std::vector<IntervalVerdict> out;
  for (const auto& [interval, side] : boundary_anchored_intervals(a.last_index())) {
    out.push_back({interval, side, interval_from_precision(a, interval, side, tol)});
  }
  return out;
}

std::vector<IntervalVerdict> intervals_parallel(const BlockMatrix& a, const Tolerance& tol) {
  const auto plan = boundary_anchored_intervals(a.last_index());
  std::vector<IntervalVerdict> out(plan.size());
  const auto n = static_cast<std::ptrdiff_t>(plan.size());
  bool failed = false;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& [interval, side] = plan[static_cast<std::size_t>(i)];
    try {
      out[static_cast<std::size_t>(i)] = {interval, side,
                                          interval_from_precision(a, interval, side, tol)};
    } catch (...) {
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed) return intervals_serial(a, tol);
  return out;
}

template <typename IntervalFn>
ClassificationReport build_report(const SequenceLaw& law, const Tolerance& tol,
                                  IntervalFn&& intervals) {
  tol.validate();
  const BlockMatrix a = invert_spd(law.covariance());
  const std::size_t n = a.last_index();

  ClassificationReport report;
  report.last_index = n;
  report.dim = law.dim();
  report.cm_l = cmc_from_precision(a, ConditioningSide::Last, tol);
  report.cm_f = cmc_from_precision(a, ConditioningSide::First, tol);
  report.markov = verdict_of(a, PatternSpec::tridiagonal(n), tol);
  report.reciprocal = reciprocal_from_precision(a, report.cm_l, report.cm_f, tol);
  report.interval_cm = intervals(a, tol);
  report.consistency =
      report.reciprocal.routes_agree &&
      compositions_agree(report.reciprocal.holds, report.cm_l.holds, report.cm_f.holds,
                         report.interval_cm, n);
  return report;
}

}  // namespace

ClassVerdict classify_cmc(const SequenceLaw& law, ConditioningSide side, const Tolerance& tol) {
  tol.validate();
  return cmc_from_precision(invert_spd(law.covariance()), side, tol);
}

ClassVerdict classify_cm_interval(const SequenceLaw& law, IndexInterval interval,
                                  ConditioningSide side, const Tolerance& tol) {
  tol.validate();
  return interval_from_precision(invert_spd(law.covariance()), interval, side, tol);
}

ReciprocalVerdict classify_reciprocal(const SequenceLaw& law, const Tolerance& tol) {
  tol.validate();
  const BlockMatrix a = invert_spd(law.covariance());
  return reciprocal_from_precision(a, cmc_from_precision(a, ConditioningSide::Last, tol),
                                   cmc_from_precision(a, ConditioningSide::First, tol), tol);
}

ClassVerdict classify_markov(const SequenceLaw& law, const Tolerance& tol) {
  tol.validate();
  const BlockMatrix a = invert_spd(law.covariance());
  return verdict_of(a, PatternSpec::tridiagonal(a.last_index()), tol);
}

bool verify_composition(const SequenceLaw& law, const Tolerance& tol) {
  tol.validate();
  const BlockMatrix a = invert_spd(law.covariance());
  const std::size_t n = a.last_index();
  const bool cm_l = cmc_from_precision(a, ConditioningSide::Last, tol).holds;
  const bool cm_f = cmc_from_precision(a, ConditioningSide::First, tol).holds;
  const bool reciprocal = reciprocal_from_precision(a, {cm_l, {}}, {cm_f, {}}, tol).holds;

  std::vector<IntervalVerdict> intervals;
  for (std::size_t k = 1; k + 1 <= n; ++k) {
    const IndexInterval tail{k, n};
    const IndexInterval head{0, k};
    intervals.push_back({tail, ConditioningSide::First,
                         interval_from_precision(a, tail, ConditioningSide::First, tol)});
    intervals.push_back({head, ConditioningSide::Last,
                         interval_from_precision(a, head, ConditioningSide::Last, tol)});
  }
  return compositions_agree(reciprocal, cm_l, cm_f, intervals, n);
}

std::vector<std::pair<IndexInterval, ConditioningSide>> boundary_anchored_intervals(
    std::size_t last_index) {
  std::vector<std::pair<IndexInterval, ConditioningSide>> out;
  for (std::size_t k2 = 1; k2 + 1 <= last_index; ++k2) {
    out.emplace_back(IndexInterval{0, k2}, ConditioningSide::First);
    out.emplace_back(IndexInterval{0, k2}, ConditioningSide::Last);
  }
  for (std::size_t k1 = 1; k1 + 1 <= last_index; ++k1) {
    out.emplace_back(IndexInterval{k1, last_index}, ConditioningSide::First);
    out.emplace_back(IndexInterval{k1, last_index}, ConditioningSide::Last);
  }
  return out;
}

ClassificationReport full_report(const SequenceLaw& law, const Tolerance& tol) {
  return build_report(law, tol, intervals_parallel);
}

namespace serial {

ClassificationReport full_report(const SequenceLaw& law, const Tolerance& tol) {
  return build_report(law, tol, intervals_serial);
}

}  // namespace serial

}  // namespace cmseq
