#include "cvqkd/estimators.hpp"

#include <cmath>

namespace cvqkd {

namespace {

struct MomentSums {
  double aa = 0.0;
  double ab = 0.0;
  double bb = 0.0;
};

// Symmetrized plug-in estimates from raw second-moment sums.
struct PairEstimate {
  double v_ab = 0.0;
  double v_ba = 0.0;
};

PairEstimate plug_in(const MomentSums& x, const MomentSums& p, double n) {
  const auto one = [n](const MomentSums& m) {
    const double maa = m.aa / n;
    const double mab = m.ab / n;
    const double mbb = m.bb / n;
    return PairEstimate{maa - mab * mab / mbb, mbb - mab * mab / maa};
  };
  const PairEstimate ex = one(x);
  const PairEstimate ep = one(p);
  return {0.5 * (ex.v_ab + ep.v_ab), 0.5 * (ex.v_ba + ep.v_ba)};
}

}  // namespace

ConditionalVariances estimate_conditional_variances(
    std::span<const ShotRecord> records) {
  const std::size_t n = records.size();
  if (n < 1000) {
    throw EstimationError("need at least 1000 shots to estimate variances");
  }

  MomentSums x;
  MomentSums p;
  for (const ShotRecord& record : records) {
    x.aa += record.alice_x * record.alice_x;
    x.ab += record.alice_x * record.bob_x;
    x.bb += record.bob_x * record.bob_x;
    p.aa += record.alice_p * record.alice_p;
    p.ab += record.alice_p * record.bob_p;
    p.bb += record.bob_p * record.bob_p;
  }
  if (!(x.aa > 0.0) || !(x.bb > 0.0) || !(p.aa > 0.0) || !(p.bb > 0.0)) {
    throw EstimationError("degenerate records: a second moment vanishes");
  }

  const double dn = static_cast<double>(n);
  const PairEstimate full = plug_in(x, p, dn);

  // Leave-one-out jackknife over the symmetrized estimators. The deltas to
  // the full-sample value are O(1/n), so they are accumulated directly to
  // dodge the cancellation a raw sum of squares would suffer.
  double sum_d_ab = 0.0, sum_d2_ab = 0.0;
  double sum_d_ba = 0.0, sum_d2_ba = 0.0;
  for (const ShotRecord& record : records) {
    MomentSums xk = x;
    MomentSums pk = p;
    xk.aa -= record.alice_x * record.alice_x;
    xk.ab -= record.alice_x * record.bob_x;
    xk.bb -= record.bob_x * record.bob_x;
    pk.aa -= record.alice_p * record.alice_p;
    pk.ab -= record.alice_p * record.bob_p;
    pk.bb -= record.bob_p * record.bob_p;
    const PairEstimate leave = plug_in(xk, pk, dn - 1.0);
    const double d_ab = leave.v_ab - full.v_ab;
    const double d_ba = leave.v_ba - full.v_ba;
    sum_d_ab += d_ab;
    sum_d2_ab += d_ab * d_ab;
    sum_d_ba += d_ba;
    sum_d2_ba += d_ba * d_ba;
  }
  const double var_ab =
      std::max(sum_d2_ab - sum_d_ab * sum_d_ab / dn, 0.0) * (dn - 1.0) / dn;
  const double var_ba =
      std::max(sum_d2_ba - sum_d_ba * sum_d_ba / dn, 0.0) * (dn - 1.0) / dn;

  ConditionalVariances result;
  result.v_ab = {full.v_ab, std::sqrt(var_ab), n};
  result.v_ba = {full.v_ba, std::sqrt(var_ba), n};
  return result;
}

double pearson_correlation(std::span<const double> a,
                           std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw EstimationError("correlation needs two equally sized series");
  }
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) {
    throw EstimationError("correlation undefined for a constant series");
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace cvqkd
