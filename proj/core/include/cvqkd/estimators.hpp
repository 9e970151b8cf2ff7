#pragma once

#include <span>

#include "cvqkd/protocol.hpp"

namespace cvqkd {

struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EstimateWithCI {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

struct ConditionalVariances {
  EstimateWithCI v_ab;
  EstimateWithCI v_ba;
};

// Plug-in moment estimators of the two conditional variances between the
// sender's draws and the receiver's readings, symmetrized over the two
// quadratures, with jackknife standard errors. The protocol guarantees zero
// means, so raw second moments are used. Requires n >= 1000 and
// non-degenerate inputs.
ConditionalVariances estimate_conditional_variances(
    std::span<const ShotRecord> records);

// Pearson correlation of two equally sized series.
double pearson_correlation(std::span<const double> a,
                           std::span<const double> b);

}  // namespace cvqkd
