// Copyright 2026 The pathint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PATHINT_REDUCE_HPP
#define PATHINT_REDUCE_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "pathint/errors.hpp"

/**
 * \file
 * \brief Fixed-order reductions over paths.
 *
 * All ensemble statistics are summed in a pairwise tree whose shape depends only on the
 * number of terms, so a result is reproducible for a given path count regardless of how
 * the terms were produced.
 */

namespace pathint {

namespace detail {
inline constexpr std::size_t kPairwiseLeaf = 8;
}  // namespace detail

/// Pairwise sum of term(i) for i in [begin, end).
template <class Term>
double pairwise_sum(std::size_t begin, std::size_t end, Term&& term) {
  if (end - begin <= detail::kPairwiseLeaf) {
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      sum += term(i);
    }
    return sum;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

inline double pairwise_sum(std::span<const double> values) {
  return pairwise_sum(0, values.size(), [&](std::size_t i) { return values[i]; });
}

inline double mean(std::span<const double> values) {
  if (values.empty()) {
    throw InvalidArgument("mean of an empty range");
  }
  return pairwise_sum(values) / static_cast<double>(values.size());
}

/// Column sums of a row-major rows x cols block, each column reduced pairwise over rows.
inline std::vector<double> pairwise_column_sums(std::span<const double> data, std::size_t rows,
                                                std::size_t cols) {
  std::vector<double> out(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    out[c] = pairwise_sum(0, rows, [&](std::size_t r) { return data[r * cols + c]; });
  }
  return out;
}

/// Estimate with a standard error from equal contiguous batches.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

inline constexpr std::size_t kDefaultBatches = 10;

/**
 * Batch-means standard error. `estimator(begin, end)` evaluates the statistic on the
 * paths [begin, end); the reported value is the statistic on all paths and the standard
 * error is the spread of the per-batch values divided by sqrt(batches).
 */
template <class Estimator>
Estimate batched_estimate(std::size_t n, Estimator&& estimator,
                          std::size_t batches = kDefaultBatches) {
  if (n == 0) {
    throw InvalidArgument("batched estimate over zero paths");
  }
  Estimate result{estimator(std::size_t{0}, n), 0.0};
  if (batches < 2 || n < batches) {
    return result;
  }
  std::vector<double> values(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    values[b] = estimator(b * n / batches, (b + 1) * n / batches);
  }
  const double m = mean(values);
  const double ss = pairwise_sum(0, batches, [&](std::size_t b) {
    const double d = values[b] - m;
    return d * d;
  });
  const double var_of_batch = ss / static_cast<double>(batches - 1);
  result.std_error = std::sqrt(var_of_batch / static_cast<double>(batches));
  return result;
}

}  // namespace pathint

#endif  // PATHINT_REDUCE_HPP
