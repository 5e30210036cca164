#include "partmotion/agent/agreement.hpp"

#include "partmotion/common/error.hpp"

namespace partmotion::agent {

double gwetAc1(const RatingsTable& ratings) {
  if (ratings.rows.empty()) {
    throw Error(ErrorCode::kInvalidAnnotation, "ratings table has no items");
  }
  const std::size_t raters = ratings.rows.front().size();
  if (raters < 2) {
    throw Error(ErrorCode::kInvalidAnnotation, "ratings table needs at least two raters");
  }
  double agreement = 0.0;
  double positives = 0.0;
  const double pairs = static_cast<double>(raters * (raters - 1)) / 2.0;
  for (const auto& row : ratings.rows) {
    if (row.size() != raters) {
      throw Error(ErrorCode::kInvalidAnnotation, "ratings rows must all have one entry per rater");
    }
    double ones = 0.0;
    for (int v : row) {
      if (v != 0 && v != 1) {
        throw Error(ErrorCode::kInvalidAnnotation, "ratings must be 0 or 1");
      }
      ones += v;
    }
    const double zeros = static_cast<double>(raters) - ones;
    agreement += (ones * (ones - 1.0) / 2.0 + zeros * (zeros - 1.0) / 2.0) / pairs;
    positives += ones;
  }
  const double items = static_cast<double>(ratings.rows.size());
  const double pa = agreement / items;
  const double pi = positives / (items * static_cast<double>(raters));
  const double pe = 2.0 * pi * (1.0 - pi);
  if (pe >= 1.0) {
    throw Error(ErrorCode::kDegenerate, "chance agreement equals 1");
  }
  return (pa - pe) / (1.0 - pe);
}

}  // namespace partmotion::agent
