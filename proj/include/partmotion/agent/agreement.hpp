#pragma once

#include <vector>

namespace partmotion::agent {

// Binary correctness ratings: rows are rated items, columns are raters.
struct RatingsTable {
  std::vector<std::vector<int>> rows;
};

// Gwet's AC1 for two categories. p_a is the mean over items of the fraction
// of agreeing rater pairs, π the pooled share of positive ratings, and
// p_e = 2π(1 − π); AC1 = (p_a − p_e)/(1 − p_e).
// Throws Error(kInvalidAnnotation) for malformed tables (fewer than two raters,
// no items, ragged rows, entries other than 0/1) and Error(kDegenerate) when
// p_e = 1.
double gwetAc1(const RatingsTable& ratings);

}  // namespace partmotion::agent
