#ifndef VWTA_TUNING_HPP
#define VWTA_TUNING_HPP

#include <functional>

namespace vwta {

struct SearchConfig {
  double lo = 0.1;
  double hi = 2.0;
  double tolerance = 0.1;
  int max_iters = 100;
};

struct SearchResult {
  double h_star = 0.0;   // midpoint of the final bracket
  double value = 0.0;    // best objective value seen
  int evals = 0;         // distinct objective evaluations
  bool hit_iter_cap = false;
};

/* Golden-section minimization of a unimodal scalar objective on [lo, hi].
 * Shrinks the bracket by the inverse golden ratio per iteration, one new
 * evaluation each; repeated query points are served from a cache.  Needs at
 * most 2 + ceil(log((hi-lo)/tol) / log(1/0.618...)) evaluations. */
SearchResult golden_section_min(const std::function<double(double)>& objective,
                                const SearchConfig& cfg);

}  // namespace vwta

#endif
