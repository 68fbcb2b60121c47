#include "vwta/tuning.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace vwta {

SearchResult golden_section_min(const std::function<double(double)>& objective,
                                const SearchConfig& cfg) {
  if (!(cfg.lo < cfg.hi)) throw std::invalid_argument("golden_section_min: lo must be < hi");
  if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("golden_section_min: tolerance <= 0");
  if (cfg.max_iters < 1) throw std::invalid_argument("golden_section_min: max_iters < 1");

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double invphi2 = 1.0 - invphi;

  SearchResult res;
  std::map<double, double> cache;
  auto eval = [&](double h) {
    auto it = cache.find(h);
    if (it != cache.end()) return it->second;
    double v = objective(h);
    cache.emplace(h, v);
    ++res.evals;
    return v;
  };

  double a = cfg.lo, b = cfg.hi;
  double c = a + invphi2 * (b - a);
  double d = a + invphi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  int iter = 0;
  while (b - a > cfg.tolerance && iter < cfg.max_iters) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = a + invphi2 * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d);
    }
    ++iter;
  }
  res.hit_iter_cap = (b - a) > cfg.tolerance;
  res.h_star = 0.5 * (a + b);
  res.value = cache.begin()->second;
  for (const auto& [h, v] : cache) res.value = std::min(res.value, v);
  return res;
}

}  // namespace vwta
