#ifndef VWTA_GEOMETRY_HPP
#define VWTA_GEOMETRY_HPP

#include <cstddef>
#include <vector>

#include "vwta/rng.hpp"

namespace vwta {

using Vec = std::vector<double>;

double squared_distance(const Vec& a, const Vec& b);

/* Axis-aligned box, the support of every target distribution here. */
struct Domain {
  Vec lower;
  Vec upper;

  Domain(Vec lo, Vec hi);
  int dim() const { return static_cast<int>(lower.size()); }
  double volume() const;
  bool contains(const Vec& y) const;
  Vec sample(RngStream& rng) const;
};

/* Voronoi partition of a box induced by generator points.  Cells are the
 * open nearest-neighbor regions; membership queries resolve ties toward the
 * lowest generator index so the cells always cover the whole box. */
class VoronoiTessellation {
 public:
  VoronoiTessellation(std::vector<Vec> generators, Domain domain);

  std::size_t size() const { return generators_.size(); }
  int dim() const { return domain_.dim(); }
  const std::vector<Vec>& generators() const { return generators_; }
  const Domain& domain() const { return domain_; }

  /* True when construction had to separate coincident generators. */
  bool perturbed() const { return perturbed_; }

  std::size_t winner_index(const Vec& y) const;

  /* Distance from generator k to the cell boundary along unit direction s.
   * The cell is convex (bisector half-spaces intersected with the box), so
   * this is the exit distance of the ray.  Values below 1e-12 collapse to
   * zero: the generator sits on a boundary. */
  double directional_radius(std::size_t k, const Vec& s) const;

  double cell_diameter_bound(std::size_t k, const std::vector<Vec>& directions) const;
  double cell_diameter_bound(std::size_t k, int n_dirs, RngStream& rng) const;

 private:
  std::vector<Vec> generators_;
  Domain domain_;
  bool perturbed_ = false;
};

}  // namespace vwta

#endif
