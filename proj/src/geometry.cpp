#include "vwta/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vwta {

double squared_distance(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

Domain::Domain(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.empty() || lower.size() != upper.size())
    throw std::invalid_argument("Domain: bound vectors empty or mismatched");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i]))
      throw std::invalid_argument("Domain: lower bound must be strictly below upper");
}

double Domain::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lower.size(); ++i) v *= upper[i] - lower[i];
  return v;
}

bool Domain::contains(const Vec& y) const {
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (y[i] < lower[i] || y[i] > upper[i]) return false;
  return true;
}

Vec Domain::sample(RngStream& rng) const {
  Vec y(lower.size());
  for (std::size_t i = 0; i < lower.size(); ++i) y[i] = rng.uniform(lower[i], upper[i]);
  return y;
}

VoronoiTessellation::VoronoiTessellation(std::vector<Vec> generators, Domain domain)
    : generators_(std::move(generators)), domain_(std::move(domain)) {
  if (generators_.empty()) throw std::invalid_argument("VoronoiTessellation: no generators");
  const std::size_t d = domain_.lower.size();
  for (std::size_t k = 0; k < generators_.size(); ++k) {
    if (generators_[k].size() != d)
      throw std::invalid_argument("VoronoiTessellation: generator dimension mismatch");
    if (!domain_.contains(generators_[k]))
      throw std::invalid_argument("VoronoiTessellation: generator " + std::to_string(k) +
                                  " outside domain");
  }
  // Coincident generators would produce empty cells and zero volumes
  // downstream; nudge repeats apart along axis 0, staying inside the box.
  for (std::size_t k = 1; k < generators_.size(); ++k) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t j = 0; j < k; ++j) {
        if (squared_distance(generators_[k], generators_[j]) < 1e-9 * 1e-9) {
          double step = (generators_[k][0] + 1e-8 <= domain_.upper[0]) ? 1e-8 : -1e-8;
          generators_[k][0] += step;
          perturbed_ = true;
          moved = true;
        }
      }
    }
  }
}

std::size_t VoronoiTessellation::winner_index(const Vec& y) const {
  std::size_t best = 0;
  double best_d = squared_distance(y, generators_[0]);
  for (std::size_t k = 1; k < generators_.size(); ++k) {
    double d = squared_distance(y, generators_[k]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

double VoronoiTessellation::directional_radius(std::size_t k, const Vec& s) const {
  if (k >= generators_.size()) throw std::invalid_argument("directional_radius: bad index");
  const std::size_t d = s.size();
  if (d != generators_[k].size())
    throw std::invalid_argument("directional_radius: direction dimension mismatch");
  double norm2 = 0.0;
  for (double c : s) norm2 += c * c;
  if (std::fabs(norm2 - 1.0) > 2e-9)
    throw std::invalid_argument("directional_radius: direction must be a unit vector");

  const Vec& g = generators_[k];
  double radius = std::numeric_limits<double>::infinity();

  // Bisector with each other generator: the ray leaves the half-space
  // closer to g at u = (|n|^2 / 2) / (s.n) with n = g_j - g.
  for (std::size_t j = 0; j < generators_.size(); ++j) {
    if (j == k) continue;
    double sn = 0.0, nn = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double n = generators_[j][i] - g[i];
      sn += s[i] * n;
      nn += n * n;
    }
    if (sn > 0.0) radius = std::min(radius, 0.5 * nn / sn);
  }

  // Box faces.
  for (std::size_t i = 0; i < d; ++i) {
    if (s[i] > 0.0)
      radius = std::min(radius, (domain_.upper[i] - g[i]) / s[i]);
    else if (s[i] < 0.0)
      radius = std::min(radius, (domain_.lower[i] - g[i]) / s[i]);
  }

  if (radius < 1e-12) return 0.0;
  return radius;
}

double VoronoiTessellation::cell_diameter_bound(std::size_t k,
                                                const std::vector<Vec>& directions) const {
  if (directions.empty())
    throw std::invalid_argument("cell_diameter_bound: need at least one direction");
  double max_r = 0.0;
  for (const Vec& s : directions) max_r = std::max(max_r, directional_radius(k, s));
  return 2.0 * max_r;
}

double VoronoiTessellation::cell_diameter_bound(std::size_t k, int n_dirs,
                                                RngStream& rng) const {
  if (n_dirs < 1) throw std::invalid_argument("cell_diameter_bound: n_dirs must be >= 1");
  double max_r = 0.0;
  for (int i = 0; i < n_dirs; ++i)
    max_r = std::max(max_r, directional_radius(k, rng.unit_vector(dim())));
  return 2.0 * max_r;
}

}  // namespace vwta
