#ifndef VWTA_RNG_HPP
#define VWTA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace vwta {

/* Counter-based generator (splitmix64).  Every consumer of randomness takes
 * one of these by reference, so replaying a stream from the same label and
 * master seed reproduces the exact draw sequence. */
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  /* Derives an independent stream from a master seed and a purpose label
   * ("init", "data/train", "versors", ...).  FNV-1a over the label folded
   * into the seed, then one mixing round so nearby seeds decorrelate. */
  static RngStream from_label(std::uint64_t master_seed, std::string_view label) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : label) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return RngStream(mix(master_seed + 0x9e3779b97f4a7c15ull * h));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  /* Uniform on [0,1) with 53 random bits. */
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /* Standard normal via Box-Muller; second deviate cached. */
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /* Uniformly distributed point on the unit sphere in R^d. */
  std::vector<double> unit_vector(int dim) {
    if (dim < 1) throw std::invalid_argument("unit_vector: dim must be >= 1");
    std::vector<double> v(dim);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (int i = 0; i < dim; ++i) {
        v[i] = gaussian();
        norm2 += v[i] * v[i];
      }
    } while (norm2 < 1e-24);
    double inv = 1.0 / std::sqrt(norm2);
    for (int i = 0; i < dim; ++i) v[i] *= inv;
    return v;
  }

  /* Index draw from nonnegative weights (need not be normalized). */
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("categorical: negative weight");
      total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("categorical: zero total weight");
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
      acc += weights[k];
      if (u < acc) return k;
    }
    return weights.size() - 1;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace vwta

#endif
