#ifndef VWTA_ESTIMATORS_HPP
#define VWTA_ESTIMATORS_HPP

#include <optional>
#include <stdexcept>
#include <vector>

#include "vwta/geometry.hpp"
#include "vwta/kernels.hpp"
#include "vwta/rng.hpp"

namespace vwta {

/* One conditional prediction: K candidate points with confidence scores,
 * plus a per-point spread for mixture-density heads. */
struct HypothesisSet {
  std::vector<Vec> points;
  std::vector<double> scores;
  std::vector<double> sigmas;  // empty unless the head predicts spreads

  std::vector<double> normalized_scores() const;
};

enum class EstimatorVariant { kDiracWTA, kUniformWTA, kKernelWTA, kVoronoiWTA, kHistogram, kMDN };

const char* variant_name(EstimatorVariant v);

struct EstimatorKind {
  EstimatorVariant variant = EstimatorVariant::kVoronoiWTA;
  std::optional<KernelSpec> kernel;  // required for kernel-smoothed variants
  int n_versors = 40;

  void validate() const;
};

struct NoDensityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SamplingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Kernel mass captured by Voronoi cell k, estimated in spherical coordinates:
 * average of radial_cell_mass at the directional radius over n_versors random
 * unit directions.  Exact in expectation because the cell is convex. */
double kernel_cell_volume(const VoronoiTessellation& tess, std::size_t k,
                          const KernelSpec& kernel, int n_versors, RngStream& rng);

/* Fraction of domain volume occupied by each cell, by uniform membership
 * counting with n_mc points.  Zero counts are floored at half a count so
 * volumes stay positive. */
std::vector<double> lebesgue_cell_fractions(const VoronoiTessellation& tess, int n_mc,
                                            RngStream& rng);

/* Binds one hypothesis set to a density model over the domain.  Volume
 * normalizers are Monte Carlo estimates, so they are computed once from
 * caller-provided streams (prepare); density evaluation never draws. */
class Estimator {
 public:
  Estimator(EstimatorKind kind, HypothesisSet hs, Domain domain);

  /* Computes whichever normalizers the variant needs.  n_mc is the sample
   * count for Lebesgue cell volumes. */
  void prepare(RngStream& versor_rng, RngStream& mc_rng, int n_mc = 100000);

  double density(const Vec& y) const;
  std::vector<Vec> sample(int n, RngStream& rng, int max_attempts = 100000) const;

  const EstimatorKind& kind() const { return kind_; }
  const HypothesisSet& hypotheses() const { return hs_; }
  const VoronoiTessellation& tessellation() const { return tess_; }
  const std::vector<double>& kernel_volumes() const { return kernel_volumes_; }
  const std::vector<double>& cell_fractions() const { return cell_fractions_; }

 private:
  Vec sample_one(std::size_t k, RngStream& rng, int max_attempts) const;
  Vec kernel_draw(const Vec& center, RngStream& rng) const;
  double bin_volume() const;

  EstimatorKind kind_;
  HypothesisSet hs_;
  Domain domain_;
  VoronoiTessellation tess_;
  std::vector<double> norm_scores_;
  std::vector<double> kernel_volumes_;
  std::vector<double> cell_fractions_;
  bool prepared_ = false;
};

/* Centers of a regular n_rows x n_cols grid over the domain (2-D),
 * row-major, each center in the middle of its bin. */
std::vector<Vec> histogram_grid(const Domain& domain, int n_rows, int n_cols);

/* Near-square factorization rows x cols = K with rows >= cols. */
std::pair<int, int> grid_shape(int K);

}  // namespace vwta

#endif
