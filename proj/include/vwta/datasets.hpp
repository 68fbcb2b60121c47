#ifndef VWTA_DATASETS_HPP
#define VWTA_DATASETS_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vwta/geometry.hpp"
#include "vwta/rng.hpp"

namespace vwta {

enum class DatasetKind { kSingleGaussian, kRotatingTwoMoons, kChangingDamier, kUniformToGaussians };

const char* dataset_name(DatasetKind k);
DatasetKind dataset_from_name(const std::string& name);

struct DatasetParams {
  Vec sg_mean = {0.25, 0.25};
  double sg_sigma = 0.25;
  double moons_noise = 0.1;
  Vec u2g_c2 = {-0.5, 0.5};
  double u2g_sigma2 = 0.2;
  Vec u2g_c3 = {0.5, -0.5};
  double u2g_sigma3 = 0.05;
};

/* Conditional distributions over targets in [-1,1]^2 indexed by a scalar
 * input in [0,1].  Sampling never emits points outside the box; anything the
 * base law puts outside is redrawn. */
class SyntheticDataset {
 public:
  SyntheticDataset(DatasetKind kind, DatasetParams params = {});

  DatasetKind kind() const { return kind_; }
  const DatasetParams& params() const { return params_; }
  const Domain& domain() const { return domain_; }

  double sample_input(RngStream& rng) const { return rng.uniform(); }
  Vec sample_target(double x, RngStream& rng) const;
  std::pair<double, Vec> sample_pair(RngStream& rng) const;

 private:
  Vec moons_target(double x, RngStream& rng) const;
  Vec damier_target(double x, RngStream& rng) const;
  Vec u2g_target(double x, RngStream& rng) const;

  DatasetKind kind_;
  DatasetParams params_;
  Domain domain_;
};

struct DensityUnavailableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Ground-truth conditional density.  Closed form everywhere except the
 * two-moons family, which is scored through a kernel density surrogate
 * (Gaussian, bandwidth 0.2) over 10^4 reference targets built per input by
 * prepare(); querying an unprepared input raises DensityUnavailableError. */
class GroundTruthDensity {
 public:
  explicit GroundTruthDensity(const SyntheticDataset& ds) : ds_(&ds) {}

  bool needs_reference() const { return ds_->kind() == DatasetKind::kRotatingTwoMoons; }
  void prepare(double x, RngStream& rng);
  bool available(double x) const;
  double density(double x, const Vec& y) const;

  static constexpr int kKdeReferenceSize = 10000;
  static constexpr double kKdeBandwidth = 0.2;

 private:
  const SyntheticDataset* ds_;
  std::map<double, std::vector<Vec>> kde_refs_;
};

/* Text dump: header "x,y1,y2", one record per line, 17 significant digits
 * so doubles re-parse exactly. */
void write_pairs(const std::string& path, const std::vector<std::pair<double, Vec>>& pairs);
std::vector<std::pair<double, Vec>> read_pairs(const std::string& path);

std::vector<std::pair<double, Vec>> draw_pairs(const SyntheticDataset& ds, int n,
                                               RngStream& rng);

double normal_cdf(double t);

}  // namespace vwta

#endif
