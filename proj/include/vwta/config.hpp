#ifndef VWTA_CONFIG_HPP
#define VWTA_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vwta/datasets.hpp"
#include "vwta/estimators.hpp"
#include "vwta/tuning.hpp"

namespace vwta {

/* Everything one experiment needs, parsed from a flat key = value file.
 * The hash of the canonical rendering stamps every output row so results
 * from different configurations cannot be aggregated by accident. */
struct RunConfig {
  DatasetKind dataset = DatasetKind::kSingleGaussian;
  DatasetParams dparams;
  EstimatorVariant estimator = EstimatorVariant::kVoronoiWTA;
  KernelFamily kernel_family = KernelFamily::kGaussian;
  int K = 16;
  std::vector<double> h_values = {0.5};
  std::vector<std::uint64_t> seeds = {0};
  int n_train = 100000;
  int n_val = 25000;
  int n_test = 2000;
  int n_versors = 40;
  int volume_mc = 100000;
  int emd_samples = 500;
  int emd_inputs = 16;
  int epochs = 100;
  int batch = 1024;
  int hidden = 256;
  double lr = 1e-3;
  double wta_beta = 1.0;
  SearchConfig h_search;
  std::vector<int> theory_k = {9, 16, 25, 49, 100};
  int theory_mc = 10000;
  int theory_inputs = 10;

  std::string canonical_text() const;
  std::string hash() const;

  void set(const std::string& key, const std::string& value);
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

}  // namespace vwta

#endif
