#ifndef VWTA_RUNNER_HPP
#define VWTA_RUNNER_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "vwta/checkpoint.hpp"
#include "vwta/config.hpp"
#include "vwta/estimators.hpp"
#include "vwta/metrics.hpp"
#include "vwta/nn.hpp"

namespace vwta {

/* Named substreams of the master seed, one per concern, so reordering one
 * consumer never perturbs another. */
RngStream stream_for(std::uint64_t seed, const std::string& label);

SyntheticDataset make_dataset(const RunConfig& cfg);
PairSet make_split(const SyntheticDataset& ds, int n, std::uint64_t seed,
                   const std::string& label);

HeadKind head_for(EstimatorVariant v);
MlpModel build_model(const RunConfig& cfg, std::uint64_t seed);

Estimator build_estimator(const RunConfig& cfg, std::optional<double> h, HypothesisSet hs,
                          const Domain& domain);

std::string checkpoint_path(const std::string& out_dir, const RunConfig& cfg,
                            std::uint64_t seed);

/* Command entry points; each returns a process exit code. */
int cmd_generate(const RunConfig& cfg, const std::string& out_dir);
int cmd_train(const RunConfig& cfg, const std::string& out_dir);
int cmd_eval(const RunConfig& cfg, const std::string& out_dir);
int cmd_sweep_h(const RunConfig& cfg, const std::string& out_dir);
int cmd_theory(const RunConfig& cfg, const std::string& out_dir);
int cmd_sample(const RunConfig& cfg, const std::string& out_dir, double x, int n);

}  // namespace vwta

#endif
