#ifndef VWTA_CHECKPOINT_HPP
#define VWTA_CHECKPOINT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vwta/nn.hpp"

namespace vwta {

/* Trained model plus provenance.  Serialized as versioned JSON; parameters
 * are hex-encoded IEEE-754 bit patterns, so save -> load -> save is
 * byte-identical and no precision is lost in text. */
struct Checkpoint {
  int format_version = 1;
  MlpModel model;
  std::vector<EpochLog> log;
  int best_epoch = -1;
  std::uint64_t seed = 0;
  std::string config_hash;
};

std::string encode_doubles(const std::vector<double>& v);
std::vector<double> decode_doubles(const std::string& hex);

std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace vwta

#endif
