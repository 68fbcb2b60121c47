#include "vwta/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vwta {

std::string encode_doubles(const std::vector<double>& v) {
  std::string out;
  out.reserve(v.size() * 16);
  char buf[17];
  for (double d : v) {
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(d)));
    out += buf;
  }
  return out;
}

std::vector<double> decode_doubles(const std::string& hex) {
  if (hex.size() % 16 != 0) throw std::invalid_argument("decode_doubles: truncated hex");
  std::vector<double> out(hex.size() / 16);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < 16; ++j) {
      char c = hex[i * 16 + j];
      std::uint64_t nib;
      if (c >= '0' && c <= '9')
        nib = c - '0';
      else if (c >= 'a' && c <= 'f')
        nib = 10 + (c - 'a');
      else
        throw std::invalid_argument("decode_doubles: bad hex digit");
      bits = (bits << 4) | nib;
    }
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

namespace {
void put_layer(nlohmann::json& params, const std::string& name, const DenseLayer& l) {
  if (l.empty()) return;
  params[name + ".in"] = l.in;
  params[name + ".out"] = l.out;
  params[name + ".w"] = encode_doubles(l.w);
  params[name + ".b"] = encode_doubles(l.b);
}

DenseLayer get_layer(const nlohmann::json& params, const std::string& name) {
  DenseLayer l;
  if (!params.contains(name + ".out")) return l;
  l.in = params.at(name + ".in").get<int>();
  l.out = params.at(name + ".out").get<int>();
  l.w = decode_doubles(params.at(name + ".w").get<std::string>());
  l.b = decode_doubles(params.at(name + ".b").get<std::string>());
  if (int(l.w.size()) != l.in * l.out || int(l.b.size()) != l.out)
    throw std::runtime_error("checkpoint: layer " + name + " has inconsistent shape");
  return l;
}

HeadKind head_from_name(const std::string& name) {
  for (HeadKind h : {HeadKind::kWTAScoring, HeadKind::kMDN, HeadKind::kHistogram})
    if (name == head_name(h)) return h;
  throw std::runtime_error("checkpoint: unknown head " + name);
}
}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  nlohmann::json j;
  j["format_version"] = ckpt.format_version;
  j["head"] = head_name(ckpt.model.head);
  j["in_dim"] = ckpt.model.in_dim;
  j["out_dim"] = ckpt.model.out_dim;
  j["K"] = ckpt.model.K;
  j["hidden"] = ckpt.model.hidden;
  j["grid_rows"] = ckpt.model.grid_rows;
  j["grid_cols"] = ckpt.model.grid_cols;
  j["domain_lower"] = encode_doubles(ckpt.model.domain_lower);
  j["domain_upper"] = encode_doubles(ckpt.model.domain_upper);
  nlohmann::json params = nlohmann::json::object();
  put_layer(params, "l1", ckpt.model.l1);
  put_layer(params, "l2", ckpt.model.l2);
  put_layer(params, "hyp_head", ckpt.model.hyp_head);
  put_layer(params, "score_head", ckpt.model.score_head);
  put_layer(params, "logvar_head", ckpt.model.logvar_head);
  j["params"] = params;
  nlohmann::json log = nlohmann::json::array();
  for (const EpochLog& e : ckpt.log)
    log.push_back({{"epoch", e.epoch},
                   {"train_loss", encode_doubles({e.train_loss})},
                   {"val_loss", encode_doubles({e.val_loss})}});
  j["training_log"] = log;
  j["best_epoch"] = ckpt.best_epoch;
  j["seed"] = ckpt.seed;
  j["config_hash"] = ckpt.config_hash;
  return j.dump(2) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Checkpoint ckpt;
  ckpt.format_version = j.at("format_version").get<int>();
  if (ckpt.format_version != 1)
    throw std::runtime_error("checkpoint: unsupported format_version " +
                             std::to_string(ckpt.format_version));
  MlpModel& m = ckpt.model;
  m.head = head_from_name(j.at("head").get<std::string>());
  m.in_dim = j.at("in_dim").get<int>();
  m.out_dim = j.at("out_dim").get<int>();
  m.K = j.at("K").get<int>();
  m.hidden = j.at("hidden").get<int>();
  m.grid_rows = j.at("grid_rows").get<int>();
  m.grid_cols = j.at("grid_cols").get<int>();
  m.domain_lower = decode_doubles(j.at("domain_lower").get<std::string>());
  m.domain_upper = decode_doubles(j.at("domain_upper").get<std::string>());
  const nlohmann::json& params = j.at("params");
  m.l1 = get_layer(params, "l1");
  m.l2 = get_layer(params, "l2");
  m.hyp_head = get_layer(params, "hyp_head");
  m.score_head = get_layer(params, "score_head");
  m.logvar_head = get_layer(params, "logvar_head");
  for (const nlohmann::json& e : j.at("training_log"))
    ckpt.log.push_back({e.at("epoch").get<int>(),
                        decode_doubles(e.at("train_loss").get<std::string>()).at(0),
                        decode_doubles(e.at("val_loss").get<std::string>()).at(0)});
  ckpt.best_epoch = j.at("best_epoch").get<int>();
  ckpt.seed = j.at("seed").get<std::uint64_t>();
  ckpt.config_hash = j.at("config_hash").get<std::string>();
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << checkpoint_to_json(ckpt);
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace vwta
