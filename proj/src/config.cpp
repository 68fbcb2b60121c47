#include "vwta/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vwta {

namespace {
std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

int parse_int(const std::string& s) {
  std::size_t pos = 0;
  long v = std::stol(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad integer: " + s);
  return int(v);
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

EstimatorVariant estimator_from_name(const std::string& name) {
  for (EstimatorVariant v :
       {EstimatorVariant::kDiracWTA, EstimatorVariant::kUniformWTA, EstimatorVariant::kKernelWTA,
        EstimatorVariant::kVoronoiWTA, EstimatorVariant::kHistogram, EstimatorVariant::kMDN})
    if (name == variant_name(v)) return v;
  throw std::invalid_argument("unknown estimator: " + name);
}
}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "dataset") {
    dataset = dataset_from_name(value);
  } else if (key == "estimator") {
    estimator = estimator_from_name(value);
  } else if (key == "kernel") {
    if (value == "gaussian")
      kernel_family = KernelFamily::kGaussian;
    else if (value == "uniform")
      kernel_family = KernelFamily::kUniform;
    else
      throw std::invalid_argument("unknown kernel: " + value);
  } else if (key == "K") {
    K = parse_int(value);
  } else if (key == "h") {
    h_values.clear();
    for (const std::string& s : split_list(value)) h_values.push_back(parse_double(s));
  } else if (key == "seeds") {
    seeds.clear();
    for (const std::string& s : split_list(value)) seeds.push_back(std::stoull(s));
  } else if (key == "n_train") {
    n_train = parse_int(value);
  } else if (key == "n_val") {
    n_val = parse_int(value);
  } else if (key == "n_test") {
    n_test = parse_int(value);
  } else if (key == "n_versors") {
    n_versors = parse_int(value);
  } else if (key == "volume_mc") {
    volume_mc = parse_int(value);
  } else if (key == "emd_samples") {
    emd_samples = parse_int(value);
  } else if (key == "emd_inputs") {
    emd_inputs = parse_int(value);
  } else if (key == "epochs") {
    epochs = parse_int(value);
  } else if (key == "batch") {
    batch = parse_int(value);
  } else if (key == "hidden") {
    hidden = parse_int(value);
  } else if (key == "lr") {
    lr = parse_double(value);
  } else if (key == "beta") {
    wta_beta = parse_double(value);
  } else if (key == "h_lo") {
    h_search.lo = parse_double(value);
  } else if (key == "h_hi") {
    h_search.hi = parse_double(value);
  } else if (key == "h_tol") {
    h_search.tolerance = parse_double(value);
  } else if (key == "h_max_iters") {
    h_search.max_iters = parse_int(value);
  } else if (key == "theory_k") {
    theory_k.clear();
    for (const std::string& s : split_list(value)) theory_k.push_back(parse_int(s));
  } else if (key == "theory_mc") {
    theory_mc = parse_int(value);
  } else if (key == "theory_inputs") {
    theory_inputs = parse_int(value);
  } else if (key == "sg_mean") {
    auto parts = split_list(value);
    if (parts.size() != 2) throw std::invalid_argument("sg_mean needs two components");
    dparams.sg_mean = {parse_double(parts[0]), parse_double(parts[1])};
  } else if (key == "sg_sigma") {
    dparams.sg_sigma = parse_double(value);
  } else if (key == "moons_noise") {
    dparams.moons_noise = parse_double(value);
  } else if (key == "u2g_sigma2") {
    dparams.u2g_sigma2 = parse_double(value);
  } else if (key == "u2g_sigma3") {
    dparams.u2g_sigma3 = parse_double(value);
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": missing '='");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    try {
      cfg.set(key, value);
    } catch (const std::exception& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string RunConfig::canonical_text() const {
  // keys emitted sorted so the rendering (and its hash) is order-free
  std::ostringstream out;
  out << "K=" << K << "\n";
  out << "batch=" << batch << "\n";
  out << "beta=" << fmt17(wta_beta) << "\n";
  out << "dataset=" << dataset_name(dataset) << "\n";
  out << "emd_inputs=" << emd_inputs << "\n";
  out << "emd_samples=" << emd_samples << "\n";
  out << "epochs=" << epochs << "\n";
  out << "estimator=" << variant_name(estimator) << "\n";
  out << "h=";
  for (std::size_t i = 0; i < h_values.size(); ++i)
    out << (i ? "," : "") << fmt17(h_values[i]);
  out << "\n";
  out << "h_hi=" << fmt17(h_search.hi) << "\n";
  out << "h_lo=" << fmt17(h_search.lo) << "\n";
  out << "h_max_iters=" << h_search.max_iters << "\n";
  out << "h_tol=" << fmt17(h_search.tolerance) << "\n";
  out << "hidden=" << hidden << "\n";
  out << "kernel=" << (kernel_family == KernelFamily::kGaussian ? "gaussian" : "uniform") << "\n";
  out << "lr=" << fmt17(lr) << "\n";
  out << "moons_noise=" << fmt17(dparams.moons_noise) << "\n";
  out << "n_test=" << n_test << "\n";
  out << "n_train=" << n_train << "\n";
  out << "n_val=" << n_val << "\n";
  out << "n_versors=" << n_versors << "\n";
  out << "seeds=";
  for (std::size_t i = 0; i < seeds.size(); ++i) out << (i ? "," : "") << seeds[i];
  out << "\n";
  out << "sg_mean=" << fmt17(dparams.sg_mean[0]) << "," << fmt17(dparams.sg_mean[1]) << "\n";
  out << "sg_sigma=" << fmt17(dparams.sg_sigma) << "\n";
  out << "theory_inputs=" << theory_inputs << "\n";
  out << "theory_k=";
  for (std::size_t i = 0; i < theory_k.size(); ++i) out << (i ? "," : "") << theory_k[i];
  out << "\n";
  out << "theory_mc=" << theory_mc << "\n";
  out << "u2g_sigma2=" << fmt17(dparams.u2g_sigma2) << "\n";
  out << "u2g_sigma3=" << fmt17(dparams.u2g_sigma3) << "\n";
  out << "volume_mc=" << volume_mc << "\n";
  return out.str();
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string RunConfig::hash() const { return hex64(fnv1a64(canonical_text())); }

}  // namespace vwta
