#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "vwta/checkpoint.hpp"
#include "vwta/config.hpp"
#include "vwta/metrics.hpp"
#include "vwta/runner.hpp"

using namespace vwta;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int line_count(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

// small, fast experiment shared by the command tests
RunConfig tiny_config() {
  return parse_config_text(
      "dataset = single_gaussian\n"
      "estimator = voronoi_wta\n"
      "kernel = gaussian\n"
      "K = 4\n"
      "h = 0.3, 0.6\n"
      "seeds = 0\n"
      "n_train = 300\n"
      "n_val = 100\n"
      "n_test = 40\n"
      "n_versors = 60\n"
      "volume_mc = 2000\n"
      "emd_samples = 16\n"
      "emd_inputs = 2\n"
      "epochs = 2\n"
      "batch = 64\n"
      "hidden = 8\n"
      "theory_mc = 500\n"
      "theory_inputs = 2\n");
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("cli: config parsing, comments, and quoting") {
  RunConfig cfg = parse_config_text(
      "# experiment header\n"
      "dataset = uniform_to_gaussians  # trailing comment\n"
      "estimator = \"kernel_wta\"\n"
      "kernel = uniform\n"
      "K = 25\n"
      "h = 0.1, 0.3, 1.0\n"
      "seeds = 1, 2, 3\n"
      "\n"
      "lr = 5e-4\n"
      "sg_mean = 0.1, -0.2\n");
  CHECK(cfg.dataset == DatasetKind::kUniformToGaussians);
  CHECK(cfg.estimator == EstimatorVariant::kKernelWTA);
  CHECK(cfg.kernel_family == KernelFamily::kUniform);
  CHECK(cfg.K == 25);
  REQUIRE(cfg.h_values.size() == 3);
  CHECK(cfg.h_values[1] == 0.3);
  REQUIRE(cfg.seeds.size() == 3);
  CHECK(cfg.seeds[2] == 3);
  CHECK(cfg.lr == 5e-4);
  CHECK(cfg.dparams.sg_mean[1] == -0.2);
  CHECK(cfg.epochs == 100);  // untouched defaults survive

  CHECK_THROWS_WITH_AS(parse_config_text("dataset=single_gaussian\nnope=1\n"),
                       doctest::Contains("line 2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("K four\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("K = four\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("estimator = parzen\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_file("missing.toml"), std::runtime_error);
}

TEST_CASE("cli: canonical text is order-free and parseable") {
  RunConfig a = parse_config_text("K = 9\ndataset = changing_damier\nlr = 0.002\n");
  RunConfig b = parse_config_text("lr = 0.002\n# noise\ndataset = changing_damier\nK = 9\n");
  CHECK(a.canonical_text() == b.canonical_text());
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);

  // the canonical rendering reparses to the same configuration
  RunConfig c = parse_config_text(a.canonical_text());
  CHECK(c.hash() == a.hash());

  RunConfig d = a;
  d.K = 10;
  CHECK(d.hash() != a.hash());

  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(255) == "00000000000000ff");
}

TEST_CASE("cli: hex doubles survive exactly") {
  std::vector<double> vals = {0.1, -0.0, 1e-300, 3.14159265358979323846, 12345.6789, -1.0};
  std::string hex = encode_doubles(vals);
  CHECK(hex.size() == vals.size() * 16);
  for (char ch : hex) CHECK(((ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f')));
  std::vector<double> back = decode_doubles(hex);
  REQUIRE(back.size() == vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    // bit-for-bit, including the sign of zero
    CHECK(std::memcmp(&back[i], &vals[i], sizeof(double)) == 0);
  }
  CHECK_THROWS_AS(decode_doubles("abc"), std::invalid_argument);   // not a multiple of 16
  CHECK_THROWS_AS(decode_doubles("000000000000000G"), std::invalid_argument);
}

TEST_CASE("cli: checkpoint round-trip is byte-identical") {
  auto rng = RngStream::from_label(3, "init");
  Checkpoint ckpt;
  ckpt.model = MlpModel::make(HeadKind::kMDN, 1, 2, 3, 8, rng);
  ckpt.log = {{0, 1.5, 1.4}, {1, 1.2, 1.1}};
  ckpt.best_epoch = 1;
  ckpt.seed = 9;
  ckpt.config_hash = "0123456789abcdef";

  std::string text = checkpoint_to_json(ckpt);
  Checkpoint back = checkpoint_from_json(text);
  CHECK(checkpoint_to_json(back) == text);
  CHECK(back.model.l1.w == ckpt.model.l1.w);
  CHECK(back.model.logvar_head.b == ckpt.model.logvar_head.b);
  CHECK(back.model.head == HeadKind::kMDN);
  CHECK(back.best_epoch == 1);
  CHECK(back.seed == 9);
  REQUIRE(back.log.size() == 2);
  CHECK(back.log[1].val_loss == 1.1);

  TempDir dir("cli_test_ckpt");
  std::string path = dir.str() + "/model.json";
  save_checkpoint(path, ckpt);
  Checkpoint loaded = load_checkpoint(path);
  CHECK(checkpoint_to_json(loaded) == text);

  nlohmann::json j = nlohmann::json::parse(text);
  j["format_version"] = 2;
  CHECK_THROWS_AS(checkpoint_from_json(j.dump()), std::runtime_error);
  CHECK_THROWS_AS(load_checkpoint(dir.str() + "/absent.json"), std::runtime_error);
}

TEST_CASE("cli: generate writes deterministic splits") {
  RunConfig cfg = tiny_config();
  TempDir dir("cli_test_gen");
  CHECK(cmd_generate(cfg, dir.str()) == 0);

  std::string train_path = dir.str() + "/data_single_gaussian_seed0_train.csv";
  auto from_file = read_pairs(train_path);
  SyntheticDataset ds = make_dataset(cfg);
  auto direct = make_split(ds, cfg.n_train, 0, "data/train");
  REQUIRE(from_file.size() == direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i) {
    CHECK(from_file[i].first == direct[i].first);
    CHECK(from_file[i].second == direct[i].second);
  }

  std::string before = slurp(train_path);
  CHECK(cmd_generate(cfg, dir.str()) == 0);
  CHECK(slurp(train_path) == before);

  CHECK(fs::exists(dir.str() + "/data_single_gaussian_seed0_val.csv"));
  CHECK(fs::exists(dir.str() + "/data_single_gaussian_seed0_test.csv"));

  RunConfig bad = cfg;
  bad.n_train = 0;
  CHECK_THROWS_AS(cmd_generate(bad, dir.str()), std::invalid_argument);
}

TEST_CASE("cli: train and eval produce stamped, reproducible reports") {
  RunConfig cfg = tiny_config();

  auto run_once = [&](const std::string& name) {
    TempDir dir(name);
    REQUIRE(cmd_train(cfg, dir.str()) == 0);
    std::string ckpt_file = checkpoint_path(dir.str(), cfg, 0);
    REQUIRE(fs::exists(ckpt_file));
    Checkpoint ckpt = load_checkpoint(ckpt_file);
    CHECK(ckpt.config_hash == cfg.hash());
    CHECK(int(ckpt.log.size()) == cfg.epochs);

    REQUIRE(cmd_eval(cfg, dir.str()) == 0);
    return std::pair{slurp(dir.str() + "/eval.jsonl"), slurp(dir.str() + "/eval.csv")};
  };

  auto [jsonl_a, csv_a] = run_once("cli_test_eval_a");
  auto [jsonl_b, csv_b] = run_once("cli_test_eval_b");
  CHECK(jsonl_a == jsonl_b);  // whole pipeline is deterministic
  CHECK(csv_a == csv_b);

  CHECK(line_count(jsonl_a) == 2);  // one row per bandwidth
  CHECK(line_count(csv_a) == 3);    // header plus two rows
  CHECK(csv_a.substr(0, csv_a.find('\n')) == metric_csv_header());

  std::istringstream rows(jsonl_a);
  std::string line;
  int i = 0;
  while (std::getline(rows, line)) {
    MetricReport r = metric_from_json_line(line);
    CHECK(r.config_hash == cfg.hash());
    CHECK(r.dataset == "single_gaussian");
    CHECK(r.estimator == "voronoi_wta");
    CHECK(*r.h == cfg.h_values[i]);
    CHECK(r.nll.has_value());
    CHECK(r.emd.has_value());
    CHECK(r.distortion.has_value());
    CHECK(r.theoretical_distortion.has_value());
    CHECK(*r.emd > 0.0);
    CHECK(*r.distortion > 0.0);
    CHECK(r.n_eval == cfg.n_test);
    ++i;
  }
  CHECK(i == 2);
}

TEST_CASE("cli: eval refuses to append rows from another configuration") {
  RunConfig cfg = tiny_config();
  TempDir dir("cli_test_mix");
  REQUIRE(cmd_train(cfg, dir.str()) == 0);
  REQUIRE(cmd_eval(cfg, dir.str()) == 0);

  RunConfig other = cfg;
  other.h_values = {0.9};  // different hash, same checkpoint shape
  CHECK(other.hash() != cfg.hash());
  CHECK_THROWS_AS(cmd_eval(other, dir.str()), std::runtime_error);

  // the original file is left untouched by the refusal
  CHECK(line_count(slurp(dir.str() + "/eval.jsonl")) == 2);
}

TEST_CASE("cli: point-mass rows carry the no-density marker") {
  RunConfig cfg = tiny_config();
  cfg.estimator = EstimatorVariant::kDiracWTA;
  TempDir dir("cli_test_dirac");
  REQUIRE(cmd_train(cfg, dir.str()) == 0);
  REQUIRE(cmd_eval(cfg, dir.str()) == 0);

  auto rows = load_reports(dir.str() + "/eval.jsonl");
  REQUIRE(rows.size() == 1);  // no bandwidth loop without a kernel
  CHECK(rows[0].no_density);
  CHECK_FALSE(rows[0].nll.has_value());
  CHECK_FALSE(rows[0].h.has_value());
  CHECK(rows[0].emd.has_value());
  CHECK(rows[0].distortion.has_value());

  // the csv leaves the likelihood cell empty
  std::string csv = slurp(dir.str() + "/eval.csv");
  std::string row = csv.substr(csv.find('\n') + 1);
  CHECK(row.find("dirac_wta,4,,0,,") != std::string::npos);
}

TEST_CASE("cli: sample writes the requested draws") {
  RunConfig cfg = tiny_config();
  TempDir dir("cli_test_sample");
  REQUIRE(cmd_train(cfg, dir.str()) == 0);

  REQUIRE(cmd_sample(cfg, dir.str(), 0.5, 25) == 0);
  auto rows = read_pairs(dir.str() + "/samples.csv");
  REQUIRE(rows.size() == 25);
  Domain box({-1.0, -1.0}, {1.0, 1.0});
  for (const auto& [x, y] : rows) {
    CHECK(x == 0.5);
    CHECK(box.contains(y));
  }

  REQUIRE(cmd_sample(cfg, dir.str(), 0.5, 0) == 0);
  CHECK(read_pairs(dir.str() + "/samples.csv").empty());

  CHECK_THROWS_AS(cmd_sample(cfg, dir.str(), 1.5, 5), std::invalid_argument);
  CHECK_THROWS_AS(cmd_sample(cfg, dir.str(), 0.5, -1), std::invalid_argument);
}

TEST_CASE("cli: bandwidth sweep writes the grid and the tuned pick") {
  RunConfig cfg = tiny_config();
  cfg.h_search.lo = 0.2;
  cfg.h_search.hi = 1.0;
  cfg.h_search.tolerance = 0.3;
  TempDir dir("cli_test_sweep");
  REQUIRE(cmd_train(cfg, dir.str()) == 0);
  REQUIRE(cmd_sweep_h(cfg, dir.str()) == 0);

  std::string sweep = slurp(dir.str() + "/sweep.csv");
  CHECK(sweep.substr(0, sweep.find('\n')) == "seed,h,nll_kernel_wta,nll_voronoi_wta");
  CHECK(line_count(sweep) == 3);  // header plus one row per h

  nlohmann::json tuned = nlohmann::json::parse(slurp(dir.str() + "/tuned_seed0.json"));
  double h_star = tuned.at("h_star").get<double>();
  CHECK(h_star >= cfg.h_search.lo);
  CHECK(h_star <= cfg.h_search.hi);
  CHECK(tuned.at("config_hash").get<std::string>() == cfg.hash());
  CHECK(tuned.at("evals").get<int>() >= 2);
}

TEST_CASE("cli: theory table covers the requested budgets") {
  RunConfig cfg = tiny_config();
  cfg.theory_k = {4, 16};
  TempDir dir("cli_test_theory");
  REQUIRE(cmd_theory(cfg, dir.str()) == 0);

  std::string csv = slurp(dir.str() + "/theory.csv");
  std::istringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "K,zador_risk,histogram_risk");
  int rows = 0;
  while (std::getline(ss, line)) {
    int K;
    double zr, hr;
    REQUIRE(std::sscanf(line.c_str(), "%d,%lf,%lf", &K, &zr, &hr) == 3);
    CHECK(K == cfg.theory_k[rows]);
    CHECK(zr > 0.0);
    CHECK(zr < hr);  // optimal placement beats the fixed grid
    ++rows;
  }
  CHECK(rows == 2);
}

TEST_CASE("cli: stream labels give independent reproducible streams") {
  auto a1 = stream_for(7, "data/train");
  auto a2 = stream_for(7, "data/train");
  auto b = stream_for(7, "data/val");
  auto c = stream_for(8, "data/train");
  double va = a1.uniform();
  CHECK(va == a2.uniform());
  CHECK(va != b.uniform());
  CHECK(va != c.uniform());
}
