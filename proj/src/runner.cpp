#include "vwta/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "vwta/tuning.hpp"

namespace vwta {

namespace fs = std::filesystem;

RngStream stream_for(std::uint64_t seed, const std::string& label) {
  return RngStream::from_label(seed, label);
}

SyntheticDataset make_dataset(const RunConfig& cfg) {
  return SyntheticDataset(cfg.dataset, cfg.dparams);
}

PairSet make_split(const SyntheticDataset& ds, int n, std::uint64_t seed,
                   const std::string& label) {
  RngStream rng = stream_for(seed, label);
  return draw_pairs(ds, n, rng);
}

HeadKind head_for(EstimatorVariant v) {
  switch (v) {
    case EstimatorVariant::kHistogram: return HeadKind::kHistogram;
    case EstimatorVariant::kMDN: return HeadKind::kMDN;
    default: return HeadKind::kWTAScoring;
  }
}

MlpModel build_model(const RunConfig& cfg, std::uint64_t seed) {
  RngStream init = stream_for(seed, "init");
  if (cfg.estimator == EstimatorVariant::kHistogram) {
    auto [rows, cols] = grid_shape(cfg.K);
    return MlpModel::make_histogram(1, rows, cols, Domain({-1.0, -1.0}, {1.0, 1.0}),
                                    cfg.hidden, init);
  }
  return MlpModel::make(head_for(cfg.estimator), 1, 2, cfg.K, cfg.hidden, init);
}

Estimator build_estimator(const RunConfig& cfg, std::optional<double> h, HypothesisSet hs,
                          const Domain& domain) {
  EstimatorKind kind;
  kind.variant = cfg.estimator;
  kind.n_versors = cfg.n_versors;
  if (cfg.estimator == EstimatorVariant::kKernelWTA ||
      cfg.estimator == EstimatorVariant::kVoronoiWTA) {
    if (!h) throw std::invalid_argument("kernel-smoothed estimator needs a bandwidth");
    kind.kernel = KernelSpec(cfg.kernel_family, *h, domain.dim());
  }
  return Estimator(kind, std::move(hs), domain);
}

std::string checkpoint_path(const std::string& out_dir, const RunConfig& cfg,
                            std::uint64_t seed) {
  return out_dir + "/checkpoint_" + std::string(dataset_name(cfg.dataset)) + "_" +
         head_name(head_for(cfg.estimator)) + "_K" + std::to_string(cfg.K) + "_seed" +
         std::to_string(seed) + ".json";
}

namespace {
void ensure_dir(const std::string& out_dir) { fs::create_directories(out_dir); }

std::string split_path(const std::string& out_dir, const RunConfig& cfg, std::uint64_t seed,
                       const char* split) {
  return out_dir + "/data_" + dataset_name(cfg.dataset) + "_seed" + std::to_string(seed) + "_" +
         split + ".csv";
}

/* Mean Zador risk of the ground-truth conditional over a grid of inputs.
 * Unavailable for the KDE-backed family unless allow_kde is set. */
std::optional<double> mean_zador_risk(const RunConfig& cfg, const SyntheticDataset& ds,
                                      std::uint64_t seed, bool allow_kde) {
  GroundTruthDensity gt(ds);
  if (gt.needs_reference() && !allow_kde) return std::nullopt;
  RngStream mc = stream_for(seed, "zador/mc");
  RngStream kde = stream_for(seed, "zador/kde");
  double acc = 0.0;
  for (int i = 0; i < cfg.theory_inputs; ++i) {
    double x = (i + 0.5) / double(cfg.theory_inputs);
    gt.prepare(x, kde);
    auto rho = [&](const Vec& y) { return gt.density(x, y); };
    acc += zador_theoretical_risk(rho, ds.domain(), cfg.K, cfg.theory_mc, mc);
  }
  return acc / double(cfg.theory_inputs);
}

MetricReport eval_row(const RunConfig& cfg, const SyntheticDataset& ds, const MlpModel& model,
                      std::uint64_t seed, std::optional<double> h, const std::string& tag,
                      const PairSet& test_set) {
  const Domain& domain = ds.domain();
  RngStream versors = stream_for(seed, "versors/" + tag);
  RngStream mc = stream_for(seed, "mc/" + tag);
  RngStream sampling = stream_for(seed, "sampling/" + tag);

  MetricReport row;
  row.dataset = dataset_name(cfg.dataset);
  row.estimator = variant_name(cfg.estimator);
  row.K = cfg.K;
  row.h = h;
  row.seed = seed;
  row.n_eval = int(test_set.size());
  row.config_hash = cfg.hash();

  bool has_density = cfg.estimator != EstimatorVariant::kDiracWTA;
  double nll_acc = 0.0;
  int floor_hits = 0;
  double distortion_acc = 0.0;
  for (const auto& [x, y] : test_set) {
    HypothesisSet hs = model.forward(x);
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& p : hs.points) best = std::min(best, squared_distance(y, p));
    distortion_acc += best;
    if (!has_density) continue;
    Estimator est = build_estimator(cfg, h, std::move(hs), domain);
    est.prepare(versors, mc, cfg.volume_mc);
    double rho = est.density(y);
    if (rho < 1e-300) {
      rho = 1e-300;
      ++floor_hits;
    }
    nll_acc -= std::log(rho);
  }
  row.distortion = distortion_acc / double(test_set.size());
  if (has_density) {
    row.nll = nll_acc / double(test_set.size());
    row.nll_floor_hits = floor_hits;
  } else {
    row.no_density = true;
  }

  if (cfg.emd_inputs > 0 && cfg.emd_samples > 0) {
    RngStream gt_rng = stream_for(seed, "emd/gt/" + tag);
    double emd_acc = 0.0;
    for (int j = 0; j < cfg.emd_inputs; ++j) {
      double x = (j + 0.5) / double(cfg.emd_inputs);
      std::vector<Vec> truth;
      truth.reserve(cfg.emd_samples);
      for (int i = 0; i < cfg.emd_samples; ++i) truth.push_back(ds.sample_target(x, gt_rng));
      Estimator est = build_estimator(cfg, h, model.forward(x), domain);
      est.prepare(versors, mc, cfg.volume_mc);
      emd_acc += emd(est.sample(cfg.emd_samples, sampling), truth);
    }
    row.emd = emd_acc / double(cfg.emd_inputs);
  }

  if (cfg.estimator == EstimatorVariant::kHistogram)
    row.theoretical_distortion = histogram_theoretical_risk(domain.volume(), cfg.K, domain.dim());
  else
    row.theoretical_distortion = mean_zador_risk(cfg, ds, seed, /*allow_kde=*/false);
  return row;
}
}  // namespace

int cmd_generate(const RunConfig& cfg, const std::string& out_dir) {
  if (cfg.n_train < 1 || cfg.n_val < 1 || cfg.n_test < 1)
    throw std::invalid_argument("generate: split sizes must be positive");
  ensure_dir(out_dir);
  SyntheticDataset ds = make_dataset(cfg);
  for (std::uint64_t seed : cfg.seeds) {
    write_pairs(split_path(out_dir, cfg, seed, "train"),
                make_split(ds, cfg.n_train, seed, "data/train"));
    write_pairs(split_path(out_dir, cfg, seed, "val"), make_split(ds, cfg.n_val, seed, "data/val"));
    write_pairs(split_path(out_dir, cfg, seed, "test"),
                make_split(ds, cfg.n_test, seed, "data/test"));
    std::printf("generate: %s seed %llu -> %s/{train,val,test} (config %s)\n",
                dataset_name(cfg.dataset), (unsigned long long)seed, out_dir.c_str(),
                cfg.hash().c_str());
  }
  return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  SyntheticDataset ds = make_dataset(cfg);
  for (std::uint64_t seed : cfg.seeds) {
    PairSet train_set = make_split(ds, cfg.n_train, seed, "data/train");
    PairSet val_set = make_split(ds, cfg.n_val, seed, "data/val");
    MlpModel model = build_model(cfg, seed);
    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.batch_size = cfg.batch;
    tc.lr = cfg.lr;
    tc.wta_beta = cfg.wta_beta;
    RngStream shuffle = stream_for(seed, "shuffle");
    TrainResult result;
    try {
      result = train(std::move(model), train_set, val_set, tc, shuffle);
    } catch (const MdnOverflowError& e) {
      std::fprintf(stderr, "train: seed %llu failed: %s\n", (unsigned long long)seed, e.what());
      return 1;
    }
    Checkpoint ckpt;
    ckpt.model = result.model;
    ckpt.log = result.log;
    ckpt.best_epoch = result.best_epoch;
    ckpt.seed = seed;
    ckpt.config_hash = cfg.hash();
    std::string path = checkpoint_path(out_dir, cfg, seed);
    save_checkpoint(path, ckpt);
    std::printf("train: seed %llu best epoch %d val %.6f -> %s\n", (unsigned long long)seed,
                result.best_epoch, result.log[result.best_epoch].val_loss, path.c_str());
  }
  return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  SyntheticDataset ds = make_dataset(cfg);
  bool kernelized = cfg.estimator == EstimatorVariant::kKernelWTA ||
                    cfg.estimator == EstimatorVariant::kVoronoiWTA;
  std::string jsonl = out_dir + "/eval.jsonl";
  std::string csv = out_dir + "/eval.csv";
  std::string hash = cfg.hash();
  if (fs::exists(jsonl)) load_reports(jsonl, &hash);  // refuse to mix configurations

  std::vector<MetricReport> rows;
  for (std::uint64_t seed : cfg.seeds) {
    Checkpoint ckpt = load_checkpoint(checkpoint_path(out_dir, cfg, seed));
    PairSet test_set = make_split(ds, cfg.n_test, seed, "data/test");
    if (kernelized) {
      for (std::size_t i = 0; i < cfg.h_values.size(); ++i)
        rows.push_back(eval_row(cfg, ds, ckpt.model, seed, cfg.h_values[i],
                                "h" + std::to_string(i), test_set));
    } else {
      rows.push_back(eval_row(cfg, ds, ckpt.model, seed, std::nullopt, "nokernel", test_set));
    }
  }
  append_report_lines(jsonl, csv, rows);
  for (const MetricReport& r : rows)
    std::printf("eval: %s\n", metric_csv_row(r).c_str());
  return 0;
}

int cmd_sweep_h(const RunConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  SyntheticDataset ds = make_dataset(cfg);
  std::string path = out_dir + "/sweep.csv";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("sweep-h: cannot open " + path);
  out << "seed,h,nll_kernel_wta,nll_voronoi_wta\n";

  RunConfig kcfg = cfg;
  kcfg.estimator = EstimatorVariant::kKernelWTA;
  RunConfig vcfg = cfg;
  vcfg.estimator = EstimatorVariant::kVoronoiWTA;

  for (std::uint64_t seed : cfg.seeds) {
    Checkpoint ckpt = load_checkpoint(checkpoint_path(out_dir, cfg, seed));
    PairSet val_set = make_split(ds, cfg.n_val, seed, "data/val");

    auto val_nll = [&](const RunConfig& rc, double h, const std::string& tag) {
      RngStream versors = stream_for(seed, "versors/sweep/" + tag);
      RngStream mc = stream_for(seed, "mc/sweep/" + tag);
      auto density = [&](double x, const Vec& y) {
        Estimator est = build_estimator(rc, h, ckpt.model.forward(x), ds.domain());
        est.prepare(versors, mc, rc.volume_mc);
        return est.density(y);
      };
      return empirical_nll(density, val_set).nll;
    };

    for (std::size_t i = 0; i < cfg.h_values.size(); ++i) {
      double h = cfg.h_values[i];
      char buf[256];
      std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g\n", (unsigned long long)seed, h,
                    val_nll(kcfg, h, "k" + std::to_string(i)),
                    val_nll(vcfg, h, "v" + std::to_string(i)));
      out << buf;
    }

    int calls = 0;
    auto objective = [&](double h) {
      return val_nll(vcfg, h, "tune" + std::to_string(calls++));
    };
    SearchResult tuned = golden_section_min(objective, cfg.h_search);
    std::printf("sweep-h: seed %llu tuned h* %.6f val-nll %.6f (%d evals%s, config %s)\n",
                (unsigned long long)seed, tuned.h_star, tuned.value, tuned.evals,
                tuned.hit_iter_cap ? ", iter cap hit" : "", cfg.hash().c_str());
    std::ofstream tj(out_dir + "/tuned_seed" + std::to_string(seed) + ".json");
    tj << "{\"h_star\": " << tuned.h_star << ", \"value\": " << tuned.value
       << ", \"evals\": " << tuned.evals << ", \"config_hash\": \"" << cfg.hash() << "\"}\n";
  }
  return 0;
}

int cmd_theory(const RunConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  SyntheticDataset ds = make_dataset(cfg);
  std::string csv = out_dir + "/theory.csv";
  std::ofstream out(csv);
  if (!out) throw std::runtime_error("theory: cannot open " + csv);
  out << "K,zador_risk,histogram_risk\n";
  std::uint64_t seed = cfg.seeds.empty() ? 0 : cfg.seeds[0];
  for (int K : cfg.theory_k) {
    RunConfig kc = cfg;
    kc.K = K;
    auto zador = mean_zador_risk(kc, ds, seed, /*allow_kde=*/true);
    double hist = histogram_theoretical_risk(ds.domain().volume(), K, ds.domain().dim());
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", K, *zador, hist);
    out << buf;
    std::printf("theory: %s K=%d zador %.6g histogram %.6g\n", dataset_name(cfg.dataset), K,
                *zador, hist);
  }
  return 0;
}

int cmd_sample(const RunConfig& cfg, const std::string& out_dir, double x, int n) {
  if (n < 0) throw std::invalid_argument("sample: n must be >= 0");
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("sample: x must lie in [0,1]");
  ensure_dir(out_dir);
  SyntheticDataset ds = make_dataset(cfg);
  std::uint64_t seed = cfg.seeds.empty() ? 0 : cfg.seeds[0];
  Checkpoint ckpt = load_checkpoint(checkpoint_path(out_dir, cfg, seed));
  std::optional<double> h;
  if (cfg.estimator == EstimatorVariant::kKernelWTA ||
      cfg.estimator == EstimatorVariant::kVoronoiWTA)
    h = cfg.h_values.at(0);
  Estimator est = build_estimator(cfg, h, ckpt.model.forward(x), ds.domain());
  RngStream versors = stream_for(seed, "versors/sample");
  RngStream mc = stream_for(seed, "mc/sample");
  RngStream sampling = stream_for(seed, "sampling/sample");
  est.prepare(versors, mc, cfg.volume_mc);

  std::string path = out_dir + "/samples.csv";
  std::vector<std::pair<double, Vec>> rows;
  for (const Vec& y : est.sample(n, sampling)) rows.push_back({x, y});
  write_pairs(path, rows);
  std::printf("sample: %d draws at x=%.4f -> %s (config %s)\n", n, x, path.c_str(),
              cfg.hash().c_str());
  return 0;
}

}  // namespace vwta
