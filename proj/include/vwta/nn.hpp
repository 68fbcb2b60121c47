#ifndef VWTA_NN_HPP
#define VWTA_NN_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "vwta/estimators.hpp"
#include "vwta/geometry.hpp"
#include "vwta/rng.hpp"

namespace vwta {

enum class HeadKind { kWTAScoring, kMDN, kHistogram };

const char* head_name(HeadKind h);

struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // row-major [out][in]
  std::vector<double> b;

  bool empty() const { return out == 0; }
  void init(int n_in, int n_out, RngStream& rng);
  void forward(const double* x, double* y) const;
};

/* Two 256-unit ReLU layers feeding prediction heads.
 *
 * WTAScoring: K tanh hypotheses (out_dim each) + K sigmoid scores.
 * MDN:        K tanh means + K log-variances (identity) + K softmax logits.
 * Histogram:  K sigmoid scores over a fixed grid of bin centers. */
struct MlpModel {
  HeadKind head = HeadKind::kWTAScoring;
  int in_dim = 1;
  int out_dim = 2;
  int K = 16;
  int hidden = 256;
  DenseLayer l1, l2;
  DenseLayer hyp_head;     // WTAScoring hypotheses, MDN means
  DenseLayer score_head;   // scores or mixture logits
  DenseLayer logvar_head;  // MDN only
  int grid_rows = 0, grid_cols = 0;
  Vec domain_lower = {-1.0, -1.0};
  Vec domain_upper = {1.0, 1.0};

  static MlpModel make(HeadKind head, int in_dim, int out_dim, int K, int hidden,
                       RngStream& init_rng);
  static MlpModel make_histogram(int in_dim, int rows, int cols, const Domain& domain,
                                 int hidden, RngStream& init_rng);

  Domain domain() const { return Domain(domain_lower, domain_upper); }
  std::vector<Vec> grid() const;  // histogram bin centers
  HypothesisSet forward(const Vec& x) const;
  HypothesisSet forward(double x) const { return forward(Vec{x}); }
};

/* Gradient accumulator with the same shapes as the model parameters. */
struct ModelGrads {
  DenseLayer l1, l2, hyp_head, score_head, logvar_head;

  static ModelGrads zeros_like(const MlpModel& m);
  void reset();
};

struct MdnOverflowError : std::runtime_error {
  explicit MdnOverflowError(const std::string& msg, int ep = -1)
      : std::runtime_error(msg), epoch(ep) {}
  int epoch;
};

/* Scratch buffers reused across per-sample loss calls. */
struct Workspace {
  Vec z1, a1, z2, a2;
  Vec hyp_u, hyp_p, sc_u, sc_p, lv;
  Vec g_hyp, g_sc, g_lv, g_a2, g_a1;
};

/* Winner-takes-all compound objective: squared error of the closest
 * hypothesis plus beta times binary cross-entropy pushing each score toward
 * the winner indicator.  Gradients accumulate into *grads when non-null;
 * score_heads_only restricts them to the score head (frozen trunk and
 * hypotheses). */
double wta_compound_loss(const MlpModel& m, const Vec& x, const Vec& y, double beta,
                         ModelGrads* grads, Workspace& ws, bool score_heads_only = false);

/* Negative log-likelihood of an isotropic Gaussian mixture; variances are
 * exp(logvar) floored at 1e-6.  Non-finite values raise MdnOverflowError. */
double mdn_loss(const MlpModel& m, const Vec& x, const Vec& y, ModelGrads* grads,
                Workspace& ws);

/* Per-bin binary cross-entropy against the indicator of the bin holding y. */
double histogram_loss(const MlpModel& m, const Vec& x, const Vec& y,
                      const std::vector<Vec>& grid, ModelGrads* grads, Workspace& ws);

struct TrainConfig {
  int epochs = 100;
  int batch_size = 1024;
  double lr = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double wta_beta = 1.0;
  bool score_heads_only = false;
  bool verbose = false;
};

struct EpochLog {
  int epoch;
  double train_loss;
  double val_loss;
};

struct TrainResult {
  MlpModel model;  // parameters at the best validation epoch
  std::vector<EpochLog> log;
  int best_epoch = -1;
};

using PairSet = std::vector<std::pair<double, Vec>>;

double mean_loss(const MlpModel& m, const PairSet& set, double wta_beta);

/* Mini-batch Adam with per-epoch reshuffling.  Deterministic given the
 * initial model and stream: repeated runs produce bit-identical parameters.
 * Returns the parameters with minimal validation loss. */
TrainResult train(MlpModel model, const PairSet& train_set, const PairSet& val_set,
                  const TrainConfig& cfg, RngStream& shuffle_rng);

}  // namespace vwta

#endif
