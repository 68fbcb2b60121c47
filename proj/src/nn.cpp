#include "vwta/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace vwta {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kVarianceFloor = 1e-6;

double relu(double z) { return z > 0.0 ? z : 0.0; }

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

void trunk_forward(const MlpModel& m, const Vec& x, Workspace& ws) {
  if (int(x.size()) != m.in_dim) throw std::invalid_argument("forward: input dimension mismatch");
  ws.z1.resize(m.hidden);
  ws.a1.resize(m.hidden);
  ws.z2.resize(m.hidden);
  ws.a2.resize(m.hidden);
  m.l1.forward(x.data(), ws.z1.data());
  for (int i = 0; i < m.hidden; ++i) ws.a1[i] = relu(ws.z1[i]);
  m.l2.forward(ws.a1.data(), ws.z2.data());
  for (int i = 0; i < m.hidden; ++i) ws.a2[i] = relu(ws.z2[i]);
}

void dense_backward(const DenseLayer& l, const double* in, const double* g_out, double* g_in,
                    DenseLayer& grad) {
  for (int o = 0; o < l.out; ++o) {
    const double g = g_out[o];
    grad.b[o] += g;
    const double* wrow = &l.w[std::size_t(o) * l.in];
    double* grow = &grad.w[std::size_t(o) * l.in];
    for (int i = 0; i < l.in; ++i) grow[i] += g * in[i];
    if (g_in) {
      for (int i = 0; i < l.in; ++i) g_in[i] += g * wrow[i];
    }
  }
}

/* Shared tail: pushes head gradients (already in ws.g_a2) through the trunk. */
void trunk_backward(const MlpModel& m, const Vec& x, Workspace& ws, ModelGrads& grads) {
  ws.g_a1.assign(m.hidden, 0.0);
  for (int i = 0; i < m.hidden; ++i)
    if (ws.z2[i] <= 0.0) ws.g_a2[i] = 0.0;
  dense_backward(m.l2, ws.a1.data(), ws.g_a2.data(), ws.g_a1.data(), grads.l2);
  for (int i = 0; i < m.hidden; ++i)
    if (ws.z1[i] <= 0.0) ws.g_a1[i] = 0.0;
  dense_backward(m.l1, x.data(), ws.g_a1.data(), nullptr, grads.l1);
}

std::size_t winner_of(const std::vector<double>& flat_points, int K, const Vec& y) {
  const int d = int(y.size());
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      double diff = flat_points[std::size_t(k) * d + i] - y[i];
      s += diff * diff;
    }
    if (s < best_d) {
      best_d = s;
      best = std::size_t(k);
    }
  }
  return best;
}

std::vector<std::vector<double>*> param_refs(MlpModel& m) {
  std::vector<std::vector<double>*> refs;
  for (DenseLayer* l : {&m.l1, &m.l2, &m.hyp_head, &m.score_head, &m.logvar_head}) {
    if (l->empty()) continue;
    refs.push_back(&l->w);
    refs.push_back(&l->b);
  }
  return refs;
}

std::vector<std::vector<double>*> grad_refs(ModelGrads& g) {
  std::vector<std::vector<double>*> refs;
  for (DenseLayer* l : {&g.l1, &g.l2, &g.hyp_head, &g.score_head, &g.logvar_head}) {
    if (l->empty()) continue;
    refs.push_back(&l->w);
    refs.push_back(&l->b);
  }
  return refs;
}
}  // namespace

const char* head_name(HeadKind h) {
  switch (h) {
    case HeadKind::kWTAScoring: return "wta_scoring";
    case HeadKind::kMDN: return "mdn";
    case HeadKind::kHistogram: return "histogram";
  }
  return "?";
}

void DenseLayer::init(int n_in, int n_out, RngStream& rng) {
  in = n_in;
  out = n_out;
  w.resize(std::size_t(in) * out);
  b.resize(out);
  double bound = 1.0 / std::sqrt(double(in));
  for (double& v : w) v = rng.uniform(-bound, bound);
  for (double& v : b) v = rng.uniform(-bound, bound);
}

void DenseLayer::forward(const double* x, double* y) const {
  for (int o = 0; o < out; ++o) {
    const double* wrow = &w[std::size_t(o) * in];
    double acc = b[o];
    for (int i = 0; i < in; ++i) acc += wrow[i] * x[i];
    y[o] = acc;
  }
}

MlpModel MlpModel::make(HeadKind head, int in_dim, int out_dim, int K, int hidden,
                        RngStream& init_rng) {
  if (in_dim < 1 || out_dim < 1 || K < 1 || hidden < 1)
    throw std::invalid_argument("MlpModel::make: bad dimensions");
  MlpModel m;
  m.head = head;
  m.in_dim = in_dim;
  m.out_dim = out_dim;
  m.K = K;
  m.hidden = hidden;
  m.l1.init(in_dim, hidden, init_rng);
  m.l2.init(hidden, hidden, init_rng);
  if (head != HeadKind::kHistogram) m.hyp_head.init(hidden, K * out_dim, init_rng);
  m.score_head.init(hidden, K, init_rng);
  if (head == HeadKind::kMDN) m.logvar_head.init(hidden, K, init_rng);
  return m;
}

MlpModel MlpModel::make_histogram(int in_dim, int rows, int cols, const Domain& domain,
                                  int hidden, RngStream& init_rng) {
  MlpModel m = make(HeadKind::kHistogram, in_dim, domain.dim(), rows * cols, hidden, init_rng);
  m.grid_rows = rows;
  m.grid_cols = cols;
  m.domain_lower = domain.lower;
  m.domain_upper = domain.upper;
  return m;
}

std::vector<Vec> MlpModel::grid() const {
  if (head != HeadKind::kHistogram) throw std::logic_error("grid(): histogram models only");
  return histogram_grid(domain(), grid_rows, grid_cols);
}

HypothesisSet MlpModel::forward(const Vec& x) const {
  Workspace ws;
  trunk_forward(*this, x, ws);
  HypothesisSet hs;
  const int d = out_dim;

  if (head == HeadKind::kHistogram) {
    hs.points = grid();
    Vec v(K);
    score_head.forward(ws.a2.data(), v.data());
    hs.scores.resize(K);
    for (int k = 0; k < K; ++k) hs.scores[k] = sigmoid(v[k]);
    return hs;
  }

  Vec u(std::size_t(K) * d);
  hyp_head.forward(ws.a2.data(), u.data());
  hs.points.assign(K, Vec(d));
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < d; ++i) hs.points[k][i] = std::tanh(u[std::size_t(k) * d + i]);

  Vec v(K);
  score_head.forward(ws.a2.data(), v.data());
  hs.scores.resize(K);

  if (head == HeadKind::kWTAScoring) {
    for (int k = 0; k < K; ++k) hs.scores[k] = sigmoid(v[k]);
    return hs;
  }

  // MDN: softmax mixture weights and per-component spread
  double vmax = *std::max_element(v.begin(), v.end());
  double z = 0.0;
  for (int k = 0; k < K; ++k) z += std::exp(v[k] - vmax);
  for (int k = 0; k < K; ++k) hs.scores[k] = std::exp(v[k] - vmax) / z;
  Vec lv(K);
  logvar_head.forward(ws.a2.data(), lv.data());
  hs.sigmas.resize(K);
  for (int k = 0; k < K; ++k)
    hs.sigmas[k] = std::sqrt(std::max(std::exp(lv[k]), kVarianceFloor));
  return hs;
}

ModelGrads ModelGrads::zeros_like(const MlpModel& m) {
  ModelGrads g;
  auto shape = [](DenseLayer& dst, const DenseLayer& src) {
    dst.in = src.in;
    dst.out = src.out;
    dst.w.assign(src.w.size(), 0.0);
    dst.b.assign(src.b.size(), 0.0);
  };
  shape(g.l1, m.l1);
  shape(g.l2, m.l2);
  shape(g.hyp_head, m.hyp_head);
  shape(g.score_head, m.score_head);
  shape(g.logvar_head, m.logvar_head);
  return g;
}

void ModelGrads::reset() {
  for (DenseLayer* l : {&l1, &l2, &hyp_head, &score_head, &logvar_head}) {
    std::fill(l->w.begin(), l->w.end(), 0.0);
    std::fill(l->b.begin(), l->b.end(), 0.0);
  }
}

double wta_compound_loss(const MlpModel& m, const Vec& x, const Vec& y, double beta,
                         ModelGrads* grads, Workspace& ws, bool score_heads_only) {
  if (m.head != HeadKind::kWTAScoring)
    throw std::invalid_argument("wta_compound_loss: wrong head");
  const int d = m.out_dim;
  const int K = m.K;
  trunk_forward(m, x, ws);

  ws.hyp_u.resize(std::size_t(K) * d);
  ws.hyp_p.resize(std::size_t(K) * d);
  m.hyp_head.forward(ws.a2.data(), ws.hyp_u.data());
  for (std::size_t i = 0; i < ws.hyp_u.size(); ++i) ws.hyp_p[i] = std::tanh(ws.hyp_u[i]);

  ws.sc_u.resize(K);
  ws.sc_p.resize(K);
  m.score_head.forward(ws.a2.data(), ws.sc_u.data());
  for (int k = 0; k < K; ++k) ws.sc_p[k] = sigmoid(ws.sc_u[k]);

  const std::size_t kw = winner_of(ws.hyp_p, K, y);
  double wta = 0.0;
  for (int i = 0; i < d; ++i) {
    double diff = ws.hyp_p[kw * d + i] - y[i];
    wta += diff * diff;
  }
  // BCE from pre-activations: target t gives t*softplus(-u) + (1-t)*softplus(u)
  double scoring = 0.0;
  for (int k = 0; k < K; ++k)
    scoring += (std::size_t(k) == kw) ? softplus(-ws.sc_u[k]) : softplus(ws.sc_u[k]);
  double loss = wta + beta * scoring;

  if (!grads) return loss;

  ws.g_sc.assign(K, 0.0);
  for (int k = 0; k < K; ++k)
    ws.g_sc[k] = beta * (ws.sc_p[k] - (std::size_t(k) == kw ? 1.0 : 0.0));

  if (score_heads_only) {
    dense_backward(m.score_head, ws.a2.data(), ws.g_sc.data(), nullptr, grads->score_head);
    return loss;
  }

  // Only the winner block of the hypothesis head carries gradient.
  ws.g_hyp.assign(std::size_t(K) * d, 0.0);
  for (int i = 0; i < d; ++i) {
    double p = ws.hyp_p[kw * d + i];
    ws.g_hyp[kw * d + i] = 2.0 * (p - y[i]) * (1.0 - p * p);
  }

  ws.g_a2.assign(m.hidden, 0.0);
  dense_backward(m.hyp_head, ws.a2.data(), ws.g_hyp.data(), ws.g_a2.data(), grads->hyp_head);
  dense_backward(m.score_head, ws.a2.data(), ws.g_sc.data(), ws.g_a2.data(), grads->score_head);
  trunk_backward(m, x, ws, *grads);
  return loss;
}

double mdn_loss(const MlpModel& m, const Vec& x, const Vec& y, ModelGrads* grads,
                Workspace& ws) {
  if (m.head != HeadKind::kMDN) throw std::invalid_argument("mdn_loss: wrong head");
  const int d = m.out_dim;
  const int K = m.K;
  trunk_forward(m, x, ws);

  ws.hyp_u.resize(std::size_t(K) * d);
  ws.hyp_p.resize(std::size_t(K) * d);
  m.hyp_head.forward(ws.a2.data(), ws.hyp_u.data());
  for (std::size_t i = 0; i < ws.hyp_u.size(); ++i) ws.hyp_p[i] = std::tanh(ws.hyp_u[i]);
  ws.sc_u.resize(K);
  m.score_head.forward(ws.a2.data(), ws.sc_u.data());
  ws.lv.resize(K);
  m.logvar_head.forward(ws.a2.data(), ws.lv.data());

  // log pi_k = u_k - logsumexp(u)
  double umax = *std::max_element(ws.sc_u.begin(), ws.sc_u.end());
  double zsum = 0.0;
  for (int k = 0; k < K; ++k) zsum += std::exp(ws.sc_u[k] - umax);
  double log_z = umax + std::log(zsum);

  std::vector<double> t(K), err2(K), s2(K);
  std::vector<bool> floored(K);
  double tmax = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    double raw = std::exp(ws.lv[k]);
    floored[k] = raw < kVarianceFloor;
    s2[k] = floored[k] ? kVarianceFloor : raw;
    double e2 = 0.0;
    for (int i = 0; i < d; ++i) {
      double diff = y[i] - ws.hyp_p[std::size_t(k) * d + i];
      e2 += diff * diff;
    }
    err2[k] = e2;
    t[k] = (ws.sc_u[k] - log_z) - 0.5 * d * std::log(2.0 * kPi * s2[k]) - e2 / (2.0 * s2[k]);
    tmax = std::max(tmax, t[k]);
  }
  double tsum = 0.0;
  for (int k = 0; k < K; ++k) tsum += std::exp(t[k] - tmax);
  double loss = -(tmax + std::log(tsum));
  if (!std::isfinite(loss))
    throw MdnOverflowError("mdn_loss: non-finite negative log-likelihood");

  if (!grads) return loss;

  ws.g_sc.assign(K, 0.0);
  ws.g_hyp.assign(std::size_t(K) * d, 0.0);
  ws.g_lv.assign(K, 0.0);
  for (int k = 0; k < K; ++k) {
    double r = std::exp(t[k] - tmax) / tsum;             // responsibility
    double pi = std::exp(ws.sc_u[k] - log_z);
    ws.g_sc[k] = pi - r;
    for (int i = 0; i < d; ++i) {
      double p = ws.hyp_p[std::size_t(k) * d + i];
      double g_mu = r * (p - y[i]) / s2[k];
      ws.g_hyp[std::size_t(k) * d + i] = g_mu * (1.0 - p * p);
    }
    ws.g_lv[k] = floored[k] ? 0.0 : r * (0.5 * d - err2[k] / (2.0 * s2[k]));
  }

  ws.g_a2.assign(m.hidden, 0.0);
  dense_backward(m.hyp_head, ws.a2.data(), ws.g_hyp.data(), ws.g_a2.data(), grads->hyp_head);
  dense_backward(m.score_head, ws.a2.data(), ws.g_sc.data(), ws.g_a2.data(), grads->score_head);
  dense_backward(m.logvar_head, ws.a2.data(), ws.g_lv.data(), ws.g_a2.data(),
                 grads->logvar_head);
  trunk_backward(m, x, ws, *grads);
  return loss;
}

double histogram_loss(const MlpModel& m, const Vec& x, const Vec& y,
                      const std::vector<Vec>& grid, ModelGrads* grads, Workspace& ws) {
  if (m.head != HeadKind::kHistogram) throw std::invalid_argument("histogram_loss: wrong head");
  const int K = m.K;
  if (int(grid.size()) != K) throw std::invalid_argument("histogram_loss: grid size mismatch");
  trunk_forward(m, x, ws);
  ws.sc_u.resize(K);
  ws.sc_p.resize(K);
  m.score_head.forward(ws.a2.data(), ws.sc_u.data());
  for (int k = 0; k < K; ++k) ws.sc_p[k] = sigmoid(ws.sc_u[k]);

  std::size_t kw = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    double dist = squared_distance(grid[k], y);
    if (dist < best) {
      best = dist;
      kw = std::size_t(k);
    }
  }
  double loss = 0.0;
  for (int k = 0; k < K; ++k)
    loss += (std::size_t(k) == kw) ? softplus(-ws.sc_u[k]) : softplus(ws.sc_u[k]);

  if (!grads) return loss;
  ws.g_sc.assign(K, 0.0);
  for (int k = 0; k < K; ++k)
    ws.g_sc[k] = ws.sc_p[k] - (std::size_t(k) == kw ? 1.0 : 0.0);
  ws.g_a2.assign(m.hidden, 0.0);
  dense_backward(m.score_head, ws.a2.data(), ws.g_sc.data(), ws.g_a2.data(), grads->score_head);
  trunk_backward(m, x, ws, *grads);
  return loss;
}

namespace {
double sample_loss(const MlpModel& m, const std::vector<Vec>& grid, const Vec& x, const Vec& y,
                   double wta_beta, ModelGrads* grads, Workspace& ws, bool score_only) {
  switch (m.head) {
    case HeadKind::kWTAScoring: return wta_compound_loss(m, x, y, wta_beta, grads, ws, score_only);
    case HeadKind::kMDN: return mdn_loss(m, x, y, grads, ws);
    case HeadKind::kHistogram: return histogram_loss(m, x, y, grid, grads, ws);
  }
  throw std::logic_error("sample_loss: unknown head");
}
}  // namespace

double mean_loss(const MlpModel& m, const PairSet& set, double wta_beta) {
  if (set.empty()) throw std::invalid_argument("mean_loss: empty set");
  Workspace ws;
  std::vector<Vec> grid;
  if (m.head == HeadKind::kHistogram) grid = m.grid();
  double acc = 0.0;
  for (const auto& [x, y] : set)
    acc += sample_loss(m, grid, Vec{x}, y, wta_beta, nullptr, ws, false);
  return acc / double(set.size());
}

TrainResult train(MlpModel model, const PairSet& train_set, const PairSet& val_set,
                  const TrainConfig& cfg, RngStream& shuffle_rng) {
  if (train_set.empty() || val_set.empty())
    throw std::invalid_argument("train: empty train or validation set");
  if (cfg.epochs < 1 || cfg.batch_size < 1) throw std::invalid_argument("train: bad config");

  std::vector<Vec> grid;
  if (model.head == HeadKind::kHistogram) grid = model.grid();

  ModelGrads grads = ModelGrads::zeros_like(model);
  Workspace ws;
  auto params = param_refs(model);
  auto gvecs = grad_refs(grads);

  std::vector<std::vector<double>> adam_m(params.size()), adam_v(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    adam_m[i].assign(params[i]->size(), 0.0);
    adam_v[i].assign(params[i]->size(), 0.0);
  }
  long step = 0;

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  double best_val = std::numeric_limits<double>::infinity();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates reshuffle
    for (std::size_t i = order.size(); i > 1; --i) {
      std::size_t j = std::size_t(shuffle_rng.uniform() * double(i));
      if (j >= i) j = i - 1;
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss = 0.0;
    std::size_t pos = 0;
    while (pos < order.size()) {
      std::size_t batch_n = std::min<std::size_t>(cfg.batch_size, order.size() - pos);
      grads.reset();
      for (std::size_t b = 0; b < batch_n; ++b) {
        const auto& [x, y] = train_set[order[pos + b]];
        try {
          epoch_loss += sample_loss(model, grid, Vec{x}, y, cfg.wta_beta, &grads, ws,
                                    cfg.score_heads_only);
        } catch (MdnOverflowError& e) {
          throw MdnOverflowError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                                     ")",
                                 epoch);
        }
      }
      pos += batch_n;

      ++step;
      double inv_n = 1.0 / double(batch_n);
      double bc1 = 1.0 - std::pow(cfg.adam_beta1, double(step));
      double bc2 = 1.0 - std::pow(cfg.adam_beta2, double(step));
      for (std::size_t i = 0; i < params.size(); ++i) {
        std::vector<double>& p = *params[i];
        std::vector<double>& g = *gvecs[i];
        std::vector<double>& mm = adam_m[i];
        std::vector<double>& vv = adam_v[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
          double gj = g[j] * inv_n;
          mm[j] = cfg.adam_beta1 * mm[j] + (1.0 - cfg.adam_beta1) * gj;
          vv[j] = cfg.adam_beta2 * vv[j] + (1.0 - cfg.adam_beta2) * gj * gj;
          p[j] -= cfg.lr * (mm[j] / bc1) / (std::sqrt(vv[j] / bc2) + cfg.adam_eps);
        }
      }
    }

    double train_loss = epoch_loss / double(train_set.size());
    double val_loss;
    try {
      val_loss = mean_loss(model, val_set, cfg.wta_beta);
    } catch (MdnOverflowError& e) {
      throw MdnOverflowError(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ")",
                             epoch);
    }
    if (model.head == HeadKind::kMDN && (!std::isfinite(train_loss) || !std::isfinite(val_loss)))
      throw MdnOverflowError("train: non-finite mdn loss (epoch " + std::to_string(epoch) + ")",
                             epoch);
    result.log.push_back({epoch, train_loss, val_loss});
    if (cfg.verbose)
      std::fprintf(stderr, "epoch %3d  train %.6f  val %.6f\n", epoch, train_loss, val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      result.model = model;
      result.best_epoch = epoch;
    }
  }
  return result;
}

}  // namespace vwta
