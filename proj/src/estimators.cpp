#include "vwta/estimators.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace vwta {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<double> HypothesisSet::normalized_scores() const {
  double total = 0.0;
  for (double s : scores) {
    if (s < 0.0) throw std::invalid_argument("HypothesisSet: negative score");
    total += s;
  }
  if (total <= 0.0) throw std::invalid_argument("HypothesisSet: scores sum to zero");
  std::vector<double> out(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k) out[k] = scores[k] / total;
  return out;
}

const char* variant_name(EstimatorVariant v) {
  switch (v) {
    case EstimatorVariant::kDiracWTA: return "dirac_wta";
    case EstimatorVariant::kUniformWTA: return "uniform_wta";
    case EstimatorVariant::kKernelWTA: return "kernel_wta";
    case EstimatorVariant::kVoronoiWTA: return "voronoi_wta";
    case EstimatorVariant::kHistogram: return "histogram";
    case EstimatorVariant::kMDN: return "mdn";
  }
  return "?";
}

void EstimatorKind::validate() const {
  bool needs_kernel = variant == EstimatorVariant::kKernelWTA ||
                      variant == EstimatorVariant::kVoronoiWTA;
  if (needs_kernel && !kernel.has_value())
    throw std::invalid_argument(std::string(variant_name(variant)) + " requires a kernel");
  if (!needs_kernel && kernel.has_value())
    throw std::invalid_argument(std::string(variant_name(variant)) + " takes no kernel");
  if (n_versors < 1) throw std::invalid_argument("EstimatorKind: n_versors must be >= 1");
}

double kernel_cell_volume(const VoronoiTessellation& tess, std::size_t k,
                          const KernelSpec& kernel, int n_versors, RngStream& rng) {
  if (n_versors < 1) throw std::invalid_argument("kernel_cell_volume: n_versors must be >= 1");
  double acc = 0.0;
  for (int i = 0; i < n_versors; ++i) {
    Vec s = rng.unit_vector(tess.dim());
    acc += radial_cell_mass(kernel, tess.directional_radius(k, s));
  }
  return acc / n_versors;
}

std::vector<double> lebesgue_cell_fractions(const VoronoiTessellation& tess, int n_mc,
                                            RngStream& rng) {
  if (n_mc < 1) throw std::invalid_argument("lebesgue_cell_fractions: n_mc must be >= 1");
  std::vector<double> counts(tess.size(), 0.0);
  for (int i = 0; i < n_mc; ++i) counts[tess.winner_index(tess.domain().sample(rng))] += 1.0;
  std::vector<double> out(tess.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = std::max(counts[k], 0.5) / double(n_mc);
  return out;
}

Estimator::Estimator(EstimatorKind kind, HypothesisSet hs, Domain domain)
    : kind_(std::move(kind)),
      hs_(std::move(hs)),
      domain_(std::move(domain)),
      tess_(hs_.points, domain_) {
  kind_.validate();
  if (hs_.points.empty() || hs_.points.size() != hs_.scores.size())
    throw std::invalid_argument("Estimator: points/scores size mismatch");
  if (kind_.variant == EstimatorVariant::kMDN && hs_.sigmas.size() != hs_.points.size())
    throw std::invalid_argument("Estimator: MDN needs one sigma per component");
  norm_scores_ = hs_.normalized_scores();
}

void Estimator::prepare(RngStream& versor_rng, RngStream& mc_rng, int n_mc) {
  if (kind_.variant == EstimatorVariant::kVoronoiWTA) {
    kernel_volumes_.resize(tess_.size());
    for (std::size_t k = 0; k < tess_.size(); ++k)
      kernel_volumes_[k] =
          kernel_cell_volume(tess_, k, *kind_.kernel, kind_.n_versors, versor_rng);
  }
  if (kind_.variant == EstimatorVariant::kUniformWTA)
    cell_fractions_ = lebesgue_cell_fractions(tess_, n_mc, mc_rng);
  prepared_ = true;
}

double Estimator::bin_volume() const { return domain_.volume() / double(hs_.points.size()); }

double Estimator::density(const Vec& y) const {
  switch (kind_.variant) {
    case EstimatorVariant::kDiracWTA:
      throw NoDensityError("dirac_wta has no density");

    case EstimatorVariant::kKernelWTA: {
      double acc = 0.0;
      for (std::size_t k = 0; k < hs_.points.size(); ++k)
        acc += norm_scores_[k] * kernel_density(*kind_.kernel, hs_.points[k], y);
      return acc;
    }

    case EstimatorVariant::kVoronoiWTA: {
      if (!prepared_) throw std::logic_error("Estimator: prepare() before density()");
      if (!domain_.contains(y)) return 0.0;
      std::size_t k = tess_.winner_index(y);
      return norm_scores_[k] * kernel_density(*kind_.kernel, hs_.points[k], y) /
             kernel_volumes_[k];
    }

    case EstimatorVariant::kUniformWTA: {
      if (!prepared_) throw std::logic_error("Estimator: prepare() before density()");
      if (!domain_.contains(y)) return 0.0;
      std::size_t k = tess_.winner_index(y);
      return norm_scores_[k] / (domain_.volume() * cell_fractions_[k]);
    }

    case EstimatorVariant::kHistogram: {
      if (!domain_.contains(y)) return 0.0;
      std::size_t k = tess_.winner_index(y);
      return norm_scores_[k] / bin_volume();
    }

    case EstimatorVariant::kMDN: {
      // log-sum-exp over component log densities
      const int d = domain_.dim();
      double max_t = -std::numeric_limits<double>::infinity();
      std::vector<double> t(hs_.points.size());
      for (std::size_t k = 0; k < hs_.points.size(); ++k) {
        double s2 = hs_.sigmas[k] * hs_.sigmas[k];
        t[k] = std::log(norm_scores_[k]) - 0.5 * d * std::log(2.0 * kPi * s2) -
               squared_distance(y, hs_.points[k]) / (2.0 * s2);
        max_t = std::max(max_t, t[k]);
      }
      if (std::isinf(max_t)) return 0.0;
      double acc = 0.0;
      for (double tk : t) acc += std::exp(tk - max_t);
      return std::exp(max_t) * acc;
    }
  }
  throw std::logic_error("Estimator: unknown variant");
}

Vec Estimator::kernel_draw(const Vec& center, RngStream& rng) const {
  const KernelSpec& ks = *kind_.kernel;
  Vec y(center.size());
  if (ks.family == KernelFamily::kGaussian) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = center[i] + ks.h * rng.gaussian();
  } else {
    Vec dir = rng.unit_vector(ks.dim);
    double r = ks.h * std::pow(rng.uniform(), 1.0 / ks.dim);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = center[i] + r * dir[i];
  }
  return y;
}

Vec Estimator::sample_one(std::size_t k, RngStream& rng, int max_attempts) const {
  switch (kind_.variant) {
    case EstimatorVariant::kDiracWTA:
      return hs_.points[k];

    case EstimatorVariant::kKernelWTA:
      return kernel_draw(hs_.points[k], rng);

    case EstimatorVariant::kMDN: {
      Vec y(hs_.points[k].size());
      for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = hs_.points[k][i] + hs_.sigmas[k] * rng.gaussian();
      return y;
    }

    case EstimatorVariant::kHistogram: {
      // bins are axis-aligned boxes around the grid centers: direct draw
      auto [rows, cols] = grid_shape(int(hs_.points.size()));
      double w0 = (domain_.upper[0] - domain_.lower[0]) / rows;
      double w1 = (domain_.upper[1] - domain_.lower[1]) / cols;
      Vec y = hs_.points[k];
      y[0] += rng.uniform(-0.5 * w0, 0.5 * w0);
      y[1] += rng.uniform(-0.5 * w1, 0.5 * w1);
      return y;
    }

    case EstimatorVariant::kUniformWTA: {
      for (int a = 0; a < max_attempts; ++a) {
        Vec y = domain_.sample(rng);
        if (tess_.winner_index(y) == k) return y;
      }
      throw SamplingError("uniform_wta: cell " + std::to_string(k) + " rejection exhausted (" +
                          std::to_string(max_attempts) + " attempts, acceptance < " +
                          std::to_string(1.0 / max_attempts) + ")");
    }

    case EstimatorVariant::kVoronoiWTA: {
      for (int a = 0; a < max_attempts; ++a) {
        Vec y = kernel_draw(hs_.points[k], rng);
        if (domain_.contains(y) && tess_.winner_index(y) == k) return y;
      }
      throw SamplingError("voronoi_wta: cell " + std::to_string(k) + " rejection exhausted (" +
                          std::to_string(max_attempts) + " attempts, acceptance < " +
                          std::to_string(1.0 / max_attempts) + ")");
    }
  }
  throw std::logic_error("Estimator: unknown variant");
}

std::vector<Vec> Estimator::sample(int n, RngStream& rng, int max_attempts) const {
  if (n < 0) throw std::invalid_argument("Estimator::sample: negative count");
  std::vector<Vec> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i)
    out.push_back(sample_one(rng.categorical(norm_scores_), rng, max_attempts));
  return out;
}

std::vector<Vec> histogram_grid(const Domain& domain, int n_rows, int n_cols) {
  if (domain.dim() != 2) throw std::invalid_argument("histogram_grid: 2-D domains only");
  if (n_rows < 1 || n_cols < 1) throw std::invalid_argument("histogram_grid: bad shape");
  double w0 = (domain.upper[0] - domain.lower[0]) / n_rows;
  double w1 = (domain.upper[1] - domain.lower[1]) / n_cols;
  std::vector<Vec> grid;
  grid.reserve(std::size_t(n_rows) * n_cols);
  for (int i = 0; i < n_rows; ++i)
    for (int j = 0; j < n_cols; ++j)
      grid.push_back({domain.lower[0] + (i + 0.5) * w0, domain.lower[1] + (j + 0.5) * w1});
  return grid;
}

std::pair<int, int> grid_shape(int K) {
  if (K < 1) throw std::invalid_argument("grid_shape: K must be >= 1");
  int c = int(std::floor(std::sqrt(double(K))));
  while (c > 1 && K % c != 0) --c;
  return {K / c, c};
}

}  // namespace vwta
