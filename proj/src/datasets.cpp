#include "vwta/datasets.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vwta/kernels.hpp"

namespace vwta {

namespace {
constexpr double kPi = 3.14159265358979323846;

/* Raw two-moons cloud before jitter spans [-1,2] x [-0.5,1]; recentring at
 * (0.5, 0.25) and scaling by 0.6 fits the long axis into [-0.9, 0.9]. */
constexpr double kMoonCenterX = 0.5;
constexpr double kMoonCenterY = 0.25;
constexpr double kMoonScale = 0.6;

double gaussian2_density(const Vec& y, const Vec& mean, double sigma) {
  double e2 = squared_distance(y, mean);
  return std::exp(-e2 / (2.0 * sigma * sigma)) / (2.0 * kPi * sigma * sigma);
}

/* Mass of an isotropic Gaussian inside an axis-aligned box. */
double box_mass(const Vec& mean, double sigma, const Vec& lo, const Vec& hi) {
  double z = 1.0;
  for (std::size_t i = 0; i < mean.size(); ++i)
    z *= normal_cdf((hi[i] - mean[i]) / sigma) - normal_cdf((lo[i] - mean[i]) / sigma);
  return z;
}

/* Checkerboard of 4x4 half-unit squares; the class containing the corner
 * square at (-1,-1) is "black". */
bool damier_black(const Vec& y) {
  int i = std::min(3, int(std::floor((y[0] + 1.0) / 0.5)));
  int j = std::min(3, int(std::floor((y[1] + 1.0) / 0.5)));
  return (i + j) % 2 == 0;
}

int u2g_quadrant(const Vec& y) {
  // S1 lower-left, S2 upper-left, S3 lower-right, S4 upper-right
  if (y[0] < 0.0) return y[1] < 0.0 ? 0 : 1;
  return y[1] < 0.0 ? 2 : 3;
}
}  // namespace

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

const char* dataset_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::kSingleGaussian: return "single_gaussian";
    case DatasetKind::kRotatingTwoMoons: return "rotating_two_moons";
    case DatasetKind::kChangingDamier: return "changing_damier";
    case DatasetKind::kUniformToGaussians: return "uniform_to_gaussians";
  }
  return "?";
}

DatasetKind dataset_from_name(const std::string& name) {
  for (DatasetKind k : {DatasetKind::kSingleGaussian, DatasetKind::kRotatingTwoMoons,
                        DatasetKind::kChangingDamier, DatasetKind::kUniformToGaussians})
    if (name == dataset_name(k)) return k;
  throw std::invalid_argument("unknown dataset: " + name);
}

SyntheticDataset::SyntheticDataset(DatasetKind kind, DatasetParams params)
    : kind_(kind), params_(std::move(params)), domain_({-1.0, -1.0}, {1.0, 1.0}) {
  if (!(params_.sg_sigma > 0.0) || !(params_.u2g_sigma2 > 0.0) || !(params_.u2g_sigma3 > 0.0) ||
      params_.moons_noise < 0.0)
    throw std::invalid_argument("SyntheticDataset: nonpositive scale parameter");
}

std::pair<double, Vec> SyntheticDataset::sample_pair(RngStream& rng) const {
  double x = sample_input(rng);
  return {x, sample_target(x, rng)};
}

Vec SyntheticDataset::sample_target(double x, RngStream& rng) const {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("sample_target: input outside [0,1]");
  switch (kind_) {
    case DatasetKind::kSingleGaussian: {
      Vec y(2);
      do {
        y[0] = params_.sg_mean[0] + params_.sg_sigma * rng.gaussian();
        y[1] = params_.sg_mean[1] + params_.sg_sigma * rng.gaussian();
      } while (!domain_.contains(y));
      return y;
    }
    case DatasetKind::kRotatingTwoMoons: return moons_target(x, rng);
    case DatasetKind::kChangingDamier: return damier_target(x, rng);
    case DatasetKind::kUniformToGaussians: return u2g_target(x, rng);
  }
  throw std::logic_error("sample_target: unknown kind");
}

Vec SyntheticDataset::moons_target(double x, RngStream& rng) const {
  const double angle = 2.0 * kPi * x;
  const double c = std::cos(angle), s = std::sin(angle);
  Vec y(2);
  do {
    double phi = kPi * rng.uniform();
    double rx, ry;
    if (rng.uniform() < 0.5) {
      rx = std::cos(phi);
      ry = std::sin(phi);
    } else {
      rx = 1.0 - std::cos(phi);
      ry = 0.5 - std::sin(phi);
    }
    rx += params_.moons_noise * rng.gaussian();
    ry += params_.moons_noise * rng.gaussian();
    rx = (rx - kMoonCenterX) * kMoonScale;
    ry = (ry - kMoonCenterY) * kMoonScale;
    y[0] = c * rx - s * ry;
    y[1] = s * rx + c * ry;
  } while (!domain_.contains(y));
  return y;
}

Vec SyntheticDataset::damier_target(double x, RngStream& rng) const {
  bool black = rng.uniform() >= x;  // P(black) = 1 - x
  // squares of the requested class, uniform over the 8 of them
  int idx = int(rng.uniform() * 8.0);
  if (idx > 7) idx = 7;
  int row = idx / 2;
  int col = 2 * (idx % 2) + ((row % 2 == 0) == black ? 0 : 1);
  Vec y(2);
  y[0] = -1.0 + 0.5 * (row + rng.uniform());
  y[1] = -1.0 + 0.5 * (col + rng.uniform());
  return y;
}

Vec SyntheticDataset::u2g_target(double x, RngStream& rng) const {
  double u = rng.uniform();
  Vec y(2);
  if (u < (1.0 - x) / 2.0) {  // S1: uniform on [-1,0)^2
    y[0] = rng.uniform(-1.0, 0.0);
    y[1] = rng.uniform(-1.0, 0.0);
  } else if (u < 1.0 - x) {  // S4: uniform on [0,1]^2
    y[0] = rng.uniform(0.0, 1.0);
    y[1] = rng.uniform(0.0, 1.0);
  } else if (u < 1.0 - x / 2.0) {  // S2: Gaussian truncated to [-1,0) x [0,1]
    do {
      y[0] = params_.u2g_c2[0] + params_.u2g_sigma2 * rng.gaussian();
      y[1] = params_.u2g_c2[1] + params_.u2g_sigma2 * rng.gaussian();
    } while (!(y[0] < 0.0 && y[0] >= -1.0 && y[1] >= 0.0 && y[1] <= 1.0));
  } else {  // S3: Gaussian truncated to [0,1] x [-1,0)
    do {
      y[0] = params_.u2g_c3[0] + params_.u2g_sigma3 * rng.gaussian();
      y[1] = params_.u2g_c3[1] + params_.u2g_sigma3 * rng.gaussian();
    } while (!(y[0] >= 0.0 && y[0] <= 1.0 && y[1] < 0.0 && y[1] >= -1.0));
  }
  return y;
}

void GroundTruthDensity::prepare(double x, RngStream& rng) {
  if (!needs_reference() || kde_refs_.count(x)) return;
  std::vector<Vec> refs;
  refs.reserve(kKdeReferenceSize);
  for (int i = 0; i < kKdeReferenceSize; ++i) refs.push_back(ds_->sample_target(x, rng));
  kde_refs_.emplace(x, std::move(refs));
}

bool GroundTruthDensity::available(double x) const {
  return !needs_reference() || kde_refs_.count(x) > 0;
}

double GroundTruthDensity::density(double x, const Vec& y) const {
  const DatasetParams& p = ds_->params();
  const Domain& dom = ds_->domain();
  switch (ds_->kind()) {
    case DatasetKind::kSingleGaussian: {
      if (!dom.contains(y)) return 0.0;
      double z = box_mass(p.sg_mean, p.sg_sigma, dom.lower, dom.upper);
      return gaussian2_density(y, p.sg_mean, p.sg_sigma) / z;
    }
    case DatasetKind::kChangingDamier: {
      if (!dom.contains(y)) return 0.0;
      // each class has total area 2, so class mass spreads at mass/2
      return damier_black(y) ? (1.0 - x) / 2.0 : x / 2.0;
    }
    case DatasetKind::kUniformToGaussians: {
      if (!dom.contains(y)) return 0.0;
      switch (u2g_quadrant(y)) {
        case 0: return (1.0 - x) / 2.0;
        case 3: return (1.0 - x) / 2.0;
        case 1: {
          double z = box_mass(p.u2g_c2, p.u2g_sigma2, {-1.0, 0.0}, {0.0, 1.0});
          return x / 2.0 * gaussian2_density(y, p.u2g_c2, p.u2g_sigma2) / z;
        }
        default: {
          double z = box_mass(p.u2g_c3, p.u2g_sigma3, {0.0, -1.0}, {1.0, 0.0});
          return x / 2.0 * gaussian2_density(y, p.u2g_c3, p.u2g_sigma3) / z;
        }
      }
    }
    case DatasetKind::kRotatingTwoMoons: {
      auto it = kde_refs_.find(x);
      if (it == kde_refs_.end())
        throw DensityUnavailableError("two-moons density needs prepare() at this input");
      KernelSpec ks(KernelFamily::kGaussian, kKdeBandwidth, 2);
      double acc = 0.0;
      for (const Vec& ref : it->second) acc += kernel_density(ks, ref, y);
      return acc / double(it->second.size());
    }
  }
  throw std::logic_error("density: unknown kind");
}

void write_pairs(const std::string& path, const std::vector<std::pair<double, Vec>>& pairs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_pairs: cannot open " + path);
  out << "x,y1,y2\n";
  char buf[128];
  for (const auto& [x, y] : pairs) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, y[0], y[1]);
    out << buf;
  }
  if (!out) throw std::runtime_error("write_pairs: write failed for " + path);
}

std::vector<std::pair<double, Vec>> read_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_pairs: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "x,y1,y2")
    throw std::runtime_error("read_pairs: bad header in " + path);
  std::vector<std::pair<double, Vec>> pairs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double x, y1, y2;
    char c1, c2;
    if (!(ss >> x >> c1 >> y1 >> c2 >> y2) || c1 != ',' || c2 != ',')
      throw std::runtime_error("read_pairs: bad record in " + path + ": " + line);
    pairs.push_back({x, {y1, y2}});
  }
  return pairs;
}

std::vector<std::pair<double, Vec>> draw_pairs(const SyntheticDataset& ds, int n,
                                               RngStream& rng) {
  if (n < 0) throw std::invalid_argument("draw_pairs: negative count");
  std::vector<std::pair<double, Vec>> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(ds.sample_pair(rng));
  return out;
}

}  // namespace vwta
