#include "vwta/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace vwta {

namespace {
constexpr double kDensityFloor = 1e-300;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

NllStats empirical_nll(const ConditionalDensity& density,
                       const std::vector<std::pair<double, Vec>>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("empirical_nll: empty pair set");
  NllStats s;
  double acc = 0.0;
  for (const auto& [x, y] : pairs) {
    double rho = density(x, y);
    if (rho < 0.0 || std::isnan(rho)) throw std::runtime_error("empirical_nll: invalid density");
    if (rho < kDensityFloor) {
      rho = kDensityFloor;
      ++s.floor_hits;
    }
    acc -= std::log(rho);
  }
  s.n = int(pairs.size());
  s.nll = acc / double(pairs.size());
  return s;
}

std::vector<int> optimal_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = int(cost.size());
  if (n == 0) throw std::invalid_argument("optimal_assignment: empty cost matrix");
  for (const auto& row : cost)
    if (int(row.size()) != n) throw std::invalid_argument("optimal_assignment: not square");

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

double assignment_cost(const std::vector<std::vector<double>>& cost,
                       const std::vector<int>& row_to_col) {
  double total = 0.0;
  for (std::size_t i = 0; i < row_to_col.size(); ++i) total += cost[i][row_to_col[i]];
  return total;
}

double emd(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  if (a.empty() || a.size() != b.size())
    throw std::invalid_argument("emd: clouds must be nonempty and equal-sized");
  const int n = int(a.size());
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost[i][j] = std::sqrt(squared_distance(a[i], b[j]));
  return assignment_cost(cost, optimal_assignment(cost)) / double(n);
}

double empirical_distortion(const std::vector<Vec>& hypotheses,
                            const std::vector<Vec>& samples) {
  if (hypotheses.empty() || samples.empty())
    throw std::invalid_argument("empirical_distortion: empty input");
  double acc = 0.0;
  for (const Vec& y : samples) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& z : hypotheses) best = std::min(best, squared_distance(y, z));
    acc += best;
  }
  return acc / double(samples.size());
}

double zador_constant(int dim) {
  if (dim == 1) return 1.0 / 12.0;
  if (dim == 2) return 5.0 / (18.0 * std::sqrt(3.0));
  throw std::invalid_argument("zador_constant: only dimensions 1 and 2 supported");
}

double zador_integral(const std::function<double(const Vec&)>& density, const Domain& domain,
                      int n_mc, RngStream& rng) {
  if (n_mc < 1) throw std::invalid_argument("zador_integral: n_mc must be >= 1");
  const double expo = double(domain.dim()) / double(domain.dim() + 2);
  double acc = 0.0;
  for (int i = 0; i < n_mc; ++i) {
    double rho = density(domain.sample(rng));
    if (rho < 0.0 || !std::isfinite(rho))
      throw std::runtime_error("zador_integral: invalid density value");
    acc += std::pow(rho, expo);
  }
  return domain.volume() * acc / double(n_mc);
}

double zador_risk_from_integral(double integral, int K, int dim) {
  if (K < 1) throw std::invalid_argument("zador_risk_from_integral: K must be >= 1");
  return zador_constant(dim) * std::pow(integral, double(dim + 2) / dim) /
         std::pow(double(K), 2.0 / dim);
}

double zador_theoretical_risk(const std::function<double(const Vec&)>& density,
                              const Domain& domain, int K, int n_mc, RngStream& rng) {
  return zador_risk_from_integral(zador_integral(density, domain, n_mc, rng), K, domain.dim());
}

double histogram_theoretical_risk(double domain_volume, int K, int dim) {
  if (K < 1 || domain_volume <= 0.0)
    throw std::invalid_argument("histogram_theoretical_risk: bad arguments");
  return double(dim) / 12.0 * std::pow(domain_volume, 2.0 / dim) / std::pow(double(K), 2.0 / dim);
}

std::string metric_csv_header() {
  return "dataset,estimator,K,h,seed,nll,emd,distortion,theoretical_distortion";
}

std::string metric_csv_row(const MetricReport& r) {
  std::string row = r.dataset + "," + r.estimator + "," + std::to_string(r.K) + ",";
  if (r.h) row += fmt17(*r.h);
  row += "," + std::to_string(r.seed) + ",";
  if (r.nll) row += fmt17(*r.nll);
  row += ",";
  if (r.emd) row += fmt17(*r.emd);
  row += ",";
  if (r.distortion) row += fmt17(*r.distortion);
  row += ",";
  if (r.theoretical_distortion) row += fmt17(*r.theoretical_distortion);
  return row;
}

std::string metric_json_line(const MetricReport& r) {
  nlohmann::json j;
  j["dataset"] = r.dataset;
  j["estimator"] = r.estimator;
  j["K"] = r.K;
  if (r.h) j["h"] = *r.h;
  j["seed"] = r.seed;
  if (r.nll) j["nll"] = *r.nll;
  if (r.no_density) j["no_density"] = true;
  if (r.emd) j["emd"] = *r.emd;
  if (r.distortion) j["distortion"] = *r.distortion;
  if (r.theoretical_distortion) j["theoretical_distortion"] = *r.theoretical_distortion;
  j["n_eval"] = r.n_eval;
  j["nll_floor_hits"] = r.nll_floor_hits;
  j["config_hash"] = r.config_hash;
  return j.dump();
}

MetricReport metric_from_json_line(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line);
  MetricReport r;
  r.dataset = j.at("dataset").get<std::string>();
  r.estimator = j.at("estimator").get<std::string>();
  r.K = j.at("K").get<int>();
  if (j.contains("h")) r.h = j["h"].get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("nll")) r.nll = j["nll"].get<double>();
  r.no_density = j.value("no_density", false);
  if (j.contains("emd")) r.emd = j["emd"].get<double>();
  if (j.contains("distortion")) r.distortion = j["distortion"].get<double>();
  if (j.contains("theoretical_distortion"))
    r.theoretical_distortion = j["theoretical_distortion"].get<double>();
  r.n_eval = j.value("n_eval", 0);
  r.nll_floor_hits = j.value("nll_floor_hits", 0);
  r.config_hash = j.value("config_hash", "");
  return r;
}

void append_report_lines(const std::string& jsonl_path, const std::string& csv_path,
                         const std::vector<MetricReport>& rows) {
  bool csv_fresh = !std::ifstream(csv_path).good();
  std::ofstream jout(jsonl_path, std::ios::app);
  std::ofstream cout_(csv_path, std::ios::app);
  if (!jout || !cout_) throw std::runtime_error("append_report_lines: cannot open outputs");
  if (csv_fresh) cout_ << metric_csv_header() << "\n";
  for (const MetricReport& r : rows) {
    jout << metric_json_line(r) << "\n";
    cout_ << metric_csv_row(r) << "\n";
  }
}

std::vector<MetricReport> load_reports(const std::string& jsonl_path,
                                       const std::string* expected_hash) {
  std::ifstream in(jsonl_path);
  if (!in) throw std::runtime_error("load_reports: cannot open " + jsonl_path);
  std::vector<MetricReport> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    MetricReport r = metric_from_json_line(line);
    if (expected_hash && r.config_hash != *expected_hash)
      throw std::runtime_error("load_reports: config hash mismatch in " + jsonl_path +
                               " (row " + std::to_string(rows.size()) + ")");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace vwta
