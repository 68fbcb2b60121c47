#ifndef VWTA_METRICS_HPP
#define VWTA_METRICS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vwta/geometry.hpp"
#include "vwta/rng.hpp"

namespace vwta {

struct NllStats {
  double nll = 0.0;
  int floor_hits = 0;  // evaluations clamped at the 1e-300 density floor
  int n = 0;
};

using ConditionalDensity = std::function<double(double, const Vec&)>;

/* Mean negative log density over (input, target) pairs.  Densities are
 * floored at 1e-300 before the log so a single dead zone cannot produce an
 * infinite score; the flag count reports how often that happened. */
NllStats empirical_nll(const ConditionalDensity& density,
                       const std::vector<std::pair<double, Vec>>& pairs);

/* Earth mover's distance between two equal-size point clouds with uniform
 * weights: mean matched Euclidean distance under the optimal assignment. */
double emd(const std::vector<Vec>& a, const std::vector<Vec>& b);

/* Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
 * potentials, O(n^3)); returns column assigned to each row. */
std::vector<int> optimal_assignment(const std::vector<std::vector<double>>& cost);

double assignment_cost(const std::vector<std::vector<double>>& cost,
                       const std::vector<int>& row_to_col);

/* Mean squared distance to the nearest hypothesis. */
double empirical_distortion(const std::vector<Vec>& hypotheses,
                            const std::vector<Vec>& samples);

/* Leading quantization coefficient: 1/12 on the line, 5/(18*sqrt(3)) in the
 * plane (congruent hexagons). */
double zador_constant(int dim);

double zador_integral(const std::function<double(const Vec&)>& density, const Domain& domain,
                      int n_mc, RngStream& rng);
double zador_risk_from_integral(double integral, int K, int dim);

/* Asymptotic optimal quantization risk J_d * (integral rho^(d/(d+2)))^((d+2)/d)
 * / K^(2/d), the integral taken by domain-uniform Monte Carlo. */
double zador_theoretical_risk(const std::function<double(const Vec&)>& density,
                              const Domain& domain, int K, int n_mc, RngStream& rng);

/* Risk of the regular-grid quantizer at the same budget. */
double histogram_theoretical_risk(double domain_volume, int K, int dim);

/* One evaluation-cell result row. */
struct MetricReport {
  std::string dataset;
  std::string estimator;
  int K = 0;
  std::optional<double> h;
  std::uint64_t seed = 0;
  std::optional<double> nll;
  bool no_density = false;
  std::optional<double> emd;
  std::optional<double> distortion;
  std::optional<double> theoretical_distortion;
  int n_eval = 0;
  int nll_floor_hits = 0;
  std::string config_hash;
};

std::string metric_csv_header();
std::string metric_csv_row(const MetricReport& r);
std::string metric_json_line(const MetricReport& r);
MetricReport metric_from_json_line(const std::string& line);

void append_report_lines(const std::string& jsonl_path, const std::string& csv_path,
                         const std::vector<MetricReport>& rows);

/* Loads a JSONL report file; every row must carry expected_hash when one is
 * given, otherwise the mix of configurations is an error. */
std::vector<MetricReport> load_reports(const std::string& jsonl_path,
                                       const std::string* expected_hash = nullptr);

}  // namespace vwta

#endif
