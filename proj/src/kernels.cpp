#include "vwta/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vwta {

namespace {
constexpr double kPi = 3.14159265358979323846;

double squared_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}
}  // namespace

KernelSpec::KernelSpec(KernelFamily f, double bandwidth, int d)
    : family(f), h(bandwidth), dim(d) {
  if (!(h > 0.0)) throw std::invalid_argument("KernelSpec: h must be positive");
  if (dim < 1) throw std::invalid_argument("KernelSpec: dim must be >= 1");
}

double ball_volume(int dim, double r) {
  // pi^(d/2) / Gamma(d/2 + 1) * r^d
  return std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0) * std::pow(r, dim);
}

double kernel_density(const KernelSpec& spec, const std::vector<double>& center,
                      const std::vector<double>& y) {
  if (center.size() != static_cast<std::size_t>(spec.dim) || y.size() != center.size())
    throw std::invalid_argument("kernel_density: dimension mismatch");
  double r2 = squared_norm_diff(center, y);
  if (spec.family == KernelFamily::kGaussian) {
    double norm = std::pow(2.0 * kPi, -0.5 * spec.dim) * std::pow(spec.h, -spec.dim);
    return norm * std::exp(-r2 / (2.0 * spec.h * spec.h));
  }
  return r2 <= spec.h * spec.h ? 1.0 / ball_volume(spec.dim, spec.h) : 0.0;
}

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma_p: a must be positive");
  if (x < 0.0) throw std::invalid_argument("regularized_gamma_p: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;

  const double log_gamma_a = std::lgamma(a);
  if (x < a + 1.0) {
    // Series: P(a,x) = x^a e^-x / Gamma(a) * sum x^n / (a (a+1) ... (a+n))
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-16)
        return sum * std::exp(-x + a * std::log(x) - log_gamma_a);
    }
    throw std::runtime_error("regularized_gamma_p: series failed to converge");
  }
  // Lentz continued fraction for Q(a,x); P = 1 - Q.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double f = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-16)
      return 1.0 - f * std::exp(-x + a * std::log(x) - log_gamma_a);
  }
  throw std::runtime_error("regularized_gamma_p: continued fraction failed to converge");
}

double radial_cell_mass(const KernelSpec& spec, double l) {
  if (l < 0.0) throw std::invalid_argument("radial_cell_mass: negative radius");
  if (std::isinf(l)) return 1.0;
  if (spec.family == KernelFamily::kGaussian)
    return regularized_gamma_p(0.5 * spec.dim, l * l / (2.0 * spec.h * spec.h));
  return std::min(1.0, std::pow(l / spec.h, spec.dim));
}

}  // namespace vwta
