#ifndef VWTA_KERNELS_HPP
#define VWTA_KERNELS_HPP

#include <vector>

namespace vwta {

enum class KernelFamily { kGaussian, kUniform };

/* Isotropic smoothing kernel with scale h, normalized to unit mass on R^d. */
struct KernelSpec {
  KernelFamily family = KernelFamily::kGaussian;
  double h = 1.0;
  int dim = 2;

  KernelSpec() = default;
  KernelSpec(KernelFamily f, double bandwidth, int d);
};

/* Density of the kernel centered at c, evaluated at y. */
double kernel_density(const KernelSpec& spec, const std::vector<double>& center,
                      const std::vector<double>& y);

/* Kernel mass of the centered ball of radius l: the weight a cell captures
 * out to distance l along every direction.  Gaussian reduces to the
 * regularized lower incomplete gamma at (d/2, l^2 / (2 h^2)); uniform to
 * min(1, (l/h)^d).  Infinite l gives exactly 1. */
double radial_cell_mass(const KernelSpec& spec, double l);

/* Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
 * Series expansion for x < a + 1, continued fraction otherwise. */
double regularized_gamma_p(double a, double x);

/* Volume of the d-ball of radius r. */
double ball_volume(int dim, double r);

}  // namespace vwta

#endif
