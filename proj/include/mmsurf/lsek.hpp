#pragma once

#include <array>
#include <ostream>
#include <span>
#include <vector>

#include "mmsurf/grid.hpp"

namespace mmsurf {

/// Configuration of the single-step evolution kernel along one axis.
struct KernelParams {
  int hermite_degree = 88;  // highest Hermite degree, even
  int half_width = 32;      // stencil is 2 * half_width + 1 taps
  double sigma = 0.0;       // window width, Angstrom
  double spacing = 0.0;     // grid spacing, Angstrom
  double diffusion = 1.0;   // Angstrom^2 per time unit
  double time = 0.0;

  /// Throws ConfigError when any invariant is violated.
  void validate() const;

  /// M_h = 88, M = 32, sigma = 3.05 h.
  static KernelParams standard(double spacing, double diffusion, double time);
};

/// Smallest half-width whose stencil reaches `reach` time-broadened window
/// widths, never below the configured half-width.
int covering_half_width(const KernelParams& params, double reach = 8.0);

/// h_n(x) = exp(-x^2) H_n(x) for n = 0..n_max via the damped recurrence.
std::vector<double> hermite_h_sequence(int n_max, double x);

/// sqrt(sigma^2 + 2 D t).
double sigma_t(const KernelParams& params);

class KernelWeights {
 public:
  KernelWeights() = default;
  explicit KernelWeights(std::vector<double> taps);

  int half_width() const { return static_cast<int>(taps_.size() / 2); }
  /// Weight for offset l in [-M, M].
  double operator[](int l) const { return taps_[static_cast<std::size_t>(l + half_width())]; }
  const std::vector<double>& taps() const { return taps_; }

  double sum() const;
  double l1_norm() const;

  void write_csv(std::ostream& out) const;

 private:
  std::vector<double> taps_;
};

/// Samples the evolution kernel at x = l h, l in [-M, M].
KernelWeights kernel_weights(const KernelParams& params);

/// out_i = sum_l w_l in_{i-l}; indices below 0 read pad_lo, beyond the end pad_hi.
std::vector<double> evolve_line(std::span<const double> samples, const KernelWeights& weights,
                                double pad_lo, double pad_hi);
inline std::vector<double> evolve_line(std::span<const double> samples,
                                       const KernelWeights& weights, double pad_value) {
  return evolve_line(samples, weights, pad_value, pad_value);
}

/// Order in which the three separable passes are applied.
using AxisOrder = std::array<int, 3>;
inline constexpr AxisOrder kXYZ{0, 1, 2};

struct EvolveTiming {
  std::array<double, 3> axis_seconds{};  // indexed by axis
};

/// Advances the density from time 0 to params.time in one separable sweep.
/// Every per-axis kernel must share D and t, and its spacing must equal the
/// grid spacing on that axis.
ScalarGrid3 evolve_3d(const ScalarGrid3& density, const std::array<KernelParams, 3>& params,
                      double pad_value, int workers = 0, AxisOrder order = kXYZ,
                      EvolveTiming* timing = nullptr);

/// Same sweep with precomputed weights (no spacing check).
ScalarGrid3 evolve_3d(const ScalarGrid3& density, const std::array<KernelWeights, 3>& weights,
                      double pad_value, int workers = 0, AxisOrder order = kXYZ,
                      EvolveTiming* timing = nullptr);

}  // namespace mmsurf
