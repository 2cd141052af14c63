#include "mmsurf/lsek.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <string>

#include "mmsurf/error.hpp"
#include "mmsurf/parallel.hpp"

namespace mmsurf {

void KernelParams::validate() const {
  if (hermite_degree < 0 || hermite_degree % 2 != 0)
    throw ConfigError("Hermite degree must be even and non-negative");
  if (half_width < 1) throw ConfigError("stencil half-width must be positive");
  if (!(sigma > 0.0)) throw ConfigError("kernel window sigma must be positive");
  if (!(spacing > 0.0)) throw ConfigError("kernel spacing must be positive");
  if (!(diffusion >= 0.0)) throw ConfigError("diffusion rate must be non-negative");
  if (!(time >= 0.0)) throw ConfigError("evolution time must be non-negative");
}

KernelParams KernelParams::standard(double spacing, double diffusion, double time) {
  KernelParams p;
  p.hermite_degree = 88;
  p.half_width = 32;
  p.sigma = 3.05 * spacing;
  p.spacing = spacing;
  p.diffusion = diffusion;
  p.time = time;
  return p;
}

int covering_half_width(const KernelParams& params, double reach) {
  const double need = std::ceil(reach * sigma_t(params) / params.spacing);
  return std::max(params.half_width, static_cast<int>(need));
}

std::vector<double> hermite_h_sequence(int n_max, double x) {
  if (!std::isfinite(x)) throw DomainError("Hermite argument must be finite");
  if (n_max < 0) throw DomainError("Hermite degree must be non-negative");
  std::vector<double> h(static_cast<std::size_t>(n_max) + 1);
  h[0] = std::exp(-x * x);
  if (n_max >= 1) h[1] = 2.0 * x * h[0];
  for (int n = 1; n < n_max; ++n)
    h[n + 1] = 2.0 * x * h[n] - 2.0 * static_cast<double>(n) * h[n - 1];
  return h;
}

double sigma_t(const KernelParams& params) {
  return std::sqrt(params.sigma * params.sigma + 2.0 * params.diffusion * params.time);
}

KernelWeights::KernelWeights(std::vector<double> taps) : taps_(std::move(taps)) {
  if (taps_.size() % 2 != 1) throw ConfigError("kernel must have an odd number of taps");
}

double KernelWeights::sum() const {
  double s = 0.0;
  for (double w : taps_) s += w;
  return s;
}

double KernelWeights::l1_norm() const {
  double s = 0.0;
  for (double w : taps_) s += std::abs(w);
  return s;
}

void KernelWeights::write_csv(std::ostream& out) const {
  out << "l,weight\n" << std::setprecision(17);
  const int m = half_width();
  for (int l = -m; l <= m; ++l) out << l << ',' << (*this)[l] << '\n';
}

KernelWeights kernel_weights(const KernelParams& params) {
  params.validate();
  const double st = sigma_t(params);
  const double ratio = params.sigma / st;
  const double ratio2 = ratio * ratio;
  const int m = params.half_width;
  const int terms = params.hermite_degree / 2;
  const double c0 = ratio / std::sqrt(2.0 * std::numbers::pi);
  const double prefactor = params.spacing / params.sigma;

  std::vector<double> taps(static_cast<std::size_t>(2 * m + 1));
  for (int l = 0; l <= m; ++l) {
    const double x = static_cast<double>(l) * params.spacing / (std::numbers::sqrt2 * st);
    const auto h = hermite_h_sequence(params.hermite_degree, x);
    double c = c0;
    double acc = 0.0;
    for (int n = 0; n <= terms; ++n) {
      const double term = c * h[static_cast<std::size_t>(2 * n)];
      if (!std::isfinite(term))
        throw NumericError("non-finite kernel term n=" + std::to_string(n) + " at l=" +
                           std::to_string(l));
      acc += term;
      c *= -0.25 * ratio2 / static_cast<double>(n + 1);
    }
    const double w = prefactor * acc;
    taps[static_cast<std::size_t>(m + l)] = w;
    taps[static_cast<std::size_t>(m - l)] = w;
  }
  return KernelWeights(std::move(taps));
}

namespace {

// acc[i] = sum_{l=-M..M} w_l * src[i + M - l], accumulated in ascending l.
// `src` is the line padded with M values on either side.
void convolve_padded(const double* src, std::size_t n, const std::vector<double>& taps, double* acc) {
  const std::size_t m = taps.size() / 2;
  for (std::size_t i = 0; i < n; ++i) acc[i] = 0.0;
  for (std::size_t t = 0; t < taps.size(); ++t) {
    // t = l + M, so src index i + M - l = i + 2M - t.
    const double w = taps[t];
    const double* s = src + (2 * m - t);
    for (std::size_t i = 0; i < n; ++i) acc[i] += w * s[i];
  }
}

void pass_x(const std::vector<double>& in, std::vector<double>& out, const GridSpec& spec,
            const KernelWeights& kw, double pad, int workers) {
  const std::size_t nx = spec.counts[0];
  const std::size_t lines = spec.counts[1] * spec.counts[2];
  const std::size_t m = static_cast<std::size_t>(kw.half_width());
  parallel_for(lines, workers, [&](std::size_t b, std::size_t e) {
    std::vector<double> buf(nx + 2 * m, pad);
    for (std::size_t line = b; line < e; ++line) {
      const double* row = in.data() + line * nx;
      std::copy(row, row + nx, buf.begin() + static_cast<std::ptrdiff_t>(m));
      convolve_padded(buf.data(), nx, kw.taps(), out.data() + line * nx);
    }
  });
}

// Passes along y or z: each output row of nx values is a weighted sum of
// whole input rows, so the inner loop runs over contiguous memory.
void pass_rows(int axis, const std::vector<double>& in, std::vector<double>& out,
               const GridSpec& spec, const KernelWeights& kw, double pad, int workers) {
  const std::size_t nx = spec.counts[0], ny = spec.counts[1], nz = spec.counts[2];
  const std::size_t n_axis = spec.counts[axis];
  const std::size_t stride = axis == 1 ? nx : nx * ny;
  const long m = kw.half_width();
  const auto& taps = kw.taps();
  parallel_for(ny * nz, workers, [&](std::size_t b, std::size_t e) {
    const std::vector<double> pad_row(nx, pad);
    for (std::size_t row = b; row < e; ++row) {
      const std::size_t j = row % ny, k = row / ny;
      const long p = static_cast<long>(axis == 1 ? j : k);
      double* acc = out.data() + row * nx;
      for (std::size_t i = 0; i < nx; ++i) acc[i] = 0.0;
      for (long l = -m; l <= m; ++l) {
        const long q = p - l;
        const double* src = (q < 0 || q >= static_cast<long>(n_axis))
                                ? pad_row.data()
                                : in.data() + row * nx + static_cast<std::size_t>(q - p) * stride;
        const double w = taps[static_cast<std::size_t>(l + m)];
        for (std::size_t i = 0; i < nx; ++i) acc[i] += w * src[i];
      }
    }
  });
}

}  // namespace

std::vector<double> evolve_line(std::span<const double> samples, const KernelWeights& weights,
                                double pad_lo, double pad_hi) {
  const std::size_t n = samples.size();
  const std::size_t m = static_cast<std::size_t>(weights.half_width());
  std::vector<double> buf(n + 2 * m);
  std::fill(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(m), pad_lo);
  std::copy(samples.begin(), samples.end(), buf.begin() + static_cast<std::ptrdiff_t>(m));
  std::fill(buf.begin() + static_cast<std::ptrdiff_t>(m + n), buf.end(), pad_hi);
  std::vector<double> out(n);
  convolve_padded(buf.data(), n, weights.taps(), out.data());
  return out;
}

ScalarGrid3 evolve_3d(const ScalarGrid3& density, const std::array<KernelWeights, 3>& weights,
                      double pad_value, int workers, AxisOrder order, EvolveTiming* timing) {
  const GridSpec& spec = density.spec();
  std::vector<double> a = density.values();
  std::vector<double> b(a.size());
  for (int axis : order) {
    const auto t0 = std::chrono::steady_clock::now();
    if (axis == 0)
      pass_x(a, b, spec, weights[0], pad_value, workers);
    else
      pass_rows(axis, a, b, spec, weights[axis], pad_value, workers);
    std::swap(a, b);
    if (timing)
      timing->axis_seconds[axis] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  ScalarGrid3 out(spec);
  out.values() = std::move(a);
  return out;
}

ScalarGrid3 evolve_3d(const ScalarGrid3& density, const std::array<KernelParams, 3>& params,
                      double pad_value, int workers, AxisOrder order, EvolveTiming* timing) {
  const GridSpec& spec = density.spec();
  std::array<KernelWeights, 3> weights;
  for (int ax = 0; ax < 3; ++ax) {
    const auto& p = params[ax];
    if (std::abs(p.spacing - spec.spacing[ax]) > 1e-12 * spec.spacing[ax])
      throw ConfigError("kernel spacing on axis " + std::to_string(ax) +
                        " differs from the grid spacing");
    if (p.time != params[0].time || p.diffusion != params[0].diffusion)
      throw ConfigError("all axes must share the diffusion rate and evolution time");
    weights[ax] = kernel_weights(p);
  }
  return evolve_3d(density, weights, pad_value, workers, order, timing);
}

}  // namespace mmsurf
