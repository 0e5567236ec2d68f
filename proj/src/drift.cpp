#include "specadapt/drift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "specadapt/error.hpp"

namespace specadapt {

namespace {

std::vector<double> sorted_sample(std::span<const double> x) {
  if (x.empty()) throw Error("KS test needs nonempty samples");
  std::vector<double> out(x.begin(), x.end());
  for (double v : out) {
    if (!std::isfinite(v)) throw Error("KS test sample contains a non-finite value");
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double kolmogorov_q(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Same function via its theta-series form, which converges fast here and
    // stays monotone where the alternating series is dominated by rounding.
    const double f = -(std::numbers::pi * std::numbers::pi) / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int j = 1; j < 1000; j += 2) {
      const double term = std::exp(f * j * j);
      cdf += term;
      if (term < 1e-17) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * cdf, 0.0, 1.0);
  }
  const double a2 = -2.0 * lambda * lambda;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j < 100000; ++j) {
    const double term = sign * std::exp(a2 * j * j);
    sum += term;
    if (std::abs(term) < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  const auto xa = sorted_sample(a);
  const auto xb = sorted_sample(b);
  const std::size_t n = xa.size();
  const std::size_t m = xb.size();
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);

  // Advance past every copy of the next distinct value so ties are evaluated
  // once, after both step functions have jumped.
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < n && j < m) {
    const double t = std::min(xa[i], xb[j]);
    while (i < n && xa[i] == t) ++i;
    while (j < m && xb[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / dn - static_cast<double>(j) / dm));
  }

  KsResult r;
  r.statistic = d;
  r.n = n;
  r.m = m;
  const double ne = dn * dm / (dn + dm);
  const double sqrt_ne = std::sqrt(ne);
  r.p_value = kolmogorov_q((sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d);
  return r;
}

bool detect_shift(const KsResult& r, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
  return r.p_value < alpha;
}

KsResult spectrum_shift(const Spectrum& a, const Spectrum& b) {
  if (a.dim() != b.dim()) throw DimensionError("spectra differ in length");
  return ks_two_sample(a.intensities, b.intensities);
}

}  // namespace specadapt
