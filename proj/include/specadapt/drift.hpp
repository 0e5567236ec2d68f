#pragma once

#include <cstddef>
#include <span>

#include "specadapt/spectra.hpp"

namespace specadapt {

inline constexpr double kDefaultShiftAlpha = 0.01;

struct KsResult {
  double statistic = 0.0;  // sup |ECDF_a - ECDF_b|
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t m = 0;
};

// Two-sample Kolmogorov-Smirnov test. The statistic is exact (merged sorted
// walk); the p-value uses the asymptotic Kolmogorov distribution with the
// (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) small-sample factor.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2),
// clamped to [0,1].
double kolmogorov_q(double lambda);

// True iff p_value < alpha (strict). alpha must lie in (0,1).
bool detect_shift(const KsResult& r, double alpha = kDefaultShiftAlpha);

// Treats each spectrum's intensities as a 1-D sample.
KsResult spectrum_shift(const Spectrum& a, const Spectrum& b);

}  // namespace specadapt
