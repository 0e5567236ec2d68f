#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "specadapt/spectra.hpp"

namespace specadapt {

struct EmissionLine {
  double center = 0.0;  // bin index
  double amplitude = 1.0;
  double width = 1.0;  // Gaussian sigma in bins
};

struct GeneratorSpec {
  int n_classes = kDefaultClasses;
  std::size_t dim = 1024;
  std::vector<std::vector<EmissionLine>> lines;  // per class
  double baseline = 0.05;
  double noise_sigma = 0.02;
  std::uint64_t seed = 0;

  // Throws Error when a table entry is out of range.
  void validate() const;
};

// Target-domain perturbation, drawn fresh for every spectrum.
struct ShiftSpec {
  double amplitude_scale_min = 0.5;
  double amplitude_scale_max = 1.5;
  double baseline_offset = 0.1;
  double extra_noise_sigma = 0.05;
  double center_jitter = 3.0;  // max |line shift| in bins

  void validate() const;
};

// Line tables drawn from `seed`: 5-10 lines per class, and no two classes
// share half or more of their line positions.
GeneratorSpec default_spec(std::uint64_t seed, int n_classes = kDefaultClasses,
                           std::size_t dim = 1024);

// Fraction of the smaller class's lines that sit within one bin of a line
// of the other class.
double line_overlap(const std::vector<EmissionLine>& a, const std::vector<EmissionLine>& b);

// `n` labeled raw spectra with labels assigned round-robin over classes.
// Intensities are clipped at zero.
// With `shift` set, every spectrum gets its own amplitude scaling, line
// jitter, baseline offset and extra noise.
SpectraSet generate(const GeneratorSpec& spec, std::size_t n,
                    const std::optional<ShiftSpec>& shift, std::uint64_t seed);

}  // namespace specadapt
