#include "specadapt/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "specadapt/error.hpp"

namespace specadapt {

void GeneratorSpec::validate() const {
  if (n_classes < 2) throw Error("generator needs at least 2 classes");
  if (dim < 1) throw Error("generator dim must be positive");
  if (lines.size() != static_cast<std::size_t>(n_classes)) {
    throw Error("line table has " + std::to_string(lines.size()) + " classes, expected " +
                std::to_string(n_classes));
  }
  for (const auto& cls : lines) {
    if (cls.empty()) throw Error("every class needs at least one emission line");
    for (const auto& l : cls) {
      if (!(l.center >= 0 && l.center < static_cast<double>(dim))) {
        throw Error("line center outside [0, D)");
      }
      if (!(l.amplitude > 0) || !(l.width > 0)) throw Error("line amplitude and width must be > 0");
    }
  }
  if (!(noise_sigma >= 0)) throw Error("noise sigma must be non-negative");
}

void ShiftSpec::validate() const {
  if (!(amplitude_scale_min >= 0 && amplitude_scale_min <= amplitude_scale_max)) {
    throw Error("shift amplitude range must be ordered and non-negative");
  }
  if (!(baseline_offset >= 0 && extra_noise_sigma >= 0 && center_jitter >= 0)) {
    throw Error("shift magnitudes must be non-negative");
  }
}

double line_overlap(const std::vector<EmissionLine>& a, const std::vector<EmissionLine>& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& other = a.size() <= b.size() ? b : a;
  if (small.empty()) return 0.0;
  std::size_t shared = 0;
  for (const auto& l : small) {
    for (const auto& o : other) {
      if (std::abs(l.center - o.center) <= 1.0) {
        ++shared;
        break;
      }
    }
  }
  return static_cast<double>(shared) / static_cast<double>(small.size());
}

GeneratorSpec default_spec(std::uint64_t seed, int n_classes, std::size_t dim) {
  if (n_classes < 2 || dim < 32) throw Error("default_spec needs >= 2 classes and D >= 32");
  GeneratorSpec spec;
  spec.n_classes = n_classes;
  spec.dim = dim;
  spec.seed = seed;

  std::mt19937_64 rng(seed);
  const double margin = 8.0;
  std::uniform_int_distribution<int> n_lines(5, 10);
  std::uniform_int_distribution<long> center(static_cast<long>(margin),
                                             static_cast<long>(static_cast<double>(dim) - margin));
  std::uniform_real_distribution<double> amplitude(0.2, 1.0);
  std::uniform_real_distribution<double> width(0.5, 1.5);

  constexpr int kMaxRetries = 1000;
  for (int c = 0; c < n_classes; ++c) {
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxRetries && !accepted; ++attempt) {
      std::vector<EmissionLine> cls(static_cast<std::size_t>(n_lines(rng)));
      for (auto& l : cls) {
        l.center = static_cast<double>(center(rng));
        l.amplitude = amplitude(rng);
        l.width = width(rng);
      }
      accepted = true;
      for (const auto& prev : spec.lines) accepted = accepted && line_overlap(cls, prev) < 0.5;
      if (accepted) spec.lines.push_back(std::move(cls));
    }
    if (!accepted) throw Error("could not draw distinct line tables within the retry bound");
  }
  return spec;
}

SpectraSet generate(const GeneratorSpec& spec, std::size_t n,
                    const std::optional<ShiftSpec>& shift, std::uint64_t seed) {
  spec.validate();
  if (shift) shift->validate();
  if (n == 0) throw Error("generate needs n >= 1");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SpectraSet out(spec.dim, spec.n_classes);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(spec.n_classes));
    Spectrum s;
    s.label = label;
    s.intensities.assign(spec.dim, spec.baseline);

    for (const auto& line : spec.lines[static_cast<std::size_t>(label)]) {
      double amp = line.amplitude;
      double c = line.center;
      if (shift) {
        amp *= shift->amplitude_scale_min +
               (shift->amplitude_scale_max - shift->amplitude_scale_min) * unit(rng);
        c += shift->center_jitter * (2.0 * unit(rng) - 1.0);
      }
      const double inv = 1.0 / (2.0 * line.width * line.width);
      for (std::size_t k = 0; k < spec.dim; ++k) {
        const double d = static_cast<double>(k) - c;
        s.intensities[k] += amp * std::exp(-d * d * inv);
      }
    }
    const double offset = shift ? shift->baseline_offset : 0.0;
    const double extra = shift ? shift->extra_noise_sigma : 0.0;
    for (auto& v : s.intensities) {
      v += offset;
      if (spec.noise_sigma > 0) v += spec.noise_sigma * gauss(rng);
      if (extra > 0) v += extra * gauss(rng);
      v = std::max(v, 0.0);  // detector counts are never negative
    }
    out.add(std::move(s));
  }
  return out;
}

}  // namespace specadapt
