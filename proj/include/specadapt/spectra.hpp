#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace specadapt {

inline constexpr int kDefaultClasses = 12;

// One intensity vector over the wavelength grid. `label` is absent for
// unlabeled (target-domain) spectra.
struct Spectrum {
  std::vector<double> intensities;
  std::optional<int> label;

  std::size_t dim() const { return intensities.size(); }
};

// Ordered collection of spectra sharing one wavelength grid.
class SpectraSet {
 public:
  explicit SpectraSet(std::size_t dim, int n_classes = kDefaultClasses);

  // Throws DimensionError on a length mismatch and Error on an out-of-range
  // label.
  void add(Spectrum s);

  std::size_t size() const { return spectra_.size(); }
  bool empty() const { return spectra_.empty(); }
  std::size_t dim() const { return dim_; }
  int n_classes() const { return n_classes_; }

  const Spectrum& operator[](std::size_t i) const { return spectra_[i]; }
  const std::vector<Spectrum>& spectra() const { return spectra_; }
  auto begin() const { return spectra_.begin(); }
  auto end() const { return spectra_.end(); }

  const std::optional<std::vector<double>>& wavelengths() const { return wavelengths_; }
  void set_wavelengths(std::vector<double> w);

  // Subset in the given index order.
  SpectraSet select(std::span<const std::size_t> indices) const;

 private:
  std::size_t dim_;
  int n_classes_;
  std::vector<Spectrum> spectra_;
  std::optional<std::vector<double>> wavelengths_;
};

// CSV: header `label,w_0,...,w_{D-1}`, one row per spectrum, label -1 for
// unlabeled rows. Errors are ParseError with the offending line.
SpectraSet load_spectra(const std::filesystem::path& path, int n_classes = kDefaultClasses);
void save_spectra(const SpectraSet& set, const std::filesystem::path& path);

// Per-spectrum min-max scaling into [0,1]. A constant spectrum maps to all
// zeros. Throws Error on non-finite input.
Spectrum min_max_normalize(const Spectrum& s);
SpectraSet normalize_all(const SpectraSet& set);

// Seeded shuffle followed by a largest-remainder partition. Fractions must be
// non-negative and sum to 1 within 1e-9.
std::vector<SpectraSet> split(const SpectraSet& set, std::span<const double> fractions,
                              std::uint64_t seed);

// Partition sizes used by split(); exposed for callers that split parallel
// arrays.
std::vector<std::size_t> largest_remainder_sizes(std::size_t n, std::span<const double> fractions);

}  // namespace specadapt
