#include "specadapt/spectra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <string_view>

#include "specadapt/error.hpp"

namespace specadapt {

SpectraSet::SpectraSet(std::size_t dim, int n_classes) : dim_(dim), n_classes_(n_classes) {
  if (n_classes < 2) throw Error("n_classes must be at least 2");
}

void SpectraSet::add(Spectrum s) {
  if (s.dim() != dim_) {
    throw DimensionError("spectrum has " + std::to_string(s.dim()) + " points, set expects " +
                         std::to_string(dim_));
  }
  if (s.label && (*s.label < 0 || *s.label >= n_classes_)) {
    throw Error("label " + std::to_string(*s.label) + " outside [0, " +
                std::to_string(n_classes_) + ")");
  }
  spectra_.push_back(std::move(s));
}

void SpectraSet::set_wavelengths(std::vector<double> w) {
  if (w.size() != dim_) throw DimensionError("wavelength grid length differs from set dim");
  wavelengths_ = std::move(w);
}

SpectraSet SpectraSet::select(std::span<const std::size_t> indices) const {
  SpectraSet out(dim_, n_classes_);
  out.wavelengths_ = wavelengths_;
  out.spectra_.reserve(indices.size());
  for (auto i : indices) out.spectra_.push_back(spectra_.at(i));
  return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

SpectraSet load_spectra(const std::filesystem::path& path, int n_classes) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ParseError(0, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_fields(line);
  if (header.size() < 2 || header.front() != "label") {
    throw ParseError(0, "header must be `label,w_0,...` with at least one intensity column");
  }
  const std::size_t dim = header.size() - 1;
  SpectraSet set(dim, n_classes);

  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != dim + 1) {
      throw ParseError(row, "expected " + std::to_string(dim + 1) + " fields, got " +
                                std::to_string(fields.size()));
    }
    long label = 0;
    if (!parse_number(fields[0], label)) {
      throw ParseError(row, "non-integer label '" + std::string(fields[0]) + "'");
    }
    Spectrum s;
    if (label == -1) {
      s.label = std::nullopt;
    } else if (label < 0 || label >= n_classes) {
      throw ParseError(row, "label " + std::to_string(label) + " outside [0, " +
                                std::to_string(n_classes) + ") and not -1");
    } else {
      s.label = static_cast<int>(label);
    }
    s.intensities.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!parse_number(fields[j + 1], s.intensities[j])) {
        throw ParseError(row, "non-numeric value '" + std::string(fields[j + 1]) + "' in column " +
                                  std::to_string(j + 1));
      }
    }
    set.add(std::move(s));
  }
  return set;
}

void save_spectra(const SpectraSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  std::string buf = "label";
  for (std::size_t j = 0; j < set.dim(); ++j) buf += ",w_" + std::to_string(j);
  buf += '\n';
  out << buf;

  char num[64];
  for (const auto& s : set) {
    buf.clear();
    buf += s.label ? std::to_string(*s.label) : "-1";
    for (double v : s.intensities) {
      // Shortest representation that parses back to the same double.
      auto [end, ec] = std::to_chars(num, num + sizeof num, v);
      buf += ',';
      buf.append(num, end);
    }
    buf += '\n';
    out << buf;
  }
  if (!out) throw Error("write failed for " + path.string());
}

Spectrum min_max_normalize(const Spectrum& s) {
  if (s.intensities.empty()) throw Error("cannot normalize an empty spectrum");
  double lo = s.intensities.front();
  double hi = lo;
  for (double v : s.intensities) {
    if (!std::isfinite(v)) throw Error("non-finite intensity");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Spectrum out;
  out.label = s.label;
  out.intensities.resize(s.intensities.size(), 0.0);
  if (hi == lo) return out;
  const double range = hi - lo;
  for (std::size_t i = 0; i < s.intensities.size(); ++i) {
    const double v = s.intensities[i];
    // Pin the extremes so they land on exactly 0 and 1.
    out.intensities[i] = v == lo ? 0.0 : v == hi ? 1.0 : (v - lo) / range;
  }
  return out;
}

SpectraSet normalize_all(const SpectraSet& set) {
  SpectraSet out(set.dim(), set.n_classes());
  if (set.wavelengths()) out.set_wavelengths(*set.wavelengths());
  for (const auto& s : set) out.add(min_max_normalize(s));
  return out;
}

std::vector<std::size_t> largest_remainder_sizes(std::size_t n, std::span<const double> fractions) {
  if (fractions.empty()) throw Error("split needs at least one fraction");
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw Error("split fractions must be non-negative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error("split fractions must sum to 1");

  std::vector<std::size_t> sizes(fractions.size());
  std::vector<double> remainder(fractions.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double exact = static_cast<double>(n) * fractions[i];
    sizes[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  std::vector<std::size_t> order(fractions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % order.size()]];
  return sizes;
}

std::vector<SpectraSet> split(const SpectraSet& set, std::span<const double> fractions,
                              std::uint64_t seed) {
  const auto sizes = largest_remainder_sizes(set.size(), fractions);
  std::vector<std::size_t> perm(set.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<SpectraSet> parts;
  std::size_t offset = 0;
  for (auto size : sizes) {
    parts.push_back(set.select(std::span(perm).subspan(offset, size)));
    offset += size;
  }
  return parts;
}

}  // namespace specadapt
