#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "specadapt/dimred.hpp"
#include "specadapt/network.hpp"
#include "specadapt/spectra.hpp"

namespace specadapt {

inline constexpr int kCheckpointVersion = 1;

enum class NormalizationMode { kPerSpectrumMinMax, kNone };

// Everything needed to go from a raw spectrum to a class decision.
struct Pipeline {
  NormalizationMode normalization = NormalizationMode::kPerSpectrumMinMax;
  PcaModel reduction;
  MlpAdaptModel network;

  Eigen::VectorXd features(const Spectrum& raw) const;
  FeatureSet features(const SpectraSet& raw) const;
  int predict(const Spectrum& raw) const;

  // Throws DimensionError unless D -> k -> network input lines up.
  void validate() const;
};

struct CheckpointMeta {
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> config;
  std::string created;  // ISO-8601 UTC
};

struct Checkpoint {
  int version = kCheckpointVersion;
  Pipeline pipeline;
  CheckpointMeta meta;
};

// 16 lowercase hex digits of the IEEE-754 bit pattern.
std::string encode_double(double v);
// Throws Error on anything but exactly 16 hex digits.
double decode_double(const std::string& hex);

// Single JSON document; float arrays row-major as hex strings with explicit
// shapes. Output is canonical: save(load(save(c))) is byte-identical.
void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
std::string checkpoint_to_string(const Checkpoint& c);

Checkpoint load_checkpoint(const std::filesystem::path& path);
Checkpoint checkpoint_from_string(const std::string& text);

std::string utc_timestamp();

}  // namespace specadapt
