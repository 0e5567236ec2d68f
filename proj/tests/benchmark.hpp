#pragma once

// Synthetic drift benchmark shared by the pipeline-level tests: a trained
// source model plus a normalized, reduced stream whose tail is shifted.

#include <cstdint>
#include <optional>

#include "specadapt/dimred.hpp"
#include "specadapt/network.hpp"
#include "specadapt/synthgen.hpp"

namespace specadapt::testing {

struct BenchmarkOptions {
  std::size_t dim = 1024;
  Eigen::Index k = 32;
  std::size_t n_train = 2000;
  std::size_t n_source_stream = 1000;  // unshifted head of the stream
  std::size_t n_shifted_stream = 4000;
  int epochs = 100;
};

struct Benchmark {
  GeneratorSpec spec;
  PcaModel pca;
  FeatureSet train;
  FeatureSet stream;
  MlpAdaptModel model;
  TrainConfig train_config;
};

inline SpectraSet normalized(const GeneratorSpec& spec, std::size_t n,
                             const std::optional<ShiftSpec>& shift, std::uint64_t seed) {
  return normalize_all(generate(spec, n, shift, seed));
}

inline Benchmark make_benchmark(std::uint64_t seed, const BenchmarkOptions& o = {}) {
  Benchmark b;
  b.spec = default_spec(seed, kDefaultClasses, o.dim);
  const auto train = normalized(b.spec, o.n_train, std::nullopt, seed * 100 + 1);
  SpectraSet stream(o.dim, b.spec.n_classes);
  for (const auto& s : normalized(b.spec, o.n_source_stream, std::nullopt, seed * 100 + 2)) {
    stream.add(s);
  }
  for (const auto& s : normalized(b.spec, o.n_shifted_stream, ShiftSpec{}, seed * 100 + 3)) {
    stream.add(s);
  }
  b.pca = fit_pca(train, PcaOptions{.k = o.k, .seed = seed});
  b.train = reduce(b.pca, train);
  b.stream = reduce(b.pca, stream);
  b.train_config.epochs = o.epochs;
  b.train_config.seed = seed;
  b.model = train_supervised(init_model(o.k, 64, b.spec.n_classes, seed), b.train, b.train_config)
                .model;
  return b;
}

}  // namespace specadapt::testing
