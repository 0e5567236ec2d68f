#include "specadapt/model_io.hpp"

#include <bit>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "specadapt/error.hpp"

namespace specadapt {

using nlohmann::json;

Eigen::VectorXd Pipeline::features(const Spectrum& raw) const {
  if (normalization == NormalizationMode::kPerSpectrumMinMax) {
    return reduction.transform(min_max_normalize(raw).intensities);
  }
  return reduction.transform(raw.intensities);
}

FeatureSet Pipeline::features(const SpectraSet& raw) const {
  if (normalization == NormalizationMode::kPerSpectrumMinMax) {
    return reduce(reduction, normalize_all(raw));
  }
  return reduce(reduction, raw);
}

int Pipeline::predict(const Spectrum& raw) const { return specadapt::predict(network, features(raw)); }

void Pipeline::validate() const {
  network.validate();
  if (reduction.components().cols() != reduction.mean().size()) {
    throw DimensionError("reduction components and mean disagree on D");
  }
  if (reduction.output_dim() != network.input_dim()) {
    throw DimensionError("reduction outputs " + std::to_string(reduction.output_dim()) +
                         " features but the network expects " +
                         std::to_string(network.input_dim()));
  }
}

std::string encode_double(double v) {
  char buf[17];
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[bits & 0xf];
    bits >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

double decode_double(const std::string& hex) {
  if (hex.size() != 16) throw Error("malformed hex float '" + hex + "'");
  std::uint64_t bits = 0;
  auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), bits, 16);
  if (ec != std::errc() || ptr != hex.data() + hex.size()) {
    throw Error("malformed hex float '" + hex + "'");
  }
  return std::bit_cast<double>(bits);
}

namespace {

json encode_matrix(const Eigen::MatrixXd& m) {
  json values = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(encode_double(m(r, c)));
  }
  return values;
}

json encode_vector(const Eigen::VectorXd& v) {
  json values = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) values.push_back(encode_double(v(i)));
  return values;
}

std::vector<double> decode_array(const json& j, std::size_t expected, const std::string& what) {
  if (!j.is_array()) throw Error(what + " must be an array");
  if (j.size() != expected) {
    throw DimensionError(what + " has " + std::to_string(j.size()) + " values, shape implies " +
                         std::to_string(expected));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& e : j) {
    if (!e.is_string()) throw Error(what + " entries must be hex strings");
    out.push_back(decode_double(e.get<std::string>()));
  }
  return out;
}

std::pair<Eigen::Index, Eigen::Index> decode_shape(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned()) {
    throw Error(what + " shape must be [rows, cols]");
  }
  return {j[0].get<Eigen::Index>(), j[1].get<Eigen::Index>()};
}

Eigen::MatrixXd decode_matrix(const json& values, Eigen::Index rows, Eigen::Index cols,
                              const std::string& what) {
  auto flat = decode_array(values, static_cast<std::size_t>(rows * cols), what);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

json encode_layer(const DenseLayer& l) {
  return json{{"shape", {l.out(), l.in()}},
              {"weights", encode_matrix(l.weights)},
              {"bias", encode_vector(l.bias)}};
}

DenseLayer decode_layer(const json& j, const std::string& name) {
  if (!j.is_object()) throw Error("network." + name + " missing");
  auto [rows, cols] = decode_shape(j.at("shape"), "network." + name);
  DenseLayer l;
  l.weights = decode_matrix(j.at("weights"), rows, cols, "network." + name + ".weights");
  auto b = decode_array(j.at("bias"), static_cast<std::size_t>(rows), "network." + name + ".bias");
  l.bias = Eigen::Map<Eigen::VectorXd>(b.data(), rows);
  return l;
}

const char* normalization_name(NormalizationMode m) {
  return m == NormalizationMode::kPerSpectrumMinMax ? "per_spectrum_minmax" : "none";
}

}  // namespace

std::string checkpoint_to_string(const Checkpoint& c) {
  c.pipeline.validate();
  const auto& net = c.pipeline.network;
  const auto& pca = c.pipeline.reduction;
  json doc;
  doc["version"] = c.version;
  doc["normalization"] = normalization_name(c.pipeline.normalization);
  doc["reduction"] = {{"kind", "pca"},
                      {"shape", {pca.output_dim(), pca.input_dim()}},
                      {"mean", encode_vector(pca.mean())},
                      {"components", encode_matrix(pca.components())}};
  doc["network"] = {{"feature1", encode_layer(net.layers.feature1)},
                    {"feature2", encode_layer(net.layers.feature2)},
                    {"label_head", encode_layer(net.layers.label_head)},
                    {"domain_hidden", encode_layer(net.layers.domain_hidden)},
                    {"domain_out", encode_layer(net.layers.domain_out)},
                    {"dropout_rate", encode_double(net.dropout_rate)}};
  doc["meta"] = {{"seeds", c.meta.seeds}, {"config", c.meta.config}, {"created", c.meta.created}};
  return doc.dump(1) + "\n";
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  const std::string text = checkpoint_to_string(c);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    Checkpoint c;
    if (!doc.is_object() || !doc.contains("version")) throw Error("checkpoint has no version");
    c.version = doc.at("version").get<int>();
    if (c.version != kCheckpointVersion) {
      throw Error("unsupported checkpoint version " + std::to_string(c.version));
    }
    const auto norm = doc.at("normalization").get<std::string>();
    if (norm == "per_spectrum_minmax") {
      c.pipeline.normalization = NormalizationMode::kPerSpectrumMinMax;
    } else if (norm == "none") {
      c.pipeline.normalization = NormalizationMode::kNone;
    } else {
      throw Error("unknown normalization '" + norm + "'");
    }

    const auto& red = doc.at("reduction");
    auto [k, dim] = decode_shape(red.at("shape"), "reduction");
    auto mean = decode_array(red.at("mean"), static_cast<std::size_t>(dim), "reduction.mean");
    c.pipeline.reduction =
        PcaModel(Eigen::Map<Eigen::VectorXd>(mean.data(), dim),
                 decode_matrix(red.at("components"), k, dim, "reduction.components"));

    const auto& net = doc.at("network");
    auto& layers = c.pipeline.network.layers;
    layers.feature1 = decode_layer(net.at("feature1"), "feature1");
    layers.feature2 = decode_layer(net.at("feature2"), "feature2");
    layers.label_head = decode_layer(net.at("label_head"), "label_head");
    layers.domain_hidden = decode_layer(net.at("domain_hidden"), "domain_hidden");
    layers.domain_out = decode_layer(net.at("domain_out"), "domain_out");
    c.pipeline.network.dropout_rate = decode_double(net.at("dropout_rate").get<std::string>());
    c.pipeline.validate();

    const auto& meta = doc.at("meta");
    c.meta.seeds = meta.at("seeds").get<std::map<std::string, std::uint64_t>>();
    c.meta.config = meta.at("config").get<std::map<std::string, std::string>>();
    c.meta.created = meta.at("created").get<std::string>();
    return c;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed checkpoint: ") + e.what());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_string(buf.str());
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace specadapt
