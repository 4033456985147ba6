#include "soundguard/nn/model_io.hpp"

#include <cmath>
#include <cstring>

#include <json.hpp>

#include "../json_codec.hpp"

#include "soundguard/error.hpp"
#include "soundguard/file_util.hpp"

namespace soundguard::nn {
namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'S', 'G', 'M', '1'};

template <typename T>
void Put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    Need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string GetString(std::size_t n) {
    Need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) Fail(ErrorKind::kFormat, "truncated model file");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

json SpecToJson(const ModelSpec& s) {
  return {{"kind", ModelKindName(s.kind)},
          {"input_frames", s.input_frames},
          {"input_dims", s.input_dims},
          {"dense_units", s.dense_units},
          {"conv_filters", s.conv_filters},
          {"conv_layers", s.conv_layers},
          {"kernel_size", s.kernel_size},
          {"stride", s.stride},
          {"pool_size", s.pool_size},
          {"head_units", s.head_units},
          {"seed", s.seed}};
}

ModelSpec SpecFromJson(const json& j) {
  ModelSpec s;
  s.kind = ParseModelKind(j.at("kind").get<std::string>());
  s.input_frames = j.at("input_frames").get<std::size_t>();
  s.input_dims = j.at("input_dims").get<std::size_t>();
  s.dense_units = j.at("dense_units").get<std::vector<std::size_t>>();
  s.conv_filters = j.at("conv_filters").get<std::size_t>();
  s.conv_layers = j.at("conv_layers").get<std::size_t>();
  s.kernel_size = j.at("kernel_size").get<std::size_t>();
  s.stride = j.at("stride").get<std::size_t>();
  s.pool_size = j.at("pool_size").get<std::size_t>();
  s.head_units = j.at("head_units").get<std::size_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

json MetaToJson(const ModelMetadata& m) {
  return {{"feature_kind", FeatureKindName(m.feature_kind)},
          {"feature_config", detail::ToJson(m.feature_config)},
          {"segment_length_seconds", m.segment.length_seconds},
          {"segment_hop_seconds", m.segment.hop_seconds},
          {"cmvn", detail::ToJson(m.cmvn)},
          {"validation_threshold", m.validation_threshold},
          {"train_config_digest", m.train_config_digest}};
}

ModelMetadata MetaFromJson(const json& j) {
  ModelMetadata m;
  m.feature_kind = ParseFeatureKind(j.at("feature_kind").get<std::string>());
  m.feature_config = detail::FeatureConfigFromJson(j.at("feature_config"));
  m.segment.length_seconds = j.at("segment_length_seconds").get<double>();
  m.segment.hop_seconds = j.at("segment_hop_seconds").get<double>();
  m.cmvn = detail::CmvnFromJson(j.at("cmvn"));
  m.validation_threshold = j.at("validation_threshold").get<double>();
  m.train_config_digest = j.at("train_config_digest").get<std::string>();
  return m;
}

}  // namespace

std::vector<std::uint8_t> EncodeModel(const Model& model) {
  const std::string header = json{{"spec", SpecToJson(model.spec)}, {"meta", MetaToJson(model.meta)}}.dump();
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  Put<std::uint16_t>(out, kModelFormatVersion);
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(model.parameters.size()));
  for (const auto& t : model.parameters) {
    Put<std::uint16_t>(out, static_cast<std::uint16_t>(t.name.size()));
    out.insert(out.end(), t.name.begin(), t.name.end());
    Put<std::uint8_t>(out, static_cast<std::uint8_t>(t.shape.size()));
    for (auto d : t.shape) Put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (double v : t.data) Put<float>(out, static_cast<float>(v));
  }
  return out;
}

Model DecodeModel(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    Fail(ErrorKind::kFormat, "not a model file (bad magic)");
  }
  Cursor in(bytes.subspan(4));
  const auto version = in.Get<std::uint16_t>();
  if (version != kModelFormatVersion) {
    Fail(ErrorKind::kUnsupportedVersion, "model format version " + std::to_string(version) +
                                             " is not supported (expected " +
                                             std::to_string(kModelFormatVersion) + ")");
  }
  const auto header_len = in.Get<std::uint32_t>();
  Model model;
  try {
    const json header = json::parse(in.GetString(header_len));
    model.spec = SpecFromJson(header.at("spec"));
    model.meta = MetaFromJson(header.at("meta"));
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, std::string("bad model header: ") + e.what());
  }

  const TensorList layout = ParameterLayout(model.spec);
  const auto count = in.Get<std::uint32_t>();
  if (count != layout.size()) Fail(ErrorKind::kFormat, "parameter count does not match model spec");
  for (const auto& expected : layout) {
    Tensor t;
    t.name = in.GetString(in.Get<std::uint16_t>());
    const auto rank = in.Get<std::uint8_t>();
    for (int i = 0; i < rank; ++i) t.shape.push_back(in.Get<std::uint32_t>());
    if (t.name != expected.name || t.shape != expected.shape) {
      Fail(ErrorKind::kFormat, "parameter " + t.name + " does not match model spec");
    }
    t.data.resize(expected.size());
    for (double& v : t.data) {
      v = in.Get<float>();
      if (!std::isfinite(v)) Fail(ErrorKind::kFormat, "non-finite parameter in " + t.name);
    }
    model.parameters.push_back(std::move(t));
  }
  if (!in.done()) Fail(ErrorKind::kFormat, "trailing bytes after model parameters");
  return model;
}

void SaveModel(const Model& model, const std::filesystem::path& path) {
  const auto bytes = EncodeModel(model);
  WriteFileAtomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

Model LoadModel(const std::filesystem::path& path) {
  const std::string raw = ReadFile(path);
  return DecodeModel(std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
}

}  // namespace soundguard::nn
