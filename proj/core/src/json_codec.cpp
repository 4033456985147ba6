#include "json_codec.hpp"

#include "soundguard/dsp.hpp"

namespace soundguard::detail {

using nlohmann::json;

json ToJson(const FeatureConfig& c) {
  return {{"sample_rate", c.sample_rate}, {"frame_len", c.frame_len},
          {"frame_hop", c.frame_hop},     {"fft_size", c.fft_size},
          {"n_mels", c.n_mels},           {"n_mfcc", c.n_mfcc},
          {"fmin", c.fmin},               {"fmax", c.fmax},
          {"log_floor", c.log_floor}};
}

FeatureConfig FeatureConfigFromJson(const json& j) {
  FeatureConfig c;
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.frame_len = j.value("frame_len", c.frame_len);
  c.frame_hop = j.value("frame_hop", c.frame_hop);
  c.fft_size = j.value("fft_size", c.fft_size);
  c.n_mels = j.value("n_mels", c.n_mels);
  c.n_mfcc = j.value("n_mfcc", c.n_mfcc);
  c.fmin = j.value("fmin", c.fmin);
  c.fmax = j.value("fmax", c.fmax);
  c.log_floor = j.value("log_floor", c.log_floor);
  c.Validate();
  return c;
}

json ToJson(const CmvnStats& s) {
  return {{"kind", FeatureKindName(s.kind)},
          {"mean", s.mean},
          {"variance", s.variance},
          {"frame_count", s.frame_count}};
}

CmvnStats CmvnFromJson(const json& j) {
  CmvnStats s;
  s.kind = ParseFeatureKind(j.at("kind").get<std::string>());
  s.mean = j.at("mean").get<std::vector<double>>();
  s.variance = j.at("variance").get<std::vector<double>>();
  s.frame_count = j.at("frame_count").get<std::uint64_t>();
  return s;
}

}  // namespace soundguard::detail
