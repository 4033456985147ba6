#include "soundguard/feature_archive.hpp"

#include <cmath>
#include <cstring>

#include "soundguard/error.hpp"
#include "soundguard/file_util.hpp"

namespace soundguard {
namespace {

constexpr char kMagic[4] = {'S', 'G', 'F', '1'};

template <typename T>
void Put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T Get(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) Fail(ErrorKind::kFormat, "truncated feature archive");
  T value;
  std::memcpy(&value, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace

std::vector<std::uint8_t> EncodeFeatureArchive(const std::string& clip_id, ClassLabel label,
                                               const FeatureView& view, FeatureKind kind,
                                               bool normalized) {
  std::vector<std::uint8_t> out;
  out.reserve(22 + clip_id.size() + view.values.size() * 4);
  out.insert(out.end(), kMagic, kMagic + 4);
  Put<std::uint8_t>(out, static_cast<std::uint8_t>(kind));
  Put<std::uint8_t>(out, normalized ? 1 : 0);
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(view.frames));
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(view.dims));
  Put<std::uint8_t>(out, static_cast<std::uint8_t>(label));
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(clip_id.size()));
  out.insert(out.end(), clip_id.begin(), clip_id.end());
  for (std::size_t i = 0; i < view.frames * view.dims; ++i) {
    Put<float>(out, static_cast<float>(view.values[i]));
  }
  return out;
}

FeatureArchive DecodeFeatureArchive(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    Fail(ErrorKind::kFormat, "bad feature archive magic");
  }
  std::size_t pos = 4;
  const auto kind = Get<std::uint8_t>(bytes, pos);
  const auto normalized = Get<std::uint8_t>(bytes, pos);
  const auto frames = Get<std::uint32_t>(bytes, pos);
  const auto dims = Get<std::uint32_t>(bytes, pos);
  const auto label = Get<std::uint8_t>(bytes, pos);
  const auto id_len = Get<std::uint32_t>(bytes, pos);
  if (kind > 1 || normalized > 1 || label > 1) Fail(ErrorKind::kFormat, "bad feature archive header");
  if (pos + id_len > bytes.size()) Fail(ErrorKind::kFormat, "truncated feature archive");

  FeatureArchive archive;
  archive.clip_id.assign(reinterpret_cast<const char*>(bytes.data() + pos), id_len);
  pos += id_len;
  archive.label = static_cast<ClassLabel>(label);
  const std::uint64_t count = static_cast<std::uint64_t>(frames) * dims;
  if (bytes.size() - pos != count * 4) {
    Fail(ErrorKind::kFormat, "feature archive payload size does not match header");
  }
  archive.features = FeatureMatrix(frames, dims, static_cast<FeatureKind>(kind));
  archive.features.normalized = normalized == 1;
  for (std::uint64_t i = 0; i < count; ++i) {
    const float v = Get<float>(bytes, pos);
    if (!std::isfinite(v)) Fail(ErrorKind::kFormat, "non-finite value in feature archive");
    archive.features.values[i] = v;
  }
  return archive;
}

void WriteFeatureArchive(const std::filesystem::path& path, const std::string& clip_id,
                         ClassLabel label, const FeatureView& view, FeatureKind kind,
                         bool normalized) {
  const auto bytes = EncodeFeatureArchive(clip_id, label, view, kind, normalized);
  WriteFileAtomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

FeatureArchive ReadFeatureArchive(const std::filesystem::path& path) {
  const std::string raw = ReadFile(path);
  return DecodeFeatureArchive(
      std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
}

}  // namespace soundguard
