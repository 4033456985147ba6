#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "soundguard/audio_io.hpp"
#include "soundguard/error.hpp"
#include "soundguard/file_util.hpp"

namespace soundguard {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool Has(std::size_t n) const { return pos_ + n <= bytes_.size(); }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  template <typename T>
  T Read() {
    if (!Has(sizeof(T))) Fail(ErrorKind::kFormat, "truncated WAV header");
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string ReadTag() {
    if (!Has(4)) Fail(ErrorKind::kFormat, "truncated WAV chunk tag");
    std::string tag(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return tag;
  }

  void Skip(std::size_t n) { pos_ = std::min(bytes_.size(), pos_ + n); }

  std::span<const std::uint8_t> Slice(std::size_t n) const {
    return bytes_.subspan(pos_, std::min(n, remaining()));
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  bool seen = false;
};

template <typename T>
void Append(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

void AppendTag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

AudioClip ParseWav(std::span<const std::uint8_t> bytes, std::string id) {
  ByteReader reader(bytes);
  if (reader.ReadTag() != "RIFF") Fail(ErrorKind::kFormat, "missing RIFF tag");
  reader.Read<std::uint32_t>();  // riff size, often wrong in the wild
  if (reader.ReadTag() != "WAVE") Fail(ErrorKind::kFormat, "missing WAVE tag");

  FormatChunk fmt;
  std::span<const std::uint8_t> data;
  bool have_data = false;
  while (reader.Has(8)) {
    const std::string tag = reader.ReadTag();
    const auto size = reader.Read<std::uint32_t>();
    if (tag == "fmt ") {
      if (size < 16 || !reader.Has(16)) Fail(ErrorKind::kFormat, "short fmt chunk");
      const std::size_t start = reader.pos();
      fmt.format = reader.Read<std::uint16_t>();
      fmt.channels = reader.Read<std::uint16_t>();
      fmt.sample_rate = reader.Read<std::uint32_t>();
      reader.Read<std::uint32_t>();  // byte rate
      reader.Read<std::uint16_t>();  // block align
      fmt.bits = reader.Read<std::uint16_t>();
      if (fmt.format == kFormatExtensible) {
        if (size < 40) Fail(ErrorKind::kFormat, "short WAVE_FORMAT_EXTENSIBLE chunk");
        reader.Read<std::uint16_t>();  // cb size
        reader.Read<std::uint16_t>();  // valid bits
        reader.Read<std::uint32_t>();  // channel mask
        fmt.format = reader.Read<std::uint16_t>();  // first two GUID bytes
      }
      fmt.seen = true;
      reader.Skip(size - (reader.pos() - start));
    } else if (tag == "data") {
      data = reader.Slice(size);
      have_data = true;
      reader.Skip(size);
    } else {
      reader.Skip(size);
    }
    if (size % 2 == 1) reader.Skip(1);  // chunks are word aligned
  }

  if (!fmt.seen) Fail(ErrorKind::kFormat, "missing fmt chunk");
  if (!have_data) Fail(ErrorKind::kFormat, "missing data chunk");
  if (fmt.channels < 1 || fmt.channels > 2) {
    Fail(ErrorKind::kUnsupportedCodec,
         "unsupported channel count " + std::to_string(fmt.channels));
  }
  if (fmt.sample_rate == 0) Fail(ErrorKind::kFormat, "zero sample rate");

  const bool pcm16 = fmt.format == kFormatPcm && fmt.bits == 16;
  const bool float32 = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!pcm16 && !float32) {
    Fail(ErrorKind::kUnsupportedCodec,
         "unsupported encoding (format tag " + std::to_string(fmt.format) +
             ", " + std::to_string(fmt.bits) + " bits)");
  }

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  const std::size_t frames = data.size() / frame_bytes;
  if (frames == 0) Fail(ErrorKind::kInvalidInput, "WAV file has no samples: " + id);

  AudioClip clip;
  clip.id = std::move(id);
  clip.sample_rate = static_cast<int>(fmt.sample_rate);
  clip.samples.resize(frames);
  const std::uint8_t* p = data.data();
  for (std::size_t i = 0; i < frames; ++i) {
    double sum = 0.0;
    for (int c = 0; c < fmt.channels; ++c) {
      if (pcm16) {
        std::int16_t v;
        std::memcpy(&v, p, 2);
        sum += v / 32768.0;
      } else {
        float v;
        std::memcpy(&v, p, 4);
        if (!std::isfinite(v)) Fail(ErrorKind::kFormat, "non-finite float sample");
        sum += std::clamp(static_cast<double>(v), -1.0, 1.0);
      }
      p += bytes_per_sample;
    }
    clip.samples[i] = static_cast<float>(sum / fmt.channels);
  }
  return clip;
}

AudioClip LoadWav(const std::filesystem::path& path) {
  const std::string raw = ReadFile(path);
  const auto* begin = reinterpret_cast<const std::uint8_t*>(raw.data());
  return ParseWav(std::span<const std::uint8_t>(begin, raw.size()),
                  path.stem().string());
}

std::vector<std::uint8_t> EncodeWav(std::span<const float> interleaved,
                                    int sample_rate, int channels,
                                    WavEncoding encoding) {
  if (channels < 1 || channels > 2) Fail(ErrorKind::kInvalidInput, "channels must be 1 or 2");
  if (sample_rate <= 0) Fail(ErrorKind::kInvalidInput, "sample rate must be positive");
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const auto data_size = static_cast<std::uint32_t>(interleaved.size() * bits / 8);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  AppendTag(out, "RIFF");
  Append<std::uint32_t>(out, 36 + data_size);
  AppendTag(out, "WAVE");
  AppendTag(out, "fmt ");
  Append<std::uint32_t>(out, 16);
  Append<std::uint16_t>(out, encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat);
  Append<std::uint16_t>(out, static_cast<std::uint16_t>(channels));
  Append<std::uint32_t>(out, static_cast<std::uint32_t>(sample_rate));
  Append<std::uint32_t>(out, static_cast<std::uint32_t>(sample_rate) * block_align);
  Append<std::uint16_t>(out, block_align);
  Append<std::uint16_t>(out, bits);
  AppendTag(out, "data");
  Append<std::uint32_t>(out, data_size);
  for (float v : interleaved) {
    if (encoding == WavEncoding::kPcm16) {
      const double scaled = std::nearbyint(static_cast<double>(v) * 32768.0);
      Append<std::int16_t>(out, static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0)));
    } else {
      Append<float>(out, v);
    }
  }
  return out;
}

void WriteWav(const std::filesystem::path& path, const AudioClip& clip,
              WavEncoding encoding) {
  const auto bytes = EncodeWav(clip.samples, clip.sample_rate, 1, encoding);
  WriteFileAtomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                         bytes.size()));
}

}  // namespace soundguard
