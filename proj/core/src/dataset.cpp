#include "soundguard/dataset.hpp"

#include "soundguard/error.hpp"

namespace soundguard {

void SegmentDataset::CheckKind(FeatureKind kind, bool normalized) {
  if (segments_.empty()) {
    kind_ = kind;
    normalized_ = normalized;
    return;
  }
  if (kind != kind_ || normalized != normalized_) {
    Fail(ErrorKind::kConfig, "dataset mixes feature kinds or normalization states");
  }
}

void SegmentDataset::NoteClip(const std::string& clip_id, int label) {
  if (clips_.empty() || clips_.back().clip_id != clip_id) {
    clips_.push_back({clip_id, label, segments_.size() - 1, segments_.size()});
  } else {
    if (clips_.back().label != label) Fail(ErrorKind::kFormat, "segments of clip " + clip_id + " disagree on label");
    clips_.back().last = segments_.size();
  }
}

void SegmentDataset::AddClip(ClipFeatures clip) {
  if (clip.segments.empty()) return;
  CheckKind(clip.kind, false);
  const std::size_t base = storage_.size();
  for (auto& m : clip.storage) storage_.push_back(std::move(m));
  const int label = static_cast<int>(clip.label);
  for (const auto& s : clip.segments) {
    const FeatureMatrix& m = storage_[base + s.storage];
    segments_.push_back({clip.clip_id, label, s.start_sample, m.view().Rows(s.first_frame, s.frames)});
    NoteClip(clip.clip_id, label);
  }
}

void SegmentDataset::AddArchive(FeatureArchive archive, std::size_t start_sample) {
  CheckKind(archive.features.kind, archive.features.normalized);
  storage_.push_back(std::move(archive.features));
  const int label = static_cast<int>(archive.label);
  segments_.push_back({archive.clip_id, label, start_sample, storage_.back().view()});
  NoteClip(archive.clip_id, label);
}

std::size_t SegmentDataset::CountLabel(int label) const {
  std::size_t n = 0;
  for (const auto& s : segments_) n += s.label == label ? 1 : 0;
  return n;
}

std::vector<nn::Example> SegmentDataset::Examples() const {
  std::vector<nn::Example> out;
  out.reserve(segments_.size());
  for (const auto& s : segments_) out.push_back({s.features, s.label});
  return out;
}

std::vector<FeatureView> SegmentDataset::Views() const {
  std::vector<FeatureView> out;
  out.reserve(segments_.size());
  for (const auto& s : segments_) out.push_back(s.features);
  return out;
}

std::vector<int> SegmentDataset::Labels() const {
  std::vector<int> out;
  out.reserve(segments_.size());
  for (const auto& s : segments_) out.push_back(s.label);
  return out;
}

void SegmentDataset::AccumulateCmvn(CmvnAccumulator& acc) const {
  for (const auto& s : segments_) acc.Add(s.features);
}

void SegmentDataset::ApplyCmvn(const CmvnStats& stats) {
  if (normalized_) Fail(ErrorKind::kConfig, "dataset is already normalized");
  for (auto& m : storage_) CmvnApply(m, stats);
  normalized_ = true;
}

}  // namespace soundguard
