#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "soundguard/cmvn.hpp"
#include "soundguard/dsp.hpp"
#include "soundguard/feature_archive.hpp"
#include "soundguard/nn/train.hpp"

namespace soundguard {

struct LabeledSegment {
  std::string clip_id;
  int label = 0;
  std::size_t start_sample = 0;
  FeatureView features;
};

/// Featurized segments of one split. Owns the feature storage; segment views
/// stay valid for the dataset's lifetime (moves included). Segments of one
/// clip are contiguous and clips keep insertion order.
class SegmentDataset {
 public:
  SegmentDataset() = default;
  SegmentDataset(SegmentDataset&&) = default;
  SegmentDataset& operator=(SegmentDataset&&) = default;
  SegmentDataset(const SegmentDataset&) = delete;
  SegmentDataset& operator=(const SegmentDataset&) = delete;

  void AddClip(ClipFeatures clip);
  /// Appends one archived segment. Consecutive segments with the same clip
  /// id form one clip.
  void AddArchive(FeatureArchive archive, std::size_t start_sample);

  std::span<const LabeledSegment> segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }
  FeatureKind kind() const { return kind_; }
  bool normalized() const { return normalized_; }

  /// [first, last) segment index ranges, one per clip.
  struct ClipRange {
    std::string clip_id;
    int label = 0;
    std::size_t first = 0;
    std::size_t last = 0;
  };
  std::span<const ClipRange> clips() const { return clips_; }

  std::size_t CountLabel(int label) const;
  std::vector<nn::Example> Examples() const;
  std::vector<FeatureView> Views() const;
  std::vector<int> Labels() const;

  /// Adds every segment's frames (overlaps counted per segment).
  void AccumulateCmvn(CmvnAccumulator& acc) const;
  /// Normalizes all storage in place. Throws Error(kConfig) if already
  /// normalized or on a kind mismatch.
  void ApplyCmvn(const CmvnStats& stats);

 private:
  void CheckKind(FeatureKind kind, bool normalized);
  void NoteClip(const std::string& clip_id, int label);

  std::deque<FeatureMatrix> storage_;
  std::vector<LabeledSegment> segments_;
  std::vector<ClipRange> clips_;
  FeatureKind kind_ = FeatureKind::kLogMel;
  bool normalized_ = false;
};

}  // namespace soundguard
