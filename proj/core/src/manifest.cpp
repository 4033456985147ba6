#include "soundguard/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "soundguard/error.hpp"
#include "soundguard/file_util.hpp"
#include "soundguard/rng.hpp"

namespace soundguard {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

}  // namespace

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
    case Split::kUnassigned: return "unassigned";
  }
  return "unassigned";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "valid") return Split::kValid;
  if (name == "test") return Split::kTest;
  if (name == "unassigned" || name.empty()) return Split::kUnassigned;
  Fail(ErrorKind::kFormat, "unknown split '" + std::string(name) + "'");
}

std::vector<const ManifestEntry*> DatasetManifest::InSplit(Split split) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries) {
    if (e.split == split) out.push_back(&e);
  }
  return out;
}

std::size_t DatasetManifest::Count(ClassLabel label, Split split) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(),
      [&](const ManifestEntry& e) { return e.label == label && e.split == split; }));
}

DatasetManifest ParseManifest(std::string_view csv) {
  DatasetManifest manifest;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  bool header = true;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    std::string_view line = Trim(csv.substr(0, nl));
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (header) {
      if (line != "path,label,split") {
        Fail(ErrorKind::kFormat, "manifest header must be 'path,label,split'");
      }
      header = false;
      continue;
    }
    const auto c2 = line.rfind(',');
    const auto c1 = c2 == std::string_view::npos ? c2 : line.rfind(',', c2 - 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos) {
      Fail(ErrorKind::kFormat, "manifest line " + std::to_string(line_no) + ": expected 3 fields");
    }
    ManifestEntry entry;
    entry.clip_path = std::string(Trim(line.substr(0, c1)));
    const auto label = Trim(line.substr(c1 + 1, c2 - c1 - 1));
    if (label == "0") {
      entry.label = ClassLabel::kNonPorn;
    } else if (label == "1") {
      entry.label = ClassLabel::kPorn;
    } else {
      Fail(ErrorKind::kFormat, "manifest line " + std::to_string(line_no) + ": label must be 0 or 1");
    }
    entry.split = ParseSplit(Trim(line.substr(c2 + 1)));
    if (entry.clip_path.empty()) {
      Fail(ErrorKind::kFormat, "manifest line " + std::to_string(line_no) + ": empty path");
    }
    if (!seen.insert(entry.clip_path).second) {
      Fail(ErrorKind::kFormat, "duplicate clip path " + entry.clip_path);
    }
    manifest.entries.push_back(std::move(entry));
  }
  if (header) Fail(ErrorKind::kFormat, "manifest is empty");
  return manifest;
}

std::string FormatManifest(const DatasetManifest& manifest) {
  std::ostringstream out;
  out << "path,label,split\n";
  for (const auto& e : manifest.entries) {
    out << e.clip_path << ',' << static_cast<int>(e.label) << ',' << SplitName(e.split) << '\n';
  }
  return out.str();
}

DatasetManifest LoadManifest(const std::filesystem::path& path) {
  return ParseManifest(ReadFile(path));
}

void SaveManifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  WriteFileAtomic(path, FormatManifest(manifest));
}

std::array<std::size_t, 3> ApportionCounts(std::size_t total,
                                           std::array<double, 3> ratios) {
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (!(sum > 0.0) || std::any_of(ratios.begin(), ratios.end(), [](double r) { return r < 0.0; })) {
    Fail(ErrorKind::kConfig, "split ratios must be non-negative with a positive sum");
  }
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double quota = total * ratios[i] / sum;
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    remainder[i] = quota - counts[i];
    assigned += counts[i];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[order[k % 3]];
  return counts;
}

DatasetManifest SplitDataset(const DatasetManifest& manifest,
                             std::array<double, 3> ratios, std::uint64_t seed) {
  DatasetManifest out = manifest;
  constexpr std::array<Split, 3> kSplits{Split::kTrain, Split::kValid, Split::kTest};
  for (ClassLabel label : {ClassLabel::kNonPorn, ClassLabel::kPorn}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < out.entries.size(); ++i) {
      if (out.entries[i].label == label) members.push_back(i);
    }
    if (members.size() < kMinClipsPerClass) {
      Fail(ErrorKind::kInsufficientData,
           "class " + std::to_string(static_cast<int>(label)) + " has " +
               std::to_string(members.size()) + " clips; need at least " +
               std::to_string(kMinClipsPerClass));
    }
    // Shuffle from a path-sorted order so the result ignores manifest row order.
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return out.entries[a].clip_path < out.entries[b].clip_path;
    });
    Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(label)));
    rng.Shuffle(std::span<std::size_t>(members));
    const auto counts = ApportionCounts(members.size(), ratios);
    std::size_t cursor = 0;
    for (int s = 0; s < 3; ++s) {
      for (std::size_t k = 0; k < counts[s]; ++k) out.entries[members[cursor++]].split = kSplits[s];
    }
  }
  return out;
}

}  // namespace soundguard
