#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "cli/run_config.hpp"
#include "soundguard/error.hpp"

namespace soundguard::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

int ExitCodeFor(ErrorKind kind);

/// Writes `<out_dir>/wav/*.wav` and `<out_dir>/manifest.csv` (unassigned).
void CmdSynth(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& out);

/// Splits the manifest at `config.manifest_path()` and writes
/// `<out_dir>/manifest.csv`. Clip paths are rewritten relative to `out_dir`.
void CmdPrepare(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& out);

/// Feature archives for every split of a prepared manifest.
void CmdFeaturize(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& out);

/// Trains on `config.features_dir`; writes model.sgm, history.csv,
/// run_config.json and summary.json. Epoch progress goes to `progress`
/// when non-null.
void CmdTrain(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& out,
              std::ostream* progress);

/// Scores every model in `config.models`. `features` holds one directory
/// for all models or one per model.
void CmdEvaluate(const RunConfig& config, const std::vector<std::filesystem::path>& features,
                 const std::filesystem::path& out_dir, std::ostream& out);

/// Prints per-segment probabilities and the four audio verdicts as JSON.
/// Also writes `<out_dir>/prediction.json` when `out_dir` is non-empty.
void CmdPredict(const std::filesystem::path& model_path, const std::filesystem::path& wav,
                const std::filesystem::path& out_dir, std::ostream& out);

}  // namespace soundguard::cli
