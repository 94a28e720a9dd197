#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "aaseq/trainer.hpp"

namespace aaseq {

/// Whole-file read; throws Io naming `op` when the file cannot be opened.
std::string read_text_file(const std::filesystem::path& path, const std::string& op);
/// Writes through a temporary sibling and renames it into place.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// 64-bit FNV-1a of the bytes, as "fnv1a64:<16 hex digits>".
std::string content_digest(std::string_view bytes);

// Trace CSV: `iteration,mean_loss,accuracy`, LF line endings.
std::string to_trace_csv(const TrainingTrace& trace);
/// Throws InvalidParameter on a bad header, malformed rows, non-consecutive
/// iteration numbers or an empty body.
std::vector<TraceRecord> parse_trace_csv(std::string_view text);

// Sweep CSV: `alpha,final_loss,iterations_to_threshold,status`, sorted by alpha.
std::string to_sweep_csv(const AlphaSweepResult& sweep);

/// Trained classifier as written by `train`.
struct SavedModel {
  std::vector<std::string> classes;
  TrainConfig config;
  int iteration = 0;
  Eigen::MatrixXd weights;
};

/// Versioned text format: `key=value` header lines, then `weights`, then one
/// comma-separated row per class.
std::string to_model_text(const SavedModel& model);
SavedModel parse_model_text(std::string_view text);

/// Ordered `key=value` file used for run manifests and config files.
class KeyValueFile {
 public:
  void set(std::string key, std::string value);
  std::optional<std::string> get(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string to_text() const;
  /// Blank lines and lines starting with '#' are skipped.
  static KeyValueFile parse(std::string_view text);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace aaseq
