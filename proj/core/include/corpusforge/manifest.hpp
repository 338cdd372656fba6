#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace corpusforge {

// One audio utterance, the atomic unit of selection, batching and WER
// resampling. duration_s stays unset until probed from the file header.
struct UtteranceRecord {
  std::string id;
  std::string audio_path;
  std::optional<double> duration_s;
  std::optional<std::uint32_t> sample_rate_hz;
  std::optional<std::string> speaker_label;
  std::optional<std::string> text;
};

struct Manifest {
  std::vector<UtteranceRecord> records;  // stable ingestion order
  double total_duration_s = 0.0;         // sum over records with known duration

  std::size_t size() const { return records.size(); }
  bool all_durations_known() const;
  // Recomputes total_duration_s from the records.
  void refresh_total();
  // id -> position in `records`.
  std::unordered_map<std::string, std::size_t> index_by_id() const;
};

enum class ManifestFormat { jsonl, csv };

// Five-number summary plus mean and Tukey whiskers (the most extreme data
// points within 1.5*IQR of the quartiles). Quartiles interpolate linearly
// between closest order statistics (the "type 7" convention).
struct DistributionStats {
  std::size_t count = 0;
  double mean_s = 0;
  double median_s = 0;
  double q1_s = 0;
  double q3_s = 0;
  double whisker_low_s = 0;
  double whisker_high_s = 0;
  double min_s = 0;
  double max_s = 0;
};

enum class SelectionMethod {
  all,
  random,
  mfcc,
  speaker,
  sense,
  length,
  cluster_plus_length,
};

std::string to_string(SelectionMethod m);
SelectionMethod selection_method_from_string(const std::string& s);

// A selected set of utterance ids. Ids are kept in manifest order so that
// serialization is deterministic.
struct Subset {
  SelectionMethod method = SelectionMethod::random;
  std::vector<std::string> selected_ids;
  double total_duration_s = 0.0;
  std::uint64_t seed = 0;
  std::string config_digest;
  // Set when match_duration could not land within tolerance (best effort).
  bool duration_warning = false;

  std::size_t size() const { return selected_ids.size(); }
};

// Parses a jsonl or csv manifest. Rejects duplicate ids (naming the id) and
// non-positive durations (naming the row). An empty file is an empty manifest.
Manifest load_manifest(const std::string& path, ManifestFormat format);
// Picks the format from the file extension (.csv -> csv, otherwise jsonl).
Manifest load_manifest(const std::string& path);

void write_manifest(const Manifest& manifest, const std::string& path);

struct ProbeReport {
  struct Item {
    std::string id;
    std::string audio_path;
    std::string message;
  };
  std::vector<Item> errors;
};

// Fills missing duration_s / sample_rate_hz by reading RIFF/WAVE headers.
// Records that already carry a duration are untouched. Records whose header
// cannot be parsed are excluded from the result and reported.
// Relative audio paths are resolved against `base_dir` when given.
Manifest probe_durations(const Manifest& manifest, const std::string& base_dir = "",
                         ProbeReport* report = nullptr);

DistributionStats summarize_durations(std::span<const double> durations_s);
// Requires every record's duration to be known.
DistributionStats summarize_durations(const Manifest& manifest);

// Validates subset ids against the manifest, orders them by manifest
// position, and computes the duration total.
Subset finalize_subset(const Manifest& manifest, std::vector<std::string> ids,
                       SelectionMethod method, std::uint64_t seed,
                       std::string config_digest = "");

// Emits the selected records as jsonl (manifest order) followed by one
// summary line. The data lines round-trip through load_manifest.
void write_subset(const Subset& subset, const Manifest& manifest, const std::string& path);

// Reads a subset file back: ids and durations from the data lines, method /
// seed / digest from the summary line.
struct LoadedSubset {
  Subset subset;
  Manifest records;  // the data lines as a manifest
};
LoadedSubset load_subset(const std::string& path);

}  // namespace corpusforge
