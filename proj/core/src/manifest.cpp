#include "corpusforge/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "corpusforge/csv.hpp"
#include "corpusforge/error.hpp"
#include "corpusforge/wave.hpp"

namespace corpusforge {

using json = nlohmann::json;

bool Manifest::all_durations_known() const {
  return std::all_of(records.begin(), records.end(),
                     [](const UtteranceRecord& r) { return r.duration_s.has_value(); });
}

void Manifest::refresh_total() {
  double total = 0.0;
  for (const auto& r : records)
    if (r.duration_s) total += *r.duration_s;
  total_duration_s = total;
}

std::unordered_map<std::string, std::size_t> Manifest::index_by_id() const {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) index.emplace(records[i].id, i);
  return index;
}

std::string to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::all: return "all";
    case SelectionMethod::random: return "random";
    case SelectionMethod::mfcc: return "mfcc";
    case SelectionMethod::speaker: return "speaker";
    case SelectionMethod::sense: return "sense";
    case SelectionMethod::length: return "length";
    case SelectionMethod::cluster_plus_length: return "cluster_plus_length";
  }
  return "unknown";
}

SelectionMethod selection_method_from_string(const std::string& s) {
  if (s == "all") return SelectionMethod::all;
  if (s == "random") return SelectionMethod::random;
  if (s == "mfcc") return SelectionMethod::mfcc;
  if (s == "speaker") return SelectionMethod::speaker;
  if (s == "sense") return SelectionMethod::sense;
  if (s == "length") return SelectionMethod::length;
  if (s == "cluster_plus_length" || s == "speaker+len") return SelectionMethod::cluster_plus_length;
  throw ValidationError("unknown selection method: " + s);
}

namespace {

void check_record(const UtteranceRecord& rec, const std::string& where,
                  std::unordered_set<std::string>& seen) {
  if (rec.id.empty()) throw ValidationError(where + ": empty id");
  if (rec.audio_path.empty()) throw ValidationError(where + ": record '" + rec.id + "' has no audio_path");
  if (!seen.insert(rec.id).second) throw ValidationError(where + ": duplicate id '" + rec.id + "'");
  if (rec.duration_s && !(*rec.duration_s > 0.0))
    throw ValidationError(where + ": record '" + rec.id + "' has non-positive duration_s");
  if (rec.sample_rate_hz && *rec.sample_rate_hz == 0)
    throw ValidationError(where + ": record '" + rec.id + "' has zero sample_rate_hz");
}

UtteranceRecord record_from_json(const json& obj, const std::string& where) {
  UtteranceRecord rec;
  if (!obj.contains("id") || !obj["id"].is_string())
    throw ValidationError(where + ": missing required string field 'id'");
  if (!obj.contains("audio_path") || !obj["audio_path"].is_string())
    throw ValidationError(where + ": missing required string field 'audio_path'");
  rec.id = obj["id"].get<std::string>();
  rec.audio_path = obj["audio_path"].get<std::string>();
  if (obj.contains("duration_s") && !obj["duration_s"].is_null())
    rec.duration_s = obj["duration_s"].get<double>();
  if (obj.contains("sample_rate_hz") && !obj["sample_rate_hz"].is_null())
    rec.sample_rate_hz = obj["sample_rate_hz"].get<std::uint32_t>();
  if (obj.contains("speaker_label") && !obj["speaker_label"].is_null())
    rec.speaker_label = obj["speaker_label"].get<std::string>();
  if (obj.contains("text") && !obj["text"].is_null())
    rec.text = obj["text"].get<std::string>();
  return rec;
}

json record_to_json(const UtteranceRecord& rec) {
  json obj;
  obj["id"] = rec.id;
  obj["audio_path"] = rec.audio_path;
  if (rec.duration_s) obj["duration_s"] = *rec.duration_s;
  if (rec.sample_rate_hz) obj["sample_rate_hz"] = *rec.sample_rate_hz;
  if (rec.speaker_label) obj["speaker_label"] = *rec.speaker_label;
  if (rec.text) obj["text"] = *rec.text;
  return obj;
}

Manifest load_manifest_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open");
  Manifest manifest;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (obj.is_object() && obj.contains("summary")) continue;  // subset trailer
    UtteranceRecord rec = record_from_json(obj, path + ":" + std::to_string(line_no));
    check_record(rec, path + ":" + std::to_string(line_no), seen);
    manifest.records.push_back(std::move(rec));
  }
  manifest.refresh_total();
  return manifest;
}

Manifest load_manifest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open");
  Manifest manifest;
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next_row(row)) return manifest;  // empty file

  std::vector<std::string> header = row;
  auto column = [&](const std::string& name) -> int {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int col_id = column("id");
  const int col_path = column("audio_path");
  const int col_dur = column("duration_s");
  const int col_rate = column("sample_rate_hz");
  const int col_speaker = column("speaker_label");
  const int col_text = column("text");
  if (col_id < 0 || col_path < 0)
    throw ValidationError(path + ": csv header must name 'id' and 'audio_path' columns");

  auto cell = [&](const std::vector<std::string>& r, int col) -> std::string {
    return (col >= 0 && static_cast<std::size_t>(col) < r.size()) ? r[static_cast<std::size_t>(col)]
                                                                  : std::string();
  };

  std::unordered_set<std::string> seen;
  std::size_t row_no = 1;
  while (reader.next_row(row)) {
    ++row_no;
    const std::string where = path + ": row " + std::to_string(row_no);
    UtteranceRecord rec;
    rec.id = cell(row, col_id);
    rec.audio_path = cell(row, col_path);
    const std::string dur = cell(row, col_dur);
    if (!dur.empty()) {
      try {
        rec.duration_s = std::stod(dur);
      } catch (const std::exception&) {
        throw ValidationError(where + ": bad duration_s '" + dur + "'");
      }
    }
    const std::string rate = cell(row, col_rate);
    if (!rate.empty()) rec.sample_rate_hz = static_cast<std::uint32_t>(std::stoul(rate));
    const std::string speaker = cell(row, col_speaker);
    if (!speaker.empty()) rec.speaker_label = speaker;
    const std::string text = cell(row, col_text);
    if (!text.empty()) rec.text = text;
    check_record(rec, where, seen);
    manifest.records.push_back(std::move(rec));
  }
  manifest.refresh_total();
  return manifest;
}

}  // namespace

Manifest load_manifest(const std::string& path, ManifestFormat format) {
  return format == ManifestFormat::csv ? load_manifest_csv(path) : load_manifest_jsonl(path);
}

Manifest load_manifest(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  return load_manifest(path, ext == ".csv" ? ManifestFormat::csv : ManifestFormat::jsonl);
}

void write_manifest(const Manifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(path + ": cannot open for writing");
  for (const auto& rec : manifest.records) out << record_to_json(rec).dump() << '\n';
  if (!out) throw Error(path + ": write failed");
}

Manifest probe_durations(const Manifest& manifest, const std::string& base_dir,
                         ProbeReport* report) {
  Manifest out;
  out.records.reserve(manifest.records.size());
  for (const auto& rec : manifest.records) {
    if (rec.duration_s) {
      out.records.push_back(rec);
      continue;
    }
    std::filesystem::path p(rec.audio_path);
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    try {
      const WaveInfo info = probe_wave(p.string());
      UtteranceRecord probed = rec;
      probed.duration_s = info.duration_s();
      if (!probed.sample_rate_hz) probed.sample_rate_hz = info.sample_rate_hz;
      if (!(*probed.duration_s > 0.0))
        throw ValidationError(p.string() + ": zero-length audio");
      out.records.push_back(std::move(probed));
    } catch (const Error& e) {
      if (report) report->errors.push_back({rec.id, rec.audio_path, e.what()});
    }
  }
  out.refresh_total();
  return out;
}

DistributionStats summarize_durations(std::span<const double> durations_s) {
  if (durations_s.empty()) throw ValidationError("summarize_durations: empty input");
  std::vector<double> sorted(durations_s.begin(), durations_s.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  auto quantile = [&](double p) {
    const double h = p * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
  };

  DistributionStats s;
  s.count = n;
  s.mean_s = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  s.min_s = sorted.front();
  s.max_s = sorted.back();
  s.q1_s = quantile(0.25);
  s.median_s = quantile(0.5);
  s.q3_s = quantile(0.75);
  const double iqr = s.q3_s - s.q1_s;
  const double low_fence = s.q1_s - 1.5 * iqr;
  const double high_fence = s.q3_s + 1.5 * iqr;
  s.whisker_low_s = *std::lower_bound(sorted.begin(), sorted.end(), low_fence);
  // Largest value <= high fence.
  auto it = std::upper_bound(sorted.begin(), sorted.end(), high_fence);
  s.whisker_high_s = it == sorted.begin() ? sorted.front() : *(it - 1);
  // Degenerate guard: fences always bracket the quartiles, so the bounds above
  // land inside [min, max]; clamp keeps the ordering chain airtight.
  s.whisker_low_s = std::min(s.whisker_low_s, s.q1_s);
  s.whisker_high_s = std::max(s.whisker_high_s, s.q3_s);
  return s;
}

DistributionStats summarize_durations(const Manifest& manifest) {
  std::vector<double> durations;
  durations.reserve(manifest.records.size());
  for (const auto& rec : manifest.records) {
    if (!rec.duration_s)
      throw ValidationError("summarize_durations: record '" + rec.id + "' has unknown duration");
    durations.push_back(*rec.duration_s);
  }
  return summarize_durations(durations);
}

Subset finalize_subset(const Manifest& manifest, std::vector<std::string> ids,
                       SelectionMethod method, std::uint64_t seed, std::string config_digest) {
  const auto index = manifest.index_by_id();
  std::vector<std::size_t> positions;
  positions.reserve(ids.size());
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    const auto it = index.find(id);
    if (it == index.end())
      throw ValidationError("subset id '" + id + "' is not in the manifest");
    if (!seen.insert(id).second) throw ValidationError("subset contains duplicate id '" + id + "'");
    positions.push_back(it->second);
  }
  std::sort(positions.begin(), positions.end());

  Subset subset;
  subset.method = method;
  subset.seed = seed;
  subset.config_digest = std::move(config_digest);
  subset.selected_ids.reserve(positions.size());
  double total = 0.0;
  for (const std::size_t pos : positions) {
    const auto& rec = manifest.records[pos];
    subset.selected_ids.push_back(rec.id);
    if (rec.duration_s) total += *rec.duration_s;
  }
  subset.total_duration_s = total;
  return subset;
}

void write_subset(const Subset& subset, const Manifest& manifest, const std::string& path) {
  const auto index = manifest.index_by_id();
  std::vector<std::size_t> positions;
  positions.reserve(subset.selected_ids.size());
  for (const auto& id : subset.selected_ids) {
    const auto it = index.find(id);
    if (it == index.end())
      throw ValidationError("write_subset: id '" + id + "' is not in the manifest");
    positions.push_back(it->second);
  }
  std::sort(positions.begin(), positions.end());

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(path + ": cannot open for writing");
  for (const std::size_t pos : positions)
    out << record_to_json(manifest.records[pos]).dump() << '\n';

  json summary;
  summary["method"] = to_string(subset.method);
  summary["seed"] = subset.seed;
  summary["count"] = subset.selected_ids.size();
  summary["total_duration_s"] = subset.total_duration_s;
  summary["config_digest"] = subset.config_digest;
  if (subset.duration_warning) summary["duration_warning"] = true;
  json trailer;
  trailer["summary"] = std::move(summary);
  out << trailer.dump() << '\n';
  if (!out) throw Error(path + ": write failed");
}

LoadedSubset load_subset(const std::string& path) {
  LoadedSubset loaded;
  loaded.records = load_manifest(path, ManifestFormat::jsonl);

  // Re-scan for the summary trailer.
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open");
  std::string line;
  bool found = false;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json obj = json::parse(line);
    if (obj.is_object() && obj.contains("summary")) {
      const json& s = obj["summary"];
      loaded.subset.method = selection_method_from_string(s.at("method").get<std::string>());
      loaded.subset.seed = s.at("seed").get<std::uint64_t>();
      loaded.subset.total_duration_s = s.at("total_duration_s").get<double>();
      loaded.subset.config_digest = s.value("config_digest", std::string());
      loaded.subset.duration_warning = s.value("duration_warning", false);
      found = true;
    }
  }
  if (!found) throw ValidationError(path + ": subset file has no summary line");
  loaded.subset.selected_ids.reserve(loaded.records.size());
  for (const auto& rec : loaded.records.records) loaded.subset.selected_ids.push_back(rec.id);
  if (loaded.records.all_durations_known()) {
    const double expected = loaded.records.total_duration_s;
    const double scale = std::max(1.0, std::abs(expected));
    if (std::abs(loaded.subset.total_duration_s - expected) > 1e-6 * scale)
      throw ValidationError(path + ": summary total_duration_s disagrees with the data lines");
  }
  return loaded;
}

}  // namespace corpusforge
