#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coherency/corpus.hpp"
#include "coherency/engine.hpp"

namespace coherency {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunArtifact {
  std::string kind;   // "evaluate" or "sweep"
  std::string label;  // row label in rendered tables
  std::string tool_version = kToolVersion;
  nlohmann::json fingerprint = nlohmann::json::object();  // effective configuration
  std::optional<CoherencyReport> report;
  std::optional<SweepReport> sweep;
  bool audit_retained = true;
  std::vector<InstanceResult> instances;
  std::vector<std::string> emptied_relations;  // dropped by entity filtering
  LoadReport load_report;
};

nlohmann::json to_json(const RunArtifact& artifact);
RunArtifact artifact_from_json(const nlohmann::json& j);

// Writes to a temporary sibling and renames, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
void save_artifact(const RunArtifact& artifact, const std::filesystem::path& path);
RunArtifact load_artifact(const std::filesystem::path& path);

enum class TableFormat { Json, Csv, Markdown };
TableFormat parse_table_format(std::string_view s);
std::string_view extension(TableFormat f);

struct Table {
  std::string name;  // coherency, correctness, per_type, relations, sweep
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// All tables for an artifact, numbers already formatted.
std::vector<Table> build_tables(const RunArtifact& artifact);

struct RenderedDocument {
  std::string name;
  std::string content;
};

std::string render_table(const Table& table, TableFormat format);
std::vector<RenderedDocument> emit_tables(const RunArtifact& artifact, TableFormat format);

// ---------------------------------------------------------------- gallery

enum class Bucket { CoherentCorrect, CoherentIncorrect, IncoherentCorrect, IncoherentIncorrect };
std::string_view to_string(Bucket b);

struct GalleryEntry {
  std::string relation_id;
  std::string subject;
  std::string object;
  int round = 1;
  std::string forward_prompt;
  std::string forward_answer;
  std::string backward_prompt;
  std::string backward_answer;
  bool repetition = false;
  bool pronoun = false;
};

struct GalleryBucket {
  Bucket bucket;
  std::size_t total = 0;
  std::size_t repetition = 0;
  std::size_t pronoun = 0;
  std::vector<GalleryEntry> examples;  // at most per_bucket
};

struct Gallery {
  std::vector<GalleryBucket> buckets;  // all four, in enum order
};

const std::vector<std::string>& default_pronoun_stoplist();

// One entry per (instance, round). Repetition: some answer in the round equals
// the entity it was queried with. Pronoun: some answer is in the stop-list.
Gallery example_gallery(const RunArtifact& artifact, std::size_t per_bucket,
                        const std::vector<std::string>& stoplist = default_pronoun_stoplist());

std::string render_gallery_markdown(const Gallery& gallery);
nlohmann::json to_json(const Gallery& gallery);

// ---------------------------------------------------------------- series

struct SeriesPoint {
  std::string relation_id;
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t samples = 0;
};

std::vector<SeriesPoint> emit_relation_series(const RunArtifact& artifact);
std::string series_csv(const std::vector<SeriesPoint>& series);

}  // namespace coherency
