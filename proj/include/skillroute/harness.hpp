#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skillroute/histo_judge.hpp"
#include "skillroute/metrics.hpp"
#include "skillroute/phantom.hpp"
#include "skillroute/preprocess.hpp"
#include "skillroute/segmenters.hpp"

namespace skillroute {

// ---------------------------------------------------------------------------
// Manifests and splits

/// One subject: either three files on disk or an inline phantom spec.
struct SubjectEntry {
  std::string id;
  std::optional<PhantomSpec> phantom;
  std::filesystem::path volume;
  std::filesystem::path mask;
  std::filesystem::path labels;
  bool operator==(const SubjectEntry&) const = default;
};

struct Split {
  std::string name;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  bool operator==(const Split&) const = default;
};

struct Manifest {
  std::vector<SubjectEntry> subjects;
  /// On-disk label value -> tissue class. Applied when labels are loaded.
  std::optional<std::map<long long, int>> label_remap;
  NormalizationMode normalization;
  std::vector<Split> splits;

  const SubjectEntry& subject(const std::string& id) const;
  bool contains(const std::string& id) const;
};

/// Parses a manifest document. Relative file paths resolve against
/// `base_dir`; referenced files must exist.
Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);

/// Throws SplitInvalid unless train/test are nonempty, disjoint and known.
void validate_split(const Split& split, const Manifest& manifest);
std::vector<Split> parse_splits(const std::string& text, const Manifest& manifest);
std::vector<Split> load_splits(const std::filesystem::path& path, const Manifest& manifest);

struct SubjectData {
  std::string id;
  Volume volume;
  MaskVolume mask;
  LabelVolume labels;
};

SubjectData load_subject(const Manifest& manifest, const std::string& id);

/// Maps raw on-disk label values through `remap`; unmapped values are
/// LabelOutOfRange.
LabelVolume remap_labels(const RawVolume& raw, const std::map<long long, int>& remap);

// ---------------------------------------------------------------------------
// Routed segmentation

struct RoutedResult {
  LabelVolume labels;
  RoutingDecision decision;
  NormalizationRecord normalization;
};

/// load -> normalize -> mask -> histogram -> smooth -> peaks -> judge ->
/// dispatch to backend A (SkilledA) or backend B (SkilledB). Errors carry the
/// name of the stage that raised them.
RoutedResult run_routed(const Volume& volume, const MaskVolume& mask,
                        const NormalizationMode& normalization, const JudgementConfig& cfg,
                        const SegmenterSpec& backend_a, const SegmenterSpec& backend_b,
                        const std::filesystem::path& workdir);

RoutedResult run_routed(const std::string& volume_id, const Manifest& manifest,
                        const JudgementConfig& cfg, const SegmenterSpec& backend_a,
                        const SegmenterSpec& backend_b, const std::filesystem::path& workdir);

/// Loads, normalizes and labels the given subjects for classifier training.
std::vector<LabeledVolume> training_set(const Manifest& manifest,
                                        const std::vector<std::string>& ids);

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentOptions {
  JudgementConfig judgement;
  SegmenterSpec backend_a = SegmenterSpec::make_kmeans();
  SegmenterSpec backend_b = SegmenterSpec::make_classifier();
  TrainConfig train;
  std::size_t parallelism = 1;
  /// Scratch space for external backends; defaults to a per-process temp dir.
  std::filesystem::path workdir;
};

struct SubjectResult {
  std::string id;
  std::optional<std::string> error;
  RoutingDecision decision;
  EvaluationReport backend_a;
  EvaluationReport backend_b;
  EvaluationReport router;
  bool operator==(const SubjectResult&) const = default;
};

/// Mean of per-subject macro DSC and the DSC of counts pooled over subjects.
struct MethodScore {
  double mean_macro = 0;
  double pooled_macro = 0;
  bool operator==(const MethodScore&) const = default;
};

struct SplitResult {
  Split split;
  MethodScore backend_a;
  MethodScore backend_b;
  MethodScore router;
  std::size_t evaluated = 0;    // test subjects without errors
  std::size_t routed_to_a = 0;  // among evaluated subjects
  std::vector<double> training_loss;  // empty when nothing was trained
  std::vector<SubjectResult> subjects;  // ordered by subject id
  bool operator==(const SplitResult&) const = default;
};

struct ExperimentConfigEcho {
  JudgementConfig judgement;
  std::string backend_a;
  std::string backend_b;
  TrainConfig train;
  NormalizationMode normalization;
  bool operator==(const ExperimentConfigEcho&) const = default;
};

struct ExperimentReport {
  ExperimentConfigEcho config;
  std::vector<SplitResult> splits;
  bool operator==(const ExperimentReport&) const = default;
};

ExperimentReport run_experiment(const Manifest& manifest, const std::vector<Split>& splits,
                                const ExperimentOptions& options);

enum class ReportFormat { Table, Records };
enum class TableMetric { MeanMacro, Pooled };

/// `Table`: one column per split, rows backend A / backend B / router, four
/// decimals. `Records`: the full report as a JSON document.
std::string emit_report(const ExperimentReport& report, ReportFormat format,
                        TableMetric metric = TableMetric::MeanMacro);

ExperimentReport parse_records(const std::string& text);

}  // namespace skillroute
