#include <algorithm>
#include <unistd.h>

#include "skillroute/harness.hpp"

namespace skillroute {

namespace fs = std::filesystem;

namespace {

std::string echo_backend(const SegmenterSpec& spec) {
  std::string s = describe(spec);
  if (spec.kind == SegmenterSpec::Kind::External) s += ": " + spec.external.command;
  if (spec.kind == SegmenterSpec::Kind::VoxelClassifier) {
    s += spec.model ? " (pretrained)" : " (trained per split)";
  }
  return s;
}

MethodScore score(const std::vector<const EvaluationReport*>& reports) {
  MethodScore s;
  if (reports.empty()) return s;
  std::array<ConfusionCounts, 3> pooled{};
  double sum = 0;
  for (const EvaluationReport* r : reports) {
    sum += r->macro_dsc;
    for (std::size_t c = 0; c < 3; ++c) pooled[c] += r->counts[c];
  }
  s.mean_macro = sum / static_cast<double>(reports.size());
  s.pooled_macro = (dsc(pooled[0]) + dsc(pooled[1]) + dsc(pooled[2])) / 3.0;
  return s;
}

SubjectResult evaluate_subject(const Manifest& manifest, const std::string& id,
                               const JudgementConfig& cfg, const SegmenterSpec& a,
                               const SegmenterSpec& b, const fs::path& workdir) {
  SubjectResult r;
  r.id = id;
  const SubjectData subject = with_stage("load", [&] { return load_subject(manifest, id); });
  const Volume normalized = with_stage("normalize", [&] {
    return normalize(subject.volume, subject.mask, manifest.normalization).first;
  });
  r.decision = with_stage("judge", [&] { return judge_volume(normalized, subject.mask, cfg); });
  const LabelVolume labels_a =
      with_stage("backend_a", [&] { return segment(a, normalized, subject.mask, workdir / "a"); });
  const LabelVolume labels_b =
      with_stage("backend_b", [&] { return segment(b, normalized, subject.mask, workdir / "b"); });
  r.backend_a = evaluate_volume(labels_a, subject.labels, subject.mask, id);
  r.backend_b = evaluate_volume(labels_b, subject.labels, subject.mask, id);
  r.router = r.decision.target == Target::SkilledA ? r.backend_a : r.backend_b;
  return r;
}

}  // namespace

ExperimentReport run_experiment(const Manifest& manifest, const std::vector<Split>& splits,
                                const ExperimentOptions& options) {
  options.judgement.validate();
  for (const Split& s : splits) validate_split(s, manifest);

  ExperimentReport report;
  report.config = {options.judgement, echo_backend(options.backend_a),
                   echo_backend(options.backend_b), options.train, manifest.normalization};

  const fs::path scratch = options.workdir.empty()
                               ? fs::temp_directory_path() / ("skillroute-" + std::to_string(getpid()))
                               : options.workdir;
  const int threads = static_cast<int>(std::max<std::size_t>(options.parallelism, 1));

  for (const Split& split : splits) {
    SplitResult out;
    out.split = split;

    // Serial phase: both backends see the same training subjects.
    SegmenterSpec a = options.backend_a;
    SegmenterSpec b = options.backend_b;
    std::optional<std::string> training_error;
    const bool needs_training =
        (a.kind == SegmenterSpec::Kind::VoxelClassifier && !a.model) ||
        (b.kind == SegmenterSpec::Kind::VoxelClassifier && !b.model);
    if (needs_training) {
      try {
        TrainResult trained = with_stage("train", [&] {
          return train_voxel_classifier(training_set(manifest, split.train_ids), options.train);
        });
        if (a.kind == SegmenterSpec::Kind::VoxelClassifier && !a.model) a.model = trained.params;
        if (b.kind == SegmenterSpec::Kind::VoxelClassifier && !b.model) b.model = trained.params;
        out.training_loss = std::move(trained.loss_trajectory);
      } catch (const std::exception& e) {
        training_error = std::string("training failed: ") + e.what();
      }
    }

    std::vector<std::string> ids = split.test_ids;
    std::sort(ids.begin(), ids.end());
    out.subjects.resize(ids.size());
    const auto count = static_cast<std::ptrdiff_t>(ids.size());

#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const std::string& id = ids[static_cast<std::size_t>(i)];
      SubjectResult& slot = out.subjects[static_cast<std::size_t>(i)];
      if (training_error) {
        slot.id = id;
        slot.error = *training_error;
        continue;
      }
      try {
        slot = evaluate_subject(manifest, id, options.judgement, a, b, scratch / split.name / id);
      } catch (const std::exception& e) {
        slot = SubjectResult{};
        slot.id = id;
        slot.error = e.what();
      }
    }

    std::vector<const EvaluationReport*> ra, rb, rr;
    for (const SubjectResult& s : out.subjects) {
      if (s.error) continue;
      ra.push_back(&s.backend_a);
      rb.push_back(&s.backend_b);
      rr.push_back(&s.router);
      if (s.decision.target == Target::SkilledA) ++out.routed_to_a;
    }
    out.evaluated = rr.size();
    out.backend_a = score(ra);
    out.backend_b = score(rb);
    out.router = score(rr);
    report.splits.push_back(std::move(out));
  }
  return report;
}

}  // namespace skillroute
