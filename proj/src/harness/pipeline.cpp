#include "skillroute/harness.hpp"

namespace skillroute {

RoutedResult run_routed(const Volume& volume, const MaskVolume& mask,
                        const NormalizationMode& normalization, const JudgementConfig& cfg,
                        const SegmenterSpec& backend_a, const SegmenterSpec& backend_b,
                        const std::filesystem::path& workdir) {
  with_stage("config", [&] { cfg.validate(); });
  auto [normalized, record] =
      with_stage("normalize", [&] { return normalize(volume, mask, normalization); });
  const MaskedVoxels masked = with_stage("mask", [&] { return apply_mask(normalized, mask); });
  const Histogram raw =
      with_stage("histogram", [&] { return build_histogram(masked, cfg.bin_count, 0.0, 1.0); });
  const Histogram smooth =
      with_stage("smooth", [&] { return smooth_histogram(raw, cfg.smoothing_window); });
  const PeakSet peaks = with_stage("peaks", [&] { return detect_peaks(smooth, cfg.min_prominence); });
  RoutingDecision decision = with_stage("judge", [&] { return judge(peaks, cfg); });

  const bool to_a = decision.target == Target::SkilledA;
  LabelVolume labels = with_stage(to_a ? "backend_a" : "backend_b", [&] {
    return segment(to_a ? backend_a : backend_b, normalized, mask, workdir);
  });
  return {std::move(labels), std::move(decision), record};
}

RoutedResult run_routed(const std::string& volume_id, const Manifest& manifest,
                        const JudgementConfig& cfg, const SegmenterSpec& backend_a,
                        const SegmenterSpec& backend_b, const std::filesystem::path& workdir) {
  SubjectData subject = with_stage("load", [&] { return load_subject(manifest, volume_id); });
  return run_routed(subject.volume, subject.mask, manifest.normalization, cfg, backend_a,
                    backend_b, workdir);
}

std::vector<LabeledVolume> training_set(const Manifest& manifest,
                                        const std::vector<std::string>& ids) {
  std::vector<LabeledVolume> out;
  out.reserve(ids.size());
  for (const std::string& id : ids) {
    SubjectData s = with_stage("load", [&] { return load_subject(manifest, id); });
    Volume normalized = with_stage("normalize", [&] {
      return normalize(s.volume, s.mask, manifest.normalization).first;
    });
    out.push_back({std::move(normalized), std::move(s.mask), std::move(s.labels)});
  }
  return out;
}

}  // namespace skillroute
