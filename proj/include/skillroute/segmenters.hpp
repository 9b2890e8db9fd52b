#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "skillroute/grid.hpp"
#include "skillroute/kernels.hpp"
#include "skillroute/volume_io.hpp"

namespace skillroute {

using kernels::ClassRow;
using kernels::FeatureRow;
using kernels::WeightMatrix;

// ---------------------------------------------------------------------------
// Intensity k-means

struct KMeansConfig {
  std::size_t max_iters = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;  // unused: quantile initialization is deterministic
  bool operator==(const KMeansConfig&) const = default;
};

/// Three-cluster Lloyd's iterations over masked intensities, initialized at the
/// 1/6, 3/6 and 5/6 quantiles. Clusters are labeled CSF/GM/WM by ascending
/// mean; voxels outside the mask are background.
LabelVolume segment_kmeans(const Volume& v, const MaskVolume& m, const KMeansConfig& cfg = {});

// ---------------------------------------------------------------------------
// Soft Dice loss

struct SoftPrediction {
  Dims dims;
  std::vector<ClassRow> probs;  // one row per voxel, grid order
};

struct SoftDiceResult {
  double loss = 0;
  ClassRow dsc{};              // soft DSC per class
  std::vector<ClassRow> grad;  // d loss / d probs, zero outside the mask
};

/// loss = C - sum_i DSC_i over classes i in {0..3} (or {1..3} when
/// `include_background` is false), with
/// DSC_i = (2 sum p_i g_i + eps) / (sum p_i + sum g_i + eps) over masked voxels.
SoftDiceResult soft_dice_loss(const SoftPrediction& pred, const LabelVolume& gt,
                              const MaskVolume& m, double epsilon = 1e-6,
                              bool include_background = true);

// ---------------------------------------------------------------------------
// Linear-softmax voxel classifier

/// Features per masked voxel: intensity, 3x3x3 local mean, 3x3x3 local
/// stddev, constant 1. The first three are standardized with the training-set
/// mean/scale stored alongside the weights.
struct ModelParams {
  WeightMatrix weights{};
  FeatureRow feature_mean{0, 0, 0, 0};
  FeatureRow feature_scale{1, 1, 1, 1};
  bool operator==(const ModelParams&) const = default;
};

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 200;
  double epsilon = 1e-6;
  std::uint64_t seed = 42;
  bool include_background = true;  // false: 3-class loss over CSF/GM/WM

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct LabeledVolume {
  Volume volume;
  MaskVolume mask;
  LabelVolume labels;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> loss_trajectory;  // epochs + 1 entries: initial ... final
};

/// Raw (unstandardized) features of the masked voxels in grid order.
std::vector<FeatureRow> voxel_features(const Volume& v, const MaskVolume& m);

TrainResult train_voxel_classifier(const std::vector<LabeledVolume>& examples,
                                   const TrainConfig& cfg = {});

struct Prediction {
  SoftPrediction soft;
  LabelVolume labels;
};

Prediction predict_voxel_classifier(const ModelParams& params, const Volume& v,
                                    const MaskVolume& m);

/// Index of the largest probability; ties go to the smaller class index.
std::uint8_t argmax_class(const ClassRow& p);

// ---------------------------------------------------------------------------
// External command backend

struct ExternalConfig {
  /// Shell command with {input}, {mask} and {output} placeholders.
  std::string command;
  VolumeFormat io_format = VolumeFormat::Nifti;
  double timeout_seconds = 600;
  bool operator==(const ExternalConfig&) const = default;
};

struct CommandOutcome {
  int exit_code = 0;
  bool timed_out = false;
  std::string output;  // interleaved stdout/stderr
};

/// Runs `/bin/sh -c command`, capturing output, killing it after `timeout`.
CommandOutcome run_command(const std::string& command, std::chrono::duration<double> timeout,
                           const std::filesystem::path& capture_file);

std::string substitute_placeholders(const std::string& templ, const std::filesystem::path& input,
                                    const std::filesystem::path& mask,
                                    const std::filesystem::path& output);

LabelVolume segment_external(const ExternalConfig& cfg, const Volume& v, const MaskVolume& m,
                             const std::filesystem::path& workdir);

// ---------------------------------------------------------------------------
// Backend dispatch

struct SegmenterSpec {
  enum class Kind { KMeans, VoxelClassifier, External };
  Kind kind = Kind::KMeans;
  KMeansConfig kmeans;
  /// Trained weights for the voxel classifier. Unset means "train per split".
  std::optional<ModelParams> model;
  ExternalConfig external;

  static SegmenterSpec make_kmeans(KMeansConfig cfg = {}) {
    SegmenterSpec s;
    s.kind = Kind::KMeans;
    s.kmeans = cfg;
    return s;
  }
  static SegmenterSpec make_classifier(std::optional<ModelParams> params = std::nullopt) {
    SegmenterSpec s;
    s.kind = Kind::VoxelClassifier;
    s.model = std::move(params);
    return s;
  }
  static SegmenterSpec make_external(ExternalConfig cfg) {
    SegmenterSpec s;
    s.kind = Kind::External;
    s.external = std::move(cfg);
    return s;
  }
  bool operator==(const SegmenterSpec&) const = default;
};

std::string describe(const SegmenterSpec& spec);

/// Runs whichever backend `spec` names. `workdir` is only used by the
/// external backend and must be unique per concurrent call.
LabelVolume segment(const SegmenterSpec& spec, const Volume& v, const MaskVolume& m,
                    const std::filesystem::path& workdir);

}  // namespace skillroute
