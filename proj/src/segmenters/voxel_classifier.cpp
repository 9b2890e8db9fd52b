#include <cmath>
#include <random>

#include "dice_terms.hpp"

namespace skillroute {

void TrainConfig::validate() const {
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::BadConfig, "learning rate must be > 0");
  }
  if (epochs < 1) throw Error(ErrorCode::BadConfig, "epochs must be >= 1");
  if (!(epsilon > 0)) throw Error(ErrorCode::BadEpsilon, "epsilon must be > 0");
}

std::vector<FeatureRow> voxel_features(const Volume& v, const MaskVolume& m) {
  require_same_dims(v, m, "voxel_features");
  const kernels::NeighborhoodStats stats = kernels::omp::neighborhood_stats(v, m);
  std::vector<FeatureRow> rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (m[i]) rows.push_back({v[i], stats.mean[i], stats.stddev[i], 1.0});
  }
  return rows;
}

namespace {

void standardize(std::vector<FeatureRow>& rows, const ModelParams& p) {
  for (FeatureRow& r : rows) {
    for (int k = 0; k < kernels::kFeatureCount; ++k) {
      r[k] = (r[k] - p.feature_mean[k]) / p.feature_scale[k];
    }
  }
}

void fit_standardization(const std::vector<FeatureRow>& rows, ModelParams& p) {
  const auto n = static_cast<double>(rows.size());
  // The constant bias feature (last column) is left untouched.
  for (int k = 0; k + 1 < kernels::kFeatureCount; ++k) {
    double mean = 0;
    for (const FeatureRow& r : rows) mean += r[k];
    mean /= n;
    double var = 0;
    for (const FeatureRow& r : rows) var += (r[k] - mean) * (r[k] - mean);
    const double sd = std::sqrt(var / n);
    p.feature_mean[k] = mean;
    p.feature_scale[k] = sd > 1e-12 ? sd : 1.0;
  }
}

}  // namespace

TrainResult train_voxel_classifier(const std::vector<LabeledVolume>& examples,
                                   const TrainConfig& cfg) {
  cfg.validate();
  if (examples.empty()) throw Error(ErrorCode::EmptyInput, "no training examples");

  std::vector<FeatureRow> features;
  std::vector<std::uint8_t> labels;
  for (const LabeledVolume& ex : examples) {
    require_same_dims(ex.volume, ex.mask, "training volume/mask");
    require_same_dims(ex.volume, ex.labels, "training volume/labels");
    const auto rows = voxel_features(ex.volume, ex.mask);
    if (rows.empty()) throw Error(ErrorCode::EmptyMask, "training example with an empty mask");
    features.insert(features.end(), rows.begin(), rows.end());
    for (std::size_t i = 0; i < ex.labels.size(); ++i) {
      if (ex.mask[i]) labels.push_back(ex.labels[i]);
    }
  }

  TrainResult result;
  ModelParams& p = result.params;
  fit_standardization(features, p);
  standardize(features, p);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> init(0.0, 0.01);
  for (auto& row : p.weights)
    for (double& w : row) w = init(rng);

  std::vector<ClassRow> probs(features.size());
  auto evaluate = [&]() {
    kernels::omp::softmax_forward(features, p.weights, probs);
    const auto terms = detail::dice_terms(kernels::omp::dice_sums(probs, labels), cfg.epsilon,
                                          cfg.include_background);
    if (!std::isfinite(terms.loss)) {
      throw Error(ErrorCode::NonFiniteLoss, "loss diverged; lower the learning rate");
    }
    result.loss_trajectory.push_back(terms.loss);
    return terms;
  };

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto terms = evaluate();
    const WeightMatrix grad =
        kernels::omp::softmax_weight_gradient(features, probs, labels, terms.a, terms.b);
    for (int c = 0; c < kClassCount; ++c)
      for (int k = 0; k < kernels::kFeatureCount; ++k) {
        p.weights[c][k] -= cfg.learning_rate * grad[c][k];
        if (!std::isfinite(p.weights[c][k])) {
          throw Error(ErrorCode::NonFiniteLoss, "weights diverged; lower the learning rate");
        }
      }
  }
  evaluate();
  return result;
}

std::uint8_t argmax_class(const ClassRow& p) {
  std::uint8_t best = 0;
  for (std::uint8_t c = 1; c < kClassCount; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return best;
}

Prediction predict_voxel_classifier(const ModelParams& params, const Volume& v,
                                    const MaskVolume& m) {
  std::vector<FeatureRow> rows = voxel_features(v, m);
  standardize(rows, params);
  std::vector<ClassRow> masked_probs(rows.size());
  kernels::omp::softmax_forward(rows, params.weights, masked_probs);

  Prediction out;
  out.soft.dims = v.dims();
  out.soft.probs.assign(v.size(), ClassRow{1.0, 0.0, 0.0, 0.0});
  std::vector<std::uint8_t> labels(v.size(), kBackground);
  std::size_t j = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!m[i]) continue;
    out.soft.probs[i] = masked_probs[j++];
    labels[i] = argmax_class(out.soft.probs[i]);
  }
  out.labels = LabelVolume(v.geometry(), std::move(labels));
  return out;
}

}  // namespace skillroute
