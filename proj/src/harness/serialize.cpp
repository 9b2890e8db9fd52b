#include "skillroute/serialize.hpp"

namespace skillroute {

void to_json(json& j, const NormalizationMode& m) {
  if (m.kind == NormalizationMode::Kind::MinMax) {
    j = json{{"mode", "minmax"}};
  } else {
    j = json{{"mode", "percentile"}, {"p_lo", m.p_lo}, {"p_hi", m.p_hi}};
  }
}

void from_json(const json& j, NormalizationMode& m) {
  const std::string mode = j.is_string() ? j.get<std::string>() : j.at("mode").get<std::string>();
  if (mode == "minmax") {
    m = NormalizationMode::minmax();
  } else if (mode == "percentile") {
    m = NormalizationMode::percentile();
    if (j.is_object()) {
      m.p_lo = j.value("p_lo", m.p_lo);
      m.p_hi = j.value("p_hi", m.p_hi);
    }
  } else {
    throw Error(ErrorCode::ParseError, "unknown normalization mode '" + mode + "'");
  }
}

void to_json(json& j, const PhantomSpec& s) {
  j = json{{"dims", {s.dims.nx, s.dims.ny, s.dims.nz}},
           {"spacing", {s.spacing.sx, s.spacing.sy, s.spacing.sz}},
           {"means", s.tissue_means},
           {"stddevs", s.tissue_stddevs},
           {"fractions", s.tissue_fractions},
           {"bias_amplitude", s.bias_amplitude},
           {"seed", s.seed}};
}

void from_json(const json& j, PhantomSpec& s) {
  s = PhantomSpec{};
  if (j.contains("dims")) {
    const auto d = j.at("dims").get<std::array<std::size_t, 3>>();
    s.dims = {d[0], d[1], d[2]};
  }
  if (j.contains("spacing")) {
    const auto sp = j.at("spacing").get<std::array<double, 3>>();
    s.spacing = {sp[0], sp[1], sp[2]};
  }
  if (j.contains("means")) s.tissue_means = j.at("means").get<std::array<double, 3>>();
  if (j.contains("stddevs")) s.tissue_stddevs = j.at("stddevs").get<std::array<double, 3>>();
  if (j.contains("fractions")) s.tissue_fractions = j.at("fractions").get<std::array<double, 3>>();
  s.bias_amplitude = j.value("bias_amplitude", s.bias_amplitude);
  s.seed = j.value("seed", s.seed);
}

void to_json(json& j, const JudgementConfig& c) {
  j = json{{"bins", c.bin_count},
           {"smooth_window", c.smoothing_window},
           {"prominence", c.min_prominence},
           {"height_ratio", c.height_ratio},
           {"position_ratio", c.position_ratio},
           {"separation", c.separation ? json(*c.separation) : json(nullptr)},
           {"effective_separation", c.effective_separation()}};
}

void from_json(const json& j, JudgementConfig& c) {
  c = JudgementConfig{};
  c.bin_count = j.value("bins", c.bin_count);
  c.smoothing_window = j.value("smooth_window", c.smoothing_window);
  c.min_prominence = j.value("prominence", c.min_prominence);
  c.height_ratio = j.value("height_ratio", c.height_ratio);
  c.position_ratio = j.value("position_ratio", c.position_ratio);
  if (j.contains("separation") && !j.at("separation").is_null()) {
    c.separation = j.at("separation").get<double>();
  }
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"learning_rate", c.learning_rate},
           {"epochs", c.epochs},
           {"epsilon", c.epsilon},
           {"seed", c.seed},
           {"include_background", c.include_background}};
}

void from_json(const json& j, TrainConfig& c) {
  c = TrainConfig{};
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.epochs = j.value("epochs", c.epochs);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.seed = j.value("seed", c.seed);
  c.include_background = j.value("include_background", c.include_background);
}

void to_json(json& j, const ModelParams& p) {
  j = json{{"format", "skillroute-voxel-classifier-1"},
           {"features", {"intensity", "local_mean", "local_stddev", "bias"}},
           {"weights", p.weights},
           {"feature_mean", p.feature_mean},
           {"feature_scale", p.feature_scale}};
}

void from_json(const json& j, ModelParams& p) {
  p.weights = j.at("weights").get<WeightMatrix>();
  p.feature_mean = j.at("feature_mean").get<FeatureRow>();
  p.feature_scale = j.at("feature_scale").get<FeatureRow>();
  for (const auto& row : p.weights)
    for (double w : row)
      if (!std::isfinite(w)) throw Error(ErrorCode::ParseError, "non-finite model weight");
}

void to_json(json& j, const Peak& p) { j = json{{"x", p.x}, {"y", p.y}}; }
void from_json(const json& j, Peak& p) {
  p.x = j.at("x").get<std::size_t>();
  p.y = j.at("y").get<double>();
}

void to_json(json& j, const RuleEvaluation& r) {
  j = json{{"passed", r.passed}, {"lhs", r.lhs}, {"rhs", r.rhs}};
}
void from_json(const json& j, RuleEvaluation& r) {
  r.passed = j.at("passed").get<bool>();
  r.lhs = j.at("lhs").get<double>();
  r.rhs = j.at("rhs").get<double>();
}

void to_json(json& j, const RoutingDecision& d) {
  j = json{{"target", std::string(to_string(d.target))},
           {"degenerate", d.degenerate},
           {"peaks", d.peakset.peaks},
           {"rule_separation", d.separation},
           {"rule_height", d.height},
           {"rule_position", d.position}};
}

void from_json(const json& j, RoutingDecision& d) {
  const std::string target = j.at("target").get<std::string>();
  if (target == "SkilledA") d.target = Target::SkilledA;
  else if (target == "SkilledB") d.target = Target::SkilledB;
  else throw Error(ErrorCode::ParseError, "unknown routing target '" + target + "'");
  d.degenerate = j.at("degenerate").get<bool>();
  d.peakset.peaks = j.at("peaks").get<std::vector<Peak>>();
  d.separation = j.at("rule_separation").get<RuleEvaluation>();
  d.height = j.at("rule_height").get<RuleEvaluation>();
  d.position = j.at("rule_position").get<RuleEvaluation>();
}

void to_json(json& j, const ConfusionCounts& c) {
  j = json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}
void from_json(const json& j, ConfusionCounts& c) {
  c.tp = j.at("tp").get<std::uint64_t>();
  c.fp = j.at("fp").get<std::uint64_t>();
  c.fn = j.at("fn").get<std::uint64_t>();
  c.tn = j.at("tn").get<std::uint64_t>();
}

void to_json(json& j, const EvaluationReport& r) {
  j = json{{"volume_id", r.volume_id},
           {"dsc", {{"csf", r.per_class_dsc[0]}, {"gm", r.per_class_dsc[1]}, {"wm", r.per_class_dsc[2]}}},
           {"macro_dsc", r.macro_dsc},
           {"counts", {{"csf", r.counts[0]}, {"gm", r.counts[1]}, {"wm", r.counts[2]}}}};
}

void from_json(const json& j, EvaluationReport& r) {
  r.volume_id = j.at("volume_id").get<std::string>();
  const char* names[] = {"csf", "gm", "wm"};
  for (std::size_t c = 0; c < 3; ++c) {
    r.per_class_dsc[c] = j.at("dsc").at(names[c]).get<double>();
    r.counts[c] = j.at("counts").at(names[c]).get<ConfusionCounts>();
  }
  r.macro_dsc = j.at("macro_dsc").get<double>();
}

void to_json(json& j, const Split& s) {
  j = json{{"name", s.name}, {"train", s.train_ids}, {"test", s.test_ids}};
}
void from_json(const json& j, Split& s) {
  s.name = j.at("name").get<std::string>();
  s.train_ids = j.at("train").get<std::vector<std::string>>();
  s.test_ids = j.at("test").get<std::vector<std::string>>();
}

void to_json(json& j, const SubjectResult& r) {
  j = json{{"id", r.id}};
  if (r.error) {
    j["error"] = *r.error;
    return;
  }
  j["decision"] = r.decision;
  j["backend_a"] = r.backend_a;
  j["backend_b"] = r.backend_b;
  j["router"] = r.router;
}

void from_json(const json& j, SubjectResult& r) {
  r = SubjectResult{};
  r.id = j.at("id").get<std::string>();
  if (j.contains("error")) {
    r.error = j.at("error").get<std::string>();
    return;
  }
  r.decision = j.at("decision").get<RoutingDecision>();
  r.backend_a = j.at("backend_a").get<EvaluationReport>();
  r.backend_b = j.at("backend_b").get<EvaluationReport>();
  r.router = j.at("router").get<EvaluationReport>();
}

void to_json(json& j, const MethodScore& s) {
  j = json{{"mean_macro_dsc", s.mean_macro}, {"pooled_macro_dsc", s.pooled_macro}};
}
void from_json(const json& j, MethodScore& s) {
  s.mean_macro = j.at("mean_macro_dsc").get<double>();
  s.pooled_macro = j.at("pooled_macro_dsc").get<double>();
}

void to_json(json& j, const SplitResult& r) {
  j = json{{"split", r.split},
           {"backend_a", r.backend_a},
           {"backend_b", r.backend_b},
           {"router", r.router},
           {"evaluated", r.evaluated},
           {"routed_to_a", r.routed_to_a},
           {"training_loss", r.training_loss},
           {"subjects", r.subjects}};
}

void from_json(const json& j, SplitResult& r) {
  r.split = j.at("split").get<Split>();
  r.backend_a = j.at("backend_a").get<MethodScore>();
  r.backend_b = j.at("backend_b").get<MethodScore>();
  r.router = j.at("router").get<MethodScore>();
  r.evaluated = j.at("evaluated").get<std::size_t>();
  r.routed_to_a = j.at("routed_to_a").get<std::size_t>();
  r.training_loss = j.at("training_loss").get<std::vector<double>>();
  r.subjects = j.at("subjects").get<std::vector<SubjectResult>>();
}

void to_json(json& j, const ExperimentConfigEcho& c) {
  j = json{{"judgement", c.judgement},
           {"backend_a", c.backend_a},
           {"backend_b", c.backend_b},
           {"train", c.train},
           {"normalization", c.normalization}};
}

void from_json(const json& j, ExperimentConfigEcho& c) {
  c.judgement = j.at("judgement").get<JudgementConfig>();
  c.backend_a = j.at("backend_a").get<std::string>();
  c.backend_b = j.at("backend_b").get<std::string>();
  c.train = j.at("train").get<TrainConfig>();
  c.normalization = j.at("normalization").get<NormalizationMode>();
}

void to_json(json& j, const ExperimentReport& r) {
  j = json{{"format", "skillroute-experiment-1"}, {"config", r.config}, {"splits", r.splits}};
}

void from_json(const json& j, ExperimentReport& r) {
  r.config = j.at("config").get<ExperimentConfigEcho>();
  r.splits = j.at("splits").get<std::vector<SplitResult>>();
}

}  // namespace skillroute
