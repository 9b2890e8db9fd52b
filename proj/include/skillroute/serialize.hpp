#pragma once

// JSON mappings for the types that appear in manifests, model files and
// experiment records. See docs/formats.md for the schemas.

#include <json.hpp>

#include "skillroute/harness.hpp"

namespace skillroute {

using nlohmann::json;

void to_json(json& j, const NormalizationMode& m);
void from_json(const json& j, NormalizationMode& m);

void to_json(json& j, const PhantomSpec& s);
void from_json(const json& j, PhantomSpec& s);

void to_json(json& j, const JudgementConfig& c);
void from_json(const json& j, JudgementConfig& c);

void to_json(json& j, const TrainConfig& c);
void from_json(const json& j, TrainConfig& c);

void to_json(json& j, const ModelParams& p);
void from_json(const json& j, ModelParams& p);

void to_json(json& j, const Peak& p);
void from_json(const json& j, Peak& p);

void to_json(json& j, const RuleEvaluation& r);
void from_json(const json& j, RuleEvaluation& r);

void to_json(json& j, const RoutingDecision& d);
void from_json(const json& j, RoutingDecision& d);

void to_json(json& j, const ConfusionCounts& c);
void from_json(const json& j, ConfusionCounts& c);

void to_json(json& j, const EvaluationReport& r);
void from_json(const json& j, EvaluationReport& r);

void to_json(json& j, const Split& s);
void from_json(const json& j, Split& s);

void to_json(json& j, const SubjectResult& r);
void from_json(const json& j, SubjectResult& r);

void to_json(json& j, const MethodScore& s);
void from_json(const json& j, MethodScore& s);

void to_json(json& j, const SplitResult& r);
void from_json(const json& j, SplitResult& r);

void to_json(json& j, const ExperimentConfigEcho& c);
void from_json(const json& j, ExperimentConfigEcho& c);

void to_json(json& j, const ExperimentReport& r);
void from_json(const json& j, ExperimentReport& r);

}  // namespace skillroute
