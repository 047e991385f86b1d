#pragma once

#include "eegfair/bootstrap.hpp"
#include "eegfair/combat.hpp"
#include "eegfair/gender_analysis.hpp"
#include "eegfair/model_selection.hpp"
#include "eegfair/staging.hpp"
#include "eegfair/synth.hpp"

#include <json.hpp>

namespace eegfair {

using Json = nlohmann::json;

// Every *_from_json throws InvalidArgument on malformed documents.

Json to_json(const HarmonizationModel& m);
HarmonizationModel harmonization_model_from_json(const Json& j);

Json to_json(const TrainedModel& m);
TrainedModel trained_model_from_json(const Json& j);

Json to_json(const CvResult& cv);

// Summary of every cell; with_replicates adds the per-replicate metric values.
Json to_json(const AuditReport& report, bool with_replicates = true);
// Confusion matrices per cell, averaged and rounded.
Json confusion_json(const AuditReport& report);
// Bar-chart payload: metric means and CI bounds per group and scope.
Json bar_chart_json(const AuditReport& report);

Json to_json(const StageBreakdown& b);
Json to_json(const GroundTruth& t);
Json to_json(const GenderRetrainResult& r);
Json to_json(const Split& split, const std::vector<std::string>& subject_ids);

Json to_json(const SynthConfig& cfg);
SynthConfig synth_config_from_json(const Json& j);

Eigen::VectorXd vector_from_json(const Json& j);
Eigen::MatrixXd matrix_from_json(const Json& j);  // array of rows
Json to_json_vector(const Eigen::Ref<const Eigen::VectorXd>& v);
Json to_json_matrix(const Eigen::Ref<const Eigen::MatrixXd>& m);

// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

}  // namespace eegfair
