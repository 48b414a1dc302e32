#pragma once

// JSON for hypotheses, models and edge reports; CSV for per-iteration records
// and experiment curves. Doubles are written in shortest round-trip form, so
// parse(emit(x)) == x exactly.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fboost/descent.hpp"
#include "fboost/edge.hpp"
#include "fboost/learners.hpp"

namespace fboost {

using json = nlohmann::json;

inline constexpr const char* kModelSchema = "fboost.model/1";

json rule_to_json(const Rule& rule);
Rule rule_from_json(const json& j);  // SchemaError on malformed input

json model_to_json(const Ensemble& model);
// Tabulated members and a tabulated initial function are only meaningful on
// a space with the training point count; stumps and constants evaluate
// anywhere with the right feature dimension.
Ensemble model_from_json(const json& j, const SpacePtr& space);

void save_model(const std::string& path, const Ensemble& model);
// SchemaError on unreadable JSON, wrong schema tag or missing fields.
Ensemble load_model(const std::string& path, const SpacePtr& space);

json edge_to_json(const EdgeEstimate& edge);

inline constexpr const char* kReportHeader = "t,weak_learners,objective,grad_norm,edge,step,residual_norm";

void write_report_csv(std::ostream& out, const TrainReport& report);
std::vector<IterationRecord> read_report_csv(std::istream& in);

struct CurveRow {
  std::size_t t = 0;
  std::size_t weak_learners = 0;
  double train_objective = 0.0;
  double test_objective = 0.0;
  double train_metric = 0.0;
  double test_metric = 0.0;
  double edge = 0.0;
  double step = 0.0;

  bool operator==(const CurveRow&) const = default;
};

inline constexpr const char* kCurveHeader =
    "t,weak_learners,train_objective,test_objective,train_metric,test_metric,edge,step";

void write_curves(std::ostream& out, const std::vector<CurveRow>& rows);
void write_curves(const std::string& path, const std::vector<CurveRow>& rows);
std::vector<CurveRow> read_curves(std::istream& in);

}  // namespace fboost
