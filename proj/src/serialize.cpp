#include "fboost/serialize.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fboost/error.hpp"
#include "fboost/numfmt.hpp"

namespace fboost {

namespace {

json number_to_json(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    if (const auto v = parse_double(j.get<std::string>())) return *v;
  }
  throw SchemaError("expected a number");
}

std::vector<double> vector_from_json(const json& j) {
  if (!j.is_array()) throw SchemaError("expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(number_from_json(x));
  return out;
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw SchemaError(std::string("missing field '") + name + "'");
  return j.at(name);
}

StumpKind stump_kind_from(const std::string& kind) {
  if (kind == "regression-stump") return StumpKind::Regression;
  if (kind == "binary-stump") return StumpKind::Binary;
  if (kind == "multiclass-stump") return StumpKind::Multiclass;
  throw SchemaError("unknown hypothesis kind '" + kind + "'");
}

std::string stump_kind_name(StumpKind kind) {
  switch (kind) {
    case StumpKind::Regression: return "regression-stump";
    case StumpKind::Binary: return "binary-stump";
    case StumpKind::Multiclass: return "multiclass-stump";
  }
  return "?";
}

}  // namespace

json rule_to_json(const Rule& rule) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Stump>) {
          json j{{"kind", stump_kind_name(r.kind)},
                 {"feature", r.feature},
                 {"threshold", number_to_json(r.threshold)},
                 {"left", r.left},
                 {"right", r.right}};
          if (r.kind == StumpKind::Multiclass) {
            j["class_left"] = r.class_left;
            j["class_right"] = r.class_right;
          }
          return j;
        } else if constexpr (std::is_same_v<T, ConstantRule>) {
          return json{{"kind", "constant"}, {"value", r.value}};
        } else {
          return json{{"kind", "enumerated"}, {"index", r.index}, {"values", r.values}};
        }
      },
      rule);
}

Rule rule_from_json(const json& j) {
  try {
    const auto kind = field(j, "kind").get<std::string>();
    if (kind == "constant") return ConstantRule{vector_from_json(field(j, "value"))};
    if (kind == "enumerated")
      return TabulatedRule{field(j, "index").get<std::size_t>(), vector_from_json(field(j, "values"))};
    Stump s;
    s.kind = stump_kind_from(kind);
    s.feature = field(j, "feature").get<std::size_t>();
    s.threshold = number_from_json(field(j, "threshold"));
    s.left = vector_from_json(field(j, "left"));
    s.right = vector_from_json(field(j, "right"));
    if (s.left.size() != s.right.size()) throw SchemaError("stump leaf arity mismatch");
    if (s.kind == StumpKind::Multiclass) {
      s.class_left = field(j, "class_left").get<int>();
      s.class_right = field(j, "class_right").get<int>();
    }
    return s;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed hypothesis: ") + e.what());
  }
}

json model_to_json(const Ensemble& model) {
  json terms = json::array();
  for (const auto& term : model.terms())
    terms.push_back({{"coefficient", term.coefficient}, {"hypothesis", rule_to_json(term.hypothesis.rule())}});
  json j{{"schema", kModelSchema},
         {"dim", model.space()->dim()},
         {"output_dim", model.output_dim()},
         {"offset", model.offset()},
         {"base", nullptr},
         {"terms", std::move(terms)}};
  if (model.base()) j["base"] = model.base()->values();
  return j;
}

Ensemble model_from_json(const json& j, const SpacePtr& space) {
  try {
    if (!j.is_object() || !j.contains("schema") || !j.at("schema").is_string())
      throw SchemaError("model has no schema tag");
    const auto schema = j.at("schema").get<std::string>();
    if (schema != kModelSchema)
      throw SchemaError("unsupported model schema '" + schema + "' (expected " + kModelSchema + ")");
    const auto dim = field(j, "dim").get<std::size_t>();
    const auto k = field(j, "output_dim").get<std::size_t>();
    if (space->output_dim() != k) throw SchemaError("model output dimension does not match the space");
    if (space->dim() != dim) throw SchemaError("model feature dimension does not match the space");
    const auto offset = vector_from_json(field(j, "offset"));
    if (offset.size() != k) throw SchemaError("offset arity mismatch");

    const json& base = field(j, "base");
    Ensemble model = base.is_null() ? Ensemble(space, offset) : Ensemble(FnVec(space, vector_from_json(base)));
    for (const auto& term : field(j, "terms")) {
      const double c = number_from_json(field(term, "coefficient"));
      model.add_term(c, Hypothesis(rule_from_json(field(term, "hypothesis")), space));
    }
    return model;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed model: ") + e.what());
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(std::string("model does not fit the space: ") + e.what());
  }
}

void save_model(const std::string& path, const Ensemble& model) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << model_to_json(model).dump(1) << '\n';
  if (!out) throw Error("write to '" + path + "' failed");
}

Ensemble load_model(const std::string& path, const SpacePtr& space) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError("model file '" + path + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j, space);
}

json edge_to_json(const EdgeEstimate& edge) {
  return json{{"gamma", edge.gamma},
              {"mode", to_string(edge.mode)},
              {"n_targets", edge.n_targets},
              {"worst_target_id", edge.worst_target ? json(*edge.worst_target) : json(nullptr)}};
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double cell_double(const std::string& cell, std::size_t line) {
  const auto v = parse_double(cell);
  if (!v) throw ParseError("bad number '" + cell + "'", line);
  return *v;
}

std::size_t cell_count(const std::string& cell, std::size_t line) {
  const double v = cell_double(cell, line);
  if (v < 0 || v != std::floor(v)) throw ParseError("bad count '" + cell + "'", line);
  return static_cast<std::size_t>(v);
}

template <class Row, class Parse>
std::vector<Row> read_table(std::istream& in, const char* header, std::size_t columns, Parse parse) {
  std::string line;
  if (!std::getline(in, line) || line != header) throw ParseError("unexpected CSV header", 1);
  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != columns)
      throw ParseError("expected " + std::to_string(columns) + " fields", line_no);
    rows.push_back(parse(cells, line_no));
  }
  return rows;
}

}  // namespace

void write_report_csv(std::ostream& out, const TrainReport& report) {
  out << kReportHeader << '\n';
  for (const auto& r : report.records) {
    out << r.t << ',' << r.weak_learners << ',' << format_double(r.objective) << ','
        << format_double(r.grad_norm) << ',' << format_double(r.edge) << ','
        << format_double(r.step) << ',';
    if (r.residual_norm) out << format_double(*r.residual_norm);
    out << '\n';
  }
}

std::vector<IterationRecord> read_report_csv(std::istream& in) {
  return read_table<IterationRecord>(in, kReportHeader, 7, [](const auto& c, std::size_t line) {
    IterationRecord r;
    r.t = cell_count(c[0], line);
    r.weak_learners = cell_count(c[1], line);
    r.objective = cell_double(c[2], line);
    r.grad_norm = cell_double(c[3], line);
    r.edge = cell_double(c[4], line);
    r.step = cell_double(c[5], line);
    if (!c[6].empty()) r.residual_norm = cell_double(c[6], line);
    return r;
  });
}

void write_curves(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << kCurveHeader << '\n';
  for (const auto& r : rows) {
    out << r.t << ',' << r.weak_learners << ',' << format_double(r.train_objective) << ','
        << format_double(r.test_objective) << ',' << format_double(r.train_metric) << ','
        << format_double(r.test_metric) << ',' << format_double(r.edge) << ','
        << format_double(r.step) << '\n';
  }
}

void write_curves(const std::string& path, const std::vector<CurveRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_curves(out, rows);
  if (!out) throw Error("write to '" + path + "' failed");
}

std::vector<CurveRow> read_curves(std::istream& in) {
  return read_table<CurveRow>(in, kCurveHeader, 8, [](const auto& c, std::size_t line) {
    CurveRow r;
    r.t = cell_count(c[0], line);
    r.weak_learners = cell_count(c[1], line);
    r.train_objective = cell_double(c[2], line);
    r.test_objective = cell_double(c[3], line);
    r.train_metric = cell_double(c[4], line);
    r.test_metric = cell_double(c[5], line);
    r.edge = cell_double(c[6], line);
    r.step = cell_double(c[7], line);
    return r;
  });
}

}  // namespace fboost
