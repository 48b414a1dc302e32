#include "fboost/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "fboost/error.hpp"
#include "fboost/numfmt.hpp"

namespace fboost {

DataFormat parse_format(const std::string& name) {
  if (name == "csv") return DataFormat::Csv;
  if (name == "libsvm") return DataFormat::Libsvm;
  if (name == "ranking") return DataFormat::Ranking;
  throw InvalidArgument("unknown data format '" + name + "'");
}

std::string to_string(DataFormat format) {
  switch (format) {
    case DataFormat::Csv: return "csv";
    case DataFormat::Libsvm: return "libsvm";
    case DataFormat::Ranking: return "ranking";
  }
  return "?";
}

Task parse_task(const std::string& name) {
  if (name == "auto") return Task::Auto;
  if (name == "regression") return Task::Regression;
  if (name == "binary") return Task::Binary;
  if (name == "multiclass") return Task::Multiclass;
  if (name == "ranking") return Task::Ranking;
  throw InvalidArgument("unknown task '" + name + "'");
}

std::string to_string(Task task) {
  switch (task) {
    case Task::Auto: return "auto";
    case Task::Regression: return "regression";
    case Task::Binary: return "binary";
    case Task::Multiclass: return "multiclass";
    case Task::Ranking: return "ranking";
  }
  return "?";
}

std::size_t output_dim_for(const LabeledData& labels) {
  if (labels.kind == LabelKind::Class) return labels.num_classes;
  if (labels.kind == LabelKind::Real) return labels.arity;
  return 1;
}

Task Dataset::task() const {
  switch (labels.kind) {
    case LabelKind::Real: return Task::Regression;
    case LabelKind::Binary: return Task::Binary;
    case LabelKind::Class: return Task::Multiclass;
    case LabelKind::Ranking: return Task::Ranking;
  }
  return Task::Auto;
}

Dataset::Part Dataset::part(const std::vector<std::size_t>& rows) const {
  Part p;
  p.rows = rows;
  p.labels = labels.subset(rows);
  if (rows.empty()) return p;
  std::vector<double> features;
  std::vector<std::string> ids;
  features.reserve(rows.size() * space->dim());
  for (std::size_t r : rows) {
    const auto x = space->row(r);
    features.insert(features.end(), x.begin(), x.end());
    if (!space->ids().empty()) ids.push_back(space->ids()[r]);
  }
  p.space = SampleSpace::create(std::move(features), space->dim(), space->output_dim(), {},
                                std::move(ids));
  return p;
}

void Dataset::validate() const {
  if (!space) throw InvalidArgument("dataset has no points");
  labels.validate(space->size(), space->output_dim());
  std::vector<int> seen(size(), 0);
  for (const auto* rows : {&train, &test})
    for (std::size_t r : *rows) {
      if (r >= size()) throw InvalidArgument("split index out of range");
      if (seen[r]++) throw InvalidArgument("train/test splits overlap");
    }
  if (std::count(seen.begin(), seen.end(), 0) != 0)
    throw InvalidArgument("train/test splits do not cover every point");
}

// ---------------------------------------------------------------------------
// Loading

namespace {

struct RawRow {
  std::size_t line = 0;
  std::string label;
  std::vector<std::pair<std::size_t, double>> sparse;  // 0-based index, value
  long long group = 0;
};

std::vector<std::string_view> split_on(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_blank(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double number_or_throw(std::string_view token, std::size_t line, const char* what) {
  const auto v = parse_double(token);
  if (!v || !std::isfinite(*v))
    throw ParseError(std::string("bad ") + what + " '" + std::string(token) + "'", line);
  return *v;
}

std::vector<RawRow> read_csv(std::istream& in, const LoadOptions& options, std::size_t& dim) {
  std::vector<RawRow> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  bool header_pending = options.header;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto cells = split_on(text, ',');
    if (columns == 0) {
      columns = cells.size();
      if (columns < 2) throw ParseError("csv needs at least one feature and a label", line_no);
    } else if (cells.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " fields, found " +
                           std::to_string(cells.size()),
                       line_no);
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const long long lc = options.label_column < 0
                             ? static_cast<long long>(columns) + options.label_column
                             : options.label_column;
    if (lc < 0 || lc >= static_cast<long long>(columns))
      throw ParseError("label column out of range", line_no);
    RawRow row;
    row.line = line_no;
    std::size_t j = 0;
    for (std::size_t c = 0; c < columns; ++c) {
      if (static_cast<long long>(c) == lc) {
        row.label = std::string(trim(cells[c]));
        if (row.label.empty()) throw ParseError("empty label", line_no);
        continue;
      }
      row.sparse.emplace_back(j++, number_or_throw(cells[c], line_no, "feature"));
    }
    rows.push_back(std::move(row));
  }
  dim = columns ? columns - 1 : 0;
  return rows;
}

std::vector<RawRow> read_sparse(std::istream& in, bool ranking, std::size_t& dim) {
  std::vector<RawRow> rows;
  std::string line;
  std::size_t line_no = 0;
  dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    const auto tokens = split_blank(trim(text));
    if (tokens.empty()) continue;
    RawRow row;
    row.line = line_no;
    row.label = std::string(tokens[0]);
    number_or_throw(tokens[0], line_no, "label");
    std::size_t first = 1;
    if (ranking) {
      if (tokens.size() < 2 || tokens[1].substr(0, 4) != "qid:")
        throw ParseError("ranking line needs 'qid:G' after the relevance", line_no);
      const auto g = parse_double(tokens[1].substr(4));
      if (!g || *g != std::floor(*g)) throw ParseError("bad query id", line_no);
      row.group = static_cast<long long>(*g);
      first = 2;
    }
    std::set<std::size_t> seen;
    for (std::size_t t = first; t < tokens.size(); ++t) {
      const auto tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw ParseError("expected idx:val, found '" + std::string(tok) + "'", line_no);
      if (tok.substr(0, colon) == "qid") throw ParseError("unexpected qid (use the ranking format)", line_no);
      const auto idx = parse_double(tok.substr(0, colon));
      if (!idx || *idx < 1 || *idx != std::floor(*idx))
        throw ParseError("feature index must be a positive integer", line_no);
      const auto j = static_cast<std::size_t>(*idx) - 1;
      if (!seen.insert(j).second) throw ParseError("duplicate feature index", line_no);
      row.sparse.emplace_back(j, number_or_throw(tok.substr(colon + 1), line_no, "feature value"));
      dim = std::max(dim, j + 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

LabeledData interpret_labels(const std::vector<RawRow>& rows, Task task, DataFormat format,
                             std::vector<std::string>& class_names) {
  std::vector<std::optional<double>> numeric;
  bool all_numeric = true;
  for (const auto& r : rows) {
    numeric.push_back(parse_double(r.label));
    if (!numeric.back() || !std::isfinite(*numeric.back())) all_numeric = false;
  }
  if (task == Task::Auto) {
    if (format == DataFormat::Ranking) {
      task = Task::Ranking;
    } else if (!all_numeric) {
      task = Task::Multiclass;
    } else {
      bool pm1 = true, integral = true;
      for (const auto& v : numeric) {
        pm1 = pm1 && (*v == 1.0 || *v == -1.0);
        integral = integral && *v == std::floor(*v);
      }
      task = pm1 ? Task::Binary : integral ? Task::Multiclass : Task::Regression;
    }
  }
  auto require_numeric = [&](const char* what) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (!numeric[i] || !std::isfinite(*numeric[i]))
        throw ParseError(std::string(what) + " label must be numeric", rows[i].line);
  };
  switch (task) {
    case Task::Regression: {
      require_numeric("regression");
      std::vector<double> y;
      for (const auto& v : numeric) y.push_back(*v);
      return LabeledData::real(std::move(y));
    }
    case Task::Binary: {
      require_numeric("binary");
      std::set<double> distinct;
      for (const auto& v : numeric) distinct.insert(*v);
      const bool zero_one = std::all_of(distinct.begin(), distinct.end(),
                                        [](double v) { return v == 0.0 || v == 1.0; });
      std::vector<double> y;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const double v = *numeric[i];
        if (zero_one) {
          y.push_back(v == 1.0 ? 1.0 : -1.0);
        } else if (v == 1.0 || v == -1.0) {
          y.push_back(v);
        } else {
          throw ParseError("binary labels must be +-1 or 0/1", rows[i].line);
        }
      }
      return LabeledData::binary(std::move(y));
    }
    case Task::Multiclass: {
      // Class order: ascending numeric value when every label is a number,
      // otherwise lexicographic.
      std::vector<std::size_t> order(rows.size());
      std::iota(order.begin(), order.end(), 0);
      auto less = [&](std::size_t a, std::size_t b) {
        if (all_numeric) return *numeric[a] < *numeric[b];
        return rows[a].label < rows[b].label;
      };
      std::stable_sort(order.begin(), order.end(), less);
      std::vector<int> cls(rows.size());
      class_names.clear();
      for (std::size_t k = 0; k < order.size(); ++k) {
        if (k == 0 || less(order[k - 1], order[k])) class_names.push_back(rows[order[k]].label);
        cls[order[k]] = static_cast<int>(class_names.size()) - 1;
      }
      return LabeledData::classes_of(std::move(cls), class_names.size());
    }
    case Task::Ranking: {
      if (format != DataFormat::Ranking) throw InvalidArgument("ranking task needs the ranking format");
      require_numeric("ranking");
      std::vector<double> rel;
      std::vector<long long> groups;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        rel.push_back(*numeric[i]);
        groups.push_back(rows[i].group);
      }
      return LabeledData::ranking(std::move(rel), std::move(groups));
    }
    case Task::Auto: break;
  }
  throw InvalidArgument("unresolved task");
}

}  // namespace

Dataset read_dataset(std::istream& in, const LoadOptions& options) {
  std::size_t dim = 0;
  const auto rows = options.format == DataFormat::Csv
                        ? read_csv(in, options, dim)
                        : read_sparse(in, options.format == DataFormat::Ranking, dim);
  if (rows.empty()) throw ParseError("no data rows", 0);
  if (dim == 0) dim = 1;  // all-sparse-empty rows: a single zero feature

  Dataset data;
  data.labels = interpret_labels(rows, options.task, options.format, data.class_names);
  std::vector<double> features(rows.size() * dim, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [j, v] : rows[i].sparse) features[i * dim + j] = v;
  data.space = SampleSpace::create(std::move(features), dim, output_dim_for(data.labels));
  data.train.resize(rows.size());
  std::iota(data.train.begin(), data.train.end(), 0);
  data.validate();
  return data;
}

Dataset load_dataset(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_dataset(in, options);
}

// ---------------------------------------------------------------------------
// Split and standardization

void split(Dataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0))
    throw InvalidArgument("test fraction must be in [0, 1)");
  std::mt19937_64 rng(seed);
  const std::size_t n = data.size();
  data.train.clear();
  data.test.clear();
  std::vector<char> is_test(n, 0);

  if (data.labels.kind == LabelKind::Ranking) {
    std::vector<long long> groups;
    std::set<long long> seen;
    for (long long g : data.labels.groups)
      if (seen.insert(g).second) groups.push_back(g);
    std::shuffle(groups.begin(), groups.end(), rng);
    auto m = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(groups.size())));
    m = std::min(m, groups.size() - 1);
    const std::set<long long> chosen(groups.begin(), groups.begin() + static_cast<std::ptrdiff_t>(m));
    for (std::size_t i = 0; i < n; ++i) is_test[i] = chosen.count(data.labels.groups[i]) ? 1 : 0;
  } else {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    auto m = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    m = std::min(m, n - 1);
    for (std::size_t k = 0; k < m; ++k) is_test[idx[k]] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) (is_test[i] ? data.test : data.train).push_back(i);
}

void standardize(Dataset& data) {
  const std::size_t d = data.space->dim();
  const std::size_t n = data.size();
  const auto& rows = data.train.empty() ? data.test : data.train;
  std::vector<double> features = data.space->features();
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t r : rows) mean += data.space->feature(r, j);
    mean /= static_cast<double>(rows.size());
    double var = 0.0;
    for (std::size_t r : rows) var += std::pow(data.space->feature(r, j) - mean, 2);
    var /= static_cast<double>(rows.size());
    const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
    for (std::size_t i = 0; i < n; ++i) features[i * d + j] = (features[i * d + j] - mean) / sd;
  }
  data.space = SampleSpace::create(std::move(features), d, data.space->output_dim(),
                                   data.space->weights(), data.space->ids());
}

// ---------------------------------------------------------------------------
// Synthetic data

namespace {

Dataset finish(std::vector<double> features, std::size_t dim, LabeledData labels) {
  Dataset data;
  data.labels = std::move(labels);
  data.space = SampleSpace::create(std::move(features), dim, output_dim_for(data.labels));
  data.train.resize(data.size());
  std::iota(data.train.begin(), data.train.end(), 0);
  return data;
}

}  // namespace

Dataset gaussian_blobs(std::size_t n, std::size_t num_classes, std::size_t dim, double spread,
                       std::uint64_t seed) {
  if (num_classes < 2 || dim < 1 || n < num_classes) throw InvalidArgument("bad blob parameters");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> center(-3.0, 3.0);
  std::normal_distribution<double> noise(0.0, spread);
  // Centers evenly spaced on a radius-3 circle in the first two features;
  // any further features get random center coordinates.
  std::vector<double> centers(num_classes * dim);
  for (std::size_t k = 0; k < num_classes; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(num_classes);
    for (std::size_t j = 0; j < dim; ++j)
      centers[k * dim + j] = j == 0 ? 3.0 * std::cos(angle) : j == 1 ? 3.0 * std::sin(angle) : center(rng);
  }
  std::vector<double> features(n * dim);
  std::vector<int> cls(n);
  for (std::size_t i = 0; i < n; ++i) {
    cls[i] = static_cast<int>(i % num_classes);
    for (std::size_t j = 0; j < dim; ++j)
      features[i * dim + j] = centers[static_cast<std::size_t>(cls[i]) * dim + j] + noise(rng);
  }
  Dataset data = finish(std::move(features), dim, LabeledData::classes_of(std::move(cls), num_classes));
  for (std::size_t k = 0; k < num_classes; ++k) data.class_names.push_back(std::to_string(k + 1));
  return data;
}

Dataset synthetic_regression(std::size_t n, std::size_t dim, double noise, std::uint64_t seed) {
  if (n < 1 || dim < 1) throw InvalidArgument("bad regression parameters");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> eps(0.0, noise > 0.0 ? noise : 1.0);
  std::vector<double> features(n * dim);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dim; ++j) features[i * dim + j] = unif(rng);
    y[i] = std::sin(3.0 * features[i * dim]) + (dim > 1 ? 0.5 * features[i * dim + 1] : 0.0);
    if (noise > 0.0) y[i] += eps(rng);
  }
  return finish(std::move(features), dim, LabeledData::real(std::move(y)));
}

Dataset synthetic_ranking(std::size_t groups, std::size_t per_group, std::size_t dim,
                          std::size_t levels, std::uint64_t seed) {
  if (groups < 1 || per_group < 2 || dim < 1 || levels < 2) throw InvalidArgument("bad ranking parameters");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> w(dim);
  for (double& v : w) v = gauss(rng);
  std::vector<double> features;
  std::vector<double> rel;
  std::vector<long long> qid;
  for (std::size_t g = 0; g < groups; ++g) {
    std::vector<double> score(per_group);
    for (std::size_t i = 0; i < per_group; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double x = gauss(rng);
        features.push_back(x);
        s += w[j] * x;
      }
      score[i] = s + 0.5 * gauss(rng);
    }
    // Relevance = within-group score quantile bucket.
    std::vector<std::size_t> order(per_group);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return score[a] < score[b]; });
    std::vector<double> level(per_group);
    for (std::size_t r = 0; r < per_group; ++r)
      level[order[r]] = static_cast<double>(r * levels / per_group);
    for (std::size_t i = 0; i < per_group; ++i) {
      rel.push_back(level[i]);
      qid.push_back(static_cast<long long>(g + 1));
    }
  }
  return finish(std::move(features), dim, LabeledData::ranking(std::move(rel), std::move(qid)));
}

void write_dataset(std::ostream& out, const Dataset& data, DataFormat format) {
  const std::size_t d = data.space->dim();
  auto label_text = [&](std::size_t i) -> std::string {
    switch (data.labels.kind) {
      case LabelKind::Class: {
        const auto c = static_cast<std::size_t>(data.labels.classes[i]);
        return c < data.class_names.size() ? data.class_names[c] : std::to_string(c + 1);
      }
      case LabelKind::Real:
        if (data.labels.arity != 1) throw UnsupportedError("cannot write multi-output regression labels");
        return format_double(data.labels.targets[i]);
      default:
        return format_double(data.labels.targets[i]);
    }
  };
  if (format == DataFormat::Ranking && data.labels.kind != LabelKind::Ranking)
    throw InvalidArgument("ranking format needs ranking labels");
  if (format == DataFormat::Csv) {
    for (std::size_t j = 0; j < d; ++j) out << 'f' << (j + 1) << ',';
    out << "label\n";
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (format == DataFormat::Csv) {
      for (std::size_t j = 0; j < d; ++j) out << format_double(data.space->feature(i, j)) << ',';
      out << label_text(i) << '\n';
      continue;
    }
    out << label_text(i);
    if (format == DataFormat::Ranking) out << " qid:" << data.labels.groups[i];
    for (std::size_t j = 0; j < d; ++j) {
      const double v = data.space->feature(i, j);
      if (v != 0.0) out << ' ' << (j + 1) << ':' << format_double(v);
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Metrics

double task_metric(const FnVec& f, const LabeledData& labels) {
  labels.validate(f.size(), f.output_dim());
  const std::size_t n = f.size();
  if (n == 0) return 0.0;
  switch (labels.kind) {
    case LabelKind::Class: {
      std::size_t wrong = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = f.at(i);
        const auto arg = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
        if (arg != labels.classes[i]) ++wrong;
      }
      return static_cast<double>(wrong) / static_cast<double>(n);
    }
    case LabelKind::Binary: {
      std::size_t wrong = 0;
      for (std::size_t i = 0; i < n; ++i)
        if ((f(i) > 0.0 ? 1.0 : -1.0) != labels.targets[i]) ++wrong;
      return static_cast<double>(wrong) / static_cast<double>(n);
    }
    case LabelKind::Ranking: {
      std::map<long long, std::vector<std::size_t>> by_group;
      for (std::size_t i = 0; i < n; ++i) by_group[labels.groups[i]].push_back(i);
      std::size_t pairs = 0, violated = 0;
      for (const auto& [g, members] : by_group)
        for (std::size_t a : members)
          for (std::size_t b : members)
            if (labels.targets[a] > labels.targets[b]) {
              ++pairs;
              if (f(a) <= f(b)) ++violated;
            }
      return pairs ? static_cast<double>(violated) / static_cast<double>(pairs) : 0.0;
    }
    case LabelKind::Real: {
      double s = 0.0;
      for (std::size_t i = 0; i < f.values().size(); ++i) s += std::pow(f.values()[i] - labels.targets[i], 2);
      return s / static_cast<double>(f.values().size());
    }
  }
  return 0.0;
}

std::string metric_name(const LabeledData& labels) {
  switch (labels.kind) {
    case LabelKind::Class:
    case LabelKind::Binary: return "error";
    case LabelKind::Ranking: return "violated_pairs";
    case LabelKind::Real: return "mse";
  }
  return "?";
}

}  // namespace fboost
