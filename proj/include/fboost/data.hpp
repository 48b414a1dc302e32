#pragma once

// Datasets: file loaders, seeded train/test splits, synthetic generators and
// task metrics.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fboost/fspace.hpp"
#include "fboost/objectives.hpp"

namespace fboost {

enum class DataFormat { Csv, Libsvm, Ranking };
DataFormat parse_format(const std::string& name);
std::string to_string(DataFormat format);

// Which label interpretation to use. Auto infers: ranking files are Ranking;
// otherwise labels in {-1,+1} are Binary, other integer labels are Class and
// anything else is Real.
enum class Task { Auto, Regression, Binary, Multiclass, Ranking };
Task parse_task(const std::string& name);
std::string to_string(Task task);

struct Dataset {
  SpacePtr space;  // every point, output_dim matching the labels
  LabeledData labels;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  // Original label text of class c (0-based index; external index c + 1).
  std::vector<std::string> class_names;

  struct Part {
    SpacePtr space;
    LabeledData labels;
    std::vector<std::size_t> rows;
    bool empty() const { return rows.empty(); }
  };

  std::size_t size() const { return labels.size(); }
  Task task() const;
  Part part(const std::vector<std::size_t>& rows) const;
  Part train_part() const { return part(train); }
  Part test_part() const { return part(test); }

  // Splits must be disjoint and cover every point.
  void validate() const;
};

// Output dimension implied by labels: K for classes, arity otherwise.
std::size_t output_dim_for(const LabeledData& labels);

struct LoadOptions {
  DataFormat format = DataFormat::Csv;
  Task task = Task::Auto;
  bool header = true;     // csv only
  int label_column = -1;  // csv only; negative counts from the end
};

// Every point lands in `train` until split() is called. Malformed lines raise
// ParseError carrying the 1-based line number.
Dataset load_dataset(const std::string& path, const LoadOptions& options);
Dataset read_dataset(std::istream& in, const LoadOptions& options);

// Deterministic seeded shuffle into train/test. Ranking data is split by
// query group so preference pairs stay within one side.
void split(Dataset& data, double test_fraction, std::uint64_t seed);

// Rescales every feature to zero mean and unit variance using train-split
// statistics. Constant features are only centered.
void standardize(Dataset& data);

// Synthetic generators.
Dataset gaussian_blobs(std::size_t n, std::size_t num_classes, std::size_t dim, double spread,
                       std::uint64_t seed);
Dataset synthetic_regression(std::size_t n, std::size_t dim, double noise, std::uint64_t seed);
Dataset synthetic_ranking(std::size_t groups, std::size_t per_group, std::size_t dim,
                          std::size_t levels, std::uint64_t seed);

// Writes in the given format (class labels as 1..K, binary as +-1).
void write_dataset(std::ostream& out, const Dataset& data, DataFormat format);

// Task metric of predictions f against labels:
//   Class: argmax error rate, ties to the lowest class index
//   Binary: sign error rate, f <= 0 predicts -1
//   Ranking: fraction of in-group pairs rel_i > rel_j with f_i <= f_j
//   Real: mean squared error (averaged over points and coordinates)
double task_metric(const FnVec& f, const LabeledData& labels);
std::string metric_name(const LabeledData& labels);

}  // namespace fboost
