#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "fboost/data.hpp"
#include "fboost/error.hpp"
#include "support/oracles.hpp"

using namespace fboost;

namespace {

Dataset read(const std::string& text, DataFormat format, Task task = Task::Auto, bool header = true) {
  std::istringstream in(text);
  LoadOptions opts;
  opts.format = format;
  opts.task = task;
  opts.header = header;
  return read_dataset(in, opts);
}

std::size_t parse_error_line(const std::string& text, DataFormat format) {
  try {
    read(text, format);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

SpacePtr index_space(std::size_t n, std::size_t k = 1) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
  return SampleSpace::create(std::move(x), 1, k);
}

}  // namespace

TEST_CASE("libsvm line densifies sparse features") {
  const auto d = read("2 1:0.5 3:1.0\n", DataFormat::Libsvm, Task::Multiclass);
  REQUIRE(d.size() == 1);
  CHECK(d.space->dim() == 3);
  CHECK(d.space->feature(0, 0) == 0.5);
  CHECK(d.space->feature(0, 1) == 0.0);
  CHECK(d.space->feature(0, 2) == 1.0);
  CHECK(d.class_names == std::vector<std::string>{"2"});
  CHECK(d.labels.classes == std::vector<int>{0});
}

TEST_CASE("csv with header") {
  const auto d = read("f1,f2,label\n0.1,0.2,1\n", DataFormat::Csv);
  REQUIRE(d.size() == 1);
  CHECK(d.space->dim() == 2);
  CHECK(d.space->feature(0, 0) == 0.1);
  CHECK(d.space->feature(0, 1) == 0.2);
  CHECK(d.train == std::vector<std::size_t>{0});
  CHECK(d.test.empty());
}

TEST_CASE("ranking line carries relevance and group") {
  const auto d = read("1 qid:7 1:0.3\n", DataFormat::Ranking);
  REQUIRE(d.size() == 1);
  CHECK(d.task() == Task::Ranking);
  CHECK(d.labels.targets == std::vector<double>{1.0});
  CHECK(d.labels.groups == std::vector<long long>{7});
  CHECK(d.space->feature(0, 0) == 0.3);
}

TEST_CASE("task inference") {
  CHECK(read("x,y\n0,1\n1,-1\n", DataFormat::Csv).task() == Task::Binary);
  CHECK(read("x,y\n0,0.5\n1,2\n", DataFormat::Csv).task() == Task::Regression);
  const auto mc = read("x,y\n0,3\n1,10\n2,3\n", DataFormat::Csv);
  CHECK(mc.task() == Task::Multiclass);
  CHECK(mc.class_names == std::vector<std::string>{"3", "10"});
  CHECK(mc.labels.classes == std::vector<int>{0, 1, 0});
  CHECK(mc.space->output_dim() == 2);
  const auto named = read("x,y\n0,dog\n1,cat\n", DataFormat::Csv);
  CHECK(named.class_names == std::vector<std::string>{"cat", "dog"});
  const auto zero_one = read("x,y\n0,0\n1,1\n", DataFormat::Csv, Task::Binary);
  CHECK(zero_one.labels.targets == std::vector<double>{-1, 1});
}

TEST_CASE("malformed inputs report their line number") {
  CHECK(parse_error_line("a,b,y\n1,2,1\n1,2\n", DataFormat::Csv) == 3);
  CHECK(parse_error_line("a,b,y\n1,x,1\n", DataFormat::Csv) == 2);
  CHECK(parse_error_line("1 1:0.5\n1 0:1\n", DataFormat::Libsvm) == 2);
  CHECK(parse_error_line("1 1:0.5 1:2\n", DataFormat::Libsvm) == 1);
  CHECK(parse_error_line("1 1:0.5\n\n-1 2:nope\n", DataFormat::Libsvm) == 3);
  CHECK(parse_error_line("1 1:0.3\n", DataFormat::Ranking) == 1);
  CHECK(parse_error_line("1 qid:1 1:0.3\n1 qid:x 1:0.3\n", DataFormat::Ranking) == 2);
  CHECK_THROWS_AS(read("", DataFormat::Csv), ParseError);
  CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv", LoadOptions{}), Error);
}

TEST_CASE("libsvm comments and blank lines") {
  const auto d = read("# leading\n1 2:1.5 # trailing\n\n-1 1:2\n", DataFormat::Libsvm);
  REQUIRE(d.size() == 2);
  CHECK(d.task() == Task::Binary);
  CHECK(d.space->feature(0, 1) == 1.5);
  CHECK(d.space->feature(1, 0) == 2.0);
}

TEST_CASE("split is deterministic, disjoint and covering") {
  oracle::Gen gen(71);
  for (int rep = 0; rep < 20; ++rep) {
    Dataset d = gaussian_blobs(gen.between(5, 60), 3, 2, 1.0, rep);
    const double frac = gen.uniform(0.05, 0.6);
    const auto seed = static_cast<std::uint64_t>(gen.index(1000));
    Dataset a = d, b = d;
    split(a, frac, seed);
    split(b, frac, seed);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    CHECK_NOTHROW(a.validate());
    CHECK(a.train.size() + a.test.size() == d.size());
    CHECK(!a.train.empty());
    std::set<std::size_t> all(a.train.begin(), a.train.end());
    all.insert(a.test.begin(), a.test.end());
    CHECK(all.size() == d.size());
    CHECK(std::is_sorted(a.test.begin(), a.test.end()));
  }
}

TEST_CASE("ranking split keeps query groups together") {
  Dataset d = synthetic_ranking(10, 6, 3, 3, 4);
  split(d, 0.3, 9);
  std::set<long long> train_groups, test_groups;
  for (auto r : d.train) train_groups.insert(d.labels.groups[r]);
  for (auto r : d.test) test_groups.insert(d.labels.groups[r]);
  CHECK(test_groups.size() == 3);
  for (auto g : test_groups) CHECK(train_groups.count(g) == 0);
}

TEST_CASE("parts rebuild uniform sub-spaces") {
  Dataset d = gaussian_blobs(30, 3, 2, 1.0, 1);
  split(d, 0.2, 0);
  const auto test = d.test_part();
  CHECK(test.space->size() == d.test.size());
  CHECK(test.space->uniform());
  CHECK(test.labels.size() == d.test.size());
  for (std::size_t i = 0; i < test.rows.size(); ++i) {
    CHECK(test.space->feature(i, 1) == d.space->feature(test.rows[i], 1));
    CHECK(test.labels.classes[i] == d.labels.classes[test.rows[i]]);
  }
}

TEST_CASE("standardize uses train statistics") {
  Dataset d = read("a,b,y\n1,5,0.5\n3,5,1.5\n5,5,2.5\n100,5,0.1\n", DataFormat::Csv);
  d.train = {0, 1, 2};
  d.test = {3};
  standardize(d);
  double mean = 0.0, sq = 0.0;
  for (auto r : d.train) mean += d.space->feature(r, 0) / 3.0;
  for (auto r : d.train) sq += d.space->feature(r, 0) * d.space->feature(r, 0) / 3.0;
  CHECK(mean == doctest::Approx(0.0).scale(1.0));
  CHECK(sq == doctest::Approx(1.0));
  for (auto r : d.train) CHECK(d.space->feature(r, 1) == 0.0);
}

TEST_CASE("writing then reading reproduces the dataset") {
  for (DataFormat format : {DataFormat::Csv, DataFormat::Libsvm}) {
    const Dataset d = gaussian_blobs(25, 4, 3, 0.7, 2);
    std::ostringstream out;
    write_dataset(out, d, format);
    const auto back = read(out.str(), format);
    REQUIRE(back.size() == d.size());
    CHECK(back.labels.classes == d.labels.classes);
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(back.space->feature(i, j) == d.space->feature(i, j));
  }
  const Dataset r = synthetic_ranking(4, 5, 2, 3, 8);
  std::ostringstream out;
  write_dataset(out, r, DataFormat::Ranking);
  const auto back = read(out.str(), DataFormat::Ranking);
  CHECK(back.labels.targets == r.labels.targets);
  CHECK(back.labels.groups == r.labels.groups);
}

TEST_CASE("generators are seeded") {
  CHECK(gaussian_blobs(20, 3, 2, 1.0, 5).space->features() == gaussian_blobs(20, 3, 2, 1.0, 5).space->features());
  CHECK(gaussian_blobs(20, 3, 2, 1.0, 5).space->features() != gaussian_blobs(20, 3, 2, 1.0, 6).space->features());
  const auto reg = synthetic_regression(15, 2, 0.1, 3);
  CHECK(reg.task() == Task::Regression);
  CHECK(reg.size() == 15);
}

TEST_CASE("metric examples") {
  // Multiclass: perfect separation, then a constant model on balanced classes.
  const auto s = index_space(4, 2);
  const auto classes = LabeledData::classes_of({0, 1, 0, 1}, 2);
  CHECK(task_metric(FnVec(s, {1, -1, -1, 1, 1, -1, -1, 1}), classes) == 0.0);
  CHECK(task_metric(FnVec(s, {1, 0, 1, 0, 1, 0, 1, 0}), classes) == 0.5);
  // Ties go to the lowest class index.
  CHECK(task_metric(FnVec(s), classes) == 0.5);
  CHECK(metric_name(classes) == "error");

  // Ranking: one pair, tied scores violate.
  const auto r = index_space(2);
  const auto pair = LabeledData::ranking({2, 1}, {1, 1});
  CHECK(task_metric(FnVec(r, {0.3, 0.3}), pair) == 1.0);
  CHECK(task_metric(FnVec(r, {0.4, 0.3}), pair) == 0.0);
  CHECK(metric_name(pair) == "violated_pairs");

  // Binary: f <= 0 predicts -1.
  const auto b = index_space(3);
  CHECK(task_metric(FnVec(b, {0.0, 1.0, -2.0}), LabeledData::binary({-1, 1, 1})) == doctest::Approx(1.0 / 3));

  // Real: mean squared error.
  CHECK(task_metric(FnVec(b, {1, 2, 3}), LabeledData::real({1, 0, 3})) == doctest::Approx(4.0 / 3));
}

TEST_CASE("ranking metric matches a brute-force pair count") {
  oracle::Gen gen(83);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = gen.between(2, 20);
    const auto s = index_space(n);
    std::vector<double> rel(n), f(n);
    std::vector<long long> groups(n);
    for (std::size_t i = 0; i < n; ++i) {
      rel[i] = static_cast<double>(gen.index(3));
      groups[i] = static_cast<long long>(gen.index(3));
      f[i] = static_cast<double>(gen.index(4));
    }
    std::size_t pairs = 0, bad = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (groups[i] == groups[j] && rel[i] > rel[j]) {
          ++pairs;
          bad += f[i] <= f[j];
        }
    if (pairs == 0) continue;
    CHECK(task_metric(FnVec(s, f), LabeledData::ranking(rel, groups)) ==
          doctest::Approx(static_cast<double>(bad) / static_cast<double>(pairs)));
  }
}
