#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "biaswalk/embedder.hpp"
#include "biaswalk/evaluator.hpp"
#include "biaswalk/rng.hpp"

using namespace biaswalk;

namespace {

/// Minimal in-memory vector source.
struct Points {
  std::map<std::string, std::vector<double>, std::less<>> rows;

  std::optional<std::span<const double>> vector_of(std::string_view token) const {
    const auto it = rows.find(token);
    if (it == rows.end()) return std::nullopt;
    return std::span<const double>(it->second);
  }
};

/// Brute force: full sort by (squared distance, node), count votes, break
/// ties by the nearest label, then the smallest label.
std::string brute_force_knn(const Points& p, const std::vector<LabeledNode>& train, const std::string& query,
                            std::size_t k) {
  const auto& q = p.rows.at(query);
  std::vector<std::tuple<double, std::string, std::string>> all;
  for (const auto& t : train) {
    const auto& v = p.rows.at(t.node);
    double s = 0;
    for (std::size_t i = 0; i < q.size(); ++i) s += (q[i] - v[i]) * (q[i] - v[i]);
    all.emplace_back(s, t.node, t.label);
  }
  std::sort(all.begin(), all.end());
  all.resize(std::min(k, all.size()));
  std::map<std::string, std::size_t> votes;
  for (const auto& a : all) ++votes[std::get<2>(a)];
  std::size_t best = 0;
  for (const auto& [l, n] : votes) best = std::max(best, n);
  if (votes[std::get<2>(all[0])] == best) return std::get<2>(all[0]);
  for (const auto& [l, n] : votes)
    if (n == best) return l;
  return {};
}

Points random_points(Xoshiro256& rng, std::size_t n, std::size_t dim, std::vector<LabeledNode>& train,
                     std::vector<LabeledNode>& test) {
  Points p;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string node = "http://n/" + std::to_string(i);
    std::vector<double> v(dim);
    // Coarse grid values make exact distance ties common.
    for (auto& x : v) x = static_cast<double>(rng.below(4));
    p.rows[node] = v;
    const std::string label = "L" + std::to_string(rng.below(3));
    (i % 3 == 0 ? test : train).push_back({node, label});
  }
  train.push_back({"http://n/a", "L0"});
  train.push_back({"http://n/b", "L1"});
  p.rows["http://n/a"] = std::vector<double>(dim, 9.0);
  p.rows["http://n/b"] = std::vector<double>(dim, -9.0);
  return p;
}

}  // namespace

TEST_CASE("k-NN worked examples", "[evaluator]") {
  Points p;
  p.rows = {{"q", {0, 0}}, {"x", {0, 0}}, {"y", {1, 0}}, {"z", {0, 2}}, {"w", {5, 5}}};
  const std::vector<LabeledNode> train{{"x", "A"}, {"y", "A"}, {"z", "B"}, {"w", "B"}};
  CHECK(knn_predict(p, train, "q", EvalConfig{1}) == "A");
  CHECK(knn_predict(p, train, "q", EvalConfig{3}) == "A");

  Points tie;
  tie.rows = {{"q", {0, 0}}, {"near", {1, 0}}, {"far", {2, 0}}};
  const std::vector<LabeledNode> tie_train{{"near", "B"}, {"far", "A"}};
  CHECK(knn_predict(tie, tie_train, "q", EvalConfig{2}) == "B");
}

TEST_CASE("distance ties go to the smaller node IRI", "[evaluator]") {
  Points p;
  p.rows = {{"q", {0}}, {"m", {1}}, {"a", {-1}}};
  CHECK(knn_predict(p, std::vector<LabeledNode>{{"m", "M"}, {"a", "A"}}, "q", EvalConfig{1}) == "A");
  CHECK(knn_predict(p, std::vector<LabeledNode>{{"a", "M"}, {"m", "A"}}, "q", EvalConfig{1}) == "M");
}

TEST_CASE("vote ties without the nearest label fall back to the smallest label", "[evaluator]") {
  Points p;
  p.rows = {{"q", {0}}, {"n1", {1}}, {"n2", {2}}, {"n3", {3}}, {"n4", {4}}, {"n5", {5}}};
  // Votes: C once (nearest), B twice, A twice.
  const std::vector<LabeledNode> train{{"n1", "C"}, {"n2", "B"}, {"n3", "A"}, {"n4", "B"}, {"n5", "A"}};
  CHECK(knn_predict(p, train, "q", EvalConfig{5}) == "A");
}

TEST_CASE("k-NN matches a brute-force reference", "[evaluator][property]") {
  Xoshiro256 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<LabeledNode> train, test;
    const auto p = random_points(rng, 40, 1 + rng.below(4), train, test);
    const EvalConfig cfg{1 + rng.below(9)};
    const KnnClassifier knn(p, train, cfg);
    for (const auto& t : test) CHECK(knn.predict(p, t.node) == brute_force_knn(p, train, t.node, cfg.k));
  }
}

TEST_CASE("accuracy arithmetic", "[evaluator]") {
  Points p;
  LabeledDataset ds;
  for (int i = 0; i < 5; ++i) {
    p.rows["a" + std::to_string(i)] = {0.0 + i * 0.01, 0};
    p.rows["b" + std::to_string(i)] = {10.0 + i * 0.01, 0};
    ds.train.push_back({"a" + std::to_string(i), "A"});
    ds.train.push_back({"b" + std::to_string(i), "B"});
  }
  // Test node ti sits in cluster A when i < near_a, otherwise in cluster B.
  auto place = [&](int near_a) {
    for (int i = 0; i < 10; ++i) p.rows["t" + std::to_string(i)] = {i < near_a ? 0.5 : 9.5, 0};
  };

  place(5);
  for (int i = 0; i < 10; ++i) ds.test.push_back({"t" + std::to_string(i), i < 5 ? "A" : "B"});
  CHECK(evaluate(p, ds, EvalConfig{3}).accuracy == 100.0);

  ds.test.clear();
  for (int i = 0; i < 4; ++i) ds.test.push_back({"t" + std::to_string(i), "B"});
  const auto wrong = evaluate(p, ds, EvalConfig{3});
  CHECK(wrong.accuracy == 0.0);
  CHECK(wrong.confusion.at("B").at("A") == 4);

  place(7);
  ds.test.clear();
  for (int i = 0; i < 10; ++i) ds.test.push_back({"t" + std::to_string(i), "A"});
  const auto seventy = evaluate(p, ds, EvalConfig{3});
  CHECK(seventy.accuracy == 70.0);
  CHECK(seventy.correct == 7);

  std::ostringstream out;
  print_report(seventy, out);
  CHECK(out.str() == "accuracy=70.0000\nlabel=A n=10 correct=7 predicted: A:7 B:3\n");
}

TEST_CASE("evaluation errors", "[evaluator]") {
  Points p;
  p.rows = {{"a", {0}}, {"b", {1}}, {"c", {2}}};
  LabeledDataset ds{{{"a", "A"}, {"b", "B"}}, {}};
  CHECK_THROWS_AS(evaluate(p, ds, EvalConfig{}), ValidationError);

  ds.test = {{"missing-node", "A"}};
  try {
    evaluate(p, ds, EvalConfig{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("missing-node") != std::string::npos);
  }
  ds.test = {{"c", "A"}};
  ds.train.push_back({"absent-train", "A"});
  try {
    evaluate(p, ds, EvalConfig{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("absent-train") != std::string::npos);
  }
}

TEST_CASE("dataset validation", "[evaluator]") {
  CHECK_THROWS_AS((LabeledDataset{{{"a", "A"}, {"b", "A"}}, {{"c", "A"}}}.validate()), ValidationError);
  CHECK_THROWS_AS((LabeledDataset{{{"a", "A"}, {"b", "B"}}, {{"a", "A"}}}.validate()), ValidationError);
  CHECK_THROWS_AS((LabeledDataset{{{"a", ""}, {"b", "B"}}, {{"c", "A"}}}.validate()), ValidationError);
  CHECK_NOTHROW((LabeledDataset{{{"a", "A"}, {"b", "B"}}, {{"c", "A"}}}.validate()));
  CHECK_THROWS_AS(EvalConfig{0}.validate(), ValidationError);
}

TEST_CASE("predictions are invariant under isometries and scaling", "[evaluator][property]") {
  Xoshiro256 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t dim = 3;
    LabeledDataset ds;
    Points p;
    for (std::size_t i = 0; i < 60; ++i) {
      const std::string node = "n" + std::to_string(i);
      std::vector<double> v(dim);
      for (auto& x : v) x = rng.uniform01() * 2 - 1;
      p.rows[node] = v;
      (i % 4 == 0 ? ds.test : ds.train).push_back({node, "L" + std::to_string(rng.below(3))});
    }
    // Rotation about z by theta, then x by phi, then scaling and translation.
    const double theta = rng.uniform01() * 6.28, phi = rng.uniform01() * 6.28, s = 0.5 + rng.uniform01() * 4;
    const double t[3] = {rng.uniform01() * 10, -rng.uniform01() * 10, 3.0};
    Points moved;
    for (const auto& [node, v] : p.rows) {
      const double x1 = std::cos(theta) * v[0] - std::sin(theta) * v[1];
      const double y1 = std::sin(theta) * v[0] + std::cos(theta) * v[1];
      const double z1 = v[2];
      const double y2 = std::cos(phi) * y1 - std::sin(phi) * z1;
      const double z2 = std::sin(phi) * y1 + std::cos(phi) * z1;
      moved.rows[node] = {s * x1 + t[0], s * y2 + t[1], s * z2 + t[2]};
    }
    for (const std::size_t k : {1u, 4u, 7u}) {
      const auto a = evaluate(p, ds, EvalConfig{k});
      const auto b = evaluate(moved, ds, EvalConfig{k});
      for (std::size_t i = 0; i < a.predictions.size(); ++i)
        CHECK(a.predictions[i].predicted == b.predictions[i].predicted);
    }
  }
}

TEST_CASE("repeated evaluation gives identical predictions", "[evaluator][determinism]") {
  Xoshiro256 rng(5);
  std::vector<LabeledNode> train, test;
  const auto p = random_points(rng, 50, 2, train, test);
  const LabeledDataset ds{train, test};
  for (const auto metric : {Metric::euclidean, Metric::cosine}) {
    const auto a = evaluate(p, ds, EvalConfig{4, metric});
    const auto b = evaluate(p, ds, EvalConfig{4, metric});
    REQUIRE(a.predictions.size() == b.predictions.size());
    for (std::size_t i = 0; i < a.predictions.size(); ++i) CHECK(a.predictions[i].predicted == b.predictions[i].predicted);
  }
}

TEST_CASE("cosine metric ignores vector length", "[evaluator]") {
  Points p;
  p.rows = {{"q", {1, 0.1}}, {"long", {100, 0}}, {"short", {0.1, 0.1}}};
  const std::vector<LabeledNode> train{{"long", "X"}, {"short", "Y"}};
  CHECK(knn_predict(p, train, "q", EvalConfig{1, Metric::euclidean}) == "Y");
  CHECK(knn_predict(p, train, "q", EvalConfig{1, Metric::cosine}) == "X");
  CHECK(parse_metric("cosine") == Metric::cosine);
  CHECK_FALSE(parse_metric("manhattan"));
}

TEST_CASE("lookups go through the corpus token escaping", "[evaluator]") {
  BasicEmbeddingMatrix<float> m(Vocabulary({"http://x/a\\u0020b", "http://x/c"}, {1, 1}), 1);
  m.input = {1.0f, 5.0f};
  const std::vector<LabeledNode> train{{"http://x/a b", "A"}, {"http://x/c", "C"}};
  CHECK(knn_predict(m, train, "http://x/a b", EvalConfig{1}) == "A");
}

TEST_CASE("label files", "[evaluator][io]") {
  std::istringstream in("# comment\n\n<http://x/a>\tA\r\nhttp://x/b\tB\textra\n");
  const auto rows = read_labels(in);
  CHECK(rows == std::vector<LabeledNode>{{"http://x/a", "A"}, {"http://x/b", "B"}});

  std::istringstream with_header("id\tlabel_group\tperson\nhttp://x/a\tG1\tP\n");
  LabelFileOptions opt;
  opt.header = true;
  opt.node_column = 2;
  opt.label_column = 1;
  CHECK(read_labels(with_header, opt) == std::vector<LabeledNode>{{"P", "G1"}});

  std::istringstream bad("http://x/a\n");
  CHECK_THROWS_AS(read_labels(bad), ParseError);
  std::istringstream empty_label("http://x/a\t\n");
  CHECK_THROWS_AS(read_labels(empty_label), ParseError);

  std::ostringstream out;
  write_labels(out, rows);
  std::istringstream back(out.str());
  CHECK(read_labels(back) == rows);
}
