#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "core/baselines.hpp"
#include "core/corpus.hpp"
#include "core/metrics.hpp"

using namespace redial;

namespace {

const std::string kDataDir = REDIAL_TEST_DATA_DIR;

EvaluationInstance make_instance(const std::string& id, std::vector<std::int64_t> ground_truth) {
  EvaluationInstance instance;
  instance.instance_id = id;
  instance.dialogue_id = id.substr(0, id.find('#'));
  Turn turn;
  turn.role = Role::seeker;
  turn.text = "context";
  instance.context.push_back(turn);
  instance.ground_truth = std::move(ground_truth);
  return instance;
}

InstanceSet fixture_instances() {
  Corpus corpus = parse_corpus(kDataDir + "/fixture_scored.jsonl", Split::test);
  Config config;
  return build_standard(corpus, config);
}

}  // namespace

TEST_CASE("recall_at_k on the contract examples") {
  EvaluationInstance one = make_instance("d#1", {77});
  RankedPrediction hit{"d#1", {77, 5, 6}};
  CHECK(recall_at_k(hit, one, 1) == 1.0);

  EvaluationInstance two = make_instance("d#1", {77, 88});
  RankedPrediction half{"d#1", {77, 5, 6}};
  CHECK(recall_at_k(half, two, 2) == 0.5);

  // masked ground truth is unhittable: predictions are non-negative
  EvaluationInstance masked = make_instance("d#1", {-101});
  RankedPrediction any{"d#1", {1, 2, 3, 4, 5}};
  for (int k : {1, 5, 50}) CHECK(recall_at_k(any, masked, k) == 0.0);

  // rankings shorter than k are used as-is
  RankedPrediction shorter{"d#1", {88}};
  CHECK(recall_at_k(shorter, two, 50) == 0.5);

  CHECK_THROWS_AS(recall_at_k(hit, one, 0), RedialError);
  EvaluationInstance empty = make_instance("d#1", {});
  CHECK_THROWS_AS(recall_at_k(hit, empty, 1), RedialError);
}

TEST_CASE("recall is monotone in k and ignores permutations below the cutoff") {
  std::mt19937 rng(20240817);
  std::uniform_int_distribution<std::int64_t> item(0, 400);
  for (int trial = 0; trial < 500; ++trial) {
    std::set<std::int64_t> truth_set;
    int truth_size = 1 + static_cast<int>(rng() % 5);
    while (static_cast<int>(truth_set.size()) < truth_size) truth_set.insert(item(rng));
    EvaluationInstance instance =
        make_instance("d#1", {truth_set.begin(), truth_set.end()});

    std::set<std::int64_t> ranked;
    int depth = static_cast<int>(rng() % 60);
    while (static_cast<int>(ranked.size()) < depth) ranked.insert(item(rng));
    RankedPrediction prediction{"d#1", {ranked.begin(), ranked.end()}};
    std::shuffle(prediction.ranking.begin(), prediction.ranking.end(), rng);

    double last = 0.0;
    for (int k = 1; k <= 60; ++k) {
      double r = recall_at_k(prediction, instance, k);
      CHECK(r >= last);
      last = r;
    }

    // permuting items strictly below rank k cannot change recall@k
    int k = 1 + static_cast<int>(rng() % 10);
    if (static_cast<int>(prediction.ranking.size()) > k + 1) {
      double before = recall_at_k(prediction, instance, k);
      RankedPrediction permuted = prediction;
      std::shuffle(permuted.ranking.begin() + k, permuted.ranking.end(), rng);
      CHECK(recall_at_k(permuted, instance, k) == before);
    }
  }
}

TEST_CASE("score_all reproduces the hand-scored fixture exactly") {
  InstanceSet instances = fixture_instances();
  REQUIRE(instances.instances.size() == 20);
  PredictionSet predictions = read_predictions_file(kDataDir + "/fixture_predictions.jsonl");

  Config config;  // k = 1,10,50; sr-cutoff 1; all-turns
  MetricReport report = score_all(instances, predictions, config);

  CHECK(report.instance_count == 20);
  CHECK(report.dialogue_count == 10);
  CHECK(report.recall.at(1) == doctest::Approx(0.225).epsilon(1e-12));
  CHECK(report.recall.at(10) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(report.recall.at(50) == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(report.success_rate == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.rdl == doctest::Approx(0.1125).epsilon(1e-12));
  CHECK(report.missing_form_hits == 0);
}

TEST_CASE("score_all honors the cutoff and denominator flags") {
  InstanceSet instances = fixture_instances();
  PredictionSet predictions = read_predictions_file(kDataDir + "/fixture_predictions.jsonl");

  Config wider;
  wider.set("sr-cutoff", "2");
  MetricReport at2 = score_all(instances, predictions, wider);
  CHECK(at2.success_rate == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(at2.rdl == doctest::Approx(0.1625).epsilon(1e-12));

  Config rec_turns;
  rec_turns.set("rdl-denominator", "recommender-turns");
  MetricReport rec = score_all(instances, predictions, rec_turns);
  CHECK(rec.rdl == doctest::Approx(0.225).epsilon(1e-12));
}

TEST_CASE("micro averaging divides by the total ground-truth size") {
  InstanceSet instances = fixture_instances();
  PredictionSet predictions = read_predictions_file(kDataDir + "/fixture_predictions.jsonl");
  Config config;
  config.set("recall-average", "micro");
  MetricReport report = score_all(instances, predictions, config);
  CHECK(report.recall.at(1) == doctest::Approx(6.0 / 30.0).epsilon(1e-12));
  CHECK(report.recall.at(10) == doctest::Approx(11.0 / 30.0).epsilon(1e-12));
  CHECK(report.recall.at(50) == doctest::Approx(12.0 / 30.0).epsilon(1e-12));
}

TEST_CASE("missing predictions are an error that names the instances") {
  InstanceSet instances = fixture_instances();
  PredictionSet predictions = read_predictions_file(kDataDir + "/fixture_predictions.jsonl");
  PredictionSet partial;
  for (std::size_t i = 0; i + 1 < predictions.predictions.size(); ++i) {
    partial.add(predictions.predictions[i]);
  }
  Config config;
  try {
    score_all(instances, partial, config);
    FAIL("expected missing_prediction");
  } catch (const RedialError& e) {
    CHECK(e.code() == ErrorCode::missing_prediction);
    CHECK(std::string(e.what()).find("3010#3") != std::string::npos);
  }
}

TEST_CASE("an empty instance set never scores silently") {
  InstanceSet empty;
  PredictionSet predictions;
  Config config;
  CHECK_THROWS_AS(score_all(empty, predictions, config), RedialError);
}

TEST_CASE("two instances with recall 1 and 0 average to one half") {
  InstanceSet instances;
  instances.variant = Variant::standard;
  instances.instances.push_back(make_instance("a#1", {1}));
  instances.instances.push_back(make_instance("b#1", {2}));
  instances.has_meta = false;
  PredictionSet predictions;
  predictions.add({"a#1", {1}});
  predictions.add({"b#1", {9}});
  Config config;
  MetricReport report = score_all(instances, predictions, config, /*compute_rdl=*/false);
  CHECK(report.recall.at(1) == 0.5);
  CHECK_FALSE(report.has_rdl);
}

TEST_CASE("prediction files reject duplicates and negative ids") {
  {
    std::ofstream out("/tmp/redial_dup_inst.jsonl");
    out << R"({"instance_id":"a#1","ranking":[1,2]})" << "\n";
    out << R"({"instance_id":"a#1","ranking":[3]})" << "\n";
  }
  CHECK_THROWS_AS(read_predictions_file("/tmp/redial_dup_inst.jsonl"), RedialError);

  {
    std::ofstream out("/tmp/redial_dup_rank.jsonl");
    out << R"({"instance_id":"a#1","ranking":[1,2,1]})" << "\n";
  }
  CHECK_THROWS_AS(read_predictions_file("/tmp/redial_dup_rank.jsonl"), RedialError);

  {
    std::ofstream out("/tmp/redial_neg.jsonl");
    out << R"({"instance_id":"a#1","ranking":[1,-101]})" << "\n";
  }
  CHECK_THROWS_AS(read_predictions_file("/tmp/redial_neg.jsonl"), RedialError);
}

TEST_CASE("prediction files round-trip with fingerprints") {
  Config config;
  PredictionSet set;
  set.add({"a#1", {1, 2, 3}});
  set.add({"b#2", {4}});
  set.source_fingerprint = 0xabcd;
  set.source_variant = "standard";
  write_predictions_file(set, "/tmp/redial_preds.jsonl", config);
  PredictionSet back = read_predictions_file("/tmp/redial_preds.jsonl");
  REQUIRE(back.predictions.size() == 2);
  CHECK(back.predictions[0].ranking == std::vector<std::int64_t>{1, 2, 3});
  CHECK(back.fingerprint == config.fingerprint());
  CHECK(back.source_fingerprint == 0xabcd);
  CHECK(back.source_variant == "standard");
}

TEST_CASE("fingerprint mismatch is refused unless forced") {
  InstanceSet instances = fixture_instances();
  instances.fingerprint = 0x1111;
  PredictionSet predictions = read_predictions_file(kDataDir + "/fixture_predictions.jsonl");
  predictions.source_fingerprint = 0x2222;
  Config config;
  CHECK_THROWS_AS(score_all(instances, predictions, config), RedialError);
  predictions.source_fingerprint = 0;  // what --force does
  CHECK_NOTHROW(score_all(instances, predictions, config));
}

TEST_CASE("reports round-trip through JSON and merge into a table") {
  InstanceSet instances = fixture_instances();
  PredictionSet predictions = read_predictions_file(kDataDir + "/fixture_predictions.jsonl");
  Config config;
  MetricReport report = score_all(instances, predictions, config);
  report.name = "fixture";
  write_report_json(report, "/tmp/redial_report.json");
  MetricReport back = read_report_json("/tmp/redial_report.json");
  CHECK(back.name == "fixture");
  CHECK(back.recall.at(10) == doctest::Approx(report.recall.at(10)));
  CHECK(back.success_rate == doctest::Approx(report.success_rate));
  CHECK(back.rdl == doctest::Approx(report.rdl));
  CHECK(back.instance_count == 20);

  std::string csv = merge_reports_csv({back, back});
  CHECK(csv.find("R@10") != std::string::npos);
  CHECK(csv.find("fixture") != std::string::npos);
  std::string text = merge_reports_text({back});
  CHECK(text.find("fixture") != std::string::npos);
}

TEST_CASE("RDL ignores instance order inside a dialogue") {
  InstanceSet instances = fixture_instances();
  PredictionSet predictions = read_predictions_file(kDataDir + "/fixture_predictions.jsonl");
  Config config;
  MetricReport forward = score_all(instances, predictions, config);

  InstanceSet reversed = instances;
  std::reverse(reversed.instances.begin(), reversed.instances.end());
  MetricReport backward = score_all(reversed, predictions, config);
  CHECK(forward.rdl == doctest::Approx(backward.rdl).epsilon(1e-15));
  CHECK(forward.success_rate == doctest::Approx(backward.success_rate).epsilon(1e-15));
}

TEST_CASE("SR is monotone non-decreasing in the cutoff") {
  InstanceSet instances = fixture_instances();
  PredictionSet predictions = read_predictions_file(kDataDir + "/fixture_predictions.jsonl");
  double last = 0.0;
  for (int c = 1; c <= 12; ++c) {
    Config config;
    config.set("sr-cutoff", std::to_string(c));
    MetricReport report = score_all(instances, predictions, config);
    CHECK(report.success_rate >= last);
    last = report.success_rate;
  }
}

TEST_CASE("hits without a seeker form earn nothing and are tallied") {
  Corpus corpus = parse_corpus(kDataDir + "/fixture_scored.jsonl", Split::test);
  // strip all forms: every hit now has no form entry
  for (RawDialogue& d : corpus.dialogues) d.initiator_forms.clear();
  Config config;
  InstanceSet instances = build_standard(corpus, config);
  PredictionSet predictions = read_predictions_file(kDataDir + "/fixture_predictions.jsonl");
  MetricReport report = score_all(instances, predictions, config);
  CHECK(report.rdl == 0.0);
  CHECK(report.missing_form_hits == 6);  // six top-1 hits in the fixture
  CHECK(report.success_rate == doctest::Approx(0.5));  // SR is reward-agnostic
}
