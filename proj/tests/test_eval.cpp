#include <gtest/gtest.h>

#include <array>
#include <filesystem>
#include <random>

#include <unistd.h>

#include "mock_endpoint.hpp"
#include "sparc/eval.hpp"
#include "sparc/generator.hpp"

using namespace sparc;
namespace fs = std::filesystem;

namespace {

struct Corpus {
  std::vector<Puzzle> puzzles;
  std::vector<std::string> gold;  // "#### ..." answer per puzzle
};

const Corpus& corpus() {
  static const Corpus c = [] {
    GenConfig cfg;
    cfg.seed = 404;
    cfg.size_max = 3;
    cfg.difficulty.mu = 8;
    cfg.difficulty.sigma = 3;
    Corpus out;
    out.puzzles = generate_batch(cfg, 0, 20);
    for (std::size_t i = 0; i < out.puzzles.size(); ++i) {
      char id[8];
      std::snprintf(id, sizeof id, "p%02zu", i);
      out.puzzles[i].set_id(id);
      SolveConfig scfg;
      scfg.max_solutions = 1;
      out.gold.push_back("Reasoning goes here.\n#### " + format_path(solve(out.puzzles[i], scfg).solutions.at(0)));
    }
    return out;
  }();
  return c;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("sparc_eval_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

ModelEndpoint endpoint_for(const sparc::testing::MockEndpoint& mock) {
  ModelEndpoint ep;
  ep.base_url = mock.url();
  ep.model = "mock";
  ep.concurrency = 3;
  ep.backoff_base_s = 0.001;
  ep.timeout_s = 30;
  return ep;
}

GradeRecord record(bool solved, StructuralVerdict v = {}, bool extracted = true) {
  GradeRecord g;
  g.puzzle_id = "x";
  g.solved = solved;
  g.structural = v;
  if (extracted) g.path = Path{{0, 0}, {1, 0}};
  else g.extraction_error = ExtractionError::no_delimiter;
  return g;
}

PuzzleOutcome outcome(std::vector<GradeRecord> samples, int level = 1, std::optional<std::string> split = {}) {
  PuzzleOutcome o;
  o.puzzle_id = "x";
  o.level = level;
  o.split = std::move(split);
  o.graded = true;
  o.samples = std::move(samples);
  o.raw.resize(o.samples.size());
  return o;
}

}  // namespace

TEST(MockEval, GoldForEvenIdsGivesHalf) {
  const auto& c = corpus();
  sparc::testing::MockEndpoint mock(c.puzzles, [&](std::size_t i, int) { return i % 2 == 0 ? c.gold[i] : "no idea"; });
  EvalOptions opt;
  opt.out_dir = fresh_dir("half");
  const auto report = run_eval(c.puzzles, endpoint_for(mock), opt);

  EXPECT_EQ(report.accuracy, (Ratio{10, 20}));
  EXPECT_EQ(report.accuracy.value(), 0.5);
  EXPECT_FALSE(report.partial);
  EXPECT_EQ(report.extraction_failures, 10);
  std::array<Ratio, 5> expected{};
  for (std::size_t i = 0; i < c.puzzles.size(); ++i) {
    auto& r = expected[static_cast<std::size_t>(c.puzzles[i].difficulty->level - 1)];
    ++r.den;
    r.num += i % 2 == 0;
  }
  EXPECT_EQ(report.by_level, expected);
  EXPECT_TRUE(fs::exists(opt.out_dir / "records.jsonl"));
  EXPECT_TRUE(fs::exists(opt.out_dir / "report.json"));
  EXPECT_TRUE(fs::exists(opt.out_dir / "accuracy_by_level.csv"));
  EXPECT_EQ(report.prompt_tokens, 2000);
  fs::remove_all(opt.out_dir);
}

TEST(MockEval, RegradeIsBitIdentical) {
  const auto& c = corpus();
  sparc::testing::MockEndpoint mock(c.puzzles, [&](std::size_t i, int s) {
    return (i + static_cast<std::size_t>(s)) % 3 == 0 ? c.gold[i] : "#### (0,0),(0,1),(1,1)";
  });
  EvalOptions opt;
  opt.k = 4;
  opt.out_dir = fresh_dir("regrade");
  const auto report = run_eval(c.puzzles, endpoint_for(mock), opt);
  const auto stored = read_file((opt.out_dir / "records.jsonl").string());
  mock.stop();

  const auto again = regrade(c.puzzles, opt.out_dir);
  EXPECT_EQ(save_outcomes(again), stored);
  EXPECT_EQ(to_json(aggregate(again)).dump(), to_json(report).dump());
  EXPECT_EQ(read_file((opt.out_dir / "report.json").string()), to_json(report).dump(2) + "\n");
  fs::remove_all(opt.out_dir);
}

TEST(MockEval, PassAtKFromScriptedSamples) {
  const auto& c = corpus();
  // Sample s of puzzle i is right iff s == i % 5, so pass@k counts i % 5 < k.
  sparc::testing::MockEndpoint mock(c.puzzles, [&](std::size_t i, int s) {
    return static_cast<std::size_t>(s) == i % 5 ? c.gold[i] : "#### (0,0),(0,0)";
  });
  EvalOptions opt;
  opt.k = 8;
  opt.out_dir = fresh_dir("passk");
  const auto report = run_eval(c.puzzles, endpoint_for(mock), opt);
  EXPECT_EQ(report.samples_per_puzzle, 8);
  for (int k : kPassAtK) {
    std::int64_t want = 0;
    for (std::size_t i = 0; i < 20; ++i) want += static_cast<int>(i % 5) < k;
    EXPECT_EQ(report.pass_at.at(k), (Ratio{want, 20})) << k;
  }
  EXPECT_EQ(report.accuracy, (Ratio{4, 20}));
  fs::remove_all(opt.out_dir);
}

TEST(MockEval, FallsBackWhenNIsIgnored) {
  const auto& c = corpus();
  sparc::testing::MockEndpoint mock(c.puzzles, [&](std::size_t i, int) { return c.gold[i]; });
  mock.ignore_n(true);
  EvalOptions opt;
  opt.k = 3;
  opt.out_dir = fresh_dir("ignore_n");
  const std::vector<Puzzle> two(c.puzzles.begin(), c.puzzles.begin() + 2);
  const auto report = run_eval(two, endpoint_for(mock), opt);
  EXPECT_EQ(report.samples_per_puzzle, 3);
  EXPECT_EQ(report.pass_at.at(2), (Ratio{2, 2}));
  fs::remove_all(opt.out_dir);
}

TEST(MockEval, RetriesTransientErrors) {
  const auto& c = corpus();
  sparc::testing::MockEndpoint mock(c.puzzles, [&](std::size_t i, int) { return c.gold[i]; });
  mock.fail_next(429, 2);
  auto ep = endpoint_for(mock);
  ep.concurrency = 1;
  EvalOptions opt;
  opt.out_dir = fresh_dir("retry");
  const std::vector<Puzzle> one(c.puzzles.begin(), c.puzzles.begin() + 1);
  auto report = run_eval(one, ep, opt);
  EXPECT_EQ(report.accuracy, (Ratio{1, 1}));
  EXPECT_EQ(mock.requests(), 3);

  mock.fail_next(503, 10);
  ep.max_retries = 2;
  report = run_eval(one, ep, opt);
  EXPECT_TRUE(report.partial);
  EXPECT_EQ(report.ungraded, 1u);
  EXPECT_EQ(report.accuracy.den, 0);
  fs::remove_all(opt.out_dir);
}

TEST(MockEval, ClientErrorsAreNotRetried) {
  const auto& c = corpus();
  sparc::testing::MockEndpoint mock(c.puzzles, [&](std::size_t i, int) { return c.gold[i]; });
  mock.fail_next(400, 1);
  auto ep = endpoint_for(mock);
  ep.concurrency = 1;
  EvalOptions opt;
  opt.out_dir = fresh_dir("badreq");
  const std::vector<Puzzle> two(c.puzzles.begin(), c.puzzles.begin() + 2);
  const auto report = run_eval(two, ep, opt);
  EXPECT_EQ(report.ungraded, 1u);
  EXPECT_EQ(report.accuracy, (Ratio{1, 1}));
  EXPECT_EQ(mock.requests(), 2);
  const auto records = load_outcomes(read_file((opt.out_dir / "records.jsonl").string()));
  ASSERT_EQ(records.size(), 2u);
  EXPECT_FALSE(records[0].graded);
  EXPECT_FALSE(records[0].error.empty());
  fs::remove_all(opt.out_dir);
}

TEST(MockEval, UnreachableEndpoint) {
  int port;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  ModelEndpoint ep;
  ep.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  EvalOptions opt;
  opt.out_dir = fresh_dir("down");
  EXPECT_THROW(run_eval(corpus().puzzles, ep, opt), EndpointUnreachable);
  fs::remove_all(opt.out_dir);
}

TEST(MockEval, RejectsBadOptions) {
  ModelEndpoint ep;
  ep.base_url = "http://127.0.0.1:1/v1";
  EvalOptions opt;
  opt.k = 0;
  EXPECT_THROW(run_eval(corpus().puzzles, ep, opt), Error);
  opt.k = 1;
  EXPECT_THROW(run_eval({}, ep, opt), Error);
  ep.base_url = "localhost:8000";
  EXPECT_THROW(run_eval(corpus().puzzles, ep, opt), Error);
}

TEST(Aggregate, AccuracyReplay) {
  std::vector<PuzzleOutcome> outs;
  for (int i = 0; i < 500; ++i) outs.push_back(outcome({record(i < 79)}, 1 + i % 5));
  const auto r = aggregate(outs);
  EXPECT_EQ(r.accuracy, (Ratio{79, 500}));
  EXPECT_EQ(r.accuracy.exact(), "79/500");
  EXPECT_DOUBLE_EQ(r.accuracy.value() * 100, 15.8);
  const auto j = to_json(r);
  EXPECT_DOUBLE_EQ(j["accuracy"]["rate"].get<double>(), 0.158);
}

TEST(Aggregate, ViolationRatesAreExact) {
  const auto se = [] {
    StructuralVerdict v;
    v.incorrect_start_end = v.invalid_path = true;
    return v;
  }();
  auto both = se;
  both.rule_cell_crossing = true;
  StructuralVerdict cross;
  cross.rule_cell_crossing = cross.invalid_path = true;
  StructuralVerdict none_extracted;
  none_extracted.invalid_path = true;

  std::vector<PuzzleOutcome> outs;
  outs.push_back(outcome({record(false, se), record(false, both), record(true)}));
  outs.push_back(outcome({record(false, cross), record(false, none_extracted, false), record(false)}));
  outs.push_back(outcome({record(true), record(true), record(false, cross)}));
  const auto r = aggregate(outs);
  // 9 generations: invalid 5, start/end 2, crossing 3, the rest 0.
  EXPECT_EQ(r.violations[0], (Ratio{5, 9}));
  EXPECT_EQ(r.violations[1], (Ratio{2, 9}));
  EXPECT_EQ(r.violations[2], (Ratio{0, 9}));
  EXPECT_EQ(r.violations[3], (Ratio{0, 9}));
  EXPECT_EQ(r.violations[4], (Ratio{3, 9}));
  EXPECT_EQ(r.violations[4].exact(), "1/3");
  EXPECT_EQ(r.extraction_failures, 1);
  const auto csv = violations_csv(r);
  EXPECT_NE(csv.find("rule_cell_crossing,3,9,0.333333,1/3\n"), std::string::npos);
}

TEST(Aggregate, PassAtKMonotoneOnFuzz) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const int samples = 1 + static_cast<int>(rng() % 8);
    const double p = std::uniform_real_distribution<double>(0, 1)(rng);
    std::vector<PuzzleOutcome> outs;
    for (int i = 0; i < n; ++i) {
      std::vector<GradeRecord> recs;
      for (int s = 0; s < samples; ++s) recs.push_back(record(std::uniform_real_distribution<double>(0, 1)(rng) < p));
      outs.push_back(outcome(std::move(recs), 1 + static_cast<int>(rng() % 5)));
    }
    const auto r = aggregate(outs);
    double prev = -1;
    for (const auto& [k, ratio] : r.pass_at) {
      ASSERT_LE(k, samples);
      ASSERT_GE(ratio.value(), prev);
      ASSERT_GE(ratio.value(), 0.0);
      ASSERT_LE(ratio.value(), 1.0);
      prev = ratio.value();
    }
    ASSERT_EQ(r.pass_at.at(1), r.accuracy);
  }
}

TEST(Aggregate, SplitDeltas) {
  std::vector<PuzzleOutcome> outs;
  for (int i = 0; i < 10; ++i) outs.push_back(outcome({record(i < 4)}));
  for (int i = 0; i < 4; ++i) outs.push_back(outcome({record(i < 3)}, 1, "G"));
  const auto r = aggregate(outs);
  EXPECT_EQ(r.full_set, (Ratio{4, 10}));
  EXPECT_EQ(r.by_split.at("G"), (Ratio{3, 4}));
  const auto j = to_json(r);
  EXPECT_DOUBLE_EQ(j["accuracy_by_split"]["G"]["delta"].get<double>(), 0.75 - 0.4);

  std::vector<PuzzleOutcome> tagged;
  for (int i = 0; i < 4; ++i) tagged.push_back(outcome({record(i < 1)}, 1, "A"));
  for (int i = 0; i < 4; ++i) tagged.push_back(outcome({record(i < 3)}, 1, "B"));
  EXPECT_EQ(aggregate(tagged).full_set, (Ratio{4, 8}));
}

TEST(Aggregate, UngradedAreExcluded) {
  std::vector<PuzzleOutcome> outs{outcome({record(true)}), outcome({record(false)})};
  PuzzleOutcome failed;
  failed.puzzle_id = "f";
  failed.error = "HTTP 500";
  outs.push_back(failed);
  const auto r = aggregate(outs);
  EXPECT_EQ(r.puzzles, 3u);
  EXPECT_EQ(r.graded, 2u);
  EXPECT_TRUE(r.partial);
  EXPECT_EQ(r.accuracy, (Ratio{1, 2}));
}

TEST(Records, RoundTrip) {
  auto o = outcome({record(true), record(false, {}, false)}, 3, "St-S");
  o.raw[0] = {"0123456789abcdef", 5, 7};
  const auto back = load_outcomes(save_outcomes(std::vector<PuzzleOutcome>{o}));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(save_outcomes(back), save_outcomes(std::vector<PuzzleOutcome>{o}));
  EXPECT_THROW(load_outcomes("{\"puzzle_id\": 3}\n"), Error);
  EXPECT_THROW(load_outcomes("not json\n"), Error);
}

TEST(Records, ContentKeys) {
  EXPECT_EQ(content_key(""), "cbf29ce484222325");
  EXPECT_EQ(content_key("a"), "af63dc4c8601ec8c");
  EXPECT_NE(content_key("abc"), content_key("abd"));
}

TEST(Report, LevelCsv) {
  std::vector<PuzzleOutcome> outs{outcome({record(true)}, 2), outcome({record(false)}, 2)};
  const auto csv = accuracy_by_level_csv(aggregate(outs));
  EXPECT_EQ(csv,
            "level,puzzles,solved,accuracy\n1,0,0,0.000000\n2,2,1,0.500000\n3,0,0,0.000000\n4,0,0,0.000000\n"
            "5,0,0,0.000000\nall,2,1,0.500000\n");
}
