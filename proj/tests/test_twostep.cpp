#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lapiths/errors.hpp"
#include "lapiths/twostep.hpp"
#include "oracles.hpp"

using namespace lapiths;
using namespace lapiths::twostep;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("session config validation") {
  SessionConfig config;
  CHECK_NOTHROW(config.validate());

  config.n_trials = 0;
  CHECK_THROWS_AS(config.validate(), ValidationError);
  config.n_trials = 150;

  config.common_prob = 0.5;
  CHECK_THROWS_AS(config.validate(), ValidationError);
  config.common_prob = 1.0;
  CHECK_THROWS_AS(config.validate(), ValidationError);
  config.common_prob = 0.7;

  config.drift_lower = 0.8;
  CHECK_THROWS_AS(config.validate(), ValidationError);
  config.drift_lower = 0.25;

  config.drift_sigma = -0.1;
  CHECK_THROWS_AS(config.validate(), ValidationError);
}

TEST_CASE("session determinism and initialization") {
  SessionConfig config;
  config.seed = 42;

  Session a(config), b(config);
  CHECK(a.latent_probs() == b.latent_probs());
  for (double p : a.latent_probs()) {
    CHECK(p >= config.drift_lower);
    CHECK(p <= config.drift_upper);
  }
  CHECK(a.next_trial_index() == 1);

  const auto schemes_a = a.generate_all();
  const auto schemes_b = b.generate_all();
  CHECK(schemes_a == schemes_b);
  CHECK(schemes_to_json(schemes_a) == schemes_to_json(schemes_b));
}

TEST_CASE("frozen walk keeps probabilities constant") {
  SessionConfig config;
  config.seed = 7;
  config.drift_sigma = 0.0;
  config.n_trials = 50;
  const auto schemes = generate_schemes(config);
  const auto& first = schemes.front().probs;
  for (const auto& scheme : schemes) CHECK(scheme.probs == first);
}

TEST_CASE("drifted probabilities stay within bounds") {
  SessionConfig config;
  config.seed = 99;
  config.n_trials = 10000;
  for (const auto& scheme : generate_schemes(config)) {
    for (const auto& [state, actions] : scheme.probs) {
      for (const auto& [action, p] : actions) {
        CHECK(p >= config.drift_lower);
        CHECK(p <= config.drift_upper);
      }
    }
  }
}

TEST_CASE("transition sampling") {
  const auto schemes =
      load_schemes(std::string(LAPITHS_FIXTURE_DIR) + "/example_trial.json");
  const auto& scheme = schemes.front();
  std::mt19937_64 rng(1);

  SUBCASE("degenerate probability always commits the stored destination") {
    for (int i = 0; i < 100; ++i) {
      const auto [state, type] = sample_transition("S", scheme, 1.0, rng);
      CHECK(state == "blue");
      CHECK(type == TransitionType::kCommon);
    }
  }
  SUBCASE("unknown action rejected") {
    CHECK_THROWS_AS(sample_transition("Q", scheme, 0.7, rng), ValidationError);
    CHECK_THROWS_AS(stored_transition("Q", scheme), ValidationError);
  }
  SUBCASE("empirical frequency tracks common_prob") {
    int common = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      if (sample_transition("S", scheme, 0.7, rng).second == TransitionType::kCommon) ++common;
    }
    const double freq = static_cast<double>(common) / n;
    CHECK(std::abs(freq - 0.7) < 4.0 * std::sqrt(0.7 * 0.3 / n));
  }
  SUBCASE("stored transition honors the file verbatim") {
    const auto [state, type] = stored_transition("S", scheme);
    CHECK(state == "blue");
    CHECK(type == TransitionType::kCommon);
    const auto [state_c, type_c] = stored_transition("C", scheme);
    CHECK(state_c == "red");
    CHECK(type_c == TransitionType::kCommon);

    auto rare = scheme;
    rare.is_common = false;
    rare.planet_if_s = "red";
    rare.planet_if_c = "blue";
    const auto [state_r, type_r] = stored_transition("S", rare);
    CHECK(state_r == "red");
    CHECK(type_r == TransitionType::kRare);
  }
}

TEST_CASE("outcome lookup") {
  const auto schemes =
      load_schemes(std::string(LAPITHS_FIXTURE_DIR) + "/example_trial.json");
  const auto& scheme = schemes.front();
  CHECK(outcome("blue", "D", scheme) == 1);
  CHECK(outcome("blue", "R", scheme) == 0);
  CHECK(outcome("red", "V", scheme) == 1);
  CHECK_THROWS_AS(outcome("green", "D", scheme), ValidationError);
  CHECK_THROWS_AS(outcome("blue", "G", scheme), ValidationError);

  auto zeros = scheme;
  for (auto& [state, actions] : zeros.outcome) {
    for (auto& [action, value] : actions) value = 0;
  }
  CHECK(outcome("blue", "D", zeros) == 0);
  CHECK(outcome("red", "G", zeros) == 0);
}

TEST_CASE("drift behaviour") {
  std::mt19937_64 rng(5);
  const std::array<double, 4> probs{0.3, 0.5, 0.6, 0.7};

  SUBCASE("sigma zero is the identity") {
    CHECK(drift(probs, 0.0, {0.25, 0.75}, rng) == probs);
  }
  SUBCASE("single-step displacement has zero mean") {
    const double sigma = 0.01;
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto next = drift({0.5, 0.5, 0.5, 0.5}, sigma, {0.25, 0.75}, rng);
      sum += next[0] - 0.5;
    }
    CHECK(std::abs(sum / n) < 3.0 * sigma / std::sqrt(static_cast<double>(n)));
  }
  SUBCASE("reflection keeps large steps inside the bounds") {
    std::array<double, 4> state{0.26, 0.74, 0.5, 0.3};
    for (int i = 0; i < 10000; ++i) {
      state = drift(state, 0.5, {0.25, 0.75}, rng);
      for (double p : state) {
        CHECK(p >= 0.25);
        CHECK(p <= 0.75);
      }
    }
  }
  SUBCASE("long-run marginal is approximately uniform") {
    std::mt19937_64 walk_rng(12345);
    std::array<double, 4> state{0.5, 0.5, 0.5, 0.5};
    std::vector<double> samples;
    samples.reserve(100000);
    for (int i = 0; i < 100000; ++i) {
      state = drift(state, 0.025, {0.25, 0.75}, walk_rng);
      samples.push_back(state[0]);
    }
    CHECK(oracle::ks_uniform(samples, 0.25, 0.75) < 0.05);
  }
}

TEST_CASE("scheme generation") {
  SessionConfig config;
  config.seed = 2024;
  const auto schemes = generate_schemes(config);
  REQUIRE(schemes.size() == 150);
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    CHECK(schemes[i].trial == static_cast<int>(i + 1));
    CHECK_NOTHROW(schemes[i].validate());
  }

  SUBCASE("outcomes track the latent probabilities") {
    SessionConfig frozen;
    frozen.seed = 31;
    frozen.drift_sigma = 0.0;
    frozen.n_trials = 10000;
    const auto fixed = generate_schemes(frozen);
    const double latent = fixed.front().probs.at("blue").at("D");
    int rewards = 0;
    for (const auto& scheme : fixed) rewards += scheme.outcome.at("blue").at("D");
    CHECK(std::abs(static_cast<double>(rewards) / frozen.n_trials - latent) < 0.03);
  }
  SUBCASE("is_common frequency tracks common_prob") {
    SessionConfig cfg;
    cfg.seed = 8;
    cfg.n_trials = 20000;
    const auto generated = generate_schemes(cfg);
    int common = 0;
    for (const auto& scheme : generated) common += scheme.is_common ? 1 : 0;
    CHECK(std::abs(static_cast<double>(common) / cfg.n_trials - 0.7) < 0.02);
  }
}

TEST_CASE("scheme file round trips") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "lapiths_twostep_test";
  fs::create_directories(dir);

  SUBCASE("appendix example trial parses exactly") {
    const auto schemes =
        load_schemes(std::string(LAPITHS_FIXTURE_DIR) + "/example_trial.json");
    REQUIRE(schemes.size() == 1);
    const auto& scheme = schemes.front();
    CHECK(scheme.trial == 151);
    CHECK(scheme.is_common);
    CHECK(scheme.planet_if_s == "blue");
    CHECK(scheme.probs.at("blue").at("D") == 0.4489799022035289);
    CHECK(scheme.probs.at("red").at("V") == 0.2537031288179288);
  }
  SUBCASE("save then load is the identity, byte for byte") {
    SessionConfig config;
    config.seed = 5;
    config.n_trials = 25;
    const auto schemes = generate_schemes(config);
    const auto path = dir / "schemes.json";
    save_schemes(schemes, path);
    const auto loaded = load_schemes(path);
    CHECK(loaded == schemes);
    const auto again = dir / "schemes2.json";
    save_schemes(loaded, again);
    CHECK(slurp(path) == slurp(again));
  }
  SUBCASE("out-of-range probability names trial and field") {
    const std::string bad = R"([{
      "is_common": true, "planet_if_S": "blue", "planet_if_C": "red",
      "outcome": {"blue": {"D": 1, "R": 0}, "red": {"G": 1, "V": 1}},
      "probs": {"blue": {"D": 1.7, "R": 0.5}, "red": {"G": 0.5, "V": 0.5}},
      "trial": 151
    }])";
    CHECK_THROWS_WITH_AS(schemes_from_json(bad), doctest::Contains("trial 151"), ParseError);
    CHECK_THROWS_WITH_AS(schemes_from_json(bad), doctest::Contains("probs.blue.D"), ParseError);
  }
  SUBCASE("missing key is a parse error") {
    const std::string missing = R"([{
      "is_common": true, "planet_if_S": "blue", "planet_if_C": "red",
      "outcome": {"blue": {"D": 1, "R": 0}, "red": {"G": 1, "V": 1}},
      "trial": 3
    }])";
    CHECK_THROWS_AS(schemes_from_json(missing), ParseError);
  }
  SUBCASE("missing file is an I/O error") {
    CHECK_THROWS_AS(load_schemes(dir / "absent.json"), IoError);
  }
}

TEST_CASE("trial record round trip") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "lapiths_twostep_test";
  fs::create_directories(dir);
  const std::vector<TrialRecord> records = {
      {1, "S", TransitionType::kCommon, "blue", "D", 1},
      {2, "C", TransitionType::kRare, "blue", "R", 0},
  };
  const auto path = dir / "records.jsonl";
  save_trial_records(records, path);
  CHECK(load_trial_records(path) == records);
}

TEST_CASE("label mapping preserves structure") {
  SessionConfig config;
  config.seed = 77;
  config.n_trials = 20;
  const auto schemes = generate_schemes(config);

  // Magic-carpet style relabeling of every state and action.
  LabelMap map;
  map.mapping = {{"S", "north"}, {"C", "south"},   {"blue", "forest"}, {"red", "desert"},
                 {"D", "palm"},  {"R", "well"},    {"G", "dune"},      {"V", "oasis"}};
  const Labels mapped_labels = map.apply(Labels{});
  CHECK(mapped_labels.stage1[0] == "north");
  CHECK(mapped_labels.states[1] == "desert");

  const Labels labels;
  const auto mapped = map.apply(schemes);
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    CHECK_NOTHROW(mapped[i].validate(mapped_labels));
    // Transitions and outcomes are isomorphic under the relabeling.
    const auto [orig_state, orig_type] = stored_transition("S", schemes[i]);
    const auto [new_state, new_type] = stored_transition("north", mapped[i], mapped_labels);
    CHECK(map.apply(orig_state) == new_state);
    CHECK(orig_type == new_type);
    const std::string action = labels.stage2[labels.state_index(orig_state)][0];
    CHECK(outcome(orig_state, action, schemes[i]) ==
          outcome(new_state, map.apply(action), mapped[i]));
  }

  CHECK(map.inverted().apply(mapped) == schemes);
}
