#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lapiths/errors.hpp"
#include "lapiths/stats.hpp"
#include "oracles.hpp"

using namespace lapiths;
using namespace lapiths::stats;
using agents::DecisionLog;
using twostep::TransitionType;

namespace {

DecisionLog log_with_probs(const std::vector<double>& probs) {
  DecisionLog log;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const int trial = static_cast<int>(i / 2) + 1;
    const int stage = static_cast<int>(i % 2) + 1;
    log.push_back({trial, stage, stage == 1 ? "S" : "D", probs[i], 0,
                   TransitionType::kCommon});
  }
  return log;
}

}  // namespace

TEST_CASE("nll summaries") {
  SUBCASE("perfect prediction") {
    const auto summary = nll(log_with_probs({1.0, 1.0, 1.0}));
    CHECK(summary.total_nll == 0.0);
    CHECK(summary.mean_nll == 0.0);
    CHECK(summary.n_decisions == 3);
  }
  SUBCASE("closed form for coin flips") {
    const auto summary = nll(log_with_probs({0.5, 0.5}));
    CHECK(summary.total_nll == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
    CHECK(summary.mean_nll == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  }
  SUBCASE("total equals mean times count") {
    const auto summary = nll(log_with_probs({0.3, 0.9, 0.4, 0.8, 0.6}));
    CHECK(summary.total_nll ==
          doctest::Approx(summary.mean_nll * summary.n_decisions).epsilon(1e-12));
  }
  SUBCASE("validation errors identify the decision") {
    auto log = log_with_probs({0.5, 0.5});
    log[1].prob_assigned = 1.2;
    CHECK_THROWS_WITH_AS(nll(log), doctest::Contains("decision 2"), ValidationError);
    log[1].prob_assigned = std::nullopt;
    CHECK_THROWS_WITH_AS(nll(log), doctest::Contains("decision 2"), ValidationError);
    CHECK_THROWS_AS(nll(DecisionLog{}), ValidationError);
  }
  SUBCASE("clamping keeps zeros finite and is monotone") {
    const auto summary = nll(log_with_probs({0.0, 0.5}));
    CHECK(summary.total_nll ==
          doctest::Approx(-std::log(1e-12) + std::log(2.0)).epsilon(1e-12));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      std::vector<double> probs;
      for (int k = 0; k < 10; ++k) probs.push_back(unit(rng) < 0.2 ? 0.0 : unit(rng));
      const auto log = log_with_probs(probs);
      CHECK(nll(log, 1e-9).total_nll <= nll(log, 1e-12).total_nll + 1e-12);
    }
  }
  SUBCASE("additive over concatenation") {
    const std::vector<double> a{0.2, 0.9, 0.7};
    const std::vector<double> b{0.4, 0.6};
    auto all = a;
    all.insert(all.end(), b.begin(), b.end());
    CHECK(nll_of_probabilities(all).total_nll ==
          doctest::Approx(nll_of_probabilities(a).total_nll +
                          nll_of_probabilities(b).total_nll)
              .epsilon(1e-12));
  }
}

TEST_CASE("normal quantile and CI inversion") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(normal_quantile(0.0), ValidationError);

  CHECK(sd_from_ci(0.0, 300) == 0.0);
  CHECK(sd_from_ci(0.0113, 300) == doctest::Approx(0.0999).epsilon(1e-3));
  // Forward recomputation closes the loop.
  CHECK(ci_from_sd(sd_from_ci(0.0113, 300), 300) == doctest::Approx(0.0113).epsilon(1e-12));
  CHECK_THROWS_AS(sd_from_ci(0.01, 1), ValidationError);

  SUBCASE("round trip identity") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> sd_dist(0.0, 5.0);
    for (int i = 0; i < 100; ++i) {
      const double sd = sd_dist(rng);
      CHECK(sd_from_ci(ci_from_sd(sd, 300), 300) == doctest::Approx(sd).epsilon(1e-9));
    }
  }
}

TEST_CASE("t distribution") {
  SUBCASE("midpoint and symmetry") {
    for (double df : {1.0, 2.0, 10.0, 100.0, 1000.0}) {
      CHECK(t_cdf(0.0, df) == 0.5);
      for (double x : {0.3, 1.7, 4.2}) {
        CHECK(t_cdf(-x, df) == doctest::Approx(1.0 - t_cdf(x, df)).epsilon(1e-14));
      }
    }
  }
  SUBCASE("Cauchy closed form") {
    CHECK(t_cdf(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(t_cdf(-1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("normal limit") {
    CHECK(t_cdf(1.96, 10000.0) == doctest::Approx(0.975).epsilon(1e-3));
  }
  SUBCASE("quadrature oracle agreement to 1e-10") {
    for (double df : {1.0, 2.0, 10.0, 100.0, 1000.0}) {
      for (double x : {0.25, 0.5, 1.0, 2.0, 5.0}) {
        CHECK(std::abs(t_cdf(x, df) - oracle::t_cdf(x, df)) < 1e-10);
      }
    }
  }
  SUBCASE("limits and validation") {
    CHECK(t_cdf(std::numeric_limits<double>::infinity(), 5.0) == 1.0);
    CHECK(t_cdf(-std::numeric_limits<double>::infinity(), 5.0) == 0.0);
    CHECK_THROWS_AS(t_cdf(0.0, 0.0), ValidationError);
  }
}

TEST_CASE("welch test") {
  SUBCASE("identical samples") {
    const std::vector<double> sample{0.2, 0.4, 0.6, 0.8};
    const auto result = welch(sample, sample);
    CHECK(result.t_statistic == 0.0);
    CHECK(result.p_value == 1.0);
    CHECK_FALSE(result.degenerate);
  }
  SUBCASE("zero variance, equal means") {
    const std::vector<double> a{0.5, 0.5, 0.5};
    const auto result = welch(a, a);
    CHECK(result.p_value == 1.0);
  }
  SUBCASE("zero variance, unequal means is degenerate") {
    const std::vector<double> a{0.5, 0.5, 0.5};
    const std::vector<double> b{0.7, 0.7, 0.7};
    const auto result = welch(a, b);
    CHECK(result.degenerate);
    CHECK(result.p_value == 0.0);
    CHECK(std::signbit(result.t_statistic));
  }
  SUBCASE("swapping the samples negates t and keeps p") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> na(0.0, 1.0), nb(0.5, 2.0);
    std::vector<double> a, b;
    for (int i = 0; i < 50; ++i) a.push_back(na(rng));
    for (int i = 0; i < 80; ++i) b.push_back(nb(rng));
    const auto ab = welch(a, b);
    const auto ba = welch(b, a);
    CHECK(ab.t_statistic == doctest::Approx(-ba.t_statistic).epsilon(1e-14));
    CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-14));
    CHECK(ab.df == doctest::Approx(ba.df).epsilon(1e-14));
    // sign(t) matches sign of the mean difference
    CHECK((ab.mean_delta < 0) == (ab.t_statistic < 0));
  }
  SUBCASE("p agrees with the quadrature oracle on seeded normals") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> na(0.5, 1.0), nb(0.0, 1.0);
    std::vector<double> a, b;
    for (int i = 0; i < 300; ++i) {
      a.push_back(na(rng));
      b.push_back(nb(rng));
    }
    const auto result = welch(a, b);
    const double p_oracle =
        2.0 * (1.0 - oracle::t_cdf(std::abs(result.t_statistic), result.df));
    CHECK(std::abs(result.p_value - p_oracle) < 1e-6);
  }
  SUBCASE("baseline spec path equals inverted-CI moments") {
    std::vector<double> sample;
    std::mt19937_64 rng(13);
    std::normal_distribution<double> dist(0.55, 0.1);
    for (int i = 0; i < 300; ++i) sample.push_back(dist(rng));
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= sample.size();
    double ss = 0.0;
    for (double v : sample) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (sample.size() - 1));

    BaselineSpec baseline{"Centaur", 0.51, 0.0113, 300};
    const auto via_spec = welch(sample, baseline);
    const auto direct =
        welch_from_moments(mean, sd, 300, 0.51, sd_from_ci(0.0113, 300), 300);
    CHECK(via_spec.t_statistic == doctest::Approx(direct.t_statistic).epsilon(1e-12));
    CHECK(via_spec.df == doctest::Approx(direct.df).epsilon(1e-12));
    CHECK(via_spec.p_value == doctest::Approx(direct.p_value).epsilon(1e-12));
  }
  SUBCASE("constant sample against its own summary is a perfect match") {
    const std::vector<double> sample(300, std::log(2.0));
    const auto summary = summarize_nll_terms(sample);
    CHECK(summary.mean_nll == std::log(2.0));
    BaselineSpec self{"self", summary.mean_nll, summary.ci95_halfwidth,
                      summary.n_decisions};
    const auto result = welch(sample, self);
    CHECK(result.mean_delta == 0.0);
    CHECK(result.p_value == 1.0);
    CHECK_FALSE(result.degenerate);
  }
  SUBCASE("sample size validation") {
    CHECK_THROWS_AS(welch(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
                    ValidationError);
    BaselineSpec bad{"b", 0.5, 0.01, 1};
    CHECK_THROWS_AS(welch(std::vector<double>{1.0, 2.0}, bad), ValidationError);
  }
}

TEST_CASE("compare_all") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist(0.55, 0.1);
  std::vector<std::pair<std::string, std::vector<double>>> samples;
  for (int m = 0; m < 5; ++m) {
    std::vector<double> sample;
    for (int i = 0; i < 100; ++i) sample.push_back(dist(rng));
    samples.emplace_back("model" + std::to_string(m), std::move(sample));
  }
  const std::vector<BaselineSpec> baselines{
      {"Centaur", 0.51, 0.0113, 300},
      {"Llama 3.1", 0.63, 0.012, 300},
      {"Cognitive Model", 0.61, 0.0115, 300},
  };

  SUBCASE("five by three gives fifteen ordered rows") {
    const auto rows = compare_all(samples, baselines);
    REQUIRE(rows.size() == 15);
    CHECK(rows[0].model == "model0");
    CHECK(rows[0].baseline == "Centaur");
    CHECK(rows[2].baseline == "Cognitive Model");
    CHECK(rows[14].model == "model4");
  }
  SUBCASE("translation equivariance of the deltas") {
    const auto rows = compare_all(samples, baselines);
    auto shifted = samples;
    for (auto& [name, sample] : shifted) {
      for (double& v : sample) v += 0.25;
    }
    const auto shifted_rows = compare_all(shifted, baselines);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(shifted_rows[i].mean_delta ==
            doctest::Approx(rows[i].mean_delta + 0.25).epsilon(1e-9));
    }
  }
  SUBCASE("a model against its own moments gives delta zero, p one") {
    const auto& sample = samples[0].second;
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= sample.size();
    double ss = 0.0;
    for (double v : sample) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (sample.size() - 1));
    BaselineSpec self{"self", mean, ci_from_sd(sd, static_cast<int>(sample.size())),
                      static_cast<int>(sample.size())};
    const auto result = welch(sample, self);
    CHECK(result.mean_delta == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(result.p_value == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("duplicate names rejected") {
    auto dup = samples;
    dup[1].first = dup[0].first;
    CHECK_THROWS_AS(compare_all(dup, baselines), ValidationError);
  }
}
