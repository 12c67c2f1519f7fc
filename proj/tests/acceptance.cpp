// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria are pinned here, including tolerances and
// runtime budgets.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lapiths/agents.hpp"
#include "lapiths/errors.hpp"
#include "lapiths/manifest.hpp"
#include "lapiths/mcg.hpp"
#include "lapiths/report.hpp"
#include "lapiths/roi.hpp"
#include "lapiths/stats.hpp"
#include "lapiths/twostep.hpp"
#include "lapiths/version.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace lapiths;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;
std::vector<std::string> current_problems;

void expect(bool ok, const std::string& what) {
  if (!ok) current_problems.push_back(what);
}

void expect_near(double actual, double expected, double tol, const std::string& what) {
  if (!(std::abs(actual - expected) <= tol)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << what << ": got " << actual << ", want " << expected << " +/- " << tol;
    current_problems.push_back(msg.str());
  }
}

template <typename F>
void criterion(const std::string& name, double budget_seconds, F&& body) {
  current_problems.clear();
  const auto start = Clock::now();
  try {
    body();
  } catch (const std::exception& e) {
    current_problems.push_back(std::string("exception: ") + e.what());
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  if (elapsed > budget_seconds) {
    std::ostringstream msg;
    msg << "runtime " << elapsed << "s exceeds budget " << budget_seconds << "s";
    current_problems.push_back(msg.str());
  }
  if (current_problems.empty()) {
    std::printf("[PASS] %s (%.2fs)\n", name.c_str(), elapsed);
  } else {
    ++failures;
    std::printf("[FAIL] %s (%.2fs)\n", name.c_str(), elapsed);
    for (const auto& problem : current_problems) {
      std::printf("       - %s\n", problem.c_str());
    }
  }
  std::fflush(stdout);
}

std::string fixture(const std::string& name) {
  return std::string(LAPITHS_FIXTURE_DIR) + "/" + name;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "lapiths_acceptance";
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------

void mcg_golden_reproduction() {
  const auto bundle = mcg::load_bundle(fixture("centaur_bundle.json"));
  const auto scores = mcg::score_bundle(bundle);

  expect_near(scores.fsr.normalized, 0.1749, 5e-3, "internal FSR'");
  expect_near(scores.generality, 0.375, 5e-3, "internal G");
  expect_near(scores.performance.performance_match, 0.8334, 5e-3, "internal PM");
  expect_near(scores.plausibility.score, 0.3896, 5e-3, "internal P");

  const auto tables = report::mcg_tables(report::make_mcg_report(bundle));
  const auto& weight_row = tables[0].rows[0];
  const std::size_t k = bundle.constraints.entries.size();
  struct Cell {
    std::string actual;
    const char* expected;
    const char* what;
  };
  const std::vector<Cell> cells = {
      {weight_row[k + 1], "0.17", "S_M"},
      {weight_row[k + 2], "0.83", "F_M"},
      {weight_row[k + 3], "4.72", "F/S + eps"},
      {weight_row[k + 4], "0.18", "FSR_M"},
      {tables[1].rows[0].back(), "0.37", "G_M"},
      {tables[2].rows[0][4], "0.67", "A_M"},
      {tables[2].rows[0][5], "1.00", "E_M"},
      {tables[2].rows[0][7], "0.83", "PM_M"},
      {tables[3].rows[0].back(), "0.39", "P_M"},
  };
  for (const auto& cell : cells) {
    expect(cell.actual == cell.expected,
           std::string(cell.what) + ": displayed '" + cell.actual + "', want '" +
               cell.expected + "'");
  }
}

void simulator_statistics() {
  // Transition frequency over 100,000 draws at common_prob 0.7.
  const auto schemes = twostep::load_schemes(fixture("example_trial.json"));
  std::mt19937_64 rng(101);
  const int n = 100000;
  int common = 0;
  for (int i = 0; i < n; ++i) {
    if (twostep::sample_transition("S", schemes.front(), 0.7, rng).second ==
        twostep::TransitionType::kCommon) {
      ++common;
    }
  }
  expect_near(static_cast<double>(common) / n, 0.7, 0.01, "empirical common frequency");

  // sigma = 0 drift is the identity.
  const std::array<double, 4> probs{0.3, 0.45, 0.6, 0.72};
  expect(twostep::drift(probs, 0.0, {0.25, 0.75}, rng) == probs, "sigma-0 drift identity");

  // Reflection keeps every drifted probability inside the bounds.
  std::array<double, 4> state{0.26, 0.74, 0.5, 0.33};
  bool in_bounds = true;
  for (int i = 0; i < 100000; ++i) {
    state = twostep::drift(state, 0.025, {0.25, 0.75}, rng);
    for (double p : state) in_bounds = in_bounds && p >= 0.25 && p <= 0.75;
  }
  expect(in_bounds, "drifted probabilities respect bounds");
}

void agent_signatures() {
  twostep::SessionConfig config;
  config.n_trials = 50000;
  config.seed = 404;
  const auto schemes = twostep::generate_schemes(config);

  // Pure model-free: reward main effect without a transition interaction.
  {
    const agents::AgentParams mf{0.5, 5.0, 0.0, 0.0};
    const auto log = agents::run_agent(mf, schemes, 1);
    const auto signature = agents::stay_signature(log, schemes);
    expect(signature.reward_transition_gap() < 0.03,
           "MF reward effect depends on transition type: gap = " +
               std::to_string(signature.reward_transition_gap()));
    const double reward_effect =
        0.5 * (signature.stay_prob[1][1] + signature.stay_prob[1][0]) -
        0.5 * (signature.stay_prob[0][1] + signature.stay_prob[0][0]);
    expect(reward_effect > 0.0, "MF reward main effect missing");
  }

  // Pure model-based: positive reward-by-transition interaction.
  {
    const agents::AgentParams mb{0.5, 5.0, 1.0, 0.0};
    const auto log = agents::run_agent(mb, schemes, 2);
    const auto signature = agents::stay_signature(log, schemes);
    expect(signature.interaction() > 0.1,
           "MB interaction contrast too small: " + std::to_string(signature.interaction()));
  }

  // Hybrid parameter recovery at beta = 5 over 1,000-trial logs.
  {
    twostep::SessionConfig recover_config;
    recover_config.n_trials = 1000;
    for (double w_true : {0.2, 0.5, 0.8}) {
      std::vector<double> errors;
      for (int rep = 0; rep < 20; ++rep) {
        recover_config.seed = 1000 + static_cast<std::uint64_t>(w_true * 100) + rep;
        const auto rep_schemes = twostep::generate_schemes(recover_config);
        const agents::AgentParams truth{0.5, 5.0, w_true, 0.0};
        const auto log = agents::run_agent(truth, rep_schemes, 7000 + rep);
        const auto fit = agents::fit_params(log, rep_schemes);
        errors.push_back(std::abs(fit.params.w - w_true));
      }
      std::sort(errors.begin(), errors.end());
      const double median = 0.5 * (errors[9] + errors[10]);
      expect(median < 0.15, "median |w_fit - w_true| = " + std::to_string(median) +
                                " at w_true = " + std::to_string(w_true));
    }
  }
}

void nll_exactness() {
  twostep::SessionConfig config;
  config.seed = 55;
  const auto schemes = twostep::generate_schemes(config);

  const auto uniform_log = agents::run_agent(agents::AgentParams::uniform_random(), schemes, 9);
  expect(uniform_log.size() == 300, "uniform run yields 300 decisions");
  const auto summary = stats::nll(uniform_log);
  expect_near(summary.mean_nll, std::log(2.0), 1e-6, "uniform-policy mean NLL");

  agents::DecisionLog certain = uniform_log;
  for (auto& rec : certain) rec.prob_assigned = 1.0;
  const auto zero = stats::nll(certain);
  expect(zero.total_nll == 0.0, "all-certain run yields exactly zero total NLL");
  expect(zero.mean_nll == 0.0, "all-certain run yields exactly zero mean NLL");
}

void welch_correctness() {
  // Identical samples.
  std::vector<double> sample{0.1, 0.4, 0.7, 0.2, 0.9};
  const auto same = stats::welch(sample, sample);
  expect(same.t_statistic == 0.0 && same.p_value == 1.0, "identical samples give t=0, p=1");

  // Quadrature oracle agreement on seeded normal samples.
  std::mt19937_64 rng(2718);
  std::normal_distribution<double> na(0.5, 1.0), nb(0.0, 1.0);
  std::vector<double> a, b;
  for (int i = 0; i < 300; ++i) {
    a.push_back(na(rng));
    b.push_back(nb(rng));
  }
  const auto result = stats::welch(a, b);
  const double p_oracle = 2.0 * (1.0 - oracle::t_cdf(std::abs(result.t_statistic), result.df));
  expect_near(result.p_value, p_oracle, 1e-6, "p vs quadrature oracle");

  // Null calibration: equal-mean normals, fraction of p < 0.05.
  std::mt19937_64 null_rng(31415);
  std::normal_distribution<double> null_dist(0.0, 1.0);
  int rejections = 0;
  const int pairs = 2000;
  for (int i = 0; i < pairs; ++i) {
    std::vector<double> x, y;
    for (int k = 0; k < 50; ++k) {
      x.push_back(null_dist(null_rng));
      y.push_back(null_dist(null_rng));
    }
    if (stats::welch(x, y).p_value < 0.05) ++rejections;
  }
  const double fraction = static_cast<double>(rejections) / pairs;
  expect(fraction >= 0.03 && fraction <= 0.07,
         "null calibration fraction = " + std::to_string(fraction));
}

void roi_metrics() {
  const auto reference = roi::load_roi_series(fixture("roi_reference_trial1.jsonl"));
  const auto self = roi::summarize(reference, reference);
  expect_near(self.mean_pearson, 1.0, 1e-12, "self-similarity pearson");
  expect(self.mean_rmse == 0.0, "self-similarity rmse");

  // Invariances against definitional brute force on 1,000 random pairs.
  std::mt19937_64 rng(424242);
  std::normal_distribution<double> beta_dist(1.0, 2.0);
  std::uniform_real_distribution<double> scale_dist(0.1, 5.0);
  bool invariant = true;
  for (int i = 0; i < 1000 && invariant; ++i) {
    roi::RoiVector x, y;
    for (std::size_t k = 0; k < roi::kRoiCount; ++k) {
      x.betas[k] = beta_dist(rng);
      y.betas[k] = beta_dist(rng);
    }
    const double scale = scale_dist(rng);
    const double shift = beta_dist(rng);

    auto x_affine = x;
    for (auto& v : x_affine.betas) v = scale * v + shift;
    invariant = invariant && std::abs(*roi::pearson(x_affine, y) - *roi::pearson(x, y)) < 1e-12;

    auto x_scaled = x;
    for (auto& v : x_scaled.betas) v *= scale;
    invariant = invariant && std::abs(*roi::cosine(x_scaled, y) - *roi::cosine(x, y)) < 1e-12;

    // Definitional recomputation.
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < roi::kRoiCount; ++k) {
      mx += x.betas[k];
      my += y.betas[k];
    }
    mx /= roi::kRoiCount;
    my /= roi::kRoiCount;
    double num = 0, dx = 0, dy = 0, dot = 0, nx = 0, ny = 0;
    for (std::size_t k = 0; k < roi::kRoiCount; ++k) {
      num += (x.betas[k] - mx) * (y.betas[k] - my);
      dx += (x.betas[k] - mx) * (x.betas[k] - mx);
      dy += (y.betas[k] - my) * (y.betas[k] - my);
      dot += x.betas[k] * y.betas[k];
      nx += x.betas[k] * x.betas[k];
      ny += y.betas[k] * y.betas[k];
    }
    invariant = invariant && std::abs(*roi::pearson(x, y) - num / std::sqrt(dx * dy)) < 1e-12;
    invariant =
        invariant && std::abs(*roi::cosine(x, y) - dot / std::sqrt(nx * ny)) < 1e-12;
  }
  expect(invariant, "pearson/cosine invariances vs brute force on 1000 pairs");

  // Whitelist enforcement: 13 and 15 entries rejected.
  auto map13 = reference.entries[0].betas.to_map();
  map13.erase("X_Occipital Pole");
  bool rejected13 = false;
  try {
    roi::RoiVector::from_map(map13);
  } catch (const ParseError&) {
    rejected13 = true;
  }
  expect(rejected13, "13-entry vector rejected");

  auto map15 = reference.entries[0].betas.to_map();
  map15["X_Invented Region"] = 0.1;
  bool rejected15 = false;
  try {
    roi::RoiVector::from_map(map15);
  } catch (const ParseError&) {
    rejected15 = true;
  }
  expect(rejected15, "15-entry vector rejected");
}

void round_trips() {
  const auto dir = scratch_dir();

  // Scheme save/load identity, including bytes.
  twostep::SessionConfig config;
  config.seed = 77;
  config.n_trials = 40;
  const auto schemes = twostep::generate_schemes(config);
  const auto scheme_path = dir / "schemes.json";
  twostep::save_schemes(schemes, scheme_path);
  const auto loaded = twostep::load_schemes(scheme_path);
  expect(loaded == schemes, "scheme save/load identity");
  const auto scheme_path2 = dir / "schemes2.json";
  twostep::save_schemes(loaded, scheme_path2);
  expect(slurp(scheme_path) == slurp(scheme_path2), "scheme file byte identity");

  // Decision log parse/emit identity.
  const auto log = agents::run_agent({0.5, 5.0, 0.5, 0.1}, schemes, 3);
  const auto log_text = agents::decision_log_to_jsonl(log);
  expect(agents::decision_log_to_jsonl(agents::decision_log_from_jsonl(log_text)) == log_text,
         "decision log parse/emit identity");

  // ROI series parse/emit identity.
  const auto series = roi::synthetic_reference(20, 5);
  const auto series_text = roi::roi_series_to_jsonl(series);
  expect(roi::roi_series_to_jsonl(roi::roi_series_from_jsonl(series_text)) == series_text,
         "ROI series parse/emit identity");

  // Identical manifests imply byte-identical outputs.
  const auto schemes_again = twostep::generate_schemes(config);
  expect(twostep::schemes_to_json(schemes_again) == twostep::schemes_to_json(schemes),
         "same config, same bytes");
  RunManifest m1{"simulate", kVersion, config.seed, fnv1a_hex("config"), {}, {"out.json"}};
  RunManifest m2{"simulate", kVersion, config.seed, fnv1a_hex("config"), {}, {"out.json"}};
  expect(m1 == m2 && manifest_to_json(m1) == manifest_to_json(m2), "manifest determinism");
}

}  // namespace

int main() {
  std::printf("lapiths acceptance suite (version %s)\n", kVersion);
  criterion("MCG golden reproduction", 1.0, mcg_golden_reproduction);
  criterion("Simulator statistics", 10.0, simulator_statistics);
  criterion("Agent signatures", 120.0, agent_signatures);
  criterion("NLL exactness", 10.0, nll_exactness);
  criterion("Welch correctness", 60.0, welch_correctness);
  criterion("ROI metrics", 10.0, roi_metrics);
  criterion("Round trips", 10.0, round_trips);
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
