#pragma once

#include <string>
#include <vector>

#include "lapiths/agents.hpp"

namespace lapiths::stats {

inline constexpr double kDefaultClamp = 1e-12;

struct NllSummary {
  double total_nll = 0.0;       // nats
  double mean_nll = 0.0;        // nats per decision
  int n_decisions = 0;
  double ci95_halfwidth = 0.0;  // normal-approximation CI on the mean
};

// Baseline whose spread is known only through a reported confidence
// interval; the standard deviation is recovered by inverting the normal CI.
struct BaselineSpec {
  std::string name;
  double mean = 0.0;
  double ci95_halfwidth = 0.0;
  int n = 300;

  void validate() const;
};

struct WelchResult {
  double mean_delta = 0.0;
  double t_statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  bool degenerate = false;  // zero pooled variance with unequal means
};

struct ComparisonRow {
  std::string model;
  std::string baseline;
  double mean_delta = 0.0;
  double t_statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

// Per-decision negative log-likelihoods; probabilities are clamped below at
// the floor so hard zeros stay finite.
std::vector<double> per_decision_nll(const agents::DecisionLog& log,
                                     double clamp = kDefaultClamp);

NllSummary nll(const agents::DecisionLog& log, double clamp = kDefaultClamp);
NllSummary nll_of_probabilities(const std::vector<double>& probabilities,
                                double clamp = kDefaultClamp);
NllSummary summarize_nll_terms(const std::vector<double>& terms);

// Two-sided standard-normal quantile for the given confidence level
// (1.95996... at 95%).
double normal_quantile(double p);

// sd = halfwidth * sqrt(n) / z. Inverse of ci_from_sd.
double sd_from_ci(double halfwidth, int n, double confidence = 0.95);
double ci_from_sd(double sd, int n, double confidence = 0.95);

// Cumulative Student-t probability via the regularized incomplete beta
// function; non-finite x collapses to the 0/1 limits.
double t_cdf(double x, double df);

// Welch two-sample t-test with Welch-Satterthwaite degrees of freedom and a
// two-sided p-value.
WelchResult welch_from_moments(double mean_a, double sd_a, int n_a, double mean_b, double sd_b,
                               int n_b);
WelchResult welch(const std::vector<double>& sample_a, const std::vector<double>& sample_b);
WelchResult welch(const std::vector<double>& sample_a, const BaselineSpec& baseline);

// One row per (model, baseline) pair, models outermost.
std::vector<ComparisonRow> compare_all(
    const std::vector<std::pair<std::string, std::vector<double>>>& samples,
    const std::vector<BaselineSpec>& baselines);

}  // namespace lapiths::stats
