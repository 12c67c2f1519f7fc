#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lapiths::mcg {

inline constexpr double kWeightSumTolerance = 1e-9;
inline constexpr double kDefaultEpsilon = 0.01;

// One cognitive constraint with its share of the normalised weight budget.
// structural == true means the mechanism is implemented structurally (s_i = 1);
// the functional score of an entry is always 1 - s_i.
struct Constraint {
  std::string id;
  double weight = 0.0;
  bool structural = false;
  std::string description;
};

struct ConstraintSet {
  std::vector<Constraint> entries;

  // Checks: nonempty, unique ids, weights in [0,1] summing to 1 within
  // kWeightSumTolerance. Throws ValidationError naming the offending sum.
  void validate() const;
};

struct FsrResult {
  double structural_score = 0.0;  // S = sum w_i * s_i
  double functional_score = 0.0;  // F = 1 - S
  double raw_ratio = 0.0;         // F / (S + epsilon)
  double normalized = 0.0;        // 1 / (1 + raw_ratio), in [0,1]
  double epsilon = kDefaultEpsilon;
};

// Domain coverage on the three-point scale {0, 0.5, 1}: four cognitive
// domains plus the sensorimotor super-category.
struct DomainScores {
  double quantitative = 0.0;
  double fluid = 0.0;
  double visual = 0.0;
  double language = 0.0;
  double sensorimotor = 0.0;

  void validate() const;
};

// Per-benchmark error-pattern indicator. Missing entries are excluded from
// the mean rather than scored.
enum class ErrorIndicator { kMatch, kMismatch, kMissing };

struct TimingPairs {
  std::vector<std::pair<double, double>> model_human_seconds;
};
struct TimingEmpirical {
  double value = 0.0;  // similarity already expressed in [0,1]
};
using TimingInput = std::variant<std::monostate, TimingPairs, TimingEmpirical>;

struct SubWeights {
  double alpha = 1.0 / 3.0;
  double beta = 1.0 / 3.0;
  double gamma = 1.0 / 3.0;
};

struct PerformanceInputs {
  std::vector<double> nll_deltas;  // model minus human baseline, signed
  std::vector<ErrorIndicator> error_indicators;
  TimingInput timing;
  SubWeights sub_weights;
};

// Sub-scores that were actually computable, plus the weighted aggregate.
// Weights of unavailable sub-metrics are dropped and the rest renormalised.
struct PerformanceBreakdown {
  std::optional<double> accuracy;
  std::optional<double> error_pattern;
  std::optional<double> timing;
  double performance_match = 0.0;
};

struct PlausibilityWeights {
  double lambda = 0.5;
  double mu = 0.25;
  double nu = 0.25;
};

struct PlausibilityResult {
  double fsr_normalized = 0.0;
  double generality = 0.0;
  double performance_match = 0.0;
  PlausibilityWeights weights;
  double score = 0.0;
};

// (S, F) with S = sum w_i * s_i and F = 1 - S.
std::pair<double, double> structural_scores(const ConstraintSet& constraints);

// Raw functional/structural ratio F / (S + epsilon).
double fsr(double structural, double functional, double epsilon = kDefaultEpsilon);

// Maps the raw ratio onto (0,1]; 0 maps to 1 (fully structural limit).
// Strictly decreasing in the raw ratio.
double normalize_fsr(double raw_ratio);

// Convenience: full FSR evaluation of a constraint set.
FsrResult evaluate_fsr(const ConstraintSet& constraints, double epsilon = kDefaultEpsilon);

// 0.5 * mean(cognitive domains) + 0.5 * sensorimotor.
double generality(const DomainScores& scores);

// 1 / (1 + |mean(deltas)|); signed deltas cancel before the absolute value.
double accuracy_score(const std::vector<double>& deltas);

// (mean(non-missing) + 1) / 2; nullopt when every indicator is missing.
std::optional<double> error_pattern_score(const std::vector<ErrorIndicator>& indicators);

// Mean of 1 / (1 + |t_m - t_h| / t_h) over benchmark timing pairs.
double timing_score(const std::vector<std::pair<double, double>>& pairs);

PerformanceBreakdown performance_match(const PerformanceInputs& inputs);

PlausibilityResult plausibility(double fsr_normalized, double generality_score,
                                double performance_match_score,
                                const PlausibilityWeights& weights = {});

// ---------------------------------------------------------------------------
// Declarative scoring bundle (JSON file interface)
// ---------------------------------------------------------------------------

struct McgBundle {
  std::string model = "Model";
  std::string task;
  double baseline = 0.0;  // human baseline shown alongside the deltas
  double epsilon = kDefaultEpsilon;
  ConstraintSet constraints;
  DomainScores domains;
  PerformanceInputs performance;
  PlausibilityWeights weights;
};

struct McgScores {
  FsrResult fsr;
  double generality = 0.0;
  PerformanceBreakdown performance;
  double mean_abs_delta = 0.0;  // |mean(nll_deltas)|, 0 when no deltas
  PlausibilityResult plausibility;
};

// Weight fields accept plain numbers or fraction strings such as "1/3",
// so exact thirds and sixths survive the file round trip.
McgBundle load_bundle(const std::filesystem::path& path);

McgScores score_bundle(const McgBundle& bundle);

}  // namespace lapiths::mcg
