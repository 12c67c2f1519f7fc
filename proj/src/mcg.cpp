#include "lapiths/mcg.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "lapiths/errors.hpp"
#include <json.hpp>

namespace lapiths::mcg {

namespace {

void check_weight_sum(double sum, const std::string& what) {
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " weights must sum to 1, got " << sum;
    throw ValidationError(msg.str());
  }
}

void check_domain_value(double v, const std::string& name) {
  if (v != 0.0 && v != 0.5 && v != 1.0) {
    throw ValidationError("domain score '" + name + "' must be 0, 0.5 or 1, got " +
                          std::to_string(v));
  }
}

}  // namespace

void ConstraintSet::validate() const {
  if (entries.empty()) {
    throw ValidationError("constraint set must contain at least one entry");
  }
  std::set<std::string> ids;
  double sum = 0.0;
  for (const auto& c : entries) {
    if (c.weight < 0.0 || c.weight > 1.0) {
      throw ValidationError("constraint '" + c.id + "' weight outside [0,1]");
    }
    if (!ids.insert(c.id).second) {
      throw ValidationError("duplicate constraint id '" + c.id + "'");
    }
    sum += c.weight;
  }
  check_weight_sum(sum, "constraint");
}

void DomainScores::validate() const {
  check_domain_value(quantitative, "quantitative");
  check_domain_value(fluid, "fluid");
  check_domain_value(visual, "visual");
  check_domain_value(language, "language");
  check_domain_value(sensorimotor, "sensorimotor");
}

std::pair<double, double> structural_scores(const ConstraintSet& constraints) {
  constraints.validate();
  double structural = 0.0;
  for (const auto& c : constraints.entries) {
    if (c.structural) structural += c.weight;
  }
  return {structural, 1.0 - structural};
}

double fsr(double structural, double functional, double epsilon) {
  if (epsilon <= 0.0) {
    throw ValidationError("epsilon must be positive, got " + std::to_string(epsilon));
  }
  if (structural < 0.0 || structural > 1.0) {
    throw ValidationError("structural score outside [0,1]");
  }
  if (std::abs(functional - (1.0 - structural)) > kWeightSumTolerance) {
    throw ValidationError("functional score must equal 1 - structural score");
  }
  return functional / (structural + epsilon);
}

double normalize_fsr(double raw_ratio) {
  if (raw_ratio < 0.0) {
    throw ValidationError("raw FSR must be nonnegative, got " + std::to_string(raw_ratio));
  }
  // 1/(1+raw) equals inverting the ratio and squashing onto (0,1]; the
  // raw = 0 limit (no functional component at all) is defined as 1.
  return 1.0 / (1.0 + raw_ratio);
}

FsrResult evaluate_fsr(const ConstraintSet& constraints, double epsilon) {
  auto [structural, functional] = structural_scores(constraints);
  FsrResult result;
  result.structural_score = structural;
  result.functional_score = functional;
  result.epsilon = epsilon;
  result.raw_ratio = fsr(structural, functional, epsilon);
  result.normalized = normalize_fsr(result.raw_ratio);
  return result;
}

double generality(const DomainScores& scores) {
  scores.validate();
  const double cognitive_mean =
      (scores.quantitative + scores.fluid + scores.visual + scores.language) / 4.0;
  return 0.5 * cognitive_mean + 0.5 * scores.sensorimotor;
}

double accuracy_score(const std::vector<double>& deltas) {
  if (deltas.empty()) {
    throw ValidationError("accuracy score needs at least one delta");
  }
  double mean = 0.0;
  for (double d : deltas) mean += d;
  mean /= static_cast<double>(deltas.size());
  return 1.0 / (1.0 + std::abs(mean));
}

std::optional<double> error_pattern_score(const std::vector<ErrorIndicator>& indicators) {
  double sum = 0.0;
  int n = 0;
  for (ErrorIndicator e : indicators) {
    switch (e) {
      case ErrorIndicator::kMatch:
        sum += 1.0;
        ++n;
        break;
      case ErrorIndicator::kMismatch:
        sum -= 1.0;
        ++n;
        break;
      case ErrorIndicator::kMissing:
        break;
    }
  }
  if (n == 0) return std::nullopt;
  const double mean = sum / static_cast<double>(n);
  return (mean + 1.0) / 2.0;
}

double timing_score(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) {
    throw ValidationError("timing score needs at least one (model, human) pair");
  }
  double sum = 0.0;
  for (const auto& [t_model, t_human] : pairs) {
    if (t_human <= 0.0) {
      throw ValidationError("human timing must be positive, got " + std::to_string(t_human));
    }
    const double deviation = std::abs(t_model - t_human) / t_human;
    sum += 1.0 / (1.0 + deviation);
  }
  return sum / static_cast<double>(pairs.size());
}

PerformanceBreakdown performance_match(const PerformanceInputs& inputs) {
  check_weight_sum(inputs.sub_weights.alpha + inputs.sub_weights.beta + inputs.sub_weights.gamma,
                   "performance sub-metric");

  PerformanceBreakdown out;
  if (!inputs.nll_deltas.empty()) {
    out.accuracy = accuracy_score(inputs.nll_deltas);
  }
  out.error_pattern = error_pattern_score(inputs.error_indicators);
  if (const auto* pairs = std::get_if<TimingPairs>(&inputs.timing)) {
    out.timing = timing_score(pairs->model_human_seconds);
  } else if (const auto* empirical = std::get_if<TimingEmpirical>(&inputs.timing)) {
    if (empirical->value < 0.0 || empirical->value > 1.0) {
      throw ValidationError("empirical timing estimate outside [0,1]");
    }
    out.timing = empirical->value;
  }

  double weight_sum = 0.0;
  double weighted = 0.0;
  if (out.accuracy) {
    weight_sum += inputs.sub_weights.alpha;
    weighted += inputs.sub_weights.alpha * *out.accuracy;
  }
  if (out.error_pattern) {
    weight_sum += inputs.sub_weights.beta;
    weighted += inputs.sub_weights.beta * *out.error_pattern;
  }
  if (out.timing) {
    weight_sum += inputs.sub_weights.gamma;
    weighted += inputs.sub_weights.gamma * *out.timing;
  }
  if (weight_sum <= 0.0) {
    throw ValidationError("performance match needs at least one available sub-metric");
  }
  out.performance_match = weighted / weight_sum;
  return out;
}

PlausibilityResult plausibility(double fsr_normalized, double generality_score,
                                double performance_match_score,
                                const PlausibilityWeights& weights) {
  auto in_unit = [](double v, const char* name) {
    if (v < 0.0 || v > 1.0 || !std::isfinite(v)) {
      throw ValidationError(std::string(name) + " outside [0,1]");
    }
  };
  in_unit(fsr_normalized, "normalized FSR");
  in_unit(generality_score, "generality");
  in_unit(performance_match_score, "performance match");
  check_weight_sum(weights.lambda + weights.mu + weights.nu, "plausibility");

  PlausibilityResult result;
  result.fsr_normalized = fsr_normalized;
  result.generality = generality_score;
  result.performance_match = performance_match_score;
  result.weights = weights;
  result.score = weights.lambda * fsr_normalized + weights.mu * generality_score +
                 weights.nu * performance_match_score;
  return result;
}

// ---------------------------------------------------------------------------
// Bundle file
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

// A weight may be written as a number or as a fraction string ("1/3"),
// which keeps thirds and sixths exact.
double parse_weight(const json& value, const std::string& context) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const std::string text = value.get<std::string>();
    const auto slash = text.find('/');
    try {
      if (slash == std::string::npos) return std::stod(text);
      const double num = std::stod(text.substr(0, slash));
      const double den = std::stod(text.substr(slash + 1));
      if (den == 0.0) throw ParseError(context + ": zero denominator in '" + text + "'");
      return num / den;
    } catch (const std::invalid_argument&) {
      throw ParseError(context + ": cannot parse weight '" + text + "'");
    }
  }
  throw ParseError(context + ": weight must be a number or fraction string");
}

ErrorIndicator parse_indicator(const json& value, int index) {
  if (value.is_null()) return ErrorIndicator::kMissing;
  if (value.is_number()) {
    const double v = value.get<double>();
    if (v == 1.0) return ErrorIndicator::kMatch;
    if (v == -1.0) return ErrorIndicator::kMismatch;
  }
  throw ParseError("error_indicators[" + std::to_string(index) + "] must be 1, -1 or null");
}

}  // namespace

McgBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open bundle file: " + path.string());

  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("bundle " + path.string() + ": " + e.what());
  }

  McgBundle bundle;
  try {
    bundle.model = doc.value("model", bundle.model);
    bundle.task = doc.value("task", bundle.task);
    bundle.baseline = doc.value("baseline", bundle.baseline);
    bundle.epsilon = doc.value("epsilon", bundle.epsilon);

    if (!doc.contains("constraints") || !doc["constraints"].is_array()) {
      throw ParseError("bundle must contain a 'constraints' array");
    }
    for (const auto& entry : doc["constraints"]) {
      Constraint c;
      c.id = entry.at("id").get<std::string>();
      c.weight = parse_weight(entry.at("weight"), "constraint '" + c.id + "'");
      c.structural = entry.at("structural").get<bool>();
      c.description = entry.value("description", std::string{});
      bundle.constraints.entries.push_back(std::move(c));
    }

    const auto& domains = doc.at("domain_scores");
    bundle.domains.quantitative = domains.at("quantitative").get<double>();
    bundle.domains.fluid = domains.at("fluid").get<double>();
    bundle.domains.visual = domains.at("visual").get<double>();
    bundle.domains.language = domains.at("language").get<double>();
    bundle.domains.sensorimotor = domains.at("sensorimotor").get<double>();

    if (doc.contains("performance") && !doc["performance"].is_null()) {
      const auto& perf = doc["performance"];
      bundle.baseline = perf.value("baseline", bundle.baseline);
      if (perf.contains("nll_deltas")) {
        bundle.performance.nll_deltas = perf["nll_deltas"].get<std::vector<double>>();
      }
      if (perf.contains("error_indicators")) {
        int i = 0;
        for (const auto& v : perf["error_indicators"]) {
          bundle.performance.error_indicators.push_back(parse_indicator(v, i++));
        }
      }
      if (perf.contains("timing") && !perf["timing"].is_null()) {
        const auto& timing = perf["timing"];
        if (timing.contains("empirical")) {
          bundle.performance.timing = TimingEmpirical{timing["empirical"].get<double>()};
        } else if (timing.contains("pairs")) {
          TimingPairs pairs;
          for (const auto& p : timing["pairs"]) {
            pairs.model_human_seconds.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
          }
          bundle.performance.timing = std::move(pairs);
        } else {
          throw ParseError("timing must contain 'pairs' or 'empirical'");
        }
      }
      if (perf.contains("sub_weights") && !perf["sub_weights"].is_null()) {
        const auto& sw = perf["sub_weights"];
        bundle.performance.sub_weights.alpha = parse_weight(sw.at("alpha"), "sub_weights.alpha");
        bundle.performance.sub_weights.beta = parse_weight(sw.at("beta"), "sub_weights.beta");
        bundle.performance.sub_weights.gamma = parse_weight(sw.at("gamma"), "sub_weights.gamma");
      }
    }

    if (doc.contains("weights") && !doc["weights"].is_null()) {
      const auto& w = doc["weights"];
      bundle.weights.lambda = parse_weight(w.at("lambda"), "weights.lambda");
      bundle.weights.mu = parse_weight(w.at("mu"), "weights.mu");
      bundle.weights.nu = parse_weight(w.at("nu"), "weights.nu");
    }
  } catch (const json::exception& e) {
    throw ParseError("bundle " + path.string() + ": " + e.what());
  }
  return bundle;
}

McgScores score_bundle(const McgBundle& bundle) {
  McgScores scores;
  scores.fsr = evaluate_fsr(bundle.constraints, bundle.epsilon);
  scores.generality = generality(bundle.domains);
  scores.performance = performance_match(bundle.performance);
  if (!bundle.performance.nll_deltas.empty()) {
    double mean = 0.0;
    for (double d : bundle.performance.nll_deltas) mean += d;
    mean /= static_cast<double>(bundle.performance.nll_deltas.size());
    scores.mean_abs_delta = std::abs(mean);
  }
  scores.plausibility = plausibility(scores.fsr.normalized, scores.generality,
                                     scores.performance.performance_match, bundle.weights);
  return scores;
}

}  // namespace lapiths::mcg
