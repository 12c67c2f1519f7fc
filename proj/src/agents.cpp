#include "lapiths/agents.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "lapiths/errors.hpp"
#include <json.hpp>

namespace lapiths::agents {

using ordered_json = nlohmann::ordered_json;
using twostep::Labels;
using twostep::TransitionType;
using twostep::TrialScheme;

void AgentParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha must lie in (0,1], got " + std::to_string(alpha));
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw ValidationError("beta must be nonnegative, got " + std::to_string(beta));
  }
  if (!(w >= 0.0 && w <= 1.0)) {
    throw ValidationError("w must lie in [0,1], got " + std::to_string(w));
  }
  if (!std::isfinite(perseveration)) {
    throw ValidationError("perseveration must be finite");
  }
}

double StaySignature::interaction() const {
  return (stay_prob[1][1] - stay_prob[1][0]) - (stay_prob[0][1] - stay_prob[0][0]);
}

double StaySignature::reward_transition_gap() const {
  return std::abs(stay_prob[1][1] - stay_prob[1][0]);
}

AgentState mf_update(const AgentState& state, int stage1_action, int reached_state,
                     int stage2_action, int reward, double alpha) {
  // alpha = 0 is a valid frozen learner here; AgentParams is stricter.
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha must lie in [0,1]");
  }
  if (stage1_action < 0 || stage1_action > 1 || reached_state < 0 || reached_state > 1 ||
      stage2_action < 0 || stage2_action > 1) {
    throw ValidationError("state/action index outside the two-choice alphabet");
  }
  AgentState next = state;
  auto& q2 = next.q_stage2[static_cast<std::size_t>(reached_state)]
                          [static_cast<std::size_t>(stage2_action)];
  q2 += alpha * (static_cast<double>(reward) - q2);
  auto& q1 = next.q_stage1[static_cast<std::size_t>(stage1_action)];
  q1 += alpha * (q2 - q1);
  return next;
}

std::array<double, 2> mb_values(const std::array<std::array<double, 2>, 2>& q_stage2,
                                const std::array<std::array<double, 2>, 2>& transition) {
  std::array<double, 2> state_value{};
  for (int s = 0; s < 2; ++s) {
    state_value[s] = std::max(q_stage2[s][0], q_stage2[s][1]);
  }
  std::array<double, 2> values{};
  for (int a = 0; a < 2; ++a) {
    const double row_sum = transition[a][0] + transition[a][1];
    if (transition[a][0] < 0.0 || transition[a][1] < 0.0 ||
        std::abs(row_sum - 1.0) > 1e-9) {
      throw ValidationError("transition row " + std::to_string(a) +
                            " must be a probability distribution");
    }
    values[a] = transition[a][0] * state_value[0] + transition[a][1] * state_value[1];
  }
  return values;
}

std::array<double, 2> mb_values(const std::array<std::array<double, 2>, 2>& q_stage2,
                                double common_prob) {
  const std::array<std::array<double, 2>, 2> transition{{
      {{common_prob, 1.0 - common_prob}},
      {{1.0 - common_prob, common_prob}},
  }};
  return mb_values(q_stage2, transition);
}

std::array<double, 2> policy(const std::array<double, 2>& values, double beta,
                             double perseveration, std::optional<int> last_action) {
  if (!(beta >= 0.0)) throw ValidationError("beta must be nonnegative");
  if (!std::isfinite(values[0]) || !std::isfinite(values[1]) || !std::isfinite(perseveration)) {
    throw ValidationError("policy values must be finite");
  }
  std::array<double, 2> biased = values;
  if (last_action) {
    if (*last_action < 0 || *last_action > 1) {
      throw ValidationError("last action index outside the two-choice alphabet");
    }
    biased[static_cast<std::size_t>(*last_action)] += perseveration;
  }
  // Difference form keeps the pair summing to 1 exactly and makes the
  // softmax invariant to shifting both values.
  const double d = beta * (biased[0] - biased[1]);
  double p0;
  if (d >= 0.0) {
    p0 = 1.0 / (1.0 + std::exp(-d));
  } else {
    const double e = std::exp(d);
    p0 = e / (1.0 + e);
  }
  return {p0, 1.0 - p0};
}

std::array<double, 2> hybrid_values(const std::array<double, 2>& q_mf,
                                    const std::array<double, 2>& q_mb, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("w must lie in [0,1]");
  return {w * q_mb[0] + (1.0 - w) * q_mf[0], w * q_mb[1] + (1.0 - w) * q_mf[1]};
}

HybridAgent::HybridAgent(const AgentParams& params, double model_common_prob)
    : params_(params), model_common_prob_(model_common_prob) {
  params_.validate();
  if (!(model_common_prob > 0.0 && model_common_prob < 1.0)) {
    throw ValidationError("model common_prob must lie in (0,1)");
  }
}

std::array<double, 2> HybridAgent::stage1_probs() const {
  const auto q_mb = mb_values(state_.q_stage2, model_common_prob_);
  const auto values = hybrid_values(state_.q_stage1, q_mb, params_.w);
  return policy(values, params_.beta, params_.perseveration, state_.last_stage1_action);
}

std::array<double, 2> HybridAgent::stage2_probs(int reached_state) const {
  if (reached_state < 0 || reached_state > 1) {
    throw ValidationError("reached state index outside the two-state alphabet");
  }
  return policy(state_.q_stage2[static_cast<std::size_t>(reached_state)], params_.beta);
}

void HybridAgent::observe(int stage1_action, int reached_state, int stage2_action, int reward) {
  state_ = mf_update(state_, stage1_action, reached_state, stage2_action, reward, params_.alpha);
  state_.last_stage1_action = stage1_action;
}

namespace {

// Compact per-trial view of a decision log, resolved against its schemes.
struct ParsedTrial {
  int trial = 0;
  int stage1_action = 0;
  int reached_state = 0;
  int stage2_action = 0;
  int reward = 0;
  TransitionType transition_type = TransitionType::kCommon;
};

int other_index(int idx) { return idx == 0 ? 1 : 0; }

std::vector<ParsedTrial> parse_log(const DecisionLog& log,
                                   const std::vector<TrialScheme>& schemes) {
  const Labels labels;
  if (log.empty()) throw ValidationError("decision log is empty");
  if (log.size() % 2 != 0 || log.size() != 2 * schemes.size()) {
    throw ValidationError("log/schemes misaligned: expected " +
                          std::to_string(2 * schemes.size()) + " decisions, got " +
                          std::to_string(log.size()));
  }
  std::vector<ParsedTrial> trials;
  trials.reserve(schemes.size());
  for (std::size_t t = 0; t < schemes.size(); ++t) {
    const auto& scheme = schemes[t];
    const auto& first = log[2 * t];
    const auto& second = log[2 * t + 1];
    const std::string where = "trial " + std::to_string(scheme.trial);
    if (first.trial != scheme.trial || second.trial != scheme.trial) {
      throw ValidationError(where + ": log trial indices do not match the scheme");
    }
    if (first.stage != 1 || second.stage != 2) {
      throw ValidationError(where + ": expected a stage-1 record followed by a stage-2 record");
    }
    ParsedTrial parsed;
    parsed.trial = scheme.trial;
    parsed.stage1_action = labels.stage1_index(first.action);
    if (parsed.stage1_action < 0) {
      throw ValidationError(where + ": unknown stage-1 action '" + first.action + "'");
    }
    // The stored planet_if_* fields commit the common/rare draw; a logged
    // type that disagrees with the committed draw means the other planet
    // was reached.
    const auto committed = twostep::stored_transition(first.action, scheme);
    int reached = labels.state_index(committed.first);
    if (first.transition_type != committed.second) {
      reached = other_index(reached);
    }
    parsed.reached_state = reached;
    parsed.transition_type = first.transition_type;
    parsed.stage2_action = labels.stage2_index(reached, second.action);
    if (parsed.stage2_action < 0) {
      throw ValidationError(where + ": stage-2 action '" + second.action +
                            "' does not belong to state '" + labels.states[reached] + "'");
    }
    parsed.reward = second.reward;
    if (parsed.reward != 0 && parsed.reward != 1) {
      throw ValidationError(where + ": reward must be 0 or 1");
    }
    trials.push_back(parsed);
  }
  return trials;
}

std::vector<double> replay_parsed(const AgentParams& params,
                                  const std::vector<ParsedTrial>& trials,
                                  double model_common_prob) {
  HybridAgent agent(params, model_common_prob);
  std::vector<double> probs;
  probs.reserve(2 * trials.size());
  for (const auto& trial : trials) {
    const auto p1 = agent.stage1_probs();
    probs.push_back(p1[static_cast<std::size_t>(trial.stage1_action)]);
    const auto p2 = agent.stage2_probs(trial.reached_state);
    probs.push_back(p2[static_cast<std::size_t>(trial.stage2_action)]);
    agent.observe(trial.stage1_action, trial.reached_state, trial.stage2_action, trial.reward);
  }
  return probs;
}

int sample_binary(const std::array<double, 2>& probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  return uniform(rng) < probs[0] ? 0 : 1;
}

}  // namespace

DecisionLog run_agent(const AgentParams& params, const std::vector<TrialScheme>& schemes,
                      std::uint64_t seed, double model_common_prob) {
  if (schemes.empty()) throw ValidationError("cannot run an agent over zero schemes");
  const Labels labels;
  for (const auto& scheme : schemes) scheme.validate(labels);

  HybridAgent agent(params, model_common_prob);
  std::mt19937_64 rng(seed);
  DecisionLog log;
  log.reserve(2 * schemes.size());

  for (const auto& scheme : schemes) {
    const auto p1 = agent.stage1_probs();
    const int a1 = sample_binary(p1, rng);
    const auto [reached_label, type] = twostep::stored_transition(labels.stage1[a1], scheme);
    const int reached = labels.state_index(reached_label);

    const auto p2 = agent.stage2_probs(reached);
    const int a2 = sample_binary(p2, rng);
    const int reward = twostep::outcome(reached_label, labels.stage2[reached][a2], scheme);

    log.push_back({scheme.trial, 1, labels.stage1[a1], p1[static_cast<std::size_t>(a1)], reward,
                   type});
    log.push_back({scheme.trial, 2, labels.stage2[reached][a2],
                   p2[static_cast<std::size_t>(a2)], reward, type});
    agent.observe(a1, reached, a2, reward);
  }
  return log;
}

std::vector<double> replay_probabilities(const AgentParams& params, const DecisionLog& log,
                                         const std::vector<TrialScheme>& schemes,
                                         double model_common_prob) {
  return replay_parsed(params, parse_log(log, schemes), model_common_prob);
}

StaySignature stay_signature(const DecisionLog& log,
                             const std::vector<TrialScheme>& schemes) {
  const auto trials = parse_log(log, schemes);
  if (trials.size() < 2) {
    throw ValidationError("stay signature needs at least two trials");
  }
  StaySignature signature;
  std::array<std::array<int, 2>, 2> stays{};
  for (std::size_t t = 1; t < trials.size(); ++t) {
    const auto& prev = trials[t - 1];
    const int rewarded = prev.reward;
    const int common = prev.transition_type == TransitionType::kCommon ? 1 : 0;
    signature.counts[rewarded][common] += 1;
    if (trials[t].stage1_action == prev.stage1_action) {
      stays[rewarded][common] += 1;
    }
  }
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      signature.stay_prob[r][c] =
          signature.counts[r][c] > 0
              ? static_cast<double>(stays[r][c]) / signature.counts[r][c]
              : 0.0;
    }
  }
  return signature;
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

namespace {

constexpr double kNllClamp = 1e-12;
constexpr int kGridPointsPerDim = 11;
constexpr double kNllTolerance = 1e-6;

double mean_nll_of(const std::vector<double>& probs) {
  double total = 0.0;
  for (double p : probs) total -= std::log(std::max(p, kNllClamp));
  return total / static_cast<double>(probs.size());
}

struct FreeDim {
  int param_index = 0;  // 0 alpha, 1 beta, 2 w, 3 perseveration
  double lower = 0.0;
  double upper = 0.0;
};

AgentParams params_from_point(const std::vector<FreeDim>& dims, const std::vector<double>& x,
                              const ParamBounds& bounds) {
  AgentParams params{bounds.alpha.lower, bounds.beta.lower, bounds.w.lower,
                     bounds.perseveration.lower};
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const double v = std::clamp(x[i], dims[i].lower, dims[i].upper);
    switch (dims[i].param_index) {
      case 0: params.alpha = v; break;
      case 1: params.beta = v; break;
      case 2: params.w = v; break;
      case 3: params.perseveration = v; break;
    }
  }
  return params;
}

// Nelder-Mead over a box; vertices are clamped before evaluation. Returns
// the best vertex seen.
std::pair<std::vector<double>, double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& start, const std::vector<double>& steps, int max_iterations) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex;
  simplex.push_back(start);
  for (std::size_t i = 0; i < n; ++i) {
    auto vertex = start;
    vertex[i] += steps[i];
    simplex.push_back(std::move(vertex));
  }
  std::vector<double> values(simplex.size());
  for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = objective(simplex[i]);

  auto order = [&] {
    std::vector<std::size_t> idx(simplex.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b];
    });
    std::vector<std::vector<double>> new_simplex(simplex.size());
    std::vector<double> new_values(simplex.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      new_simplex[i] = simplex[idx[i]];
      new_values[i] = values[idx[i]];
    }
    simplex = std::move(new_simplex);
    values = std::move(new_values);
  };

  for (int iter = 0; iter < max_iterations; ++iter) {
    order();
    if (values.back() - values.front() < kNllTolerance) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i + 1 < simplex.size(); ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> point(n);
      for (std::size_t j = 0; j < n; ++j) {
        point[j] = centroid[j] + coef * (simplex.back()[j] - centroid[j]);
      }
      return point;
    };

    const auto reflected = blend(-1.0);
    const double f_reflected = objective(reflected);
    if (f_reflected < values.front()) {
      const auto expanded = blend(-2.0);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        simplex.back() = expanded;
        values.back() = f_expanded;
      } else {
        simplex.back() = reflected;
        values.back() = f_reflected;
      }
    } else if (f_reflected < values[values.size() - 2]) {
      simplex.back() = reflected;
      values.back() = f_reflected;
    } else {
      const auto contracted = blend(0.5);
      const double f_contracted = objective(contracted);
      if (f_contracted < values.back()) {
        simplex.back() = contracted;
        values.back() = f_contracted;
      } else {
        for (std::size_t i = 1; i < simplex.size(); ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          }
          values[i] = objective(simplex[i]);
        }
      }
    }
  }
  order();
  return {simplex.front(), values.front()};
}

}  // namespace

FitResult fit_params(const DecisionLog& log, const std::vector<TrialScheme>& schemes,
                     const ParamBounds& bounds, double model_common_prob) {
  if (log.size() < 2) {
    throw ValidationError("fitting needs at least one full trial (two decisions)");
  }
  const auto trials = parse_log(log, schemes);

  std::vector<FreeDim> dims;
  const std::array<ParamRange, 4> ranges{bounds.alpha, bounds.beta, bounds.w,
                                         bounds.perseveration};
  for (int i = 0; i < 4; ++i) {
    if (!ranges[i].frozen()) {
      if (ranges[i].lower > ranges[i].upper) {
        throw ValidationError("parameter bounds must satisfy lower <= upper");
      }
      dims.push_back({i, ranges[i].lower, ranges[i].upper});
    }
  }

  auto objective = [&](const std::vector<double>& x) {
    const auto params = params_from_point(dims, x, bounds);
    return mean_nll_of(replay_parsed(params, trials, model_common_prob));
  };

  // Coarse grid pass.
  std::vector<double> best_point(dims.size(), 0.0);
  double best_value = 0.0;
  if (dims.empty()) {
    best_value = objective(best_point);
  } else {
    std::size_t total = 1;
    for (std::size_t i = 0; i < dims.size(); ++i) total *= kGridPointsPerDim;
    best_value = std::numeric_limits<double>::infinity();
    std::vector<double> point(dims.size());
    for (std::size_t index = 0; index < total; ++index) {
      std::size_t rest = index;
      for (std::size_t d = 0; d < dims.size(); ++d) {
        const auto step = rest % kGridPointsPerDim;
        rest /= kGridPointsPerDim;
        point[d] = dims[d].lower +
                   (dims[d].upper - dims[d].lower) * static_cast<double>(step) /
                       (kGridPointsPerDim - 1);
      }
      const double value = objective(point);
      if (value < best_value) {
        best_value = value;
        best_point = point;
      }
    }

    // Local refinement from the best grid cell.
    std::vector<double> steps(dims.size());
    for (std::size_t d = 0; d < dims.size(); ++d) {
      steps[d] = (dims[d].upper - dims[d].lower) / (kGridPointsPerDim - 1);
      if (best_point[d] + steps[d] > dims[d].upper) steps[d] = -steps[d];
    }
    const auto [refined_point, refined_value] = nelder_mead(objective, best_point, steps, 400);
    if (refined_value < best_value) {
      best_value = refined_value;
      best_point = refined_point;
    }
  }

  FitResult result;
  result.params = params_from_point(dims, best_point, bounds);
  result.mean_nll = best_value;
  return result;
}

// ---------------------------------------------------------------------------
// Decision log and params I/O
// ---------------------------------------------------------------------------

std::string decision_log_to_jsonl(const DecisionLog& log) {
  std::ostringstream out;
  for (const auto& rec : log) {
    ordered_json obj;
    obj["trial"] = rec.trial;
    obj["stage"] = rec.stage;
    obj["action"] = rec.action;
    if (rec.prob_assigned) {
      obj["prob_assigned"] = *rec.prob_assigned;
    } else {
      obj["prob_assigned"] = nullptr;
    }
    obj["reward"] = rec.reward;
    obj["transition_type"] = twostep::to_string(rec.transition_type);
    out << obj.dump() << "\n";
  }
  return out.str();
}

DecisionLog decision_log_from_jsonl(const std::string& text, const std::string& origin) {
  DecisionLog log;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto obj = ordered_json::parse(line);
      DecisionRecord rec;
      rec.trial = obj.at("trial").get<int>();
      rec.stage = obj.at("stage").get<int>();
      if (rec.stage != 1 && rec.stage != 2) {
        throw ParseError(origin + ":" + std::to_string(line_no) + ": stage must be 1 or 2");
      }
      rec.action = obj.at("action").get<std::string>();
      const auto& prob = obj.at("prob_assigned");
      if (!prob.is_null()) rec.prob_assigned = prob.get<double>();
      rec.reward = obj.at("reward").get<int>();
      rec.transition_type =
          twostep::transition_type_from_string(obj.at("transition_type").get<std::string>());
      log.push_back(std::move(rec));
    } catch (const ordered_json::exception& e) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return log;
}

DecisionLog load_decision_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open decision log: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return decision_log_from_jsonl(buffer.str(), path.string());
}

void save_decision_log(const DecisionLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write decision log: " + path.string());
  out << decision_log_to_jsonl(log);
}

AgentParams load_agent_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open params file: " + path.string());
  AgentParams params;
  try {
    const auto obj = ordered_json::parse(in);
    params.alpha = obj.at("alpha").get<double>();
    params.beta = obj.at("beta").get<double>();
    params.w = obj.at("w").get<double>();
    params.perseveration = obj.value("perseveration", 0.0);
  } catch (const ordered_json::exception& e) {
    throw ParseError("params " + path.string() + ": " + e.what());
  }
  params.validate();
  return params;
}

void save_agent_params(const AgentParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write params file: " + path.string());
  ordered_json obj;
  obj["alpha"] = params.alpha;
  obj["beta"] = params.beta;
  obj["w"] = params.w;
  obj["perseveration"] = params.perseveration;
  out << obj.dump(2) << "\n";
}

}  // namespace lapiths::agents
