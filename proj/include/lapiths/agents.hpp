#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lapiths/twostep.hpp"

namespace lapiths::agents {

// The model-based planner assumes this transition structure; it is told to
// the agent, not learned.
inline constexpr double kDefaultModelCommonProb = 0.7;

struct AgentParams {
  double alpha = 0.5;          // learning rate in (0,1]
  double beta = 5.0;           // softmax inverse temperature >= 0
  double w = 0.5;              // model-based weight in [0,1]
  double perseveration = 0.0;  // stage-1 stickiness bonus

  void validate() const;

  // beta = 0 makes every choice a fair coin regardless of the other fields.
  static AgentParams uniform_random() { return {1.0, 0.0, 0.0, 0.0}; }
};

struct AgentState {
  std::array<double, 2> q_stage1{};                  // model-free values for S/C
  std::array<std::array<double, 2>, 2> q_stage2{};   // [state][action]
  std::optional<int> last_stage1_action;
};

struct DecisionRecord {
  int trial = 0;
  int stage = 0;  // 1 or 2
  std::string action;
  std::optional<double> prob_assigned;  // probability the model gave its choice
  int reward = 0;                       // trial-level outcome, repeated on both stages
  twostep::TransitionType transition_type = twostep::TransitionType::kCommon;

  bool operator==(const DecisionRecord&) const = default;
};
using DecisionLog = std::vector<DecisionRecord>;

// Stay probabilities conditioned on the previous trial's outcome:
// indexed [rewarded ? 1 : 0][common ? 1 : 0].
struct StaySignature {
  std::array<std::array<double, 2>, 2> stay_prob{};
  std::array<std::array<int, 2>, 2> counts{};

  // MB agents switch more after rewarded rare transitions; this contrast is
  // near zero for pure MF agents.
  double interaction() const;
  double reward_transition_gap() const;  // |P(stay|rew,common) - P(stay|rew,rare)|
};

// TD update for one completed trial: the stage-2 estimate moves toward the
// reward first, then the stage-1 action backs up from the updated stage-2
// value. No other entries change.
AgentState mf_update(const AgentState& state, int stage1_action, int reached_state,
                     int stage2_action, int reward, double alpha);

// Stage-1 values from a full transition matrix; each row must sum to 1.
// V(s') is the greedy max over the state's stage-2 values.
std::array<double, 2> mb_values(const std::array<std::array<double, 2>, 2>& q_stage2,
                                const std::array<std::array<double, 2>, 2>& transition);

// Canonical matrix: action 0 commonly reaches state 0, action 1 state 1.
std::array<double, 2> mb_values(const std::array<std::array<double, 2>, 2>& q_stage2,
                                double common_prob);

// Softmax over two values with an optional stickiness bonus on the
// previously chosen action. Probabilities sum to 1 exactly.
std::array<double, 2> policy(const std::array<double, 2>& values, double beta,
                             double perseveration = 0.0,
                             std::optional<int> last_action = std::nullopt);

std::array<double, 2> hybrid_values(const std::array<double, 2>& q_mf,
                                    const std::array<double, 2>& q_mb, double w);

// Steps a hybrid agent through schemes. Shared by the live runner and the
// log replayer so both produce bit-identical probabilities.
class HybridAgent {
 public:
  HybridAgent(const AgentParams& params, double model_common_prob = kDefaultModelCommonProb);

  std::array<double, 2> stage1_probs() const;
  std::array<double, 2> stage2_probs(int reached_state) const;
  void observe(int stage1_action, int reached_state, int stage2_action, int reward);
  const AgentState& state() const { return state_; }

 private:
  AgentParams params_;
  double model_common_prob_;
  AgentState state_;
};

// Replays stored schemes with sampled choices: two decision records per
// trial, each carrying the probability the agent gave its chosen action.
// Deterministic for equal (params, schemes, seed).
DecisionLog run_agent(const AgentParams& params, const std::vector<twostep::TrialScheme>& schemes,
                      std::uint64_t seed,
                      double model_common_prob = kDefaultModelCommonProb);

// Probability the agent assigns to each logged choice, in log order.
// Replaying the generating agent reproduces its recorded probabilities
// exactly.
std::vector<double> replay_probabilities(const AgentParams& params, const DecisionLog& log,
                                         const std::vector<twostep::TrialScheme>& schemes,
                                         double model_common_prob = kDefaultModelCommonProb);

StaySignature stay_signature(const DecisionLog& log,
                             const std::vector<twostep::TrialScheme>& schemes);

struct ParamRange {
  double lower = 0.0;
  double upper = 0.0;
  bool frozen() const { return lower == upper; }
};

struct ParamBounds {
  ParamRange alpha{0.05, 1.0};
  ParamRange beta{0.0, 10.0};
  ParamRange w{0.0, 1.0};
  ParamRange perseveration{0.0, 0.0};
};

struct FitResult {
  AgentParams params;
  double mean_nll = 0.0;
};

// Maximum-likelihood fit of the hybrid agent: 11-point grid per free
// dimension, then Nelder-Mead refinement clamped to the bounds. The result
// never exceeds the best grid point.
FitResult fit_params(const DecisionLog& log, const std::vector<twostep::TrialScheme>& schemes,
                     const ParamBounds& bounds = {},
                     double model_common_prob = kDefaultModelCommonProb);

// Decision logs as line-delimited JSON records
// {trial, stage, action, prob_assigned, reward, transition_type}.
DecisionLog load_decision_log(const std::filesystem::path& path);
void save_decision_log(const DecisionLog& log, const std::filesystem::path& path);
std::string decision_log_to_jsonl(const DecisionLog& log);
DecisionLog decision_log_from_jsonl(const std::string& text, const std::string& origin = "log");

AgentParams load_agent_params(const std::filesystem::path& path);
void save_agent_params(const AgentParams& params, const std::filesystem::path& path);

}  // namespace lapiths::agents
