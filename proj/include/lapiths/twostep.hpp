#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace lapiths::twostep {

// Canonical task alphabet: stage-1 actions S/C, second-stage states blue/red
// with actions D/R on blue and G/V on red. Alternate cover stories relabel
// these through a LabelMap without touching the structure.
struct Labels {
  std::array<std::string, 2> stage1{{"S", "C"}};
  std::array<std::string, 2> states{{"blue", "red"}};
  std::array<std::array<std::string, 2>, 2> stage2{{{{"D", "R"}}, {{"G", "V"}}}};

  int stage1_index(const std::string& action) const;           // -1 if unknown
  int state_index(const std::string& state) const;             // -1 if unknown
  int stage2_index(int state, const std::string& action) const;  // -1 if unknown
};

enum class TransitionType { kCommon, kRare };

std::string to_string(TransitionType type);
TransitionType transition_type_from_string(const std::string& text);

// One trial of the task as stored on disk: the realized destination of each
// stage-1 action, the committed 0/1 outcome of every (state, action) pair,
// and the latent reward probabilities that generated those outcomes. The
// latent probs are analysis metadata; online reward uses outcome only.
struct TrialScheme {
  int trial = 0;
  bool is_common = true;
  std::string planet_if_s;
  std::string planet_if_c;
  std::map<std::string, std::map<std::string, int>> outcome;
  std::map<std::string, std::map<std::string, double>> probs;

  void validate(const Labels& labels = {}) const;
  bool operator==(const TrialScheme&) const = default;
};

struct SessionConfig {
  int n_trials = 150;
  double common_prob = 0.7;
  double drift_sigma = 0.025;
  double drift_lower = 0.25;
  double drift_upper = 0.75;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrialRecord {
  int trial = 0;
  std::string stage1_action;
  TransitionType transition_type = TransitionType::kCommon;
  std::string reached_state;
  std::string stage2_action;
  int reward = 0;

  bool operator==(const TrialRecord&) const = default;
};

// Reflects x into [lower, upper] by mirroring at the bounds.
double reflect(double x, double lower, double upper);

// One random-walk step on each latent probability: independent N(0, sigma^2)
// increments, reflected at the bounds.
std::array<double, 4> drift(const std::array<double, 4>& probs, double sigma,
                            std::pair<double, double> bounds, std::mt19937_64& rng);

// Live transition draw: with probability common_prob the action's stored
// destination (tagged common), otherwise the other state (tagged rare).
std::pair<std::string, TransitionType> sample_transition(const std::string& stage1_action,
                                                         const TrialScheme& scheme,
                                                         double common_prob,
                                                         std::mt19937_64& rng,
                                                         const Labels& labels = {});

// Replay transition: honors the stored planet_if_* fields verbatim; the
// type is common exactly when the scheme committed a common draw.
std::pair<std::string, TransitionType> stored_transition(const std::string& stage1_action,
                                                         const TrialScheme& scheme,
                                                         const Labels& labels = {});

// The committed binary outcome for (state, action); latent probs are never
// consulted for online reward.
int outcome(const std::string& state, const std::string& stage2_action,
            const TrialScheme& scheme);

// Owns the latent reward probabilities and the generator for one session.
// Single-owner while mutable; generated schemes are immutable values.
class Session {
 public:
  explicit Session(SessionConfig config);

  // Latent probabilities in cell order (blue.D, blue.R, red.G, red.V).
  const std::array<double, 4>& latent_probs() const { return probs_; }
  int next_trial_index() const { return next_trial_; }

  TrialScheme next_trial();
  std::vector<TrialScheme> generate_all();

 private:
  SessionConfig config_;
  std::mt19937_64 rng_;
  std::array<double, 4> probs_{};
  int next_trial_ = 1;
};

std::vector<TrialScheme> generate_schemes(const SessionConfig& config);

// Scheme files hold one JSON object per trial with the fields
// is_common, planet_if_S, planet_if_C, outcome, probs, trial.
std::vector<TrialScheme> load_schemes(const std::filesystem::path& path);
void save_schemes(const std::vector<TrialScheme>& schemes, const std::filesystem::path& path);
std::string schemes_to_json(const std::vector<TrialScheme>& schemes);
std::vector<TrialScheme> schemes_from_json(const std::string& text);

// Trial records as line-delimited JSON.
std::vector<TrialRecord> load_trial_records(const std::filesystem::path& path);
void save_trial_records(const std::vector<TrialRecord>& records,
                        const std::filesystem::path& path);

// Bijective relabeling between cover stories. Maps are over individual
// labels (states and actions); unmapped labels pass through unchanged.
struct LabelMap {
  std::map<std::string, std::string> mapping;

  std::string apply(const std::string& label) const;
  LabelMap inverted() const;
  TrialScheme apply(const TrialScheme& scheme) const;
  std::vector<TrialScheme> apply(const std::vector<TrialScheme>& schemes) const;
  Labels apply(const Labels& labels) const;
};

}  // namespace lapiths::twostep
