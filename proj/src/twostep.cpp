#include "lapiths/twostep.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lapiths/errors.hpp"
#include <json.hpp>

namespace lapiths::twostep {

using ordered_json = nlohmann::ordered_json;

int Labels::stage1_index(const std::string& action) const {
  if (action == stage1[0]) return 0;
  if (action == stage1[1]) return 1;
  return -1;
}

int Labels::state_index(const std::string& state) const {
  if (state == states[0]) return 0;
  if (state == states[1]) return 1;
  return -1;
}

int Labels::stage2_index(int state, const std::string& action) const {
  if (state < 0 || state > 1) return -1;
  if (action == stage2[state][0]) return 0;
  if (action == stage2[state][1]) return 1;
  return -1;
}

std::string to_string(TransitionType type) {
  return type == TransitionType::kCommon ? "common" : "rare";
}

TransitionType transition_type_from_string(const std::string& text) {
  if (text == "common") return TransitionType::kCommon;
  if (text == "rare") return TransitionType::kRare;
  throw ValidationError("unknown transition type '" + text + "'");
}

void TrialScheme::validate(const Labels& labels) const {
  const std::string where = "trial " + std::to_string(trial);
  if (trial <= 0) throw ValidationError(where + ": trial index must be positive");
  if (planet_if_s == planet_if_c) {
    throw ValidationError(where + ": planet_if_S and planet_if_C must differ");
  }
  if (labels.state_index(planet_if_s) < 0) {
    throw ValidationError(where + ": unknown state '" + planet_if_s + "' in planet_if_S");
  }
  if (labels.state_index(planet_if_c) < 0) {
    throw ValidationError(where + ": unknown state '" + planet_if_c + "' in planet_if_C");
  }
  for (int s = 0; s < 2; ++s) {
    const std::string& state = labels.states[s];
    const auto out_it = outcome.find(state);
    const auto prob_it = probs.find(state);
    if (out_it == outcome.end()) throw ValidationError(where + ": outcome." + state + " missing");
    if (prob_it == probs.end()) throw ValidationError(where + ": probs." + state + " missing");
    if (out_it->second.size() != 2 || prob_it->second.size() != 2) {
      throw ValidationError(where + ": " + state + " must have exactly two actions");
    }
    for (int a = 0; a < 2; ++a) {
      const std::string& action = labels.stage2[s][a];
      const auto o = out_it->second.find(action);
      if (o == out_it->second.end()) {
        throw ValidationError(where + ": outcome." + state + "." + action + " missing");
      }
      if (o->second != 0 && o->second != 1) {
        throw ValidationError(where + ": outcome." + state + "." + action + " must be 0 or 1");
      }
      const auto p = prob_it->second.find(action);
      if (p == prob_it->second.end()) {
        throw ValidationError(where + ": probs." + state + "." + action + " missing");
      }
      if (!(p->second >= 0.0 && p->second <= 1.0)) {
        std::ostringstream msg;
        msg << where << ": probs." << state << "." << action << " = " << p->second
            << " outside [0,1]";
        throw ValidationError(msg.str());
      }
    }
  }
}

void SessionConfig::validate() const {
  if (n_trials < 1) throw ValidationError("n_trials must be at least 1");
  if (!(common_prob > 0.5 && common_prob < 1.0)) {
    throw ValidationError("common_prob must lie in (0.5, 1), got " + std::to_string(common_prob));
  }
  if (drift_sigma < 0.0) throw ValidationError("drift_sigma must be nonnegative");
  if (!(drift_lower >= 0.0 && drift_lower < drift_upper && drift_upper <= 1.0)) {
    throw ValidationError("drift bounds must satisfy 0 <= lower < upper <= 1");
  }
}

double reflect(double x, double lower, double upper) {
  // A step larger than the interval width can bounce more than once.
  while (x < lower || x > upper) {
    if (x < lower) x = 2.0 * lower - x;
    if (x > upper) x = 2.0 * upper - x;
    if (!std::isfinite(x)) throw ValidationError("non-finite value in reflection");
  }
  return x;
}

std::array<double, 4> drift(const std::array<double, 4>& probs, double sigma,
                            std::pair<double, double> bounds, std::mt19937_64& rng) {
  if (sigma == 0.0) return probs;
  std::normal_distribution<double> step(0.0, sigma);
  std::array<double, 4> next{};
  for (std::size_t i = 0; i < probs.size(); ++i) {
    next[i] = reflect(probs[i] + step(rng), bounds.first, bounds.second);
  }
  return next;
}

namespace {

const std::string& other_state(const std::string& state, const Labels& labels) {
  return state == labels.states[0] ? labels.states[1] : labels.states[0];
}

const std::string& committed_destination(const std::string& stage1_action,
                                         const TrialScheme& scheme, const Labels& labels) {
  const int idx = labels.stage1_index(stage1_action);
  if (idx < 0) {
    throw ValidationError("unknown stage-1 action '" + stage1_action + "'");
  }
  return idx == 0 ? scheme.planet_if_s : scheme.planet_if_c;
}

}  // namespace

std::pair<std::string, TransitionType> sample_transition(const std::string& stage1_action,
                                                         const TrialScheme& scheme,
                                                         double common_prob,
                                                         std::mt19937_64& rng,
                                                         const Labels& labels) {
  if (!(common_prob >= 0.0 && common_prob <= 1.0)) {
    throw ValidationError("common_prob outside [0,1]");
  }
  const std::string& destination = committed_destination(stage1_action, scheme, labels);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  if (uniform(rng) < common_prob) {
    return {destination, TransitionType::kCommon};
  }
  return {other_state(destination, labels), TransitionType::kRare};
}

std::pair<std::string, TransitionType> stored_transition(const std::string& stage1_action,
                                                         const TrialScheme& scheme,
                                                         const Labels& labels) {
  const std::string& destination = committed_destination(stage1_action, scheme, labels);
  return {destination, scheme.is_common ? TransitionType::kCommon : TransitionType::kRare};
}

int outcome(const std::string& state, const std::string& stage2_action,
            const TrialScheme& scheme) {
  const auto state_it = scheme.outcome.find(state);
  if (state_it == scheme.outcome.end()) {
    throw ValidationError("trial " + std::to_string(scheme.trial) + ": no outcome entry for state '" +
                          state + "'");
  }
  const auto action_it = state_it->second.find(stage2_action);
  if (action_it == state_it->second.end()) {
    throw ValidationError("trial " + std::to_string(scheme.trial) + ": no outcome entry for action '" +
                          stage2_action + "' in state '" + state + "'");
  }
  return action_it->second;
}

Session::Session(SessionConfig config) : config_(config), rng_(config.seed) {
  config_.validate();
  std::uniform_real_distribution<double> uniform(config_.drift_lower, config_.drift_upper);
  for (auto& p : probs_) p = uniform(rng_);
}

TrialScheme Session::next_trial() {
  const Labels labels;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  TrialScheme scheme;
  scheme.trial = next_trial_++;
  scheme.is_common = uniform(rng_) < config_.common_prob;
  scheme.planet_if_s = scheme.is_common ? labels.states[0] : labels.states[1];
  scheme.planet_if_c = scheme.is_common ? labels.states[1] : labels.states[0];

  for (int s = 0; s < 2; ++s) {
    for (int a = 0; a < 2; ++a) {
      const double p = probs_[static_cast<std::size_t>(2 * s + a)];
      scheme.probs[labels.states[s]][labels.stage2[s][a]] = p;
      scheme.outcome[labels.states[s]][labels.stage2[s][a]] = uniform(rng_) < p ? 1 : 0;
    }
  }

  probs_ = drift(probs_, config_.drift_sigma, {config_.drift_lower, config_.drift_upper}, rng_);
  return scheme;
}

std::vector<TrialScheme> Session::generate_all() {
  std::vector<TrialScheme> schemes;
  schemes.reserve(static_cast<std::size_t>(config_.n_trials));
  for (int t = 0; t < config_.n_trials; ++t) schemes.push_back(next_trial());
  return schemes;
}

std::vector<TrialScheme> generate_schemes(const SessionConfig& config) {
  Session session(config);
  return session.generate_all();
}

// ---------------------------------------------------------------------------
// Scheme file I/O
// ---------------------------------------------------------------------------

namespace {

ordered_json scheme_to_json(const TrialScheme& scheme) {
  const Labels labels;
  ordered_json obj;
  obj["is_common"] = scheme.is_common;
  obj["planet_if_S"] = scheme.planet_if_s;
  obj["planet_if_C"] = scheme.planet_if_c;
  ordered_json outcome_obj, probs_obj;
  for (int s = 0; s < 2; ++s) {
    const std::string& state = labels.states[s];
    ordered_json state_outcome, state_probs;
    for (int a = 0; a < 2; ++a) {
      const std::string& action = labels.stage2[s][a];
      state_outcome[action] = scheme.outcome.at(state).at(action);
      state_probs[action] = scheme.probs.at(state).at(action);
    }
    outcome_obj[state] = std::move(state_outcome);
    probs_obj[state] = std::move(state_probs);
  }
  obj["outcome"] = std::move(outcome_obj);
  obj["probs"] = std::move(probs_obj);
  obj["trial"] = scheme.trial;
  return obj;
}

TrialScheme scheme_from_json(const ordered_json& obj) {
  TrialScheme scheme;
  int trial_hint = obj.contains("trial") && obj["trial"].is_number_integer()
                       ? obj["trial"].get<int>()
                       : -1;
  const std::string where =
      trial_hint > 0 ? "trial " + std::to_string(trial_hint) : "trial <unknown>";
  try {
    scheme.trial = obj.at("trial").get<int>();
    scheme.is_common = obj.at("is_common").get<bool>();
    scheme.planet_if_s = obj.at("planet_if_S").get<std::string>();
    scheme.planet_if_c = obj.at("planet_if_C").get<std::string>();
    for (const auto& [state, actions] : obj.at("outcome").items()) {
      for (const auto& [action, value] : actions.items()) {
        scheme.outcome[state][action] = value.get<int>();
      }
    }
    for (const auto& [state, actions] : obj.at("probs").items()) {
      for (const auto& [action, value] : actions.items()) {
        scheme.probs[state][action] = value.get<double>();
      }
    }
  } catch (const ordered_json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
  try {
    scheme.validate();
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  return scheme;
}

}  // namespace

std::string schemes_to_json(const std::vector<TrialScheme>& schemes) {
  ordered_json doc = ordered_json::array();
  for (const auto& scheme : schemes) doc.push_back(scheme_to_json(scheme));
  return doc.dump(2) + "\n";
}

std::vector<TrialScheme> schemes_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string("scheme file: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("scheme file must contain a JSON array of trials");
  std::vector<TrialScheme> schemes;
  schemes.reserve(doc.size());
  for (const auto& obj : doc) schemes.push_back(scheme_from_json(obj));
  return schemes;
}

std::vector<TrialScheme> load_schemes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scheme file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return schemes_from_json(buffer.str());
}

void save_schemes(const std::vector<TrialScheme>& schemes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write scheme file: " + path.string());
  out << schemes_to_json(schemes);
}

// ---------------------------------------------------------------------------
// Trial record I/O
// ---------------------------------------------------------------------------

std::vector<TrialRecord> load_trial_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trial record file: " + path.string());
  std::vector<TrialRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto obj = ordered_json::parse(line);
      TrialRecord rec;
      rec.trial = obj.at("trial").get<int>();
      rec.stage1_action = obj.at("stage1_action").get<std::string>();
      rec.transition_type = transition_type_from_string(obj.at("transition_type").get<std::string>());
      rec.reached_state = obj.at("reached_state").get<std::string>();
      rec.stage2_action = obj.at("stage2_action").get<std::string>();
      rec.reward = obj.at("reward").get<int>();
      records.push_back(std::move(rec));
    } catch (const ordered_json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void save_trial_records(const std::vector<TrialRecord>& records,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trial record file: " + path.string());
  for (const auto& rec : records) {
    ordered_json obj;
    obj["trial"] = rec.trial;
    obj["stage1_action"] = rec.stage1_action;
    obj["transition_type"] = to_string(rec.transition_type);
    obj["reached_state"] = rec.reached_state;
    obj["stage2_action"] = rec.stage2_action;
    obj["reward"] = rec.reward;
    out << obj.dump() << "\n";
  }
}

// ---------------------------------------------------------------------------
// Label mapping
// ---------------------------------------------------------------------------

std::string LabelMap::apply(const std::string& label) const {
  const auto it = mapping.find(label);
  return it == mapping.end() ? label : it->second;
}

LabelMap LabelMap::inverted() const {
  LabelMap inverse;
  for (const auto& [from, to] : mapping) {
    if (!inverse.mapping.emplace(to, from).second) {
      throw ValidationError("label map is not invertible: duplicate target '" + to + "'");
    }
  }
  return inverse;
}

TrialScheme LabelMap::apply(const TrialScheme& scheme) const {
  TrialScheme mapped;
  mapped.trial = scheme.trial;
  mapped.is_common = scheme.is_common;
  mapped.planet_if_s = apply(scheme.planet_if_s);
  mapped.planet_if_c = apply(scheme.planet_if_c);
  for (const auto& [state, actions] : scheme.outcome) {
    for (const auto& [action, value] : actions) {
      mapped.outcome[apply(state)][apply(action)] = value;
    }
  }
  for (const auto& [state, actions] : scheme.probs) {
    for (const auto& [action, value] : actions) {
      mapped.probs[apply(state)][apply(action)] = value;
    }
  }
  return mapped;
}

std::vector<TrialScheme> LabelMap::apply(const std::vector<TrialScheme>& schemes) const {
  std::vector<TrialScheme> mapped;
  mapped.reserve(schemes.size());
  for (const auto& scheme : schemes) mapped.push_back(apply(scheme));
  return mapped;
}

Labels LabelMap::apply(const Labels& labels) const {
  Labels mapped;
  for (int i = 0; i < 2; ++i) {
    mapped.stage1[i] = apply(labels.stage1[i]);
    mapped.states[i] = apply(labels.states[i]);
    for (int a = 0; a < 2; ++a) mapped.stage2[i][a] = apply(labels.stage2[i][a]);
  }
  return mapped;
}

}  // namespace lapiths::twostep
