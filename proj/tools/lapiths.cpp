// Command-line front end: simulate sessions, run reference agents, ingest
// external decision/ROI logs, score MCG bundles, run comparisons, emit
// reports. Every artifact-producing command writes a manifest sidecar.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lapiths/agents.hpp"
#include "lapiths/errors.hpp"
#include "lapiths/manifest.hpp"
#include "lapiths/mcg.hpp"
#include "lapiths/report.hpp"
#include "lapiths/roi.hpp"
#include "lapiths/stats.hpp"
#include "lapiths/twostep.hpp"
#include "lapiths/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace lapiths;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void emit_manifest(const std::string& command, const std::string& config_text,
                   std::uint64_t seed, const std::vector<std::string>& inputs,
                   const std::vector<std::string>& outputs) {
  RunManifest manifest;
  manifest.command = command;
  manifest.version = kVersion;
  manifest.seed = seed;
  manifest.config_hash = fnv1a_hex(config_text);
  manifest.inputs = inputs;
  manifest.outputs = outputs;
  for (const auto& output : outputs) {
    write_manifest(manifest, manifest_path_for(output));
  }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string config_path;
  std::string out_path = "schemes.json";
  std::uint64_t seed = 0;
  std::optional<int> trials;
  std::optional<double> common_prob;
  std::optional<double> drift_sigma;
  std::optional<std::pair<double, double>> bounds;
  bool seed_given = false;
};

twostep::SessionConfig resolve_session_config(const SimulateOptions& options) {
  twostep::SessionConfig config;
  if (!options.config_path.empty()) {
    ordered_json doc;
    try {
      doc = ordered_json::parse(read_text(options.config_path));
    } catch (const ordered_json::exception& e) {
      throw ParseError("config " + options.config_path + ": " + e.what());
    }
    config.n_trials = doc.value("n_trials", config.n_trials);
    config.common_prob = doc.value("common_prob", config.common_prob);
    config.drift_sigma = doc.value("drift_sigma", config.drift_sigma);
    if (doc.contains("drift_bounds")) {
      config.drift_lower = doc["drift_bounds"].at(0).get<double>();
      config.drift_upper = doc["drift_bounds"].at(1).get<double>();
    }
    config.seed = doc.value("seed", config.seed);
  }
  if (options.trials) config.n_trials = *options.trials;
  if (options.common_prob) config.common_prob = *options.common_prob;
  if (options.drift_sigma) config.drift_sigma = *options.drift_sigma;
  if (options.bounds) {
    config.drift_lower = options.bounds->first;
    config.drift_upper = options.bounds->second;
  }
  if (options.seed_given) config.seed = options.seed;
  return config;
}

std::string session_config_json(const twostep::SessionConfig& config) {
  ordered_json doc;
  doc["n_trials"] = config.n_trials;
  doc["common_prob"] = config.common_prob;
  doc["drift_sigma"] = config.drift_sigma;
  doc["drift_bounds"] = {config.drift_lower, config.drift_upper};
  doc["seed"] = config.seed;
  return doc.dump();
}

int cmd_simulate(const SimulateOptions& options) {
  const auto config = resolve_session_config(options);
  config.validate();
  const auto schemes = twostep::generate_schemes(config);
  twostep::save_schemes(schemes, options.out_path);
  emit_manifest("simulate", session_config_json(config), config.seed,
                options.config_path.empty() ? std::vector<std::string>{}
                                            : std::vector<std::string>{options.config_path},
                {options.out_path});
  std::cout << "wrote " << schemes.size() << " trials to " << options.out_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run-agent
// ---------------------------------------------------------------------------

struct RunAgentOptions {
  std::string params_path;
  std::string schemes_path;
  std::string out_path = "decisions.jsonl";
  std::uint64_t seed = 0;
  double clamp = stats::kDefaultClamp;
};

int cmd_run_agent(const RunAgentOptions& options) {
  const auto params = agents::load_agent_params(options.params_path);
  const auto schemes = twostep::load_schemes(options.schemes_path);
  const auto log = agents::run_agent(params, schemes, options.seed);
  agents::save_decision_log(log, options.out_path);

  const auto summary = stats::nll(log, options.clamp);
  emit_manifest("run-agent", read_text(options.params_path), options.seed,
                {options.params_path, options.schemes_path}, {options.out_path});
  std::cout << "decisions: " << summary.n_decisions << "  mean NLL: " << summary.mean_nll
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// adapter
// ---------------------------------------------------------------------------

struct AdapterOptions {
  std::string schemes_path;
  std::string out_path = "decisions.jsonl";
  std::string roi_out_path;
  int retry_limit = 3;
};

struct AdapterReply {
  std::string action;
  std::optional<double> probability;
  std::optional<roi::RoiVector> betas;
};

void send_prompt(int trial, int stage, const std::string& text,
                 const std::optional<std::string>& state, std::optional<int> reward,
                 int retry) {
  ordered_json payload;
  payload["text"] = text;
  if (state) payload["state"] = *state;
  if (reward) payload["reward"] = *reward;
  if (retry > 0) payload["retry"] = retry;
  ordered_json msg;
  msg["direction"] = "prompt";
  msg["trial"] = trial;
  msg["stage"] = stage;
  msg["payload"] = std::move(payload);
  std::cout << msg.dump() << "\n" << std::flush;
}

std::optional<AdapterReply> try_parse_reply(const std::string& line, int trial, int stage,
                                            const std::vector<std::string>& alphabet,
                                            std::string& why) {
  ordered_json msg;
  try {
    msg = ordered_json::parse(line);
  } catch (const ordered_json::exception& e) {
    why = std::string("not JSON: ") + e.what();
    return std::nullopt;
  }
  if (msg.value("direction", "") != "reply") {
    why = "direction must be 'reply'";
    return std::nullopt;
  }
  if (msg.contains("trial") && msg["trial"].is_number_integer() &&
      msg["trial"].get<int>() != trial) {
    why = "trial mismatch";
    return std::nullopt;
  }
  if (msg.contains("stage") && msg["stage"].is_number_integer() &&
      msg["stage"].get<int>() != stage) {
    why = "stage mismatch";
    return std::nullopt;
  }
  if (!msg.contains("payload") || !msg["payload"].contains("action")) {
    why = "missing payload.action";
    return std::nullopt;
  }
  AdapterReply reply;
  try {
    reply.action = msg["payload"]["action"].get<std::string>();
    if (msg["payload"].contains("probability") && !msg["payload"]["probability"].is_null()) {
      const double p = msg["payload"]["probability"].get<double>();
      if (!(p >= 0.0 && p <= 1.0)) {
        why = "probability outside [0,1]";
        return std::nullopt;
      }
      reply.probability = p;
    }
    if (msg["payload"].contains("roi_betas") && !msg["payload"]["roi_betas"].is_null()) {
      std::map<std::string, double> betas;
      for (const auto& [name, value] : msg["payload"]["roi_betas"].items()) {
        betas[name] = value.get<double>();
      }
      reply.betas = roi::RoiVector::from_map(betas, "reply trial " + std::to_string(trial));
    }
  } catch (const std::exception& e) {
    why = e.what();
    return std::nullopt;
  }
  bool known = false;
  for (const auto& token : alphabet) known = known || token == reply.action;
  if (!known) {
    why = "action '" + reply.action + "' not in the alphabet";
    return std::nullopt;
  }
  return reply;
}

int cmd_adapter(const AdapterOptions& options) {
  const auto schemes = twostep::load_schemes(options.schemes_path);
  const twostep::Labels labels;

  agents::DecisionLog log;
  roi::RoiSeries series;
  int decision_index = 0;
  bool aborted = false;

  auto collect_reply = [&](int trial, int stage, const std::string& text,
                           const std::optional<std::string>& state,
                           const std::vector<std::string>& alphabet)
      -> std::optional<AdapterReply> {
    for (int attempt = 0; attempt <= options.retry_limit; ++attempt) {
      send_prompt(trial, stage, text, state, std::nullopt, attempt);
      std::string line;
      if (!std::getline(std::cin, line)) return std::nullopt;  // counterpart hung up
      std::string why;
      if (auto reply = try_parse_reply(line, trial, stage, alphabet, why)) return reply;
      std::cerr << "trial " << trial << " stage " << stage << ": rejected reply (" << why
                << ")\n";
    }
    return std::nullopt;
  };

  for (const auto& scheme : schemes) {
    const auto stage1 = collect_reply(scheme.trial, 1, "Stage 1", std::nullopt,
                                      {labels.stage1[0], labels.stage1[1]});
    if (!stage1) {
      aborted = true;
      break;
    }
    const auto [state, type] = twostep::stored_transition(stage1->action, scheme);
    const int state_idx = labels.state_index(state);

    const auto stage2 =
        collect_reply(scheme.trial, 2, "Stage 2", state,
                      {labels.stage2[state_idx][0], labels.stage2[state_idx][1]});
    if (!stage2) {
      aborted = true;
      // Keep the stage-1 half of the aborted trial in the partial log.
      log.push_back({scheme.trial, 1, stage1->action, stage1->probability, 0, type});
      if (stage1->betas) series.entries.push_back({++decision_index, 1, *stage1->betas});
      break;
    }

    const int reward = twostep::outcome(state, stage2->action, scheme);
    send_prompt(scheme.trial, 2, "Outcome", state, reward, 0);

    log.push_back({scheme.trial, 1, stage1->action, stage1->probability, reward, type});
    log.push_back({scheme.trial, 2, stage2->action, stage2->probability, reward, type});
    ++decision_index;
    if (stage1->betas) series.entries.push_back({decision_index, 1, *stage1->betas});
    ++decision_index;
    if (stage2->betas) series.entries.push_back({decision_index, 2, *stage2->betas});
  }

  if (!aborted) {
    send_prompt(static_cast<int>(schemes.size()), 0, "Done", std::nullopt, std::nullopt, 0);
  }

  std::vector<std::string> outputs{options.out_path};
  agents::save_decision_log(log, options.out_path);
  if (!options.roi_out_path.empty() && !series.entries.empty()) {
    roi::save_roi_series(series, options.roi_out_path);
    outputs.push_back(options.roi_out_path);
  }
  emit_manifest("adapter", "retry_limit=" + std::to_string(options.retry_limit), 0,
                {options.schemes_path}, outputs);

  if (aborted) {
    std::cerr << "session aborted after " << log.size() << " decisions; partial log written to "
              << options.out_path << "\n";
    return kExitValidation;
  }
  std::cout << "recorded " << log.size() << " decisions to " << options.out_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report output plumbing
// ---------------------------------------------------------------------------

struct OutputOptions {
  std::string out_path;
  std::string format = "md";
};

int emit_report(const std::string& command, const std::string& report_json,
                const OutputOptions& output, const std::vector<std::string>& inputs,
                const std::string& config_text) {
  const auto format = report::format_from_string(output.format);
  const std::string rendered = report::render_report_json(report_json, format);
  if (output.out_path.empty()) {
    std::cout << rendered;
  } else {
    write_text(output.out_path, rendered);
    emit_manifest(command, config_text, 0, inputs, {output.out_path});
    std::cout << "wrote " << output.out_path << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// score-mcg
// ---------------------------------------------------------------------------

struct ScoreMcgOptions {
  std::string bundle_path;
  OutputOptions output;
  std::optional<double> epsilon;
  std::optional<std::vector<double>> weights;
};

int cmd_score_mcg(const ScoreMcgOptions& options) {
  auto bundle = mcg::load_bundle(options.bundle_path);
  if (options.epsilon) bundle.epsilon = *options.epsilon;
  if (options.weights) {
    if (options.weights->size() != 3) {
      throw ValidationError("--weights takes exactly three values: lambda mu nu");
    }
    bundle.weights = {(*options.weights)[0], (*options.weights)[1], (*options.weights)[2]};
  }
  const auto mcg_report = report::make_mcg_report(bundle);
  return emit_report("score-mcg", report::mcg_report_json(mcg_report), options.output,
                     {options.bundle_path}, read_text(options.bundle_path));
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitOptions {
  std::string log_path;
  std::string schemes_path;
  std::string out_path;
};

int cmd_fit(const FitOptions& options) {
  const auto log = agents::load_decision_log(options.log_path);
  const auto schemes = twostep::load_schemes(options.schemes_path);
  const auto fit = agents::fit_params(log, schemes);
  std::cout << "alpha=" << fit.params.alpha << " beta=" << fit.params.beta
            << " w=" << fit.params.w << " perseveration=" << fit.params.perseveration
            << " mean_nll=" << fit.mean_nll << "\n";
  if (!options.out_path.empty()) {
    agents::save_agent_params(fit.params, options.out_path);
    emit_manifest("fit", "", 0, {options.log_path, options.schemes_path}, {options.out_path});
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct CompareOptions {
  std::vector<std::string> log_paths;  // files or directories
  std::string baselines_path;
  OutputOptions output;
  double clamp = stats::kDefaultClamp;
};

std::vector<stats::BaselineSpec> load_baselines(const fs::path& path, double clamp) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(read_text(path));
  } catch (const ordered_json::exception& e) {
    throw ParseError("baselines " + path.string() + ": " + e.what());
  }
  if (!doc.contains("baselines") || !doc["baselines"].is_array()) {
    throw ParseError("baselines file must contain a 'baselines' array");
  }
  std::vector<stats::BaselineSpec> baselines;
  try {
    for (const auto& entry : doc["baselines"]) {
      stats::BaselineSpec spec;
      spec.name = entry.at("name").get<std::string>();
      if (entry.contains("log")) {
        // Moments taken from a recorded decision log instead of a printed CI.
        fs::path log_path = entry["log"].get<std::string>();
        if (log_path.is_relative()) log_path = path.parent_path() / log_path;
        const auto log = agents::load_decision_log(log_path);
        const auto summary = stats::nll(log, clamp);
        spec.mean = summary.mean_nll;
        spec.ci95_halfwidth = summary.ci95_halfwidth;
        spec.n = summary.n_decisions;
      } else {
        spec.mean = entry.at("mean").get<double>();
        spec.ci95_halfwidth = entry.at("ci95_halfwidth").get<double>();
        spec.n = entry.value("n", 300);
      }
      spec.validate();
      baselines.push_back(std::move(spec));
    }
  } catch (const ordered_json::exception& e) {
    throw ParseError("baselines " + path.string() + ": " + e.what());
  }
  return baselines;
}

int cmd_compare(const CompareOptions& options) {
  std::vector<std::string> files;
  for (const auto& path : options.log_paths) {
    if (fs::is_directory(path)) {
      std::vector<std::string> in_dir;
      for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.path().extension() == ".jsonl") in_dir.push_back(entry.path().string());
      }
      std::sort(in_dir.begin(), in_dir.end());
      files.insert(files.end(), in_dir.begin(), in_dir.end());
    } else {
      files.push_back(path);
    }
  }
  if (files.empty()) throw ValidationError("no decision logs given to compare");

  // Aggregate parse failures before refusing to emit anything.
  std::vector<std::pair<std::string, std::vector<double>>> samples;
  std::vector<std::string> failures;
  for (const auto& file : files) {
    try {
      const auto log = agents::load_decision_log(file);
      samples.emplace_back(fs::path(file).stem().string(),
                           stats::per_decision_nll(log, options.clamp));
    } catch (const IoError&) {
      throw;  // a missing file is not a parse failure
    } catch (const std::exception& e) {
      failures.push_back(e.what());
    }
  }
  if (!failures.empty()) {
    for (const auto& failure : failures) std::cerr << failure << "\n";
    throw ValidationError(std::to_string(failures.size()) + " log file(s) failed to parse");
  }

  const auto baselines = load_baselines(options.baselines_path, options.clamp);
  const auto rows = stats::compare_all(samples, baselines);

  report::WelchReport welch_report;
  for (const auto& baseline : baselines) welch_report.baseline_names.push_back(baseline.name);
  welch_report.rows = rows;

  std::vector<std::string> inputs = files;
  inputs.push_back(options.baselines_path);
  return emit_report("compare", report::welch_report_json(welch_report), options.output,
                     inputs, "clamp=" + std::to_string(options.clamp));
}

// ---------------------------------------------------------------------------
// roi
// ---------------------------------------------------------------------------

struct RoiOptions {
  std::vector<std::string> model_paths;
  std::string reference_path;
  OutputOptions output;
};

int cmd_roi(const RoiOptions& options) {
  const auto reference = roi::load_roi_series(options.reference_path);

  report::RoiReport roi_report;
  roi_report.reference = fs::path(options.reference_path).filename().string();
  std::vector<std::string> failures;
  for (const auto& path : options.model_paths) {
    try {
      const auto series = roi::load_roi_series(path);
      roi_report.rows.push_back(
          {fs::path(path).stem().string(), roi::summarize(series, reference)});
    } catch (const IoError&) {
      throw;  // a missing file is not a parse failure
    } catch (const std::exception& e) {
      failures.push_back(e.what());
    }
  }
  if (!failures.empty()) {
    for (const auto& failure : failures) std::cerr << failure << "\n";
    throw ValidationError(std::to_string(failures.size()) + " series file(s) failed");
  }

  std::vector<std::string> inputs = options.model_paths;
  inputs.push_back(options.reference_path);
  return emit_report("roi", report::roi_report_json(roi_report), options.output, inputs, "");
}

// ---------------------------------------------------------------------------
// report (re-render a JSON report)
// ---------------------------------------------------------------------------

struct ReportOptions {
  std::string in_path;
  OutputOptions output;
};

int cmd_report(const ReportOptions& options) {
  const auto json_text = read_text(options.in_path);
  return emit_report("report", json_text, options.output, {options.in_path}, "");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LAPITHS evaluation toolkit: two-step task simulation, reference agents,\n"
               "behavioral-fit statistics, MCG plausibility scoring and ROI similarity"};
  app.require_subcommand(1);

  SimulateOptions simulate_options;
  auto* simulate = app.add_subcommand("simulate", "Generate a trial-scheme file");
  simulate->add_option("--config", simulate_options.config_path, "Session config JSON");
  auto* seed_opt = simulate->add_option("--seed", simulate_options.seed, "RNG seed");
  simulate->add_option("--out", simulate_options.out_path, "Output scheme file");
  int trials_flag = 0;
  auto* trials_opt =
      simulate->add_option("--trials", trials_flag, "Number of trials (default 150)");
  double common_flag = 0, sigma_flag = 0;
  auto* common_opt =
      simulate->add_option("--common-prob", common_flag, "Common transition probability");
  auto* sigma_opt = simulate->add_option("--drift-sigma", sigma_flag, "Random-walk step size");
  std::vector<double> bounds_flag;
  auto* bounds_opt =
      simulate->add_option("--bounds", bounds_flag, "Reward probability bounds: lower upper")
          ->expected(2);
  simulate->callback([&] {
    simulate_options.seed_given = seed_opt->count() > 0 || simulate_options.config_path.empty();
    if (trials_opt->count()) simulate_options.trials = trials_flag;
    if (common_opt->count()) simulate_options.common_prob = common_flag;
    if (sigma_opt->count()) simulate_options.drift_sigma = sigma_flag;
    if (bounds_opt->count()) simulate_options.bounds = {bounds_flag[0], bounds_flag[1]};
  });

  RunAgentOptions run_options;
  auto* run = app.add_subcommand("run-agent", "Run a reference agent over a scheme file");
  run->add_option("--params", run_options.params_path, "Agent params JSON")->required();
  run->add_option("--schemes", run_options.schemes_path, "Trial scheme file")->required();
  run->add_option("--seed", run_options.seed, "RNG seed");
  run->add_option("--out", run_options.out_path, "Output decision log");
  run->add_option("--clamp", run_options.clamp, "Probability floor for the NLL summary");

  AdapterOptions adapter_options;
  auto* adapter = app.add_subcommand(
      "adapter", "Serve trials to an external agent over stdin/stdout (JSON lines)");
  adapter->add_option("--schemes", adapter_options.schemes_path, "Trial scheme file")
      ->required();
  adapter->add_option("--out", adapter_options.out_path, "Output decision log");
  adapter->add_option("--roi-out", adapter_options.roi_out_path,
                      "ROI series output (written when replies carry roi_betas)");
  adapter->add_option("--retry-limit", adapter_options.retry_limit,
                      "Re-prompts before aborting on malformed replies");

  ScoreMcgOptions mcg_options;
  auto* score = app.add_subcommand("score-mcg", "Score a plausibility bundle");
  score->add_option("--bundle", mcg_options.bundle_path, "Scoring bundle JSON")->required();
  score->add_option("--out", mcg_options.output.out_path, "Report output path");
  score->add_option("--format", mcg_options.output.format, "csv, json or md");
  double epsilon_flag = 0;
  auto* epsilon_opt = score->add_option("--epsilon", epsilon_flag, "FSR epsilon override");
  std::vector<double> weight_flags;
  auto* weights_opt =
      score->add_option("--weights", weight_flags, "Plausibility weights: lambda mu nu")
          ->expected(3);
  score->callback([&] {
    if (epsilon_opt->count()) mcg_options.epsilon = epsilon_flag;
    if (weights_opt->count()) mcg_options.weights = weight_flags;
  });

  FitOptions fit_options;
  auto* fit = app.add_subcommand("fit", "Fit hybrid agent parameters to a decision log");
  fit->add_option("--log", fit_options.log_path, "Decision log")->required();
  fit->add_option("--schemes", fit_options.schemes_path, "Trial scheme file")->required();
  fit->add_option("--out", fit_options.out_path, "Fitted params output JSON");

  CompareOptions compare_options;
  auto* compare = app.add_subcommand("compare", "Welch comparison of logs against baselines");
  compare->add_option("--logs", compare_options.log_paths,
                      "Decision log files or directories of .jsonl logs")
      ->required();
  compare->add_option("--baselines", compare_options.baselines_path, "Baseline spec JSON")
      ->required();
  compare->add_option("--out", compare_options.output.out_path, "Report output path");
  compare->add_option("--format", compare_options.output.format, "csv, json or md");
  compare->add_option("--clamp", compare_options.clamp, "Probability floor for NLL terms");

  RoiOptions roi_options;
  auto* roi_cmd = app.add_subcommand("roi", "ROI similarity of model series vs a reference");
  roi_cmd->add_option("--model", roi_options.model_paths, "Model ROI series (repeatable)")
      ->required();
  roi_cmd->add_option("--reference", roi_options.reference_path, "Reference ROI series")
      ->required();
  roi_cmd->add_option("--out", roi_options.output.out_path, "Report output path");
  roi_cmd->add_option("--format", roi_options.output.format, "csv, json or md");

  ReportOptions report_options;
  auto* rerender = app.add_subcommand("report", "Re-render a JSON report as csv or md");
  rerender->add_option("--in", report_options.in_path, "Report JSON path")->required();
  rerender->add_option("--out", report_options.output.out_path, "Output path");
  rerender->add_option("--format", report_options.output.format, "csv, json or md");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(simulate_options);
    if (run->parsed()) return cmd_run_agent(run_options);
    if (adapter->parsed()) return cmd_adapter(adapter_options);
    if (score->parsed()) return cmd_score_mcg(mcg_options);
    if (fit->parsed()) return cmd_fit(fit_options);
    if (compare->parsed()) return cmd_compare(compare_options);
    if (roi_cmd->parsed()) return cmd_roi(roi_options);
    if (rerender->parsed()) return cmd_report(report_options);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
