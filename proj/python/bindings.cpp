#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lapiths/agents.hpp"
#include "lapiths/errors.hpp"
#include "lapiths/mcg.hpp"
#include "lapiths/report.hpp"
#include "lapiths/roi.hpp"
#include "lapiths/stats.hpp"
#include "lapiths/twostep.hpp"
#include "lapiths/version.hpp"

namespace py = pybind11;
using namespace lapiths;

namespace {

mcg::ErrorIndicator indicator_from_py(const py::object& value) {
  if (value.is_none()) return mcg::ErrorIndicator::kMissing;
  const int v = value.cast<int>();
  if (v == 1) return mcg::ErrorIndicator::kMatch;
  if (v == -1) return mcg::ErrorIndicator::kMismatch;
  throw ValidationError("error indicator must be 1, -1 or None");
}

py::dict scores_to_dict(const mcg::McgScores& scores) {
  py::dict out;
  out["structural_score"] = scores.fsr.structural_score;
  out["functional_score"] = scores.fsr.functional_score;
  out["raw_ratio"] = scores.fsr.raw_ratio;
  out["fsr_normalized"] = scores.fsr.normalized;
  out["generality"] = scores.generality;
  out["mean_abs_delta"] = scores.mean_abs_delta;
  out["accuracy"] = scores.performance.accuracy;
  out["error_pattern"] = scores.performance.error_pattern;
  out["timing"] = scores.performance.timing;
  out["performance_match"] = scores.performance.performance_match;
  out["plausibility"] = scores.plausibility.score;
  return out;
}

}  // namespace

PYBIND11_MODULE(_lapiths, m) {
  m.doc() = "Cognitive-plausibility scoring, two-step task simulation, reference RL "
            "agents, behavioral-fit statistics and ROI similarity";
  m.attr("__version__") = kVersion;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  // --- MCG -----------------------------------------------------------------
  m.def("fsr", &mcg::fsr, py::arg("structural"), py::arg("functional"),
        py::arg("epsilon") = mcg::kDefaultEpsilon,
        "Raw functional/structural ratio F / (S + epsilon)");
  m.def("normalize_fsr", &mcg::normalize_fsr, py::arg("raw_ratio"));
  m.def(
      "generality",
      [](double quantitative, double fluid, double visual, double language,
         double sensorimotor) {
        return mcg::generality({quantitative, fluid, visual, language, sensorimotor});
      },
      py::arg("quantitative"), py::arg("fluid"), py::arg("visual"), py::arg("language"),
      py::arg("sensorimotor"));
  m.def("accuracy_score", &mcg::accuracy_score, py::arg("deltas"));
  m.def(
      "error_pattern_score",
      [](const std::vector<py::object>& indicators) {
        std::vector<mcg::ErrorIndicator> converted;
        converted.reserve(indicators.size());
        for (const auto& v : indicators) converted.push_back(indicator_from_py(v));
        return mcg::error_pattern_score(converted);
      },
      py::arg("indicators"), "Indicators are 1, -1 or None; None entries are excluded");
  m.def("timing_score", &mcg::timing_score, py::arg("pairs"));
  m.def(
      "plausibility",
      [](double fsr_normalized, double generality_score, double performance_match,
         double lambda_weight, double mu, double nu) {
        return mcg::plausibility(fsr_normalized, generality_score, performance_match,
                                 {lambda_weight, mu, nu})
            .score;
      },
      py::arg("fsr_normalized"), py::arg("generality"), py::arg("performance_match"),
      py::arg("lambda_weight") = 0.5, py::arg("mu") = 0.25, py::arg("nu") = 0.25);
  m.def(
      "score_mcg_bundle",
      [](const std::filesystem::path& path) {
        return scores_to_dict(mcg::score_bundle(mcg::load_bundle(path)));
      },
      py::arg("path"), "Score a JSON bundle; returns the full-precision score dict");
  m.def(
      "mcg_report",
      [](const std::filesystem::path& path, const std::string& format) {
        const auto mcg_report = report::make_mcg_report(mcg::load_bundle(path));
        return report::render_report_json(report::mcg_report_json(mcg_report),
                                          report::format_from_string(format));
      },
      py::arg("path"), py::arg("format") = "md",
      "Render the four-table report for a bundle as csv, json or md");

  // --- Two-step task ---------------------------------------------------------
  py::class_<twostep::SessionConfig>(m, "SessionConfig")
      .def(py::init([](int n_trials, double common_prob, double drift_sigma, double drift_lower,
                       double drift_upper, std::uint64_t seed) {
             twostep::SessionConfig config{n_trials, common_prob, drift_sigma,
                                           drift_lower,  drift_upper, seed};
             config.validate();
             return config;
           }),
           py::arg("n_trials") = 150, py::arg("common_prob") = 0.7,
           py::arg("drift_sigma") = 0.025, py::arg("drift_lower") = 0.25,
           py::arg("drift_upper") = 0.75, py::arg("seed") = 0)
      .def_readwrite("n_trials", &twostep::SessionConfig::n_trials)
      .def_readwrite("common_prob", &twostep::SessionConfig::common_prob)
      .def_readwrite("drift_sigma", &twostep::SessionConfig::drift_sigma)
      .def_readwrite("drift_lower", &twostep::SessionConfig::drift_lower)
      .def_readwrite("drift_upper", &twostep::SessionConfig::drift_upper)
      .def_readwrite("seed", &twostep::SessionConfig::seed);

  py::class_<twostep::TrialScheme>(m, "TrialScheme")
      .def(py::init<>())
      .def_readwrite("trial", &twostep::TrialScheme::trial)
      .def_readwrite("is_common", &twostep::TrialScheme::is_common)
      .def_readwrite("planet_if_S", &twostep::TrialScheme::planet_if_s)
      .def_readwrite("planet_if_C", &twostep::TrialScheme::planet_if_c)
      .def_readwrite("outcome", &twostep::TrialScheme::outcome)
      .def_readwrite("probs", &twostep::TrialScheme::probs)
      .def("__eq__", [](const twostep::TrialScheme& a,
                        const twostep::TrialScheme& b) { return a == b; })
      .def("__repr__", [](const twostep::TrialScheme& s) {
        return "<TrialScheme trial=" + std::to_string(s.trial) + ">";
      });

  m.def("generate_schemes", &twostep::generate_schemes, py::arg("config"));
  m.def("load_schemes", &twostep::load_schemes, py::arg("path"));
  m.def("save_schemes", &twostep::save_schemes, py::arg("schemes"), py::arg("path"));

  // --- Agents ----------------------------------------------------------------
  py::class_<agents::AgentParams>(m, "AgentParams")
      .def(py::init([](double alpha, double beta, double w, double perseveration) {
             agents::AgentParams params{alpha, beta, w, perseveration};
             params.validate();
             return params;
           }),
           py::arg("alpha") = 0.5, py::arg("beta") = 5.0, py::arg("w") = 0.5,
           py::arg("perseveration") = 0.0)
      .def_readwrite("alpha", &agents::AgentParams::alpha)
      .def_readwrite("beta", &agents::AgentParams::beta)
      .def_readwrite("w", &agents::AgentParams::w)
      .def_readwrite("perseveration", &agents::AgentParams::perseveration)
      .def_static("uniform_random", &agents::AgentParams::uniform_random);

  py::class_<agents::DecisionRecord>(m, "DecisionRecord")
      .def(py::init<>())
      .def_readwrite("trial", &agents::DecisionRecord::trial)
      .def_readwrite("stage", &agents::DecisionRecord::stage)
      .def_readwrite("action", &agents::DecisionRecord::action)
      .def_readwrite("prob_assigned", &agents::DecisionRecord::prob_assigned)
      .def_readwrite("reward", &agents::DecisionRecord::reward)
      .def_property(
          "transition_type",
          [](const agents::DecisionRecord& r) { return twostep::to_string(r.transition_type); },
          [](agents::DecisionRecord& r, const std::string& v) {
            r.transition_type = twostep::transition_type_from_string(v);
          })
      .def("__repr__", [](const agents::DecisionRecord& r) {
        return "<DecisionRecord trial=" + std::to_string(r.trial) + " stage=" +
               std::to_string(r.stage) + " action=" + r.action + ">";
      });

  py::class_<agents::StaySignature>(m, "StaySignature")
      .def_readonly("stay_prob", &agents::StaySignature::stay_prob,
                    "Indexed [rewarded][common]")
      .def_readonly("counts", &agents::StaySignature::counts)
      .def("interaction", &agents::StaySignature::interaction)
      .def("reward_transition_gap", &agents::StaySignature::reward_transition_gap);

  py::class_<agents::FitResult>(m, "FitResult")
      .def_readonly("params", &agents::FitResult::params)
      .def_readonly("mean_nll", &agents::FitResult::mean_nll);

  m.def("run_agent", &agents::run_agent, py::arg("params"), py::arg("schemes"),
        py::arg("seed") = 0, py::arg("model_common_prob") = agents::kDefaultModelCommonProb);
  m.def("replay_probabilities", &agents::replay_probabilities, py::arg("params"),
        py::arg("log"), py::arg("schemes"),
        py::arg("model_common_prob") = agents::kDefaultModelCommonProb);
  m.def("stay_signature", &agents::stay_signature, py::arg("log"), py::arg("schemes"));
  m.def(
      "fit_params",
      [](const agents::DecisionLog& log, const std::vector<twostep::TrialScheme>& schemes) {
        return agents::fit_params(log, schemes);
      },
      py::arg("log"), py::arg("schemes"));
  m.def("load_decision_log", &agents::load_decision_log, py::arg("path"));
  m.def("save_decision_log", &agents::save_decision_log, py::arg("log"), py::arg("path"));

  // --- Statistics --------------------------------------------------------------
  py::class_<stats::NllSummary>(m, "NllSummary")
      .def_readonly("total_nll", &stats::NllSummary::total_nll)
      .def_readonly("mean_nll", &stats::NllSummary::mean_nll)
      .def_readonly("n_decisions", &stats::NllSummary::n_decisions)
      .def_readonly("ci95_halfwidth", &stats::NllSummary::ci95_halfwidth);

  py::class_<stats::WelchResult>(m, "WelchResult")
      .def_readonly("mean_delta", &stats::WelchResult::mean_delta)
      .def_readonly("t_statistic", &stats::WelchResult::t_statistic)
      .def_readonly("df", &stats::WelchResult::df)
      .def_readonly("p_value", &stats::WelchResult::p_value)
      .def_readonly("degenerate", &stats::WelchResult::degenerate);

  m.def("nll", py::overload_cast<const agents::DecisionLog&, double>(&stats::nll),
        py::arg("log"), py::arg("clamp") = stats::kDefaultClamp);
  m.def("nll_of_probabilities", &stats::nll_of_probabilities, py::arg("probabilities"),
        py::arg("clamp") = stats::kDefaultClamp);
  m.def("sd_from_ci", &stats::sd_from_ci, py::arg("halfwidth"), py::arg("n"),
        py::arg("confidence") = 0.95);
  m.def("ci_from_sd", &stats::ci_from_sd, py::arg("sd"), py::arg("n"),
        py::arg("confidence") = 0.95);
  m.def("t_cdf", &stats::t_cdf, py::arg("x"), py::arg("df"));
  m.def("welch",
        py::overload_cast<const std::vector<double>&, const std::vector<double>&>(
            &stats::welch),
        py::arg("sample_a"), py::arg("sample_b"));
  m.def(
      "welch_vs_baseline",
      [](const std::vector<double>& sample, double mean, double ci95_halfwidth, int n) {
        return stats::welch(sample, stats::BaselineSpec{"baseline", mean, ci95_halfwidth, n});
      },
      py::arg("sample"), py::arg("mean"), py::arg("ci95_halfwidth"), py::arg("n") = 300);

  // --- ROI similarity -----------------------------------------------------------
  py::class_<roi::SimilaritySummary>(m, "SimilaritySummary")
      .def_readonly("mean_pearson", &roi::SimilaritySummary::mean_pearson)
      .def_readonly("mean_cosine", &roi::SimilaritySummary::mean_cosine)
      .def_readonly("mean_mse", &roi::SimilaritySummary::mean_mse)
      .def_readonly("mean_rmse", &roi::SimilaritySummary::mean_rmse)
      .def_readonly("mean_mae", &roi::SimilaritySummary::mean_mae)
      .def_readonly("mean_euclidean", &roi::SimilaritySummary::mean_euclidean)
      .def_readonly("n_decisions", &roi::SimilaritySummary::n_decisions)
      .def_readonly("undefined_pearson", &roi::SimilaritySummary::undefined_pearson)
      .def_readonly("undefined_cosine", &roi::SimilaritySummary::undefined_cosine);

  m.def("canonical_roi_names", [] {
    return std::vector<std::string>(roi::canonical_roi_names().begin(),
                                    roi::canonical_roi_names().end());
  });
  m.def(
      "pearson",
      [](const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
        return roi::pearson(roi::RoiVector::from_map(a), roi::RoiVector::from_map(b));
      },
      py::arg("a"), py::arg("b"), "Named beta dicts over the 14 canonical ROIs");
  m.def(
      "cosine",
      [](const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
        return roi::cosine(roi::RoiVector::from_map(a), roi::RoiVector::from_map(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "magnitude_errors",
      [](const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
        const auto e =
            roi::magnitude_errors(roi::RoiVector::from_map(a), roi::RoiVector::from_map(b));
        py::dict out;
        out["mse"] = e.mse;
        out["rmse"] = e.rmse;
        out["mae"] = e.mae;
        out["euclidean"] = e.euclidean;
        return out;
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "roi_summarize",
      [](const std::filesystem::path& model, const std::filesystem::path& reference) {
        return roi::summarize(roi::load_roi_series(model), roi::load_roi_series(reference));
      },
      py::arg("model_path"), py::arg("reference_path"));
  m.def("synthetic_roi_reference", &roi::synthetic_reference, py::arg("n_decisions"),
        py::arg("seed"), py::arg("jitter_sigma") = 0.25);
  py::class_<roi::RoiVector>(m, "RoiVector")
      .def_static("from_dict",
                  [](const std::map<std::string, double>& betas) {
                    return roi::RoiVector::from_map(betas);
                  })
      .def("to_dict", &roi::RoiVector::to_map)
      .def_readonly("betas", &roi::RoiVector::betas);
  py::class_<roi::RoiEntry>(m, "RoiEntry")
      .def_readonly("decision", &roi::RoiEntry::decision)
      .def_readonly("stage", &roi::RoiEntry::stage)
      .def_readonly("betas", &roi::RoiEntry::betas);
  py::class_<roi::RoiSeries>(m, "RoiSeries")
      .def_readonly("entries", &roi::RoiSeries::entries);
  m.def("load_roi_series", &roi::load_roi_series, py::arg("path"));
  m.def("save_roi_series", &roi::save_roi_series, py::arg("series"), py::arg("path"));
}
