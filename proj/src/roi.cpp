#include "lapiths/roi.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "lapiths/errors.hpp"
#include <json.hpp>

namespace lapiths::roi {

using ordered_json = nlohmann::ordered_json;

const std::array<std::string, kRoiCount>& canonical_roi_names() {
  static const std::array<std::string, kRoiCount> names{{
      "X_Lateral Occipital Cortex, superior division",
      "X_Lateral Occipital Cortex, inferior division",
      "X_Intracalcarine Cortex",
      "X_Cuneal Cortex",
      "X_Lingual Gyrus",
      "X_Temporal Occipital Fusiform Cortex",
      "X_Occipital Fusiform Gyrus",
      "X_Supracalcarine Cortex",
      "X_Occipital Pole",
      "X_Left Thalamus",
      "X_Left Caudate",
      "X_Left Accumbens",
      "X_Right Thalamus",
      "X_Right Accumbens",
  }};
  return names;
}

RoiVector RoiVector::from_map(const std::map<std::string, double>& named_betas,
                              const std::string& where) {
  const auto& names = canonical_roi_names();
  if (named_betas.size() != kRoiCount) {
    // Report the first discrepancy by name: an unknown extra or a missing ROI.
    for (const auto& [name, _] : named_betas) {
      bool known = false;
      for (const auto& canonical : names) {
        if (name == canonical) {
          known = true;
          break;
        }
      }
      if (!known) throw ParseError(where + ": unknown ROI name '" + name + "'");
    }
    for (const auto& canonical : names) {
      if (named_betas.find(canonical) == named_betas.end()) {
        throw ParseError(where + ": missing ROI '" + canonical + "'");
      }
    }
    throw ParseError(where + ": expected " + std::to_string(kRoiCount) + " ROIs, got " +
                     std::to_string(named_betas.size()));
  }

  RoiVector vec;
  for (std::size_t i = 0; i < kRoiCount; ++i) {
    const auto it = named_betas.find(names[i]);
    if (it == named_betas.end()) {
      throw ParseError(where + ": missing ROI '" + names[i] + "'");
    }
    if (!std::isfinite(it->second)) {
      throw ParseError(where + ": non-finite beta for '" + names[i] + "'");
    }
    vec.betas[i] = it->second;
  }
  return vec;
}

std::map<std::string, double> RoiVector::to_map() const {
  std::map<std::string, double> out;
  const auto& names = canonical_roi_names();
  for (std::size_t i = 0; i < kRoiCount; ++i) out[names[i]] = betas[i];
  return out;
}

void RoiSeries::validate() const {
  int last_decision = 0;
  for (const auto& entry : entries) {
    if (entry.decision <= last_decision) {
      throw ValidationError("decision indices must be strictly increasing (saw " +
                            std::to_string(entry.decision) + " after " +
                            std::to_string(last_decision) + ")");
    }
    if (entry.stage != 1 && entry.stage != 2) {
      throw ValidationError("decision " + std::to_string(entry.decision) +
                            ": stage must be 1 or 2");
    }
    last_decision = entry.decision;
  }
}

std::optional<double> pearson(const RoiVector& a, const RoiVector& b) {
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < kRoiCount; ++i) {
    mean_a += a.betas[i];
    mean_b += b.betas[i];
  }
  mean_a /= kRoiCount;
  mean_b /= kRoiCount;

  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < kRoiCount; ++i) {
    const double da = a.betas[i] - mean_a;
    const double db = b.betas[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) return std::nullopt;
  return cov / std::sqrt(var_a * var_b);
}

std::optional<double> cosine(const RoiVector& a, const RoiVector& b) {
  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  for (std::size_t i = 0; i < kRoiCount; ++i) {
    dot += a.betas[i] * b.betas[i];
    norm_a += a.betas[i] * a.betas[i];
    norm_b += b.betas[i] * b.betas[i];
  }
  if (norm_a == 0.0 || norm_b == 0.0) return std::nullopt;
  return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

MagnitudeErrors magnitude_errors(const RoiVector& a, const RoiVector& b) {
  MagnitudeErrors errors;
  double ss = 0.0;
  for (std::size_t i = 0; i < kRoiCount; ++i) {
    const double d = a.betas[i] - b.betas[i];
    ss += d * d;
    errors.mae += std::abs(d);
  }
  errors.mse = ss / kRoiCount;
  errors.rmse = std::sqrt(errors.mse);
  errors.mae /= kRoiCount;
  errors.euclidean = std::sqrt(ss);
  return errors;
}

SimilaritySummary summarize(const RoiSeries& model, const RoiSeries& reference) {
  model.validate();
  reference.validate();
  if (model.entries.size() != reference.entries.size()) {
    std::ostringstream msg;
    msg << "series misaligned: model has " << model.entries.size() << " decisions, reference "
        << reference.entries.size();
    throw ValidationError(msg.str());
  }
  if (model.entries.empty()) throw ValidationError("cannot summarize empty series");

  SimilaritySummary summary;
  double pearson_sum = 0.0;
  double cosine_sum = 0.0;
  for (std::size_t i = 0; i < model.entries.size(); ++i) {
    const auto& m = model.entries[i];
    const auto& r = reference.entries[i];
    if (m.decision != r.decision || m.stage != r.stage) {
      throw ValidationError("series misaligned at position " + std::to_string(i + 1) +
                            ": model (decision " + std::to_string(m.decision) + ", stage " +
                            std::to_string(m.stage) + ") vs reference (decision " +
                            std::to_string(r.decision) + ", stage " + std::to_string(r.stage) +
                            ")");
    }
    if (const auto p = pearson(m.betas, r.betas)) {
      pearson_sum += *p;
    } else {
      ++summary.undefined_pearson;
    }
    if (const auto c = cosine(m.betas, r.betas)) {
      cosine_sum += *c;
    } else {
      ++summary.undefined_cosine;
    }
    const auto errors = magnitude_errors(m.betas, r.betas);
    summary.mean_mse += errors.mse;
    summary.mean_rmse += errors.rmse;
    summary.mean_mae += errors.mae;
    summary.mean_euclidean += errors.euclidean;
  }

  summary.n_decisions = static_cast<int>(model.entries.size());
  const int defined_pearson = summary.n_decisions - summary.undefined_pearson;
  const int defined_cosine = summary.n_decisions - summary.undefined_cosine;
  summary.mean_pearson = defined_pearson > 0 ? pearson_sum / defined_pearson : 0.0;
  summary.mean_cosine = defined_cosine > 0 ? cosine_sum / defined_cosine : 0.0;
  summary.mean_mse /= summary.n_decisions;
  summary.mean_rmse /= summary.n_decisions;
  summary.mean_mae /= summary.n_decisions;
  summary.mean_euclidean /= summary.n_decisions;
  return summary;
}

std::string roi_series_to_jsonl(const RoiSeries& series) {
  std::ostringstream out;
  const auto& names = canonical_roi_names();
  for (const auto& entry : series.entries) {
    ordered_json obj;
    obj["decision"] = entry.decision;
    obj["stage"] = entry.stage;
    ordered_json betas;
    for (std::size_t i = 0; i < kRoiCount; ++i) betas[names[i]] = entry.betas.betas[i];
    obj["roi_betas"] = std::move(betas);
    out << obj.dump() << "\n";
  }
  return out.str();
}

RoiSeries roi_series_from_jsonl(const std::string& text, const std::string& origin) {
  RoiSeries series;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    try {
      const auto obj = ordered_json::parse(line);
      RoiEntry entry;
      entry.decision = obj.at("decision").get<int>();
      entry.stage = obj.at("stage").get<int>();
      std::map<std::string, double> betas;
      for (const auto& [name, value] : obj.at("roi_betas").items()) {
        if (!value.is_number()) {
          throw ParseError(where + ": decision " + std::to_string(entry.decision) +
                           ": beta for '" + name + "' is not a number");
        }
        betas[name] = value.get<double>();
      }
      entry.betas = RoiVector::from_map(betas, where + ": decision " +
                                                   std::to_string(entry.decision));
      series.entries.push_back(std::move(entry));
    } catch (const ordered_json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  try {
    series.validate();
  } catch (const ValidationError& e) {
    throw ParseError(origin + ": " + e.what());
  }
  return series;
}

RoiSeries load_roi_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ROI series: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return roi_series_from_jsonl(buffer.str(), path.string());
}

void save_roi_series(const RoiSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write ROI series: " + path.string());
  out << roi_series_to_jsonl(series);
}

RoiSeries synthetic_reference(int n_decisions, std::uint64_t seed, double jitter_sigma) {
  if (n_decisions < 1) throw ValidationError("synthetic reference needs at least one decision");
  if (jitter_sigma < 0.0) throw ValidationError("jitter sigma must be nonnegative");

  // Typical occipital/subcortical activation profile per stage; jitter makes
  // every decision distinct while keeping the pattern stable.
  static constexpr std::array<double, kRoiCount> kStage1Base{
      0.7054, 1.5596, 2.5212, 1.4301, 1.4218, 2.0541, 3.3867,
      2.2036, 1.9935, 0.6765, 1.1106, 0.7666, 0.6471, 0.5492};
  static constexpr std::array<double, kRoiCount> kStage2Base{
      1.3451, 2.2508, 2.0702, 1.7795, 1.2649, 2.1073, 3.2903,
      2.3343, 2.6672, 0.2043, 0.3460, 0.5695, 0.1877, 0.6093};

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, jitter_sigma);
  RoiSeries series;
  series.entries.reserve(static_cast<std::size_t>(n_decisions));
  for (int d = 1; d <= n_decisions; ++d) {
    RoiEntry entry;
    entry.decision = d;
    entry.stage = d % 2 == 1 ? 1 : 2;
    const auto& base = entry.stage == 1 ? kStage1Base : kStage2Base;
    for (std::size_t i = 0; i < kRoiCount; ++i) {
      entry.betas.betas[i] = base[i] + (jitter_sigma > 0.0 ? jitter(rng) : 0.0);
    }
    series.entries.push_back(std::move(entry));
  }
  return series;
}

}  // namespace lapiths::roi
