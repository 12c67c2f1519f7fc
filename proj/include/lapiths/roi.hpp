#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lapiths::roi {

inline constexpr std::size_t kRoiCount = 14;

// The fixed ROI whitelist, in canonical storage order. Inputs may list the
// names in any order; they are normalised on ingestion and nothing outside
// this set is accepted.
const std::array<std::string, kRoiCount>& canonical_roi_names();

struct RoiVector {
  std::array<double, kRoiCount> betas{};

  // Requires exactly the 14 canonical names with finite values; `where`
  // prefixes error messages with the offending decision.
  static RoiVector from_map(const std::map<std::string, double>& named_betas,
                            const std::string& where = "roi vector");
  std::map<std::string, double> to_map() const;

  bool operator==(const RoiVector&) const = default;
};

struct RoiEntry {
  int decision = 0;
  int stage = 0;
  RoiVector betas;

  bool operator==(const RoiEntry&) const = default;
};

struct RoiSeries {
  std::vector<RoiEntry> entries;

  void validate() const;  // strictly increasing decision indices, stages in {1,2}
  bool operator==(const RoiSeries&) const = default;
};

struct MagnitudeErrors {
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  double euclidean = 0.0;
};

// Sample Pearson correlation over the 14 paired betas; nullopt when either
// vector has zero variance (excluded from averages, counted in metadata).
std::optional<double> pearson(const RoiVector& a, const RoiVector& b);

// Cosine similarity; nullopt when either vector has zero norm.
std::optional<double> cosine(const RoiVector& a, const RoiVector& b);

MagnitudeErrors magnitude_errors(const RoiVector& a, const RoiVector& b);

struct SimilaritySummary {
  double mean_pearson = 0.0;
  double mean_cosine = 0.0;
  double mean_mse = 0.0;
  double mean_rmse = 0.0;
  double mean_mae = 0.0;
  double mean_euclidean = 0.0;
  int n_decisions = 0;
  int undefined_pearson = 0;  // decisions excluded from the Pearson mean
  int undefined_cosine = 0;   // decisions excluded from the cosine mean
};

// Per-decision metrics over aligned series, then arithmetic means. rmse and
// euclidean are computed per decision before averaging.
SimilaritySummary summarize(const RoiSeries& model, const RoiSeries& reference);

// Line-delimited JSON records {decision, stage, roi_betas}.
RoiSeries load_roi_series(const std::filesystem::path& path);
void save_roi_series(const RoiSeries& series, const std::filesystem::path& path);
std::string roi_series_to_jsonl(const RoiSeries& series);
RoiSeries roi_series_from_jsonl(const std::string& text, const std::string& origin = "roi series");

// Synthetic reference series for demos and tests: a fixed base pattern per
// stage with seeded Gaussian jitter.
RoiSeries synthetic_reference(int n_decisions, std::uint64_t seed, double jitter_sigma = 0.25);

}  // namespace lapiths::roi
