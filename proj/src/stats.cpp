#include "lapiths/stats.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "lapiths/errors.hpp"

namespace lapiths::stats {

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
  int n = 0;
};

Moments moments_of(const std::vector<double>& sample) {
  Moments m;
  m.n = static_cast<int>(sample.size());
  if (m.n == 0) return m;
  for (double v : sample) m.mean += v;
  m.mean /= m.n;
  // A constant sample has exactly zero spread; summation noise must not
  // turn it into a nonzero variance.
  bool constant = true;
  for (double v : sample) constant = constant && v == sample.front();
  if (constant) {
    m.mean = sample.front();
    return m;
  }
  if (m.n > 1) {
    double ss = 0.0;
    for (double v : sample) {
      const double d = v - m.mean;
      ss += d * d;
    }
    m.sd = std::sqrt(ss / (m.n - 1));
  }
  return m;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double standard_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Regularized incomplete beta function I_x(a, b) by the Lentz continued
// fraction, switching to the symmetric form for fast convergence.
double ibeta_cf(double a, double b, double x) {
  constexpr int kMaxIterations = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * ibeta_cf(a, b, x) / a;
  }
  return 1.0 - front * ibeta_cf(b, a, 1.0 - x) / b;
}

}  // namespace

void BaselineSpec::validate() const {
  if (n < 2) throw ValidationError("baseline '" + name + "': n must be at least 2");
  if (ci95_halfwidth < 0.0) {
    throw ValidationError("baseline '" + name + "': CI halfwidth must be nonnegative");
  }
  if (!std::isfinite(mean)) throw ValidationError("baseline '" + name + "': non-finite mean");
}

std::vector<double> per_decision_nll(const agents::DecisionLog& log, double clamp) {
  if (log.empty()) throw ValidationError("decision log is empty");
  if (!(clamp > 0.0 && clamp <= 1.0)) {
    throw ValidationError("probability clamp must lie in (0,1]");
  }
  std::vector<double> terms;
  terms.reserve(log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& rec = log[i];
    if (!rec.prob_assigned) {
      throw ValidationError("decision " + std::to_string(i + 1) + " (trial " +
                            std::to_string(rec.trial) + " stage " + std::to_string(rec.stage) +
                            ") has no recorded probability");
    }
    const double p = *rec.prob_assigned;
    if (!(p >= 0.0 && p <= 1.0)) {
      std::ostringstream msg;
      msg << "decision " << (i + 1) << " (trial " << rec.trial << " stage " << rec.stage
          << ") has probability " << p << " outside [0,1]";
      throw ValidationError(msg.str());
    }
    terms.push_back(-std::log(std::max(p, clamp)));
  }
  return terms;
}

NllSummary summarize_nll_terms(const std::vector<double>& terms) {
  if (terms.empty()) throw ValidationError("no NLL terms to summarize");
  NllSummary summary;
  summary.n_decisions = static_cast<int>(terms.size());
  for (double t : terms) summary.total_nll += t;
  // Matches moments_of: a constant sample reports its exact value as the
  // mean, so comparing a log against its own summary is a perfect match.
  const auto m = moments_of(terms);
  summary.mean_nll = m.sd == 0.0 ? m.mean : summary.total_nll / summary.n_decisions;
  summary.ci95_halfwidth =
      summary.n_decisions > 1 ? ci_from_sd(m.sd, summary.n_decisions) : 0.0;
  return summary;
}

NllSummary nll(const agents::DecisionLog& log, double clamp) {
  return summarize_nll_terms(per_decision_nll(log, clamp));
}

NllSummary nll_of_probabilities(const std::vector<double>& probabilities, double clamp) {
  if (probabilities.empty()) throw ValidationError("no probabilities to summarize");
  if (!(clamp > 0.0 && clamp <= 1.0)) {
    throw ValidationError("probability clamp must lie in (0,1]");
  }
  std::vector<double> terms;
  terms.reserve(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("probability " + std::to_string(i + 1) + " outside [0,1]");
    }
    terms.push_back(-std::log(std::max(p, clamp)));
  }
  return summarize_nll_terms(terms);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ValidationError("normal quantile requires p in (0,1)");
  }
  // Acklam's rational approximation, then one Newton step against erfc.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double err = standard_normal_cdf(x) - p;
  x -= err / standard_normal_pdf(x);
  return x;
}

namespace {

double two_sided_z(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ValidationError("confidence must lie in (0,1)");
  }
  return normal_quantile(1.0 - (1.0 - confidence) / 2.0);
}

}  // namespace

double sd_from_ci(double halfwidth, int n, double confidence) {
  if (n < 2) throw ValidationError("CI inversion requires n >= 2");
  if (halfwidth < 0.0) throw ValidationError("CI halfwidth must be nonnegative");
  return halfwidth * std::sqrt(static_cast<double>(n)) / two_sided_z(confidence);
}

double ci_from_sd(double sd, int n, double confidence) {
  if (n < 2) throw ValidationError("CI requires n >= 2");
  if (sd < 0.0) throw ValidationError("standard deviation must be nonnegative");
  return two_sided_z(confidence) * sd / std::sqrt(static_cast<double>(n));
}

double t_cdf(double x, double df) {
  if (!(df > 0.0)) throw ValidationError("t distribution requires df > 0");
  if (std::isnan(x)) throw ValidationError("t_cdf given NaN");
  if (std::isinf(x)) return x > 0.0 ? 1.0 : 0.0;
  if (x == 0.0) return 0.5;
  const double tail = 0.5 * ibeta(df / 2.0, 0.5, df / (df + x * x));
  return x > 0.0 ? 1.0 - tail : tail;
}

WelchResult welch_from_moments(double mean_a, double sd_a, int n_a, double mean_b, double sd_b,
                               int n_b) {
  if (n_a < 2 || n_b < 2) throw ValidationError("Welch test requires n >= 2 on both sides");
  if (!std::isfinite(sd_a) || !std::isfinite(sd_b)) {
    throw ValidationError("Welch test requires finite variances");
  }

  WelchResult result;
  result.mean_delta = mean_a - mean_b;
  const double va = sd_a * sd_a / n_a;
  const double vb = sd_b * sd_b / n_b;
  const double se2 = va + vb;

  if (se2 == 0.0) {
    // No spread on either side: equal means are a perfect match, unequal
    // means are infinitely separated.
    if (result.mean_delta == 0.0) {
      result.t_statistic = 0.0;
      result.df = static_cast<double>(n_a + n_b - 2);
      result.p_value = 1.0;
    } else {
      result.t_statistic = std::copysign(std::numeric_limits<double>::infinity(),
                                         result.mean_delta);
      result.df = static_cast<double>(n_a + n_b - 2);
      result.p_value = 0.0;
      result.degenerate = true;
    }
    return result;
  }

  result.t_statistic = result.mean_delta / std::sqrt(se2);
  result.df = se2 * se2 / (va * va / (n_a - 1) + vb * vb / (n_b - 1));
  result.p_value = 2.0 * t_cdf(-std::abs(result.t_statistic), result.df);
  return result;
}

WelchResult welch(const std::vector<double>& sample_a, const std::vector<double>& sample_b) {
  const auto a = moments_of(sample_a);
  const auto b = moments_of(sample_b);
  return welch_from_moments(a.mean, a.sd, a.n, b.mean, b.sd, b.n);
}

WelchResult welch(const std::vector<double>& sample_a, const BaselineSpec& baseline) {
  baseline.validate();
  const auto a = moments_of(sample_a);
  const double sd_b = sd_from_ci(baseline.ci95_halfwidth, baseline.n);
  return welch_from_moments(a.mean, a.sd, a.n, baseline.mean, sd_b, baseline.n);
}

std::vector<ComparisonRow> compare_all(
    const std::vector<std::pair<std::string, std::vector<double>>>& samples,
    const std::vector<BaselineSpec>& baselines) {
  std::set<std::string> sample_names;
  for (const auto& [name, _] : samples) {
    if (!sample_names.insert(name).second) {
      throw ValidationError("duplicate sample name '" + name + "'");
    }
  }
  std::set<std::string> baseline_names;
  for (const auto& baseline : baselines) {
    if (!baseline_names.insert(baseline.name).second) {
      throw ValidationError("duplicate baseline name '" + baseline.name + "'");
    }
  }

  std::vector<ComparisonRow> rows;
  rows.reserve(samples.size() * baselines.size());
  for (const auto& [name, sample] : samples) {
    for (const auto& baseline : baselines) {
      const auto result = welch(sample, baseline);
      rows.push_back({name, baseline.name, result.mean_delta, result.t_statistic, result.df,
                      result.p_value});
    }
  }
  return rows;
}

}  // namespace lapiths::stats
