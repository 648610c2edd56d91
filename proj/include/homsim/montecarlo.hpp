#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <homsim/errors.hpp>
#include <homsim/rng.hpp>
#include <homsim/spectral.hpp>

namespace homsim {

/// Idealized detector pair: Gaussian timing jitter of the given standard
/// deviation per detector, and the maximum |t_up - t_down| still counted
/// as a coincidence. No dead time, dark counts, or inefficiency.
struct DetectorConfig {
  double temporal_resolution = 0.0;  // [s]
  double coincidence_window = 0.0;   // [s]

  void validate() const {
    if (!(temporal_resolution >= 0.0))
      throw ValidationError("temporal_resolution must be >= 0");
    if (!(coincidence_window > 0.0))
      throw ValidationError("coincidence_window must be > 0");
  }
};

/// One seeded Monte Carlo acquisition. Identical DetectionRun values
/// produce bit-identical event streams.
struct DetectionRun {
  long long n_pairs = 0;
  std::uint64_t seed = 0;
  SpectralParams params;
  DetectorConfig detector;
};

enum class PairOutcome { SplitUpDown, BunchedUp, BunchedDown };

inline const char *to_string(PairOutcome o) {
  switch (o) {
    case PairOutcome::SplitUpDown: return "split";
    case PairOutcome::BunchedUp: return "bunched_up";
    default: return "bunched_down";
  }
}

/// One detected pair. Split events carry both channel times; bunched
/// events carry only the occupied channel's click time (the earlier of the
/// two photon arrivals, plus jitter).
struct EventRecord {
  long long pair_index = 0;
  PairOutcome outcome = PairOutcome::SplitUpDown;
  std::optional<double> t_up;
  std::optional<double> t_down;
};

struct SampledPair {
  double x = 0.0;         // arrival-time difference t1 - t2 [s]
  double sum_time = 0.0;  // t1 + t2 [s]
  PairOutcome outcome = PairOutcome::SplitUpDown;
};

/// Draws photon pairs from the arrival-time statistics of the source.
///
/// The x marginal f_plus + f_minus is inverted by lookup on a tabulated
/// cumulative (trapezoid on a tau_L/100 grid spanning +/-(delta_t +
/// 10 tau_L), linear interpolation within segments); the split/bunched
/// branch is then decided with conditional probability
/// f_minus(x) / (f_plus(x) + f_minus(x)), the bunched side uniform, and the
/// sum time drawn from the squared pump envelope, a Gaussian of mean
/// -delta_t and std dev sqrt(2) tau_p. Per pair the stream consumes, in
/// order: the x uniform, the branch uniform, the side uniform (bunched
/// only), and two uniforms for the sum-time Gaussian.
class PairSampler {
 public:
  explicit PairSampler(const SpectralParams &params) : params_(params) {
    params_.validate();
    const double half_range = params_.delta_t + 10.0 * params_.tau_L;
    const double step = params_.tau_L / 100.0;
    const int n = static_cast<int>(std::ceil(2.0 * half_range / step)) + 1;
    grid_ = TimeGrid::symmetric(half_range, n);
    cdf_.resize(n);
    cdf_[0] = 0.0;
    double prev = mixture_density(grid_.point(0));
    const double h = grid_.spacing();
    for (int i = 1; i < n; ++i) {
      const double cur = mixture_density(grid_.point(i));
      cdf_[i] = cdf_[i - 1] + 0.5 * (prev + cur) * h;
      prev = cur;
    }
    const double total = cdf_.back();
    for (double &c : cdf_) c /= total;
  }

  const SpectralParams &params() const { return params_; }

  /// f_plus(x) + f_minus(x); cross terms cancel, leaving an equal-weight
  /// two-Gaussian mixture centred at -delta_t and +delta_t.
  double mixture_density(double x) const {
    const AmplitudePair a = amplitudes_A(x, params_);
    return density_normalization(params_) * (a.plus * a.plus + a.minus * a.minus);
  }

  /// Conditional probability that a pair with difference x leaves split.
  double split_fraction(double x) const {
    const AmplitudePair a = amplitudes_A(x, params_);
    const double denom = a.plus * a.plus + a.minus * a.minus;
    if (denom == 0.0) return params_.delta_t == 0.0 ? 0.0 : 0.5;
    return a.minus * a.minus / denom;
  }

  double sample_x(Rng &rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const int hi = static_cast<int>(std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                                             cdf_.size() - 1));
    const int lo = hi - 1;
    const double seg = cdf_[hi] - cdf_[lo];
    const double frac = seg > 0.0 ? (u - cdf_[lo]) / seg : 0.0;
    return grid_.point(lo) + frac * grid_.spacing();
  }

  SampledPair sample(Rng &rng) const {
    SampledPair pair;
    pair.x = sample_x(rng);
    const double u_branch = rng.uniform();
    if (u_branch < split_fraction(pair.x)) {
      pair.outcome = PairOutcome::SplitUpDown;
    } else {
      pair.outcome = rng.uniform() < 0.5 ? PairOutcome::BunchedUp : PairOutcome::BunchedDown;
    }
    pair.sum_time = -params_.delta_t + std::sqrt(2.0) * params_.tau_p * rng.gauss();
    return pair;
  }

 private:
  SpectralParams params_;
  TimeGrid grid_{};
  std::vector<double> cdf_;
};

/// One-shot convenience; builds the sampler's lookup table each call.
inline SampledPair sample_pair(const SpectralParams &params, Rng &rng) {
  return PairSampler(params).sample(rng);
}

struct RunSummary {
  long long n_pairs = 0;
  long long split_count = 0;
  long long bunched_up = 0;
  long long bunched_down = 0;
  long long coincidences_in_window = 0;
  double empirical_w_minus = 0.0;
  double standard_error = 0.0;  // binomial
  double analytic_w_minus = 0.0;
};

struct RunResult {
  std::vector<EventRecord> events;
  RunSummary summary;
};

/// Simulates a full acquisition: per-pair outcome sampling, detector jitter
/// (independent Gaussian per recorded time), and summary tallies.
inline RunResult simulate_run(const DetectionRun &run) {
  if (run.n_pairs < 1) throw ValidationError("n_pairs must be >= 1");
  run.params.validate();
  run.detector.validate();

  Rng rng(run.seed);
  const PairSampler sampler(run.params);
  const double res = run.detector.temporal_resolution;

  RunResult result;
  result.events.reserve(static_cast<std::size_t>(run.n_pairs));
  RunSummary &sum = result.summary;
  sum.n_pairs = run.n_pairs;

  for (long long i = 0; i < run.n_pairs; ++i) {
    const SampledPair pair = sampler.sample(rng);
    const double t1 = 0.5 * (pair.sum_time + pair.x);
    const double t2 = 0.5 * (pair.sum_time - pair.x);
    EventRecord event;
    event.pair_index = i;
    event.outcome = pair.outcome;
    if (pair.outcome == PairOutcome::SplitUpDown) {
      event.t_up = t1 + res * rng.gauss();
      event.t_down = t2 + res * rng.gauss();
      ++sum.split_count;
      if (std::abs(*event.t_up - *event.t_down) <= run.detector.coincidence_window)
        ++sum.coincidences_in_window;
    } else {
      const double click = std::min(t1, t2) + res * rng.gauss();
      if (pair.outcome == PairOutcome::BunchedUp) {
        event.t_up = click;
        ++sum.bunched_up;
      } else {
        event.t_down = click;
        ++sum.bunched_down;
      }
    }
    result.events.push_back(event);
  }

  const double w = static_cast<double>(sum.split_count) / static_cast<double>(run.n_pairs);
  sum.empirical_w_minus = w;
  sum.standard_error = std::sqrt(w * (1.0 - w) / static_cast<double>(run.n_pairs));
  sum.analytic_w_minus = total_probability(PairSign::Minus, run.params);
  return result;
}

/// Normalized histogram over t_up - t_down of the split events. Converges
/// to the conditional density f_minus / w_minus when the detector
/// resolution is well below tau_L and bin_width >= resolution.
struct DensityHistogram {
  double t_start = 0.0;    // left edge of the first bin [s]
  double bin_width = 0.0;  // [s]
  std::vector<double> values;  // density estimates [1/s]
  long long n_split_events = 0;
  bool empty = true;

  double center(int k) const { return t_start + (k + 0.5) * bin_width; }
};

inline DensityHistogram reconstruct_density(const std::vector<EventRecord> &events,
                                            double bin_width, const TimeGrid &range) {
  if (!(bin_width > 0.0)) throw ValidationError("bin_width must be > 0");
  range.validate();
  const double span = range.t_max - range.t_min;
  const int n_bins = std::max(1, static_cast<int>(std::lround(span / bin_width)));

  DensityHistogram hist;
  hist.t_start = range.t_min;
  hist.bin_width = span / n_bins;
  hist.values.assign(n_bins, 0.0);

  for (const EventRecord &event : events) {
    if (event.outcome != PairOutcome::SplitUpDown) continue;
    ++hist.n_split_events;
    const double diff = *event.t_up - *event.t_down;
    const int bin = static_cast<int>(std::floor((diff - range.t_min) / hist.bin_width));
    if (bin >= 0 && bin < n_bins) hist.values[bin] += 1.0;
  }
  if (hist.n_split_events == 0) return hist;  // zero-count flag, not an error

  hist.empty = false;
  const double norm = 1.0 / (static_cast<double>(hist.n_split_events) * hist.bin_width);
  for (double &v : hist.values) v *= norm;
  return hist;
}

struct DipPoint {
  double delta_t = 0.0;
  double empirical_w_minus = 0.0;
  double standard_error = 0.0;
  double analytic_w_minus = 0.0;
  std::uint64_t seed = 0;
};

/// One simulated acquisition per delay value, rows ordered by delta_t.
/// Point i runs on derived_seed(base_run.seed, i), so any row can be
/// reproduced in isolation.
inline std::vector<DipPoint> dip_scan(std::vector<double> delta_t_values,
                                      const DetectionRun &base_run) {
  if (delta_t_values.empty()) throw ValidationError("dip_scan needs at least one delta_t");
  for (double dt : delta_t_values)
    if (!(dt >= 0.0)) throw ValidationError("dip_scan delta_t values must be >= 0");
  std::sort(delta_t_values.begin(), delta_t_values.end());

  std::vector<DipPoint> table;
  table.reserve(delta_t_values.size());
  for (std::size_t i = 0; i < delta_t_values.size(); ++i) {
    DetectionRun run = base_run;
    run.params.delta_t = delta_t_values[i];
    run.seed = derived_seed(base_run.seed, i);
    const RunSummary summary = simulate_run(run).summary;
    table.push_back(DipPoint{delta_t_values[i], summary.empirical_w_minus,
                             summary.standard_error, summary.analytic_w_minus, run.seed});
  }
  return table;
}

}  // namespace homsim
