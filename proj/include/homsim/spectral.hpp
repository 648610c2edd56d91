#pragma once
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <homsim/constants.hpp>
#include <homsim/errors.hpp>

namespace homsim {

/// Dispersion time set by crystal length and group-velocity dispersion:
/// sqrt(L * k1'') / 2. Governs the spread of the arrival-time difference.
inline double tau_L_from_crystal(double crystal_length, double k1_second_deriv) {
  if (!(crystal_length > 0.0) || !(k1_second_deriv > 0.0))
    throw ValidationError("tau_L_from_crystal requires positive L and k1''");
  return std::sqrt(crystal_length * k1_second_deriv) / 2.0;
}

/// Delay accumulated by lengthening the Up-channel path by delta_l.
inline double delay_from_path(double delta_l) {
  if (!(delta_l >= 0.0))
    throw ValidationError("delay_from_path requires delta_l >= 0 (the delayed channel is Up by convention)");
  return delta_l / speed_of_light;
}

/// Physical parameters of the photon-pair source and delay line. All times
/// in seconds, frequencies in rad/s. tau_L may be given directly or derived
/// from crystal data; when both are present they must agree.
struct SpectralParams {
  double tau_p = 0.0;             // pump-pulse duration [s]
  double tau_L = 0.0;             // dispersion time [s]
  double delta_t = 0.0;           // Up-channel delay [s]
  double omega_0 = 0.0;           // pump central frequency [rad/s]; 0 = unspecified
  double crystal_length = 0.0;    // [m]; 0 = unspecified
  double k1_second_deriv = 0.0;   // [s^2/m]; 0 = unspecified

  static SpectralParams from_crystal(double tau_p, double crystal_length,
                                     double k1_second_deriv, double delta_t = 0.0,
                                     double omega_0 = 0.0) {
    SpectralParams p;
    p.tau_p = tau_p;
    p.tau_L = tau_L_from_crystal(crystal_length, k1_second_deriv);
    p.delta_t = delta_t;
    p.omega_0 = omega_0;
    p.crystal_length = crystal_length;
    p.k1_second_deriv = k1_second_deriv;
    p.validate();
    return p;
  }

  bool has_crystal_data() const { return crystal_length > 0.0 && k1_second_deriv > 0.0; }

  void validate() const {
    if (!(tau_p > 0.0) || !std::isfinite(tau_p)) throw ValidationError("tau_p must be positive");
    if (!(tau_L > 0.0) || !std::isfinite(tau_L)) throw ValidationError("tau_L must be positive");
    if (!(delta_t >= 0.0) || !std::isfinite(delta_t))
      throw ValidationError("delta_t must be non-negative (delay sits in the Up channel)");
    if (has_crystal_data()) {
      const double derived = tau_L_from_crystal(crystal_length, k1_second_deriv);
      if (std::abs(tau_L - derived) > 1e-12 * derived)
        throw ValidationError("tau_L inconsistent with crystal data: given " +
                              std::to_string(tau_L) + ", derived " + std::to_string(derived));
    }
  }

  /// Dispersion constant B = c * (omega_0 / 4) * k1''.
  double dispersion_constant() const {
    if (!(omega_0 > 0.0) || !(k1_second_deriv > 0.0))
      throw ValidationError("dispersion constant requires omega_0 and k1''");
    return speed_of_light * (omega_0 / 4.0) * k1_second_deriv;
  }

  /// Dimensionless control parameter delta_t / (sqrt(8) * tau_L).
  double eta() const { return delta_t / (std::sqrt(8.0) * tau_L); }

  /// True when tau_p sits below the long-pulse validity floor of the
  /// spectral model (non-fatal; callers may warn).
  bool below_long_pulse_floor() const { return tau_p < long_pulse_floor; }

  /// Coefficient multiplying (nu1 - nu2)^2 inside the exact sinc spectrum,
  /// L*B/(2*c*omega_0). Via B = c*omega_0*k1''/4 and tau_L = sqrt(L*k1'')/2
  /// this reduces to tau_L^2/2, which is used when crystal data is absent.
  double sinc_coefficient() const {
    if (has_crystal_data() && omega_0 > 0.0)
      return crystal_length * dispersion_constant() / (2.0 * speed_of_light * omega_0);
    return 0.5 * tau_L * tau_L;
  }
};

/// Delay matching a given control parameter: delta_t = eta * sqrt(8) * tau_L.
inline double delta_t_for_eta(double eta, double tau_L) {
  if (!(eta >= 0.0)) throw ValidationError("eta must be non-negative");
  return eta * std::sqrt(8.0) * tau_L;
}

/// Uniform grid of n_points over [t_min, t_max]. Points are generated in
/// barycentric form so the endpoints are exact and a symmetric odd-count
/// grid contains x = 0 exactly.
struct TimeGrid {
  double t_min = 0.0;
  double t_max = 0.0;
  int n_points = 0;

  void validate() const {
    if (!(t_min < t_max)) throw ValidationError("TimeGrid requires t_min < t_max");
    if (n_points < 2) throw ValidationError("TimeGrid requires n_points >= 2");
  }
  double spacing() const { return (t_max - t_min) / (n_points - 1); }
  double point(int i) const {
    return (t_min * (n_points - 1 - i) + t_max * i) / (n_points - 1);
  }
  static TimeGrid symmetric(double half_width, int n_points) {
    TimeGrid g{-half_width, half_width, n_points};
    g.validate();
    return g;
  }
};

/// Frequency-plane analog of TimeGrid [rad/s]; used as both axes of the
/// square quadrature domain.
struct FrequencyGrid {
  double nu_min = 0.0;
  double nu_max = 0.0;
  int n_points = 0;

  void validate() const {
    if (!(nu_min < nu_max)) throw ValidationError("FrequencyGrid requires nu_min < nu_max");
    if (n_points < 2) throw ValidationError("FrequencyGrid requires n_points >= 2");
  }
  double spacing() const { return (nu_max - nu_min) / (n_points - 1); }
  double point(int i) const {
    return (nu_min * (n_points - 1 - i) + nu_max * i) / (n_points - 1);
  }
};

/// Spectral-amplitude model: the exact sinc phase-matching factor or its
/// Gaussian stand-in. The pump envelope is identical in both.
enum class SpectralModel { SincExact, GaussianModel };

namespace detail {
inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }
}  // namespace detail

/// Joint spectral amplitude at detunings (nu1, nu2) from the degenerate
/// central frequency, unnormalized; peak value 1 at nu1 = nu2 = 0. The
/// delay phases belong to the directional bracket and are applied by the
/// temporal transforms, not here.
inline std::complex<double> frequency_amplitude(double nu1, double nu2,
                                                const SpectralParams &params,
                                                SpectralModel model) {
  params.validate();
  const double sum = nu1 + nu2;
  const double diff = nu1 - nu2;
  const double pump = std::exp(-0.5 * sum * sum * params.tau_p * params.tau_p);
  double phase_matching;
  if (model == SpectralModel::GaussianModel) {
    phase_matching = std::exp(-0.5 * diff * diff * params.tau_L * params.tau_L);
  } else {
    phase_matching = detail::sinc(params.sinc_coefficient() * diff * diff);
  }
  return std::complex<double>{pump * phase_matching, 0.0};
}

/// The two directional components of the temporal pair amplitude: the
/// coefficient of (Up)_1 (Down)_2 and of (Down)_1 (Up)_2.
struct TemporalComponents {
  std::complex<double> up_first;
  std::complex<double> down_first;
};

/// Closed-form temporal amplitude of the Gaussian model:
///   up_first   = exp(-(t1 - t2 + dt)^2 / (8 tau_L^2))
///   down_first = exp(-(t1 - t2 - dt)^2 / (8 tau_L^2))
/// optionally carrying the common sum-time pump factor
/// exp(-(t1 + t2 + dt)^2 / (8 tau_p^2)), which cancels from every relative
/// distribution but is needed for full 2-D arrival-time densities.
inline TemporalComponents temporal_amplitude_analytic(double t1, double t2,
                                                      const SpectralParams &params,
                                                      bool include_pump_envelope) {
  params.validate();
  const double x = t1 - t2;
  const double tl2 = 8.0 * params.tau_L * params.tau_L;
  double up = std::exp(-(x + params.delta_t) * (x + params.delta_t) / tl2);
  double down = std::exp(-(x - params.delta_t) * (x - params.delta_t) / tl2);
  if (include_pump_envelope) {
    const double s = t1 + t2 + params.delta_t;
    const double pump = std::exp(-s * s / (8.0 * params.tau_p * params.tau_p));
    up *= pump;
    down *= pump;
  }
  return TemporalComponents{std::complex<double>{up, 0.0}, std::complex<double>{down, 0.0}};
}

/// Quadrature grid wide and fine enough for the numeric transform at the
/// given parameters.
inline FrequencyGrid recommended_frequency_grid(const SpectralParams &params) {
  const double half_width = 3.5 * (1.0 / params.tau_p + 1.0 / params.tau_L);
  const double target_spacing = 1.0 / (10.0 * std::max(params.tau_p, params.tau_L));
  const int n = static_cast<int>(std::ceil(2.0 * half_width / target_spacing)) + 1;
  return FrequencyGrid{-half_width, half_width, n};
}

namespace detail {
inline void check_quadrature_grid(const FrequencyGrid &grid, const SpectralParams &params) {
  grid.validate();
  // The spectral envelope lives in the rotated coordinates s = nu1 + nu2
  // (std dev 1/tau_p) and d = nu1 - nu2 (std dev 1/tau_L). The square grid
  // must contain the +/-6 sigma support rectangle, i.e. reach
  // 3 (1/tau_p + 1/tau_L) on both axes, and resolve the narrower envelope
  // with at least 8 points per standard deviation.
  const double slack = 1.0 + 1e-9;
  const double reach = 3.0 * (1.0 / params.tau_p + 1.0 / params.tau_L);
  if (-grid.nu_min * slack < reach || grid.nu_max * slack < reach)
    throw ValidationError("frequency grid does not span the spectral envelope (needs +/-" +
                          std::to_string(reach) + " rad/s)");
  const double max_spacing = 1.0 / (8.0 * std::max(params.tau_p, params.tau_L));
  if (grid.spacing() > max_spacing * slack)
    throw ValidationError("frequency grid under-resolved: spacing " +
                          std::to_string(grid.spacing()) + " rad/s exceeds " +
                          std::to_string(max_spacing));
}
}  // namespace detail

/// Temporal pair amplitude by direct 2-D trapezoid quadrature of the
/// frequency amplitude times the per-component delay phases e^{i nu1 dt} or
/// e^{i nu2 dt} and the transform kernel e^{i(nu1 t1 + nu2 t2)}. Serves as
/// the independent check of temporal_amplitude_analytic.
inline TemporalComponents temporal_amplitude_numeric(double t1, double t2,
                                                     const SpectralParams &params,
                                                     const FrequencyGrid &grid,
                                                     SpectralModel model = SpectralModel::GaussianModel) {
  params.validate();
  detail::check_quadrature_grid(grid, params);
  const int n = grid.n_points;
  const double h = grid.spacing();

  // Envelope factors depend on nu1 +/- nu2 only; tabulate over the 2n - 1
  // distinct index sums and differences.
  std::vector<double> env_sum(2 * n - 1), env_diff(2 * n - 1);
  const double sinc_coef = params.sinc_coefficient();
  for (int k = 0; k < 2 * n - 1; ++k) {
    // index sum k = i + j  ->  nu_i + nu_j; index diff k - (n-1) = i - j
    const double s =
        (grid.nu_min * (2 * (n - 1) - k) + grid.nu_max * k) / (n - 1);
    const double d = (grid.nu_max - grid.nu_min) * (k - (n - 1)) / (n - 1);
    env_sum[k] = std::exp(-0.5 * s * s * params.tau_p * params.tau_p);
    env_diff[k] = (model == SpectralModel::GaussianModel)
                      ? std::exp(-0.5 * d * d * params.tau_L * params.tau_L)
                      : detail::sinc(sinc_coef * d * d);
  }

  using cd = std::complex<double>;
  std::vector<cd> up_nu1(n), up_nu2(n), down_nu1(n), down_nu2(n);
  for (int i = 0; i < n; ++i) {
    const double nu = grid.point(i);
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;  // trapezoid weight
    up_nu1[i] = w * std::exp(cd{0.0, nu * (t1 + params.delta_t)});
    up_nu2[i] = std::exp(cd{0.0, nu * t2});
    down_nu1[i] = w * std::exp(cd{0.0, nu * t1});
    down_nu2[i] = std::exp(cd{0.0, nu * (t2 + params.delta_t)});
  }

  cd up{}, down{};
  for (int i = 0; i < n; ++i) {
    cd row_up{}, row_down{};
    for (int j = 0; j < n; ++j) {
      const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      const double env = w * env_sum[i + j] * env_diff[i - j + (n - 1)];
      row_up += env * up_nu2[j];
      row_down += env * down_nu2[j];
    }
    up += up_nu1[i] * row_up;
    down += down_nu1[i] * row_down;
  }
  return TemporalComponents{up * h * h, down * h * h};
}

struct ConvergedTemporal {
  TemporalComponents value;
  int refinements = 0;
  double last_rel_change = 0.0;
  FrequencyGrid grid;
};

/// Repeats the numeric transform on successively halved spacings until the
/// result changes by less than rel_tol in relative L2 norm.
inline ConvergedTemporal temporal_amplitude_numeric_converged(
    double t1, double t2, const SpectralParams &params,
    SpectralModel model = SpectralModel::GaussianModel, double rel_tol = 1e-8,
    int max_refinements = 4) {
  FrequencyGrid grid = recommended_frequency_grid(params);
  TemporalComponents prev = temporal_amplitude_numeric(t1, t2, params, grid, model);
  ConvergedTemporal result{prev, 0, std::numeric_limits<double>::infinity(), grid};
  for (int r = 1; r <= max_refinements; ++r) {
    FrequencyGrid finer{grid.nu_min, grid.nu_max, 2 * grid.n_points - 1};
    const TemporalComponents cur = temporal_amplitude_numeric(t1, t2, params, finer, model);
    const double change = std::hypot(std::abs(cur.up_first - prev.up_first),
                                     std::abs(cur.down_first - prev.down_first));
    const double scale = std::hypot(std::abs(cur.up_first), std::abs(cur.down_first));
    result = ConvergedTemporal{cur, r, change / std::max(scale, 1e-300), finer};
    if (result.last_rel_change < rel_tol) break;
    grid = finer;
    prev = cur;
  }
  return result;
}

/// Directional amplitudes of the beamsplitter output as functions of the
/// arrival-time difference x = t1 - t2:
///   plus  (unsplit, symmetric Bell factor)  = g(x + dt) + g(x - dt)
///   minus (split, antisymmetric Bell factor) = g(x + dt) - g(x - dt)
/// with g(u) = exp(-u^2 / (8 tau_L^2)).
struct AmplitudePair {
  double plus;
  double minus;
};

inline AmplitudePair amplitudes_A(double x, const SpectralParams &params) {
  const double tl2 = 8.0 * params.tau_L * params.tau_L;
  const double a = std::exp(-(x + params.delta_t) * (x + params.delta_t) / tl2);
  const double b = std::exp(-(x - params.delta_t) * (x - params.delta_t) / tl2);
  return AmplitudePair{a + b, a - b};
}

/// Which exit statistics a density or total probability refers to:
/// Plus = unsplit (bunched) pairs, Minus = split (coincidence) pairs.
enum class PairSign { Plus, Minus };

/// Global constant making integral( f_plus + f_minus ) dx = 1: one photon
/// pair per trial. Equals 1 / (8 sqrt(pi) tau_L).
inline double density_normalization(const SpectralParams &params) {
  return 1.0 / (8.0 * std::sqrt(pi) * params.tau_L);
}

/// Probability density over the arrival-time difference for unsplit (Plus)
/// or split (Minus) pairs: N * |A_sign(x)|^2.
inline double density_f(double x, PairSign sign, const SpectralParams &params) {
  const AmplitudePair a = amplitudes_A(x, params);
  const double v = (sign == PairSign::Plus) ? a.plus : a.minus;
  return density_normalization(params) * v * v;
}

/// Total probability for a pair to leave unsplit (Plus) or split (Minus):
/// (1/2) { 1 +/- exp[-(dt / (2 tau_L))^2] }.
inline double total_probability(PairSign sign, const SpectralParams &params) {
  params.validate();
  const double r = params.delta_t / (2.0 * params.tau_L);
  const double interference = std::exp(-r * r);
  return 0.5 * (sign == PairSign::Plus ? 1.0 + interference : 1.0 - interference);
}

/// The pair (A+, A-) sampled on a grid of the arrival-time difference.
struct TemporalAmplitudes {
  TimeGrid grid;
  std::vector<double> a_plus;
  std::vector<double> a_minus;
};

inline TemporalAmplitudes amplitudes_on_grid(const SpectralParams &params, const TimeGrid &grid) {
  params.validate();
  grid.validate();
  TemporalAmplitudes out{grid, {}, {}};
  out.a_plus.reserve(grid.n_points);
  out.a_minus.reserve(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const AmplitudePair a = amplitudes_A(grid.point(i), params);
    out.a_plus.push_back(a.plus);
    out.a_minus.push_back(a.minus);
  }
  return out;
}

struct Peak {
  double position;    // [s]
  double width_fwhm;  // [s]; NaN when a half-max crossing leaves the grid
};

/// Local maxima of the sampled density with quadratic sub-grid refinement
/// and linearly interpolated full-width-at-half-maximum. An isolated peak
/// of either density is the square of a Gaussian of std dev 2 tau_L, so its
/// reference FWHM is 4 sqrt(ln 2) tau_L.
inline std::vector<Peak> find_peaks(PairSign sign, const SpectralParams &params,
                                    const TimeGrid &grid) {
  params.validate();
  grid.validate();
  const double required = params.delta_t + 6.0 * params.tau_L;
  const double slack = 1.0 + 1e-9;
  if (grid.t_min * slack > -required || grid.t_max * slack < required)
    throw ValidationError("peak grid must span +/-(delta_t + 6 tau_L)");
  const double points_per_tau = params.tau_L / grid.spacing();
  if (points_per_tau * slack < 16.0)
    throw ValidationError("peak grid under-resolved: " + std::to_string(points_per_tau) +
                          " points per tau_L, need >= 16");

  const int n = grid.n_points;
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = density_f(grid.point(i), sign, params);

  const double threshold = 1e-12 * density_normalization(params);
  const double h = grid.spacing();
  std::vector<Peak> peaks;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1] && y[i] > y[i + 1] && y[i] > threshold)) continue;
    const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
    double pos = grid.point(i);
    double peak_val = y[i];
    if (denom < 0.0) {
      pos += 0.5 * h * (y[i - 1] - y[i + 1]) / denom;
      peak_val -= (y[i - 1] - y[i + 1]) * (y[i - 1] - y[i + 1]) / (8.0 * denom);
    }
    const double half = 0.5 * peak_val;
    double left = std::numeric_limits<double>::quiet_NaN();
    for (int k = i; k > 0; --k) {
      if (y[k - 1] < half && y[k] >= half) {
        left = grid.point(k - 1) + h * (half - y[k - 1]) / (y[k] - y[k - 1]);
        break;
      }
      if (y[k - 1] > y[k]) break;  // climbing into a neighbouring peak
    }
    double right = std::numeric_limits<double>::quiet_NaN();
    for (int k = i; k + 1 < n; ++k) {
      if (y[k + 1] < half && y[k] >= half) {
        right = grid.point(k) + h * (y[k] - half) / (y[k] - y[k + 1]);
        break;
      }
      if (y[k + 1] > y[k]) break;
    }
    peaks.push_back(Peak{pos, right - left});
  }
  return peaks;
}

}  // namespace homsim
