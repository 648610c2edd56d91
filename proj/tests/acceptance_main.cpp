// Acceptance suite: end-to-end checks of the full artifact at pinned
// tolerances, one verdict line per criterion. Exits with the number of
// failed criteria.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <homsim/config.hpp>
#include <homsim/fock.hpp>
#include <homsim/montecarlo.hpp>
#include <homsim/polarization.hpp>
#include <homsim/scenarios.hpp>
#include <homsim/spectral.hpp>

using namespace homsim;
namespace fs = std::filesystem;
using complexd = std::complex<double>;

namespace {

int failures = 0;

void verdict(bool ok, const std::string &line) {
  std::printf("%s  %s\n", ok ? "PASS" : "FAIL", line.c_str());
  if (!ok) ++failures;
}

void note(const std::string &line) { std::printf("      %s\n", line.c_str()); }

double adaptive_simpson_impl(const std::function<double(double)> &f, double a, double b,
                             double fa, double fm, double fb, double whole, double tol,
                             int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_impl(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_impl(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)> &f, double a, double b,
                        double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_impl(f, a, b, fa, fm, fb, whole, tol, 48);
}

std::string slurp(const fs::path &file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::vector<double>> csv_rows(const std::string &text) {
  std::vector<std::vector<double>> rows;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(cells, cell, ',')) {
      char *end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (numeric && !row.empty()) rows.push_back(row);
  }
  return rows;
}

SpectralParams make_params(double tau_L, double delta_t, double tau_p = 10e-12) {
  SpectralParams p;
  p.tau_p = tau_p;
  p.tau_L = tau_L;
  p.delta_t = delta_t;
  return p;
}

// closed-form antiderivative pieces for integrals of the split density
double split_cdf_unnormalized(double x, const SpectralParams &p) {
  const double root_pi = std::sqrt(pi);
  const double s = 2.0 * p.tau_L;
  const double base = p.tau_L * root_pi;
  const double plus = base * std::erf((x + p.delta_t) / s);
  const double minus = base * std::erf((x - p.delta_t) / s);
  const double cross = std::exp(-p.delta_t * p.delta_t / (s * s)) * base * std::erf(x / s);
  return density_normalization(p) * (plus + minus - 2.0 * cross);
}

double mixture_cdf(double x, const SpectralParams &p) {
  return 0.5 + 0.25 * (std::erf((x + p.delta_t) / (2.0 * p.tau_L)) +
                       std::erf((x - p.delta_t) / (2.0 * p.tau_L)));
}

// -------------------------------------------------------------------------

void criterion_1_ideal() {
  const PhotonState input =
      create_photon(create_photon(PhotonState::vacuum(), mode_uH), mode_dH);
  const PhotonState out = apply_beamsplitter(input);
  OccupationVector two_up, two_down;
  two_up.counts[mode_uH.index()] = 2;
  two_down.counts[mode_dH.index()] = 2;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const double split = split_probability_of(out);
  const double amp_err = std::max(std::abs(out.amplitude(two_up) - complexd{inv_sqrt2}),
                                  std::abs(out.amplitude(two_down) + complexd{inv_sqrt2}));
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "1. ideal interference: split probability %.2e (< 1e-14), bunched amplitudes "
                "off +/-1/sqrt2 by %.2e",
                split, amp_err);
  verdict(split < 1e-14 && amp_err < 1e-14, buf);
}

void criterion_2_polarization_law() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-pi, pi);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const PolarizationAngles angles{u(rng), u(rng)};
    const double pipeline = split_probability_of(apply_beamsplitter(input_state(angles)));
    worst = std::max(worst, std::abs(pipeline - split_probability(angles)));
  }
  const double at_quarter =
      split_probability_of(apply_beamsplitter(input_state({0.0, pi / 2.0})));
  const bool ok = worst < 1e-12 && std::abs(at_quarter - 0.5) < 1e-12 &&
                  std::abs(split_probability({0.0, pi / 2.0}) - 0.5) < 1e-12;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "2. polarization law: worst |closed - pipeline| = %.2e over 1000 pairs "
                "(< 1e-12); orthogonal case gives 1/2",
                worst);
  verdict(ok, buf);
}

void criterion_3_restoration() {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-pi, pi);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    PolarizationAngles angles{u(rng), u(rng)};
    if (std::abs(std::sin(angles.alpha - angles.beta)) < 1e-6) angles.beta += 0.7;
    const SuperposedInput sup = superposed_input(angles);
    worst = std::max(worst, split_probability_of(apply_beamsplitter(sup.state)));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "3. restored interference: worst split probability %.2e over 100 superposed "
                "inputs (< 1e-12)",
                worst);
  verdict(worst < 1e-12, buf);
}

void criterion_4_fourier_oracle() {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  for (int set = 0; set < 10; ++set) {
    SpectralParams p;
    p.tau_L = 20e-15 * std::pow(10.0, u01(rng));
    p.tau_p = p.tau_L * (0.8 + 2.2 * u01(rng));
    p.delta_t = 4.0 * p.tau_L * u01(rng);
    const FrequencyGrid grid = recommended_frequency_grid(p);
    const TimeGrid lattice = TimeGrid::symmetric(3.0 * (p.tau_p + p.tau_L) + p.delta_t, 5);

    std::vector<complexd> ana, num;
    for (int i = 0; i < 5; ++i) {
      for (int k = 0; k < 5; ++k) {
        const TemporalComponents a =
            temporal_amplitude_analytic(lattice.point(i), lattice.point(k), p, true);
        const TemporalComponents n =
            temporal_amplitude_numeric(lattice.point(i), lattice.point(k), p, grid);
        ana.push_back(a.up_first);
        ana.push_back(a.down_first);
        num.push_back(n.up_first);
        num.push_back(n.down_first);
      }
    }
    complexd overlap{}, ana2{};
    double num2 = 0.0;
    for (std::size_t i = 0; i < ana.size(); ++i) {
      overlap += std::conj(ana[i]) * num[i];
      ana2 += std::conj(ana[i]) * ana[i];
      num2 += std::norm(num[i]);
    }
    const complexd scale = overlap / ana2;
    double err2 = 0.0;
    for (std::size_t i = 0; i < ana.size(); ++i) err2 += std::norm(num[i] - scale * ana[i]);
    worst = std::max(worst, std::sqrt(err2 / num2));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "4. Fourier oracle: worst relative L2 gap %.2e over 10 parameter sets, "
                "5x5 lattice (< 1e-6)",
                worst);
  verdict(worst < 1e-6, buf);
}

void criterion_5_totals() {
  const double tau_L = 1e-13;
  double worst_total = 0.0, worst_sum = 0.0;
  for (double ratio : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const SpectralParams p = make_params(tau_L, ratio * tau_L);
    const double half = p.delta_t + 10.0 * p.tau_L;
    const double integral = adaptive_simpson(
        [&](double x) { return density_f(x, PairSign::Minus, p); }, -half, half);
    const double closed = 0.5 * (1.0 - std::exp(-(p.delta_t / (2.0 * tau_L)) *
                                                (p.delta_t / (2.0 * tau_L))));
    worst_total = std::max(worst_total, std::abs(integral - closed));
    worst_sum = std::max(worst_sum,
                         std::abs(total_probability(PairSign::Plus, p) +
                                  total_probability(PairSign::Minus, p) - 1.0));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "5. closed-form totals: worst |quadrature - closed form| = %.2e, worst "
                "|w+ + w- - 1| = %.2e (< 1e-9)",
                worst_total, worst_sum);
  verdict(worst_total < 1e-9 && worst_sum < 1e-9, buf);
}

struct CsvPeaks {
  double positive = 0.0;
  double negative = 0.0;
};

// quadratically refined extrema of the f- column of a density table
CsvPeaks peaks_from_rows(const std::vector<std::vector<double>> &rows) {
  CsvPeaks peaks;
  double best_pos = -1.0, best_neg = -1.0;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    const double y0 = rows[i - 1][2], y1 = rows[i][2], y2 = rows[i + 1][2];
    if (!(y1 > y0 && y1 > y2)) continue;
    const double h = rows[i + 1][0] - rows[i][0];
    const double denom = y0 - 2.0 * y1 + y2;
    const double x = rows[i][0] + (denom < 0.0 ? 0.5 * h * (y0 - y2) / denom : 0.0);
    if (x > 0.0 && y1 > best_pos) {
      best_pos = y1;
      peaks.positive = x;
    }
    if (x < 0.0 && y1 > best_neg) {
      best_neg = y1;
      peaks.negative = x;
    }
  }
  return peaks;
}

void criterion_6_fig3(const fs::path &outdir) {
  const double tau_L = 1e-13;
  bool zero_ok = true, parity_ok = true, collapse_ok = true, peaks_ok = true;
  std::ostringstream peak_report;

  for (double eta : {0.3, 1.0, 1.3}) {
    // two dispersion times with the same control parameter, for the collapse
    std::vector<std::vector<double>> tables[2];
    const double tau_values[2] = {tau_L, 0.5 * tau_L};
    for (int variant = 0; variant < 2; ++variant) {
      ScenarioConfig cfg;
      cfg.scenario = Scenario::DelayDensity;
      cfg.tau_L = tau_values[variant];
      cfg.delta_t = delta_t_for_eta(eta, cfg.tau_L);
      cfg.x_max = cfg.delta_t + 6.0 * cfg.tau_L;
      cfg.n_points = 4001;
      cfg.float_precision = 17;
      cfg.output_path = (outdir / ("fig3_" + std::to_string(variant))).string();
      std::ostringstream sink;
      run_scenario(cfg, sink);
      tables[variant] = csv_rows(slurp(fs::path(cfg.output_path) / "delay_density.csv"));
    }

    const auto &rows = tables[0];
    const std::size_t mid = rows.size() / 2;
    zero_ok = zero_ok && rows[mid][0] == 0.0 && rows[mid][2] == 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto &mirror = rows[rows.size() - 1 - i];
      parity_ok = parity_ok && rows[i][1] == mirror[1] && rows[i][2] == mirror[2];
    }

    // rescaled tables must coincide: sqrt(8) tau_L f(x) against x/(sqrt(8) tau_L)
    double max_val = 0.0, max_gap = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (int col = 1; col <= 2; ++col) {
        const double a = std::sqrt(8.0) * tau_values[0] * tables[0][i][col];
        const double b = std::sqrt(8.0) * tau_values[1] * tables[1][i][col];
        max_val = std::max(max_val, std::abs(a));
        max_gap = std::max(max_gap, std::abs(a - b));
      }
    }
    collapse_ok = collapse_ok && max_gap < 1e-9 * max_val;

    const double delta_t = delta_t_for_eta(eta, tau_L);
    if (delta_t >= 2.0 * tau_L) {
      const CsvPeaks peaks = peaks_from_rows(rows);
      const double offset =
          std::max(std::abs(peaks.positive - delta_t), std::abs(peaks.negative + delta_t));
      char detail[128];
      std::snprintf(detail, sizeof detail, "eta=%.1f: f- peak offset from +/-delta_t = %.3e tau_L",
                    eta, offset / tau_L);
      peak_report << (peak_report.tellp() > 0 ? "; " : "") << detail;
      peaks_ok = peaks_ok && offset < 0.05 * tau_L;
    }
  }

  verdict(zero_ok && parity_ok && collapse_ok,
          "6a. density tables: f-(0) = 0, even parity, eta-rescaling collapse within 1e-9");
  verdict(peaks_ok, "6b. density tables: f- peaks within 0.05 tau_L of +/-delta_t at "
                    "delta_t >= 2 tau_L");
  note(peak_report.str());
  if (!peaks_ok)
    note("the +/-delta_t peak rule is asymptotic: the exact maximum of "
         "(g(x+dt) - g(x-dt))^2 sits ~2 dt exp(-dt^2/(2 tau_L^2)) beyond dt, which is "
         "9.2e-02 tau_L at eta = 1, above the 5e-02 tau_L bound");
}

void criterion_7_fig4(const fs::path &outdir) {
  const fs::path dir = outdir / "fig4";
  const std::string conf =
      "scenario = delay_scan\ntau_L = 100 fs\ndelta_t_max = 800 fs\nn_points = 9\n"
      "n_pairs = 100000\nseed = 20260810\nfloat_precision = 12\noutput_path = " +
      dir.string() + "\n";
  std::ostringstream sink;
  run_scenario(parse_config(conf), sink);
  const auto rows = csv_rows(slurp(dir / "delay_scan.csv"));

  bool ok = rows.size() == 9;
  double worst_analytic = 0.0, worst_sigma = 0.0;
  for (const auto &row : rows) {
    const double r = row[0] / 2e-13;
    const double expected = 0.5 * (1.0 - std::exp(-r * r));
    worst_analytic = std::max(worst_analytic, std::abs(row[2] - expected));
    const double sigma = std::sqrt(expected * (1.0 - expected) / 100000.0);
    const double gap = std::abs(row[3] - expected);
    if (sigma == 0.0)
      ok = ok && gap == 0.0;
    else
      worst_sigma = std::max(worst_sigma, gap / sigma);
  }
  ok = ok && worst_analytic < 1e-9 && worst_sigma < 3.0;
  char buf[180];
  std::snprintf(buf, sizeof buf,
                "7. dip scan table: analytic column off closed form by %.2e (< 1e-9); "
                "empirical column worst deviation %.2f sigma (< 3) at 1e5 pairs/point",
                worst_analytic, worst_sigma);
  verdict(ok, buf);
}

void criterion_8_sampler(const fs::path &) {
  const double tau_L = 1e-13;

  // Kolmogorov-Smirnov against the closed-form mixture CDF, itself verified
  // here against direct numeric integration of the density
  const SpectralParams p_ks = make_params(tau_L, 2.0 * tau_L);
  double cdf_gap = 0.0;
  for (double x : {-3e-13, -1.5e-13, 0.0, 0.8e-13, 2.0e-13, 4.0e-13}) {
    const double numeric = adaptive_simpson(
        [&](double y) {
          return density_f(y, PairSign::Plus, p_ks) + density_f(y, PairSign::Minus, p_ks);
        },
        -(p_ks.delta_t + 12.0 * tau_L), x);
    cdf_gap = std::max(cdf_gap, std::abs(numeric - mixture_cdf(x, p_ks)));
  }

  const PairSampler sampler(p_ks);
  Rng rng(31337);
  const int n = 1000000;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = sampler.sample_x(rng);
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = mixture_cdf(xs[i], p_ks);
    ks = std::max(ks, std::max(std::abs(f - static_cast<double>(i) / n),
                               std::abs(static_cast<double>(i + 1) / n - f)));
  }

  // L1 distance of the reconstructed conditional split density
  const SpectralParams p_rec = make_params(tau_L, 4.0 * tau_L);
  DetectionRun run;
  run.n_pairs = 1000000;
  run.seed = 424242;
  run.params = p_rec;
  run.detector = DetectorConfig{tau_L / 50.0, p_rec.delta_t + 10.0 * tau_L};
  const RunResult result = simulate_run(run);
  const TimeGrid range = TimeGrid::symmetric(p_rec.delta_t + 6.0 * tau_L, 2);
  const DensityHistogram hist = reconstruct_density(result.events, tau_L / 20.0, range);
  const double w_minus = total_probability(PairSign::Minus, p_rec);
  double l1 = 0.0;
  for (std::size_t k = 0; k < hist.values.size(); ++k) {
    const double a = hist.t_start + k * hist.bin_width;
    const double b = a + hist.bin_width;
    const double expected =
        (split_cdf_unnormalized(b, p_rec) - split_cdf_unnormalized(a, p_rec)) / w_minus;
    l1 += std::abs(hist.values[k] * hist.bin_width - expected);
  }

  const bool ok = cdf_gap < 1e-9 && ks < 0.002 && l1 < 0.05;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "8. sampler fidelity: KS distance %.2e over 1e6 draws (< 2e-3, oracle CDF "
                "self-check %.1e); reconstructed f- L1 gap %.3f (< 0.05)",
                ks, cdf_gap, l1);
  verdict(ok, buf);
}

void criterion_9_determinism(const fs::path &outdir) {
  const fs::path dir = outdir / "determinism";
  const std::string conf =
      "scenario = monte_carlo\ntau_L = 100 fs\ndelta_t = 200 fs\nn_pairs = 20000\n"
      "seed = 97\ntemporal_resolution = 2 fs\noutput_path = " + dir.string() + "\n";
  std::ostringstream sink;
  run_scenario(parse_config(conf), sink);
  const std::string events = slurp(dir / "events.csv");
  const std::string summary = slurp(dir / "summary.json");
  run_scenario(parse_config(conf), sink);
  const bool ok =
      events == slurp(dir / "events.csv") && summary == slurp(dir / "summary.json");
  verdict(ok, "9. determinism: rerunning the seeded sampling scenario reproduces "
              "byte-identical CSV and JSON outputs");
}

}  // namespace

int main() {
  std::printf("acceptance checks, %s\n", version_string);
  const fs::path outdir = "acceptance_out";
  fs::remove_all(outdir);

  criterion_1_ideal();
  criterion_2_polarization_law();
  criterion_3_restoration();
  criterion_4_fourier_oracle();
  criterion_5_totals();
  criterion_6_fig3(outdir);
  criterion_7_fig4(outdir);
  criterion_8_sampler(outdir);
  criterion_9_determinism(outdir);

  std::printf("%d criterion check(s) failed\n", failures);
  return failures;
}
