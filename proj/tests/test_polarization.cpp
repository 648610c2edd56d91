// Polarization-mismatch analysis: the closed-form split probability
// (1/2) sin^2(alpha - beta) is checked against the full mode-operator
// pipeline, and the interference-restoring superposition is checked for
// exact split-amplitude cancellation.

#include <doctest.h>

#include <cmath>
#include <random>

#include <homsim/polarization.hpp>

using namespace homsim;

namespace {

const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
const double pi_ = 3.14159265358979323846;

OccupationVector occ_of(std::initializer_list<ModeLabel> modes) {
  OccupationVector occ;
  for (ModeLabel m : modes) occ = occ.with_one_more(m);
  return occ;
}

std::mt19937_64 angles_rng(777);

PolarizationAngles random_angles() {
  std::uniform_real_distribution<double> u(-2.0 * pi_, 2.0 * pi_);
  return PolarizationAngles{u(angles_rng), u(angles_rng)};
}

}  // namespace

TEST_CASE("input states for reference angle pairs") {
  const PhotonState both_h = input_state({0.0, 0.0});
  CHECK(both_h.amplitude(occ_of({mode_uH, mode_dH})) == complexd{1.0});
  CHECK(both_h.amplitudes().size() == 1);

  const PhotonState orthogonal = input_state({0.0, pi_ / 2.0});
  CHECK(std::abs(orthogonal.amplitude(occ_of({mode_uH, mode_dV})) - complexd{1.0}) < 1e-15);
  CHECK(std::abs(orthogonal.amplitude(occ_of({mode_uH, mode_dH}))) < 1e-16);

  const PhotonState diagonal = input_state({pi_ / 4.0, pi_ / 4.0});
  for (const auto &[occ, amp] : diagonal.amplitudes())
    CHECK(std::abs(amp - complexd{0.5}) < 1e-15);
  CHECK(diagonal.amplitudes().size() == 4);
  CHECK(diagonal.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("closed-form split probability at landmark angles") {
  CHECK(split_probability({0.3, 0.3}) == 0.0);
  CHECK(split_probability({0.0, pi_ / 2.0}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(split_probability({pi_ / 2.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(split_probability({0.0, pi_ / 4.0}) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("closed form matches the mode-operator pipeline for 1000 angle pairs") {
  for (int trial = 0; trial < 1000; ++trial) {
    const PolarizationAngles angles = random_angles();
    const double pipeline = split_probability_of(apply_beamsplitter(input_state(angles)));
    CHECK(std::abs(pipeline - split_probability(angles)) < 1e-12);
  }
}

TEST_CASE("split and unsplit probabilities sum to one exactly") {
  for (int trial = 0; trial < 100; ++trial) {
    const PolarizationAngles angles = random_angles();
    CHECK(split_probability(angles) + unsplit_probability(angles) == 1.0);
  }
}

TEST_CASE("probabilities have period pi in either angle") {
  for (int trial = 0; trial < 100; ++trial) {
    const PolarizationAngles angles = random_angles();
    const PolarizationAngles shifted{angles.alpha + pi_, angles.beta};
    CHECK(std::abs(split_probability(shifted) - split_probability(angles)) < 1e-12);
    const double p1 = split_probability_of(apply_beamsplitter(input_state(angles)));
    const double p2 = split_probability_of(apply_beamsplitter(input_state(shifted)));
    CHECK(std::abs(p1 - p2) < 1e-12);
    CHECK(equal_up_to_global_phase(input_state(angles), input_state(shifted)));
  }
}

TEST_CASE("split component vanishes for equal polarizations") {
  CHECK(split_component({0.9, 0.9}).is_zero());
}

TEST_CASE("split component matches -sin(alpha-beta)/2 times the Bell-type difference") {
  // reference case alpha = 0, beta = pi/2: coefficient -sin(-pi/2)/2 = +1/2
  const PhotonState s = split_component({0.0, pi_ / 2.0});
  CHECK(std::abs(s.amplitude(occ_of({mode_uH, mode_dV})) - complexd{0.5}) < 1e-14);
  CHECK(std::abs(s.amplitude(occ_of({mode_uV, mode_dH})) + complexd{0.5}) < 1e-14);

  for (int trial = 0; trial < 100; ++trial) {
    const PolarizationAngles angles = random_angles();
    const PhotonState comp = split_component(angles);
    const double coeff = -std::sin(angles.alpha - angles.beta) / 2.0;
    CHECK(std::abs(comp.amplitude(occ_of({mode_uH, mode_dV})) - complexd{coeff}) < 1e-14);
    CHECK(std::abs(comp.amplitude(occ_of({mode_uV, mode_dH})) + complexd{coeff}) < 1e-14);
    // its squared norm is the split probability itself
    CHECK(comp.norm_squared() == doctest::Approx(split_probability(angles)).epsilon(1e-12));
  }
}

TEST_CASE("swapping the input polarizations negates the split component") {
  for (int trial = 0; trial < 100; ++trial) {
    const PolarizationAngles angles = random_angles();
    PhotonState sum = split_component(angles);
    sum += split_component({angles.beta, angles.alpha});
    double largest = 0.0;
    for (const auto &[occ, amp] : sum.amplitudes()) largest = std::max(largest, std::abs(amp));
    CHECK(largest < 1e-14);
  }
}

TEST_CASE("H-V superposition restores the interference dip") {
  const SuperposedInput hv = superposed_input({0.0, pi_ / 2.0});
  CHECK(!hv.degenerate);
  CHECK(std::abs(hv.state.amplitude(occ_of({mode_uH, mode_dV})) - complexd{inv_sqrt2}) < 1e-14);
  CHECK(std::abs(hv.state.amplitude(occ_of({mode_uV, mode_dH})) - complexd{inv_sqrt2}) < 1e-14);
  CHECK(split_probability_of(apply_beamsplitter(hv.state)) == 0.0);
}

TEST_CASE("superposed inputs cancel the split output for arbitrary angles") {
  for (int trial = 0; trial < 100; ++trial) {
    PolarizationAngles angles = random_angles();
    if (std::abs(std::sin(angles.alpha - angles.beta)) < 1e-6) angles.beta += 0.5;
    const SuperposedInput sup = superposed_input(angles);
    REQUIRE(!sup.degenerate);
    CHECK(sup.state.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(split_probability_of(apply_beamsplitter(sup.state)) < 1e-12);
  }
}

TEST_CASE("degenerate angle pairs fall back to the plain product state") {
  const SuperposedInput same = superposed_input({0.4, 0.4});
  CHECK(same.degenerate);
  CHECK(equal_up_to_global_phase(same.state, input_state({0.4, 0.4})));

  // beta = alpha + pi yields the same product state up to sign
  const SuperposedInput pi_shift = superposed_input({0.4, 0.4 + pi_});
  CHECK(pi_shift.degenerate);
}

TEST_CASE("norm of the raw superposition follows the product-state overlap") {
  // <psi(a,b)|psi(b,a)> = cos^2(a-b), so |sum|^2 = 2 + 2 cos^2(a-b)
  const PhotonState s1 = input_state({0.0, pi_ / 3.0});
  const PhotonState s2 = input_state({pi_ / 3.0, 0.0});
  const complexd overlap = inner_product(s1, s2);
  CHECK(std::abs(overlap - complexd{0.25}) < 1e-14);

  PhotonState raw = s1;
  raw += s2;
  CHECK(raw.norm() == doctest::Approx(std::sqrt(2.5)).epsilon(1e-14));
  CHECK(raw.norm() == doctest::Approx(1.5811388300841898).epsilon(1e-14));

  for (int trial = 0; trial < 50; ++trial) {
    const PolarizationAngles angles = random_angles();
    PhotonState sum = input_state(angles);
    sum += input_state({angles.beta, angles.alpha});
    const double c = std::cos(angles.alpha - angles.beta);
    CHECK(sum.norm_squared() == doctest::Approx(2.0 + 2.0 * c * c).epsilon(1e-12));
  }
}
