#pragma once
#include <cmath>

#include <homsim/fock.hpp>

namespace homsim {

/// Linear-polarization angles (radians from horizontal) of the photons
/// entering through the Up and Down channels.
struct PolarizationAngles {
  double alpha = 0.0;  // Up-channel photon
  double beta = 0.0;   // Down-channel photon
};

/// Product state of one photon per input channel with the given linear
/// polarizations: (cos a * a_uH + sin a * a_uV)(cos b * a_dH + sin b * a_dV)|0>.
inline PhotonState input_state(const PolarizationAngles &angles) {
  const double ca = std::cos(angles.alpha), sa = std::sin(angles.alpha);
  const double cb = std::cos(angles.beta), sb = std::sin(angles.beta);
  auto ket = [](ModeLabel up, ModeLabel down) {
    return OccupationVector{}.with_one_more(up).with_one_more(down);
  };
  PhotonState s;
  s.accumulate(ket(mode_uH, mode_dH), ca * cb);
  s.accumulate(ket(mode_uH, mode_dV), ca * sb);
  s.accumulate(ket(mode_uV, mode_dH), sa * cb);
  s.accumulate(ket(mode_uV, mode_dV), sa * sb);
  return s;
}

/// Closed-form probability for the pair to leave split between the two
/// output channels: (1/2) sin^2(alpha - beta).
inline double split_probability(const PolarizationAngles &angles) {
  const double s = std::sin(angles.alpha - angles.beta);
  return 0.5 * s * s;
}

/// Complement of split_probability.
inline double unsplit_probability(const PolarizationAngles &angles) {
  return 1.0 - split_probability(angles);
}

/// Projection of the beamsplitter output onto the split subspace, sign
/// included and unnormalized. Antisymmetric under swapping the two input
/// polarizations.
inline PhotonState split_component(const PolarizationAngles &angles) {
  const PhotonState out = apply_beamsplitter(input_state(angles));
  PhotonState split;
  for (const auto &[occ, amp] : out.amplitudes()) {
    if (occ.spatial_count(Spatial::Up) == 1 && occ.spatial_count(Spatial::Down) == 1)
      split.accumulate(occ, amp);
  }
  return split;
}

struct SuperposedInput {
  PhotonState state;
  /// Set when alpha == beta (mod pi): the two product states coincide and
  /// no genuine superposition exists.
  bool degenerate = false;
};

/// Normalized coherent sum of the (alpha, beta) and (beta, alpha) product
/// states. Its beamsplitter image has zero split probability: the two split
/// components are exact negatives and cancel.
inline SuperposedInput superposed_input(const PolarizationAngles &angles) {
  if (std::abs(std::sin(angles.alpha - angles.beta)) < 1e-9) {
    return SuperposedInput{input_state(angles), true};
  }
  PhotonState sum = input_state(angles);
  sum += input_state(PolarizationAngles{angles.beta, angles.alpha});
  return SuperposedInput{sum.normalized(), false};
}

}  // namespace homsim
