#pragma once
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>
#include <string>

#include <homsim/errors.hpp>

namespace homsim {

using complexd = std::complex<double>;

/// Spatial channel of a beamsplitter port: upper or lower halfplane.
enum class Spatial : int { Up = 0, Down = 1 };

/// Linear polarization, horizontal or vertical.
enum class Polar : int { H = 0, V = 1 };

/// One of the four labelled bosonic modes (spatial channel x polarization).
/// The ordering (Up,H) < (Up,V) < (Down,H) < (Down,V) is fixed so that
/// state serialization is canonical.
struct ModeLabel {
  Spatial spatial;
  Polar polarization;

  constexpr int index() const {
    return 2 * static_cast<int>(spatial) + static_cast<int>(polarization);
  }
  static constexpr ModeLabel from_index(int i) {
    return ModeLabel{static_cast<Spatial>(i / 2), static_cast<Polar>(i % 2)};
  }
  static constexpr std::array<ModeLabel, 4> all() {
    return {ModeLabel{Spatial::Up, Polar::H}, ModeLabel{Spatial::Up, Polar::V},
            ModeLabel{Spatial::Down, Polar::H}, ModeLabel{Spatial::Down, Polar::V}};
  }
  std::string name() const {
    static const char *names[4] = {"uH", "uV", "dH", "dV"};
    return names[index()];
  }
  friend constexpr bool operator==(ModeLabel a, ModeLabel b) {
    return a.index() == b.index();
  }
  friend constexpr bool operator<(ModeLabel a, ModeLabel b) {
    return a.index() < b.index();
  }
};

inline constexpr ModeLabel mode_uH{Spatial::Up, Polar::H};
inline constexpr ModeLabel mode_uV{Spatial::Up, Polar::V};
inline constexpr ModeLabel mode_dH{Spatial::Down, Polar::H};
inline constexpr ModeLabel mode_dV{Spatial::Down, Polar::V};

/// Photon number per mode, indexed by ModeLabel::index().
struct OccupationVector {
  std::array<int, 4> counts{};

  int count(ModeLabel m) const { return counts[m.index()]; }
  int total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
  int spatial_count(Spatial s) const {
    const int base = 2 * static_cast<int>(s);
    return counts[base] + counts[base + 1];
  }
  int polarization_count(Polar p) const {
    const int off = static_cast<int>(p);
    return counts[off] + counts[off + 2];
  }
  OccupationVector with_one_more(ModeLabel m) const {
    OccupationVector occ = *this;
    ++occ.counts[m.index()];
    return occ;
  }

  /// Ket label, e.g. "|1_uH;1_dV>" or "|0>" for the vacuum.
  std::string ket() const {
    std::ostringstream out;
    out << '|';
    bool first = true;
    for (int i = 0; i < 4; ++i) {
      if (counts[i] == 0) continue;
      if (!first) out << ';';
      out << counts[i] << '_' << ModeLabel::from_index(i).name();
      first = false;
    }
    if (first) out << '0';
    out << '>';
    return out.str();
  }

  friend bool operator==(const OccupationVector &a, const OccupationVector &b) {
    return a.counts == b.counts;
  }
  friend bool operator<(const OccupationVector &a, const OccupationVector &b) {
    return a.counts < b.counts;
  }
};

/// A pure state with definite total photon number: complex amplitudes over
/// occupation vectors of the four labelled modes. Basis kets of mixed total
/// photon number are rejected. Exact-zero amplitudes are pruned so that
/// algebraic cancellations (the heart of two-photon interference) leave no
/// residual kets behind.
class PhotonState {
 public:
  PhotonState() = default;  // the zero state

  static PhotonState vacuum() { return basis(OccupationVector{}); }
  static PhotonState basis(const OccupationVector &occ) {
    PhotonState s;
    s.accumulate(occ, complexd{1.0, 0.0});
    return s;
  }

  const std::map<OccupationVector, complexd> &amplitudes() const { return amps_; }

  complexd amplitude(const OccupationVector &occ) const {
    auto it = amps_.find(occ);
    return it == amps_.end() ? complexd{} : it->second;
  }

  bool is_zero() const { return amps_.empty(); }

  /// Total photon number shared by every basis ket; -1 for the zero state.
  int total_photons() const {
    return amps_.empty() ? -1 : amps_.begin()->first.total();
  }

  /// Adds amp to the coefficient of |occ>, enforcing the fixed-total invariant.
  void accumulate(const OccupationVector &occ, complexd amp) {
    if (amp == complexd{}) return;
    if (!amps_.empty() && occ.total() != total_photons()) {
      throw ValidationError("mixed total photon number: ket " + occ.ket() +
                            " added to a " + std::to_string(total_photons()) +
                            "-photon state");
    }
    auto [it, inserted] = amps_.try_emplace(occ, amp);
    if (!inserted) {
      it->second += amp;
      if (it->second == complexd{}) amps_.erase(it);
    }
  }

  PhotonState &operator*=(complexd factor) {
    if (factor == complexd{}) {
      amps_.clear();
      return *this;
    }
    for (auto &[occ, amp] : amps_) amp *= factor;
    return *this;
  }

  PhotonState &operator+=(const PhotonState &other) {
    for (const auto &[occ, amp] : other.amps_) accumulate(occ, amp);
    return *this;
  }

  friend PhotonState operator*(complexd factor, PhotonState s) {
    s *= factor;
    return s;
  }
  friend PhotonState operator+(PhotonState a, const PhotonState &b) {
    a += b;
    return a;
  }

  double norm_squared() const {
    double n2 = 0.0;
    for (const auto &[occ, amp] : amps_) n2 += std::norm(amp);
    return n2;
  }
  double norm() const { return std::sqrt(norm_squared()); }

  PhotonState normalized() const {
    const double n = norm();
    if (n == 0.0) throw ValidationError("cannot normalize the zero state");
    PhotonState s = *this;
    s *= complexd{1.0 / n, 0.0};
    return s;
  }

 private:
  std::map<OccupationVector, complexd> amps_;
};

inline complexd inner_product(const PhotonState &a, const PhotonState &b) {
  complexd acc{};
  for (const auto &[occ, amp] : a.amplitudes()) acc += std::conj(amp) * b.amplitude(occ);
  return acc;
}

/// |<a_hat|b_hat>| for the normalized states; 1 means equal up to global phase.
inline double fidelity(const PhotonState &a, const PhotonState &b) {
  return std::abs(inner_product(a, b)) / (a.norm() * b.norm());
}

inline bool equal_up_to_global_phase(const PhotonState &a, const PhotonState &b,
                                     double tol = 1e-12) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  return std::abs(fidelity(a, b) - 1.0) <= tol;
}

/// 2x2 unitary acting on the (Up, Down) spatial pair; polarization is
/// untouched. m[j][i] is the coefficient of the output mode j in the image
/// of the input mode i, i.e. a_i^dag -> sum_j m[j][i] a_j^dag.
struct BeamsplitterUnitary {
  std::array<std::array<complexd, 2>, 2> m;

  /// The balanced 50-50 splitter (1/sqrt(2)) [[1, 1], [-1, 1]].
  static BeamsplitterUnitary balanced() {
    const double s = 1.0 / std::sqrt(2.0);
    return BeamsplitterUnitary{{{{complexd{s}, complexd{s}}, {complexd{-s}, complexd{s}}}}};
  }

  bool is_unitary(double tol = 1e-12) const {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        complexd dot{};
        for (int k = 0; k < 2; ++k) dot += std::conj(m[k][i]) * m[k][j];
        const complexd expect = (i == j) ? complexd{1.0} : complexd{};
        if (std::abs(dot - expect) > tol) return false;
      }
    }
    return true;
  }
};

/// Applies the creation operator of `mode`: every basis amplitude moves to
/// the occupation with one more photon in `mode`, scaled by sqrt(n+1).
/// The result is an operator image, not a normalized state.
inline PhotonState create_photon(const PhotonState &state, ModeLabel mode) {
  PhotonState out;
  for (const auto &[occ, amp] : state.amplitudes()) {
    out.accumulate(occ.with_one_more(mode),
                   amp * std::sqrt(static_cast<double>(occ.count(mode) + 1)));
  }
  return out;
}

/// Substitutes every creation operator implicit in the state according to
/// the beamsplitter unitary. Norm-preserving; polarization labels carried
/// through unchanged.
inline PhotonState apply_beamsplitter(const PhotonState &state,
                                      const BeamsplitterUnitary &bs = BeamsplitterUnitary::balanced()) {
  if (!bs.is_unitary()) throw ValidationError("beamsplitter matrix is not unitary");
  static constexpr double factorials[3] = {1.0, 1.0, 2.0};
  PhotonState out;
  for (const auto &[occ, amp] : state.amplitudes()) {
    // |occ> = prod_m (a_m^dag)^(n_m) / sqrt(prod_m n_m!) |0>
    double fact = 1.0;
    for (int i = 0; i < 4; ++i) {
      const int n = occ.counts[i];
      fact *= (n < 3) ? factorials[n] : std::tgamma(n + 1.0);
    }
    PhotonState term;
    term.accumulate(OccupationVector{}, amp / std::sqrt(fact));
    for (int i = 0; i < 4; ++i) {
      const ModeLabel mode = ModeLabel::from_index(i);
      const int col = static_cast<int>(mode.spatial);
      for (int k = 0; k < occ.counts[i]; ++k) {
        PhotonState next;
        for (int j = 0; j < 2; ++j) {
          const complexd coeff = bs.m[j][col];
          if (coeff == complexd{}) continue;
          PhotonState created =
              create_photon(term, ModeLabel{static_cast<Spatial>(j), mode.polarization});
          created *= coeff;
          next += created;
        }
        term = std::move(next);
      }
    }
    out += term;
  }
  return out;
}

namespace detail {
inline void require_two_photons(const PhotonState &state, const char *op) {
  if (state.total_photons() != 2) {
    throw ValidationError(std::string(op) + " requires a two-photon state, got total " +
                          std::to_string(state.total_photons()));
  }
}
}  // namespace detail

/// Probability that the pair is split between the Up and Down channels
/// (one photon in each). Coincidence counters measure exactly this.
inline double split_probability_of(const PhotonState &state) {
  detail::require_two_photons(state, "split_probability_of");
  double p = 0.0;
  for (const auto &[occ, amp] : state.amplitudes()) {
    if (occ.spatial_count(Spatial::Up) == 1 && occ.spatial_count(Spatial::Down) == 1)
      p += std::norm(amp);
  }
  return p;
}

/// Probability that both photons share one spatial channel.
inline double unsplit_probability_of(const PhotonState &state) {
  detail::require_two_photons(state, "unsplit_probability_of");
  double p = 0.0;
  for (const auto &[occ, amp] : state.amplitudes()) {
    if (occ.spatial_count(Spatial::Up) == 2 || occ.spatial_count(Spatial::Down) == 2)
      p += std::norm(amp);
  }
  return p;
}

/// Two-photon sectors that admit a Bell decomposition in the directional
/// (Up/Down) variable. SpatialH/SpatialV hold both photons in one
/// polarization; OnePerPolarization holds one H and one V photon, whose
/// polarization tags play the role of particle labels.
enum class BellSector { SpatialH, SpatialV, OnePerPolarization };

inline const char *to_string(BellSector s) {
  switch (s) {
    case BellSector::SpatialH: return "SpatialH";
    case BellSector::SpatialV: return "SpatialV";
    default: return "OnePerPolarization";
  }
}

struct BellBasis {
  PhotonState psi_plus, psi_minus, phi_plus, phi_minus;
};

/// The four Bell states of a sector as second-quantized PhotonStates.
/// In the single-polarization sectors the antisymmetric combination
/// Psi_- has no bosonic realization and is represented by the zero state.
inline BellBasis bell_basis(BellSector sector) {
  const double s = 1.0 / std::sqrt(2.0);
  auto ket1 = [](ModeLabel a, ModeLabel b) {
    return PhotonState::basis(OccupationVector{}.with_one_more(a).with_one_more(b));
  };
  BellBasis basis;
  if (sector == BellSector::OnePerPolarization) {
    basis.psi_plus = complexd{s} * (ket1(mode_uH, mode_dV) + ket1(mode_uV, mode_dH));
    basis.psi_minus = complexd{s} * (ket1(mode_uH, mode_dV) + complexd{-1.0} * ket1(mode_uV, mode_dH));
    basis.phi_plus = complexd{s} * (ket1(mode_uH, mode_uV) + ket1(mode_dH, mode_dV));
    basis.phi_minus = complexd{s} * (ket1(mode_uH, mode_uV) + complexd{-1.0} * ket1(mode_dH, mode_dV));
  } else {
    const Polar p = (sector == BellSector::SpatialH) ? Polar::H : Polar::V;
    const ModeLabel up{Spatial::Up, p}, down{Spatial::Down, p};
    basis.psi_plus = ket1(up, down);
    basis.psi_minus = PhotonState{};  // antisymmetric, absent for bosons
    auto ket2 = [](ModeLabel m) {
      OccupationVector occ;
      occ.counts[m.index()] = 2;
      return PhotonState::basis(occ);
    };
    basis.phi_plus = complexd{s} * (ket2(up) + ket2(down));
    basis.phi_minus = complexd{s} * (ket2(up) + complexd{-1.0} * ket2(down));
  }
  return basis;
}

struct BellCoefficients {
  complexd psi_plus, psi_minus, phi_plus, phi_minus;
  BellSector sector;
};

namespace detail {
inline BellSector classify_bell_sector(const PhotonState &state) {
  require_two_photons(state, "bell_decompose");
  int nH = -1, nV = -1;
  for (const auto &[occ, amp] : state.amplitudes()) {
    const int h = occ.polarization_count(Polar::H);
    const int v = occ.polarization_count(Polar::V);
    if (nH < 0) {
      nH = h;
      nV = v;
    } else if (h != nH || v != nV) {
      throw ValidationError("state spans multiple polarization sectors: (nH,nV)=(" +
                            std::to_string(nH) + "," + std::to_string(nV) + ") and (" +
                            std::to_string(h) + "," + std::to_string(v) + ")");
    }
  }
  if (nH == 2) return BellSector::SpatialH;
  if (nV == 2) return BellSector::SpatialV;
  return BellSector::OnePerPolarization;
}
}  // namespace detail

/// Projection coefficients of a sector-restricted two-photon state onto the
/// directional Bell states {Psi+, Psi-, Phi+, Phi-}.
inline BellCoefficients bell_decompose(const PhotonState &state) {
  const BellSector sector = detail::classify_bell_sector(state);
  const BellBasis basis = bell_basis(sector);
  return BellCoefficients{inner_product(basis.psi_plus, state),
                          inner_product(basis.psi_minus, state),
                          inner_product(basis.phi_plus, state),
                          inner_product(basis.phi_minus, state), sector};
}

/// Rebuilds the in-sector component sum_i c_i |Bell_i>.
inline PhotonState bell_reconstruct(const BellCoefficients &coeffs) {
  const BellBasis basis = bell_basis(coeffs.sector);
  PhotonState s;
  s += coeffs.psi_plus * basis.psi_plus;
  s += coeffs.psi_minus * basis.psi_minus;
  s += coeffs.phi_plus * basis.phi_plus;
  s += coeffs.phi_minus * basis.phi_minus;
  return s;
}

}  // namespace homsim
