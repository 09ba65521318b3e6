#pragma once

#include "dimeron/eigensystem.hpp"
#include "dimeron/fano2.hpp"
#include "dimeron/physics.hpp"
#include "dimeron/spectrum.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace dimeron {

/// Symmetric plane-wave grid per relative link: k_j = (j - (n3-1)/2)·Δk with
/// Δk = 2 k_max/(n3-1), periodic box L = 2π/Δk. n3 must be odd so that k = 0
/// is on the grid.
struct MomentumGrid3 {
    std::size_t n3 = 49;
    double k_max = 0.6;   // nm⁻¹

    void validate() const;
    double delta_k() const { return 2.0 * k_max / static_cast<double>(n3 - 1); }
    double box_length() const { return two_pi / delta_k(); }
    double k(std::size_t j) const;
    /// Largest singly-excited kinetic energy, ħ/m · max(k1² + k2² − k1 k2).
    double max_energy() const;
};

struct ThreeAtomModel {
    double omega_c = 0.0;    // rad/μs
    double delta_c = 0.0;    // rad/μs
    PotentialModel potential;
    MomentumGrid3 grid;
    LatticeParams lattice;
    /// Centre of both ground-state relative coordinates; defaults to √2 a_lat.
    std::optional<double> ground_center;
    ScanMode scan = ScanMode::Sideband;
    LossModel loss = LossModel::LostAtoms;
    bool couple_link1 = true;
    bool couple_link2 = true;
    std::size_t basis_cap = 25000;

    void validate() const;
    std::size_t basis_size() const { return 3 * grid.n3 * grid.n3 + 2 * grid.n3; }
    double ground_center_nm() const { return ground_center.value_or(lattice.diagonal_spacing()); }
};

/// Index layout: excited sector i (0..2) occupies [i n3², (i+1) n3²) with
/// local index a·n3 + b for (k1 = k_a, k2 = k_b); then the link-1 macrodimer
/// band (n3, indexed by k2) and the link-2 band (n3, indexed by k1).
struct ThreeAtomLayout {
    std::size_t n3 = 0;
    std::size_t excited(int site, std::size_t a, std::size_t b) const {
        return static_cast<std::size_t>(site) * n3 * n3 + a * n3 + b;
    }
    std::size_t link(int which, std::size_t j) const {
        return 3 * n3 * n3 + static_cast<std::size_t>(which) * n3 + j;
    }
    std::size_t size() const { return 3 * n3 * n3 + 2 * n3; }
};

/// φ_v(k_j) = <k_j|Φ_0> in the gauge with each link origin at R_v (real).
std::vector<double> vibrational_momentum_amplitudes(const ThreeAtomModel& model);

/// Dense Hamiltonian. Only intended for small grids and checks.
Hamiltonian three_atom_hamiltonian(const ThreeAtomModel& model);

/// Exact diagonalization. Uses the atom-order reflection to split the
/// problem when both links are coupled, and the conserved spectator momentum
/// when only one link is.
EigenSystem solve_three_atom(const ThreeAtomModel& model, std::size_t threads = 1);

/// <k_a, k_b | Φ_rel> for the lattice ground state of three atoms.
std::vector<std::complex<double>> ground_momentum_amplitudes(const ThreeAtomModel& model);

std::vector<std::complex<double>> probe_amplitudes3(const EigenSystem& eigs, const ThreeAtomModel& model);
std::vector<Stick> three_atom_sticks(const EigenSystem& eigs, const ThreeAtomModel& model);

SpectrumResult absorption_spectrum3(const EigenSystem& eigs, const ThreeAtomModel& model,
                                    const SpectrumAxis& axis, double broadening = default_broadening);
/// Dispatches on model.scan like the two-atom version. The common scan
/// solves one three-atom problem per axis point.
SpectrumResult absorption_spectrum3(const ThreeAtomModel& model, const SpectrumAxis& axis,
                                    double broadening = default_broadening, std::size_t threads = 1);

enum class StateClass { Trimeron, DimeronFree, Central, Continuum };
const char* to_string(StateClass c);

/// Motional character of one eigenstate.
struct StateAnalysis {
    std::size_t index = 0;
    double energy = 0.0;
    /// Populations of e_0, e_1, e_2, link-1 dimer, link-2 dimer.
    std::array<double, 5> sector_weights{};
    double p_link1 = 0.0;    // <Π1>, link-1 motion in Φ_v
    double p_link2 = 0.0;
    double p_both = 0.0;     // <Π1 Π2>
    double single_link = 0.0;  // P1 + P2 − 2 P12: exactly one link confined
    double trimeron_overlap = 0.0;
    StateClass tag = StateClass::Continuum;
};

StateAnalysis analyze_state(const EigenSystem& eigs, const ThreeAtomModel& model, std::size_t n,
                            double broadening = default_broadening);

/// Normalized analytic trimeron on the grid: −½(dimer on link 1 + link 2)
/// ⊗ Φ_v + (1/√3)(½ e_0 + e_1 + ½ e_2) ⊗ Φ_v Φ_v.
Eigen::VectorXd analytic_trimeron(const ThreeAtomModel& model);

struct TrimeronReport {
    std::size_t index = 0;
    double energy = 0.0;
    std::array<double, 5> amplitudes{};  // signed √weight per sector, sign from the dominant component
    double overlap = 0.0;
    StateClass tag = StateClass::Continuum;
};

/// Among E < 0 states, the one with the largest analytic-trimeron overlap.
std::optional<TrimeronReport> identify_trimeron(const EigenSystem& eigs, const ThreeAtomModel& model);

/// Variance of the position density along the spectator link for the part of
/// state n in which exactly link `confined` (0 or 1) is in Φ_v, nm².
double spectator_variance(const EigenSystem& eigs, const ThreeAtomModel& model, std::size_t n, int confined);

struct FeatureGroup {
    StateClass tag = StateClass::Continuum;
    double energy = 0.0;   // S-weighted mean energy of member states
    double weight = 0.0;   // summed loss-weighted strength
    std::size_t count = 0;
};

/// Classified feature groups: trimeron, dimeron+free, central, and the
/// positive-energy group (continuum states above one broadening).
struct ThreeAtomFeatures {
    std::optional<FeatureGroup> trimeron;
    std::optional<FeatureGroup> dimeron_free;
    std::optional<FeatureGroup> central;
    std::optional<FeatureGroup> positive;
    std::vector<StateAnalysis> negative_states;
};

ThreeAtomFeatures classify_features(const EigenSystem& eigs, const ThreeAtomModel& model,
                                    double broadening = default_broadening);

struct HoppingRate {
    double magnitude = 0.0;   // rad/μs
    int sign = 0;             // sign of Ω_C² f̃ / (2 Δ_C)
};

/// Two-photon macrodimer hopping rate Ω_C² f̃ / (2 |Δ_C|).
HoppingRate hopping_rate(double omega_c, double delta_c, double f_tilde);

/// f̃ = |<Φ_v|χ>|² with χ the spectator relative wavefunction, by momentum
/// quadrature in a box wide enough for the centre shift.
double motional_state_overlap_f_tilde(const ThreeAtomModel& model, const GaussianState& spectator);
/// Spectator with the lattice relative width, aligned with R_v.
double motional_state_overlap_f_tilde(const ThreeAtomModel& model);

}  // namespace dimeron
