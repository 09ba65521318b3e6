#pragma once

#include <numbers>
#include <vector>

namespace dimeron {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Unit system: lengths in nm, times in μs, energies as angular frequencies
// in rad/μs. Linear frequencies (MHz) only appear at the I/O boundary.
namespace constants {

inline constexpr double hbar = 1.054571817e-34;        // J s (CODATA 2018)
inline constexpr double rb87_mass = 1.44316e-25;       // kg
/// ħ/m for ⁸⁷Rb in nm²·rad/μs (m²/s → nm²/μs is a factor 1e12).
inline constexpr double hbar_over_m = hbar / rb87_mass * 1e12;
/// Macrodimer decay rate, 1/μs. Only carried for reference.
inline constexpr double gamma_macrodimer = 1.0 / 20.0;

}  // namespace constants

inline constexpr double mhz_to_angular(double mhz) { return two_pi * mhz; }
inline constexpr double angular_to_mhz(double omega) { return omega / two_pi; }

class ContinuumGrid;
enum class Parity { Even, Odd };

/// Harmonic macrodimer binding potential in the relative coordinate
/// (reduced mass m/2).
struct PotentialModel {
    double bond_length = 712.0;                 // R_v, nm
    double omega_v = mhz_to_angular(3.8);       // rad/μs
    int n_modes = 1;

    void validate() const;
    /// Oscillator length sqrt(2 ħ/(m ω_v)).
    double harmonic_length() const;
};

struct LatticeParams {
    double a_lat = 532.0;                       // nm
    double omega_lat = mhz_to_angular(0.128);   // rad/μs

    void validate() const;
    double diagonal_spacing() const;
    /// Single-atom on-site position spread sqrt(ħ/(2 m ω_lat)).
    double site_sigma() const;
};

/// Normalized Gaussian wavefunction in one coordinate. `width` is the rms
/// spread of |ψ|², so ψ(R) ∝ exp(-(R - center)² / (4 width²)).
struct GaussianState {
    double center = 0.0;
    double width = 1.0;

    double amplitude(double R) const;
    /// ∫ cos(κ (R - origin)) ψ(R) dR and the matching sine integral.
    double cos_transform(double kappa, double origin) const;
    double sin_transform(double kappa, double origin) const;
};

/// Normalized Hermite functions h_0..h_{n_max}(xi) by upward recurrence.
std::vector<double> hermite_functions(int n_max, double xi);

/// Φ_v(R), the v-th harmonic eigenfunction centred at the bond length.
double vibrational_wavefunction(const PotentialModel& model, int v, double R);

/// Overlaps of Φ_v with the box-normalized standing waves of one parity
/// channel. Computed in closed form from the momentum-space Hermite functions.
std::vector<double> franck_condon(const PotentialModel& model, int v,
                                  const ContinuumGrid& grid, Parity channel);

/// ∑_j f_j² ω_j over both parity channels.
double kinetic_energy_expectation(const PotentialModel& model, int v,
                                  const ContinuumGrid& grid);

/// Relative-coordinate ground state of two diagonal neighbours: centred at
/// √2 a_lat with rms width √2 σ_site.
GaussianState lattice_relative_ground_state(const LatticeParams& lat);

}  // namespace dimeron
