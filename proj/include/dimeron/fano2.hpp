#pragma once

#include "dimeron/continuum_grid.hpp"
#include "dimeron/eigensystem.hpp"
#include "dimeron/physics.hpp"
#include "dimeron/spectrum.hpp"

#include <optional>
#include <span>
#include <vector>

namespace dimeron {

/// Sideband: Δ_C fixed, probe detuning swept. Common: Δ_C = δ_p at every point.
enum class ScanMode { Sideband, Common };

/// Loss fraction per eigenstate: expected fraction of atoms lost
/// (w_se + 2 w_md)/N, or the Rydberg-state population w_se alone.
enum class LossModel { LostAtoms, RydbergOnly };

inline constexpr double default_broadening = mhz_to_angular(0.15);
/// Ω_C = α Ω_ge.
inline constexpr double default_alpha = 1.04;

struct TwoAtomModel {
    double omega_c = 0.0;    // rad/μs
    double delta_c = 0.0;    // rad/μs
    PotentialModel potential;
    ContinuumGrid grid;
    GaussianState ground = lattice_relative_ground_state(LatticeParams{});
    ScanMode scan = ScanMode::Sideband;
    LossModel loss = LossModel::LostAtoms;

    /// Throws ConfigError naming the violated coverage or resolution bound.
    void validate(double broadening = default_broadening) const;
};

/// Basis: n_modes macrodimer states, then n_k even and n_k odd standing waves.
Hamiltonian two_atom_hamiltonian(const TwoAtomModel& model);

/// One macrodimer level at -Δ_C coupled with (Ω_C/√2) f_j to levels at ω_j.
/// Basis: macrodimer first, then the continuum levels in order.
Hamiltonian single_mode_fano_hamiltonian(double omega_c, double delta_c, std::span<const double> omegas,
                                         std::span<const double> fc);

/// Parity-block diagonalization (even modes couple only to cos waves, odd
/// modes only to sin waves).
EigenSystem solve_two_atom(const TwoAtomModel& model);

/// g_j = <standing wave j | ground> for one parity channel.
std::vector<double> probe_overlaps(const TwoAtomModel& model, Parity channel);

/// Probe amplitude <ψ_n|H_P|Φ_g> for every eigenstate.
std::vector<double> probe_amplitudes(const EigenSystem& eigs, const TwoAtomModel& model);

struct SectorWeights {
    double macrodimer = 0.0;   // w_md
    double excited = 0.0;      // w_se
};
SectorWeights sector_weights(const EigenSystem& eigs, std::size_t n);

double loss_fraction(const SectorWeights& w, LossModel loss, int n_atoms);

std::vector<Stick> two_atom_sticks(const EigenSystem& eigs, const TwoAtomModel& model);

/// Sideband scan from a precomputed eigensystem.
SpectrumResult absorption_spectrum(const EigenSystem& eigs, const TwoAtomModel& model,
                                   const SpectrumAxis& axis, double broadening = default_broadening);
/// Dispatches on model.scan; the common scan rebuilds the Hamiltonian per
/// axis point with Δ_C = δ_p and reads the signal at E = δ_p.
SpectrumResult absorption_spectrum(const TwoAtomModel& model, const SpectrumAxis& axis,
                                   double broadening = default_broadening, std::size_t threads = 1);

struct PhaseCurve {
    Parity parity = Parity::Even;
    std::vector<double> energies;      // E > 0, rad/μs
    std::vector<double> phase;         // wrapped to (-π/2, π/2]
    std::vector<double> unwrapped;
    std::vector<double> residual;      // relative fit residual
    std::vector<bool> reliable;
    std::vector<double> derivative_energies;  // midpoints
    std::vector<double> derivative;           // dδ/dE, μs
};

/// Asymptotic phase shift of each E > 0 eigenstate in one parity channel.
PhaseCurve scattering_phases(const EigenSystem& eigs, const TwoAtomModel& model, Parity parity);

struct LorentzianFit {
    double amplitude = 0.0;
    double center = 0.0;
    double fwhm = 0.0;
    double baseline = 0.0;
    bool converged = false;
};

/// Levenberg–Marquardt fit of A (γ/2)²/((x-x0)²+(γ/2)²) + c.
LorentzianFit fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y);

struct MacrodimeronReport {
    struct Negative {
        std::size_t index = 0;
        double energy = 0.0;
        SectorWeights weights;
        double motional_overlap = 0.0;
    };
    struct Positive {
        double energy = 0.0;
        double width = 0.0;
    };
    std::optional<Negative> negative;
    std::optional<Positive> positive;
};

MacrodimeronReport find_macrodimerons(const EigenSystem& eigs, const TwoAtomModel& model);

struct SplittingRow {
    double omega_c = 0.0;
    std::optional<double> e_neg;
    std::optional<double> e_pos;
    std::optional<double> splitting;
};

/// One row per model; unresolved energies are left empty.
std::vector<SplittingRow> splitting_curve(const std::vector<TwoAtomModel>& models, std::size_t threads = 1);

struct SplittingLine {
    double slope = 0.0;       // dimensionless, splitting per unit Ω_C
    double intercept = 0.0;   // rad/μs
    /// Largest |residual| over the largest |splitting|.
    double max_residual_fraction = 0.0;
    std::size_t points = 0;
};

/// Least-squares line through the resolved rows; empty with fewer than two.
std::optional<SplittingLine> fit_splitting_line(const std::vector<SplittingRow>& rows);

}  // namespace dimeron
