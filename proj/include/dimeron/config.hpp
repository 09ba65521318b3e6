#pragma once

#include "dimeron/correlations.hpp"
#include "dimeron/fano2.hpp"
#include "dimeron/fano3.hpp"
#include "dimeron/sampler.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dimeron {

enum class PhaseChannels { Even, Odd, Both };

/// Flat `section.key = value` configuration. Frequencies are linear MHz here
/// and converted to rad/μs by the model builders below.
struct RunConfig {
    // physics
    double r_v_nm = 712.0;
    double omega_v_mhz = 3.8;
    double omega_lat_mhz = 0.128;
    double a_lat_nm = 532.0;
    double alpha = default_alpha;
    int n_modes = 1;

    // model
    std::vector<double> omega_c_mhz{6.2};
    std::vector<double> omega_ge_mhz;   // if set, Ω_C = α Ω_ge
    double delta_c_mhz = 0.0;
    ScanMode scan = ScanMode::Sideband;
    LossModel loss = LossModel::LostAtoms;
    std::size_t n_k = 400;
    double kappa_max = 1.2;
    std::size_t n3 = 49;
    double k3_max = 0.6;
    std::optional<double> ground_center_nm;
    std::size_t basis_cap = 25000;

    // spectrum
    double min_mhz = -8.0;
    double max_mhz = 8.0;
    double step_mhz = 0.01;
    double broadening_mhz = 0.15;

    // phases
    PhaseChannels phase_channels = PhaseChannels::Both;

    // correlation
    std::optional<Roi> roi;
    Offset r0{-1, 1};
    int window = 4;

    // sampler
    SampleConfig sampler;

    // fit
    double target_g2 = 2.40e-2;
    double target_g3 = 4.8e-3;
    FitOptions fit;

    /// Ω_C values in MHz (from omega_c_mhz, or α·omega_ge_mhz).
    std::vector<double> couplings_mhz() const;
    SpectrumAxis axis() const;
    double broadening() const { return mhz_to_angular(broadening_mhz); }
};

/// Parses config text; throws ConfigError with the line number on unknown
/// keys, malformed values or duplicate keys.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Documentation of every key with its default, for --help.
std::string config_reference();

TwoAtomModel two_atom_model(const RunConfig& cfg, double omega_c_mhz);
ThreeAtomModel three_atom_model(const RunConfig& cfg, double omega_c_mhz);

}  // namespace dimeron
