#include "dimeron/physics.hpp"

#include "dimeron/continuum_grid.hpp"
#include "dimeron/errors.hpp"

#include <cmath>
#include <string>

namespace dimeron {

void PotentialModel::validate() const {
    if (!(omega_v > 0.0))
        throw ConfigError("potential: omega_v must be positive");
    if (!(bond_length > 0.0))
        throw ConfigError("potential: bond length R_v must be positive");
    if (n_modes < 1 || n_modes > 6)
        throw ConfigError("potential: n_modes must lie in [1, 6], got " + std::to_string(n_modes));
    if (!(harmonic_length() < 0.1 * bond_length))
        throw ConfigError("potential: harmonic length is not small against R_v");
}

double PotentialModel::harmonic_length() const {
    return std::sqrt(2.0 * constants::hbar_over_m / omega_v);
}

void LatticeParams::validate() const {
    if (!(a_lat > 0.0))
        throw ConfigError("lattice: a_lat must be positive");
    if (!(omega_lat > 0.0))
        throw ConfigError("lattice: omega_lat must be positive");
}

double LatticeParams::diagonal_spacing() const { return std::sqrt(2.0) * a_lat; }

double LatticeParams::site_sigma() const {
    return std::sqrt(constants::hbar_over_m / (2.0 * omega_lat));
}

double GaussianState::amplitude(double R) const {
    const double y = R - center;
    return std::pow(two_pi * width * width, -0.25) * std::exp(-y * y / (4.0 * width * width));
}

double GaussianState::cos_transform(double kappa, double origin) const {
    const double envelope = std::pow(two_pi * width * width, -0.25)
                          * std::sqrt(4.0 * pi * width * width)
                          * std::exp(-kappa * kappa * width * width);
    return envelope * std::cos(kappa * (center - origin));
}

double GaussianState::sin_transform(double kappa, double origin) const {
    const double envelope = std::pow(two_pi * width * width, -0.25)
                          * std::sqrt(4.0 * pi * width * width)
                          * std::exp(-kappa * kappa * width * width);
    return envelope * std::sin(kappa * (center - origin));
}

std::vector<double> hermite_functions(int n_max, double xi) {
    std::vector<double> h(static_cast<std::size_t>(n_max) + 1);
    h[0] = std::pow(pi, -0.25) * std::exp(-0.5 * xi * xi);
    if (n_max >= 1)
        h[1] = std::sqrt(2.0) * xi * h[0];
    for (int n = 1; n < n_max; ++n) {
        h[n + 1] = std::sqrt(2.0 / (n + 1)) * xi * h[n] - std::sqrt(static_cast<double>(n) / (n + 1)) * h[n - 1];
    }
    return h;
}

static void check_mode(const PotentialModel& model, int v) {
    if (v < 0 || v >= model.n_modes)
        throw DomainError("vibrational mode index " + std::to_string(v) + " outside [0, " +
                          std::to_string(model.n_modes) + ")");
}

double vibrational_wavefunction(const PotentialModel& model, int v, double R) {
    check_mode(model, v);
    const double l = model.harmonic_length();
    return hermite_functions(v, (R - model.bond_length) / l)[v] / std::sqrt(l);
}

std::vector<double> franck_condon(const PotentialModel& model, int v, const ContinuumGrid& grid,
                                  Parity channel) {
    check_mode(model, v);
    const double l = model.harmonic_length();
    if (grid.delta_kappa() * l > 0.5)
        throw ConfigError("continuum grid too coarse to resolve the vibrational mode (dkappa*l > 0.5)");

    // The Fourier transform of h_v is (-i)^v h_v: cosine waves pick up the
    // real part, sine waves the negative imaginary part.
    static constexpr double re_phase[4] = {1.0, 0.0, -1.0, 0.0};
    static constexpr double im_phase[4] = {0.0, 1.0, 0.0, -1.0};
    const double phase = channel == Parity::Even ? re_phase[v % 4] : im_phase[v % 4];

    const double prefactor = std::sqrt(2.0 / grid.box_length()) * std::sqrt(two_pi) * std::sqrt(l);
    std::vector<double> f(grid.size(), 0.0);
    if (phase == 0.0)
        return f;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        f[j] = phase * prefactor * hermite_functions(v, grid.kappa(channel, j) * l)[v];
    }
    return f;
}

double kinetic_energy_expectation(const PotentialModel& model, int v, const ContinuumGrid& grid) {
    double sum = 0.0;
    for (Parity p : {Parity::Even, Parity::Odd}) {
        const auto f = franck_condon(model, v, grid, p);
        for (std::size_t j = 0; j < f.size(); ++j)
            sum += f[j] * f[j] * grid.omega(p, j);
    }
    return sum;
}

GaussianState lattice_relative_ground_state(const LatticeParams& lat) {
    lat.validate();
    return GaussianState{lat.diagonal_spacing(), std::sqrt(2.0) * lat.site_sigma()};
}

}  // namespace dimeron
