#pragma once

#include "dimeron/physics.hpp"

#include <cstddef>
#include <vector>

namespace dimeron {

/// Discretized relative-momentum continuum: real standing waves about R_v in
/// a hard-walled box of length L = 2π/Δκ. Even waves cos(κx) sit at
/// κ = (j + 1/2)Δκ and odd waves sin(κx) at κ = (j + 1)Δκ, j = 0..n_k-1,
/// each normalized by sqrt(2/L). Both sets vanish at the walls x = ±L/2.
class ContinuumGrid {
public:
    ContinuumGrid() = default;
    ContinuumGrid(std::size_t n_k, double kappa_max);

    std::size_t size() const { return n_k_; }
    double kappa_max() const { return kappa_max_; }
    double delta_kappa() const { return kappa_max_ / static_cast<double>(n_k_); }
    double box_length() const { return two_pi / delta_kappa(); }

    double kappa(Parity p, std::size_t j) const;
    /// Relative kinetic energy ħκ²/m in rad/μs.
    double omega(Parity p, std::size_t j) const;
    std::vector<double> kappas(Parity p) const;
    std::vector<double> omegas(Parity p) const;
    /// Highest representable kinetic energy.
    double max_energy() const;
    /// Standing wave j evaluated at x = R - R_v.
    double basis_function(Parity p, std::size_t j, double x) const;

private:
    std::size_t n_k_ = 400;
    double kappa_max_ = 1.2;
};

}  // namespace dimeron
