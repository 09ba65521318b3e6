#include "dimeron/continuum_grid.hpp"

#include "dimeron/errors.hpp"

#include <cmath>

namespace dimeron {

ContinuumGrid::ContinuumGrid(std::size_t n_k, double kappa_max) : n_k_(n_k), kappa_max_(kappa_max) {
    if (n_k_ < 2)
        throw ConfigError("continuum grid: n_k must be at least 2");
    if (!(kappa_max_ > 0.0))
        throw ConfigError("continuum grid: kappa_max must be positive");
}

double ContinuumGrid::kappa(Parity p, std::size_t j) const {
    const double offset = p == Parity::Even ? 0.5 : 1.0;
    return (static_cast<double>(j) + offset) * delta_kappa();
}

double ContinuumGrid::omega(Parity p, std::size_t j) const {
    const double k = kappa(p, j);
    return constants::hbar_over_m * k * k;
}

std::vector<double> ContinuumGrid::kappas(Parity p) const {
    std::vector<double> out(n_k_);
    for (std::size_t j = 0; j < n_k_; ++j)
        out[j] = kappa(p, j);
    return out;
}

std::vector<double> ContinuumGrid::omegas(Parity p) const {
    std::vector<double> out(n_k_);
    for (std::size_t j = 0; j < n_k_; ++j)
        out[j] = omega(p, j);
    return out;
}

double ContinuumGrid::max_energy() const { return constants::hbar_over_m * kappa_max_ * kappa_max_; }

double ContinuumGrid::basis_function(Parity p, std::size_t j, double x) const {
    const double norm = std::sqrt(2.0 / box_length());
    const double k = kappa(p, j);
    return p == Parity::Even ? norm * std::cos(k * x) : norm * std::sin(k * x);
}

}  // namespace dimeron
