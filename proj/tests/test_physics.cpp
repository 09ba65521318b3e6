#include "dimeron/continuum_grid.hpp"
#include "dimeron/errors.hpp"
#include "dimeron/physics.hpp"

#include <doctest.h>

#include <cmath>
#include <tuple>

using namespace dimeron;

namespace {

// Trapezoid rule on [a, b] with n intervals.
template <class F>
double integrate(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i)
        s += f(a + i * h);
    return s * h;
}

}  // namespace

TEST_CASE("hbar/m for Rb-87 in nm^2/us") {
    CHECK(constants::hbar_over_m == doctest::Approx(1.054571817e-34 / 1.44316e-25 * 1e12).epsilon(1e-15));
    CHECK(constants::hbar_over_m == doctest::Approx(730.738).epsilon(1e-5));
}

TEST_CASE("harmonic and lattice length scales") {
    PotentialModel m;
    CHECK(m.harmonic_length() == doctest::Approx(7.8237).epsilon(1e-4));
    LatticeParams lat;
    CHECK(lat.diagonal_spacing() == doctest::Approx(532.0 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(lat.diagonal_spacing() == doctest::Approx(752.36).epsilon(1e-5));
    CHECK(lat.site_sigma() == doctest::Approx(21.3143).epsilon(1e-4));
    const GaussianState g = lattice_relative_ground_state(lat);
    CHECK(g.center == lat.diagonal_spacing());
    CHECK(g.width == doctest::Approx(std::sqrt(2.0) * 21.3143).epsilon(1e-4));
}

TEST_CASE("validation rejects bad potentials") {
    PotentialModel m;
    m.n_modes = 0;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m.n_modes = 7;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m.n_modes = 1;
    m.omega_v = -1.0;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m.omega_v = mhz_to_angular(3.8);
    m.bond_length = 50.0;  // l would not be small against R_v
    CHECK_THROWS_AS(m.validate(), ConfigError);
    CHECK_THROWS_AS(ContinuumGrid(1, 1.0), ConfigError);
    CHECK_THROWS_AS(ContinuumGrid(10, 0.0), ConfigError);
}

TEST_CASE("Hermite functions are orthonormal") {
    const int nmax = 5;
    for (int a = 0; a <= nmax; ++a)
        for (int b = 0; b <= nmax; ++b) {
            const double s = integrate(
                [&](double x) {
                    const auto h = hermite_functions(nmax, x);
                    return h[a] * h[b];
                },
                -12.0, 12.0, 4000);
            CHECK(s == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
        }
}

TEST_CASE("Gaussian state is normalized with rms width `width`") {
    const GaussianState g{10.0, 3.0};
    const double norm = integrate([&](double x) { return g.amplitude(x) * g.amplitude(x); }, -40, 60, 20000);
    const double var = integrate([&](double x) { return (x - 10) * (x - 10) * g.amplitude(x) * g.amplitude(x); },
                                 -40, 60, 20000);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::sqrt(var) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("Gaussian cosine/sine transforms match quadrature") {
    const GaussianState g{752.4, 30.1};
    for (double k : {0.0, 0.01, 0.05, 0.1}) {
        const double c = integrate([&](double x) { return std::cos(k * (x - 712.0)) * g.amplitude(x); }, 452, 1052,
                                   60000);
        const double s = integrate([&](double x) { return std::sin(k * (x - 712.0)) * g.amplitude(x); }, 452, 1052,
                                   60000);
        CHECK(g.cos_transform(k, 712.0) == doctest::Approx(c).epsilon(1e-9).scale(1.0));
        CHECK(g.sin_transform(k, 712.0) == doctest::Approx(s).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("box standing waves vanish at the walls and are orthonormal") {
    const ContinuumGrid grid(40, 0.3);
    const double L = grid.box_length();
    for (Parity p : {Parity::Even, Parity::Odd})
        for (std::size_t j : {0u, 7u, 39u}) {
            CHECK(std::abs(grid.basis_function(p, j, L / 2)) < 1e-12);
            CHECK(std::abs(grid.basis_function(p, j, -L / 2)) < 1e-12);
        }
    for (auto [p, q, i, j] : {std::tuple{Parity::Even, Parity::Even, 3, 3}, std::tuple{Parity::Even, Parity::Even, 3, 4},
                              std::tuple{Parity::Odd, Parity::Odd, 5, 5}, std::tuple{Parity::Even, Parity::Odd, 2, 2}}) {
        const double s = integrate(
            [&](double x) {
                return grid.basis_function(p, static_cast<std::size_t>(i), x) *
                       grid.basis_function(q, static_cast<std::size_t>(j), x);
            },
            -L / 2, L / 2, 20000);
        CHECK(s == doctest::Approx(p == q && i == j ? 1.0 : 0.0).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("Franck-Condon overlaps agree with real-space quadrature") {
    PotentialModel m;
    m.n_modes = 4;
    const ContinuumGrid grid;
    const double l = m.harmonic_length();
    for (int v = 0; v < 4; ++v)
        for (Parity p : {Parity::Even, Parity::Odd}) {
            const auto f = franck_condon(m, v, grid, p);
            for (std::size_t j : {0u, 1u, 10u, 40u, 120u}) {
                const double q = integrate(
                    [&](double x) {
                        return vibrational_wavefunction(m, v, m.bond_length + x) * grid.basis_function(p, j, x);
                    },
                    -12 * l, 12 * l, 8000);
                CHECK(f[j] == doctest::Approx(q).epsilon(1e-9).scale(1.0));
            }
        }
}

TEST_CASE("Franck-Condon weights are complete on the default grid") {
    PotentialModel m;
    m.n_modes = 3;
    const ContinuumGrid grid;
    for (int v = 0; v < 3; ++v) {
        double total = 0.0;
        for (Parity p : {Parity::Even, Parity::Odd})
            for (double x : franck_condon(m, v, grid, p))
                total += x * x;
        CHECK(total >= 1.0 - 1e-6);
        CHECK(total <= 1.0 + 1e-6);
    }
}

TEST_CASE("mode parity selects the standing-wave channel") {
    PotentialModel m;
    m.n_modes = 2;
    const ContinuumGrid grid;
    for (double x : franck_condon(m, 0, grid, Parity::Odd))
        CHECK(x == 0.0);
    for (double x : franck_condon(m, 1, grid, Parity::Even))
        CHECK(x == 0.0);
}

TEST_CASE("virial theorem: kinetic energy of mode v is (2v+1) omega_v / 4") {
    PotentialModel m;
    m.n_modes = 2;
    const ContinuumGrid grid;
    CHECK(kinetic_energy_expectation(m, 0, grid) == doctest::Approx(m.omega_v / 4).epsilon(1e-6));
    CHECK(kinetic_energy_expectation(m, 1, grid) == doctest::Approx(3 * m.omega_v / 4).epsilon(1e-6));
    CHECK(angular_to_mhz(kinetic_energy_expectation(m, 0, grid)) == doctest::Approx(0.950).epsilon(1e-3));
}

TEST_CASE("mode index errors") {
    PotentialModel m;
    const ContinuumGrid grid;
    CHECK_THROWS_AS(franck_condon(m, 1, grid, Parity::Even), DomainError);
    CHECK_THROWS_AS(franck_condon(m, -1, grid, Parity::Even), DomainError);
    CHECK_THROWS_AS(franck_condon(m, 0, ContinuumGrid(10, 1.2), Parity::Even), ConfigError);
}

TEST_CASE("ground-state to vibrational width ratio") {
    // rms widths of |Φ_g|² and |Φ_v|²: √2 σ_site against l/√2, i.e. sqrt(ω_v/ω_lat)
    PotentialModel m;
    LatticeParams lat;
    const double ratio = lattice_relative_ground_state(lat).width / (m.harmonic_length() / std::sqrt(2.0));
    CHECK(ratio == doctest::Approx(std::sqrt(m.omega_v / lat.omega_lat)).epsilon(1e-12));
    CHECK(ratio == doctest::Approx(5.449).epsilon(1e-3));
}
