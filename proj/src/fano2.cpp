#include "dimeron/fano2.hpp"

#include "dimeron/errors.hpp"
#include "dimeron/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dimeron {

void TwoAtomModel::validate(double broadening) const {
    potential.validate();
    const double coverage = grid.max_energy();
    const double need = 10.0 * std::max(std::abs(omega_c), potential.omega_v * potential.n_modes);
    if (coverage < need) {
        std::ostringstream msg;
        msg << "energy coverage: hbar_over_m*kappa_max^2 = " << angular_to_mhz(coverage)
            << " MHz is below 10*max(omega_C, omega_v*n_modes) = " << angular_to_mhz(need) << " MHz";
        throw ConfigError(msg.str());
    }
    const double l = potential.harmonic_length();
    if (grid.delta_kappa() * l > 0.2) {
        std::ostringstream msg;
        msg << "resolution: delta_kappa*l = " << grid.delta_kappa() * l << " exceeds 0.2";
        throw ConfigError(msg.str());
    }
    const double gap = grid.omega(Parity::Even, 1) - grid.omega(Parity::Even, 0);
    if (gap > broadening) {
        std::ostringstream msg;
        msg << "resolution: low-energy level spacing " << angular_to_mhz(gap)
            << " MHz exceeds the broadening " << angular_to_mhz(broadening) << " MHz";
        throw ConfigError(msg.str());
    }
    if (!(ground.width > 0.0))
        throw ConfigError("ground state width must be positive");
}

namespace {

Parity mode_parity(int v) { return v % 2 == 0 ? Parity::Even : Parity::Odd; }

std::size_t continuum_offset(const TwoAtomModel& m, Parity p) {
    return static_cast<std::size_t>(m.potential.n_modes) + (p == Parity::Odd ? m.grid.size() : 0);
}

// Block id 0 for even, 1 for odd, per basis index.
std::vector<int> parity_blocks(const TwoAtomModel& m) {
    const std::size_t nm = static_cast<std::size_t>(m.potential.n_modes);
    std::vector<int> block(nm + 2 * m.grid.size());
    for (std::size_t v = 0; v < nm; ++v)
        block[v] = static_cast<int>(v % 2);
    for (std::size_t j = 0; j < m.grid.size(); ++j) {
        block[nm + j] = 0;
        block[nm + m.grid.size() + j] = 1;
    }
    return block;
}

Parity state_parity(const EigenSystem& eigs, const TwoAtomModel& m, std::size_t n) {
    const std::size_t odd0 = continuum_offset(m, Parity::Odd);
    double odd = 0.0;
    for (std::size_t j = 0; j < m.grid.size(); ++j)
        odd += std::abs(eigs.vectors(static_cast<Eigen::Index>(odd0 + j), static_cast<Eigen::Index>(n)));
    for (int v = 1; v < m.potential.n_modes; v += 2)
        odd += std::abs(eigs.vectors(v, static_cast<Eigen::Index>(n)));
    return odd > 0.0 ? Parity::Odd : Parity::Even;
}

}  // namespace

Hamiltonian two_atom_hamiltonian(const TwoAtomModel& model) {
    const std::size_t nm = static_cast<std::size_t>(model.potential.n_modes);
    const std::size_t nk = model.grid.size();
    const std::size_t dim = nm + 2 * nk;
    Hamiltonian h;
    h.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    h.labels.resize(dim);
    for (std::size_t v = 0; v < nm; ++v) {
        h.labels[v] = {Sector::Macrodimer, 0, static_cast<int>(v), 0};
        h.matrix(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v)) =
            -model.delta_c + static_cast<double>(v) * model.potential.omega_v;
    }
    for (Parity p : {Parity::Even, Parity::Odd}) {
        const std::size_t off = continuum_offset(model, p);
        const Sector s = p == Parity::Even ? Sector::EvenContinuum : Sector::OddContinuum;
        for (std::size_t j = 0; j < nk; ++j) {
            h.labels[off + j] = {s, 0, static_cast<int>(j), 0};
            h.matrix(static_cast<Eigen::Index>(off + j), static_cast<Eigen::Index>(off + j)) = model.grid.omega(p, j);
        }
    }
    const double coupling = model.omega_c / std::sqrt(2.0);
    for (int v = 0; v < model.potential.n_modes; ++v) {
        const Parity p = mode_parity(v);
        const auto f = franck_condon(model.potential, v, model.grid, p);
        const std::size_t off = continuum_offset(model, p);
        for (std::size_t j = 0; j < nk; ++j) {
            const auto a = static_cast<Eigen::Index>(v);
            const auto b = static_cast<Eigen::Index>(off + j);
            h.matrix(a, b) = h.matrix(b, a) = coupling * f[j];
        }
    }
    return h;
}

Hamiltonian single_mode_fano_hamiltonian(double omega_c, double delta_c, std::span<const double> omegas,
                                         std::span<const double> fc) {
    if (omegas.size() != fc.size())
        throw ConfigError("single-mode Fano model: level and overlap counts differ");
    const auto dim = static_cast<Eigen::Index>(omegas.size() + 1);
    Hamiltonian h;
    h.matrix = Eigen::MatrixXd::Zero(dim, dim);
    h.labels.push_back({Sector::Macrodimer, 0, 0, 0});
    h.matrix(0, 0) = -delta_c;
    for (Eigen::Index j = 1; j < dim; ++j) {
        h.labels.push_back({Sector::EvenContinuum, 0, static_cast<int>(j - 1), 0});
        h.matrix(j, j) = omegas[static_cast<std::size_t>(j - 1)];
        h.matrix(0, j) = h.matrix(j, 0) = omega_c / std::sqrt(2.0) * fc[static_cast<std::size_t>(j - 1)];
    }
    return h;
}

EigenSystem solve_two_atom(const TwoAtomModel& model) {
    model.validate();
    const Hamiltonian h = two_atom_hamiltonian(model);
    return diagonalize_blocks(h, parity_blocks(model));
}

std::vector<double> probe_overlaps(const TwoAtomModel& model, Parity channel) {
    const double norm = std::sqrt(2.0 / model.grid.box_length());
    const double origin = model.potential.bond_length;
    std::vector<double> g(model.grid.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double k = model.grid.kappa(channel, j);
        g[j] = norm * (channel == Parity::Even ? model.ground.cos_transform(k, origin)
                                               : model.ground.sin_transform(k, origin));
    }
    return g;
}

std::vector<double> probe_amplitudes(const EigenSystem& eigs, const TwoAtomModel& model) {
    const std::size_t dim = eigs.size();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    for (Parity p : {Parity::Even, Parity::Odd}) {
        const auto gp = probe_overlaps(model, p);
        const std::size_t off = continuum_offset(model, p);
        for (std::size_t j = 0; j < gp.size(); ++j)
            g(static_cast<Eigen::Index>(off + j)) = gp[j];
    }
    const Eigen::VectorXd amp = eigs.vectors.transpose() * g;
    return {amp.data(), amp.data() + amp.size()};
}

SectorWeights sector_weights(const EigenSystem& eigs, std::size_t n) {
    SectorWeights w;
    const auto col = eigs.vectors.col(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < eigs.labels.size(); ++i) {
        const double p = col(static_cast<Eigen::Index>(i)) * col(static_cast<Eigen::Index>(i));
        const Sector s = eigs.labels[i].sector;
        if (s == Sector::Macrodimer || s == Sector::DimerLink)
            w.macrodimer += p;
        else
            w.excited += p;
    }
    return w;
}

double loss_fraction(const SectorWeights& w, LossModel loss, int n_atoms) {
    if (loss == LossModel::RydbergOnly)
        return w.excited;
    return (w.excited + 2.0 * w.macrodimer) / static_cast<double>(n_atoms);
}

std::vector<Stick> two_atom_sticks(const EigenSystem& eigs, const TwoAtomModel& model) {
    const auto amp = probe_amplitudes(eigs, model);
    std::vector<Stick> sticks(eigs.size());
    for (std::size_t n = 0; n < eigs.size(); ++n) {
        sticks[n].energy = eigs.energies(static_cast<Eigen::Index>(n));
        sticks[n].c_abs = amp[n] * amp[n];
        sticks[n].loss_fraction = loss_fraction(sector_weights(eigs, n), model.loss, 2);
    }
    return sticks;
}

static void check_axis(const TwoAtomModel& model, const SpectrumAxis& axis) {
    const double reach = std::max(std::abs(axis.min), std::abs(axis.max));
    if (reach > model.grid.max_energy()) {
        std::ostringstream msg;
        msg << "spectrum axis reaches " << angular_to_mhz(reach) << " MHz, beyond the grid energy coverage of "
            << angular_to_mhz(model.grid.max_energy()) << " MHz";
        throw ConfigError(msg.str());
    }
}

SpectrumResult absorption_spectrum(const EigenSystem& eigs, const TwoAtomModel& model, const SpectrumAxis& axis,
                                   double broadening) {
    check_axis(model, axis);
    const auto sticks = two_atom_sticks(eigs, model);
    return bin_and_broaden(sticks, axis, broadening);
}

SpectrumResult absorption_spectrum(const TwoAtomModel& model, const SpectrumAxis& axis, double broadening,
                                   std::size_t threads) {
    check_axis(model, axis);
    model.validate(broadening);
    if (model.scan == ScanMode::Sideband)
        return absorption_spectrum(solve_two_atom(model), model, axis, broadening);

    const auto pts = axis.points();
    struct Point {
        double c_abs = 0.0, loss = 0.0, broadened = 0.0;
    };
    auto eval = [&](std::size_t i) {
        TwoAtomModel m = model;
        m.delta_c = pts[i];
        const auto r = absorption_spectrum(solve_two_atom(m), m, axis, broadening);
        return Point{r.c_abs[i], r.loss[i], r.broadened[i]};
    };
    const auto values = parallel_map(pts.size(), eval, threads);
    SpectrumResult out;
    out.axis = pts;
    out.broadening = broadening;
    for (const auto& v : values) {
        out.c_abs.push_back(v.c_abs);
        out.loss.push_back(v.loss);
        out.broadened.push_back(v.broadened);
    }
    out.lines = find_lines(out.axis, out.broadened, broadening);
    return out;
}

PhaseCurve scattering_phases(const EigenSystem& eigs, const TwoAtomModel& model, Parity parity) {
    PhaseCurve curve;
    curve.parity = parity;
    const double hm = constants::hbar_over_m;
    const double L = model.grid.box_length();
    const double l = model.potential.harmonic_length();
    const std::size_t off = continuum_offset(model, parity);
    const std::size_t nk = model.grid.size();

    constexpr std::size_t n_pts = 400;
    const double x0 = 6.0 * l;
    const double x1 = L / 3.0;
    if (!(x1 > x0))
        throw ConfigError("phase extraction: box too small for the asymptotic window");
    std::vector<double> xs(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i)
        xs[i] = x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(n_pts - 1);
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(n_pts), static_cast<Eigen::Index>(nk));
    for (std::size_t i = 0; i < n_pts; ++i)
        for (std::size_t j = 0; j < nk; ++j)
            basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                model.grid.basis_function(parity, j, xs[i]);

    std::size_t block_index = 0;
    for (std::size_t n = 0; n < eigs.size(); ++n) {
        if (state_parity(eigs, model, n) != parity)
            continue;
        const std::size_t count = block_index++;
        const double E = eigs.energies(static_cast<Eigen::Index>(n));
        if (!(E > 0.0))
            continue;
        const Eigen::VectorXd c =
            eigs.vectors.col(static_cast<Eigen::Index>(n)).segment(static_cast<Eigen::Index>(off),
                                                                   static_cast<Eigen::Index>(nk));
        const Eigen::VectorXd psi = basis * c;
        const double k = std::sqrt(E / hm);
        Eigen::MatrixXd design(static_cast<Eigen::Index>(n_pts), 2);
        for (std::size_t i = 0; i < n_pts; ++i) {
            design(static_cast<Eigen::Index>(i), 0) = std::cos(k * xs[i]);
            design(static_cast<Eigen::Index>(i), 1) = std::sin(k * xs[i]);
        }
        const Eigen::Vector2d ab = design.colPivHouseholderQr().solve(psi);
        const double norm = psi.norm();
        const double resid = norm > 0.0 ? (design * ab - psi).norm() / norm : 1.0;
        const double A = ab(0);
        const double B = ab(1);
        double delta = parity == Parity::Even ? -std::atan(B / A) : std::atan(A / B);
        if (!std::isfinite(delta))
            delta = pi / 2.0;
        if (delta <= -pi / 2.0)
            delta += pi;
        // Box quantization: cos(kL/2 + δ) = 0 or sin(kL/2 + δ) = 0 at the wall,
        // with the node count given by the state's position in its block.
        const double nodes = static_cast<double>(count);
        const double counted = parity == Parity::Even ? pi * (nodes + 0.5) - k * L / 2.0
                                                      : pi * (nodes + 1.0) - k * L / 2.0;
        const double unwrapped = delta + pi * std::round((counted - delta) / pi);

        curve.energies.push_back(E);
        curve.phase.push_back(delta);
        curve.unwrapped.push_back(unwrapped);
        curve.residual.push_back(resid);
        curve.reliable.push_back(resid <= 0.05);
    }
    for (std::size_t i = 0; i + 1 < curve.energies.size(); ++i) {
        const double dE = curve.energies[i + 1] - curve.energies[i];
        curve.derivative_energies.push_back(0.5 * (curve.energies[i + 1] + curve.energies[i]));
        curve.derivative.push_back(dE > 0.0 ? (curve.unwrapped[i + 1] - curve.unwrapped[i]) / dE : 0.0);
    }
    return curve;
}

LorentzianFit fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y) {
    LorentzianFit fit;
    if (x.size() < 5 || x.size() != y.size())
        return fit;
    const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    const double base0 = *std::min_element(y.begin(), y.end());
    const double amp0 = y[peak] - base0;
    std::size_t lo = peak, hi = peak;
    while (lo > 0 && y[lo] - base0 > amp0 / 2.0)
        --lo;
    while (hi + 1 < y.size() && y[hi] - base0 > amp0 / 2.0)
        ++hi;
    Eigen::Vector4d p(amp0, x[peak], std::max(x[hi] - x[lo], 1e-6), base0);

    auto model = [](const Eigen::Vector4d& q, double t) {
        const double h = q(2) / 2.0;
        return q(0) * h * h / ((t - q(1)) * (t - q(1)) + h * h) + q(3);
    };
    auto cost = [&](const Eigen::Vector4d& q) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = model(q, x[i]) - y[i];
            s += r * r;
        }
        return s;
    };
    double lambda = 1e-3;
    double c = cost(p);
    for (int iter = 0; iter < 500; ++iter) {
        Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
        Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double h = p(2) / 2.0;
            const double d = x[i] - p(1);
            const double den = d * d + h * h;
            const double shape = h * h / den;
            Eigen::Vector4d J;
            J(0) = shape;
            J(1) = p(0) * h * h * 2.0 * d / (den * den);
            J(2) = p(0) * (h * d * d / (den * den));
            J(3) = 1.0;
            const double r = model(p, x[i]) - y[i];
            jtj += J * J.transpose();
            jtr += J * r;
        }
        Eigen::Matrix4d a = jtj;
        a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
        const Eigen::Vector4d step = a.ldlt().solve(-jtr);
        const Eigen::Vector4d trial = p + step;
        const double ct = cost(trial);
        if (ct < c) {
            const bool small = std::abs(c - ct) <= 1e-12 * c || step.norm() <= 1e-12 * (1.0 + p.norm());
            p = trial;
            c = ct;
            lambda = std::max(lambda / 10.0, 1e-12);
            if (small) {
                fit.converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) {
                fit.converged = true;
                break;
            }
        }
    }
    fit.amplitude = p(0);
    fit.center = p(1);
    fit.fwhm = std::abs(p(2));
    fit.baseline = p(3);
    fit.converged = fit.converged && std::isfinite(c);
    return fit;
}

MacrodimeronReport find_macrodimerons(const EigenSystem& eigs, const TwoAtomModel& model) {
    if (!(model.omega_c > 0.0))
        throw DomainError("find_macrodimerons requires omega_C > 0");
    MacrodimeronReport report;

    if (eigs.size() > 0 && eigs.energies(0) < 0.0) {
        MacrodimeronReport::Negative neg;
        neg.index = 0;
        neg.energy = eigs.energies(0);
        neg.weights = sector_weights(eigs, 0);
        const auto f0 = franck_condon(model.potential, 0, model.grid, Parity::Even);
        const std::size_t off = continuum_offset(model, Parity::Even);
        double amp = 0.0;
        for (std::size_t j = 0; j < f0.size(); ++j)
            amp += eigs.vectors(static_cast<Eigen::Index>(off + j), 0) * f0[j];
        neg.motional_overlap = neg.weights.excited > 0.0 ? amp * amp / neg.weights.excited : 0.0;
        report.negative = neg;
    }

    const PhaseCurve curve = scattering_phases(eigs, model, Parity::Even);
    const double lo = 0.5 * model.omega_c / std::sqrt(2.0);
    const double hi = model.omega_c / std::sqrt(2.0) + model.potential.omega_v;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < curve.derivative.size(); ++i) {
        const double e = curve.derivative_energies[i];
        if (e > lo && e <= hi && curve.reliable[i] && curve.reliable[i + 1]) {
            xs.push_back(e);
            ys.push_back(curve.derivative[i]);
        }
    }
    if (xs.size() >= 5) {
        const LorentzianFit fit = fit_lorentzian(xs, ys);
        if (fit.converged && fit.amplitude > 0.0 && fit.center > 0.0 && fit.fwhm > 0.0)
            report.positive = MacrodimeronReport::Positive{fit.center, fit.fwhm};
    }
    return report;
}

std::vector<SplittingRow> splitting_curve(const std::vector<TwoAtomModel>& models, std::size_t threads) {
    return parallel_map(
        models.size(),
        [&](std::size_t i) {
            const TwoAtomModel& m = models[i];
            SplittingRow row;
            row.omega_c = m.omega_c;
            const auto rep = find_macrodimerons(solve_two_atom(m), m);
            if (rep.negative)
                row.e_neg = rep.negative->energy;
            if (rep.positive)
                row.e_pos = rep.positive->energy;
            if (row.e_neg && row.e_pos)
                row.splitting = *row.e_pos - *row.e_neg;
            return row;
        },
        threads);
}

std::optional<SplittingLine> fit_splitting_line(const std::vector<SplittingRow>& rows) {
    std::vector<double> xs, ys;
    for (const auto& r : rows)
        if (r.splitting) {
            xs.push_back(r.omega_c);
            ys.push_back(*r.splitting);
        }
    if (xs.size() < 2)
        return std::nullopt;
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    SplittingLine line;
    line.points = xs.size();
    line.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    line.intercept = (sy - line.slope * sx) / n;
    double worst = 0.0, biggest = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        worst = std::max(worst, std::abs(ys[i] - line.slope * xs[i] - line.intercept));
        biggest = std::max(biggest, std::abs(ys[i]));
    }
    line.max_residual_fraction = worst / biggest;
    return line;
}

}  // namespace dimeron
