#include "dimeron/fano3.hpp"

#include "dimeron/errors.hpp"
#include "dimeron/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dimeron {

void MomentumGrid3::validate() const {
    if (n3 < 3 || n3 % 2 == 0)
        throw ConfigError("three-atom grid: n3 must be odd and at least 3 so that k = 0 is a grid point, got " +
                          std::to_string(n3));
    if (!(k_max > 0.0))
        throw ConfigError("three-atom grid: k_max must be positive");
}

double MomentumGrid3::k(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(n3 - 1) / 2.0) * delta_k();
}

double MomentumGrid3::max_energy() const {
    // k1² + k2² − k1 k2 peaks at k1 = −k2 = ±k_max.
    return 3.0 * constants::hbar_over_m * k_max * k_max;
}

void ThreeAtomModel::validate() const {
    potential.validate();
    lattice.validate();
    if (potential.n_modes != 1)
        throw ConfigError("three-atom model supports a single vibrational mode (n_modes = 1)");
    grid.validate();
    if (basis_size() > basis_cap) {
        std::ostringstream msg;
        msg << "three-atom basis size " << basis_size() << " exceeds the cap " << basis_cap
            << "; use a smaller n3";
        throw ConfigError(msg.str());
    }
    const double need = 10.0 * std::max(std::abs(omega_c), potential.omega_v);
    if (grid.max_energy() < need) {
        std::ostringstream msg;
        msg << "three-atom energy coverage " << angular_to_mhz(grid.max_energy())
            << " MHz is below 10*max(omega_C, omega_v) = " << angular_to_mhz(need) << " MHz";
        throw ConfigError(msg.str());
    }
    if (grid.delta_k() * potential.harmonic_length() > 0.2) {
        std::ostringstream msg;
        msg << "three-atom resolution: delta_k*l = " << grid.delta_k() * potential.harmonic_length()
            << " exceeds 0.2";
        throw ConfigError(msg.str());
    }
}

std::vector<double> vibrational_momentum_amplitudes(const ThreeAtomModel& model) {
    const double l = model.potential.harmonic_length();
    const double L = model.grid.box_length();
    const double pref = std::sqrt(two_pi / L) * std::sqrt(l) * std::pow(pi, -0.25);
    std::vector<double> phi(model.grid.n3);
    for (std::size_t j = 0; j < phi.size(); ++j) {
        const double k = model.grid.k(j);
        phi[j] = pref * std::exp(-0.5 * k * k * l * l);
    }
    return phi;
}

namespace {

std::vector<BasisLabel> three_atom_labels(const ThreeAtomLayout& lay) {
    std::vector<BasisLabel> labels(lay.size());
    for (int i = 0; i < 3; ++i)
        for (std::size_t a = 0; a < lay.n3; ++a)
            for (std::size_t b = 0; b < lay.n3; ++b)
                labels[lay.excited(i, a, b)] = {Sector::Excited, i, static_cast<int>(a), static_cast<int>(b)};
    for (int w = 0; w < 2; ++w)
        for (std::size_t j = 0; j < lay.n3; ++j)
            labels[lay.link(w, j)] = {Sector::DimerLink, w, static_cast<int>(j), 0};
    return labels;
}

// Upper-triangular (including diagonal) nonzeros.
std::vector<Eigen::Triplet<double>> three_atom_entries(const ThreeAtomModel& model) {
    const ThreeAtomLayout lay{model.grid.n3};
    const std::size_t n3 = lay.n3;
    const double hm = constants::hbar_over_m;
    const auto phi = vibrational_momentum_amplitudes(model);
    const double g = model.omega_c / 2.0;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(lay.size() + 4 * n3 * n3);
    auto add = [&](std::size_t r, std::size_t c, double v) {
        t.emplace_back(static_cast<int>(std::min(r, c)), static_cast<int>(std::max(r, c)), v);
    };
    for (int i = 0; i < 3; ++i)
        for (std::size_t a = 0; a < n3; ++a)
            for (std::size_t b = 0; b < n3; ++b) {
                const double k1 = model.grid.k(a);
                const double k2 = model.grid.k(b);
                add(lay.excited(i, a, b), lay.excited(i, a, b), hm * (k1 * k1 + k2 * k2 - k1 * k2));
            }
    for (std::size_t j = 0; j < n3; ++j) {
        const double k = model.grid.k(j);
        add(lay.link(0, j), lay.link(0, j), -model.delta_c + hm * k * k);
        add(lay.link(1, j), lay.link(1, j), -model.delta_c + hm * k * k);
    }
    if (g != 0.0) {
        for (std::size_t a = 0; a < n3; ++a)
            for (std::size_t b = 0; b < n3; ++b) {
                // Link 1 joins atoms 0 and 1; its dimer keeps k2 free.
                if (model.couple_link1) {
                    add(lay.excited(0, a, b), lay.link(0, b), g * phi[a]);
                    add(lay.excited(1, a, b), lay.link(0, b), g * phi[a]);
                }
                // Link 2 joins atoms 1 and 2; its dimer keeps k1 free.
                if (model.couple_link2) {
                    add(lay.excited(1, a, b), lay.link(1, a), g * phi[b]);
                    add(lay.excited(2, a, b), lay.link(1, a), g * phi[b]);
                }
            }
    }
    return t;
}

Eigen::SparseMatrix<double> sparse_hamiltonian(const ThreeAtomModel& model) {
    const auto n = static_cast<Eigen::Index>(model.basis_size());
    Eigen::SparseMatrix<double> upper(n, n);
    const auto t = three_atom_entries(model);
    upper.setFromTriplets(t.begin(), t.end());
    Eigen::SparseMatrix<double> full = upper.selfadjointView<Eigen::Upper>();
    return full;
}

// Atom-order reversal: site i ↔ 2−i, k1 ↔ k2, link 1 ↔ link 2.
std::size_t reflect(const ThreeAtomLayout& lay, std::size_t idx) {
    const std::size_t n3 = lay.n3;
    if (idx < 3 * n3 * n3) {
        const int site = static_cast<int>(idx / (n3 * n3));
        const std::size_t local = idx % (n3 * n3);
        return lay.excited(2 - site, local % n3, local / n3);
    }
    const std::size_t rest = idx - 3 * n3 * n3;
    return lay.link(rest < n3 ? 1 : 0, rest % n3);
}

std::vector<Eigen::SparseMatrix<double>> reflection_subspaces(const ThreeAtomLayout& lay) {
    const auto n = static_cast<Eigen::Index>(lay.size());
    std::vector<Eigen::Triplet<double>> even, odd;
    int ce = 0, co = 0;
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < lay.size(); ++i) {
        const std::size_t r = reflect(lay, i);
        if (r == i) {
            even.emplace_back(static_cast<int>(i), ce++, 1.0);
        } else if (r > i) {
            even.emplace_back(static_cast<int>(i), ce, s);
            even.emplace_back(static_cast<int>(r), ce++, s);
            odd.emplace_back(static_cast<int>(i), co, s);
            odd.emplace_back(static_cast<int>(r), co++, -s);
        }
    }
    Eigen::SparseMatrix<double> ue(n, ce), uo(n, co);
    ue.setFromTriplets(even.begin(), even.end());
    uo.setFromTriplets(odd.begin(), odd.end());
    return {ue, uo};
}

// With a single coupled link the spectator momentum is conserved.
std::vector<Eigen::SparseMatrix<double>> momentum_subspaces(const ThreeAtomLayout& lay, bool link1) {
    const std::size_t n3 = lay.n3;
    const auto n = static_cast<Eigen::Index>(lay.size());
    std::vector<std::vector<std::size_t>> members(2 * n3);
    for (int i = 0; i < 3; ++i)
        for (std::size_t a = 0; a < n3; ++a)
            for (std::size_t b = 0; b < n3; ++b)
                members[link1 ? b : a].push_back(lay.excited(i, a, b));
    for (std::size_t j = 0; j < n3; ++j) {
        members[j].push_back(lay.link(link1 ? 0 : 1, j));
        members[n3 + j].push_back(lay.link(link1 ? 1 : 0, j));
    }
    std::vector<Eigen::SparseMatrix<double>> out;
    for (const auto& m : members) {
        std::vector<Eigen::Triplet<double>> t;
        for (std::size_t c = 0; c < m.size(); ++c)
            t.emplace_back(static_cast<int>(m[c]), static_cast<int>(c), 1.0);
        Eigen::SparseMatrix<double> u(n, static_cast<Eigen::Index>(m.size()));
        u.setFromTriplets(t.begin(), t.end());
        out.push_back(std::move(u));
    }
    return out;
}

}  // namespace

Hamiltonian three_atom_hamiltonian(const ThreeAtomModel& model) {
    model.validate();
    const ThreeAtomLayout lay{model.grid.n3};
    Hamiltonian h;
    h.matrix = Eigen::MatrixXd(sparse_hamiltonian(model));
    h.labels = three_atom_labels(lay);
    return h;
}

EigenSystem solve_three_atom(const ThreeAtomModel& model, std::size_t threads) {
    model.validate();
    const ThreeAtomLayout lay{model.grid.n3};
    const auto h = sparse_hamiltonian(model);
    const auto subspaces = model.couple_link1 && model.couple_link2 ? reflection_subspaces(lay)
                                                                    : momentum_subspaces(lay, model.couple_link1);
    return diagonalize_subspaces(h, subspaces, three_atom_labels(lay), threads);
}

std::vector<std::complex<double>> ground_momentum_amplitudes(const ThreeAtomModel& model) {
    const std::size_t n3 = model.grid.n3;
    const double s2 = model.lattice.site_sigma() * model.lattice.site_sigma();
    // Covariance of (R1, R2) for independent on-site Gaussians: σ²[[2,−1],[−1,2]].
    const double det = 3.0 * s2 * s2;
    const double norm = std::pow(two_pi * std::sqrt(det), -0.5);
    const double ft = two_pi * std::sqrt(4.0 * det);
    const double L = model.grid.box_length();
    const double shift = model.ground_center_nm() - model.potential.bond_length;
    std::vector<std::complex<double>> g(n3 * n3);
    for (std::size_t a = 0; a < n3; ++a)
        for (std::size_t b = 0; b < n3; ++b) {
            const double k1 = model.grid.k(a);
            const double k2 = model.grid.k(b);
            const double quad = s2 * (2.0 * k1 * k1 + 2.0 * k2 * k2 - 2.0 * k1 * k2);
            g[a * n3 + b] = norm * ft / L * std::exp(-quad) * std::polar(1.0, -(k1 + k2) * shift);
        }
    return g;
}

std::vector<std::complex<double>> probe_amplitudes3(const EigenSystem& eigs, const ThreeAtomModel& model) {
    const ThreeAtomLayout lay{model.grid.n3};
    const auto g = ground_momentum_amplitudes(model);
    const auto n = static_cast<Eigen::Index>(eigs.size());
    Eigen::VectorXd re = Eigen::VectorXd::Zero(n), im = Eigen::VectorXd::Zero(n);
    const double w = 1.0 / std::sqrt(3.0);
    for (int i = 0; i < 3; ++i)
        for (std::size_t ab = 0; ab < g.size(); ++ab) {
            const auto idx = static_cast<Eigen::Index>(lay.excited(i, 0, 0) + ab);
            re(idx) = w * g[ab].real();
            im(idx) = w * g[ab].imag();
        }
    const Eigen::VectorXd ar = eigs.vectors.transpose() * re;
    const Eigen::VectorXd ai = eigs.vectors.transpose() * im;
    std::vector<std::complex<double>> out(eigs.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = {ar(static_cast<Eigen::Index>(k)), ai(static_cast<Eigen::Index>(k))};
    return out;
}

std::vector<Stick> three_atom_sticks(const EigenSystem& eigs, const ThreeAtomModel& model) {
    const auto amp = probe_amplitudes3(eigs, model);
    std::vector<Stick> sticks(eigs.size());
    for (std::size_t n = 0; n < eigs.size(); ++n) {
        sticks[n].energy = eigs.energies(static_cast<Eigen::Index>(n));
        sticks[n].c_abs = std::norm(amp[n]);
        sticks[n].loss_fraction = loss_fraction(sector_weights(eigs, n), model.loss, 3);
    }
    return sticks;
}

SpectrumResult absorption_spectrum3(const EigenSystem& eigs, const ThreeAtomModel& model,
                                    const SpectrumAxis& axis, double broadening) {
    const double reach = std::max(std::abs(axis.min), std::abs(axis.max));
    if (reach > model.grid.max_energy())
        throw ConfigError("spectrum axis reaches beyond the three-atom grid energy coverage");
    return bin_and_broaden(three_atom_sticks(eigs, model), axis, broadening);
}

SpectrumResult absorption_spectrum3(const ThreeAtomModel& model, const SpectrumAxis& axis, double broadening,
                                    std::size_t threads) {
    model.validate();
    if (model.scan == ScanMode::Sideband)
        return absorption_spectrum3(solve_three_atom(model, threads), model, axis, broadening);
    const auto pts = axis.points();
    SpectrumResult out;
    out.axis = pts;
    out.broadening = broadening;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ThreeAtomModel m = model;
        m.delta_c = pts[i];
        const auto r = absorption_spectrum3(solve_three_atom(m, threads), m, axis, broadening);
        out.c_abs.push_back(r.c_abs[i]);
        out.loss.push_back(r.loss[i]);
        out.broadened.push_back(r.broadened[i]);
    }
    out.lines = find_lines(out.axis, out.broadened, broadening);
    return out;
}

const char* to_string(StateClass c) {
    switch (c) {
    case StateClass::Trimeron:
        return "trimeron";
    case StateClass::DimeronFree:
        return "dimeron+free";
    case StateClass::Central:
        return "central";
    case StateClass::Continuum:
        return "continuum";
    }
    return "continuum";
}

Eigen::VectorXd analytic_trimeron(const ThreeAtomModel& model) {
    const ThreeAtomLayout lay{model.grid.n3};
    const auto phi = vibrational_momentum_amplitudes(model);
    Eigen::VectorXd t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lay.size()));
    const double c = 1.0 / std::sqrt(3.0);
    const double site_weight[3] = {0.5, 1.0, 0.5};
    for (int i = 0; i < 3; ++i)
        for (std::size_t a = 0; a < lay.n3; ++a)
            for (std::size_t b = 0; b < lay.n3; ++b)
                t(static_cast<Eigen::Index>(lay.excited(i, a, b))) = c * site_weight[i] * phi[a] * phi[b];
    for (int w = 0; w < 2; ++w)
        for (std::size_t j = 0; j < lay.n3; ++j)
            t(static_cast<Eigen::Index>(lay.link(w, j))) = -0.5 * phi[j];
    return t / t.norm();
}

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct StateView {
    std::array<Eigen::Map<const RowMat>, 3> excited;
    Eigen::Map<const Eigen::VectorXd> link1;
    Eigen::Map<const Eigen::VectorXd> link2;
};

StateView view_state(const EigenSystem& eigs, const ThreeAtomLayout& lay, std::size_t n) {
    const double* col = eigs.vectors.col(static_cast<Eigen::Index>(n)).data();
    const auto n3 = static_cast<Eigen::Index>(lay.n3);
    return StateView{{Eigen::Map<const RowMat>(col + lay.excited(0, 0, 0), n3, n3),
                      Eigen::Map<const RowMat>(col + lay.excited(1, 0, 0), n3, n3),
                      Eigen::Map<const RowMat>(col + lay.excited(2, 0, 0), n3, n3)},
                     Eigen::Map<const Eigen::VectorXd>(col + lay.link(0, 0), n3),
                     Eigen::Map<const Eigen::VectorXd>(col + lay.link(1, 0), n3)};
}

}  // namespace

StateAnalysis analyze_state(const EigenSystem& eigs, const ThreeAtomModel& model, std::size_t n,
                            double broadening) {
    const ThreeAtomLayout lay{model.grid.n3};
    const auto phi_std = vibrational_momentum_amplitudes(model);
    const Eigen::Map<const Eigen::VectorXd> phi(phi_std.data(), static_cast<Eigen::Index>(phi_std.size()));
    const StateView s = view_state(eigs, lay, n);

    StateAnalysis out;
    out.index = n;
    out.energy = eigs.energies(static_cast<Eigen::Index>(n));
    for (int i = 0; i < 3; ++i) {
        out.sector_weights[static_cast<std::size_t>(i)] = s.excited[static_cast<std::size_t>(i)].squaredNorm();
        const auto& p = s.excited[static_cast<std::size_t>(i)];
        out.p_link1 += (phi.transpose() * p).squaredNorm();
        out.p_link2 += (p * phi).squaredNorm();
        const double both = phi.dot(p * phi);
        out.p_both += both * both;
    }
    out.sector_weights[3] = s.link1.squaredNorm();
    out.sector_weights[4] = s.link2.squaredNorm();
    const double d1 = phi.dot(s.link1);
    const double d2 = phi.dot(s.link2);
    out.p_link1 += s.link1.squaredNorm() + d2 * d2;
    out.p_link2 += s.link2.squaredNorm() + d1 * d1;
    out.p_both += d1 * d1 + d2 * d2;
    out.single_link = out.p_link1 + out.p_link2 - 2.0 * out.p_both;

    const Eigen::VectorXd target = analytic_trimeron(model);
    const double ov = target.dot(eigs.vectors.col(static_cast<Eigen::Index>(n)));
    out.trimeron_overlap = ov * ov;

    const double w_md = out.sector_weights[3] + out.sector_weights[4];
    if (out.p_both > 0.5)
        out.tag = StateClass::Trimeron;
    else if (out.single_link > 0.5)
        out.tag = StateClass::DimeronFree;
    else if (w_md < 0.05 && std::abs(out.energy) < broadening)
        out.tag = StateClass::Central;
    else
        out.tag = StateClass::Continuum;
    return out;
}

std::optional<TrimeronReport> identify_trimeron(const EigenSystem& eigs, const ThreeAtomModel& model) {
    const Eigen::VectorXd target = analytic_trimeron(model);
    std::optional<TrimeronReport> best;
    for (std::size_t n = 0; n < eigs.size() && eigs.energies(static_cast<Eigen::Index>(n)) < 0.0; ++n) {
        const double ov = target.dot(eigs.vectors.col(static_cast<Eigen::Index>(n)));
        if (!best || ov * ov > best->overlap) {
            TrimeronReport r;
            r.index = n;
            r.energy = eigs.energies(static_cast<Eigen::Index>(n));
            r.overlap = ov * ov;
            best = r;
        }
    }
    if (!best)
        return best;
    const StateAnalysis a = analyze_state(eigs, model, best->index);
    best->tag = a.tag;
    // Sign each sector amplitude by its projection on the analytic target.
    const ThreeAtomLayout lay{model.grid.n3};
    const auto col = eigs.vectors.col(static_cast<Eigen::Index>(best->index));
    const double sign = target.dot(col) < 0.0 ? -1.0 : 1.0;
    const std::array<std::pair<std::size_t, std::size_t>, 5> ranges{{
        {lay.excited(0, 0, 0), lay.n3 * lay.n3},
        {lay.excited(1, 0, 0), lay.n3 * lay.n3},
        {lay.excited(2, 0, 0), lay.n3 * lay.n3},
        {lay.link(0, 0), lay.n3},
        {lay.link(1, 0), lay.n3},
    }};
    for (std::size_t k = 0; k < 5; ++k) {
        const auto seg = col.segment(static_cast<Eigen::Index>(ranges[k].first),
                                     static_cast<Eigen::Index>(ranges[k].second));
        const auto tseg = target.segment(static_cast<Eigen::Index>(ranges[k].first),
                                         static_cast<Eigen::Index>(ranges[k].second));
        const double proj = sign * tseg.dot(seg);
        best->amplitudes[k] = (proj < 0.0 ? -1.0 : 1.0) * std::sqrt(a.sector_weights[k]);
    }
    return best;
}

double spectator_variance(const EigenSystem& eigs, const ThreeAtomModel& model, std::size_t n, int confined) {
    const ThreeAtomLayout lay{model.grid.n3};
    const auto phi_std = vibrational_momentum_amplitudes(model);
    const Eigen::Map<const Eigen::VectorXd> phi(phi_std.data(), static_cast<Eigen::Index>(phi_std.size()));
    const StateView s = view_state(eigs, lay, n);

    // Spectator-link amplitudes of Π_c (1 − Π_other) ψ, one vector per sector.
    std::vector<Eigen::VectorXd> parts;
    auto strip = [&](Eigen::VectorXd q) {
        q -= phi * phi.dot(q);
        return q;
    };
    for (const auto& p : s.excited)
        parts.push_back(strip(confined == 0 ? Eigen::VectorXd(p.transpose() * phi) : Eigen::VectorXd(p * phi)));
    parts.push_back(strip(confined == 0 ? Eigen::VectorXd(s.link1) : Eigen::VectorXd(s.link2)));

    const double L = model.grid.box_length();
    const std::size_t m = 8 * lay.n3;
    std::vector<double> ys(m), rho(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        ys[i] = -L / 2.0 + L * static_cast<double>(i) / static_cast<double>(m);
    for (const auto& q : parts)
        for (std::size_t i = 0; i < m; ++i) {
            std::complex<double> amp = 0.0;
            for (std::size_t j = 0; j < lay.n3; ++j)
                amp += q(static_cast<Eigen::Index>(j)) * std::polar(1.0, model.grid.k(j) * ys[i]);
            rho[i] += std::norm(amp);
        }
    double w = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        w += rho[i];
        mean += rho[i] * ys[i];
    }
    if (!(w > 0.0))
        return 0.0;
    mean /= w;
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        var += rho[i] * (ys[i] - mean) * (ys[i] - mean);
    return var / w;
}

ThreeAtomFeatures classify_features(const EigenSystem& eigs, const ThreeAtomModel& model, double broadening) {
    ThreeAtomFeatures out;
    const auto sticks = three_atom_sticks(eigs, model);
    struct Acc {
        double se = 0.0, s = 0.0, e = 0.0;
        std::size_t count = 0;
        void add(double energy, double strength) {
            se += strength * energy;
            s += strength;
            e += energy;
            ++count;
        }
        std::optional<FeatureGroup> finish(StateClass tag) const {
            if (count == 0)
                return std::nullopt;
            FeatureGroup g;
            g.tag = tag;
            g.weight = s;
            g.count = count;
            g.energy = s > 0.0 ? se / s : e / static_cast<double>(count);
            return g;
        }
    };
    Acc trimeron, dimeron, central, positive;
    for (std::size_t n = 0; n < eigs.size(); ++n) {
        const double E = eigs.energies(static_cast<Eigen::Index>(n));
        const double strength = sticks[n].c_abs * sticks[n].loss_fraction;
        if (E > broadening) {
            positive.add(E, strength);
            continue;
        }
        const StateAnalysis a = analyze_state(eigs, model, n, broadening);
        if (E < 0.0)
            out.negative_states.push_back(a);
        if (a.tag == StateClass::Trimeron && E < 0.0)
            trimeron.add(E, strength);
        else if (a.tag == StateClass::DimeronFree && E < 0.0)
            dimeron.add(E, strength);
        else if (a.tag == StateClass::Central)
            central.add(E, strength);
    }
    out.trimeron = trimeron.finish(StateClass::Trimeron);
    out.dimeron_free = dimeron.finish(StateClass::DimeronFree);
    out.central = central.finish(StateClass::Central);
    out.positive = positive.finish(StateClass::Continuum);
    return out;
}

HoppingRate hopping_rate(double omega_c, double delta_c, double f_tilde) {
    if (delta_c == 0.0)
        throw DomainError("hopping rate: delta_C = 0 is the resonant regime where the perturbative formula fails");
    HoppingRate r;
    const double value = omega_c * omega_c * f_tilde / (2.0 * delta_c);
    r.magnitude = std::abs(value);
    r.sign = value > 0.0 ? 1 : (value < 0.0 ? -1 : 0);
    return r;
}

double motional_state_overlap_f_tilde(const ThreeAtomModel& model, const GaussianState& spectator) {
    // Own momentum quadrature: the periodic box must hold the centre shift
    // plus both tails, otherwise displaced spectators alias back.
    const double l = model.potential.harmonic_length();
    const double w2 = spectator.width * spectator.width;
    const double shift = spectator.center - model.potential.bond_length;
    const double L = std::max(model.grid.box_length(), 4.0 * (std::abs(shift) + 10.0 * (l + spectator.width)));
    const double dk = two_pi / L;
    const double k_max = 10.0 / std::sqrt(0.5 * l * l + w2);
    const auto half = static_cast<long>(std::ceil(k_max / dk));
    const double phi_pref = std::sqrt(two_pi / L) * std::sqrt(l) * std::pow(pi, -0.25);
    const double chi_pref = std::sqrt(1.0 / L) * std::pow(two_pi * w2, -0.25) * std::sqrt(4.0 * pi * w2);
    std::complex<double> sum = 0.0;
    for (long j = -half; j <= half; ++j) {
        const double k = static_cast<double>(j) * dk;
        sum += phi_pref * std::exp(-0.5 * k * k * l * l) * chi_pref * std::exp(-k * k * w2) *
               std::polar(1.0, -k * shift);
    }
    return std::norm(sum);
}

double motional_state_overlap_f_tilde(const ThreeAtomModel& model) {
    GaussianState spectator = lattice_relative_ground_state(model.lattice);
    spectator.center = model.potential.bond_length;
    return motional_state_overlap_f_tilde(model, spectator);
}

}  // namespace dimeron
