// Acceptance suite: `acceptance N` checks criterion N, no argument runs all.
// Prints one PASS/FAIL line per criterion; exit code 1 if any fails.

#include "dimeron/config.hpp"
#include "dimeron/correlations.hpp"
#include "dimeron/errors.hpp"
#include "dimeron/fano2.hpp"
#include "dimeron/fano3.hpp"
#include "dimeron/io.hpp"
#include "dimeron/parallel.hpp"
#include "dimeron/physics.hpp"
#include "dimeron/sampler.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace dimeron;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const std::vector<double> strong_couplings{2.3, 3.2, 4.4, 6.2};

TwoAtomModel two_atom(double omega_c_mhz) {
    TwoAtomModel m;
    m.omega_c = mhz_to_angular(omega_c_mhz);
    return m;
}

SpectrumAxis default_axis() { return {mhz_to_angular(-8.0), mhz_to_angular(8.0), mhz_to_angular(0.01)}; }

// 1. ⟨T⟩ = ω_v/4 and 3ω_v/4, within 1%, under 1 s.
Outcome virial() {
    PotentialModel p;
    p.n_modes = 2;
    const ContinuumGrid grid;
    const double t0 = kinetic_energy_expectation(p, 0, grid);
    const double t1 = kinetic_energy_expectation(p, 1, grid);
    const double e0 = std::abs(t0 / (p.omega_v / 4) - 1);
    const double e1 = std::abs(t1 / (3 * p.omega_v / 4) - 1);
    return {e0 < 0.01 && e1 < 0.01, "T0=" + fmt("%.4f", angular_to_mhz(t0)) + " MHz (rel " + fmt("%.1e", e0) +
                                        "), T1=" + fmt("%.4f", angular_to_mhz(t1)) + " MHz (rel " + fmt("%.1e", e1) +
                                        ")"};
}

// 2. Ω_C² f̃/(2|Δ_C|) = 2π × 4.0 kHz within 5%.
Outcome hopping() {
    const HoppingRate r = hopping_rate(mhz_to_angular(2.9), mhz_to_angular(-367.6), 0.35);
    const double khz = angular_to_mhz(r.magnitude) * 1e3;
    return {std::abs(khz / 4.0 - 1) < 0.05, "rate/2pi=" + fmt("%.3f", khz) + " kHz"};
}

// 3. Three maxima at 6.2 MHz; central maximum within 0.15 MHz of zero for each Ω_C.
Outcome strong_coupling_structure() {
    bool ok = true;
    std::ostringstream d;
    for (double om : strong_couplings) {
        const TwoAtomModel m = two_atom(om);
        const SpectrumResult s = absorption_spectrum(m, default_axis());
        double central = 1e9;
        for (const auto& l : s.lines)
            if (std::abs(l.peak) < std::abs(central))
                central = l.peak;
        const bool c_ok = std::abs(angular_to_mhz(central)) <= 0.15;
        ok = ok && c_ok;
        d << om << "MHz: maxima=" << s.lines.size() << " central=" << fmt("%.3f", angular_to_mhz(central)) << "; ";
        if (om == 6.2)
            ok = ok && s.lines.size() == 3;
    }
    return {ok, d.str()};
}

// 4. Negative macrodimeron weights (0.5, 0.5) ± 0.05 and Φ_v overlap > 0.9 at 6.2 MHz.
Outcome negative_composition() {
    const TwoAtomModel m = two_atom(6.2);
    const auto rep = find_macrodimerons(solve_two_atom(m), m);
    if (!rep.negative)
        return {false, "no negative macrodimeron"};
    const auto& n = *rep.negative;
    const bool ok = std::abs(n.weights.macrodimer - 0.5) <= 0.05 && std::abs(n.weights.excited - 0.5) <= 0.05 &&
                    n.motional_overlap > 0.9;
    return {ok, "E=" + fmt("%.4f", angular_to_mhz(n.energy)) + " MHz w_md=" + fmt("%.4f", n.weights.macrodimer) +
                    " w_se=" + fmt("%.4f", n.weights.excited) + " overlap=" + fmt("%.4f", n.motional_overlap)};
}

// 5. Splitting linear in Ω_C (residual < 5% of max); toy limit √2 Ω_C to 1e-8.
Outcome splitting_linearity() {
    std::vector<TwoAtomModel> models;
    for (double om : strong_couplings)
        models.push_back(two_atom(om));
    const auto rows = splitting_curve(models, default_thread_count());
    const auto line = fit_splitting_line(rows);
    std::ostringstream d;
    for (const auto& r : rows)
        d << (r.splitting ? fmt("%.3f", angular_to_mhz(*r.splitting)) : std::string("unresolved")) << " ";
    if (!line || line->points != rows.size())
        return {false, "unresolved rows: " + d.str()};

    double toy_err = 0.0;
    for (double om : strong_couplings) {
        const double w = mhz_to_angular(om);
        const std::vector<double> level{0.0}, overlap{1.0};
        const EigenSystem e = diagonalize(single_mode_fano_hamiltonian(w, 0.0, level, overlap));
        toy_err = std::max(toy_err, std::abs((e.energies(1) - e.energies(0)) / (std::sqrt(2.0) * w) - 1.0));
    }
    const bool ok = line->max_residual_fraction < 0.05 && toy_err <= 1e-8;
    return {ok, "splittings[MHz]=" + d.str() + "slope=" + fmt("%.4f", line->slope) +
                    " max_resid/max=" + fmt("%.4f", line->max_residual_fraction) + " toy_rel_err=" +
                    fmt("%.1e", toy_err)};
}

// 6. dδ/dE width at the positive macrodimeron narrows over {3, 5, 8} MHz; at
// Ω_C = 0.05 MHz the even phase gains π across the v = 0 level.
Outcome phase_narrowing() {
    std::vector<double> widths;
    std::ostringstream d;
    for (double om : {3.0, 5.0, 8.0}) {
        const TwoAtomModel m = two_atom(om);
        const auto rep = find_macrodimerons(solve_two_atom(m), m);
        if (!rep.positive)
            return {false, "no positive macrodimeron at " + fmt("%.1f", om) + " MHz"};
        widths.push_back(rep.positive->width);
        d << om << "MHz width=" << fmt("%.3f", angular_to_mhz(rep.positive->width)) << "; ";
    }
    const bool narrowing = widths[1] < widths[0] && widths[2] < widths[1];

    // Weak coupling: detune the level into the continuum so it is visible as
    // a resonance at E = -Δ_C = 2 MHz, then compare the unwrapped phase on the
    // reliable points bracketing a ±0.5 MHz window.
    TwoAtomModel weak = two_atom(0.05);
    weak.delta_c = mhz_to_angular(-2.0);
    const double level = -weak.delta_c;
    const double half = mhz_to_angular(0.5);
    const PhaseCurve c = scattering_phases(solve_two_atom(weak), weak, Parity::Even);
    std::optional<double> below, above;
    for (std::size_t i = 0; i < c.energies.size(); ++i) {
        if (!c.reliable[i])
            continue;
        if (c.energies[i] <= level - half)
            below = c.unwrapped[i];
        if (c.energies[i] >= level + half && !above)
            above = c.unwrapped[i];
    }
    if (!below || !above)
        return {false, d.str() + "phase window not covered"};
    const double jump = *above - *below;
    const bool jump_ok = std::abs(jump / pi - 1.0) < 0.1;
    return {narrowing && jump_ok, d.str() + "weak-coupling phase gain=" + fmt("%.4f", jump / pi) + " pi"};
}

// 7. Three-atom feature ordering and trimeron overlap > 0.8 at 6.2 MHz.
Outcome three_atom_ordering() {
    ThreeAtomModel m;
    m.omega_c = mhz_to_angular(6.2);
    const EigenSystem e = solve_three_atom(m, default_thread_count());
    const ThreeAtomFeatures f = classify_features(e, m);
    const auto t = identify_trimeron(e, m);
    if (!f.trimeron || !f.dimeron_free || !f.central || !f.positive || !t)
        return {false, "missing feature group"};
    const double et = f.trimeron->energy, ed = f.dimeron_free->energy, ec = f.central->energy,
                 ep = f.positive->energy;
    const bool order = et < ed && ed < 0.0 && std::abs(ec) <= default_broadening && ec < ep;
    const bool overlap = t->overlap > 0.8;
    return {order && overlap, "E[MHz] trimeron=" + fmt("%.3f", angular_to_mhz(et)) + " dimeron+free=" +
                                  fmt("%.3f", angular_to_mhz(ed)) + " central=" + fmt("%.3f", angular_to_mhz(ec)) +
                                  " positive=" + fmt("%.3f", angular_to_mhz(ep)) + " ordering=" +
                                  (order ? "ok" : "violated") + " trimeron_overlap=" + fmt("%.4f", t->overlap)};
}

// Literal per-site evaluation of the connected correlators.
struct Literal {
    const ImageSet& s;
    double mean(int x, int y) const {
        double m = 0.0;
        for (const auto& im : s.images)
            m += im.hole(x, y);
        return m / static_cast<double>(s.images.size());
    }
    std::optional<double> two(Offset d) const {
        double acc = 0.0;
        int n = 0;
        for (int y = s.roi.y0; y < s.roi.y1; ++y)
            for (int x = s.roi.x0; x < s.roi.x1; ++x) {
                if (!s.roi.contains(x + d.dx, y + d.dy))
                    continue;
                double ab = 0.0;
                for (const auto& im : s.images)
                    ab += im.hole(x, y) * im.hole(x + d.dx, y + d.dy);
                acc += ab / static_cast<double>(s.images.size()) - mean(x, y) * mean(x + d.dx, y + d.dy);
                ++n;
            }
        if (n == 0)
            return std::nullopt;
        return acc / n;
    }
    std::optional<double> three(Offset r0, Offset d) const {
        double acc = 0.0;
        int n = 0;
        for (int y = s.roi.y0; y < s.roi.y1; ++y)
            for (int x = s.roi.x0; x < s.roi.x1; ++x) {
                if (!s.roi.contains(x + r0.dx, y + r0.dy) || !s.roi.contains(x + d.dx, y + d.dy))
                    continue;
                const double a = mean(x, y), b = mean(x + r0.dx, y + r0.dy), c = mean(x + d.dx, y + d.dy);
                double t = 0.0;
                for (const auto& im : s.images)
                    t += (im.hole(x, y) - a) * (im.hole(x + r0.dx, y + r0.dy) - b) * (im.hole(x + d.dx, y + d.dy) - c);
                acc += t / static_cast<double>(s.images.size());
                ++n;
            }
        if (n == 0)
            return std::nullopt;
        return acc / n;
    }
};

// 8. Estimators equal the literal definitions on 200 random sets; hand example 0.0625.
Outcome correlator_oracle() {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> dim(1, 5), shots(1, 6);
    std::uniform_real_distribution<double> p(0.05, 0.7);
    double worst = 0.0;
    std::size_t compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
        ImageSet s;
        s.width = dim(rng);
        s.height = dim(rng);
        s.roi = {0, 0, s.width, s.height};
        const int n = shots(rng);
        std::bernoulli_distribution hole(p(rng));
        for (int i = 0; i < n; ++i) {
            LatticeImage im(s.width, s.height);
            for (auto& v : im.occupancy)
                v = hole(rng) ? 0 : 1;
            s.images.push_back(im);
        }
        const Literal lit{s};
        for (int dy = -2; dy <= 2; ++dy)
            for (int dx = -2; dx <= 2; ++dx) {
                const Offset d{dx, dy};
                if (d == Offset{0, 0})
                    continue;
                const auto ref = lit.two(d);
                if (ref) {
                    worst = std::max(worst, std::abs(g2(s, d).value - *ref));
                    ++compared;
                }
                for (Offset r0 : {Offset{-1, 1}, Offset{1, 0}}) {
                    if (d == r0)
                        continue;
                    const auto ref3 = lit.three(r0, d);
                    if (ref3) {
                        worst = std::max(worst, std::abs(g3(s, r0, d).value - *ref3));
                        ++compared;
                    }
                }
            }
    }
    ImageSet hand;
    hand.width = hand.height = 3;
    hand.roi = {0, 0, 3, 3};
    LatticeImage a(3, 3), b(3, 3);
    b.set(0, 0, 0);
    b.set(1, 1, 0);
    hand.images = {a, b};
    const double h = g2(hand, {1, 1}).value;
    return {worst <= 1e-12 && h == 0.0625 && compared > 1000,
            "comparisons=" + std::to_string(compared) + " max|diff|=" + fmt("%.1e", worst) + " hand=" + fmt("%.17g", h)};
}

// 9. Round trip at a 3:1 event ratio recovers 3 ± 0.5; the reference targets G2 = 2.4e-2, G3 = 4.8e-3 give 3:y with y in [0, 2].
Outcome ratio_round_trip() {
    const std::size_t threads = default_thread_count();
    SampleConfig truth;
    truth.n_shots = 1000;
    truth.p2 = 0.028;
    truth.p3 = 0.011;
    truth.seed = 7;
    const SampleResult gen = generate_images(truth, threads);
    const double true_ratio = static_cast<double>(gen.pair_events) / static_cast<double>(gen.triple_events);
    const Offset r0 = truth.directions.front();
    const double tg2 = g2(gen.images, r0).value;
    const double tg3 = g3(gen.images, r0, -r0).value;

    SampleConfig templ;
    templ.n_shots = 1000;
    FitOptions opts;
    opts.shots = 1000;
    const RatioFit rt = fit_ratio(tg2, tg3, templ, opts, threads);
    const bool rt_ok = rt.converged && rt.ratio && std::abs(*rt.ratio - 3.0) <= 0.5;

    const RatioFit tab = fit_ratio(2.40e-2, 4.8e-3, SampleConfig{}, FitOptions{}, threads);
    // P = 3:y  ⇔  y = 3/P
    const double y = tab.ratio ? 3.0 / *tab.ratio : INFINITY;
    const bool tab_ok = tab.converged && tab.ratio && std::abs(y - 1.0) <= 1.0;
    return {rt_ok && tab_ok, "generated G2=" + fmt("%.4f", tg2) + " G3=" + fmt("%.5f", tg3) + " ratio=" +
                                 fmt("%.3f", true_ratio) + " -> fitted " + (rt.ratio ? fmt("%.3f", *rt.ratio) : "large") +
                                 "; table targets -> p2=" + fmt("%.4f", tab.p2) + " p3=" + fmt("%.4f", tab.p3) +
                                 " ratio=" + tab.ratio_label() + " (3:" + fmt("%.2f", y) + ")"};
}

// 10. Pair-only losses at G2 ≈ 2.3e-2 give G3_R0(−R0) < 0 of order 1e-3.
Outcome pair_only_negative() {
    const std::size_t threads = default_thread_count();
    SampleConfig c;
    c.n_shots = 3000;
    const RatioFit tuned = fit_ratio(2.3e-2, 0.0, c, FitOptions{}, threads);
    c.p2 = tuned.p2;
    const SampleResult s = generate_images(c, threads);
    const double achieved = g2(s.images, c.directions.front()).value;
    const CorrResult r = pair_only_g3_background(c, threads);
    const double mag = std::abs(r.value);
    const bool ok = r.value < 0.0 && mag >= 3e-4 && mag <= 3e-3 && std::abs(achieved / 2.3e-2 - 1.0) < 0.1;
    return {ok, "p2=" + fmt("%.4f", c.p2) + " G2=" + fmt("%.4f", achieved) + " G3=" + fmt("%.3e", r.value) +
                    " +- " + fmt("%.1e", r.error)};
}

int run_cli(const std::string& cli, const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

// 11. Byte-identical outputs for identical config + seed; lossless sample → correlate.
Outcome determinism() {
    const char* cli_env = std::getenv("DIMERON_CLI");
    if (!cli_env)
        return {false, "DIMERON_CLI not set"};
    const std::string cli = cli_env;
    namespace fs = std::filesystem;
    const fs::path work = fs::temp_directory_path() / ("dimeron_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string cfg_text =
        "model.omega_c_mhz = 6.2\nsampler.n_shots = 400\nsampler.p2 = 0.03\nsampler.p3 = 0.01\nsampler.seed = 99\n";
    write_file_atomic(work / "run.cfg", cfg_text);
    bool ok = true;
    std::vector<std::string> files;
    for (const char* tag : {"a", "b"}) {
        const std::string base = "--config \"" + (work / "run.cfg").string() + "\" --out \"" + (work / tag).string() + "\" ";
        ok = ok && run_cli(cli, base + "spectrum2") == 0;
        ok = ok && run_cli(cli, base + "sample") == 0;
        ok = ok && run_cli(cli, base + "correlate --images \"" + (work / tag / "images.json").string() + "\"") == 0;
    }
    if (!ok) {
        fs::remove_all(work);
        return {false, "CLI run failed"};
    }
    std::size_t identical = 0, total = 0;
    for (const auto& entry : fs::directory_iterator(work / "a")) {
        ++total;
        const fs::path other = work / "b" / entry.path().filename();
        if (fs::exists(other) && read_file(entry.path()) == read_file(other))
            ++identical;
    }

    // Round trip: the file equals the in-memory sample, and re-serializes to the same bytes.
    const RunConfig cfg = parse_config(cfg_text);
    const SampleResult mem = generate_images(cfg.sampler, 1);
    const std::string text = read_file(work / "a" / "images.json");
    const ImageSet loaded = image_set_from_json(text);
    bool lossless = image_set_to_json(loaded) == text && loaded.images.size() == mem.images.images.size();
    for (std::size_t i = 0; lossless && i < loaded.images.size(); ++i)
        lossless = loaded.images[i].occupancy == mem.images.images[i].occupancy;
    lossless = lossless && g2(loaded, {-1, 1}).value == g2(mem.images, {-1, 1}).value;
    fs::remove_all(work);
    return {identical == total && total >= 6 && lossless,
            std::to_string(identical) + "/" + std::to_string(total) + " files identical, round trip " +
                (lossless ? "lossless" : "lossy")};
}

struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

const std::vector<Criterion> criteria{
    {"virial kinetic energy", 1.0, virial},
    {"hopping rate", 1e-3, hopping},
    {"two-atom three-line structure", 4 * 30.0, strong_coupling_structure},
    {"negative macrodimeron composition", 30.0, negative_composition},
    {"splitting linearity and toy limit", 120.0, splitting_linearity},
    {"phase narrowing and weak-coupling pi", 120.0, phase_narrowing},
    {"three-atom feature ordering", 600.0, three_atom_ordering},
    {"correlator oracle equivalence", 10.0, correlator_oracle},
    {"ratio round trip", 300.0, ratio_round_trip},
    {"pair-only negative G3", 300.0, pair_only_negative},
    {"determinism and format", 60.0, determinism},
};

bool run(std::size_t n) {
    const Criterion& c = criteria[n - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = c.run();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt < c.limit_s;
    const bool pass = o.pass && in_time;
    std::printf("[%s] AC%zu %s: %s (%.3g s, limit %.3g s%s)\n", pass ? "PASS" : "FAIL", n, c.name,
                o.detail.c_str(), dt, c.limit_s, in_time ? "" : ", too slow");
    std::fflush(stdout);
    return pass;
}

}  // namespace

int main(int argc, char** argv) {
    bool all = true;
    if (argc > 1) {
        const long n = std::strtol(argv[1], nullptr, 10);
        if (n < 1 || n > static_cast<long>(criteria.size())) {
            std::fprintf(stderr, "usage: acceptance [1-%zu]\n", criteria.size());
            return 1;
        }
        all = run(static_cast<std::size_t>(n));
    } else {
        for (std::size_t n = 1; n <= criteria.size(); ++n)
            all = run(n) && all;
    }
    return all ? 0 : 1;
}
