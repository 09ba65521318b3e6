#include "dimeron/config.hpp"
#include "dimeron/errors.hpp"
#include "dimeron/fano2.hpp"
#include "dimeron/fano3.hpp"
#include "dimeron/io.hpp"
#include "dimeron/parallel.hpp"
#include "dimeron/sampler.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

using namespace dimeron;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string out = ".";
    std::size_t threads = 0;
    std::optional<std::uint64_t> seed;
    bool verbose = false;
    std::string images;
    std::optional<double> target_g2;
    std::optional<double> target_g3;
};

struct Context {
    RunConfig cfg;
    fs::path out;
    std::size_t threads = 1;
    bool verbose = false;

    void log(const std::string& msg) const {
        if (verbose)
            std::cerr << msg << "\n";
    }
    void write(const std::string& name, const std::string& content) const {
        write_file_atomic(out / name, content);
        log("wrote " + (out / name).string());
    }
};

double mhz(double omega) { return angular_to_mhz(omega); }

json optional_mhz(const std::optional<double>& v) { return v ? json(mhz(*v)) : json(nullptr); }

std::string omega_tag(double omega_c_mhz) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", omega_c_mhz);
    return buf;
}

json lines_json(const SpectrumResult& s) {
    json lines = json::array();
    for (const auto& l : s.lines)
        lines.push_back({{"peak_mhz", mhz(l.peak)}, {"centroid_mhz", mhz(l.centroid)}, {"height", l.height}});
    return lines;
}

std::string spectrum_csv(const SpectrumResult& s) {
    CsvWriter csv({"delta_p_mhz", "c_abs", "loss_signal", "broadened"});
    for (std::size_t i = 0; i < s.axis.size(); ++i) {
        csv.field(mhz(s.axis[i])).field(s.c_abs[i]).field(s.loss[i]).field(s.broadened[i]);
        csv.end_row();
    }
    return csv.str();
}

int cmd_spectrum2(const Context& ctx) {
    json summary = json::array();
    const auto couplings = ctx.cfg.couplings_mhz();
    for (double om : couplings) {
        const TwoAtomModel model = two_atom_model(ctx.cfg, om);
        ctx.log("spectrum2: Omega_C/2pi = " + omega_tag(om) + " MHz");
        const SpectrumResult s = absorption_spectrum(model, ctx.cfg.axis(), ctx.cfg.broadening(), ctx.threads);
        const std::string name = couplings.size() == 1 ? "spectrum2.csv" : "spectrum2_omega" + omega_tag(om) + "mhz.csv";
        ctx.write(name, spectrum_csv(s));
        json entry{{"omega_c_mhz", om}, {"file", name}, {"lines", lines_json(s)}};
        if (model.scan == ScanMode::Sideband && model.omega_c > 0.0) {
            const auto rep = find_macrodimerons(solve_two_atom(model), model);
            if (rep.negative)
                entry["negative_macrodimeron"] = {{"energy_mhz", mhz(rep.negative->energy)},
                                                  {"w_md", rep.negative->weights.macrodimer},
                                                  {"w_se", rep.negative->weights.excited},
                                                  {"motional_overlap", rep.negative->motional_overlap}};
            else
                entry["negative_macrodimeron"] = "unresolved";
        }
        summary.push_back(std::move(entry));
    }
    ctx.write("spectrum2.json", json{{"spectra", summary}}.dump(2) + "\n");
    return 0;
}

json feature_json(const std::optional<FeatureGroup>& g) {
    if (!g)
        return nullptr;
    return {{"energy_mhz", mhz(g->energy)}, {"weight", g->weight}, {"states", g->count}};
}

int cmd_spectrum3(const Context& ctx) {
    const double om = ctx.cfg.couplings_mhz().front();
    const ThreeAtomModel model = three_atom_model(ctx.cfg, om);
    ctx.log("spectrum3: basis size " + std::to_string(model.basis_size()));
    json summary{{"omega_c_mhz", om}, {"basis_size", model.basis_size()}};
    SpectrumResult s;
    if (model.scan == ScanMode::Sideband) {
        const EigenSystem eigs = solve_three_atom(model, ctx.threads);
        s = absorption_spectrum3(eigs, model, ctx.cfg.axis(), ctx.cfg.broadening());
        if (const auto tr = identify_trimeron(eigs, model)) {
            summary["trimeron"] = {{"energy_mhz", mhz(tr->energy)},
                                   {"overlap", tr->overlap},
                                   {"class", to_string(tr->tag)},
                                   {"sector_amplitudes", tr->amplitudes}};
        } else {
            summary["trimeron"] = "unresolved";
        }
        const auto f = classify_features(eigs, model, ctx.cfg.broadening());
        summary["features"] = {{"trimeron", feature_json(f.trimeron)},
                               {"dimeron_free", feature_json(f.dimeron_free)},
                               {"central", feature_json(f.central)},
                               {"positive", feature_json(f.positive)}};
        json states = json::array();
        for (const auto& a : f.negative_states) {
            if (a.tag == StateClass::Continuum)
                continue;
            json st{{"index", a.index},           {"energy_mhz", mhz(a.energy)},   {"class", to_string(a.tag)},
                    {"p_link1", a.p_link1},       {"p_link2", a.p_link2},          {"p_both", a.p_both},
                    {"single_link", a.single_link}, {"trimeron_overlap", a.trimeron_overlap}};
            if (a.tag == StateClass::DimeronFree)
                st["spectator_variance_nm2"] = spectator_variance(eigs, model, a.index, 0);
            states.push_back(std::move(st));
        }
        summary["negative_states"] = std::move(states);
    } else {
        s = absorption_spectrum3(model, ctx.cfg.axis(), ctx.cfg.broadening(), ctx.threads);
    }
    summary["lines"] = lines_json(s);
    summary["f_tilde"] = motional_state_overlap_f_tilde(model);
    summary["f_tilde_with_center_mismatch"] =
        motional_state_overlap_f_tilde(model, GaussianState{model.ground_center_nm(),
                                                            lattice_relative_ground_state(model.lattice).width});
    ctx.write("spectrum3.csv", spectrum_csv(s));
    ctx.write("spectrum3.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_phases(const Context& ctx) {
    CsvWriter phases({"omega_c_mhz", "parity", "energy_mhz", "phase_rad", "unwrapped_rad", "fit_residual", "reliable"});
    CsvWriter deriv({"omega_c_mhz", "parity", "energy_mhz", "dphase_de_rad_per_mhz"});
    json summary = json::array();
    std::vector<Parity> channels;
    if (ctx.cfg.phase_channels != PhaseChannels::Odd)
        channels.push_back(Parity::Even);
    if (ctx.cfg.phase_channels != PhaseChannels::Even)
        channels.push_back(Parity::Odd);
    for (double om : ctx.cfg.couplings_mhz()) {
        const TwoAtomModel model = two_atom_model(ctx.cfg, om);
        const EigenSystem eigs = solve_two_atom(model);
        for (Parity p : channels) {
            const PhaseCurve c = scattering_phases(eigs, model, p);
            const std::string name = p == Parity::Even ? "even" : "odd";
            for (std::size_t i = 0; i < c.energies.size(); ++i) {
                phases.field(om).field(name).field(mhz(c.energies[i])).field(c.phase[i]).field(c.unwrapped[i]);
                phases.field(c.residual[i]).field(static_cast<long long>(c.reliable[i]));
                phases.end_row();
            }
            for (std::size_t i = 0; i < c.derivative.size(); ++i) {
                deriv.field(om).field(name).field(mhz(c.derivative_energies[i])).field(c.derivative[i] * two_pi);
                deriv.end_row();
            }
        }
        json entry{{"omega_c_mhz", om}};
        if (model.omega_c > 0.0) {
            const auto rep = find_macrodimerons(eigs, model);
            entry["positive_macrodimeron"] =
                rep.positive ? json{{"energy_mhz", mhz(rep.positive->energy)}, {"width_mhz", mhz(rep.positive->width)}}
                             : json("unresolved");
        }
        summary.push_back(std::move(entry));
    }
    ctx.write("phases.csv", phases.str());
    ctx.write("phase_derivative.csv", deriv.str());
    ctx.write("phases.json", json{{"curves", summary}}.dump(2) + "\n");
    return 0;
}

int cmd_splitting(const Context& ctx) {
    std::vector<TwoAtomModel> models;
    for (double om : ctx.cfg.couplings_mhz())
        models.push_back(two_atom_model(ctx.cfg, om));
    const auto rows = splitting_curve(models, ctx.threads);
    CsvWriter csv({"omega_c_mhz", "e_neg_mhz", "e_pos_mhz", "splitting_mhz", "resolved"});
    for (const auto& r : rows) {
        csv.field(mhz(r.omega_c));
        r.e_neg ? csv.field(mhz(*r.e_neg)) : csv.empty();
        r.e_pos ? csv.field(mhz(*r.e_pos)) : csv.empty();
        r.splitting ? csv.field(mhz(*r.splitting)) : csv.empty();
        csv.field(static_cast<long long>(r.splitting.has_value()));
        csv.end_row();
    }
    ctx.write("splitting.csv", csv.str());
    const auto line = fit_splitting_line(rows);
    const auto resolved = std::count_if(rows.begin(), rows.end(), [](const SplittingRow& r) { return r.splitting.has_value(); });
    json summary{{"resolved", resolved}, {"total", rows.size()}};
    if (line) {
        summary["slope"] = line->slope;
        summary["intercept_mhz"] = mhz(line->intercept);
        summary["max_residual_fraction"] = line->max_residual_fraction;
    }
    ctx.write("splitting.json", summary.dump(2) + "\n");
    return 0;
}

std::string map_csv(const CorrMap& map) {
    CsvWriter csv({"dx", "dy", "value", "error", "n_shots", "n_sites"});
    for (std::size_t i = 0; i < map.offsets.size(); ++i) {
        csv.field(static_cast<long long>(map.offsets[i].dx)).field(static_cast<long long>(map.offsets[i].dy));
        if (const auto& c = map.cells[i]) {
            csv.field(c->value).field(c->error);
            csv.field(static_cast<long long>(c->n_shots)).field(static_cast<long long>(c->n_sites));
        } else {
            csv.empty().empty().empty().empty();
        }
        csv.end_row();
    }
    return csv.str();
}

json corr_json(const CorrResult& c) {
    return {{"value", c.value}, {"error", c.error}, {"n_shots", c.n_shots}, {"n_sites", c.n_sites}};
}

int cmd_correlate(const Context& ctx, const std::string& images) {
    if (images.empty())
        throw ConfigError("correlate needs --images PATH");
    ImageSet set = image_set_from_json(read_file(images));
    if (ctx.cfg.roi) {
        set.roi = *ctx.cfg.roi;
        set.validate();
    }
    const Offset r0 = ctx.cfg.r0;
    const CorrMap m2 = g2_map(set, ctx.cfg.window, ctx.threads);
    const CorrMap m3 = g3_map(set, r0, ctx.cfg.window, ctx.threads);
    ctx.write("g2_map.csv", map_csv(m2));
    ctx.write("g3_map.csv", map_csv(m3));
    json summary{{"roi", {set.roi.x0, set.roi.y0, set.roi.x1, set.roi.y1}},
                 {"r0", {r0.dx, r0.dy}},
                 {"n_shots", set.images.size()},
                 {"g2_r0", corr_json(g2(set, r0))},
                 {"g3_r0_minus_r0", corr_json(g3(set, r0, -r0))}};
    if (const auto a = m2.argmax())
        summary["g2_argmax"] = {a->dx, a->dy};
    if (const auto a = m3.argmax())
        summary["g3_argmax"] = {a->dx, a->dy};
    ctx.write("correlate.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_sample(const Context& ctx) {
    const SampleResult s = generate_images(ctx.cfg.sampler, ctx.threads);
    ctx.write("images.json", image_set_to_json(s.images));
    json summary{{"seed", ctx.cfg.sampler.seed},
                 {"n_shots", ctx.cfg.sampler.n_shots},
                 {"pair_events", s.pair_events},
                 {"triple_events", s.triple_events}};
    ctx.write("sample.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_fit_ratio(const Context& ctx) {
    const RatioFit f = fit_ratio(ctx.cfg.target_g2, ctx.cfg.target_g3, ctx.cfg.sampler, ctx.cfg.fit, ctx.threads);
    json report{{"target_g2", ctx.cfg.target_g2},
                {"target_g3", ctx.cfg.target_g3},
                {"p2", f.p2},
                {"p3", f.p3},
                {"ratio", f.ratio ? json(*f.ratio) : json(nullptr)},
                {"ratio_label", f.ratio_label()},
                {"g2", f.g2},
                {"g3", f.g3},
                {"pair_events", f.pair_events},
                {"triple_events", f.triple_events},
                {"residual", f.residual},
                {"converged", f.converged}};
    ctx.write("fit_ratio.json", report.dump(2) + "\n");
    if (!f.converged) {
        std::cerr << "dimeron: fit did not reach tolerance " << ctx.cfg.fit.tolerance << " (residual "
                  << f.residual << ")\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dressed macrodimer spectra and lattice loss correlations"};
    app.require_subcommand(1);
    app.footer("Config keys (section.key = value):\n" + config_reference() +
               "Exit codes: 0 success, 1 configuration error, 2 numerical non-convergence.");
    Options opt;
    app.add_option("--config", opt.config, "configuration file");
    app.add_option("--out", opt.out, "output directory")->capture_default_str();
    app.add_option("--threads", opt.threads, "worker threads (default: DIMERON_LAB_THREADS or hardware)");
    app.add_option("--seed", opt.seed, "override sampler.seed");
    app.add_flag("--verbose", opt.verbose, "progress messages on stderr");

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"spectrum2", "two-atom probe spectra"},
        {"spectrum3", "three-atom probe spectrum and state classification"},
        {"phases", "two-atom scattering phases"},
        {"splitting", "macrodimeron splitting over the coupling list"},
        {"correlate", "G2/G3 maps of an image set"},
        {"sample", "synthetic loss images"},
        {"fit-ratio", "fit pair/triple loss probabilities to target correlators"},
    };
    std::map<std::string, CLI::App*> commands;
    for (const auto& s : subs)
        commands[s.name] = app.add_subcommand(s.name, s.help);
    commands["correlate"]->add_option("--images", opt.images, "image set JSON file")->required();
    commands["fit-ratio"]->add_option("--target-g2", opt.target_g2, "override fit.target_g2");
    commands["fit-ratio"]->add_option("--target-g3", opt.target_g3, "override fit.target_g3");
    for (auto& [name, sub] : commands)
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        Context ctx;
        ctx.cfg = opt.config.empty() ? RunConfig{} : load_config(opt.config);
        if (opt.seed)
            ctx.cfg.sampler.seed = *opt.seed;
        if (opt.target_g2)
            ctx.cfg.target_g2 = *opt.target_g2;
        if (opt.target_g3)
            ctx.cfg.target_g3 = *opt.target_g3;
        ctx.out = opt.out;
        ctx.threads = opt.threads > 0 ? opt.threads : default_thread_count();
        ctx.verbose = opt.verbose;
        fs::create_directories(ctx.out);

        std::string which;
        for (auto& [name, sub] : commands)
            if (sub->parsed())
                which = name;
        if (which == "spectrum2")
            return cmd_spectrum2(ctx);
        if (which == "spectrum3")
            return cmd_spectrum3(ctx);
        if (which == "phases")
            return cmd_phases(ctx);
        if (which == "splitting")
            return cmd_splitting(ctx);
        if (which == "correlate")
            return cmd_correlate(ctx, opt.images);
        if (which == "sample")
            return cmd_sample(ctx);
        if (which == "fit-ratio")
            return cmd_fit_ratio(ctx);
        throw ConfigError("unknown command");
    } catch (const NonConvergence& e) {
        std::cerr << "dimeron: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "dimeron: " << e.what() << "\n";
        return 1;
    }
}
