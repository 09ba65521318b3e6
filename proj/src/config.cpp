#include "dimeron/config.hpp"

#include "dimeron/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace dimeron {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    return out;
}

double to_double(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError("expected a number, got '" + s + "'");
    return v;
}

template <class T>
T to_integer(const std::string& s) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("expected an integer, got '" + s + "'");
    return v;
}

std::vector<double> to_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split_list(s))
        out.push_back(to_double(item));
    if (out.empty())
        throw ConfigError("expected a comma-separated list of numbers");
    return out;
}

std::vector<int> to_ints(const std::string& s, std::size_t expected) {
    std::vector<int> out;
    for (const auto& item : split_list(s))
        out.push_back(to_integer<int>(item));
    if (expected != 0 && out.size() != expected)
        throw ConfigError("expected " + std::to_string(expected) + " comma-separated integers, got '" + s + "'");
    return out;
}

Offset to_offset(const std::string& s) {
    const auto v = to_ints(s, 2);
    return {v[0], v[1]};
}

std::vector<Offset> to_offsets(const std::string& s) {
    // "dx,dy; dx,dy; ..."
    std::vector<Offset> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';'))
        out.push_back(to_offset(trim(item)));
    return out;
}

struct Key {
    std::string doc;
    std::function<void(RunConfig&, const std::string&)> set;
};

const std::map<std::string, Key>& keys() {
    static const std::map<std::string, Key> table = [] {
        std::map<std::string, Key> k;
        k["physics.r_v_nm"] = {"macrodimer bond length R_v in nm (712)",
                               [](RunConfig& c, const std::string& v) { c.r_v_nm = to_double(v); }};
        k["physics.omega_v_mhz"] = {"vibrational spacing omega_v/2pi in MHz (3.8)",
                                    [](RunConfig& c, const std::string& v) { c.omega_v_mhz = to_double(v); }};
        k["physics.omega_lat_mhz"] = {"lattice trap frequency omega_lat/2pi in MHz (0.128)",
                                      [](RunConfig& c, const std::string& v) { c.omega_lat_mhz = to_double(v); }};
        k["physics.a_lat_nm"] = {"lattice constant in nm (532)",
                                 [](RunConfig& c, const std::string& v) { c.a_lat_nm = to_double(v); }};
        k["physics.alpha"] = {"Omega_C = alpha * Omega_ge scale (1.04)",
                              [](RunConfig& c, const std::string& v) { c.alpha = to_double(v); }};
        k["physics.n_modes"] = {"vibrational modes kept, 1..6 (1)",
                                [](RunConfig& c, const std::string& v) { c.n_modes = to_integer<int>(v); }};
        k["model.omega_c_mhz"] = {"coupling Omega_C/2pi in MHz, comma-separated list (6.2)",
                                  [](RunConfig& c, const std::string& v) { c.omega_c_mhz = to_doubles(v); }};
        k["model.omega_ge_mhz"] = {"alternative to omega_c_mhz: Omega_ge/2pi list, scaled by alpha (unset)",
                                   [](RunConfig& c, const std::string& v) { c.omega_ge_mhz = to_doubles(v); }};
        k["model.delta_c_mhz"] = {"macrodimer detuning Delta_C/2pi in MHz (0)",
                                  [](RunConfig& c, const std::string& v) { c.delta_c_mhz = to_double(v); }};
        k["model.scan"] = {"sideband | common (sideband)", [](RunConfig& c, const std::string& v) {
                               if (v == "sideband")
                                   c.scan = ScanMode::Sideband;
                               else if (v == "common")
                                   c.scan = ScanMode::Common;
                               else
                                   throw ConfigError("scan must be 'sideband' or 'common'");
                           }};
        k["model.loss"] = {"lost_atoms | rydberg_only (lost_atoms)", [](RunConfig& c, const std::string& v) {
                               if (v == "lost_atoms")
                                   c.loss = LossModel::LostAtoms;
                               else if (v == "rydberg_only")
                                   c.loss = LossModel::RydbergOnly;
                               else
                                   throw ConfigError("loss must be 'lost_atoms' or 'rydberg_only'");
                           }};
        k["model.n_k"] = {"two-atom standing waves per parity (400)",
                          [](RunConfig& c, const std::string& v) { c.n_k = to_integer<std::size_t>(v); }};
        k["model.kappa_max"] = {"two-atom momentum cutoff in 1/nm (1.2)",
                                [](RunConfig& c, const std::string& v) { c.kappa_max = to_double(v); }};
        k["model.n3"] = {"three-atom momenta per link, odd (49)",
                         [](RunConfig& c, const std::string& v) { c.n3 = to_integer<std::size_t>(v); }};
        k["model.k3_max"] = {"three-atom momentum cutoff in 1/nm (0.6)",
                             [](RunConfig& c, const std::string& v) { c.k3_max = to_double(v); }};
        k["model.ground_center_nm"] = {"ground-state relative centre in nm (sqrt(2)*a_lat)",
                                       [](RunConfig& c, const std::string& v) { c.ground_center_nm = to_double(v); }};
        k["model.basis_cap"] = {"largest three-atom basis accepted (25000)",
                                [](RunConfig& c, const std::string& v) { c.basis_cap = to_integer<std::size_t>(v); }};
        k["spectrum.min_mhz"] = {"axis start in MHz (-8)",
                                 [](RunConfig& c, const std::string& v) { c.min_mhz = to_double(v); }};
        k["spectrum.max_mhz"] = {"axis end in MHz (8)",
                                 [](RunConfig& c, const std::string& v) { c.max_mhz = to_double(v); }};
        k["spectrum.step_mhz"] = {"axis step in MHz (0.01)",
                                  [](RunConfig& c, const std::string& v) { c.step_mhz = to_double(v); }};
        k["spectrum.broadening_mhz"] = {"Gaussian kernel standard deviation in MHz (0.15)",
                                        [](RunConfig& c, const std::string& v) { c.broadening_mhz = to_double(v); }};
        k["phases.channels"] = {"even | odd | both (both)", [](RunConfig& c, const std::string& v) {
                                    if (v == "even")
                                        c.phase_channels = PhaseChannels::Even;
                                    else if (v == "odd")
                                        c.phase_channels = PhaseChannels::Odd;
                                    else if (v == "both")
                                        c.phase_channels = PhaseChannels::Both;
                                    else
                                        throw ConfigError("phases.channels must be even, odd or both");
                                }};
        k["correlation.roi"] = {"x0,y0,x1,y1 half-open site window (image file ROI)",
                                [](RunConfig& c, const std::string& v) {
                                    const auto r = to_ints(v, 4);
                                    c.roi = Roi{r[0], r[1], r[2], r[3]};
                                }};
        k["correlation.r0"] = {"reference offset R0 as dx,dy (-1,1)",
                               [](RunConfig& c, const std::string& v) { c.r0 = to_offset(v); }};
        k["correlation.window"] = {"map half-width in sites (4)",
                                   [](RunConfig& c, const std::string& v) { c.window = to_integer<int>(v); }};
        k["sampler.width"] = {"image width in sites (15)",
                              [](RunConfig& c, const std::string& v) { c.sampler.width = to_integer<int>(v); }};
        k["sampler.height"] = {"image height in sites (15)",
                               [](RunConfig& c, const std::string& v) { c.sampler.height = to_integer<int>(v); }};
        k["sampler.n_shots"] = {"number of shots (1000)", [](RunConfig& c, const std::string& v) {
                                    c.sampler.n_shots = to_integer<std::size_t>(v);
                                }};
        k["sampler.filling"] = {"initial filling probability (0.9)",
                                [](RunConfig& c, const std::string& v) { c.sampler.filling = to_double(v); }};
        k["sampler.p2"] = {"pair loss probability (0)",
                           [](RunConfig& c, const std::string& v) { c.sampler.p2 = to_double(v); }};
        k["sampler.p3"] = {"triple loss probability (0)",
                           [](RunConfig& c, const std::string& v) { c.sampler.p3 = to_double(v); }};
        k["sampler.p_bg"] = {"uncorrelated loss probability (0)",
                             [](RunConfig& c, const std::string& v) { c.sampler.p_bg = to_double(v); }};
        k["sampler.directions"] = {"loss directions 'dx,dy; dx,dy' (-1,1)",
                                   [](RunConfig& c, const std::string& v) { c.sampler.directions = to_offsets(v); }};
        k["sampler.seed"] = {"64-bit seed (1)", [](RunConfig& c, const std::string& v) {
                                 c.sampler.seed = to_integer<std::uint64_t>(v);
                             }};
        k["fit.target_g2"] = {"target G2(R0) (0.024)",
                              [](RunConfig& c, const std::string& v) { c.target_g2 = to_double(v); }};
        k["fit.target_g3"] = {"target G3_R0(-R0) (0.0048)",
                              [](RunConfig& c, const std::string& v) { c.target_g3 = to_double(v); }};
        k["fit.tolerance"] = {"accepted normalized residual (0.1)",
                              [](RunConfig& c, const std::string& v) { c.fit.tolerance = to_double(v); }};
        k["fit.shots"] = {"shots per fit evaluation (4000)",
                          [](RunConfig& c, const std::string& v) { c.fit.shots = to_integer<std::size_t>(v); }};
        k["fit.max_rounds"] = {"coordinate-descent rounds (8)",
                               [](RunConfig& c, const std::string& v) { c.fit.max_rounds = to_integer<int>(v); }};
        return k;
    }();
    return table;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const std::string body = trim(line);
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        const std::string where = "config line " + std::to_string(lineno) + ": ";
        if (eq == std::string::npos)
            throw ConfigError(where + "expected 'section.key = value'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        const auto it = keys().find(key);
        if (it == keys().end())
            throw ConfigError(where + "unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw ConfigError(where + "duplicate key '" + key + "'");
        try {
            it->second.set(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + key + ": " + e.what());
        }
    }
    if (seen.count("model.omega_c_mhz") && seen.count("model.omega_ge_mhz"))
        throw ConfigError("set only one of model.omega_c_mhz and model.omega_ge_mhz");
    if (seen.count("model.omega_ge_mhz"))
        cfg.omega_c_mhz.clear();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_reference() {
    std::ostringstream out;
    for (const auto& [name, key] : keys())
        out << "  " << name << "  " << key.doc << "\n";
    return out.str();
}

std::vector<double> RunConfig::couplings_mhz() const {
    if (!omega_ge_mhz.empty()) {
        std::vector<double> out;
        for (double v : omega_ge_mhz)
            out.push_back(alpha * v);
        return out;
    }
    return omega_c_mhz;
}

SpectrumAxis RunConfig::axis() const {
    SpectrumAxis a{mhz_to_angular(min_mhz), mhz_to_angular(max_mhz), mhz_to_angular(step_mhz)};
    a.size();
    return a;
}

namespace {

PotentialModel potential_from(const RunConfig& cfg) {
    PotentialModel p;
    p.bond_length = cfg.r_v_nm;
    p.omega_v = mhz_to_angular(cfg.omega_v_mhz);
    p.n_modes = cfg.n_modes;
    p.validate();
    return p;
}

LatticeParams lattice_from(const RunConfig& cfg) {
    LatticeParams l;
    l.a_lat = cfg.a_lat_nm;
    l.omega_lat = mhz_to_angular(cfg.omega_lat_mhz);
    l.validate();
    return l;
}

}  // namespace

TwoAtomModel two_atom_model(const RunConfig& cfg, double omega_c_mhz) {
    TwoAtomModel m;
    m.omega_c = mhz_to_angular(omega_c_mhz);
    m.delta_c = mhz_to_angular(cfg.delta_c_mhz);
    m.potential = potential_from(cfg);
    m.grid = ContinuumGrid(cfg.n_k, cfg.kappa_max);
    m.ground = lattice_relative_ground_state(lattice_from(cfg));
    if (cfg.ground_center_nm)
        m.ground.center = *cfg.ground_center_nm;
    m.scan = cfg.scan;
    m.loss = cfg.loss;
    m.validate(cfg.broadening());
    return m;
}

ThreeAtomModel three_atom_model(const RunConfig& cfg, double omega_c_mhz) {
    ThreeAtomModel m;
    m.omega_c = mhz_to_angular(omega_c_mhz);
    m.delta_c = mhz_to_angular(cfg.delta_c_mhz);
    m.potential = potential_from(cfg);
    m.grid.n3 = cfg.n3;
    m.grid.k_max = cfg.k3_max;
    m.lattice = lattice_from(cfg);
    m.ground_center = cfg.ground_center_nm;
    m.scan = cfg.scan;
    m.loss = cfg.loss;
    m.basis_cap = cfg.basis_cap;
    m.validate();
    return m;
}

}  // namespace dimeron
