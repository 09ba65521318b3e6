#include "dimeron/sampler.hpp"

#include "dimeron/errors.hpp"
#include "dimeron/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace dimeron {

void SampleConfig::validate() const {
    if (width < 1 || height < 1)
        throw ConfigError("sampler: width and height must be at least 1");
    if (n_shots < 1)
        throw ConfigError("sampler: n_shots must be at least 1");
    for (auto [name, p] : {std::pair{"filling", filling}, std::pair{"p2", p2}, std::pair{"p3", p3},
                           std::pair{"p_bg", p_bg}})
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError(std::string("sampler: ") + name + " must lie in [0, 1]");
    if (directions.empty())
        throw ConfigError("sampler: directions must be nonempty");
    for (const Offset& d : directions)
        if ((d.dx == 0 && d.dy == 0) || std::abs(d.dx) > 1 || std::abs(d.dy) > 1)
            throw ConfigError("sampler: directions must be nonzero unit lattice offsets");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in [0, 1) from the top 53 bits; identical on every platform.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Shot {
    LatticeImage image;
    std::uint64_t pairs = 0;
    std::uint64_t triples = 0;
};

Shot sample_shot(const SampleConfig& cfg, std::size_t index) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(index))));
    Shot shot;
    LatticeImage& im = shot.image;
    im = LatticeImage(cfg.width, cfg.height, 0);
    for (int y = 0; y < cfg.height; ++y)
        for (int x = 0; x < cfg.width; ++x)
            im.set(x, y, uniform(rng) < cfg.filling ? 1 : 0);

    auto inside = [&](int x, int y) { return x >= 0 && x < cfg.width && y >= 0 && y < cfg.height; };
    for (int len : {3, 2}) {
        const double p = len == 3 ? cfg.p3 : cfg.p2;
        for (const Offset& d : cfg.directions)
            for (int y = 0; y < cfg.height; ++y)
                for (int x = 0; x < cfg.width; ++x) {
                    const double u = uniform(rng);
                    bool eligible = true;
                    for (int k = 0; k < len && eligible; ++k) {
                        const int xx = x + k * d.dx;
                        const int yy = y + k * d.dy;
                        eligible = inside(xx, yy) && im.at(xx, yy) == 1;
                    }
                    if (!eligible || !(u < p))
                        continue;
                    for (int k = 0; k < len; ++k)
                        im.set(x + k * d.dx, y + k * d.dy, 0);
                    ++(len == 3 ? shot.triples : shot.pairs);
                }
    }
    for (int y = 0; y < cfg.height; ++y)
        for (int x = 0; x < cfg.width; ++x) {
            const double u = uniform(rng);
            if (im.at(x, y) == 1 && u < cfg.p_bg)
                im.set(x, y, 0);
        }
    return shot;
}

}  // namespace

SampleResult generate_images(const SampleConfig& cfg, std::size_t threads) {
    cfg.validate();
    auto shots = parallel_map(cfg.n_shots, [&](std::size_t i) { return sample_shot(cfg, i); }, threads);
    SampleResult out;
    out.images.width = cfg.width;
    out.images.height = cfg.height;
    out.images.roi = default_roi(cfg.width, cfg.height);
    out.images.images.reserve(shots.size());
    for (auto& s : shots) {
        out.pair_events += s.pairs;
        out.triple_events += s.triples;
        out.images.images.push_back(std::move(s.image));
    }
    return out;
}

std::string RatioFit::ratio_label() const {
    if (!ratio)
        return "large";
    char buf[64];
    const double r = *ratio;
    if (std::abs(r - std::round(r)) < 0.05)
        std::snprintf(buf, sizeof buf, "%.0f:1", std::round(r));
    else
        std::snprintf(buf, sizeof buf, "%.1f:1", r);
    return buf;
}

namespace {

struct Evaluation {
    double g2 = 0.0;
    double g3 = 0.0;
    std::uint64_t pairs = 0;
    std::uint64_t triples = 0;
};

Evaluation evaluate(const SampleConfig& templ, double p2, double p3, std::size_t shots, std::size_t threads) {
    SampleConfig cfg = templ;
    cfg.p2 = p2;
    cfg.p3 = p3;
    cfg.n_shots = shots;
    const SampleResult s = generate_images(cfg, threads);
    const Offset r0 = cfg.directions.front();
    return {g2(s.images, r0).value, g3(s.images, r0, -r0).value, s.pair_events, s.triple_events};
}

// Lowest crossing of response(p) = target on [0, 1]. The response rises with
// p at small p but falls again once most atoms are lost, so the root is first
// bracketed by doubling from a small step and then bisected. Returns the
// visited parameter whose response is closest to the target.
template <class F>
double solve_rising(F&& response, double target, int steps) {
    double best = 0.0;
    double best_err = std::abs(response(0.0) - target);
    auto visit = [&](double p) {
        const double r = response(p);
        if (std::abs(r - target) < best_err) {
            best_err = std::abs(r - target);
            best = p;
        }
        return r;
    };
    double lo = 0.0, hi = 1.0 / 256.0;
    while (visit(hi) < target) {
        if (hi >= 1.0)
            return best;
        lo = hi;
        hi = std::min(1.0, 2.0 * hi);
    }
    for (int i = 0; i < steps; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (visit(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return best;
}

}  // namespace

RatioFit fit_ratio(double target_g2, double target_g3, const SampleConfig& templ, const FitOptions& opts,
                   std::size_t threads) {
    templ.validate();
    if (!std::isfinite(target_g2) || !std::isfinite(target_g3))
        throw ConfigError("fit_ratio: targets must be finite");
    const bool no_triples = target_g3 <= 0.0;
    const double s2 = std::max(std::abs(target_g2), opts.scale_floor);
    const double s3 = std::max(std::abs(target_g3), opts.scale_floor);
    auto residual = [&](const Evaluation& e) {
        const double r2 = (e.g2 - target_g2) / s2;
        const double r3 = no_triples ? 0.0 : (e.g3 - target_g3) / s3;
        return std::sqrt(r2 * r2 + r3 * r3);
    };

    double p2 = 0.0, p3 = 0.0;
    for (int round = 0; round < opts.max_rounds; ++round) {
        const double old2 = p2, old3 = p3;
        p2 = solve_rising([&](double x) { return evaluate(templ, x, p3, opts.shots, threads).g2; }, target_g2,
                    opts.bisection_steps);
        if (!no_triples)
            p3 = solve_rising([&](double x) { return evaluate(templ, p2, x, opts.shots, threads).g3; }, target_g3,
                        opts.bisection_steps);
        if (std::abs(p2 - old2) < 1e-6 && std::abs(p3 - old3) < 1e-6)
            break;
    }

    const Evaluation e = evaluate(templ, p2, p3, opts.shots, threads);
    RatioFit fit;
    fit.p2 = p2;
    fit.p3 = p3;
    fit.g2 = e.g2;
    fit.g3 = e.g3;
    fit.pair_events = e.pairs;
    fit.triple_events = e.triples;
    fit.residual = residual(e);
    fit.converged = fit.residual <= opts.tolerance;
    if (!no_triples && e.triples > 0)
        fit.ratio = static_cast<double>(e.pairs) / static_cast<double>(e.triples);
    return fit;
}

CorrResult pair_only_g3_background(const SampleConfig& cfg, std::size_t threads) {
    if (cfg.p3 != 0.0)
        throw DomainError("pair-only background needs p3 = 0");
    const SampleResult s = generate_images(cfg, threads);
    const Offset r0 = cfg.directions.front();
    return g3(s.images, r0, -r0);
}

}  // namespace dimeron
