#pragma once

#include "dimeron/correlations.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dimeron {

struct SampleConfig {
    int width = 15;
    int height = 15;
    std::size_t n_shots = 1000;
    double filling = 0.90;
    double p2 = 0.0;     // per eligible occupied pair
    double p3 = 0.0;     // per eligible occupied collinear triple
    double p_bg = 0.0;   // per remaining occupied site
    std::vector<Offset> directions{{-1, 1}};
    std::uint64_t seed = 1;

    void validate() const;
};

struct SampleResult {
    ImageSet images;
    std::uint64_t pair_events = 0;
    std::uint64_t triple_events = 0;
};

/// Per shot: fill i.i.d., then triples {s, s+d, s+2d}, then pairs {s, s+d}
/// for every direction in raster order (rows top to bottom, sites left to
/// right), then uncorrelated losses. One uniform is drawn per visited site in
/// every pass whether or not it is eligible, so the random stream does not
/// depend on the probabilities. Each shot has its own generator seeded from
/// (seed, shot index).
SampleResult generate_images(const SampleConfig& cfg, std::size_t threads = 1);

struct RatioFit {
    double p2 = 0.0;
    double p3 = 0.0;
    std::optional<double> ratio;   // empty when three-atom events are absent ("large")
    double g2 = 0.0;               // achieved G2(R0)
    double g3 = 0.0;               // achieved G3_R0(−R0)
    double residual = 0.0;
    bool converged = false;
    std::uint64_t pair_events = 0;
    std::uint64_t triple_events = 0;

    /// "n:1" with n rounded to one decimal (integers printed bare), or "large".
    std::string ratio_label() const;
};

struct FitOptions {
    double tolerance = 0.1;        // on the normalized residual
    std::size_t shots = 4000;      // per evaluation
    int max_rounds = 8;
    int bisection_steps = 20;
    /// Residual scale floor for targets close to zero.
    double scale_floor = 1e-3;
};

/// Coordinate descent on p2 (matching G2(R0)) then p3 (matching G3_R0(−R0)),
/// with R0 the first sampler direction and a fixed seed per evaluation.
/// Throws nothing on failure; the result is flagged as not converged.
RatioFit fit_ratio(double target_g2, double target_g3, const SampleConfig& templ, const FitOptions& opts = {},
                   std::size_t threads = 1);

/// G3_R0(−R0) for a pair-only configuration (p3 = 0); with p2 > 0 it is expected to be
/// negative because each lost pair leaves one fewer neighbour for another.
CorrResult pair_only_g3_background(const SampleConfig& cfg, std::size_t threads = 1);

}  // namespace dimeron
