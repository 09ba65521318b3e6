#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dimeron {

struct Offset {
    int dx = 0;
    int dy = 0;

    Offset operator-() const { return {-dx, -dy}; }
    bool operator==(const Offset&) const = default;
};

/// Half-open site window [x0, x1) × [y0, y1).
struct Roi {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    bool operator==(const Roi&) const = default;
};

/// Binary occupancy image, row-major, 1 = atom present.
struct LatticeImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> occupancy;

    LatticeImage() = default;
    LatticeImage(int w, int h, std::uint8_t fill = 1);

    std::uint8_t at(int x, int y) const { return occupancy[static_cast<std::size_t>(y * width + x)]; }
    void set(int x, int y, std::uint8_t v) { occupancy[static_cast<std::size_t>(y * width + x)] = v; }
    /// Hole indicator h = 1 − occupancy.
    int hole(int x, int y) const { return 1 - at(x, y); }
};

struct ImageSet {
    int width = 0;
    int height = 0;
    Roi roi;
    std::vector<LatticeImage> images;

    /// Throws ConfigError on empty sets, mismatched sizes, non-binary values
    /// or an ROI outside the image.
    void validate() const;
};

/// Centred 15×15 window if it fits, else 11×11, else the full image.
Roi default_roi(int width, int height);

struct CorrResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t n_shots = 0;
    std::size_t n_sites = 0;   // number of valid R′ averaged
};

/// Connected hole–hole correlator at offset dR, averaged over all R′ with
/// R′ and R′+dR inside the ROI. Per-site shot means; delete-1 jackknife error.
CorrResult g2(const ImageSet& set, Offset dR);

/// Connected three-point correlator of holes at R′, R′+R0, R′+dR.
CorrResult g3(const ImageSet& set, Offset R0, Offset dR);

struct CorrMap {
    int window = 0;
    /// Row-major over dy then dx in [−window, window]; excluded or
    /// unevaluable offsets are empty.
    std::vector<Offset> offsets;
    std::vector<std::optional<CorrResult>> cells;

    std::optional<CorrResult> at(Offset d) const;
    /// Offset of the largest present value.
    std::optional<Offset> argmax() const;
};

CorrMap g2_map(const ImageSet& set, int window, std::size_t threads = 1);
/// Offsets dR = 0 and dR = R0 are excluded.
CorrMap g3_map(const ImageSet& set, Offset R0, int window, std::size_t threads = 1);

/// Delete-1 jackknife standard error from the leave-one-out estimates:
/// sqrt((n−1)/n · Σ (θ_i − θ̄)²). Needs at least two estimates.
double jackknife_error(std::span<const double> leave_one_out);

}  // namespace dimeron
