#include "dimeron/correlations.hpp"

#include "dimeron/errors.hpp"
#include "dimeron/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dimeron {

LatticeImage::LatticeImage(int w, int h, std::uint8_t fill)
    : width(w), height(h), occupancy(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

void ImageSet::validate() const {
    if (width < 1 || height < 1)
        throw ConfigError("image set: dimensions must be at least 1x1");
    if (images.empty())
        throw ConfigError("image set: no shots");
    for (std::size_t s = 0; s < images.size(); ++s) {
        const auto& im = images[s];
        if (im.width != width || im.height != height ||
            im.occupancy.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
            throw ConfigError("image set: shot " + std::to_string(s) + " has mismatched dimensions");
        for (auto v : im.occupancy)
            if (v > 1)
                throw ConfigError("image set: shot " + std::to_string(s) + " has a non-binary occupancy");
    }
    if (roi.x0 < 0 || roi.y0 < 0 || roi.x1 > width || roi.y1 > height || roi.x0 >= roi.x1 || roi.y0 >= roi.y1)
        throw ConfigError("image set: ROI is empty or outside the image");
}

Roi default_roi(int width, int height) {
    for (int size : {15, 11}) {
        if (width >= size && height >= size) {
            const int x0 = (width - size) / 2;
            const int y0 = (height - size) / 2;
            return {x0, y0, x0 + size, y0 + size};
        }
    }
    return {0, 0, width, height};
}

double jackknife_error(std::span<const double> loo) {
    if (loo.size() < 2)
        throw DomainError("jackknife needs at least two shots");
    const double n = static_cast<double>(loo.size());
    double mean = 0.0;
    for (double v : loo)
        mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : loo)
        ss += (v - mean) * (v - mean);
    return std::sqrt((n - 1.0) / n * ss);
}

namespace {

using Int = __int128;

// Hole indicators of a fixed list of sites, stored shot-major.
struct HoleTable {
    std::size_t n_shots = 0;
    std::size_t n_sites = 0;
    std::vector<std::uint8_t> h;    // [shot * n_sites + site]
    std::vector<std::int64_t> sum;  // per-site hole counts over shots

    std::uint8_t at(std::size_t shot, std::size_t site) const { return h[shot * n_sites + site]; }
};

HoleTable hole_table(const ImageSet& set) {
    HoleTable t;
    t.n_shots = set.images.size();
    t.n_sites = static_cast<std::size_t>(set.width) * static_cast<std::size_t>(set.height);
    t.h.resize(t.n_shots * t.n_sites);
    t.sum.assign(t.n_sites, 0);
    for (std::size_t s = 0; s < t.n_shots; ++s)
        for (std::size_t i = 0; i < t.n_sites; ++i) {
            const std::uint8_t hole = 1 - set.images[s].occupancy[i];
            t.h[s * t.n_sites + i] = hole;
            t.sum[i] += hole;
        }
    return t;
}

// Site indices of each valid R′ for the given leg offsets (first leg is R′).
std::vector<std::vector<std::size_t>> valid_tuples(const ImageSet& set, std::span<const Offset> legs) {
    std::vector<std::vector<std::size_t>> out;
    for (int y = set.roi.y0; y < set.roi.y1; ++y)
        for (int x = set.roi.x0; x < set.roi.x1; ++x) {
            std::vector<std::size_t> sites;
            bool ok = true;
            for (const Offset& d : legs) {
                const int xx = x + d.dx;
                const int yy = y + d.dy;
                if (!set.roi.contains(xx, yy)) {
                    ok = false;
                    break;
                }
                sites.push_back(static_cast<std::size_t>(yy * set.width + xx));
            }
            if (ok)
                out.push_back(std::move(sites));
        }
    return out;
}

// n·S_ab − S_a S_b: n² times the per-pair connected correlator.
Int pair_numerator(Int n, Int sa, Int sb, Int sab) { return n * sab - sa * sb; }

// n³ times the per-triple centred third moment.
Int triple_numerator(Int n, Int sa, Int sb, Int sc, Int sab, Int sac, Int sbc, Int sabc) {
    return n * n * sabc - n * (sa * sbc + sb * sac + sc * sab) + 2 * sa * sb * sc;
}

double ratio(Int num, Int den) {
    // Both fit comfortably in a double's exact integer range for realistic inputs.
    return static_cast<double>(num) / static_cast<double>(den);
}

CorrResult pair_estimate(const ImageSet& set, Offset dR) {
    const Offset legs[2] = {{0, 0}, dR};
    const auto tuples = valid_tuples(set, legs);
    if (tuples.empty())
        throw DomainError("g2: no valid R' with both sites inside the ROI");
    const HoleTable t = hole_table(set);
    const std::size_t n = t.n_shots;
    const std::size_t P = tuples.size();

    std::vector<std::int64_t> sab(P, 0);
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t s = 0; s < n; ++s)
            sab[p] += t.at(s, tuples[p][0]) & t.at(s, tuples[p][1]);

    CorrResult r;
    r.n_shots = n;
    r.n_sites = P;
    Int num = 0;
    for (std::size_t p = 0; p < P; ++p)
        num += pair_numerator(static_cast<Int>(n), t.sum[tuples[p][0]], t.sum[tuples[p][1]], sab[p]);
    r.value = ratio(num, static_cast<Int>(n) * static_cast<Int>(n) * static_cast<Int>(P));
    if (n < 2)
        return r;

    std::vector<double> loo(n);
    const Int m = static_cast<Int>(n - 1);
    for (std::size_t s = 0; s < n; ++s) {
        Int nn = 0;
        for (std::size_t p = 0; p < P; ++p) {
            const int ha = t.at(s, tuples[p][0]);
            const int hb = t.at(s, tuples[p][1]);
            nn += pair_numerator(m, t.sum[tuples[p][0]] - ha, t.sum[tuples[p][1]] - hb, sab[p] - (ha & hb));
        }
        loo[s] = ratio(nn, m * m * static_cast<Int>(P));
    }
    r.error = jackknife_error(loo);
    return r;
}

CorrResult triple_estimate(const ImageSet& set, Offset R0, Offset dR) {
    const Offset legs[3] = {{0, 0}, R0, dR};
    const auto tuples = valid_tuples(set, legs);
    if (tuples.empty())
        throw DomainError("g3: no valid R' with all three sites inside the ROI");
    const HoleTable t = hole_table(set);
    const std::size_t n = t.n_shots;
    const std::size_t P = tuples.size();

    struct Sums {
        std::int64_t ab = 0, ac = 0, bc = 0, abc = 0;
    };
    std::vector<Sums> sums(P);
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t s = 0; s < n; ++s) {
            const int a = t.at(s, tuples[p][0]);
            const int b = t.at(s, tuples[p][1]);
            const int c = t.at(s, tuples[p][2]);
            sums[p].ab += a & b;
            sums[p].ac += a & c;
            sums[p].bc += b & c;
            sums[p].abc += a & b & c;
        }

    auto total = [&](Int nn, std::size_t skip_shot, bool skip) {
        Int num = 0;
        for (std::size_t p = 0; p < P; ++p) {
            int a = 0, b = 0, c = 0;
            if (skip) {
                a = t.at(skip_shot, tuples[p][0]);
                b = t.at(skip_shot, tuples[p][1]);
                c = t.at(skip_shot, tuples[p][2]);
            }
            num += triple_numerator(nn, t.sum[tuples[p][0]] - a, t.sum[tuples[p][1]] - b, t.sum[tuples[p][2]] - c,
                                    sums[p].ab - (a & b), sums[p].ac - (a & c), sums[p].bc - (b & c),
                                    sums[p].abc - (a & b & c));
        }
        return num;
    };

    CorrResult r;
    r.n_shots = n;
    r.n_sites = P;
    const Int N = static_cast<Int>(n);
    r.value = ratio(total(N, 0, false), N * N * N * static_cast<Int>(P));
    if (n < 2)
        return r;
    std::vector<double> loo(n);
    const Int m = N - 1;
    for (std::size_t s = 0; s < n; ++s)
        loo[s] = ratio(total(m, s, true), m * m * m * static_cast<Int>(P));
    r.error = jackknife_error(loo);
    return r;
}

}  // namespace

CorrResult g2(const ImageSet& set, Offset dR) {
    set.validate();
    if (dR == Offset{0, 0})
        throw DomainError("g2: offset dR must be nonzero");
    return pair_estimate(set, dR);
}

CorrResult g3(const ImageSet& set, Offset R0, Offset dR) {
    set.validate();
    if (R0 == Offset{0, 0} || dR == Offset{0, 0} || R0 == dR)
        throw DomainError("g3: offsets 0, R0 and dR must be pairwise distinct");
    return triple_estimate(set, R0, dR);
}

std::optional<CorrResult> CorrMap::at(Offset d) const {
    for (std::size_t i = 0; i < offsets.size(); ++i)
        if (offsets[i] == d)
            return cells[i];
    return std::nullopt;
}

std::optional<Offset> CorrMap::argmax() const {
    std::optional<Offset> best;
    double v = 0.0;
    for (std::size_t i = 0; i < offsets.size(); ++i)
        if (cells[i] && (!best || cells[i]->value > v)) {
            best = offsets[i];
            v = cells[i]->value;
        }
    return best;
}

namespace {

template <class F>
CorrMap build_map(int window, F&& cell, std::size_t threads) {
    CorrMap map;
    map.window = window;
    for (int dy = -window; dy <= window; ++dy)
        for (int dx = -window; dx <= window; ++dx)
            map.offsets.push_back({dx, dy});
    map.cells = parallel_map(
        map.offsets.size(),
        [&](std::size_t i) -> std::optional<CorrResult> {
            try {
                return cell(map.offsets[i]);
            } catch (const DomainError&) {
                return std::nullopt;
            }
        },
        threads);
    return map;
}

}  // namespace

CorrMap g2_map(const ImageSet& set, int window, std::size_t threads) {
    set.validate();
    if (window < 0)
        return {};
    return build_map(window, [&](Offset d) { return g2(set, d); }, threads);
}

CorrMap g3_map(const ImageSet& set, Offset R0, int window, std::size_t threads) {
    set.validate();
    if (R0 == Offset{0, 0})
        throw DomainError("g3_map: R0 must be nonzero");
    if (window < 0)
        return {};
    return build_map(window, [&](Offset d) { return g3(set, R0, d); }, threads);
}

}  // namespace dimeron
