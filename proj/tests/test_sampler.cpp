#include "dimeron/errors.hpp"
#include "dimeron/sampler.hpp"

#include <doctest.h>

#include <cmath>

using namespace dimeron;

namespace {

double mean_occupancy(const ImageSet& s) {
    double occ = 0.0;
    for (const auto& im : s.images)
        for (auto v : im.occupancy)
            occ += v;
    return occ / static_cast<double>(s.images.size() * s.images.front().occupancy.size());
}

}  // namespace

TEST_CASE("config validation") {
    SampleConfig c;
    CHECK_NOTHROW(c.validate());
    c.p2 = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.directions.clear();
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.directions = {{2, 0}};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.n_shots = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("full filling without losses leaves every site occupied") {
    SampleConfig c;
    c.filling = 1.0;
    c.n_shots = 50;
    const SampleResult r = generate_images(c);
    CHECK(mean_occupancy(r.images) == 1.0);
    CHECK(r.pair_events == 0);
    CHECK(r.triple_events == 0);
    CHECK(r.images.roi == default_roi(15, 15));
}

TEST_CASE("mean filling") {
    SampleConfig c;
    c.n_shots = 10000;
    c.seed = 17;
    const SampleResult r = generate_images(c, 4);
    CHECK(std::abs(mean_occupancy(r.images) - 0.9) <= 0.003);
}

TEST_CASE("same seed gives identical images independent of thread count") {
    SampleConfig c;
    c.n_shots = 300;
    c.p2 = 0.03;
    c.p3 = 0.01;
    c.p_bg = 0.02;
    c.seed = 123;
    const SampleResult a = generate_images(c, 1);
    const SampleResult b = generate_images(c, 5);
    REQUIRE(a.images.images.size() == b.images.images.size());
    for (std::size_t i = 0; i < a.images.images.size(); ++i)
        CHECK(a.images.images[i].occupancy == b.images.images[i].occupancy);
    CHECK(a.pair_events == b.pair_events);
    CHECK(a.triple_events == b.triple_events);
    c.seed = 124;
    const SampleResult d = generate_images(c, 1);
    bool differ = false;
    for (std::size_t i = 0; i < a.images.images.size(); ++i)
        differ = differ || a.images.images[i].occupancy != d.images.images[i].occupancy;
    CHECK(differ);
}

TEST_CASE("the random stream does not depend on the loss probabilities") {
    SampleConfig c;
    c.n_shots = 100;
    c.filling = 0.8;
    const SampleResult a = generate_images(c);
    c.p_bg = 1e-300;  // never fires, still draws
    const SampleResult b = generate_images(c);
    for (std::size_t i = 0; i < a.images.images.size(); ++i)
        CHECK(a.images.images[i].occupancy == b.images.images[i].occupancy);
}

TEST_CASE("triples-only losses put g3 map peaks at -R0 and 2 R0") {
    SampleConfig c;
    c.width = c.height = 11;
    c.n_shots = 3000;
    c.p3 = 0.04;
    c.seed = 5;
    const SampleResult r = generate_images(c, 4);
    CHECK(r.pair_events == 0);
    CHECK(r.triple_events > 0);
    const Offset r0{-1, 1};
    const CorrMap m = g3_map(r.images, r0, 3, 4);
    const auto best = m.argmax();
    REQUIRE(best);
    CHECK((*best == Offset{1, -1} || *best == Offset{-2, 2}));
    const double top = m.at(*best)->value;
    const double other = *best == Offset{1, -1} ? m.at({-2, 2})->value : m.at({1, -1})->value;
    CHECK(other > 0.5 * top);
    for (std::size_t i = 0; i < m.offsets.size(); ++i) {
        const Offset d = m.offsets[i];
        if (!m.cells[i] || d == Offset{1, -1} || d == Offset{-2, 2})
            continue;
        CHECK(m.cells[i]->value < 0.5 * top);
    }
}

TEST_CASE("pair-only losses put the g2 map maximum on the loss direction") {
    SampleConfig c;
    c.width = c.height = 11;
    c.n_shots = 2000;
    c.p2 = 0.04;
    c.seed = 6;
    const SampleResult r = generate_images(c, 4);
    const CorrMap m = g2_map(r.images, 3, 4);
    const auto best = m.argmax();
    REQUIRE(best);
    CHECK((*best == Offset{-1, 1} || *best == Offset{1, -1}));
}

TEST_CASE("uncorrelated losses give null correlators") {
    SampleConfig c;
    c.width = c.height = 11;
    c.n_shots = 4000;
    c.p_bg = 0.1;
    c.seed = 7;
    const SampleResult r = generate_images(c, 4);
    const CorrResult a = g2(r.images, {-1, 1});
    const CorrResult b = g3(r.images, {-1, 1}, {1, -1});
    CHECK(std::abs(a.value) < 3.0 * a.error);
    CHECK(std::abs(b.value) < 3.0 * b.error);
}

TEST_CASE("G2 at R0 rises with p2 at small loss") {
    SampleConfig c;
    c.n_shots = 10000;
    c.seed = 9;
    double last = -1.0;
    for (double p : {0.0, 0.01, 0.02, 0.04, 0.08}) {
        c.p2 = p;
        const double v = g2(generate_images(c, 4).images, {-1, 1}).value;
        CHECK(v > last);
        last = v;
    }
}

TEST_CASE("pair-only background") {
    SampleConfig c;
    c.n_shots = 3000;
    c.p2 = 0.0;
    const CorrResult zero = pair_only_g3_background(c, 4);
    CHECK(std::abs(zero.value) <= 3.0 * zero.error + 1e-15);
    c.p2 = 0.04;
    const CorrResult a = pair_only_g3_background(c, 4);
    c.seed = 2;
    const CorrResult b = pair_only_g3_background(c, 4);
    CHECK(a.value < 0.0);
    CHECK(std::abs(a.value - b.value) < 3.0 * std::hypot(a.error, b.error));
    c.p3 = 0.01;
    CHECK_THROWS_AS(pair_only_g3_background(c), DomainError);
}

TEST_CASE("ratio labels") {
    RatioFit f;
    f.ratio = 3.02;
    CHECK(f.ratio_label() == "3:1");
    f.ratio = 1.94;
    CHECK(f.ratio_label() == "1.9:1");
    f.ratio.reset();
    CHECK(f.ratio_label() == "large");
}

TEST_CASE("non-positive three-point target pins p3 at zero") {
    SampleConfig c;
    FitOptions o;
    o.shots = 1500;
    const RatioFit f = fit_ratio(0.023, -1.1e-3, c, o, 4);
    CHECK(f.p3 == 0.0);
    CHECK(!f.ratio);
    CHECK(f.ratio_label() == "large");
    CHECK(f.p2 > 0.0);
    CHECK_THROWS_AS(fit_ratio(std::nan(""), 0.0, c, o), ConfigError);
}
