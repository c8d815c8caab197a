#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "slhe/halo_metrics.hpp"
#include "support/oracles.hpp"

using namespace slhe;

namespace {

ImagePlane with_column_bump(const StepEdgeSpec& spec, int col_begin, int col_end,
                            double delta_levels) {
    ImagePlane img = make_step_edge(spec);
    for (int y = 0; y < spec.height; ++y)
        for (int x = col_begin; x < col_end; ++x)
            img.at(x, y) += delta_levels / IntensityScale::max_level;
    return img;
}

}  // namespace

TEST_CASE("make_step_edge") {
    ImagePlane tiny = make_step_edge({4, 1, 0.0, 1023.0, 2});
    REQUIRE(tiny.samples == std::vector<double>{0.0, 0.0, 1.0, 1.0});

    ImagePlane bright = make_step_edge({5, 2, 100.0, 900.0, 0});
    for (double v : bright.samples) REQUIRE(v == 900.0 / 1023.0);

    ImagePlane big = make_step_edge({256, 4, 200.0, 800.0, 128});
    REQUIRE(big.at(0, 0) == 200.0 / 1023.0);
    REQUIRE(big.at(127, 3) == 200.0 / 1023.0);
    REQUIRE(big.at(128, 0) == 800.0 / 1023.0);

    REQUIRE_THROWS_AS(make_step_edge({4, 1, 800.0, 200.0, 2}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_step_edge({4, 1, 0.0, 2000.0, 2}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_step_edge({4, 1, 0.0, 1023.0, 9}), std::invalid_argument);
}

TEST_CASE("measure_halo of an unprocessed step is zero") {
    oracle::Rng rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        StepEdgeSpec spec;
        spec.width = 8 + static_cast<int>(rng.next() % 120);
        spec.height = 1 + static_cast<int>(rng.next() % 16);
        spec.edge_column = static_cast<int>(rng.next() % (spec.width + 1));
        spec.dark_level = rng.uniform(0.0, 400.0);
        spec.bright_level = spec.dark_level + rng.uniform(1.0, 500.0);
        HaloReport rep = measure_halo(make_step_edge(spec), spec);
        REQUIRE(rep.light_amp == 0.0);
        REQUIRE(rep.dark_amp == 0.0);
        REQUIRE(rep.light_width == 0);
        REQUIRE(rep.dark_width == 0);
    }
}

TEST_CASE("measure_halo constructed bumps") {
    StepEdgeSpec spec{256, 16, 200.0, 800.0, 128};

    HaloReport light = measure_halo(with_column_bump(spec, 128, 133, 10.0), spec);
    REQUIRE(light.light_amp == Catch::Approx(10.0).margin(1e-9));
    REQUIRE(light.light_width == 5);
    REQUIRE(light.dark_amp == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(light.dark_width == 0);

    HaloReport dark = measure_halo(with_column_bump(spec, 120, 128, -7.0), spec);
    REQUIRE(dark.dark_amp == Catch::Approx(7.0).margin(1e-9));
    REQUIRE(dark.dark_width == 8);
    REQUIRE(dark.light_amp == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("halo widths obey the one-level threshold") {
    StepEdgeSpec spec{256, 4, 200.0, 800.0, 128};
    HaloReport at_threshold = measure_halo(with_column_bump(spec, 128, 132, 1.0), spec);
    REQUIRE(at_threshold.light_amp == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(at_threshold.light_width == 0);  // threshold is strict

    HaloReport above = measure_halo(with_column_bump(spec, 128, 132, 1.5), spec);
    REQUIRE(above.light_amp == Catch::Approx(1.5).margin(1e-9));
    REQUIRE(above.light_width == 4);
}

TEST_CASE("measure_halo handles one-sided specs and errors") {
    StepEdgeSpec all_bright{64, 4, 200.0, 800.0, 0};
    HaloReport rep = measure_halo(make_step_edge(all_bright), all_bright);
    REQUIRE(rep.dark_amp == 0.0);
    REQUIRE(rep.light_amp == 0.0);

    REQUIRE_THROWS_AS(measure_halo(ImagePlane(10, 10, 0.5), StepEdgeSpec{9, 10, 0, 1023, 4}),
                      std::invalid_argument);
}

TEST_CASE("reference run on the canonical step matches the closed form") {
    // Uniform sigma 50, box radius 32, 200/800 step: the near-edge dark
    // column mixes 33 dark and 32 bright window columns.
    StepEdgeSpec spec{256, 32, 200.0, 800.0, 128};
    ImagePlane out = equalize_reference(make_step_edge(spec), SpatialKernel::box(32),
                                        SigmaField(256, 32, 50.0));
    auto col_mean = [&](int x) {
        double s = 0.0;
        for (int y = 0; y < out.height; ++y) s += out.at(x, y);
        return IntensityScale::to_levels(s / out.height);
    };
    const double phi = 0.5 * (1.0 + std::erf(-600.0 / (50.0 * std::sqrt(2.0))));
    const double predicted_edge = 1023.0 * (33.0 * 0.5 + 32.0 * phi) / 65.0;
    REQUIRE(col_mean(127) == Catch::Approx(predicted_edge).margin(1e-9));
    REQUIRE(col_mean(5) == Catch::Approx(511.5).margin(1e-9));

    HaloReport rep = measure_halo(out, spec);
    REQUIRE(rep.light_amp > 100.0);
    REQUIRE(rep.dark_amp > 100.0);
    REQUIRE(rep.dark_amp == Catch::Approx(511.5 - predicted_edge).margin(1e-6));
    REQUIRE(rep.light_amp == Catch::Approx(rep.dark_amp).margin(1e-6));
}

TEST_CASE("sigma_sweep single run matches direct measurement") {
    StepEdgeSpec spec{96, 8, 200.0, 800.0, 48};
    const SpatialKernel kernel = SpatialKernel::box(8);
    std::vector<ImagePlane> outputs;
    auto rows = sigma_sweep(spec, {77.0}, kernel, {}, &outputs);
    REQUIRE(rows.size() == 1);
    REQUIRE(outputs.size() == 1);
    REQUIRE(!rows[0].adaptive);
    REQUIRE(rows[0].sigma_lo == 77.0);

    ImagePlane direct =
        equalize_reference(make_step_edge(spec), kernel, SigmaField(96, 8, 77.0));
    REQUIRE(outputs[0].samples == direct.samples);
    HaloReport rep = measure_halo(direct, spec);
    REQUIRE(rows[0].report.light_amp == rep.light_amp);
    REQUIRE(rows[0].report.dark_amp == rep.dark_amp);
}

TEST_CASE("sigma_sweep amplitudes fall as sigma grows") {
    StepEdgeSpec spec{96, 8, 200.0, 800.0, 48};
    auto rows = sigma_sweep(spec, {50.0, 100.0, 200.0, 500.0}, SpatialKernel::box(8));
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].report.light_amp <= rows[i - 1].report.light_amp + 1e-9);
        REQUIRE(rows[i].report.dark_amp <= rows[i - 1].report.dark_amp + 1e-9);
    }
    REQUIRE(rows[3].report.light_amp < rows[0].report.light_amp);
    REQUIRE(rows[3].report.dark_amp < rows[0].report.dark_amp);
}

TEST_CASE("adaptive sweep is selective per policy") {
    StepEdgeSpec spec{96, 8, 200.0, 800.0, 48};
    SigmaParams bounds{64.0, 512.0, GroupPolicy::paper};
    auto rows = sigma_sweep(spec, {64.0}, SpatialKernel::box(8), bounds);
    REQUIRE(rows.size() == 3);
    const HaloReport& uniform = rows[0].report;
    const HaloReport& paper = rows[1].report;
    const HaloReport& swapped = rows[2].report;
    REQUIRE(rows[1].policy == GroupPolicy::paper);
    REQUIRE(rows[2].policy == GroupPolicy::swapped);

    // Paper policy: only below-mean (dark-group) pixels receive larger sigma,
    // so the dark halo shrinks while the light side is untouched.
    REQUIRE(paper.dark_amp < uniform.dark_amp);
    REQUIRE(std::abs(paper.light_amp - uniform.light_amp) <= 1.0);
    // Swapped policy mirrors the selectivity.
    REQUIRE(swapped.light_amp < uniform.light_amp);
    REQUIRE(std::abs(swapped.dark_amp - uniform.dark_amp) <= 1.0);
}

TEST_CASE("sigma_sweep argument validation") {
    StepEdgeSpec spec{32, 4, 200.0, 800.0, 16};
    REQUIRE_THROWS_AS(sigma_sweep(spec, {}, SpatialKernel::box(4)), std::invalid_argument);
    REQUIRE_NOTHROW(sigma_sweep(spec, {}, SpatialKernel::box(4),
                                SigmaParams{64.0, 128.0, GroupPolicy::paper}));
}
