#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "slhe/reports.hpp"
#include "slhe/run_config.hpp"

using namespace slhe;

TEST_CASE("empty config yields defaults") {
    RunConfig cfg = parse_config("");
    REQUIRE(cfg.sigma_min == 64.0);
    REQUIRE(cfg.sigma_max == 256.0);
    REQUIRE(cfg.radius == 32);
    REQUIRE(cfg.kernel == SpatialKernel::Kind::box);
    REQUIRE(cfg.bins == 256);
    REQUIRE(cfg.lut_levels == 16);
    REQUIRE(cfg.engine == EqualizerConfig::Engine::binned);
    REQUIRE(cfg.policy == GroupPolicy::paper);
    REQUIRE(cfg.alpha == 1.0);
    REQUIRE(cfg.saturation == 1.0);
}

TEST_CASE("file values parse and flags override") {
    RunConfig cfg = parse_config("# comment\nsigma_min = 50\n\nradius=16 # trailing\n",
                                 {{"sigma_min", "80"}});
    REQUIRE(cfg.sigma_min == 80.0);
    REQUIRE(cfg.radius == 16);
}

TEST_CASE("enumerated keys") {
    RunConfig cfg = parse_config(
        "kernel = gauss\nengine = reference\npolicy = swapped\nalpha = 0.5\nsaturation=0.25\n");
    REQUIRE(cfg.kernel == SpatialKernel::Kind::gauss3box);
    REQUIRE(cfg.engine == EqualizerConfig::Engine::reference);
    REQUIRE(cfg.policy == GroupPolicy::swapped);
    REQUIRE(cfg.alpha == 0.5);
    REQUIRE(cfg.spatial_kernel().kind == SpatialKernel::Kind::gauss3box);
    REQUIRE(cfg.sigma_params().policy == GroupPolicy::swapped);
    REQUIRE(cfg.equalizer_config().engine == EqualizerConfig::Engine::reference);
    REQUIRE(cfg.equalizer_config().strength == 0.5);
}

static std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return std::string(e.what()) + "|" + e.key;
    }
    FAIL("expected ConfigError");
    return {};
}

TEST_CASE("errors name the offending key") {
    REQUIRE(error_of("sigma_min = 300\nsigma_max = 100\n").find("sigma_min") !=
            std::string::npos);
    REQUIRE(error_of("frobnicate = 1\n").find("frobnicate") != std::string::npos);
    REQUIRE(error_of("radius = fast\n").find("radius") != std::string::npos);
    REQUIRE(error_of("kernel = circle\n").find("kernel") != std::string::npos);
    REQUIRE(error_of("sigma_min = 0\n").find("sigma_min") != std::string::npos);
    REQUIRE(error_of("sigma_max = 1500\n").find("sigma_max") != std::string::npos);
    REQUIRE(error_of("bins = 4\n").find("bins") != std::string::npos);
    REQUIRE(error_of("alpha = 1.5\n").find("alpha") != std::string::npos);
    REQUIRE(error_of("no equals sign\n").find("expected") != std::string::npos);
}

TEST_CASE("lut_levels constraint depends on engine and sigma spread") {
    REQUIRE_THROWS_AS(parse_config("lut_levels = 1\n"), ConfigError);
    RunConfig cfg = parse_config("lut_levels = 1\nsigma_min = 64\nsigma_max = 64\n");
    REQUIRE(cfg.lut_levels == 1);
    cfg = parse_config("lut_levels = 1\nengine = reference\n");
    REQUIRE(cfg.engine == EqualizerConfig::Engine::reference);
}

TEST_CASE("override errors are also named") {
    try {
        parse_config("", {{"sigma_min", "abc"}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.key == "sigma_min");
    }
}

TEST_CASE("sweep csv formatting") {
    SweepRow uniform;
    uniform.sigma_lo = uniform.sigma_hi = 50.0;
    uniform.report = HaloReport{251.815381, 251.815399, 32, 32};
    SweepRow adaptive;
    adaptive.adaptive = true;
    adaptive.sigma_lo = 64.0;
    adaptive.sigma_hi = 512.0;
    adaptive.policy = GroupPolicy::swapped;
    adaptive.report = HaloReport{10.0, 0.4, 3, 0};
    REQUIRE(sweep_csv({uniform, adaptive}) ==
            "sigma,policy,light_amp,dark_amp,light_width,dark_width\n"
            "50,uniform,251.815,251.815,32,32\n"
            "64:512,swapped,10.000,0.400,3,0\n");
}

TEST_CASE("halo csv formatting") {
    REQUIRE(halo_csv({{"a.pgm", HaloReport{}}, {"b.pgm", HaloReport{1.25, 2.5, 1, 2}}}) ==
            "image,light_amp,dark_amp,light_width,dark_width\n"
            "a.pgm,0.000,0.000,0,0\n"
            "b.pgm,1.250,2.500,1,2\n");
}
