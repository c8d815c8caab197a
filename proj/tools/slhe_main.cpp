// slhe: halo-controlled smoothed local histogram equalization CLI.
//
// Exit codes: 0 success, 1 runtime error (unreadable/malformed files,
// dimension mismatches), 2 usage error (bad flags, bad configuration).
// Output files are written to a temporary name and renamed on success, so a
// failing run never leaves a partial artifact behind.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "slhe/slhe.hpp"

namespace {

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>()};
    if (in.bad()) throw std::runtime_error("failed reading '" + path + "'");
    return bytes;
}

std::string read_text_file(const std::string& path) {
    auto bytes = read_file(path);
    return std::string(bytes.begin(), bytes.end());
}

void write_file_atomic(const std::string& path, const void* data, std::size_t size) {
    const std::string tmp = path + ".tmp";
    try {
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
            out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
            if (!out) throw std::runtime_error("failed writing '" + tmp + "'");
        }
        std::filesystem::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
}

void write_file_atomic(const std::string& path, const std::vector<unsigned char>& bytes) {
    write_file_atomic(path, bytes.data(), bytes.size());
}

void write_file_atomic(const std::string& path, const std::string& text) {
    write_file_atomic(path, text.data(), text.size());
}

// Config flags are collected as raw strings and pushed through parse_config
// so file values, flag overrides and constraint checks share one error path.
struct ConfigFlags {
    std::string config_path;
    std::vector<std::pair<std::string, CLI::Option*>> options;
    std::vector<std::string> values;

    void attach(CLI::App* cmd) {
        static const char* keys[] = {"sigma_min", "sigma_max", "radius",  "kernel",
                                     "bins",      "lut_levels", "engine", "policy",
                                     "alpha",     "saturation"};
        values.resize(std::size(keys));
        std::size_t i = 0;
        for (const char* key : keys) {
            std::string flag = "--" + std::string(key);
            for (auto& c : flag)
                if (c == '_') c = '-';
            options.emplace_back(key, cmd->add_option(flag, values[i], key));
            ++i;
        }
        cmd->add_option("--config", config_path, "flat key=value configuration file");
    }

    slhe::RunConfig resolve() const {
        std::string text;
        if (!config_path.empty()) text = read_text_file(config_path);
        std::vector<std::pair<std::string, std::string>> overrides;
        for (std::size_t i = 0; i < options.size(); ++i)
            if (options[i].second->count() > 0) overrides.emplace_back(options[i].first, values[i]);
        return slhe::parse_config(text, overrides);
    }
};

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw slhe::ConfigError(what, "cannot parse " + what + " list entry '" + item + "'");
        }
    }
    return out;
}

slhe::StepEdgeSpec step_spec_from_flags(const std::string& step, int width, int height,
                                        int edge_col) {
    auto levels = parse_double_list(step, "step");
    if (levels.size() != 2)
        throw slhe::ConfigError("step", "--step expects 'dark,bright' level pair");
    slhe::StepEdgeSpec spec;
    spec.width = width;
    spec.height = height;
    spec.dark_level = levels[0];
    spec.bright_level = levels[1];
    spec.edge_column = edge_col >= 0 ? edge_col : width / 2;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw slhe::ConfigError("step", e.what());
    }
    return spec;
}

std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// ---- subcommand handlers ----

struct TonemapArgs {
    std::string input, output;
    ConfigFlags cfg;
};

int run_tonemap(const TonemapArgs& args) {
    const slhe::RunConfig cfg = args.cfg.resolve();
    const slhe::PnmImage in = slhe::decode_pnm(read_file(args.input));
    std::vector<unsigned char> out_bytes;
    if (in.is_color()) {
        slhe::ColorImage out =
            slhe::tone_map(in.color(), cfg.spatial_kernel(), cfg.sigma_params(),
                           cfg.equalizer_config(), cfg.saturation);
        out_bytes = slhe::encode_pnm(out, in.maxval);
    } else {
        slhe::ImagePlane out = slhe::tone_map(in.plane(), cfg.spatial_kernel(),
                                              cfg.sigma_params(), cfg.equalizer_config());
        out_bytes = slhe::encode_pnm(out, in.maxval);
    }
    write_file_atomic(args.output, out_bytes);
    return 0;
}

struct SweepArgs {
    std::string sigmas = "50,100,200,500";
    std::string step = "200,800";
    int width = 256, height = 256, edge_col = -1;
    bool adaptive = false;
    std::string out;
    std::string profiles;  // optional PNM prefix
    ConfigFlags cfg;
};

int run_sweep(const SweepArgs& args) {
    const slhe::RunConfig cfg = args.cfg.resolve();
    const slhe::StepEdgeSpec spec =
        step_spec_from_flags(args.step, args.width, args.height, args.edge_col);
    const std::vector<double> sigmas = parse_double_list(args.sigmas, "sigmas");

    std::optional<slhe::SigmaParams> adaptive;
    if (args.adaptive) adaptive = cfg.sigma_params();

    std::vector<slhe::ImagePlane> outputs;
    const std::vector<slhe::SweepRow> rows = slhe::sigma_sweep(
        spec, sigmas, cfg.spatial_kernel(), adaptive, args.profiles.empty() ? nullptr : &outputs);
    write_file_atomic(args.out, slhe::sweep_csv(rows));

    if (!args.profiles.empty()) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::string tag = rows[i].adaptive
                                  ? std::string(rows[i].policy == slhe::GroupPolicy::paper
                                                    ? "paper"
                                                    : "swapped")
                                  : "sigma" + format_g(rows[i].sigma_lo);
            write_file_atomic(args.profiles + "_" + tag + ".pgm",
                              slhe::encode_pnm(outputs[i], 65535));
        }
    }
    return 0;
}

struct HaloReportArgs {
    std::string image_a, image_b;
    std::string step = "200,800";
    int edge_col = -1;
};

int run_halo_report(const HaloReportArgs& args) {
    std::vector<std::pair<std::string, slhe::HaloReport>> entries;
    std::optional<slhe::StepEdgeSpec> spec;
    for (const std::string& path : {args.image_a, args.image_b}) {
        const slhe::PnmImage in = slhe::decode_pnm(read_file(path));
        const slhe::ImagePlane plane =
            in.is_color() ? slhe::luminance_of(in.color()) : in.plane();
        if (!spec)
            spec = step_spec_from_flags(args.step, plane.width, plane.height, args.edge_col);
        entries.emplace_back(path, slhe::measure_halo(plane, *spec));
    }
    std::fputs(slhe::halo_csv(entries).c_str(), stdout);
    return 0;
}

struct PerceiveArgs {
    std::string input, output;
    double dog_center = 1.0, dog_surround = 3.0, dog_k = 1.0, dog_lambda = 1.0;
};

int run_perceive(const PerceiveArgs& args) {
    slhe::DoGParams dog{args.dog_center, args.dog_surround, args.dog_k, args.dog_lambda};
    try {
        dog.validate();
    } catch (const std::invalid_argument& e) {
        throw slhe::ConfigError("dog", e.what());
    }
    const slhe::PnmImage in = slhe::decode_pnm(read_file(args.input));
    std::vector<unsigned char> out_bytes;
    if (in.is_color()) {
        slhe::ImagePlane y = slhe::luminance_of(in.color());
        slhe::ColorImage out =
            slhe::reattach_chroma(in.color(), y, slhe::perceived_luminance(y, dog), 1.0);
        out_bytes = slhe::encode_pnm(out, in.maxval);
    } else {
        out_bytes = slhe::encode_pnm(slhe::perceived_luminance(in.plane(), dog), in.maxval);
    }
    write_file_atomic(args.output, out_bytes);
    return 0;
}

struct BenchArgs {
    int size = 1024;
    std::string radii = "8,64";
    int ref_tile = 192;
    ConfigFlags cfg;
};

int run_bench(const BenchArgs& args) {
    const slhe::RunConfig cfg = args.cfg.resolve();
    if (args.size < 256) throw slhe::ConfigError("size", "--size must be >= 256");
    std::vector<int> radii;
    for (double r : parse_double_list(args.radii, "radii")) radii.push_back(static_cast<int>(r));

    const slhe::ImagePlane image =
        slhe::make_value_noise(args.size, args.size, 0x51484531ULL, 6);
    const std::vector<slhe::BenchRow> rows = slhe::bench_engines(
        image, radii, cfg.sigma_params(), cfg.equalizer_config(), args.ref_tile);

    std::printf("engine,radius,timed_pixels,seconds,mpix_per_s,max_err_levels\n");
    for (const auto& r : rows)
        std::printf("%s,%d,%d,%.4f,%.3f,%.3f\n", r.engine.c_str(), r.radius,
                    r.timed_width * r.timed_height, r.seconds, r.megapixels_per_second,
                    r.max_error_levels);
    for (std::size_t i = 0; i + 1 < rows.size(); i += 2)
        std::printf("# radius %d: binned/reference throughput = %.1fx\n", rows[i].radius,
                    rows[i + 1].megapixels_per_second / rows[i].megapixels_per_second);
    if (rows.size() >= 4)
        std::printf("# binned wall-time ratio radius %d vs %d = %.3f\n", rows.back().radius,
                    rows[1].radius, rows.back().seconds / rows[1].seconds);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"halo-controlled smoothed local histogram equalization"};
    app.require_subcommand(1);

    TonemapArgs tonemap;
    CLI::App* cmd_tonemap = app.add_subcommand("tonemap", "tone-map a PNM image");
    cmd_tonemap->add_option("input", tonemap.input, "input .pgm/.ppm")->required();
    cmd_tonemap->add_option("output", tonemap.output, "output path")->required();
    tonemap.cfg.attach(cmd_tonemap);

    SweepArgs sweep;
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "halo measurements over a sigma sweep");
    cmd_sweep->add_option("--sigmas", sweep.sigmas, "comma list of uniform sigma values");
    cmd_sweep->add_option("--step", sweep.step, "dark,bright plateau levels (0..1023)");
    cmd_sweep->add_option("--width", sweep.width, "stimulus width");
    cmd_sweep->add_option("--height", sweep.height, "stimulus height");
    cmd_sweep->add_option("--edge-col", sweep.edge_col, "edge column (default width/2)");
    cmd_sweep->add_flag("--adaptive", sweep.adaptive,
                        "also run adaptive sigma under both group policies");
    cmd_sweep->add_option("--out", sweep.out, "output CSV path")->required();
    cmd_sweep->add_option("--profiles", sweep.profiles, "prefix for per-run 16-bit PGMs");
    sweep.cfg.attach(cmd_sweep);

    HaloReportArgs halo;
    CLI::App* cmd_halo = app.add_subcommand("halo-report", "measure halos in two images");
    cmd_halo->add_option("image_a", halo.image_a)->required();
    cmd_halo->add_option("image_b", halo.image_b)->required();
    cmd_halo->add_option("--step", halo.step, "dark,bright plateau levels");
    cmd_halo->add_option("--edge-col", halo.edge_col, "edge column (default width/2)");

    PerceiveArgs perceive;
    CLI::App* cmd_perceive =
        app.add_subcommand("perceive", "lateral-inhibition perceived-luminance model");
    cmd_perceive->add_option("input", perceive.input)->required();
    cmd_perceive->add_option("output", perceive.output)->required();
    cmd_perceive->add_option("--dog-center", perceive.dog_center, "center sigma, pixels");
    cmd_perceive->add_option("--dog-surround", perceive.dog_surround, "surround sigma, pixels");
    cmd_perceive->add_option("--dog-k", perceive.dog_k, "surround gain in (0,1]");
    cmd_perceive->add_option("--dog-lambda", perceive.dog_lambda, "response gain");

    BenchArgs bench;
    CLI::App* cmd_bench = app.add_subcommand("bench", "time both equalizer engines");
    cmd_bench->add_option("--size", bench.size, "square test image size (>= 256)");
    cmd_bench->add_option("--radii", bench.radii, "comma list of box radii");
    cmd_bench->add_option("--ref-tile", bench.ref_tile, "reference engine crop size");
    bench.cfg.attach(cmd_bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "slhe: " << e.what() << "\n";
        return 2;
    }

    try {
        if (cmd_tonemap->parsed()) return run_tonemap(tonemap);
        if (cmd_sweep->parsed()) return run_sweep(sweep);
        if (cmd_halo->parsed()) return run_halo_report(halo);
        if (cmd_perceive->parsed()) return run_perceive(perceive);
        if (cmd_bench->parsed()) return run_bench(bench);
    } catch (const slhe::ConfigError& e) {
        std::cerr << "slhe: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "slhe: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
