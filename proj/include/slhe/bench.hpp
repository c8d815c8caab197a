#pragma once

// Engine benchmark harness. The binned engine is timed on the full image; the
// O(window) reference engine is timed on a centered crop and reported as
// throughput, which is position-independent for both engines. The binned
// error column is measured against the reference on the crop interior, where
// crop and full-image windows see identical samples.

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

#include "slhe/equalizer.hpp"
#include "slhe/kernels.hpp"
#include "slhe/sigma_field.hpp"

namespace slhe {

struct BenchRow {
    std::string engine;  // "reference" or "binned"
    int radius = 0;
    double seconds = 0.0;
    double megapixels_per_second = 0.0;
    double max_error_levels = 0.0;  // binned vs reference on the comparison tile
    int timed_width = 0;
    int timed_height = 0;
};

namespace detail {

inline ImagePlane crop_plane(const ImagePlane& in, int x0, int y0, int w, int h) {
    ImagePlane out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = in.at(x0 + x, y0 + y);
    return out;
}

inline SigmaField crop_field(const SigmaField& in, int x0, int y0, int w, int h) {
    SigmaField out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.values[static_cast<std::size_t>(y) * w + x] = in.at(x0 + x, y0 + y);
    return out;
}

template <typename F>
double timed(F&& fn, int reps = 1) {
    double best = 0.0;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(t1 - t0).count();
        if (i == 0 || s < best) best = s;
    }
    return best;
}

}  // namespace detail

inline std::vector<BenchRow> bench_engines(const ImagePlane& image,
                                           const std::vector<int>& radii,
                                           const SigmaParams& params, EqualizerConfig cfg,
                                           int ref_tile = 192) {
    if (image.width < 256 || image.height < 256)
        throw std::invalid_argument("bench_engines: image must be at least 256x256");
    params.validate();
    cfg.validate();

    std::vector<BenchRow> rows;
    for (int radius : radii) {
        const SpatialKernel kernel = SpatialKernel::box(radius);
        const SigmaField field =
            build_sigma_field(image, local_mean(image, kernel), params);

        // Reference crop: big enough that a comparison interior of >= 64
        // pixels per side survives after trimming one window radius.
        const int tile = std::clamp(std::max(ref_tile, 2 * radius + 64),
                                    2 * radius + 16, std::min(image.width, image.height));
        const int x0 = (image.width - tile) / 2, y0 = (image.height - tile) / 2;
        const ImagePlane crop_img = detail::crop_plane(image, x0, y0, tile, tile);
        const SigmaField crop_sig = detail::crop_field(field, x0, y0, tile, tile);

        ImagePlane ref_out;
        BenchRow ref_row;
        ref_row.engine = "reference";
        ref_row.radius = radius;
        ref_row.timed_width = ref_row.timed_height = tile;
        ref_row.seconds =
            detail::timed([&] { ref_out = equalize_reference(crop_img, kernel, crop_sig); });
        ref_row.megapixels_per_second =
            static_cast<double>(tile) * tile / 1e6 / ref_row.seconds;
        rows.push_back(ref_row);

        ImagePlane fast_out;
        BenchRow fast_row;
        fast_row.engine = "binned";
        fast_row.radius = radius;
        fast_row.timed_width = image.width;
        fast_row.timed_height = image.height;
        // Best of three: scheduler noise on a shared machine otherwise
        // dominates the radius-scaling comparison.
        fast_row.seconds = detail::timed(
            [&] { fast_out = equalize_binned(image, kernel, field, cfg); }, 3);
        fast_row.megapixels_per_second =
            static_cast<double>(image.width) * image.height / 1e6 / fast_row.seconds;

        // Interior of the crop, where crop-local and full-image windows agree.
        double max_err = 0.0;
        for (int y = radius; y < tile - radius; ++y)
            for (int x = radius; x < tile - radius; ++x) {
                const double a = fast_out.at(x0 + x, y0 + y);
                const double b = ref_out.at(x, y);
                max_err = std::max(max_err, std::abs(a - b));
            }
        fast_row.max_error_levels = IntensityScale::to_levels(max_err);
        rows.push_back(fast_row);
    }
    return rows;
}

}  // namespace slhe
