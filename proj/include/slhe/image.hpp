#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace slhe {

/// Canonical 10-bit intensity scale. All tonal sigma parameters, halo
/// amplitudes and level-valued CLI arguments live on this 0..1023 scale;
/// pixel samples themselves stay unit-interval doubles.
struct IntensityScale {
    static constexpr int level_count = 1024;
    static constexpr double max_level = 1023.0;
    static constexpr double to_levels(double sample) { return sample * max_level; }
    static constexpr double from_levels(double level) { return level / max_level; }
};

/// Single-channel raster of unit-interval samples, row-major top-left origin.
struct ImagePlane {
    int width = 0;
    int height = 0;
    std::vector<double> samples;

    ImagePlane() = default;
    ImagePlane(int w, int h, double fill = 0.0) : width(w), height(h) {
        if (w < 1 || h < 1)
            throw std::invalid_argument("ImagePlane: width and height must be >= 1");
        samples.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
    }

    double& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }

    std::size_t pixel_count() const { return samples.size(); }
    bool same_size(const ImagePlane& o) const { return width == o.width && height == o.height; }
};

/// Interleaved RGB raster with unit-interval channels. source_maxval keeps
/// the depth of the file the image came from (255 or 65535).
struct ColorImage {
    int width = 0;
    int height = 0;
    std::vector<double> rgb;  // 3 * width * height, RGBRGB...
    int source_maxval = 255;

    ColorImage() = default;
    ColorImage(int w, int h, int maxval = 255) : width(w), height(h), source_maxval(maxval) {
        if (w < 1 || h < 1)
            throw std::invalid_argument("ColorImage: width and height must be >= 1");
        rgb.assign(3 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0);
    }

    double* pixel(int x, int y) { return &rgb[3 * (static_cast<std::size_t>(y) * width + x)]; }
    const double* pixel(int x, int y) const {
        return &rgb[3 * (static_cast<std::size_t>(y) * width + x)];
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

/// Rec.709 luma, evaluated as B + wr*(R-B) + wg*(G-B) so gray inputs map to
/// their channel value bit-for-bit.
inline ImagePlane luminance_of(const ColorImage& color) {
    ImagePlane y(color.width, color.height);
    const double* p = color.rgb.data();
    for (std::size_t i = 0; i < y.samples.size(); ++i, p += 3)
        y.samples[i] = p[2] + 0.2126 * (p[0] - p[2]) + 0.7152 * (p[1] - p[2]);
    return y;
}

/// Scales chroma so the image takes the new luminance:
///   out_c = y_new * (c / y_old)^saturation, clamped to [0,1].
/// saturation 1 is the plain luminance ratio (and preserves the input exactly
/// when y_new == y_old); saturation 0 yields the gray image (y_new,...).
/// Pixels with y_old below one level are replaced by gray outright.
inline ColorImage reattach_chroma(const ColorImage& color, const ImagePlane& y_old,
                                  const ImagePlane& y_new, double saturation) {
    if (color.width != y_old.width || color.height != y_old.height ||
        !y_old.same_size(y_new))
        throw std::invalid_argument("reattach_chroma: dimension mismatch");
    if (saturation < 0.0 || saturation > 1.0)
        throw std::invalid_argument("reattach_chroma: saturation must be in [0,1]");

    ColorImage out(color.width, color.height, color.source_maxval);
    const double y_floor = 1.0 / IntensityScale::max_level;
    for (std::size_t i = 0; i < y_old.samples.size(); ++i) {
        const double* src = &color.rgb[3 * i];
        double* dst = &out.rgb[3 * i];
        double yo = y_old.samples[i];
        double yn = y_new.samples[i];
        if (yo < y_floor) {
            dst[0] = dst[1] = dst[2] = std::clamp(yn, 0.0, 1.0);
            continue;
        }
        if (saturation == 1.0) {
            double ratio = yn / yo;
            for (int c = 0; c < 3; ++c) dst[c] = std::clamp(src[c] * ratio, 0.0, 1.0);
        } else {
            for (int c = 0; c < 3; ++c)
                dst[c] = std::clamp(yn * std::pow(src[c] / yo, saturation), 0.0, 1.0);
        }
    }
    return out;
}

}  // namespace slhe
