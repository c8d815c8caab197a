#pragma once

// Deterministic test stimuli: a geometric scene with plateaus, ramps and
// disks, and a multi-octave value-noise field standing in for a natural
// photograph. Same seed, same image, on every platform.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "slhe/image.hpp"

namespace slhe {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double lattice_value(std::uint64_t seed, int octave, int i, int j) {
    std::uint64_t key = seed;
    key = splitmix64(key ^ (static_cast<std::uint64_t>(octave) << 40));
    key = splitmix64(key ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 20) ^
                     static_cast<std::uint32_t>(j));
    return static_cast<double>(key >> 11) * (1.0 / 9007199254740992.0);  // [0,1)
}

inline double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

}  // namespace detail

/// Cloud-like multi-octave value noise, normalized to [0.02, 0.98].
inline ImagePlane make_value_noise(int width, int height, std::uint64_t seed,
                                   int octaves = 5) {
    ImagePlane img(width, height);
    double amp = 1.0;
    int cell = std::max(8, std::min(width, height) / 4);
    for (int o = 0; o < octaves && cell >= 2; ++o, cell /= 2, amp *= 0.55) {
        for (int y = 0; y < height; ++y) {
            const int j0 = y / cell;
            const double ty = detail::smoothstep(static_cast<double>(y % cell) / cell);
            for (int x = 0; x < width; ++x) {
                const int i0 = x / cell;
                const double tx = detail::smoothstep(static_cast<double>(x % cell) / cell);
                const double v00 = detail::lattice_value(seed, o, i0, j0);
                const double v10 = detail::lattice_value(seed, o, i0 + 1, j0);
                const double v01 = detail::lattice_value(seed, o, i0, j0 + 1);
                const double v11 = detail::lattice_value(seed, o, i0 + 1, j0 + 1);
                const double top = v00 + tx * (v10 - v00);
                const double bot = v01 + tx * (v11 - v01);
                img.at(x, y) += amp * (top + ty * (bot - top));
            }
        }
    }
    const auto [mn, mx] = std::minmax_element(img.samples.begin(), img.samples.end());
    const double lo = *mn, span = std::max(*mx - lo, 1e-12);
    for (double& s : img.samples) s = 0.02 + 0.96 * (s - lo) / span;
    return img;
}

/// Geometric scene: gradient background, constant plateaus (including values
/// off the histogram bin centers), disks, bars and a sinusoidal patch.
inline ImagePlane make_test_scene(int width, int height) {
    ImagePlane img(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            img.at(x, y) = 0.10 + 0.78 * (static_cast<double>(x) / std::max(1, width - 1));

    auto rect = [&](double fx0, double fy0, double fx1, double fy1, double v) {
        const int x0 = static_cast<int>(fx0 * width), x1 = static_cast<int>(fx1 * width);
        const int y0 = static_cast<int>(fy0 * height), y1 = static_cast<int>(fy1 * height);
        for (int y = y0; y < y1 && y < height; ++y)
            for (int x = x0; x < x1 && x < width; ++x) img.at(x, y) = v;
    };
    rect(0.05, 0.05, 0.30, 0.30, 200.0 / 1023.0);
    rect(0.60, 0.05, 0.95, 0.28, 800.0 / 1023.0);
    rect(0.40, 0.40, 0.58, 0.60, 0.5);
    rect(0.07, 0.72, 0.22, 0.95, 0.93);
    rect(0.30, 0.78, 0.42, 0.93, 0.07);

    auto disk = [&](double fcx, double fcy, double fr, double v) {
        const double cx = fcx * width, cy = fcy * height, r = fr * std::min(width, height);
        const int x0 = std::max(0, static_cast<int>(cx - r) - 1);
        const int x1 = std::min(width, static_cast<int>(cx + r) + 2);
        const int y0 = std::max(0, static_cast<int>(cy - r) - 1);
        const int y1 = std::min(height, static_cast<int>(cy + r) + 2);
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img.at(x, y) = v;
    };
    disk(0.75, 0.52, 0.09, 0.88);
    disk(0.25, 0.52, 0.07, 0.15);

    // Vertical bars and a sinusoidal texture patch.
    for (int y = static_cast<int>(0.66 * height); y < static_cast<int>(0.74 * height); ++y)
        for (int x = static_cast<int>(0.50 * width); x < static_cast<int>(0.95 * width); ++x)
            img.at(x, y) = ((x / 8) % 2 == 0) ? 0.25 : 0.75;
    for (int y = static_cast<int>(0.80 * height); y < height; ++y)
        for (int x = static_cast<int>(0.55 * width); x < width; ++x)
            img.at(x, y) = 0.5 + 0.35 * std::sin(0.21 * x) * std::cos(0.17 * y);

    for (double& s : img.samples) s = std::clamp(s, 0.02, 0.98);
    return img;
}

}  // namespace slhe
