#pragma once

// Spatial weighting function W over the local patch: normalized box windows
// and a Gaussian approximated by three successive box passes. Replicate
// border everywhere, which keeps filtered values inside the input range.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "slhe/detail/parallel.hpp"
#include "slhe/image.hpp"

namespace slhe {

struct SpatialKernel {
    enum class Kind { box, gauss3box };
    Kind kind = Kind::box;
    int radius = 32;       // box half-width in pixels
    double sigma_s = 8.0;  // gauss3box spatial sigma in pixels

    static SpatialKernel box(int r) {
        if (r < 1) throw std::invalid_argument("SpatialKernel: box radius must be >= 1");
        SpatialKernel k;
        k.kind = Kind::box;
        k.radius = r;
        return k;
    }
    static SpatialKernel gauss(double sigma) {
        if (!(sigma > 0.0))
            throw std::invalid_argument("SpatialKernel: gauss sigma_s must be > 0");
        SpatialKernel k;
        k.kind = Kind::gauss3box;
        k.sigma_s = sigma;
        return k;
    }
};

namespace detail {

// One row of windowed sums over a prebuilt extended row, window width 2r+1.
//
// The extended row is split into fixed blocks of the window width. Prefix
// sums run left-to-right inside each block, suffix sums right-to-left; a
// window sum is then suffix[x] + prefix[x+2r] (or a single whole-block prefix
// when the window is block-aligned). Each window sum is a genuine sum of its
// samples grouped about a fixed boundary -- there is no sliding add/subtract
// -- so results are bit-identical to direct summation performed with the same
// grouping, at O(1) cost per pixel regardless of r.
inline void box_row_sums_on_ext(const double* ext, int w, int r, double* out, double* pre,
                                double* suf) {
    const int win = 2 * r + 1;
    const int len = w + 2 * r;
    for (int b0 = 0; b0 < len; b0 += win) {
        const int be = std::min(len, b0 + win);
        pre[b0] = ext[b0];
        for (int i = b0 + 1; i < be; ++i) pre[i] = pre[i - 1] + ext[i];
        suf[be - 1] = ext[be - 1];
        for (int i = be - 2; i >= b0; --i) suf[i] = ext[i] + suf[i + 1];
    }
    for (int x = 0; x < w; ++x)
        out[x] = (x % win == 0) ? pre[x + 2 * r] : suf[x] + pre[x + 2 * r];
}

inline void box_row_sums(const double* row, int w, int r, double* out, double* ext,
                         double* pre, double* suf) {
    for (int i = 0; i < w + 2 * r; ++i) ext[i] = row[std::clamp(i - r, 0, w - 1)];
    box_row_sums_on_ext(ext, w, r, out, pre, suf);
}

inline void horizontal_box_sums_into(const ImagePlane& in, int r, ImagePlane& out) {
    const int len = in.width + 2 * r;
    parallel_for(in.height, [&](int y0, int y1) {
        std::vector<double> ext(len), pre(len), suf(len);
        for (int y = y0; y < y1; ++y)
            box_row_sums(&in.samples[static_cast<std::size_t>(y) * in.width], in.width, r,
                         &out.samples[static_cast<std::size_t>(y) * in.width], ext.data(),
                         pre.data(), suf.data());
    });
}

inline ImagePlane horizontal_box_sums(const ImagePlane& in, int r) {
    ImagePlane out(in.width, in.height);
    horizontal_box_sums_into(in, r, out);
    return out;
}

// Column tile width for the vertical passes: wide tiles keep the inner loops
// cheap, but there must be enough tiles to spread across worker threads.
inline int vertical_tile_width(int width) {
    const int hw = std::max(1u, std::thread::hardware_concurrency());
    return std::clamp(width / (2 * hw), 64, 512);
}

// Streams vertical window sums over per-row horizontal sums, using the same
// block prefix/suffix scheme along each column. The prefix is accumulated row
// by row and the suffix materialized one block at a time per column tile, so
// the working set is independent of the image height. Emit receives each
// output row segment as (y, x0, count, sums). Tiles run in parallel; the
// per-value summation grouping is fixed and independent of the tiling.
template <typename Emit>
inline void vertical_box_stream(const ImagePlane& hs, int r, const Emit& emit) {
    const int w = hs.width, h = hs.height;
    const int win = 2 * r + 1;
    const int len = h + 2 * r;
    const int T = vertical_tile_width(w);
    const int tiles = (w + T - 1) / T;
    auto row_of = [&](int j) {
        return &hs.samples[static_cast<std::size_t>(std::clamp(j - r, 0, h - 1)) * w];
    };
    parallel_for(tiles, [&](int t0, int t1) {
        std::vector<double> suf(static_cast<std::size_t>(win) * T);
        std::vector<double> pre(T);
        std::vector<double> sums(T);
        for (int t = t0; t < t1; ++t) {
            const int x0 = t * T;
            const int n = std::min(T, w - x0);
            int built_block = -1;
            for (int j = 0; j < len; ++j) {
                const double* e = row_of(j) + x0;
                if (j % win == 0) {
                    for (int x = 0; x < n; ++x) pre[x] = e[x];
                } else {
                    for (int x = 0; x < n; ++x) pre[x] += e[x];
                }
                const int y = j - 2 * r;
                if (y < 0) continue;
                const int yb = y / win;
                if (yb != built_block) {
                    const int b0 = yb * win;
                    const int be = std::min(len, b0 + win);
                    const double* eb = row_of(be - 1) + x0;
                    double* d = &suf[static_cast<std::size_t>(be - 1 - b0) * T];
                    for (int x = 0; x < n; ++x) d[x] = eb[x];
                    for (int jj = be - 2; jj >= b0; --jj) {
                        const double* ej = row_of(jj) + x0;
                        const double* nx = &suf[static_cast<std::size_t>(jj + 1 - b0) * T];
                        d = &suf[static_cast<std::size_t>(jj - b0) * T];
                        for (int x = 0; x < n; ++x) d[x] = ej[x] + nx[x];
                    }
                    built_block = yb;
                }
                if (y % win == 0) {
                    for (int x = 0; x < n; ++x) sums[x] = pre[x];
                } else {
                    const double* s = &suf[static_cast<std::size_t>(y - yb * win) * T];
                    for (int x = 0; x < n; ++x) sums[x] = s[x] + pre[x];
                }
                emit(y, x0, n, sums.data());
            }
        }
    });
}

}  // namespace detail

/// Mean over the (2r+1)x(2r+1) window with replicate borders. Separable
/// block prefix/suffix sums give per-pixel cost independent of the radius.
inline ImagePlane box_filter(const ImagePlane& in, int radius) {
    if (radius < 1) throw std::invalid_argument("box_filter: radius must be >= 1");
    if (in.width < 1 || in.height < 1) throw std::invalid_argument("box_filter: empty image");
    ImagePlane hs = detail::horizontal_box_sums(in, radius);
    ImagePlane out(in.width, in.height);
    const double area = static_cast<double>(2 * radius + 1) * (2 * radius + 1);
    detail::vertical_box_stream(hs, radius, [&](int y, int x0, int n, const double* sums) {
        double* o = &out.samples[static_cast<std::size_t>(y) * out.width + x0];
        for (int x = 0; x < n; ++x) o[x] = sums[x] / area;
    });
    return out;
}

/// Box pass radii for the 3-pass Gaussian approximation (ideal averaging
/// width rule): composite variance matches sigma^2 within one discrete step.
inline std::array<int, 3> gauss3box_radii(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gauss3box_radii: sigma must be > 0");
    constexpr int n = 3;
    const double w_ideal = std::sqrt(12.0 * sigma * sigma / n + 1.0);
    int wl = static_cast<int>(std::floor(w_ideal));
    if (wl % 2 == 0) --wl;
    if (wl < 1) wl = 1;
    const int wu = wl + 2;
    const double m_ideal =
        (12.0 * sigma * sigma - n * wl * wl - 4.0 * n * wl - 3.0 * n) / (-4.0 * wl - 4.0);
    int m = static_cast<int>(std::lround(m_ideal));
    m = std::clamp(m, 0, n);
    std::array<int, 3> radii{};
    for (int i = 0; i < n; ++i) radii[i] = ((i < m ? wl : wu) - 1) / 2;
    return radii;
}

/// Gaussian smoothing by three successive box means. Radius-0 passes are
/// identity and skipped. DC gain is exactly that of the box means (unity).
inline ImagePlane gauss3box_filter(const ImagePlane& in, double sigma) {
    ImagePlane out = in;
    for (int r : gauss3box_radii(sigma))
        if (r >= 1) out = box_filter(out, r);
    return out;
}

/// Applies the kernel as a smoothing filter (the weighted mean over W).
inline ImagePlane apply_kernel(const ImagePlane& in, const SpatialKernel& kernel) {
    return kernel.kind == SpatialKernel::Kind::box ? box_filter(in, kernel.radius)
                                                   : gauss3box_filter(in, kernel.sigma_s);
}

/// The weighted local mean L_mean used for luminance-group classification.
using LocalMeanField = ImagePlane;

inline LocalMeanField local_mean(const ImagePlane& in, const SpatialKernel& kernel) {
    return apply_kernel(in, kernel);
}

/// One-sided 1-D weight profile of the kernel (index 0 = center tap) plus
/// the full 1-D weight sum. Used by the brute-force reference equalizer,
/// which needs explicit W(p-q) values. For gauss3box these are the exact
/// composite weights of the three box passes (interior behavior; borders are
/// handled by sample clamping).
struct KernelProfile {
    std::vector<double> one_sided;  // w[0..R]
    double norm_1d = 1.0;           // sum of the full 1-D kernel
    int radius = 0;
};

inline KernelProfile kernel_profile(const SpatialKernel& kernel) {
    KernelProfile p;
    if (kernel.kind == SpatialKernel::Kind::box) {
        p.radius = kernel.radius;
        p.one_sided.assign(static_cast<std::size_t>(kernel.radius) + 1, 1.0);
        p.norm_1d = static_cast<double>(2 * kernel.radius + 1);
        return p;
    }
    auto radii = gauss3box_radii(kernel.sigma_s);
    // Convolve the box tap counts exactly in integers, then normalize.
    std::vector<std::int64_t> counts{1};
    std::int64_t denom = 1;
    for (int r : radii) {
        if (r < 1) continue;
        const int w = 2 * r + 1;
        denom *= w;
        std::vector<std::int64_t> next(counts.size() + w - 1, 0);
        for (std::size_t i = 0; i < counts.size(); ++i)
            for (int j = 0; j < w; ++j) next[i + j] += counts[i];
        counts = std::move(next);
    }
    p.radius = static_cast<int>(counts.size() / 2);
    p.one_sided.resize(static_cast<std::size_t>(p.radius) + 1);
    for (int i = 0; i <= p.radius; ++i)
        p.one_sided[i] = static_cast<double>(counts[p.radius + i]) / static_cast<double>(denom);
    double s = p.one_sided[0];
    for (int i = 1; i <= p.radius; ++i) s += 2.0 * p.one_sided[i];
    p.norm_1d = s;
    return p;
}

}  // namespace slhe
