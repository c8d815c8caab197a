#pragma once

// Smoothed local histogram equalization. The output at a pixel is the
// kernel-weighted smoothed local CDF evaluated at the pixel's own intensity:
//
//   O(p) = sum_q W(p-q) * Phi_sigma(p)(I(p) - I(q)) / sum_q W(p-q)
//
// with Phi the Gaussian tonal CDF and sigma the per-pixel tonal width in
// level units. equalize_reference computes this directly (the exact oracle,
// O(|window|) per pixel); equalize_binned reproduces it through spatially
// filtered histogram bins at O(bins) per pixel, independent of the window
// radius.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "slhe/detail/parallel.hpp"
#include "slhe/image.hpp"
#include "slhe/kernels.hpp"
#include "slhe/sigma_field.hpp"

namespace slhe {

/// Gaussian tonal kernel CDF: Phi_sigma(d) = (1 + erf(d / (sigma*sqrt(2)))) / 2,
/// d and sigma in level units. Evaluated through erfc for a stable left tail.
inline double tonal_cdf(double d, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("tonal_cdf: sigma must be > 0");
    return 0.5 * std::erfc(-d / (sigma * 1.4142135623730951));
}

struct EqualizerConfig {
    enum class Engine { reference, binned };
    Engine engine = Engine::binned;
    int bin_count = 256;
    int sigma_lut_levels = 16;  // log-spaced tonal CDF rows for the binned engine
    double strength = 1.0;      // output blend: strength*equalized + (1-strength)*input

    void validate() const {
        if (bin_count < 16)
            throw std::invalid_argument("EqualizerConfig: bin_count must be >= 16");
        if (sigma_lut_levels < 1)
            throw std::invalid_argument("EqualizerConfig: sigma_lut_levels must be >= 1");
        if (!(strength >= 0.0 && strength <= 1.0))
            throw std::invalid_argument("EqualizerConfig: strength must be in [0,1]");
    }
};

namespace detail {

inline void require_positive_sigma(const SigmaField& sigmas) {
    for (double s : sigmas.values)
        if (!(s > 0.0)) throw std::invalid_argument("equalize: sigma values must be > 0");
}

}  // namespace detail

/// Brute-force smoothed local equalizer; the oracle the fast engine is
/// checked against.
///
/// Accumulation pairs mirrored taps ((-dx,+dx), then (-dy,+dy)), a fixed
/// per-pixel order, so results are deterministic under row-parallel execution
/// and horizontal/vertical flips commute with the operator bit-exactly.
inline ImagePlane equalize_reference(const ImagePlane& in, const SpatialKernel& kernel,
                                     const SigmaField& sigmas) {
    if (in.width != sigmas.width || in.height != sigmas.height)
        throw std::invalid_argument("equalize_reference: dimension mismatch");
    detail::require_positive_sigma(sigmas);

    const KernelProfile prof = kernel_profile(kernel);
    const int R = prof.radius;
    const double* w = prof.one_sided.data();
    const int width = in.width, height = in.height;

    // Denominator accumulated in the same pair order with Phi == 1, so a
    // constant image divides out to exactly 0.5 for any kernel.
    double rt1 = w[0];
    for (int i = 1; i <= R; ++i) rt1 += w[i] * 2.0;
    double den = w[0] * rt1;
    for (int i = 1; i <= R; ++i) den += w[i] * (rt1 + rt1);

    ImagePlane out(width, height);
    detail::parallel_for(height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < width; ++x) {
                const double sp = in.at(x, y);
                const double lscale =
                    IntensityScale::max_level / (sigmas.at(x, y) * 1.4142135623730951);
                auto phi = [&](int xx, int yy) {
                    return 0.5 * std::erfc((in.at(xx, yy) - sp) * lscale);
                };
                auto row_term = [&](int yy) {
                    double t = w[0] * phi(x, yy);
                    for (int dx = 1; dx <= R; ++dx) {
                        const int xm = std::max(0, x - dx);
                        const int xp = std::min(width - 1, x + dx);
                        t += w[dx] * (phi(xm, yy) + phi(xp, yy));
                    }
                    return t;
                };
                double acc = w[0] * row_term(y);
                for (int dy = 1; dy <= R; ++dy) {
                    const int ym = std::max(0, y - dy);
                    const int yp = std::min(height - 1, y + dy);
                    acc += w[dy] * (row_term(ym) + row_term(yp));
                }
                out.at(x, y) = std::clamp(acc / den, 0.0, 1.0);
            }
        }
    });
    return out;
}

/// Per-pixel spatially smoothed histogram: mass(p,b) is the kernel-weighted
/// fraction of the window whose samples fall in bin b (sum over b is 1), and
/// mean_level(p,b) the kernel-weighted mean level of those samples (0 where
/// the bin holds no mass). Bin centers sit at (b+1/2)/bin_count.
struct BinnedHistogramField {
    int width = 0;
    int height = 0;
    int bin_count = 0;
    std::vector<double> mass;        // bin-major planes, size bin_count*width*height
    std::vector<double> mean_level;  // same layout, level units

    double bin_center(int b) const { return (b + 0.5) / bin_count; }
    double mass_at(int x, int y, int b) const {
        return mass[plane_index(b) + static_cast<std::size_t>(y) * width + x];
    }
    double mean_at(int x, int y, int b) const {
        return mean_level[plane_index(b) + static_cast<std::size_t>(y) * width + x];
    }
    std::size_t plane_index(int b) const {
        return static_cast<std::size_t>(b) * width * height;
    }
};

namespace detail {

inline int bin_index(double sample, int bins) {
    int b = static_cast<int>(sample * bins);
    return std::clamp(b, 0, bins - 1);
}

// Indicator and level-moment planes for one bin.
inline void fill_bin_planes(const ImagePlane& in, const std::vector<int>& bin_of, int b,
                            ImagePlane& ind, ImagePlane& mom) {
    parallel_for(static_cast<int>(in.samples.size()), [&](int i0, int i1) {
        for (int i = i0; i < i1; ++i) {
            const bool hit = bin_of[i] == b;
            ind.samples[i] = hit ? 1.0 : 0.0;
            mom.samples[i] = hit ? in.samples[i] * IntensityScale::max_level : 0.0;
        }
    });
}

// Tabulated tonal CDF: one row per sigma level (log-spaced), each row sampled
// on a 1-level grid of the intensity difference d in [-1024, 1024]. Lookup is
// bilinear: linear in d, then linear between adjacent sigma rows.
class TonalLut {
public:
    static constexpr int kGrid = 2049;

    TonalLut(double sigma_lo, double sigma_hi, int levels)
        : lo_(sigma_lo), hi_(sigma_hi) {
        rows_ = (hi_ - lo_ <= 1e-12) ? 1 : levels;
        sig_.resize(rows_);
        if (rows_ == 1) {
            sig_[0] = lo_;
        } else {
            const double ratio = std::log(hi_ / lo_) / (rows_ - 1);
            for (int k = 0; k < rows_; ++k) sig_[k] = lo_ * std::exp(ratio * k);
            sig_.back() = hi_;
        }
        table_.resize(static_cast<std::size_t>(rows_) * kGrid);
        for (int k = 0; k < rows_; ++k) {
            double* row = &table_[static_cast<std::size_t>(k) * kGrid];
            for (int i = 0; i < kGrid; ++i) row[i] = tonal_cdf(i - 1024.0, sig_[k]);
        }
    }

    int rows() const { return rows_; }

    void locate(double sigma, int& k, double& t) const {
        if (rows_ == 1) {
            k = 0;
            t = 0.0;
            return;
        }
        const double pos = (rows_ - 1) * std::log(sigma / lo_) / std::log(hi_ / lo_);
        k = std::clamp(static_cast<int>(pos), 0, rows_ - 2);
        t = std::clamp((sigma - sig_[k]) / (sig_[k + 1] - sig_[k]), 0.0, 1.0);
    }

    double eval(int k, double t, double d) const {
        const double u = std::clamp(d, -1024.0, 1024.0) + 1024.0;
        int i = std::min(static_cast<int>(u), kGrid - 2);
        const double f = u - i;
        const double* row = &table_[static_cast<std::size_t>(k) * kGrid];
        double v = row[i] + f * (row[i + 1] - row[i]);
        if (t > 0.0) {
            const double* row2 = row + kGrid;
            const double v2 = row2[i] + f * (row2[i + 1] - row2[i]);
            v += t * (v2 - v);
        }
        return v;
    }

private:
    double lo_, hi_;
    int rows_;
    std::vector<double> sig_;
    std::vector<double> table_;
};

// Streams one histogram bin through the box window: a sparse horizontal pass
// over the per-row hit lists of that bin (count and level-sum window rows via
// prefix differences, cost O(width + hits) per row, independent of the
// radius), then a sliding vertical pass fused directly into the tonal-CDF
// accumulation. Counts slide exactly (integers); level sums carry only
// O(eps) drift, far below the engine's agreement budget.
class BinnedBoxAccumulator {
public:
    BinnedBoxAccumulator(const ImagePlane& in, int radius, int bin_count,
                         const std::vector<int>& bin_of, const std::vector<double>& levels,
                         const TonalLut& lut, const std::vector<int>& lut_row,
                         const std::vector<double>& lut_frac)
        : in_(in),
          r_(radius),
          bins_(bin_count),
          bin_of_(bin_of),
          levels_(levels),
          lut_(lut),
          lut_row_(lut_row),
          lut_frac_(lut_frac),
          hs_count_(in.width, in.height),
          hs_level_(in.width, in.height) {
        // CSR layout of pixel positions grouped by (row, bin), with an
        // inclusive per-segment prefix of their level values.
        const int w = in_.width, h = in_.height;
        offsets_.assign(static_cast<std::size_t>(h) * bins_ + 1, 0);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                ++offsets_[static_cast<std::size_t>(y) * bins_ +
                           bin_of_[static_cast<std::size_t>(y) * w + x] + 1];
        for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
        pos_.resize(static_cast<std::size_t>(w) * h);
        cum_.resize(pos_.size());
        std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
        for (int y = 0; y < h; ++y) {
            const std::size_t row = static_cast<std::size_t>(y) * w;
            for (int x = 0; x < w; ++x) {
                const std::size_t seg = static_cast<std::size_t>(y) * bins_ + bin_of_[row + x];
                pos_[cursor[seg]++] = x;
            }
        }
        for (int y = 0; y < h; ++y)
            for (int b = 0; b < bins_; ++b) {
                const std::size_t seg = static_cast<std::size_t>(y) * bins_ + b;
                double acc = 0.0;
                for (int k = offsets_[seg]; k < offsets_[seg + 1]; ++k) {
                    acc += levels_[static_cast<std::size_t>(y) * w + pos_[k]];
                    cum_[k] = acc;
                }
            }
    }

    void accumulate(int bin, ImagePlane& out) {
        horizontal_pass(bin);
        vertical_combine(out);
    }

private:
    // Window count and level sum per output column from the bin's hit list.
    void horizontal_pass(int bin) {
        const int w = in_.width;
        parallel_for(in_.height, [&](int y0, int y1) {
            for (int y = y0; y < y1; ++y) {
                const std::size_t row = static_cast<std::size_t>(y) * w;
                const std::size_t seg = static_cast<std::size_t>(y) * bins_ + bin;
                const int base = offsets_[seg], end = offsets_[seg + 1];
                const bool hit0 = bin_of_[row] == bin;
                const bool hitw = bin_of_[row + w - 1] == bin;
                const double lev0 = hit0 ? levels_[row] : 0.0;
                const double levw = hitw ? levels_[row + w - 1] : 0.0;
                double* hc = &hs_count_.samples[row];
                double* hl = &hs_level_.samples[row];
                int jl = base, jr = base;
                for (int x = 0; x < w; ++x) {
                    while (jr < end && pos_[jr] <= x + r_) ++jr;
                    while (jl < end && pos_[jl] < x - r_) ++jl;
                    double cnt = jr - jl;
                    double sum = jr > jl ? cum_[jr - 1] - (jl > base ? cum_[jl - 1] : 0.0)
                                         : 0.0;
                    // Replicate border: clamped window positions repeat the
                    // row's edge pixels.
                    const int ml = r_ - x, mr = x + r_ - (w - 1);
                    if (ml > 0 && hit0) {
                        cnt += ml;
                        sum += ml * lev0;
                    }
                    if (mr > 0 && hitw) {
                        cnt += mr;
                        sum += mr * levw;
                    }
                    hc[x] = cnt;
                    hl[x] = sum;
                }
            }
        });
    }

    // Sliding vertical window over the horizontal sums, emitting straight
    // into the output accumulation.
    void vertical_combine(ImagePlane& out) {
        const int w = in_.width, h = in_.height;
        const int win = 2 * r_ + 1;
        const double area = static_cast<double>(win) * win;
        const int T = vertical_tile_width(w);
        const int tiles = (w + T - 1) / T;
        auto row_of = [&](const ImagePlane& p, int j) {
            return &p.samples[static_cast<std::size_t>(std::clamp(j, 0, h - 1)) * w];
        };
        parallel_for(tiles, [&](int t0, int t1) {
            std::vector<double> acc_c(T), acc_l(T);
            for (int t = t0; t < t1; ++t) {
                const int x0 = t * T;
                const int n = std::min(T, w - x0);
                {
                    const double* c = row_of(hs_count_, -r_) + x0;
                    const double* l = row_of(hs_level_, -r_) + x0;
                    for (int x = 0; x < n; ++x) acc_c[x] = c[x];
                    for (int x = 0; x < n; ++x) acc_l[x] = l[x];
                }
                for (int j = 1 - r_; j <= r_; ++j) {
                    const double* c = row_of(hs_count_, j) + x0;
                    const double* l = row_of(hs_level_, j) + x0;
                    for (int x = 0; x < n; ++x) acc_c[x] += c[x];
                    for (int x = 0; x < n; ++x) acc_l[x] += l[x];
                }
                for (int y = 0; y < h; ++y) {
                    const std::size_t row = static_cast<std::size_t>(y) * w;
                    for (int x = 0; x < n; ++x) {
                        const double cnt = acc_c[x];
                        if (cnt <= 0.0) continue;
                        const std::size_t i = row + x0 + x;
                        double d = levels_[i] - acc_l[x] / cnt;
                        if (std::abs(d) < 1e-6) d = 0.0;
                        out.samples[i] +=
                            (cnt / area) * lut_.eval(lut_row_[i], lut_frac_[i], d);
                    }
                    if (y + 1 < h) {
                        const double* ci = row_of(hs_count_, y + 1 + r_) + x0;
                        const double* li = row_of(hs_level_, y + 1 + r_) + x0;
                        const double* co = row_of(hs_count_, y - r_) + x0;
                        const double* lo = row_of(hs_level_, y - r_) + x0;
                        for (int x = 0; x < n; ++x) acc_c[x] += ci[x] - co[x];
                        for (int x = 0; x < n; ++x) acc_l[x] += li[x] - lo[x];
                    }
                }
            }
        });
    }

    const ImagePlane& in_;
    const int r_;
    const int bins_;
    const std::vector<int>& bin_of_;
    const std::vector<double>& levels_;
    const TonalLut& lut_;
    const std::vector<int>& lut_row_;
    const std::vector<double>& lut_frac_;
    ImagePlane hs_count_;
    ImagePlane hs_level_;
    std::vector<int> offsets_;
    std::vector<int> pos_;
    std::vector<double> cum_;
};


}  // namespace detail

inline BinnedHistogramField build_histogram_field(const ImagePlane& in,
                                                  const SpatialKernel& kernel, int bin_count) {
    if (bin_count < 16)
        throw std::invalid_argument("build_histogram_field: bin_count must be >= 16");
    BinnedHistogramField f;
    f.width = in.width;
    f.height = in.height;
    f.bin_count = bin_count;
    f.mass.assign(static_cast<std::size_t>(bin_count) * in.samples.size(), 0.0);
    f.mean_level.assign(f.mass.size(), 0.0);

    std::vector<int> bin_of(in.samples.size());
    for (std::size_t i = 0; i < in.samples.size(); ++i)
        bin_of[i] = detail::bin_index(in.samples[i], bin_count);

    ImagePlane ind(in.width, in.height), mom(in.width, in.height);
    for (int b = 0; b < bin_count; ++b) {
        detail::fill_bin_planes(in, bin_of, b, ind, mom);
        ImagePlane h = apply_kernel(ind, kernel);
        ImagePlane m = apply_kernel(mom, kernel);
        double* mass = &f.mass[f.plane_index(b)];
        double* mean = &f.mean_level[f.plane_index(b)];
        for (std::size_t i = 0; i < h.samples.size(); ++i) {
            mass[i] = h.samples[i];
            mean[i] = h.samples[i] > 0.0 ? m.samples[i] / h.samples[i] : 0.0;
        }
    }
    return f;
}

/// Fast engine: per-pixel cost O(bin_count), independent of the kernel
/// radius. Each occupied bin contributes its smoothed mass at the bin's
/// kernel-weighted mean level (first-moment histogram), and the tonal CDF is
/// read from the sigma-interpolated lookup table.
inline ImagePlane equalize_binned(const ImagePlane& in, const SpatialKernel& kernel,
                                  const SigmaField& sigmas, const EqualizerConfig& cfg) {
    if (in.width != sigmas.width || in.height != sigmas.height)
        throw std::invalid_argument("equalize_binned: dimension mismatch");
    cfg.validate();
    detail::require_positive_sigma(sigmas);

    const auto [lo_it, hi_it] = std::minmax_element(sigmas.values.begin(), sigmas.values.end());
    const double sig_lo = *lo_it, sig_hi = *hi_it;
    if (sig_hi - sig_lo > 1e-12 && cfg.sigma_lut_levels < 2)
        throw std::invalid_argument(
            "equalize_binned: sigma_lut_levels must be >= 2 for a non-uniform sigma field");

    const int B = cfg.bin_count;
    const std::size_t n = in.samples.size();
    detail::TonalLut lut(sig_lo, sig_hi, cfg.sigma_lut_levels);

    std::vector<int> bin_of(n);
    std::vector<std::int64_t> occupancy(B, 0);
    std::vector<double> levels(n);
    for (std::size_t i = 0; i < n; ++i) {
        bin_of[i] = detail::bin_index(in.samples[i], B);
        levels[i] = in.samples[i] * IntensityScale::max_level;
        ++occupancy[bin_of[i]];
    }
    std::vector<int> lut_row(n);
    std::vector<double> lut_frac(n);
    for (std::size_t i = 0; i < n; ++i) lut.locate(sigmas.values[i], lut_row[i], lut_frac[i]);

    ImagePlane out(in.width, in.height);
    if (kernel.kind == SpatialKernel::Kind::box) {
        detail::BinnedBoxAccumulator acc(in, kernel.radius, B, bin_of, levels, lut,
                                         lut_row, lut_frac);
        for (int b = 0; b < B; ++b)
            if (occupancy[b] != 0) acc.accumulate(b, out);
    } else {
        ImagePlane ind(in.width, in.height), mom(in.width, in.height);
        for (int b = 0; b < B; ++b) {
            if (occupancy[b] == 0) continue;
            detail::fill_bin_planes(in, bin_of, b, ind, mom);
            ImagePlane h = apply_kernel(ind, kernel);
            ImagePlane m = apply_kernel(mom, kernel);
            detail::parallel_for(static_cast<int>(n), [&](int i0, int i1) {
                for (int i = i0; i < i1; ++i) {
                    const double mass = h.samples[i];
                    if (mass <= 0.0) continue;
                    double d = levels[i] - m.samples[i] / mass;
                    // Sub-microlevel distances are filter rounding noise; snap
                    // them so constant regions hit Phi(0) = 0.5 exactly.
                    if (std::abs(d) < 1e-6) d = 0.0;
                    out.samples[i] += mass * lut.eval(lut_row[i], lut_frac[i], d);
                }
            });
        }
    }
    for (double& v : out.samples) v = std::clamp(v, 0.0, 1.0);
    return out;
}

inline ImagePlane equalize(const ImagePlane& in, const SpatialKernel& kernel,
                           const SigmaField& sigmas, const EqualizerConfig& cfg) {
    return cfg.engine == EqualizerConfig::Engine::reference
               ? equalize_reference(in, kernel, sigmas)
               : equalize_binned(in, kernel, sigmas, cfg);
}

/// End-to-end tone mapping for a luminance plane: local mean, per-pixel
/// sigma, equalization, then the strength blend. The local-mean kernel
/// defaults to the equalizer window; pass mean_kernel to override.
inline ImagePlane tone_map(const ImagePlane& plane, const SpatialKernel& kernel,
                           const SigmaParams& params, const EqualizerConfig& cfg,
                           const std::optional<SpatialKernel>& mean_kernel = {}) {
    params.validate();
    cfg.validate();
    LocalMeanField mean = local_mean(plane, mean_kernel ? *mean_kernel : kernel);
    SigmaField field = build_sigma_field(plane, mean, params);
    ImagePlane eq = equalize(plane, kernel, field, cfg);
    ImagePlane out(plane.width, plane.height);
    const double a = cfg.strength;
    for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i] = a * eq.samples[i] + (1.0 - a) * plane.samples[i];
    return out;
}

/// Color path: tone-map the Rec.709 luminance, then rescale chroma.
inline ColorImage tone_map(const ColorImage& color, const SpatialKernel& kernel,
                           const SigmaParams& params, const EqualizerConfig& cfg,
                           double saturation,
                           const std::optional<SpatialKernel>& mean_kernel = {}) {
    ImagePlane y_old = luminance_of(color);
    ImagePlane y_new = tone_map(y_old, kernel, params, cfg, mean_kernel);
    return reattach_chroma(color, y_old, y_new, saturation);
}

}  // namespace slhe
