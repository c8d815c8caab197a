#pragma once

// Quantitative halo measurement on a vertical step-edge stimulus, plus the
// uniform/adaptive sigma sweep driver. Amplitudes are in level units and are
// measured per side against that side's own far-field plateau.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "slhe/equalizer.hpp"
#include "slhe/image.hpp"
#include "slhe/kernels.hpp"
#include "slhe/sigma_field.hpp"

namespace slhe {

struct StepEdgeSpec {
    int width = 256;
    int height = 256;
    double dark_level = 200.0;    // level units
    double bright_level = 800.0;  // level units
    int edge_column = 128;        // columns < edge_column are dark

    void validate() const {
        if (width < 1 || height < 1)
            throw std::invalid_argument("StepEdgeSpec: dimensions must be >= 1");
        if (!(dark_level >= 0.0 && dark_level < bright_level &&
              bright_level <= IntensityScale::max_level))
            throw std::invalid_argument("StepEdgeSpec: need 0 <= dark < bright <= 1023");
        if (edge_column < 0 || edge_column > width)
            throw std::invalid_argument("StepEdgeSpec: edge_column out of range");
    }
};

inline ImagePlane make_step_edge(const StepEdgeSpec& spec) {
    spec.validate();
    ImagePlane img(spec.width, spec.height);
    const double dark = IntensityScale::from_levels(spec.dark_level);
    const double bright = IntensityScale::from_levels(spec.bright_level);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) img.at(x, y) = x < spec.edge_column ? dark : bright;
    return img;
}

/// Signed halo magnitudes around a known edge. light_amp is the largest
/// overshoot above the bright-side plateau (bright side only), dark_amp the
/// largest undershoot below the dark-side plateau (dark side only); widths
/// count the contiguous columns around the extremum whose deviation exceeds
/// one level. All amplitudes in level units, never negative.
struct HaloReport {
    double light_amp = 0.0;
    double dark_amp = 0.0;
    int light_width = 0;
    int dark_width = 0;
};

namespace detail {

inline double median_of(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
    return 0.5 * (v[mid - 1] + hi);
}

// Maximal run of columns with deviation beyond the 1-level threshold,
// containing the extremal column. sign is +1 for overshoot, -1 for undershoot.
inline int run_width(const std::vector<double>& dev, int extremum, double sign) {
    if (dev.empty() || sign * dev[extremum] <= 1.0) return 0;
    int lo = extremum, hi = extremum;
    while (lo > 0 && sign * dev[lo - 1] > 1.0) --lo;
    while (hi + 1 < static_cast<int>(dev.size()) && sign * dev[hi + 1] > 1.0) ++hi;
    return hi - lo + 1;
}

}  // namespace detail

inline HaloReport measure_halo(const ImagePlane& processed, const StepEdgeSpec& spec) {
    spec.validate();
    if (processed.width != spec.width || processed.height != spec.height)
        throw std::invalid_argument("measure_halo: dimension mismatch");

    std::vector<double> col_mean(processed.width, 0.0);
    for (int x = 0; x < processed.width; ++x) {
        double s = 0.0;
        for (int y = 0; y < processed.height; ++y) s += processed.at(x, y);
        col_mean[x] = IntensityScale::to_levels(s / processed.height);
    }

    // Plateau = median of all samples in the quarter of columns farthest from
    // the edge on that side.
    auto plateau = [&](int col_begin, int col_end) {
        std::vector<double> vals;
        vals.reserve(static_cast<std::size_t>(col_end - col_begin) * processed.height);
        for (int x = col_begin; x < col_end; ++x)
            for (int y = 0; y < processed.height; ++y)
                vals.push_back(IntensityScale::to_levels(processed.at(x, y)));
        return detail::median_of(std::move(vals));
    };

    HaloReport rep;
    const int E = spec.edge_column;
    const int n_dark = E;
    const int n_bright = spec.width - E;

    // Deviations at the arithmetic noise floor (well under a micro-level) are
    // treated as zero, so unprocessed steps report identically zero halos.
    auto denoise = [](std::vector<double>& dev) {
        for (double& d : dev)
            if (std::abs(d) <= 1e-9) d = 0.0;
    };

    if (n_dark > 0) {
        const int q = std::max(1, n_dark / 4);
        const double plat = plateau(0, q);
        std::vector<double> dev(col_mean.begin(), col_mean.begin() + n_dark);
        for (double& d : dev) d -= plat;
        denoise(dev);
        const int imin =
            static_cast<int>(std::min_element(dev.begin(), dev.end()) - dev.begin());
        rep.dark_amp = std::max(0.0, -dev[imin]);
        rep.dark_width = detail::run_width(dev, imin, -1.0);
    }
    if (n_bright > 0) {
        const int q = std::max(1, n_bright / 4);
        const double plat = plateau(spec.width - q, spec.width);
        std::vector<double> dev(col_mean.begin() + E, col_mean.end());
        for (double& d : dev) d -= plat;
        denoise(dev);
        const int imax =
            static_cast<int>(std::max_element(dev.begin(), dev.end()) - dev.begin());
        rep.light_amp = std::max(0.0, dev[imax]);
        rep.light_width = detail::run_width(dev, imax, 1.0);
    }
    return rep;
}

/// One sweep row: either a uniform-sigma run (sigma_lo == sigma_hi) or an
/// adaptive run under the given group policy.
struct SweepRow {
    bool adaptive = false;
    double sigma_lo = 0.0;
    double sigma_hi = 0.0;
    GroupPolicy policy = GroupPolicy::paper;
    HaloReport report;
};

/// Runs the reference engine on the step stimulus once per uniform sigma and,
/// when adaptive params are given, once per group policy with those bounds.
/// Sweeps deliberately use the brute-force engine so binning error never
/// enters the measurements. If outputs is non-null it receives the processed
/// plane of every row, in row order.
inline std::vector<SweepRow> sigma_sweep(const StepEdgeSpec& spec,
                                         const std::vector<double>& sigmas,
                                         const SpatialKernel& kernel,
                                         const std::optional<SigmaParams>& adaptive = {},
                                         std::vector<ImagePlane>* outputs = nullptr) {
    if (sigmas.empty() && !adaptive)
        throw std::invalid_argument("sigma_sweep: need at least one sigma or adaptive params");
    const ImagePlane plane = make_step_edge(spec);
    if (outputs) outputs->clear();

    std::vector<SweepRow> rows;
    auto push_row = [&](SweepRow row, ImagePlane out) {
        row.report = measure_halo(out, spec);
        rows.push_back(row);
        if (outputs) outputs->push_back(std::move(out));
    };

    for (double s : sigmas) {
        SweepRow row;
        row.sigma_lo = row.sigma_hi = s;
        push_row(row, equalize_reference(plane, kernel,
                                         uniform_sigma_field(spec.width, spec.height, s)));
    }
    if (adaptive) {
        const LocalMeanField mean = local_mean(plane, kernel);
        for (GroupPolicy policy : {GroupPolicy::paper, GroupPolicy::swapped}) {
            SigmaParams params = *adaptive;
            params.policy = policy;
            SweepRow row;
            row.adaptive = true;
            row.sigma_lo = params.sigma_min;
            row.sigma_hi = params.sigma_max;
            row.policy = policy;
            push_row(row, equalize_reference(plane, kernel,
                                             build_sigma_field(plane, mean, params)));
        }
    }
    return rows;
}

}  // namespace slhe
