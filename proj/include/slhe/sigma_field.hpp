#pragma once

// Luminance-group classification and the per-pixel tonal sigma map. A pixel
// at or above its local mean belongs to the light group and gets the fixed
// small sigma; below the mean, sigma grows linearly with the normalized
// distance to the mean, reaching sigma_max at zero intensity. The swapped
// policy mirrors the rule about the mean.

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "slhe/image.hpp"
#include "slhe/kernels.hpp"

namespace slhe {

enum class LuminanceGroup { light, dark };
enum class GroupPolicy { paper, swapped };

struct SigmaParams {
    double sigma_min = 64.0;   // level units, light-group sigma under the paper policy
    double sigma_max = 256.0;  // level units
    GroupPolicy policy = GroupPolicy::paper;

    void validate() const {
        if (!(sigma_min > 0.0))
            throw std::invalid_argument("SigmaParams: sigma_min must be > 0");
        if (sigma_max < sigma_min)
            throw std::invalid_argument("SigmaParams: sigma_max must be >= sigma_min");
        if (sigma_max > IntensityScale::max_level)
            throw std::invalid_argument("SigmaParams: sigma_max must be <= 1023 levels");
    }
};

/// Per-pixel tonal sigma in level units.
struct SigmaField {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    SigmaField() = default;
    SigmaField(int w, int h, double fill = 0.0) : width(w), height(h) {
        if (w < 1 || h < 1)
            throw std::invalid_argument("SigmaField: width and height must be >= 1");
        values.assign(static_cast<std::size_t>(w) * h, fill);
    }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Ties go to the light group; this also keeps l_mean = 0 away from the
/// dark-group division.
inline LuminanceGroup classify_group(double p_in, double l_mean) {
    return p_in >= l_mean ? LuminanceGroup::light : LuminanceGroup::dark;
}

inline double sigma_at(double p_in, double l_mean, const SigmaParams& params) {
    const double span = params.sigma_max - params.sigma_min;
    const bool light = classify_group(p_in, l_mean) == LuminanceGroup::light;
    if (params.policy == GroupPolicy::paper) {
        if (light) return params.sigma_min;
        return span * (l_mean - p_in) / l_mean + params.sigma_min;
    }
    // swapped: dark group takes the fixed sigma, light group the ramp.
    if (!light) return params.sigma_min;
    if (l_mean >= 1.0) return params.sigma_min;
    return span * (p_in - l_mean) / (1.0 - l_mean) + params.sigma_min;
}

inline SigmaField build_sigma_field(const ImagePlane& plane, const LocalMeanField& mean,
                                    const SigmaParams& params) {
    params.validate();
    if (!plane.same_size(mean))
        throw std::invalid_argument("build_sigma_field: dimension mismatch");
    SigmaField field(plane.width, plane.height);
    for (std::size_t i = 0; i < plane.samples.size(); ++i)
        field.values[i] = sigma_at(plane.samples[i], mean.samples[i], params);
    return field;
}

inline SigmaField uniform_sigma_field(int width, int height, double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("uniform_sigma_field: sigma must be > 0");
    return SigmaField(width, height, sigma);
}

}  // namespace slhe
