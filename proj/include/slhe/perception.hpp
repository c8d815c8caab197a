#pragma once

// Lateral-inhibition model of perceived luminance: a center-surround
// difference-of-Gaussians response added on top of the stimulus. With unit
// surround gain the DoG term has zero DC gain, so uniform fields are fixed
// points and the operator responds only to local structure (Mach bands).

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "slhe/halo_metrics.hpp"
#include "slhe/image.hpp"
#include "slhe/kernels.hpp"

namespace slhe {

struct DoGParams {
    double sigma_center = 1.0;    // pixels
    double sigma_surround = 3.0;  // pixels, > sigma_center
    double surround_gain = 1.0;   // k in (0,1]
    double response_gain = 1.0;   // lambda >= 0

    void validate() const {
        if (!(sigma_center > 0.0))
            throw std::invalid_argument("DoGParams: sigma_center must be > 0");
        if (!(sigma_surround > sigma_center))
            throw std::invalid_argument("DoGParams: sigma_surround must exceed sigma_center");
        if (!(surround_gain > 0.0 && surround_gain <= 1.0))
            throw std::invalid_argument("DoGParams: surround_gain must be in (0,1]");
        if (!(response_gain >= 0.0))
            throw std::invalid_argument("DoGParams: response_gain must be >= 0");
    }
};

/// P = clamp(I + lambda * (G_center*I - k * G_surround*I), 0, 1)
inline ImagePlane perceived_luminance(const ImagePlane& in, const DoGParams& params) {
    params.validate();
    if (params.response_gain == 0.0) return in;
    ImagePlane center = gauss3box_filter(in, params.sigma_center);
    ImagePlane surround = gauss3box_filter(in, params.sigma_surround);
    ImagePlane out(in.width, in.height);
    for (std::size_t i = 0; i < in.samples.size(); ++i) {
        const double dog = center.samples[i] - params.surround_gain * surround.samples[i];
        out.samples[i] = std::clamp(in.samples[i] + params.response_gain * dog, 0.0, 1.0);
    }
    return out;
}

/// The stacked lateral-inhibition comparison: halo reports of the perceived
/// original vs the perceived processed image. Physical halos in the processed
/// image compound with the viewer's own center-surround response, so its
/// perceived halos exceed the original's.
inline std::pair<HaloReport, HaloReport> stacked_li_report(const ImagePlane& original,
                                                           const ImagePlane& processed,
                                                           const StepEdgeSpec& spec,
                                                           const DoGParams& dog) {
    if (!original.same_size(processed))
        throw std::invalid_argument("stacked_li_report: dimension mismatch");
    return {measure_halo(perceived_luminance(original, dog), spec),
            measure_halo(perceived_luminance(processed, dog), spec)};
}

}  // namespace slhe
