#pragma once

// Deterministic text renderings of sweep and halo measurements. The sweep CSV
// schema is fixed: sigma,policy,light_amp,dark_amp,light_width,dark_width
// with amplitudes printed to three decimals.

#include <cstdio>
#include <string>
#include <vector>

#include "slhe/halo_metrics.hpp"

namespace slhe {

namespace detail {

inline std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline std::string sweep_sigma_label(const SweepRow& row) {
    if (!row.adaptive) return fmt("%g", row.sigma_lo);
    return fmt("%g", row.sigma_lo) + ":" + fmt("%g", row.sigma_hi);
}

inline const char* sweep_policy_label(const SweepRow& row) {
    if (!row.adaptive) return "uniform";
    return row.policy == GroupPolicy::paper ? "paper" : "swapped";
}

inline std::string halo_row(const HaloReport& r) {
    return fmt("%.3f", r.light_amp) + "," + fmt("%.3f", r.dark_amp) + "," +
           std::to_string(r.light_width) + "," + std::to_string(r.dark_width);
}

}  // namespace detail

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "sigma,policy,light_amp,dark_amp,light_width,dark_width\n";
    for (const SweepRow& row : rows)
        out += detail::sweep_sigma_label(row) + "," + detail::sweep_policy_label(row) + "," +
               detail::halo_row(row.report) + "\n";
    return out;
}

inline std::string halo_csv(const std::vector<std::pair<std::string, HaloReport>>& entries) {
    std::string out = "image,light_amp,dark_amp,light_width,dark_width\n";
    for (const auto& [name, report] : entries)
        out += name + "," + detail::halo_row(report) + "\n";
    return out;
}

}  // namespace slhe
