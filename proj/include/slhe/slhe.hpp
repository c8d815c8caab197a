#pragma once

// Umbrella header for the SLHE tone-mapping library.

#include <slhe/image.hpp>
#include <slhe/pnm.hpp>
#include <slhe/kernels.hpp>
#include <slhe/sigma_field.hpp>
#include <slhe/equalizer.hpp>
#include <slhe/halo_metrics.hpp>
#include <slhe/perception.hpp>
#include <slhe/run_config.hpp>
#include <slhe/reports.hpp>
#include <slhe/bench.hpp>
#include <slhe/synth.hpp>
