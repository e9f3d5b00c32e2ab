#pragma once

#include <cstdint>
#include <optional>

#include "qdcascade/cascade.hpp"
#include "qdcascade/events.hpp"
#include "qdcascade/polarization.hpp"

namespace qdc {

/// Monte-Carlo pulse-train run of the cascade against one projection
/// setting: channel 0 sees XX photons behind the proj_xx analyzer, channels
/// 1/2 the two output ports (proj_x / its complement) of the X analyzer.
///
/// Each pulse fires a cascade with probability p_exc; the XX and X emission
/// delays are exponential, and the pair polarization is drawn per event at
/// the actual exciton dwell time (spin flip with 1-e^{-gs tau}, otherwise
/// the coherent state with phase s tau / hbar). Detection applies channel
/// efficiencies, Gaussian jitter and homogeneous Poisson dark counts.
///
/// When source_override is set it replaces the per-event cascade state (the
/// measured-visibility emulation path); timing is unchanged.
///
/// Output is deterministic in (params, setting, duration, seed).
std::array<EventStream, 3> simulate(const CascadeParams& params,
                                    const MeasurementSetting& setting,
                                    double duration_s, std::uint64_t seed,
                                    const std::optional<DensityMatrix4>& source_override = {});

}  // namespace qdc
