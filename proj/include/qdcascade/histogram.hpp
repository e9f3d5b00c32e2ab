#pragma once

#include <cstdint>
#include <vector>

#include "qdcascade/events.hpp"

namespace qdc {

/// Delay histogram over a symmetric window. Bin i covers
/// [-window/2 + i*bin, -window/2 + (i+1)*bin); window must divide into bins
/// exactly.
struct Histogram {
  std::int64_t bin_width_ps = 128;
  std::int64_t window_ps = 0;  // full width
  std::vector<std::uint64_t> counts;

  std::int64_t delay_lo() const { return -window_ps / 2; }
  std::int64_t n_bins() const { return static_cast<std::int64_t>(counts.size()); }
  double bin_center(std::int64_t i) const {
    return static_cast<double>(delay_lo()) + (static_cast<double>(i) + 0.5) * bin_width_ps;
  }
  std::uint64_t total() const;
  /// Count in the bin containing the given delay.
  std::uint64_t count_at(std::int64_t delay_ps) const;
};

/// Histogram of delays t_b - t_a over all pairs inside the window; positive
/// delay means a click on `a` followed by one on `b` (XX before X for
/// a = channel 0, b = an X channel). Throws on unsorted streams or a window
/// that is not a multiple of the bin width.
Histogram cross_correlate(const EventStream& a, const EventStream& b,
                          std::int64_t bin_width_ps, std::int64_t window_ps);

/// Raw central/side peak integrals of a histogram: the central window is
/// +-period/2 around zero delay, side windows sit at the first
/// n_side_peaks/2 period multiples on each side (one extra positive peak
/// when odd). Membership is by bin center.
struct PeakAreas {
  std::uint64_t central = 0;
  std::uint64_t side_total = 0;
  int side_peaks = 0;

  PeakAreas& operator+=(const PeakAreas& o);
};

PeakAreas integrate_areas(const Histogram& h, std::int64_t rep_period_ps, int n_side_peaks);

/// Central-peak area normalized by the mean side-peak area (the two-photon
/// flux), with propagated Poisson uncertainty.
struct NormalizedCoincidence {
  double n = 0.0;
  double poisson_sigma = 0.0;
};

NormalizedCoincidence normalize(const PeakAreas& areas);

NormalizedCoincidence integrate_and_normalize(const Histogram& h, std::int64_t rep_period_ps,
                                              int n_side_peaks);

}  // namespace qdc
