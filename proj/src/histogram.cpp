#include "qdcascade/histogram.hpp"

#include <cmath>
#include <stdexcept>

namespace qdc {

std::uint64_t Histogram::total() const {
  std::uint64_t s = 0;
  for (std::uint64_t c : counts) s += c;
  return s;
}

std::uint64_t Histogram::count_at(std::int64_t delay_ps) const {
  const std::int64_t i = (delay_ps - delay_lo()) / bin_width_ps;
  if (delay_ps < delay_lo() || i >= n_bins()) throw std::out_of_range("delay outside window");
  return counts[static_cast<std::size_t>(i)];
}

Histogram cross_correlate(const EventStream& a, const EventStream& b,
                          std::int64_t bin_width_ps, std::int64_t window_ps) {
  if (bin_width_ps <= 0 || window_ps <= 0)
    throw std::invalid_argument("cross_correlate: bin width and window must be positive");
  if (window_ps % bin_width_ps != 0)
    throw std::invalid_argument("cross_correlate: window is not a multiple of the bin width");
  if (!a.is_sorted() || !b.is_sorted())
    throw std::invalid_argument("cross_correlate: unsorted event stream");

  Histogram h;
  h.bin_width_ps = bin_width_ps;
  h.window_ps = window_ps;
  h.counts.assign(static_cast<std::size_t>(window_ps / bin_width_ps), 0);
  const std::int64_t half = window_ps / 2;

  std::size_t lo = 0, hi = 0;
  for (const std::int64_t ta : a.t_ps) {
    while (lo < b.t_ps.size() && b.t_ps[lo] < ta - half) ++lo;
    if (hi < lo) hi = lo;
    while (hi < b.t_ps.size() && b.t_ps[hi] < ta + half) ++hi;
    for (std::size_t j = lo; j < hi; ++j) {
      const std::int64_t off = b.t_ps[j] - ta + half;  // in [0, window)
      ++h.counts[static_cast<std::size_t>(off / bin_width_ps)];
    }
  }
  return h;
}

PeakAreas& PeakAreas::operator+=(const PeakAreas& o) {
  central += o.central;
  side_total += o.side_total;
  side_peaks += o.side_peaks;
  return *this;
}

PeakAreas integrate_areas(const Histogram& h, std::int64_t rep_period_ps, int n_side_peaks) {
  if (rep_period_ps <= 0 || rep_period_ps % h.bin_width_ps != 0)
    throw std::invalid_argument("integrate_areas: rep period is not a multiple of the bin width");
  if (n_side_peaks < 2)
    throw std::invalid_argument("integrate_areas: need at least 2 side peaks");

  const int pos_peaks = (n_side_peaks + 1) / 2;
  const std::int64_t farthest = static_cast<std::int64_t>(pos_peaks) * rep_period_ps;
  if (farthest + rep_period_ps / 2 > h.window_ps / 2)
    throw std::invalid_argument("integrate_areas: window too small for requested side peaks");

  // Sum bins whose center lies in [peak - period/2, peak + period/2);
  // doubled integers keep the edge comparisons exact.
  auto area = [&](std::int64_t peak) {
    std::uint64_t s = 0;
    for (std::int64_t i = 0; i < h.n_bins(); ++i) {
      const std::int64_t c2 = 2 * h.delay_lo() + (2 * i + 1) * h.bin_width_ps;
      if (c2 >= 2 * peak - rep_period_ps && c2 < 2 * peak + rep_period_ps)
        s += h.counts[static_cast<std::size_t>(i)];
    }
    return s;
  };

  PeakAreas out;
  out.central = area(0);
  out.side_peaks = n_side_peaks;
  for (int j = 1; j <= pos_peaks; ++j) out.side_total += area(j * rep_period_ps);
  for (int j = 1; j <= n_side_peaks / 2; ++j) out.side_total += area(-j * rep_period_ps);
  return out;
}

NormalizedCoincidence normalize(const PeakAreas& areas) {
  if (areas.side_total == 0)
    throw std::runtime_error("normalize: no side-peak flux to normalize against");
  const double mean_side = static_cast<double>(areas.side_total) / areas.side_peaks;
  NormalizedCoincidence nc;
  nc.n = static_cast<double>(areas.central) / mean_side;
  const double c_var = static_cast<double>(std::max<std::uint64_t>(areas.central, 1));
  nc.poisson_sigma = std::sqrt(c_var / (mean_side * mean_side) +
                               nc.n * nc.n / static_cast<double>(areas.side_total));
  return nc;
}

NormalizedCoincidence integrate_and_normalize(const Histogram& h, std::int64_t rep_period_ps,
                                              int n_side_peaks) {
  return normalize(integrate_areas(h, rep_period_ps, n_side_peaks));
}

}  // namespace qdc
