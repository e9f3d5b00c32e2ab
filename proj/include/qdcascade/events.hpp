#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace qdc {

/// Timestamped clicks of one detector channel, picoseconds, nondecreasing.
/// Channels: 0 = XX detector, 1 = X co-port, 2 = X cross-port.
struct EventStream {
  int channel = 0;
  std::vector<std::int64_t> t_ps;

  bool is_sorted() const;
};

/// Writes streams merged into one "channel<TAB>t_ps" file ordered by time
/// (ties broken by channel). No header.
void save_streams(const std::filesystem::path& p, std::span<const EventStream> streams);

/// Reads a three-channel stream file written by save_streams. Throws on
/// malformed lines, channels outside {0,1,2} or out-of-order timestamps.
std::array<EventStream, 3> load_streams3(const std::filesystem::path& p);

}  // namespace qdc
