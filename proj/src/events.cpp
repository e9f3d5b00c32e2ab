#include "qdcascade/events.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string>

namespace qdc {

bool EventStream::is_sorted() const {
  return std::is_sorted(t_ps.begin(), t_ps.end());
}

void save_streams(const std::filesystem::path& p, std::span<const EventStream> streams) {
  std::vector<std::pair<std::int64_t, int>> merged;
  std::size_t total = 0;
  for (const auto& s : streams) total += s.t_ps.size();
  merged.reserve(total);
  for (const auto& s : streams)
    for (std::int64_t t : s.t_ps) merged.emplace_back(t, s.channel);
  std::sort(merged.begin(), merged.end());

  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  for (const auto& [t, ch] : merged) f << ch << '\t' << t << '\n';
}

std::array<EventStream, 3> load_streams3(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  std::array<EventStream, 3> out;
  for (int i = 0; i < 3; ++i) out[i].channel = i;

  std::string line;
  std::int64_t prev_t = std::numeric_limits<std::int64_t>::min();
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error(p.string() + ":" + std::to_string(lineno) + ": expected channel<TAB>t_ps");
    int ch = -1;
    std::int64_t t = 0;
    const char* b = line.data();
    auto r1 = std::from_chars(b, b + tab, ch);
    auto r2 = std::from_chars(b + tab + 1, b + line.size(), t);
    if (r1.ec != std::errc{} || r1.ptr != b + tab || r2.ec != std::errc{} ||
        r2.ptr != b + line.size())
      throw std::runtime_error(p.string() + ":" + std::to_string(lineno) + ": malformed record");
    if (ch < 0 || ch > 2)
      throw std::runtime_error(p.string() + ":" + std::to_string(lineno) + ": channel outside {0,1,2}");
    if (t < prev_t)
      throw std::runtime_error(p.string() + ":" + std::to_string(lineno) + ": timestamps out of order");
    prev_t = t;
    out[ch].t_ps.push_back(t);
  }
  return out;
}

}  // namespace qdc
