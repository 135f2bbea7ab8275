#include <istream>
#include <sstream>

#include "pdmp/errors.hpp"
#include "pdmp/io.hpp"

namespace pdmp {

std::string skeleton_csv(const EventSkeleton& skeleton) {
  const std::size_t n = skeleton.initial.size();
  std::string out = "time,channel_id";
  for (std::size_t i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (std::size_t i = 1; i <= n; ++i) out += ",v" + std::to_string(i);
  out += '\n';
  for (const Event& e : skeleton.events) {
    out += format_double(e.t);
    out += ',';
    out += std::to_string(e.channel);
    for (double xi : e.after.x) (out += ',') += format_double(xi);
    for (double vi : e.after.v) (out += ',') += format_double(vi);
    out += '\n';
  }
  return out;
}

void write_skeleton_csv(const std::filesystem::path& path, const EventSkeleton& skeleton) {
  atomic_write(path, skeleton_csv(skeleton));
}

std::vector<Event> read_skeleton_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("skeleton CSV is empty");
  std::size_t cols = 1;
  for (char c : line) cols += c == ',';
  if (cols < 4 || (cols - 2) % 2 != 0) throw InvalidArgument("skeleton CSV header has an unexpected shape");
  const std::size_t n = (cols - 2) / 2;
  std::vector<Event> events;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != cols) throw InvalidArgument("skeleton CSV row has " + std::to_string(cells.size()) + " cells");
    Event e;
    e.t = std::stod(cells[0]);
    e.channel = std::stoull(cells[1]);
    e.after.t = e.t;
    e.after.x.resize(n);
    e.after.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      e.after.x[i] = std::stod(cells[2 + i]);
      e.after.v[i] = std::stod(cells[2 + n + i]);
    }
    events.push_back(std::move(e));
  }
  return events;
}

}  // namespace pdmp
