#pragma once
// Output plumbing: round-trip number formatting, atomic file writes, CSV
// tables, key=value metadata sidecars and skeleton CSV.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pdmp/engine.hpp"

namespace pdmp {

/// Shortest form that parses back to the same double, at most 17 significant digits.
std::string format_double(double x);

/// Write to a temporary sibling and rename over path.
void atomic_write(const std::filesystem::path& path, const std::string& content);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> cells);
  void add_row(const std::vector<double>& values);
  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Ordered key=value sidecar.
class Metadata {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value) { set(key, format_double(value)); }
  void set_vector(const std::string& key, const std::vector<double>& values);
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
  std::string str() const;

  static std::map<std::string, std::string> parse(std::istream& in);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Columns time, channel_id, x1..xN, v1..vN; one row per event.
std::string skeleton_csv(const EventSkeleton& skeleton);
void write_skeleton_csv(const std::filesystem::path& path, const EventSkeleton& skeleton);

/// Events from a skeleton CSV. Initial state and t_end live in the metadata.
std::vector<Event> read_skeleton_csv(std::istream& in);

}  // namespace pdmp
