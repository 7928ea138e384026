#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xrank {

// Malformed input content (bad TSV, unparseable numbers, duplicate ids).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or unwritable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a data contract (dangling uids, unknown
// qids, empty relevant sets).
class ContentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Collects non-fatal warnings. Functions accept a nullable pointer; a null
// sink drops warnings.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

inline void warn(Diagnostics* diag, std::string message) {
  if (diag != nullptr) diag->warn(std::move(message));
}

namespace tsv {

std::vector<std::string> split(std::string_view line, char sep = '\t');

// Reads all lines of a file, stripping trailing '\r'. Throws IoError.
std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes text atomically enough for our purposes: whole buffer, one open.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace tsv

std::string trim(std::string_view s);

// Trims and collapses internal whitespace runs to one space.
std::string normalize_space(std::string_view s);

std::string to_upper(std::string_view s);

// Shortest round-trippable decimal representation.
std::string format_double(double value);

// Parses a finite or non-finite double; the whole field must be consumed.
bool parse_double(std::string_view s, double& out);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index is visited
// exactly once; fn must not touch shared mutable state.
void parallel_for(std::size_t n, unsigned jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace xrank
