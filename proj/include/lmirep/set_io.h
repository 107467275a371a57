#pragma once

// On-disk formats.
//
// Set files (".sas") are line oriented:
//
//   # the unit disk
//   vars 2
//   set disk:
//   ineq 1 - x1^2 - x2^2
//
// `set <name>:` opens a new block of the union; constraint lines before the
// first `set` line go to an implicit block named "main".
//
// Representation files are JSON documents carrying dense symmetric matrices
// as lower triangles in row-major order plus a format version.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

#include "lmirep/sets.h"

namespace lmirep {

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Missing or unreadable files (distinct from malformed content).
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kRepFormatVersion = 1;

UnionSet parse_set(std::string_view text);
UnionSet read_set(const std::filesystem::path& path);
std::string format_set(const UnionSet& s);

nlohmann::json rep_to_json(const LiftedRepresentation& rep);
LiftedRepresentation rep_from_json(const nlohmann::json& j);

void write_rep(const LiftedRepresentation& rep, const std::filesystem::path& path);
LiftedRepresentation read_rep(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace lmirep
