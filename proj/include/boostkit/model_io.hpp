#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "boostkit/booster.hpp"
#include "boostkit/cde.hpp"
#include "boostkit/losses.hpp"

namespace boostkit {

inline constexpr int kModelFormatVersion = 1;

struct Provenance {
  std::uint64_t seed = 0;
  /// Resolved configuration echoed as key=value pairs.
  std::vector<std::pair<std::string, std::string>> config;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct ClassifierFile {
  AdditiveModel model;
  Link link = Link::sigmoid_2f;
  std::size_t dimension = 0;
  Provenance provenance;

  friend bool operator==(const ClassifierFile&, const ClassifierFile&) = default;
};

struct DensityFile {
  ConditionalDensityModel model;
  Provenance provenance;

  friend bool operator==(const DensityFile&, const DensityFile&) = default;
};

using ModelFile = std::variant<ClassifierFile, DensityFile>;

/// Line-oriented text; every real number is written in shortest round-trip
/// decimal form, so reading a file back reproduces each double exactly.
///
///     boostkit-model
///     format_version 1
///     mode classify | cde
///     loss exponential | logistic
///     link sigmoid_2f | sigmoid_f
///     dimension <d>
///     seed <u64>
///     config <key>=<value> ...
///   classify:
///     terms <T>
///     term <round> <alpha> <feature> <threshold> <left> <right>     (T lines)
///   cde:
///     support <lo> <hi>
///     breakpoints <requested_k> <k> <b_1> ... <b_k>
///     classifier <j> <b_j> constant <0|1> terms <T_j>
///     term ...                                                       (T_j lines)
///     ...
///     end
void write_model(const ModelFile& file, std::ostream& out);

/// Throws DataError on malformed input, an unknown format_version, or a
/// classifier without terms.
ModelFile read_model(std::istream& in, const std::string& source = "<stream>");

ModelFile load_model(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames it over `path`.
void save_model(const ModelFile& file, const std::filesystem::path& path);

/// Atomic replace of `path` with `content` (temporary file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace boostkit
