#pragma once

// File outputs: fixed-header tables written as CSV or JSON, JSON documents,
// and a <name>.meta.json sidecar next to every file.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace nvholo {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kBlochConvention =
    "north pole = |-1>; Z = |-1><-1| - |+1><+1|; X = |+1><-1| + |-1><+1|; Y right-handed";

enum class OutputFormat { Csv, Json };
OutputFormat output_format_from_string(const std::string& s);

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  std::string to_csv() const;
  nlohmann::json to_json() const;  // array of objects keyed by column
};

/// Shortest round-trip decimal for doubles, so reruns are byte-identical.
std::string format_cell(const Cell& c);

class OutputWriter {
 public:
  OutputWriter(std::filesystem::path dir, OutputFormat format, std::string config_hash, std::uint64_t seed,
               std::string command);

  /// Writes <name>.csv or <name>.json depending on the format; returns the path.
  std::filesystem::path write_table(const std::string& name, const Table& t, const nlohmann::json& meta = {}) const;
  std::filesystem::path write_json(const std::string& name, const nlohmann::json& doc,
                                   const nlohmann::json& meta = {}) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  void write_meta(const std::filesystem::path& file, const nlohmann::json& extra) const;

  std::filesystem::path dir_;
  OutputFormat format_;
  std::string config_hash_;
  std::uint64_t seed_;
  std::string command_;
};

}  // namespace nvholo
