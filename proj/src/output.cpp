#include "nvholo/output.hpp"

#include <fmt/format.h>

#include <fstream>
#include <stdexcept>

namespace nvholo {

namespace {

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

}  // namespace

OutputFormat output_format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw std::invalid_argument("format must be csv or json");
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("row width differs from header");
  rows.push_back(std::move(row));
}

std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return fmt::format("{}", *d);
  if (const auto* i = std::get_if<long long>(&c)) return fmt::format("{}", *i);
  return std::get<std::string>(c);
}

std::string Table::to_csv() const {
  std::string out = fmt::format("{}\n", fmt::join(columns, ","));
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) out += ',';
      out += format_cell(r[k]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json Table::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json o = nlohmann::json::object();
    for (std::size_t k = 0; k < r.size(); ++k) std::visit([&](const auto& v) { o[columns[k]] = v; }, r[k]);
    arr.push_back(o);
  }
  return arr;
}

OutputWriter::OutputWriter(std::filesystem::path dir, OutputFormat format, std::string config_hash,
                           std::uint64_t seed, std::string command)
    : dir_(std::move(dir)), format_(format), config_hash_(std::move(config_hash)), seed_(seed),
      command_(std::move(command)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path OutputWriter::write_table(const std::string& name, const Table& t,
                                                const nlohmann::json& meta) const {
  std::filesystem::path p;
  if (format_ == OutputFormat::Csv) {
    p = dir_ / (name + ".csv");
    write_file(p, t.to_csv());
  } else {
    p = dir_ / (name + ".json");
    write_file(p, nlohmann::json{{"columns", t.columns}, {"rows", t.to_json()}}.dump(2) + "\n");
  }
  nlohmann::json extra = meta.is_null() ? nlohmann::json::object() : meta;
  extra["columns"] = t.columns;
  write_meta(p, extra);
  return p;
}

std::filesystem::path OutputWriter::write_json(const std::string& name, const nlohmann::json& doc,
                                               const nlohmann::json& meta) const {
  const std::filesystem::path p = dir_ / (name + ".json");
  write_file(p, doc.dump(2) + "\n");
  write_meta(p, meta.is_null() ? nlohmann::json::object() : meta);
  return p;
}

void OutputWriter::write_meta(const std::filesystem::path& file, const nlohmann::json& extra) const {
  nlohmann::json m = {{"file", file.filename().string()},
                      {"command", command_},
                      {"config_hash", config_hash_},
                      {"seed", seed_},
                      {"tool_version", kToolVersion},
                      {"bloch_convention", kBlochConvention}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  const std::filesystem::path meta = file.parent_path() / (file.stem().string() + ".meta.json");
  write_file(meta, m.dump(2) + "\n");
}

}  // namespace nvholo
