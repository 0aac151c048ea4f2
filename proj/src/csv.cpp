#include "qsilo/csv.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace qsilo::io {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_int(long long x) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%lld", x);
  return buf;
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header.size())
    throw std::invalid_argument("csv row width does not match the header");
  rows.push_back(std::move(cells));
}

namespace {

std::string join_cells(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0) line += ',';
    line += cells[k];
  }
  return line;
}

}  // namespace

void write_csv(const std::string& path, const CsvTable& table,
               const std::string& manifest_name,
               const std::vector<std::string>& trailing_comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << join_cells(table.header) << '\n';
  for (const auto& row : table.rows) out << join_cells(row) << '\n';
  for (const auto& comment : trailing_comments) out << "# " << comment << '\n';
  out << "# manifest: " << manifest_name << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

void RunManifest::add_param(const std::string& key, const std::string& value) {
  parameters.emplace_back(key, value);
}

void RunManifest::write(const std::string& path) const {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [key, value] : parameters) params[key] = value;
  doc["parameters"] = params;
  doc["seed"] = seed;
  doc["code_version"] = code_version;
  doc["started_at"] = started_at;
  doc["finished_at"] = finished_at;
  doc["outputs"] = outputs;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm parts{};
  gmtime_r(&now, &parts);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &parts);
  return buf;
}

std::string default_out_dir() {
  const char* env = std::getenv("QSILO_OUT_DIR");
  return (env != nullptr && *env != '\0') ? env : ".";
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  if (dir.back() == '/') return dir + name;
  return dir + "/" + name;
}

}  // namespace qsilo::io
