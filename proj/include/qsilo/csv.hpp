#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qsilo::io {

/** Version string recorded in every manifest. */
inline constexpr char kCodeVersion[] = "1.0.0";

/** Doubles render as %.17g so a reread recovers the exact bits. */
std::string format_double(double x);
std::string format_int(long long x);

/**
 * In-memory CSV built row by row and written in one shot.  Files carry a
 * header line, the data rows, optional trailing comment lines, and a
 * final comment naming the manifest that owns the run, so a reader can
 * always recover the parameters behind a file.
 */
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /** Appends one row; its width must match the header. */
  void add_row(std::vector<std::string> cells);
};

void write_csv(const std::string& path, const CsvTable& table,
               const std::string& manifest_name,
               const std::vector<std::string>& trailing_comments = {});

/**
 * Run record written next to the CSVs.  Parameters keep insertion order.
 * Timestamps live only here, never in the CSVs, so rerunning a command
 * with the same parameters reproduces the data files byte for byte.
 */
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::uint64_t seed = 0;
  std::string code_version = kCodeVersion;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;

  void add_param(const std::string& key, const std::string& value);
  void write(const std::string& path) const;
};

/** Current time in UTC, formatted 2026-01-31T12:00:00Z. */
std::string utc_now();

/** Output directory: $QSILO_OUT_DIR when set and nonempty, else ".". */
std::string default_out_dir();

/** dir + "/" + name, leaving absolute or empty dirs well formed. */
std::string join_path(const std::string& dir, const std::string& name);

}  // namespace qsilo::io
