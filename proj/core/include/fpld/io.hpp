#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fpld/cumulants.hpp"
#include "fpld/fp.hpp"
#include "fpld/overlap.hpp"

namespace fpld {

inline constexpr const char* kVersionString = "fpld 0.1.0";

/// Column table with cells already rendered as text.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  /// Summary values emitted as "# key=value" lines (CSV) or a "notes" object.
  std::vector<std::pair<std::string, std::string>> notes;

  void add_row(std::vector<std::string> row);
};

std::string cell(double x);
std::string cell(long x);
std::string cell(int x);
std::string cell(std::size_t x);
std::string cell(bool x);

/// CSV text; the first line is "# manifest_hash=<hash>" when a hash is given.
std::string to_csv(const Table& table, const std::string& manifest_hash = {});
/// {"manifest_hash": ..., "columns": [...], "rows": [[...], ...]} with numeric
/// cells emitted as numbers.
std::string to_json(const Table& table, const std::string& manifest_hash = {});

/// Run description hashed into output file names.
struct Manifest {
  std::string subcommand;
  std::string model_json;  ///< empty when the run has no model
  std::uint64_t seed = 0;
  bool has_seed = false;
  /// Remaining configuration as (key, rendered value) pairs, kept in order.
  std::vector<std::pair<std::string, std::string>> params;

  /// JSON without the hash field; input to the hash.
  std::string canonical_json() const;
  /// 16 hex digits of FNV-1a over canonical_json().
  std::string hash() const;
  /// canonical fields plus "manifest_hash".
  std::string to_json() const;
};

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t x);

/// --out-dir flag when non-empty, else $FPLD_OUT_DIR, else empty (no files).
std::string resolve_out_dir(const std::string& flag_value);

struct OutputFiles {
  std::string data_path;
  std::string manifest_path;
};

/// Writes <dir>/<subcommand>-<hash>.{csv|json} and .manifest.json.
OutputFiles write_outputs(const std::string& dir, const Manifest& manifest, const Table& table, bool json_format);

Table pmf_table(const OverlapDistribution& dist);
Table quantile_table(const std::vector<double>& D, const std::vector<double>& q);
Table fp_curve_table(const FpCurve& curve);
Table cumulant_table(const CumulantTable& table);
std::string quenched_json(const std::vector<QuenchedEstimate>& estimates);

}  // namespace fpld
