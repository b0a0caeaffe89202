#include "fpld/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "fpld/error.hpp"
#include "fpld/numeric.hpp"

namespace fpld {

using ojson = nlohmann::ordered_json;

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw ValidationError("table row has wrong width");
  rows.push_back(std::move(row));
}

std::string cell(double x) { return format_double(x); }
std::string cell(long x) { return std::to_string(x); }
std::string cell(int x) { return std::to_string(x); }
std::string cell(std::size_t x) { return std::to_string(x); }
std::string cell(bool x) { return x ? "true" : "false"; }

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ojson json_cell(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  if (s == "nan" || s == "-nan" || s == "inf" || s == "-inf") return nullptr;
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (!s.empty() && res.ec == std::errc() && res.ptr == end) {
    long long iv = 0;
    const auto ri = std::from_chars(s.data(), end, iv);
    if (ri.ec == std::errc() && ri.ptr == end) return iv;
    return v;
  }
  return s;
}

}  // namespace

std::string to_csv(const Table& t, const std::string& hash) {
  std::string out;
  if (!hash.empty()) out += "# manifest_hash=" + hash + "\n";
  for (const auto& [k, v] : t.notes) out += "# " + k + "=" + v + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_field(t.columns[i]);
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
    out += "\n";
  }
  return out;
}

std::string to_json(const Table& t, const std::string& hash) {
  ojson j;
  if (!hash.empty()) j["manifest_hash"] = hash;
  if (!t.notes.empty()) {
    ojson notes = ojson::object();
    for (const auto& [k, v] : t.notes) notes[k] = json_cell(v);
    j["notes"] = std::move(notes);
  }
  j["columns"] = t.columns;
  ojson rows = ojson::array();
  for (const auto& row : t.rows) {
    ojson r = ojson::array();
    for (const auto& c : row) r.push_back(json_cell(c));
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[x & 0xF];
    x >>= 4;
  }
  return s;
}

namespace {

ojson manifest_object(const Manifest& m) {
  ojson j;
  j["version"] = kVersionString;
  j["subcommand"] = m.subcommand;
  if (!m.model_json.empty()) j["model"] = ojson::parse(m.model_json);
  if (m.has_seed) j["seed"] = m.seed;
  ojson p = ojson::object();
  for (const auto& [k, v] : m.params) p[k] = json_cell(v);
  j["params"] = std::move(p);
  return j;
}

}  // namespace

std::string Manifest::canonical_json() const { return manifest_object(*this).dump(); }

std::string Manifest::hash() const { return hex64(fnv1a64(canonical_json())); }

std::string Manifest::to_json() const {
  ojson j = manifest_object(*this);
  j["manifest_hash"] = hash();
  return j.dump(2) + "\n";
}

std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("FPLD_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return {};
}

OutputFiles write_outputs(const std::string& dir, const Manifest& manifest, const Table& table, bool json_format) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir + ": " + ec.message());
  const std::string hash = manifest.hash();
  const fs::path base = fs::path(dir) / (manifest.subcommand + "-" + hash);
  OutputFiles out;
  out.data_path = base.string() + (json_format ? ".json" : ".csv");
  out.manifest_path = base.string() + ".manifest.json";
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write " + path);
    f << text;
  };
  write(out.data_path, json_format ? to_json(table, hash) : to_csv(table, hash));
  write(out.manifest_path, manifest.to_json());
  return out;
}

Table pmf_table(const OverlapDistribution& dist) {
  if (dist.mode() != OverlapMode::exact_pmf) throw ValidationError("pmf export needs an exact pmf");
  Table t;
  t.columns = {"atom", "log_prob"};
  for (std::size_t i = 0; i < dist.atoms().size(); ++i) t.add_row({cell(dist.atoms()[i]), cell(dist.log_probs()[i])});
  return t;
}

Table quantile_table(const std::vector<double>& D, const std::vector<double>& q) {
  if (D.size() != q.size()) throw ValidationError("quantile columns differ in length");
  Table t;
  t.columns = {"D", "q_of_D"};
  for (std::size_t i = 0; i < D.size(); ++i) t.add_row({cell(D[i]), cell(q[i])});
  return t;
}

Table fp_curve_table(const FpCurve& curve) {
  Table t;
  t.columns = {"q", "F_ann", "derivative_or_diff", "sign"};
  for (const auto& p : curve.points) t.add_row({cell(p.q), cell(p.f_ann), cell(p.derivative), cell(p.sign)});
  return t;
}

Table cumulant_table(const CumulantTable& table) {
  Table t;
  t.columns = {"alpha", "kappa", "kappa_squared_over_factorial"};
  for (std::size_t i = 0; i < table.alphas.size(); ++i) {
    const double k = table.kappa[i];
    t.add_row({table.alphas[i].to_pairs(), cell(k), cell(k * k / table.alphas[i].factorial())});
  }
  return t;
}

std::string quenched_json(const std::vector<QuenchedEstimate>& estimates) {
  ojson arr = ojson::array();
  for (const auto& e : estimates) {
    ojson j;
    j["amplitude"] = e.amplitude;
    j["q_prime"] = e.q_prime;
    j["q"] = e.q;
    j["f_mean"] = e.f_mean;
    j["stderr"] = e.stderr_;
    j["diff_mean"] = e.diff_mean;
    j["diff_stderr"] = e.diff_stderr;
    j["replicas"] = e.replicas;
    j["inner_size"] = e.inner_size;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace fpld
