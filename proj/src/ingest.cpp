#include "rankstrat/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "rankstrat/errors.hpp"

namespace rankstrat {

void DatasetManifest::validate() const {
  if (year <= 0) throw ConfigError("dataset year must be positive");
  (void)ScoreWeights::from_profile(weight_profile);
}

namespace {

struct CsvLine {
  std::size_t number = 0;
  std::vector<std::string> cells;
};

// RFC-4180 style: quoted cells may contain commas, doubled quotes and newlines.
std::vector<CsvLine> split_csv(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<CsvLine> lines;
  CsvLine current{1, {}};
  std::string cell;
  bool in_quotes = false;
  bool row_has_content = false;
  std::size_t line_no = 1;

  auto end_row = [&] {
    current.cells.push_back(std::move(cell));
    cell.clear();
    if (row_has_content || current.cells.size() > 1 || !current.cells.front().empty()) {
      lines.push_back(std::move(current));
    }
    current = CsvLine{line_no, {}};
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_no;
        cell.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        current.cells.push_back(std::move(cell));
        cell.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        ++line_no;
        end_row();
        break;
      default:
        cell.push_back(c);
    }
  }
  if (in_quotes) throw ParseError(current.number, "unterminated quoted field");
  if (!cell.empty() || !current.cells.empty() || row_has_content) end_row();
  return lines;
}

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return std::string(s);
}

double parse_number(const std::string& raw, std::size_t line, const std::string& column) {
  const std::string text = trim(raw);
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw ParseError(line, "column " + column + ": '" + text + "' is not a number");
  }
  return value;
}

std::optional<double> parse_optional(const std::string& raw, std::size_t line,
                                     const std::string& column) {
  if (trim(raw).empty()) return std::nullopt;
  return parse_number(raw, line, column);
}

const std::vector<std::string>& required_columns() {
  static const std::vector<std::string> kCols{"INSTITUTE_ID", "NAME", "RANK", "TLR",
                                              "RPC",          "GO",   "OI"};
  return kCols;
}

struct Header {
  std::map<std::string, std::size_t> index;
  std::vector<std::pair<std::string, std::size_t>> extras;
};

Header read_header(const CsvLine& line) {
  Header h;
  for (std::size_t i = 0; i < line.cells.size(); ++i) {
    std::string key = canonical_feature(line.cells[i]);
    if (key.empty()) throw SchemaError("empty column name at position " + std::to_string(i + 1));
    if (!h.index.emplace(key, i).second) throw SchemaError("duplicate column '" + key + "'");
  }
  for (const auto& col : required_columns()) {
    if (!h.index.contains(col)) {
      std::string lower = col;
      std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
      throw SchemaError("missing required column '" + lower + "'");
    }
  }
  for (std::size_t i = 0; i < line.cells.size(); ++i) {
    std::string key = canonical_feature(line.cells[i]);
    bool known = key == "PR" || key == "SCORE" ||
                 std::find(required_columns().begin(), required_columns().end(), key) !=
                     required_columns().end();
    if (!known) h.extras.emplace_back(key, i);
  }
  return h;
}

void check_range(const InstituteRecord& r, std::size_t line, const std::string& field, double v) {
  if (v < 0.0 || v > 100.0) {
    std::ostringstream msg;
    msg << "row at line " << line << " ('" << r.institute_id << "'): " << field << " = " << v
        << " outside [0,100]";
    throw DataError(msg.str());
  }
}

std::string format_shortest(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  return out + "\"";
}

std::vector<InstituteRecord> parse_rows(std::string_view csv, int year,
                                        std::vector<std::size_t>* line_numbers) {
  const auto lines = split_csv(csv);
  if (lines.empty()) throw SchemaError("input has no header row");
  const Header header = read_header(lines.front());
  const auto& idx = header.index;
  const auto pr_col = idx.find("PR");
  const auto score_col = idx.find("SCORE");

  std::vector<InstituteRecord> records;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const CsvLine& line = lines[li];
    if (line.cells.size() != lines.front().cells.size()) {
      throw ParseError(line.number, "expected " + std::to_string(lines.front().cells.size()) +
                                        " fields, found " + std::to_string(line.cells.size()));
    }
    auto cell = [&](const std::string& col) -> const std::string& {
      return line.cells[idx.at(col)];
    };
    InstituteRecord r;
    r.institute_id = trim(cell("INSTITUTE_ID"));
    r.name = trim(cell("NAME"));
    r.year = year;
    const double rank = parse_number(cell("RANK"), line.number, "rank");
    if (rank != std::floor(rank) || rank < 1 || rank > 1e9) {
      throw ParseError(line.number, "rank must be a positive integer");
    }
    r.rank = static_cast<int>(rank);
    r.tlr = parse_number(cell("TLR"), line.number, "tlr");
    r.rpc = parse_number(cell("RPC"), line.number, "rpc");
    r.go = parse_number(cell("GO"), line.number, "go");
    r.oi = parse_number(cell("OI"), line.number, "oi");
    if (pr_col != idx.end()) r.pr = parse_optional(line.cells[pr_col->second], line.number, "pr");
    if (score_col != idx.end()) {
      r.reported_score = parse_optional(line.cells[score_col->second], line.number, "score");
    }
    for (const auto& [name, col] : header.extras) {
      r.extras.emplace_back(name, parse_number(line.cells[col], line.number, name));
    }
    records.push_back(std::move(r));
    if (line_numbers) line_numbers->push_back(line.number);
  }
  return records;
}

}  // namespace

std::vector<InstituteRecord> parse_records(std::string_view csv, int year) {
  return parse_rows(csv, year, nullptr);
}

LabeledDataset parse_dataset(const DatasetManifest& manifest, std::string_view csv) {
  manifest.validate();
  std::vector<std::size_t> lines;
  auto records = parse_rows(csv, manifest.year, &lines);
  if (records.empty()) throw EmptyInput("no data rows in " + manifest.path);

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const std::size_t line = lines[i];
    check_range(r, line, "tlr", r.tlr);
    check_range(r, line, "rpc", r.rpc);
    check_range(r, line, "go", r.go);
    check_range(r, line, "oi", r.oi);
    if (r.pr) check_range(r, line, "pr", *r.pr);
    if (r.reported_score) check_range(r, line, "score", *r.reported_score);
    for (const auto& [name, value] : r.extras) check_range(r, line, name, value);
  }
  return LabeledDataset::create(std::move(records), ScoreWeights::from_profile(manifest.weight_profile),
                                manifest.num_classes);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

LabeledDataset load_dataset(const DatasetManifest& manifest) {
  return parse_dataset(manifest, read_file(manifest.path));
}

std::string serialize_dataset(const LabeledDataset& dataset) {
  const auto& records = dataset.records();
  const bool has_pr = std::any_of(records.begin(), records.end(), [](auto& r) { return r.pr.has_value(); });
  const bool has_score =
      std::any_of(records.begin(), records.end(), [](auto& r) { return r.reported_score.has_value(); });
  std::vector<std::string> extra_names;
  if (!records.empty()) {
    for (const auto& [name, v] : records.front().extras) extra_names.push_back(name);
  }

  std::string out = "institute_id,name,rank,tlr,rpc,go,oi";
  if (has_pr) out += ",pr";
  if (has_score) out += ",score";
  for (const auto& name : extra_names) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
    out += "," + lower;
  }
  out += "\n";
  for (const auto& r : records) {
    out += csv_quote(r.institute_id) + "," + csv_quote(r.name) + "," + std::to_string(r.rank);
    for (double v : {r.tlr, r.rpc, r.go, r.oi}) out += "," + format_shortest(v);
    if (has_pr) out += "," + (r.pr ? format_shortest(*r.pr) : std::string());
    if (has_score) out += "," + (r.reported_score ? format_shortest(*r.reported_score) : std::string());
    for (const auto& [name, v] : r.extras) out += "," + format_shortest(v);
    out += "\n";
  }
  return out;
}

ValidationReport validate_records(const std::vector<InstituteRecord>& records,
                                  const ScoreWeights& weights, double tolerance) {
  ValidationReport report;
  report.row_count = records.size();
  report.verifiable =
      std::any_of(records.begin(), records.end(), [](auto& r) { return r.reported_score.has_value(); });

  std::set<int> seen;
  int max_rank = 0;
  for (const auto& r : records) {
    auto range = [&](const std::string& field, double v) {
      if (!(v >= 0.0 && v <= 100.0)) report.range_violations.push_back({r.institute_id, field, v});
    };
    range("tlr", r.tlr);
    range("rpc", r.rpc);
    range("go", r.go);
    range("oi", r.oi);
    if (r.pr) range("pr", *r.pr);
    if (r.reported_score) range("score", *r.reported_score);

    if (!seen.insert(r.rank).second) report.duplicate_ranks.push_back(r.rank);
    max_rank = std::max(max_rank, r.rank);

    if (!r.reported_score) {
      if (report.verifiable) report.unverifiable.push_back(r.institute_id);
      continue;
    }
    if (weights.pr > 0.0 && !r.pr) {
      report.unverifiable.push_back(r.institute_id);
      continue;
    }
    const double recomputed = composite_score(r, weights);
    const double delta = std::abs(*r.reported_score - recomputed);
    // Half-up rounding to two decimals can land exactly on the tolerance.
    if (delta > tolerance + 1e-9) {
      report.score_mismatches.push_back({r.institute_id, *r.reported_score, recomputed, delta});
    }
  }
  for (int rank = 1; rank <= max_rank; ++rank) {
    if (!seen.contains(rank)) report.rank_gaps.push_back(rank);
  }
  return report;
}

ValidationReport validate_scores(const LabeledDataset& dataset, const ScoreWeights& weights,
                                 double tolerance) {
  return validate_records(dataset.records(), weights, tolerance);
}

}  // namespace rankstrat
