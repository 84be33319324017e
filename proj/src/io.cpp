#include "lexwalk/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "lexwalk/error.hpp"

namespace lexwalk::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": not a number: '" + std::string(field) + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view field, std::size_t line) {
  field = trim(field);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": not an integer: '" + std::string(field) + "'");
  }
  return v;
}

// Data lines with their 1-based line numbers; comments and blanks dropped.
std::vector<std::pair<std::size_t, std::string_view>> data_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    out.emplace_back(line_no, line);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string header_lines(const ArtifactHeader &header) {
  std::string s;
  s += "# tool=lexwalk ";
  s += kToolVersion;
  s += "\n# config_hash=" + header.config_hash + "\n# seed=" + std::to_string(header.seed) + "\n";
  return s;
}

void write_file_atomic(const std::filesystem::path &path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(Errc::IoError, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  while (true) {
    const auto comma = line.find(',');
    fields.emplace_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

std::vector<double> parse_profile_csv(std::string_view text) {
  const auto lines = data_lines(text);
  if (lines.empty() || split_csv_line(lines.front().second) != std::vector<std::string>{"level", "occupancy"}) {
    throw Error(Errc::ParseError, "profile CSV must start with header 'level,occupancy'");
  }
  std::vector<double> occupancies;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto [line_no, line] = lines[i];
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected 2 fields");
    }
    const auto level = parse_int(fields[0], line_no);
    if (level != static_cast<std::int64_t>(occupancies.size()) + 1) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": levels must be 1..M contiguous, got " +
                                        std::to_string(level));
    }
    occupancies.push_back(parse_double(fields[1], line_no));
  }
  return occupancies;
}

std::vector<double> read_profile_csv(const std::filesystem::path &path) {
  return parse_profile_csv(read_file(path));
}

std::string profile_csv(const ZoneProfile &profile) {
  std::string s = "level,occupancy\n";
  for (int m = 1; m <= profile.max_level(); ++m) {
    s += std::to_string(m) + "," + format_double(profile.occupancy(m)) + "\n";
  }
  return s;
}

std::string table_csv(const empirical::EmpiricalAgeTable &table) {
  std::string s = "period,mean_age_years,word_count,words_per_century\n";
  for (const auto &row : table.rows) {
    s += row.period + ",";
    if (row.mean_age_years) s += format_double(*row.mean_age_years);
    s += "," + std::to_string(row.word_count) + ",";
    if (row.words_per_century) s += format_double(*row.words_per_century);
    s += "\n";
  }
  return s;
}

empirical::EmpiricalAgeTable parse_table_csv(std::string_view text) {
  const auto lines = data_lines(text);
  const std::vector<std::string> header{"period", "mean_age_years", "word_count", "words_per_century"};
  if (lines.empty() || split_csv_line(lines.front().second) != header) {
    throw Error(Errc::ParseError, "table CSV must start with header 'period,mean_age_years,word_count,words_per_century'");
  }
  empirical::EmpiricalAgeTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto [line_no, line] = lines[i];
    const auto f = split_csv_line(line);
    if (f.size() != 4) throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected 4 fields");
    empirical::AgeRow row;
    row.period = f[0];
    if (!f[1].empty()) row.mean_age_years = parse_double(f[1], line_no);
    row.word_count = parse_int(f[2], line_no);
    if (!f[3].empty()) row.words_per_century = parse_double(f[3], line_no);
    if (row.word_count < 0) throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": negative word count");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace lexwalk::io
