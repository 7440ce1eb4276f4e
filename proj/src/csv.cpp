#include "mdi/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

#include "mdi/error.hpp"

namespace mdi::csv {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

double parse_real(std::string_view field, std::size_t line_no, const char* column) {
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    fail(line_no, std::string("column '") + column + "': not a finite real number: '" +
                      std::string(field) + "'");
  return v;
}

std::uint8_t parse_binary(std::string_view field, std::size_t line_no, const char* column) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  fail(line_no, std::string("column '") + column + "': expected 0 or 1, got '" +
                    std::string(field) + "'");
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_dataset(std::ostream& os, const Dataset& data, bool oracle) {
  if (oracle && !data.has_oracle())
    throw InvalidParameter("write_dataset: dataset has no x_full column");
  data.validate();
  os << (oracle ? "z,x_obs,y,x_full,r_x\n" : "z,x_obs,y\n");
  std::string line;
  for (std::size_t i = 0; i < data.n; ++i) {
    line.clear();
    line += data.z[i] ? '1' : '0';
    line += ',';
    if (!data.r_x[i]) line += format_real(data.x_obs[i]);
    line += ',';
    line += format_real(data.y[i]);
    if (oracle) {
      line += ',';
      line += format_real(data.x_full[i]);
      line += ',';
      line += data.r_x[i] ? '1' : '0';
    }
    line += '\n';
    os << line;
  }
  if (!os) throw IoError("write_dataset: stream write failed");
}

Dataset read_dataset(std::istream& is, std::string_view na_token) {
  std::string raw;
  if (!std::getline(is, raw)) throw ParseError("line 1: missing header row");
  if (!raw.empty() && raw.back() == '\r') raw.pop_back();

  constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();
  std::size_t col_z = kAbsent, col_x = kAbsent, col_y = kAbsent;
  std::size_t col_full = kAbsent, col_r = kAbsent;
  const auto header = split_fields(raw);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = header[c];
    if (name == "z") col_z = c;
    else if (name == "x_obs") col_x = c;
    else if (name == "y") col_y = c;
    else if (name == "x_full") col_full = c;
    else if (name == "r_x") col_r = c;
    else fail(1, "unknown column '" + std::string(name) + "'");
  }
  if (col_z == kAbsent || col_x == kAbsent || col_y == kAbsent)
    fail(1, "header must name columns z, x_obs and y");
  if ((col_full == kAbsent) != (col_r == kAbsent))
    fail(1, "oracle columns x_full and r_x must appear together");
  const bool oracle = col_full != kAbsent;

  Dataset d;
  std::size_t line_no = 1;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  while (std::getline(is, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty() && is.peek() == std::char_traits<char>::eof()) break;
    const auto fields = split_fields(raw);
    if (fields.size() != header.size())
      fail(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));

    d.z.push_back(parse_binary(fields[col_z], line_no, "z"));
    d.y.push_back(parse_real(fields[col_y], line_no, "y"));

    const auto x_field = fields[col_x];
    const bool missing = x_field.empty() || (!na_token.empty() && x_field == na_token);
    d.x_obs.push_back(missing ? nan : parse_real(x_field, line_no, "x_obs"));
    d.r_x.push_back(missing ? 1 : 0);

    if (oracle) {
      d.x_full.push_back(parse_real(fields[col_full], line_no, "x_full"));
      const auto r = parse_binary(fields[col_r], line_no, "r_x");
      if (r != (missing ? 1 : 0))
        fail(line_no, "column 'r_x' disagrees with the emptiness of x_obs");
      if (!missing && d.x_full.back() != d.x_obs.back())
        fail(line_no, "column 'x_full' disagrees with x_obs on an observed row");
    }
  }
  d.n = d.z.size();
  d.validate();
  return d;
}

}  // namespace mdi::csv
