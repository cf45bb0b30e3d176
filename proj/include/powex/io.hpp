#pragma once

// Table emission shared by the CLI and the golden tests. Numbers serialize
// with 17 significant digits via to_chars: locale-independent, '.' decimal
// separator, binary64 round-trip exact.

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

namespace powex {

inline std::string format_g17(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  void write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) os << ',';
      os << header[i];
    }
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        os << row[i];
      }
      os << '\n';
    }
  }

  void write_json(std::ostream& os) const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t i = 0; i < header.size() && i < row.size(); ++i) obj[header[i]] = row[i];
      arr.push_back(obj);
    }
    os << arr.dump(2) << '\n';
  }

  void write(std::ostream& os, const std::string& format) const {
    if (format == "json")
      write_json(os);
    else
      write_csv(os);
  }
};

} // namespace powex
