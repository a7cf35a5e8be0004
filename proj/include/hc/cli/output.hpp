#pragma once

// Deterministic JSON and CSV emission: sorted keys, 17 significant digits.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hc/errors.hpp"

namespace hc::cli {

using Json = nlohmann::json;

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void dump(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string pad_close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: keys sorted
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump(it.value(), out, indent, depth + 1);
      }
      out += "\n" + pad_close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], out, indent, depth + 1);
      }
      out += "\n" + pad_close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string to_json_text(const Json& j) {
  std::string out;
  detail::dump(j, out, 2, 0);
  out += "\n";
  return out;
}

/// Plain CSV table; numeric cells are written with 17 significant digits.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values) {
    std::vector<std::string> r;
    r.reserve(values.size());
    for (double v : values) r.push_back(format_double(v));
    rows.push_back(std::move(r));
  }
  void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }

  void write(std::ostream& os) const {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
      os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
  }
};

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInputError("cannot open output file " + path);
  f << text;
}

inline void write_csv_file(const std::string& path, const CsvTable& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInputError("cannot open output file " + path);
  t.write(f);
}

}  // namespace hc::cli
