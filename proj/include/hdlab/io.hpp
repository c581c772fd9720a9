#pragma once

// Lossless serialization helpers: complex matrices as row-major interleaved
// (re, im) arrays in JSON, flattened columns with Name_re_i_j headers in CSV.

#include "hdlab/core.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace hdlab {

using json = nlohmann::json;

inline json mat_to_json(const cmat& a) {
  json arr = json::array();
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      arr.push_back(a(i, j).real());
      arr.push_back(a(i, j).imag());
    }
  return json{{"rows", a.rows()}, {"cols", a.cols()}, {"data", arr}};
}

inline cmat mat_from_json(const json& j) {
  const int r = j.at("rows"), c = j.at("cols");
  const auto& d = j.at("data");
  cmat a(r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k)
      a(i, k) = cplx(d.at(2 * (i * c + k)).get<double>(), d.at(2 * (i * c + k) + 1).get<double>());
  return a;
}

/// 17 significant digits: doubles survive a round trip through text.
inline std::string csv_cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void append_matrix_headers(std::vector<std::string>& cols, const std::string& name, int n) {
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      cols.push_back(name + "_re_" + std::to_string(i) + "_" + std::to_string(j));
      cols.push_back(name + "_im_" + std::to_string(i) + "_" + std::to_string(j));
    }
}

inline void append_matrix_cells(std::vector<std::string>& cells, const cmat& a) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      cells.push_back(csv_cell(a(i, j).real()));
      cells.push_back(csv_cell(a(i, j).imag()));
    }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << "\n";
    }
  }
};

inline void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace hdlab
