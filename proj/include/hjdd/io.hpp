#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "hjdd/error.hpp"
#include "hjdd/grid.hpp"
#include "hjdd/mask.hpp"

namespace hjdd {

/// Shortest decimal text that parses back to the same double; never locale dependent.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw InvalidArgument("malformed number '" + std::string(s) + "'");
  return v;
}

/// Field dump: `nx ny x_min y_min x_max y_max`, then one line of nx values
/// per grid row, rows in increasing j.
inline void write_field(std::ostream& os, const GridSpec& spec, std::span<const double> field) {
  if (field.size() != static_cast<std::size_t>(spec.nx) * spec.ny)
    throw InvalidArgument("field size does not match grid");
  os << spec.nx << ' ' << spec.ny << ' ' << format_double(spec.x_min) << ' '
     << format_double(spec.y_min) << ' ' << format_double(spec.x_max) << ' '
     << format_double(spec.y_max) << '\n';
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) {
      if (i) os << ' ';
      os << format_double(field[static_cast<std::size_t>(j) * spec.nx + i]);
    }
    os << '\n';
  }
}

struct LoadedField {
  GridSpec spec;
  ValueField values;
};

inline LoadedField read_field(std::istream& is) {
  LoadedField out;
  std::string tok;
  auto next = [&]() -> std::string {
    if (!(is >> tok)) throw Error("truncated field dump");
    return tok;
  };
  out.spec.nx = static_cast<int>(parse_double(next()));
  out.spec.ny = static_cast<int>(parse_double(next()));
  out.spec.x_min = parse_double(next());
  out.spec.y_min = parse_double(next());
  out.spec.x_max = parse_double(next());
  out.spec.y_max = parse_double(next());
  out.spec.validate();
  out.values.resize(static_cast<std::size_t>(out.spec.nx) * out.spec.ny);
  for (double& v : out.values) v = parse_double(next());
  return out;
}

inline void save_field(const std::string& path, const GridSpec& spec,
                       std::span<const double> field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_field(os, spec, field);
  if (!os) throw Error("write to '" + path + "' failed");
}

inline LoadedField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path + "'");
  return read_field(is);
}

/// Plain PGM (P2): width nx, height ny, top row is j = ny - 1, members 255.
inline void write_mask_pgm(std::ostream& os, const Grid& grid, const SubdomainMask& mask) {
  if (mask.size() != grid.size()) throw InvalidArgument("mask size does not match grid");
  os << "P2\n" << grid.nx() << ' ' << grid.ny() << "\n255\n";
  for (int j = grid.ny() - 1; j >= 0; --j) {
    for (int i = 0; i < grid.nx(); ++i) {
      if (i) os << ' ';
      os << (mask.contains(grid.index(i, j)) ? "255" : "0");
    }
    os << '\n';
  }
}

inline void export_mask_pgm(const SubdomainMask& mask, const Grid& grid, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_mask_pgm(os, grid, mask);
  if (!os) throw Error("write to '" + path + "' failed");
}

/// One line per mask: part index followed by the member node indices.
inline void write_mask_list(std::ostream& os, std::span<const SubdomainMask> masks) {
  for (const auto& m : masks) {
    os << m.part;
    for (std::size_t k = 0; k < m.size(); ++k)
      if (m.contains(k)) os << ' ' << k;
    os << '\n';
  }
}

inline std::vector<SubdomainMask> read_mask_list(std::istream& is, std::size_t nodes) {
  std::vector<SubdomainMask> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int part = 0;
    if (!(ls >> part)) throw Error("malformed mask list line");
    SubdomainMask m(part, nodes);
    std::size_t k = 0;
    while (ls >> k) {
      if (k >= nodes) throw Error("mask node index out of range");
      m.insert(k);
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace hjdd
