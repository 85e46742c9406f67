#pragma once

// JSON (de)serialization for channel models and the row-matrix importer.
//
// File schema:
//   dmmac:       {"kind":"dmmac","alphabets":{"x3":..,"y":..,"z":..},
//                 "gamma_y":[[[[..]]]],"gamma_z":[[[[..]]]]}   ([x1][x2][x3][out])
//   general_mac: {"kind":"general_mac","l_c":..,"l_nc":..,
//                 "covert_alphabet_sizes":[..],"nc_alphabet_sizes":[..],
//                 "alphabets":{"y":..,"z":..},
//                 "gamma_y":[[..]],"gamma_z":[[..]]}           ([input_row][out],
//                 rows in mixed-radix order, covert symbols first)
//   dmic:        {"kind":"dmic","alphabets":{"x3":..,"y1":..,"y2":..,"z":..},
//                 "gamma_y1":..,"gamma_y2":..,"gamma_z":..}    ([x1][x2][x3][out])

#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "covertmac/channel.hpp"

namespace covertmac {

using ChannelVariant = std::variant<Dmmac, GeneralMac, DmicChannel>;

namespace detail {

inline nlohmann::json tensor4(const std::vector<double>& flat, int x3, int out) {
  nlohmann::json jx1 = nlohmann::json::array();
  size_t p = 0;
  for (int a = 0; a < 2; ++a) {
    nlohmann::json jx2 = nlohmann::json::array();
    for (int b = 0; b < 2; ++b) {
      nlohmann::json jx3 = nlohmann::json::array();
      for (int c = 0; c < x3; ++c) {
        nlohmann::json row = nlohmann::json::array();
        for (int o = 0; o < out; ++o) row.push_back(flat[p++]);
        jx3.push_back(std::move(row));
      }
      jx2.push_back(std::move(jx3));
    }
    jx1.push_back(std::move(jx2));
  }
  return jx1;
}

inline std::vector<double> untensor4(const nlohmann::json& j, int x3, int out,
                                     const std::string& name) {
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(4) * x3 * out);
  try {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < x3; ++c) {
          const auto& row = j.at(a).at(b).at(c);
          if (static_cast<int>(row.size()) != out)
            throw ParseError(name + ": output row has wrong length");
          for (int o = 0; o < out; ++o) flat.push_back(row.at(o).get<double>());
        }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(name + ": malformed tensor (" + e.what() + ")");
  }
  return flat;
}

inline nlohmann::json matrix2(const std::vector<double>& flat, int rows, int cols) {
  nlohmann::json m = nlohmann::json::array();
  for (int r = 0; r < rows; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < cols; ++c) row.push_back(flat[static_cast<size_t>(r) * cols + c]);
    m.push_back(std::move(row));
  }
  return m;
}

inline std::vector<double> unmatrix2(const nlohmann::json& j, int rows, int cols,
                                     const std::string& name) {
  if (static_cast<int>(j.size()) != rows)
    throw ParseError(name + ": wrong number of input rows");
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(rows) * cols);
  try {
    for (int r = 0; r < rows; ++r) {
      const auto& row = j.at(r);
      if (static_cast<int>(row.size()) != cols)
        throw ParseError(name + ": output row has wrong length");
      for (int c = 0; c < cols; ++c) flat.push_back(row.at(c).get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(name + ": malformed matrix (" + e.what() + ")");
  }
  return flat;
}

}  // namespace detail

inline nlohmann::json to_json(const Dmmac& ch) {
  nlohmann::json j;
  j["kind"] = "dmmac";
  j["alphabets"] = {{"x3", ch.x3_size()}, {"y", ch.y_size()}, {"z", ch.z_size()}};
  j["gamma_y"] = detail::tensor4(ch.gamma_y(), ch.x3_size(), ch.y_size());
  j["gamma_z"] = detail::tensor4(ch.gamma_z(), ch.x3_size(), ch.z_size());
  return j;
}

inline nlohmann::json to_json(const GeneralMac& ch) {
  int rows = 1;
  for (int s : ch.covert_sizes()) rows *= s;
  rows *= ch.nc_tuple_count();
  nlohmann::json j;
  j["kind"] = "general_mac";
  j["l_c"] = ch.l_c();
  j["l_nc"] = ch.l_nc();
  j["covert_alphabet_sizes"] = ch.covert_sizes();
  j["nc_alphabet_sizes"] = ch.nc_sizes();
  j["alphabets"] = {{"y", ch.y_size()}, {"z", ch.z_size()}};
  j["gamma_y"] = detail::matrix2(ch.gamma_y(), rows, ch.y_size());
  j["gamma_z"] = detail::matrix2(ch.gamma_z(), rows, ch.z_size());
  return j;
}

inline nlohmann::json to_json(const DmicChannel& ch) {
  nlohmann::json j;
  j["kind"] = "dmic";
  j["alphabets"] = {{"x3", ch.x3_size()},
                    {"y1", ch.y1_size()},
                    {"y2", ch.y2_size()},
                    {"z", ch.z_size()}};
  j["gamma_y1"] = detail::tensor4(ch.gamma_y1(), ch.x3_size(), ch.y1_size());
  j["gamma_y2"] = detail::tensor4(ch.gamma_y2(), ch.x3_size(), ch.y2_size());
  j["gamma_z"] = detail::tensor4(ch.gamma_z(), ch.x3_size(), ch.z_size());
  return j;
}

inline nlohmann::json to_json(const ChannelVariant& ch) {
  return std::visit([](const auto& c) { return to_json(c); }, ch);
}

inline ChannelVariant channel_from_json(const nlohmann::json& j) {
  std::string kind;
  try {
    kind = j.at("kind").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("channel file: missing or invalid 'kind'");
  }
  try {
    if (kind == "dmmac") {
      const auto& a = j.at("alphabets");
      int x3 = a.at("x3").get<int>(), y = a.at("y").get<int>(), z = a.at("z").get<int>();
      if (x3 < 1 || y < 1 || z < 1) throw ParseError("dmmac: alphabet sizes must be >= 1");
      return Dmmac(x3, y, z, detail::untensor4(j.at("gamma_y"), x3, y, "gamma_y"),
                   detail::untensor4(j.at("gamma_z"), x3, z, "gamma_z"));
    }
    if (kind == "general_mac") {
      auto cov = j.at("covert_alphabet_sizes").get<std::vector<int>>();
      auto nc = j.at("nc_alphabet_sizes").get<std::vector<int>>();
      if (j.contains("l_c") && j.at("l_c").get<int>() != static_cast<int>(cov.size()))
        throw ParseError("general_mac: l_c disagrees with covert_alphabet_sizes");
      if (j.contains("l_nc") && j.at("l_nc").get<int>() != static_cast<int>(nc.size()))
        throw ParseError("general_mac: l_nc disagrees with nc_alphabet_sizes");
      const auto& a = j.at("alphabets");
      int y = a.at("y").get<int>(), z = a.at("z").get<int>();
      int rows = 1;
      for (int s : cov) rows *= s;
      for (int s : nc) rows *= s;
      return GeneralMac(cov, nc, y, z,
                        detail::unmatrix2(j.at("gamma_y"), rows, y, "gamma_y"),
                        detail::unmatrix2(j.at("gamma_z"), rows, z, "gamma_z"));
    }
    if (kind == "dmic") {
      const auto& a = j.at("alphabets");
      int x3 = a.at("x3").get<int>(), y1 = a.at("y1").get<int>();
      int y2 = a.at("y2").get<int>(), z = a.at("z").get<int>();
      return DmicChannel(x3, y1, y2, z,
                         detail::untensor4(j.at("gamma_y1"), x3, y1, "gamma_y1"),
                         detail::untensor4(j.at("gamma_y2"), x3, y2, "gamma_y2"),
                         detail::untensor4(j.at("gamma_z"), x3, z, "gamma_z"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("channel file (" + kind + "): " + e.what());
  }
  throw ParseError("channel file: unknown kind '" + kind + "'");
}

inline ChannelVariant load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open channel file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("channel file " + path + ": " + e.what());
  }
  return channel_from_json(j);
}

inline void save_channel(const ChannelVariant& ch, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file: " + path);
  out << to_json(ch).dump(2) << '\n';
}

// Importer for the eight-row matrix layout: rows in order
// (0,0,0),(0,0,1),(0,1,0),...,(1,1,1) with x3 binary, i.e. already the
// row-major (x1,x2,x3) order used internally. Generalizes to any x3_size.
inline Dmmac dmmac_from_rows(int x3_size, int y_size, int z_size,
                             const std::vector<std::vector<double>>& y_rows,
                             const std::vector<std::vector<double>>& z_rows) {
  auto flatten = [&](const std::vector<std::vector<double>>& rows, int cols,
                     const char* name) {
    if (rows.size() != static_cast<size_t>(4 * x3_size))
      throw ParseError(std::string(name) + ": expected " +
                       std::to_string(4 * x3_size) + " rows");
    std::vector<double> flat;
    flat.reserve(rows.size() * cols);
    for (const auto& r : rows) {
      if (r.size() != static_cast<size_t>(cols))
        throw ParseError(std::string(name) + ": row has wrong length");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return flat;
  };
  return Dmmac(x3_size, y_size, z_size, flatten(y_rows, y_size, "y rows"),
               flatten(z_rows, z_size, "z rows"));
}

}  // namespace covertmac
