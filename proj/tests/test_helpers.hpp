#pragma once

// Shared generators for the test suite: strictly positive random channels
// (so the regularity conditions hold almost surely) and the bundled example
// channel.

#include <fstream>
#include <random>
#include <vector>

#include "covertmac/covertmac.hpp"

namespace testutil {

inline std::vector<double> random_pmf(std::mt19937_64& rng, int k,
                                      double floor = 0.02) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> v(k);
  double s = 0.0;
  for (double& x : v) {
    x = ex(rng) + floor;
    s += x;
  }
  for (double& x : v) x /= s;
  return v;
}

inline covertmac::Dmmac random_dmmac(std::mt19937_64& rng, int x3_size = 2,
                                     int y_size = 4, int z_size = 4,
                                     double floor = 0.02) {
  std::vector<double> gy, gz;
  for (int r = 0; r < 4 * x3_size; ++r) {
    auto ry = random_pmf(rng, y_size, floor);
    auto rz = random_pmf(rng, z_size, floor);
    gy.insert(gy.end(), ry.begin(), ry.end());
    gz.insert(gz.end(), rz.begin(), rz.end());
  }
  return covertmac::Dmmac(x3_size, y_size, z_size, std::move(gy), std::move(gz));
}

// Channel where only x1 matters: users 2 and 3 are inert, so the single-user
// reduction applies exactly.
inline covertmac::Dmmac random_inert_dmmac(std::mt19937_64& rng, int y_size = 4,
                                           int z_size = 4) {
  auto y0 = random_pmf(rng, y_size), y1 = random_pmf(rng, y_size);
  auto z0 = random_pmf(rng, z_size), z1 = random_pmf(rng, z_size);
  std::vector<double> gy, gz;
  for (int x1 : {0, 1})
    for (int x2 : {0, 1})
      for (int x3 : {0, 1}) {
        (void)x2;
        (void)x3;
        const auto& ry = x1 ? y1 : y0;
        const auto& rz = x1 ? z1 : z0;
        gy.insert(gy.end(), ry.begin(), ry.end());
        gz.insert(gz.end(), rz.begin(), rz.end());
      }
  return covertmac::Dmmac(2, y_size, z_size, std::move(gy), std::move(gz));
}

inline covertmac::Dmmac paper_channel() {
  std::ifstream in(std::string(COVERTMAC_DATA_DIR) + "/paper_rows.json");
  nlohmann::json j;
  in >> j;
  return covertmac::dmmac_from_rows(
      j.at("x3_size").get<int>(), j.at("y_size").get<int>(), j.at("z_size").get<int>(),
      j.at("y_rows").get<std::vector<std::vector<double>>>(),
      j.at("z_rows").get<std::vector<std::vector<double>>>());
}

inline covertmac::CovertParams simple_params(const covertmac::Dmmac& ch,
                                             double rho1 = 1.0, double rho2 = 1.0) {
  covertmac::CovertParams p;
  p.joint.t_size = 1;
  p.joint.x3_size = ch.x3_size();
  p.joint.p.assign(ch.x3_size(), 1.0 / ch.x3_size());
  p.rho = {{rho1, rho2}};
  return p;
}

inline covertmac::CovertParams random_params(std::mt19937_64& rng,
                                             const covertmac::Dmmac& ch,
                                             int t_size) {
  covertmac::CovertParams p;
  p.joint.t_size = t_size;
  p.joint.x3_size = ch.x3_size();
  p.joint.p = random_pmf(rng, t_size * ch.x3_size());
  std::uniform_real_distribution<double> uni(0.05, 2.0);
  for (int t = 0; t < t_size; ++t) p.rho.push_back({uni(rng), uni(rng)});
  return p;
}

}  // namespace testutil
