// Command-line front end: channel validation and import, region boundary
// sweeps, the single-user key/rate tradeoff, Monte Carlo simulation, and the
// prebaked figure experiments. Exit codes: 0 ok, 2 validation/input failure,
// 3 infeasible query.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covertmac/covertmac.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace covertmac;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string channel_hash(const ChannelVariant& ch) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json(ch).dump())));
  return buf;
}

struct Unit {
  bool bits = false;
  double conv(double nats) const { return bits ? nats / std::log(2.0) : nats; }
  const char* name() const { return bits ? "bits" : "nats"; }
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json provenance(const std::string& command, const ChannelVariant& ch,
                uint64_t seed, const json& extra) {
  json j;
  j["tool"] = "covertmac";
  j["version"] = kVersion;
  j["command"] = command;
  j["channel_hash"] = channel_hash(ch);
  j["seed"] = seed;
  j["units"] = extra.contains("units") ? extra.at("units") : json("nats");
  for (auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

int run_validate(const std::string& channel_path) {
  ChannelVariant ch = load_channel(channel_path);
  ValidationReport rep =
      std::visit([](const auto& c) { return validate(c); }, ch);
  if (rep.ok()) {
    std::cout << "ok: channel satisfies the regularity conditions\n";
    return 0;
  }
  for (const auto& issue : rep.issues)
    std::cerr << "violated [" << issue.condition << "] " << issue.detail << "\n";
  return 2;
}

int run_import(const std::string& rows_path, const std::string& out_path) {
  std::ifstream in(rows_path);
  if (!in) throw ParseError("cannot open " + rows_path);
  json j;
  in >> j;
  auto rows = [&](const char* key) {
    return j.at(key).get<std::vector<std::vector<double>>>();
  };
  Dmmac ch = dmmac_from_rows(j.at("x3_size").get<int>(), j.at("y_size").get<int>(),
                             j.at("z_size").get<int>(), rows("y_rows"), rows("z_rows"));
  ValidationReport rep = validate(ch);
  if (!rep.ok()) {
    for (const auto& issue : rep.issues)
      std::cerr << "violated [" << issue.condition << "] " << issue.detail << "\n";
    return 2;
  }
  save_channel(ch, out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

void parse_fixes(const std::vector<std::string>& fixes, RegionQuery& q) {
  for (const auto& f : fixes) {
    auto eq = f.find('=');
    if (eq == std::string::npos) throw ParseError("--fix expects name=value: " + f);
    auto ax = axis_from_name(f.substr(0, eq));
    if (!ax) throw ParseError("--fix: unknown rate " + f.substr(0, eq));
    double v = std::stod(f.substr(eq + 1));
    if (*ax == Axis::r1) q.fix_r1 = v;
    else if (*ax == Axis::r2) q.fix_r2 = v;
    else q.fix_R3 = v;
  }
}

void write_sweep(const fs::path& dir, const std::string& name,
                 const std::vector<SweepPoint>& pts, const Unit& unit) {
  std::ofstream csv(dir / (name + ".csv"));
  csv << "axis1,axis2,r1,r2,R3,k1,k2,params_id\n";
  json params = json::object();
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    std::string id = name + "_p" + std::to_string(i);
    csv << fmt(unit.conv(p.axis1)) << ',' << fmt(unit.conv(p.axis2)) << ','
        << fmt(unit.conv(p.tuple.r1)) << ',' << fmt(unit.conv(p.tuple.r2)) << ','
        << fmt(unit.conv(p.tuple.R3)) << ',' << fmt(unit.conv(p.tuple.k1)) << ','
        << fmt(unit.conv(p.tuple.k2)) << ',' << id << '\n';
    params[id] = to_json(p.params);
  }
  write_json(dir / (name + "_params.json"), params);
}

int run_region(const std::string& channel_path, double bk1, double bk2,
               const std::vector<std::string>& fixes, const std::string& axes,
               int angles, int t_size, int starts, int grid, uint64_t seed,
               bool bits, const std::string& out_dir) {
  ChannelVariant chv = load_channel(channel_path);
  const Dmmac* mac = std::get_if<Dmmac>(&chv);
  if (!mac) {
    std::cerr << "region: boundary sweeps require a dmmac channel\n";
    return 2;
  }
  if (bk1 < 0.0 || bk2 < 0.0) {
    std::cerr << "region: negative key budget is infeasible\n";
    return 3;
  }
  auto comma = axes.find(',');
  if (comma == std::string::npos) throw ParseError("--axes expects two names, e.g. r2,R3");
  auto a1 = axis_from_name(axes.substr(0, comma));
  auto a2 = axis_from_name(axes.substr(comma + 1));
  if (!a1 || !a2) throw ParseError("--axes: unknown axis in " + axes);

  RegionQuery q;
  q.budget = {bk1, bk2};
  parse_fixes(fixes, q);
  MaximizeOptions opts;
  opts.t_size = t_size;
  opts.starts = starts;
  opts.seed = seed;
  opts.grid = grid;
  auto pts = boundary_sweep(*mac, q, *a1, *a2, angles, opts);
  if (pts.empty()) {
    std::cerr << "region: no feasible boundary point under the given constraints\n";
    return 3;
  }
  fs::create_directories(out_dir);
  Unit unit{bits};
  write_sweep(out_dir, "boundary", pts, unit);
  json extra;
  extra["units"] = unit.name();
  extra["budget_k1"] = bk1;
  extra["budget_k2"] = bk2;
  extra["axes"] = {axis_name(*a1), axis_name(*a2)};
  extra["fixes"] = fixes;
  extra["angles"] = angles;
  extra["t_size"] = t_size;
  extra["starts"] = starts;
  extra["grid"] = grid;
  write_json(fs::path(out_dir) / "meta.json", provenance("region", chv, seed, extra));
  std::cout << "wrote " << out_dir << "/boundary.csv (" << pts.size() << " points)\n";
  return 0;
}

bool single_user_reducible(const Dmmac& ch) {
  for (int x2 : {0, 1})
    for (int x3 = 0; x3 < ch.x3_size(); ++x3)
      for (int x1 : {0, 1}) {
        for (int y = 0; y < ch.y_size(); ++y)
          if (std::abs(ch.y(x1, x2, x3, y) - ch.y(x1, 0, 0, y)) > 1e-12) return false;
        for (int z = 0; z < ch.z_size(); ++z)
          if (std::abs(ch.z(x1, x2, x3, z) - ch.z(x1, 0, 0, z)) > 1e-12) return false;
      }
  return true;
}

int run_tradeoff(const std::string& channel_path, double kmax, int points,
                 bool force_reduce, bool bits, const std::string& out_dir) {
  ChannelVariant chv = load_channel(channel_path);
  const Dmmac* mac = std::get_if<Dmmac>(&chv);
  if (!mac) {
    std::cerr << "tradeoff: requires a dmmac channel\n";
    return 2;
  }
  if (!single_user_reducible(*mac) && !force_reduce) {
    std::cerr << "tradeoff: channel depends on x2 or x3; pass --reduce to project"
                 " onto user 1 at x2=0, x3=0\n";
    return 2;
  }
  fs::create_directories(out_dir);
  Unit unit{bits};
  std::ofstream csv(fs::path(out_dir) / "tradeoff.csv");
  csv << "k1,r1\n";
  for (int i = 0; i < points; ++i) {
    double k = kmax * i / (points - 1);
    csv << fmt(unit.conv(k)) << ',' << fmt(unit.conv(single_user_tradeoff(k, *mac)))
        << '\n';
  }
  auto dy = kl(mac->y_row(1, 0, 0), mac->y_row(0, 0, 0));
  auto dz = kl(mac->z_row(1, 0, 0), mac->z_row(0, 0, 0));
  double chi = chi2_mixture(*mac, 1.0, 0.0, 0);
  json extra;
  extra["units"] = unit.name();
  extra["d_y"] = unit.conv(*dy);
  extra["d_z"] = unit.conv(*dz);
  extra["cap"] = unit.conv(std::sqrt(2.0) * *dy / std::sqrt(chi));
  extra["knee_k1"] = *dz > *dy
                         ? json(unit.conv(std::sqrt(2.0) * (*dz - *dy) / std::sqrt(chi)))
                         : json();
  write_json(fs::path(out_dir) / "meta.json", provenance("tradeoff", chv, 0, extra));
  std::cout << "wrote " << out_dir << "/tradeoff.csv\n";
  return 0;
}

int run_simulate(const std::string& channel_path, const std::string& params_path,
                 SimConfig cfg, uint64_t trials, uint64_t delta_samples,
                 double preset_factor, const std::string& out_path) {
  ChannelVariant chv = load_channel(channel_path);
  const Dmmac* mac = std::get_if<Dmmac>(&chv);
  if (!mac) {
    std::cerr << "simulate: requires a dmmac channel\n";
    return 2;
  }
  std::ifstream in(params_path);
  if (!in) throw ParseError("cannot open " + params_path);
  json pj;
  in >> pj;
  CovertParams params = params_from_json(pj);
  validate_params(params, *mac);

  if (preset_factor > 0.0) {
    SizePreset sp = theorem_sizes(cfg, params, *mac, preset_factor);
    cfg.M1 = sp.M1;
    cfg.K1 = sp.K1;
    cfg.M2 = sp.M2;
    cfg.K2 = sp.K2;
    // M3 stays as configured: joint typicality at practical blocklengths
    // needs far larger n than the covert thresholds, so the preset does not
    // override it.
  }
  validate_config(cfg, params);

  SimResult res = run_trials(cfg, params, *mac, trials);
  double theory = delta_theory(cfg, params, *mac);
  json deltas = json::array();
  if (delta_samples > 0) {
    auto crng = stream_rng(cfg.seed, 0xC0DEB00CULL);
    Codebook cb = generate_codebooks(cfg, params, *mac, crng);
    double acc = 0.0, mx = 0.0, se_acc = 0.0;
    for (uint64_t w3 = 0; w3 < cfg.M3; ++w3) {
      DeltaEstimate de = estimate_delta(cfg, params, cb, *mac, w3, delta_samples);
      deltas.push_back({{"w3", w3}, {"delta", de.value}, {"stderr", de.se}});
      acc += de.value;
      se_acc += de.se * de.se;
      mx = std::max(mx, de.value);
    }
    res.delta_avg = acc / cfg.M3;
    res.delta_max = mx;
    res.delta_avg_se = std::sqrt(se_acc) / cfg.M3;
    res.theory_delta = theory;
    res.theory_ratio = theory > 0.0 ? res.delta_avg / theory : 0.0;
  }

  json out;
  out["provenance"] = provenance("simulate", chv, cfg.seed, json::object());
  out["config"] = {{"n", cfg.n},
                   {"omega_c", cfg.omega_c},
                   {"omega_p", cfg.omega_p},
                   {"mu1", cfg.mu1},
                   {"mu2", cfg.mu2},
                   {"phi", {cfg.phi[0], cfg.phi[1]}},
                   {"M1", cfg.M1},
                   {"K1", cfg.K1},
                   {"M2", cfg.M2},
                   {"K2", cfg.K2},
                   {"M3", cfg.M3},
                   {"seed", cfg.seed},
                   {"redraw", cfg.redraw},
                   {"trials", trials},
                   {"delta_samples", delta_samples},
                   {"preset_factor", preset_factor}};
  out["params"] = to_json(params);
  out["pe0"] = {{"estimate", res.pe0_hat},
                {"ci95", {res.pe0_ci.lo, res.pe0_ci.hi}},
                {"trials", res.trials0}};
  out["pe1"] = {{"estimate", res.pe1_hat},
                {"ci95", {res.pe1_ci.lo, res.pe1_ci.hi}},
                {"trials", res.trials1},
                {"by_message", {{"w1", res.pe1_w1}, {"w2", res.pe1_w2}, {"w3", res.pe1_w3}}}};
  if (delta_samples > 0) {
    out["delta"] = {{"per_w3", deltas},
                    {"average", res.delta_avg},
                    {"max", res.delta_max},
                    {"stderr", res.delta_avg_se},
                    {"theory", res.theory_delta},
                    {"theory_ratio", res.theory_ratio},
                    {"covertness_bound", covertness_bound(
                                             std::clamp(res.delta_avg, 0.0, 1.0))}};
  }
  write_json(out_path, out);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

// Upper concave envelope of (x, y) points, evaluated on a grid.
std::vector<double> upper_hull_on_grid(std::vector<std::pair<double, double>> pts,
                                       const std::vector<double>& grid) {
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      auto& a = hull[hull.size() - 2];
      auto& b = hull[hull.size() - 1];
      if ((b.second - a.second) * (p.first - a.first) <=
          (p.second - a.second) * (b.first - a.first))
        hull.pop_back();
      else
        break;
    }
    while (!hull.empty() && hull.back().first == p.first &&
           hull.back().second <= p.second)
      hull.pop_back();
    hull.push_back(p);
  }
  std::vector<double> out;
  for (double x : grid) {
    if (x <= hull.front().first) {
      out.push_back(hull.front().second);
      continue;
    }
    if (x >= hull.back().first) {
      out.push_back(hull.back().second);
      continue;
    }
    for (size_t i = 1; i < hull.size(); ++i) {
      if (x <= hull[i].first) {
        double t = (x - hull[i - 1].first) / (hull[i].first - hull[i - 1].first);
        out.push_back(hull[i - 1].second + t * (hull[i].second - hull[i - 1].second));
        break;
      }
    }
  }
  return out;
}

int run_figures(const std::string& which, const std::string& channel_path,
                uint64_t seed, int starts, bool bits, const std::string& out_dir) {
  ChannelVariant chv = load_channel(channel_path);
  const Dmmac* mac = std::get_if<Dmmac>(&chv);
  if (!mac) {
    std::cerr << "figures: requires a dmmac channel\n";
    return 2;
  }
  fs::create_directories(out_dir);
  Unit unit{bits};
  MaximizeOptions opts;
  opts.starts = starts;
  opts.seed = seed;
  json extra;
  extra["units"] = unit.name();
  extra["which"] = which;
  extra["starts"] = starts;

  if (which == "fig4") {
    // 3-D region samples under k1, k2 <= 0.8: support function on a grid of
    // weight directions over the positive octant.
    std::ofstream csv(fs::path(out_dir) / "fig4.csv");
    csv << "r1,r2,R3,k1,k2\n";
    const int steps = 7;
    for (int i = 0; i <= steps; ++i)
      for (int j = 0; j <= steps; ++j) {
        double th = (M_PI / 2) * i / steps;   // r1 vs (r2, R3) plane
        double ph = (M_PI / 2) * j / steps;
        RegionQuery q;
        q.budget = {0.8, 0.8};
        q.weights = {std::cos(th) + 1e-6, std::sin(th) * std::cos(ph) + 1e-6,
                     std::sin(th) * std::sin(ph) + 1e-6};
        auto r = maximize(q, *mac, opts);
        if (!r.feasible) continue;
        csv << fmt(unit.conv(r.tuple.r1)) << ',' << fmt(unit.conv(r.tuple.r2)) << ','
            << fmt(unit.conv(r.tuple.R3)) << ',' << fmt(unit.conv(r.tuple.k1)) << ','
            << fmt(unit.conv(r.tuple.k2)) << '\n';
      }
  } else if (which == "fig5") {
    for (double r1 : {0.25, 0.5, 0.75}) {
      RegionQuery q;
      q.budget = {0.8, 0.8};
      q.fix_r1 = r1;
      auto pts = boundary_sweep(*mac, q, Axis::r2, Axis::R3, 61, opts);
      write_sweep(out_dir, "fig5_r1_" + fmt(r1), pts, unit);
    }
  } else if (which == "fig6") {
    // The listed R3 levels are in bits; convert to nats for the constraint.
    for (double r3_bits : {0.1965, 0.15, 0.05}) {
      RegionQuery q;
      q.budget = {0.8, 0.8};
      q.fix_R3 = r3_bits * std::log(2.0);
      auto pts = boundary_sweep(*mac, q, Axis::r1, Axis::r2, 61, opts);
      write_sweep(out_dir, "fig6_R3_" + fmt(r3_bits), pts, unit);
    }
    extra["note"] = "R3 levels interpreted in bits and converted to nats";
  } else if (which == "fig7") {
    // (r2, k2) tradeoffs: free X3 law vs. deterministic X3, plus the convex
    // hull of the two deterministic curves.
    const int points = 25;
    const double kmax = 1.2;
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = kmax * i / (points - 1);
    auto curve = [&](int force) {
      std::vector<double> r2(points, 0.0);
      MaximizeOptions o = opts;
      o.force_x3 = force;
      for (int i = 0; i < points; ++i) {
        RegionQuery q;
        q.weights = {0, 1, 0};
        q.budget = {kInf, grid[i]};
        auto r = maximize(q, *mac, o);
        if (r.feasible) r2[i] = r.tuple.r2;
      }
      return r2;
    };
    auto free_c = curve(-1), det0 = curve(0), det1 = curve(1);
    std::vector<std::pair<double, double>> pool;
    for (int i = 0; i < points; ++i) {
      pool.push_back({grid[i], det0[i]});
      pool.push_back({grid[i], det1[i]});
    }
    auto hull = upper_hull_on_grid(pool, grid);
    std::ofstream csv(fs::path(out_dir) / "fig7.csv");
    csv << "k2,r2_random_x3,r2_x3_0,r2_x3_1,r2_hull\n";
    for (int i = 0; i < points; ++i)
      csv << fmt(unit.conv(grid[i])) << ',' << fmt(unit.conv(free_c[i])) << ','
          << fmt(unit.conv(det0[i])) << ',' << fmt(unit.conv(det1[i])) << ','
          << fmt(unit.conv(hull[i])) << '\n';
  } else if (which == "fig8") {
    // Multiplexing gain: (r2, R3) support function with one phase vs. the
    // full phase budget.
    std::ofstream csv(fs::path(out_dir) / "fig8.csv");
    csv << "angle,r2_T1,R3_T1,r2_T6,R3_T6\n";
    const int angles = 31;
    for (int i = 0; i < angles; ++i) {
      double th = (M_PI / 2) * i / (angles - 1);
      RegionQuery q;
      q.budget = {0.8, 0.8};
      q.weights = {0, std::cos(th) + 1e-6, std::sin(th) + 1e-6};
      MaximizeOptions o1 = opts;
      o1.t_size = 1;
      auto r1p = maximize(q, *mac, o1);
      auto r6p = maximize(q, *mac, opts);
      csv << fmt(th) << ',' << fmt(unit.conv(r1p.tuple.r2)) << ','
          << fmt(unit.conv(r1p.tuple.R3)) << ',' << fmt(unit.conv(r6p.tuple.r2))
          << ',' << fmt(unit.conv(r6p.tuple.R3)) << '\n';
    }
  } else {
    std::cerr << "figures: unknown figure " << which << "\n";
    return 2;
  }
  write_json(fs::path(out_dir) / (which + "_meta.json"),
             provenance("figures", chv, seed, extra));
  std::cout << "wrote " << which << " data to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rate-key regions and Monte Carlo simulation for covert "
               "multi-access channels"};
  app.set_version_flag("--version", std::string("covertmac ") + kVersion);
  app.require_subcommand(1);

  // validate
  std::string v_channel;
  auto* sc_validate = app.add_subcommand("validate", "check channel regularity");
  sc_validate->add_option("--channel", v_channel)->required();

  // import
  std::string i_rows, i_out;
  auto* sc_import = app.add_subcommand("import", "build a channel file from row matrices");
  sc_import->add_option("--from-rows", i_rows)->required();
  sc_import->add_option("--out", i_out)->required();

  // region
  std::string r_channel, r_axes = "r2,R3", r_out = "region_out";
  double r_bk1 = kInf, r_bk2 = kInf;
  std::vector<std::string> r_fixes;
  int r_angles = 181, r_tsize = 6, r_starts = 16, r_grid = 0;
  uint64_t r_seed = 1;
  bool r_bits = false;
  auto* sc_region = app.add_subcommand("region", "sweep a 2-D boundary of the region");
  sc_region->add_option("--channel", r_channel)->required();
  sc_region->add_option("--budget-k1", r_bk1);
  sc_region->add_option("--budget-k2", r_bk2);
  sc_region->add_option("--fix", r_fixes, "rate constraints, e.g. r1=0.5");
  sc_region->add_option("--axes", r_axes);
  sc_region->add_option("--angles", r_angles);
  sc_region->add_option("--t-size", r_tsize);
  sc_region->add_option("--starts", r_starts);
  sc_region->add_option("--grid", r_grid);
  sc_region->add_option("--seed", r_seed);
  sc_region->add_flag("--bits", r_bits);
  sc_region->add_option("--out", r_out);

  // tradeoff
  std::string t_channel, t_out = "tradeoff_out";
  double t_kmax = 2.0;
  int t_points = 41;
  bool t_reduce = false, t_bits = false;
  auto* sc_tradeoff = app.add_subcommand("tradeoff", "single-user key/rate tradeoff");
  sc_tradeoff->add_option("--channel", t_channel)->required();
  sc_tradeoff->add_option("--kmax", t_kmax);
  sc_tradeoff->add_option("--points", t_points);
  sc_tradeoff->add_flag("--reduce", t_reduce);
  sc_tradeoff->add_flag("--bits", t_bits);
  sc_tradeoff->add_option("--out", t_out);

  // simulate
  std::string s_channel, s_params, s_out = "results.json";
  SimConfig s_cfg;
  uint64_t s_trials = 200, s_delta = 0;
  double s_factor = 0.0;
  auto* sc_sim = app.add_subcommand("simulate", "Monte Carlo of the coding scheme");
  sc_sim->add_option("--channel", s_channel)->required();
  sc_sim->add_option("--params", s_params)->required();
  sc_sim->add_option("--n", s_cfg.n)->required();
  sc_sim->add_option("--trials", s_trials);
  sc_sim->add_option("--seed", s_cfg.seed);
  sc_sim->add_option("--delta-samples", s_delta);
  sc_sim->add_option("--factor", s_factor,
                     "set covert sizes to factor x the achievability exponents");
  sc_sim->add_option("--M1", s_cfg.M1);
  sc_sim->add_option("--K1", s_cfg.K1);
  sc_sim->add_option("--M2", s_cfg.M2);
  sc_sim->add_option("--K2", s_cfg.K2);
  sc_sim->add_option("--M3", s_cfg.M3);
  sc_sim->add_option("--phi1", s_cfg.phi[0]);
  sc_sim->add_option("--phi2", s_cfg.phi[1]);
  sc_sim->add_option("--mu1", s_cfg.mu1);
  sc_sim->add_option("--mu2", s_cfg.mu2);
  sc_sim->add_option("--omega-c", s_cfg.omega_c);
  sc_sim->add_option("--omega-p", s_cfg.omega_p);
  sc_sim->add_flag("--redraw", s_cfg.redraw);
  sc_sim->add_option("--out", s_out);

  // figures
  std::string f_which, f_channel = "data/paper_mac.json", f_out = "figures_out";
  uint64_t f_seed = 1;
  int f_starts = 12;
  bool f_bits = false;
  auto* sc_fig = app.add_subcommand("figures", "reproduce the prebaked experiments");
  sc_fig->add_option("--which", f_which)->required();
  sc_fig->add_option("--channel", f_channel);
  sc_fig->add_option("--seed", f_seed);
  sc_fig->add_option("--starts", f_starts);
  sc_fig->add_flag("--bits", f_bits);
  sc_fig->add_option("--out", f_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sc_validate->parsed()) return run_validate(v_channel);
    if (sc_import->parsed()) return run_import(i_rows, i_out);
    if (sc_region->parsed())
      return run_region(r_channel, r_bk1, r_bk2, r_fixes, r_axes, r_angles, r_tsize,
                        r_starts, r_grid, r_seed, r_bits, r_out);
    if (sc_tradeoff->parsed())
      return run_tradeoff(t_channel, t_kmax, t_points, t_reduce, t_bits, t_out);
    if (sc_sim->parsed())
      return run_simulate(s_channel, s_params, s_cfg, s_trials, s_delta, s_factor, s_out);
    if (sc_fig->parsed())
      return run_figures(f_which, f_channel, f_seed, f_starts, f_bits, f_out);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
