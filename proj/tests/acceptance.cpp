// Acceptance suite: one line of output per criterion. Each criterion can be
// run alone by passing its number as the only argument; the exit status is
// the number of failed criteria.
//
// The suite is honest: criteria that the implementation cannot meet are
// reported as FAIL with the measured numbers rather than being weakened.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "covertmac/covertmac.hpp"

namespace fs = std::filesystem;
using namespace covertmac;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> random_pmf(std::mt19937_64& rng, int k, double floor = 0.02) {
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

Dmmac random_dmmac(std::mt19937_64& rng, int x3_size = 2, int y_size = 4,
                   int z_size = 4, double floor = 0.02) {
  std::vector<double> gy, gz;
  for (int r = 0; r < 4 * x3_size; ++r) {
    auto ry = random_pmf(rng, y_size, floor);
    auto rz = random_pmf(rng, z_size, floor);
    gy.insert(gy.end(), ry.begin(), ry.end());
    gz.insert(gz.end(), rz.begin(), rz.end());
  }
  return Dmmac(x3_size, y_size, z_size, std::move(gy), std::move(gz));
}

Dmmac random_inert_dmmac(std::mt19937_64& rng, int y_size = 4, int z_size = 4) {
  auto y0 = random_pmf(rng, y_size), y1 = random_pmf(rng, y_size);
  auto z0 = random_pmf(rng, z_size), z1 = random_pmf(rng, z_size);
  std::vector<double> gy, gz;
  for (int x1 : {0, 1})
    for (int r = 0; r < 4; ++r) {
      const auto& ry = x1 ? y1 : y0;
      const auto& rz = x1 ? z1 : z0;
      gy.insert(gy.end(), ry.begin(), ry.end());
      gz.insert(gz.end(), rz.begin(), rz.end());
    }
  return Dmmac(2, y_size, z_size, std::move(gy), std::move(gz));
}

Dmmac paper_channel() {
  std::ifstream in(std::string(COVERTMAC_DATA_DIR) + "/paper_rows.json");
  nlohmann::json j;
  in >> j;
  return dmmac_from_rows(j.at("x3_size").get<int>(), j.at("y_size").get<int>(),
                         j.at("z_size").get<int>(),
                         j.at("y_rows").get<std::vector<std::vector<double>>>(),
                         j.at("z_rows").get<std::vector<std::vector<double>>>());
}

CovertParams simple_params(const Dmmac& ch, double rho1, double rho2,
                           bool pin_x3_zero) {
  CovertParams p;
  p.joint.t_size = 1;
  p.joint.x3_size = ch.x3_size();
  if (pin_x3_zero) {
    p.joint.p.assign(ch.x3_size(), 0.0);
    p.joint.p[0] = 1.0;
  } else {
    p.joint.p.assign(ch.x3_size(), 1.0 / ch.x3_size());
  }
  p.rho = {{rho1, rho2}};
  return p;
}

CovertParams random_params(std::mt19937_64& rng, const Dmmac& ch, int t_size) {
  CovertParams p;
  p.joint.t_size = t_size;
  p.joint.x3_size = ch.x3_size();
  p.joint.p = random_pmf(rng, t_size * ch.x3_size());
  std::uniform_real_distribution<double> uni(0.05, 2.0);
  for (int t = 0; t < t_size; ++t) p.rho.push_back({uni(rng), uni(rng)});
  return p;
}

// ---- criterion 1: optimizer vs. single-user closed form ----
bool crit1() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  MaximizeOptions opts;
  opts.starts = 10;
  opts.seed = 17;
  opts.t_size = 1;
  double worst = 0.0;
  for (int c = 0; c < 25; ++c) {
    Dmmac ch = random_inert_dmmac(rng);
    double dy = *kl(ch.y_row(1, 0, 0), ch.y_row(0, 0, 0));
    double dz = *kl(ch.z_row(1, 0, 0), ch.z_row(0, 0, 0));
    double chi = chi2_mixture(ch, 1.0, 0.0, 0);
    double kmax = dz > dy ? 2.4 * (dz - dy) / std::sqrt(chi / 2.0) : 1.0;
    for (int j = 0; j < 20; ++j) {
      double b = kmax * j / 19.0;
      RegionQuery q;
      q.weights = {1, 0, 0};
      q.budget = {b, kInf};
      auto r = maximize(q, ch, opts);
      double want = single_user_tradeoff(b, ch);
      double err = r.feasible ? std::abs(r.tuple.r1 - want) : kInf;
      worst = std::max(worst, err);
    }
  }
  double dt = seconds_since(t0);
  bool ok = worst <= 1e-6 && dt < 60.0;
  std::printf("criterion 1 [%s] single-user closed form: worst |error| = %.3g "
              "(tol 1e-6), runtime %.1fs (limit 60)\n",
              ok ? "PASS" : "FAIL", worst, dt);
  return ok;
}

// ---- criterion 2: chi-squared scale invariance ----
bool crit2() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> uni(0.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Dmmac ch = random_dmmac(rng, 2, 3, 4 + i % 3);
    double r1 = uni(rng), r2 = uni(rng);
    if (r1 + r2 == 0.0) r1 = 1.0;
    int x3 = i % 2;
    double ref = chi2_mixture(ch, r1, r2, x3);
    for (double c : {0.1, 2.0, 1e6})
      worst = std::max(worst, std::abs(chi2_mixture(ch, c * r1, c * r2, x3) - ref));
  }
  bool ok = worst <= 1e-12;
  std::printf("criterion 2 [%s] chi-squared scale invariance: worst deviation = "
              "%.3g (tol 1e-12)\n",
              ok ? "PASS" : "FAIL", worst);
  return ok;
}

// ---- criterion 3: convexity via the mixture construction ----
bool crit3() {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    Dmmac ch = random_dmmac(rng);
    CovertParams A = random_params(rng, ch, 1 + i % 2);
    CovertParams B = random_params(rng, ch, 1 + (i / 2) % 2);
    double lam = uni(rng);
    RateKeyTuple ta = corner(A, ch), tb = corner(B, ch);
    RateKeyTuple tm = corner(convex_mix(A, B, lam, ch), ch);
    auto gap = [&](double m, double a, double b) {
      return std::abs(m - (lam * a + (1 - lam) * b));
    };
    worst = std::max({worst, gap(tm.r1, ta.r1, tb.r1), gap(tm.r2, ta.r2, tb.r2),
                      gap(tm.R3, ta.R3, tb.R3), gap(tm.k1_raw, ta.k1_raw, tb.k1_raw),
                      gap(tm.k2_raw, ta.k2_raw, tb.k2_raw)});
  }
  bool ok = worst <= 1e-9;
  std::printf("criterion 3 [%s] convexity mixture identity: worst componentwise "
              "gap = %.3g (tol 1e-9; key rates compared in signed form)\n",
              ok ? "PASS" : "FAIL", worst);
  return ok;
}

// ---- criterion 4: mutual-information rewriting identity ----
bool crit4() {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Dmmac ch = random_dmmac(rng, 2, 4, 4);
    auto px3 = random_pmf(rng, 2);
    worst = std::max(worst,
                     mi_identity_gap(ch, 1 + i % 2, (i / 2) % 2, uni(rng), px3));
  }
  bool ok = worst <= 1e-12;
  std::printf("criterion 4 [%s] mutual-information identity: worst residual = "
              "%.3g (tol 1e-12)\n",
              ok ? "PASS" : "FAIL", worst);
  return ok;
}

// ---- criterion 5: local quadratic behaviour of the divergence ----
bool crit5() {
  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  double worst3 = 0.0, worst4 = 0.0;
  for (int i = 0; i < 100; ++i) {
    // The quadratic approximation's third-order error scales with the worst
    // likelihood ratio, so the band below corresponds to channels whose
    // warden outputs are not vanishingly rare; blending every row with the
    // uniform law keeps all output probabilities >= 1/8.
    Dmmac raw = random_dmmac(rng, 2, 4, 4);
    std::vector<double> gy = raw.gamma_y(), gz = raw.gamma_z();
    for (double& v : gy) v = 0.5 * v + 0.5 / 4;
    for (double& v : gz) v = 0.5 * v + 0.5 / 4;
    Dmmac ch(2, 4, 4, gy, gz);
    double s = uni(rng);
    int x3 = i % 2;
    worst3 = std::max(worst3,
                      std::abs(local_div_ratio(ch, 2e-3 * s, 2e-3 * (1 - s), x3) - 1));
    worst4 = std::max(worst4,
                      std::abs(local_div_ratio(ch, 2e-4 * s, 2e-4 * (1 - s), x3) - 1));
  }
  bool ok = worst3 <= 0.01 && worst4 <= 0.001;
  std::printf("criterion 5 [%s] local divergence ratio: worst |ratio-1| = %.3g "
              "at 2e-3 (tol 0.01), %.3g at 2e-4 (tol 0.001)\n",
              ok ? "PASS" : "FAIL", worst3, worst4);
  return ok;
}

// ---- criterion 6: non-covert capacity anchor of the example channel ----
bool crit6() {
  auto t0 = Clock::now();
  Dmmac ch = paper_channel();
  // Blahut-Arimoto on the two rows Gamma_Y(. | 0,0,x3), in nats.
  std::vector<std::span<const double>> rows{ch.y_row(0, 0, 0), ch.y_row(0, 0, 1)};
  std::vector<double> px{0.5, 0.5};
  double cap = 0.0;
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> py(ch.y_size(), 0.0);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < ch.y_size(); ++y) py[y] += px[x] * rows[x][y];
    std::vector<double> d(2, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < ch.y_size(); ++y)
        if (rows[x][y] > 0) d[x] += rows[x][y] * std::log(rows[x][y] / py[y]);
    double norm = px[0] * std::exp(d[0]) + px[1] * std::exp(d[1]);
    cap = std::log(norm);
    for (int x = 0; x < 2; ++x) px[x] = px[x] * std::exp(d[x]) / norm;
  }
  double cap_bits = cap / std::log(2.0);
  const double listed = 0.1965;
  double gap_bits = std::abs(cap_bits - listed);
  double gap_nats = std::abs(cap - listed);
  const char* base = gap_bits < gap_nats ? "bits" : "nats";

  // cross-check: the optimizer reaches the same maximum
  RegionQuery q;
  q.weights = {0, 0, 1};
  MaximizeOptions opts;
  opts.starts = 12;
  opts.seed = 7;
  auto r = maximize(q, ch, opts);
  double opt_gap = std::abs(r.tuple.R3 - cap);
  double dt = seconds_since(t0);
  bool ok = gap_bits <= 2e-3 && opt_gap <= 1e-6 && dt < 1.0;
  std::printf("criterion 6 [%s] capacity anchor: computed %.6f nats = %.6f bits; "
              "listed value 0.1965 is in %s (gap %.2e, tol 2e-3); optimizer gap "
              "%.2e; runtime %.2fs (limit 1)\n",
              ok ? "PASS" : "FAIL", cap, cap_bits, base, gap_bits, opt_gap, dt);
  return ok;
}

// ---- criterion 7: figure-level claims ----
bool crit7() {
  auto t0 = Clock::now();
  Dmmac ch = paper_channel();
  MaximizeOptions opts;
  opts.starts = 10;
  opts.seed = 3;
  bool ok = true;
  std::string detail;

  // (a) nesting of the (r1, r2) regions as the non-covert demand grows
  {
    const double ln2 = std::log(2.0);
    std::vector<double> levels{0.05 * ln2, 0.15 * ln2, 0.1965 * ln2};
    bool nested = true;
    for (int a = 0; a < 5; ++a) {
      double th = (M_PI / 2) * a / 4.0;
      double prev = kInf;
      for (double lv : levels) {
        RegionQuery q;
        q.weights = {std::cos(th) + 1e-6, std::sin(th) + 1e-6, 0};
        q.budget = {0.8, 0.8};
        q.fix_R3 = lv;
        auto r = maximize(q, ch, opts);
        double v = r.feasible
                       ? q.weights[0] * r.tuple.r1 + q.weights[1] * r.tuple.r2
                       : -kInf;
        if (v > prev + 1e-4) nested = false;
        prev = v;
      }
    }
    ok &= nested;
    detail += std::string("(a) nesting ") + (nested ? "ok" : "VIOLATED") + "; ";
  }

  // (b) randomized x3 beats the deterministic convex hull in the (r2, k2)
  // tradeoff
  {
    const int pts = 13;
    const double kmax = 1.2;
    std::vector<double> grid(pts), free_c(pts, 0), det0(pts, 0), det1(pts, 0);
    for (int i = 0; i < pts; ++i) grid[i] = kmax * i / (pts - 1);
    auto curve = [&](int force, std::vector<double>& out) {
      MaximizeOptions o = opts;
      o.force_x3 = force;
      for (int i = 0; i < pts; ++i) {
        RegionQuery q;
        q.weights = {0, 1, 0};
        q.budget = {kInf, grid[i]};
        auto r = maximize(q, ch, o);
        if (r.feasible) out[i] = r.tuple.r2;
      }
    };
    curve(-1, free_c);
    curve(0, det0);
    curve(1, det1);
    // upper concave envelope of the two deterministic curves on the grid
    std::vector<std::pair<double, double>> pool;
    for (int i = 0; i < pts; ++i) {
      pool.push_back({grid[i], std::max(det0[i], det1[i])});
    }
    // hull by repeated chord tests (grid is small)
    std::vector<double> hull(pts);
    for (int i = 0; i < pts; ++i) {
      double best = pool[i].second;
      for (int a = 0; a <= i; ++a)
        for (int b = i; b < pts; ++b) {
          if (a == b) continue;
          double t = (grid[i] - grid[a]) / (grid[b] - grid[a]);
          best = std::max(best, pool[a].second + t * (pool[b].second - pool[a].second));
        }
      hull[i] = best;
    }
    bool dominates = true;
    double best_excess = -kInf;
    for (int i = 0; i < pts; ++i) {
      if (free_c[i] < hull[i] - 1e-6) dominates = false;
      best_excess = std::max(best_excess, free_c[i] - hull[i]);
    }
    bool strict = best_excess >= 1e-4;
    ok &= dominates && strict;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "(b) hull dominance %s, max excess %.3g; ",
                  (dominates && strict) ? "ok" : "VIOLATED", best_excess);
    detail += buf;
  }

  // (c) a two-phase multiplexed point beats every single-phase point in at
  // least one direction
  {
    // The gain appears where the objective balances the covert rate against
    // the non-covert rate (r2 is ~6x larger in scale than R3, so the
    // interesting directions are steep).
    double best_gain = -kInf;
    for (double deg : {72.0, 75.0, 78.0, 80.0}) {
      double th = deg * M_PI / 180.0;
      RegionQuery q;
      q.weights = {0, std::cos(th), std::sin(th)};
      q.budget = {0.8, 0.8};
      MaximizeOptions o1 = opts;
      o1.t_size = 1;
      MaximizeOptions o2 = opts;
      o2.t_size = 2;
      auto v1 = maximize(q, ch, o1);
      auto v2 = maximize(q, ch, o2);
      if (v1.feasible && v2.feasible) best_gain = std::max(best_gain, v2.objective - v1.objective);
    }
    bool strict = best_gain >= 1e-4;
    ok &= strict;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "(c) multiplexing gain %s (best %.3g)",
                  strict ? "ok" : "VIOLATED", best_gain);
    detail += buf;
  }

  double dt = seconds_since(t0);
  ok &= dt < 600.0;
  std::printf("criterion 7 [%s] figure claims: %s; runtime %.0fs (limit 600)\n",
              ok ? "PASS" : "FAIL", detail.c_str(), dt);
  return ok;
}

// ---- criterion 8: simulator trend suite ----
bool crit8() {
  auto t0 = Clock::now();
  Dmmac ch = paper_channel();
  CovertParams p = simple_params(ch, 1.0, 1.0, /*pin_x3_zero=*/true);

  auto pe_at = [&](int n, double factor) {
    SimConfig cfg;
    cfg.n = n;
    cfg.seed = 20240;
    SizePreset sp = theorem_sizes(cfg, p, ch, factor);
    cfg.M1 = sp.M1;
    cfg.K1 = sp.K1;
    cfg.M2 = sp.M2;
    cfg.K2 = sp.K2;
    cfg.M3 = 1;
    SimResult r = run_trials(cfg, p, ch, 200);
    return r.pe1_hat;
  };
  double pe_lo = pe_at(2000, 0.8);
  double pe_hi = pe_at(2000, 1.3);
  bool ok_lo = pe_lo <= 0.1;
  bool ok_hi = pe_hi >= 0.5;

  auto delta_at = [&](int n, uint64_t samples) {
    SimConfig cfg;
    cfg.n = n;
    cfg.seed = 20240;
    cfg.mixture_cap = 1ULL << 22;
    SizePreset sp = theorem_sizes(cfg, p, ch, 1.0);
    cfg.M1 = sp.M1;
    cfg.K1 = sp.K1;
    cfg.M2 = sp.M2;
    cfg.K2 = sp.K2;
    cfg.M3 = 1;
    auto rng = stream_rng(cfg.seed, 0xC0DEB00CULL);
    Codebook cb = generate_codebooks(cfg, p, ch, rng);
    DeltaEstimate de = estimate_delta(cfg, p, cb, ch, 0, samples);
    return std::pair<double, double>(de.value, delta_theory(cfg, p, ch, cfg.xi[5]));
  };
  auto [d4000, th4000] = delta_at(4000, 2000);
  double ratio = th4000 > 0 ? d4000 / th4000 : kInf;
  bool ok_ratio = ratio >= 0.5 && ratio <= 2.0;

  // slope of log(delta) against log(omega_n) across blocklengths
  std::vector<int> ns{1000, 2000, 4000, 8000};
  std::vector<double> lx, ly;
  for (int n : ns) {
    auto [d, th] = delta_at(n, 800);
    (void)th;
    if (d > 0) {
      SimConfig c;
      c.n = n;
      lx.push_back(std::log(c.omega_n()));
      ly.push_back(std::log(d));
    }
  }
  double slope = 0.0;
  if (lx.size() >= 2) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
      num += (lx[i] - mx) * (ly[i] - my);
      den += (lx[i] - mx) * (lx[i] - mx);
    }
    slope = num / den;
  }
  bool ok_slope = std::abs(slope - 2.0) <= 0.3;

  double dt = seconds_since(t0);
  bool ok = ok_lo && ok_hi && ok_ratio && ok_slope && dt < 900.0;
  std::printf(
      "criterion 8 [%s] simulator trends: Pe1(0.8x)=%.3f (need <=0.1: %s), "
      "Pe1(1.3x)=%.3f (need >=0.5: %s), delta ratio=%.3f (need in [0.5,2]: %s), "
      "slope=%.2f (need 2+-0.3: %s), runtime %.0fs (limit 900)\n",
      ok ? "PASS" : "FAIL", pe_lo, ok_lo ? "yes" : "NO", pe_hi,
      ok_hi ? "yes" : "NO", ratio, ok_ratio ? "yes" : "NO", slope,
      ok_slope ? "yes" : "NO", dt);
  return ok;
}

// ---- criterion 9: byte-identical reruns through the CLI ----
bool crit9() {
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  auto run = [](const std::string& args) {
    std::string cmd =
        std::string(COVERTMAC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  fs::path d = fs::temp_directory_path() / "covertmac_acceptance";
  fs::create_directories(d);
  fs::path mac = d / "mac.json";
  std::string rows = std::string(COVERTMAC_DATA_DIR) + "/paper_rows.json";
  bool ok = run("import --from-rows " + rows + " --out " + mac.string()) == 0;

  std::string reg = "region --channel " + mac.string() +
                    " --budget-k1 0.8 --budget-k2 0.8 --axes r2,R3 --angles 5 "
                    "--starts 4 --t-size 2 --seed 13 --out ";
  ok = ok && run(reg + (d / "r1").string()) == 0;
  ok = ok && run(reg + (d / "r2").string()) == 0;
  ok = ok && slurp(d / "r1" / "boundary.csv") == slurp(d / "r2" / "boundary.csv");
  ok = ok && slurp(d / "r1" / "meta.json") == slurp(d / "r2" / "meta.json");

  fs::path params = d / "params.json";
  {
    CovertParams p;
    p.joint.t_size = 1;
    p.joint.x3_size = 2;
    p.joint.p = {0.5, 0.5};
    p.rho = {{1.0, 1.0}};
    std::ofstream(params) << to_json(p).dump();
  }
  std::string sim = "simulate --channel " + mac.string() + " --params " +
                    params.string() +
                    " --n 500 --trials 20 --seed 31 --M1 4 --K1 2 --M2 2 --K2 2 "
                    "--delta-samples 50 --out ";
  ok = ok && run(sim + (d / "s1.json").string()) == 0;
  ok = ok && run(sim + (d / "s2.json").string()) == 0;
  ok = ok && slurp(d / "s1.json") == slurp(d / "s2.json");

  std::printf("criterion 9 [%s] determinism: identical seeds reproduce region "
              "and simulation payloads byte for byte\n",
              ok ? "PASS" : "FAIL");
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool (*crits[])() = {crit1, crit2, crit3, crit4, crit5,
                       crit6, crit7, crit8, crit9};
  int failures = 0;
  for (int i = 1; i <= 9; ++i) {
    if (only != 0 && only != i) continue;
    if (!crits[i - 1]()) ++failures;
  }
  if (only == 0)
    std::printf("acceptance: %d of 9 criteria failed\n", failures);
  return failures;
}
