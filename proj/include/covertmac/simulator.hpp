#pragma once

// Finite-blocklength Monte Carlo of the random coding scheme: multiplexed
// phase sequence, sparse Bernoulli codebooks for the covert users, typicality
// decoding of the non-covert message, threshold decoding of the covert
// messages, and an exact-mixture importance estimate of the warden
// divergence delta_n. Covert codewords are stored as sorted lists of their
// one-positions; everything else is O(n) per trial.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <thread>
#include <vector>

#include "covertmac/optimize.hpp"
#include "covertmac/region.hpp"
#include "covertmac/rng.hpp"

namespace covertmac {

struct SimConfig {
  int n = 1000;
  // omega_n = omega_c * n^(-omega_p); validity requires omega_p in (0, 1/2)
  // so that omega_n -> 0 while omega_n * sqrt(n) - log n -> infinity.
  double omega_c = 1.0;
  double omega_p = 1.0 / 3.0;
  double mu_n = 0.0;  // typicality radius; 0 means n^(-1/3)
  double mu1 = 0.1, mu2 = 0.1;
  std::array<double, 6> xi{0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
  std::array<double, 2> phi{1.0, 1.0};
  uint64_t M1 = 1, K1 = 1, M2 = 1, K2 = 1, M3 = 1;
  uint64_t seed = 1;
  bool redraw = false;  // fresh codebook per trial
  int threads = 0;
  uint64_t mixture_cap = 4096;

  double omega_n() const { return omega_c * std::pow(static_cast<double>(n), -omega_p); }
  double alpha_n() const { return omega_n() / std::sqrt(static_cast<double>(n)); }
  double typicality_radius() const {
    return mu_n > 0.0 ? mu_n : std::pow(static_cast<double>(n), -1.0 / 3.0);
  }
};

inline void validate_config(const SimConfig& c, const CovertParams& p) {
  if (c.n < p.joint.t_size) throw DomainError("sim: blocklength below phase count");
  if (!(c.omega_p > 0.0 && c.omega_p < 0.5) || c.omega_c <= 0.0)
    throw DomainError("sim: omega rule must be c*n^(-p) with p in (0, 1/2)");
  if (c.mu1 <= 0.0 || c.mu1 >= 1.0 || c.mu2 <= 0.0 || c.mu2 >= 1.0)
    throw DomainError("sim: mu1, mu2 must lie in (0,1)");
  if (c.phi[0] <= 0.0 || c.phi[0] > 1.0 || c.phi[1] < 0.0 || c.phi[1] > 1.0)
    throw DomainError("sim: phi outside (0,1]");
  if (c.phi[0] < c.phi[1])
    throw DomainError("sim: requires phi1 >= phi2 (swap the user indices otherwise)");
  double a = c.alpha_n();
  for (const auto& r : p.rho)
    if (r[0] * a > 1.0 || r[1] * a > 1.0)
      throw DomainError("sim: rho * alpha_n exceeds 1");
  if (c.M1 < 1 || c.K1 < 1 || c.M2 < 1 || c.K2 < 1 || c.M3 < 1)
    throw DomainError("sim: sizes must be >= 1");
}

struct MultiplexSequence {
  std::vector<uint8_t> t_seq;
  std::vector<double> type_vec;  // pi, multiples of 1/n
};

// Largest-remainder rounding of p_t to a length-n composition; ties go to
// the lower phase index. Phases of zero probability never appear.
inline MultiplexSequence build_multiplex(const std::vector<double>& p_t, int n) {
  int T = static_cast<int>(p_t.size());
  if (n < T) throw DomainError("build_multiplex: n below phase count");
  std::vector<int> cnt(T);
  std::vector<std::pair<double, int>> rem(T);
  int used = 0;
  for (int t = 0; t < T; ++t) {
    double exact = p_t[t] * n;
    cnt[t] = static_cast<int>(std::floor(exact));
    rem[t] = {exact - cnt[t], t};
    used += cnt[t];
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int i = 0; i < n - used; ++i) cnt[rem[i].second] += 1;
  MultiplexSequence out;
  out.t_seq.reserve(n);
  out.type_vec.resize(T);
  for (int t = 0; t < T; ++t) {
    out.type_vec[t] = static_cast<double>(cnt[t]) / n;
    out.t_seq.insert(out.t_seq.end(), cnt[t], static_cast<uint8_t>(t));
  }
  return out;
}

// Slot classes: 2 = both users' codewords, 1 = user 1 codeword + user 2
// local randomness, 0 = silent.
enum : uint8_t { kSlotSilent = 0, kSlotL1 = 1, kSlotL12 = 2 };

struct Codebook {
  MultiplexSequence mux;
  std::vector<uint8_t> slot_class;            // per position
  std::vector<std::vector<uint32_t>> x1, x2;  // one-positions per (w,s)
  std::vector<std::vector<uint8_t>> x3;       // full sequences per w3
};

inline Codebook generate_codebooks(const SimConfig& cfg, const CovertParams& p,
                                   const Dmmac& ch, std::mt19937_64& rng) {
  validate_config(cfg, p);
  validate_params(p, ch);
  Codebook cb;
  std::vector<double> p_t(p.joint.t_size);
  for (int t = 0; t < p.joint.t_size; ++t) p_t[t] = p.joint.t_marginal(t);
  cb.mux = build_multiplex(p_t, cfg.n);

  // Slot classes per phase block, round-to-nearest with the silent set
  // absorbing the deficit.
  cb.slot_class.assign(cfg.n, kSlotSilent);
  {
    int pos = 0;
    for (int t = 0; t < p.joint.t_size; ++t) {
      int nt = static_cast<int>(std::lround(cb.mux.type_vec[t] * cfg.n));
      int n12 = std::min(nt, static_cast<int>(std::lround(nt * cfg.phi[1])));
      int n1 = std::min(nt - n12,
                        static_cast<int>(std::lround(nt * (cfg.phi[0] - cfg.phi[1]))));
      for (int i = 0; i < n12; ++i) cb.slot_class[pos + i] = kSlotL12;
      for (int i = 0; i < n1; ++i) cb.slot_class[pos + n12 + i] = kSlotL1;
      pos += nt;
    }
  }

  double alpha = cfg.alpha_n();
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto draw_covert = [&](int user, uint64_t count) {
    std::vector<std::vector<uint32_t>> words(count);
    for (auto& w : words) {
      for (int i = 0; i < cfg.n; ++i) {
        uint8_t cls = cb.slot_class[i];
        bool active = (user == 0) ? (cls != kSlotSilent) : (cls == kSlotL12);
        if (!active) continue;
        double a = p.rho[cb.mux.t_seq[i]][user] * alpha;
        if (a > 0.0 && uni(rng) < a) w.push_back(static_cast<uint32_t>(i));
      }
    }
    return words;
  };
  cb.x1 = draw_covert(0, cfg.M1 * cfg.K1);
  cb.x2 = draw_covert(1, cfg.M2 * cfg.K2);

  cb.x3.resize(cfg.M3);
  for (auto& w : cb.x3) {
    w.resize(cfg.n);
    for (int i = 0; i < cfg.n; ++i) {
      int t = cb.mux.t_seq[i];
      double pt = p.joint.t_marginal(t);
      double u = uni(rng), acc = 0.0;
      int pick = ch.x3_size() - 1;
      for (int x3 = 0; x3 < ch.x3_size(); ++x3) {
        acc += (pt > 0.0 ? p.joint.prob(t, x3) / pt : (x3 == 0 ? 1.0 : 0.0));
        if (u < acc) {
          pick = x3;
          break;
        }
      }
      w[i] = static_cast<uint8_t>(pick);
    }
  }
  return cb;
}

struct Encoded {
  // x1, x2 as one-position lists (already includes user 2's local
  // randomness under the generalized scheme); x3 points into the codebook.
  std::vector<uint32_t> x1, x2;
  const std::vector<uint8_t>* x3 = nullptr;
};

inline Encoded encode(const SimConfig& cfg, const CovertParams& p, const Codebook& cb,
                      int hypothesis, uint64_t w1, uint64_t s1, uint64_t w2,
                      uint64_t s2, uint64_t w3, std::mt19937_64& rng) {
  if (w1 >= cfg.M1 || s1 >= cfg.K1 || w2 >= cfg.M2 || s2 >= cfg.K2 || w3 >= cfg.M3)
    throw DomainError("encode: index out of range");
  Encoded e;
  e.x3 = &cb.x3[w3];
  if (hypothesis == 0) return e;
  e.x1 = cb.x1[w1 * cfg.K1 + s1];
  e.x2 = cb.x2[w2 * cfg.K2 + s2];
  // user 2's local randomness on the L1 slots
  double alpha = cfg.alpha_n();
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<uint32_t> extra;
  for (int i = 0; i < cfg.n; ++i) {
    if (cb.slot_class[i] != kSlotL1) continue;
    double a = p.rho[cb.mux.t_seq[i]][1] * alpha;
    if (a > 0.0 && uni(rng) < a) extra.push_back(static_cast<uint32_t>(i));
  }
  if (!extra.empty()) {
    e.x2.insert(e.x2.end(), extra.begin(), extra.end());
    std::sort(e.x2.begin(), e.x2.end());
  }
  return e;
}

// Thresholds eta_l: slack (1 - mu_l) times the expected log-likelihood mass
// of the correct codeword over its active slots.
inline std::array<double, 2> decode_thresholds(const SimConfig& cfg,
                                               const CovertParams& p, const Dmmac& ch) {
  DivergenceProfile d = divergence_profile(ch);
  std::array<double, 2> eta{0, 0};
  for (int l = 0; l < 2; ++l) {
    double e = 0.0;
    for (int t = 0; t < p.joint.t_size; ++t)
      for (int x3 = 0; x3 < ch.x3_size(); ++x3)
        e += p.joint.prob(t, x3) * p.rho[t][l] * (l == 0 ? d.dy1[x3] : d.dy2[x3]);
    double mu = (l == 0) ? cfg.mu1 : cfg.mu2;
    eta[l] = (1.0 - mu) * cfg.phi[l] * cfg.n * cfg.alpha_n() * e;
  }
  return eta;
}

struct DecodeResult {
  bool ok3 = false, ok1 = false, ok2 = false;
  uint64_t w3 = 0, w1 = 0, w2 = 0;
};

inline DecodeResult decode(const SimConfig& cfg, const CovertParams& p,
                           const Codebook& cb, const Dmmac& ch,
                           const std::vector<uint8_t>& y, uint64_t s1, uint64_t s2,
                           const std::array<double, 2>& eta) {
  DecodeResult res;
  // Non-covert message: unique jointly typical codeword under the
  // covert-users-silent law, L-infinity distance on joint types.
  if (cfg.M3 == 1) {
    res.ok3 = true;
    res.w3 = 0;
  } else {
    double mu = cfg.typicality_radius();
    int hits = 0;
    for (uint64_t w = 0; w < cfg.M3; ++w) {
      const auto& x3 = cb.x3[w];
      std::vector<double> type(static_cast<size_t>(p.joint.t_size) * ch.x3_size() *
                                   ch.y_size(),
                               0.0);
      double inv = 1.0 / cfg.n;
      for (int i = 0; i < cfg.n; ++i)
        type[(static_cast<size_t>(cb.mux.t_seq[i]) * ch.x3_size() + x3[i]) *
                 ch.y_size() +
             y[i]] += inv;
      double linf = 0.0;
      for (int t = 0; t < p.joint.t_size; ++t)
        for (int a = 0; a < ch.x3_size(); ++a)
          for (int b = 0; b < ch.y_size(); ++b) {
            double target = p.joint.prob(t, a) * ch.y(0, 0, a, b);
            double got = type[(static_cast<size_t>(t) * ch.x3_size() + a) *
                                  ch.y_size() +
                              b];
            linf = std::max(linf, std::abs(got - target));
          }
      if (linf <= mu) {
        ++hits;
        res.w3 = w;
      }
    }
    res.ok3 = (hits == 1);
    if (!res.ok3) return res;
  }

  const auto& x3 = cb.x3[res.w3];
  auto run_user = [&](int user, uint64_t M, uint64_t K, uint64_t s,
                      const std::vector<std::vector<uint32_t>>& words, double thr,
                      bool& ok, uint64_t& out_w) {
    if (M == 1) {
      ok = true;
      out_w = 0;
      return;
    }
    int hits = 0;
    for (uint64_t w = 0; w < M; ++w) {
      const auto& ones = words[w * K + s];
      double score = 0.0;
      for (uint32_t i : ones) {
        uint8_t cls = cb.slot_class[i];
        bool active = (user == 0) ? (cls != kSlotSilent) : (cls == kSlotL12);
        if (!active) continue;
        double on = (user == 0) ? ch.y(1, 0, x3[i], y[i]) : ch.y(0, 1, x3[i], y[i]);
        double off = ch.y(0, 0, x3[i], y[i]);
        score += std::log(on / off);
      }
      if (score >= thr) {
        ++hits;
        out_w = w;
      }
    }
    ok = (hits == 1);
  };
  run_user(0, cfg.M1, cfg.K1, s1, cb.x1, eta[0], res.ok1, res.w1);
  run_user(1, cfg.M2, cfg.K2, s2, cb.x2, eta[1], res.ok2, res.w2);
  return res;
}

struct WilsonInterval {
  double lo = 0, hi = 0;
};

inline WilsonInterval wilson(double phat, uint64_t n) {
  if (n == 0) return {0.0, 1.0};
  double z = 1.959963984540054;  // 95%
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  // at the boundary observations the interval must touch the boundary exactly
  double lo = phat <= 0.0 ? 0.0 : std::max(0.0, center - half);
  double hi = phat >= 1.0 ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

struct SimResult {
  uint64_t trials0 = 0, trials1 = 0;
  double pe0_hat = 0, pe1_hat = 0;
  WilsonInterval pe0_ci, pe1_ci;
  // per-error-type breakdown under H=1
  double pe1_w1 = 0, pe1_w2 = 0, pe1_w3 = 0;
  // divergence estimates
  std::vector<double> delta_hat, delta_se;  // per w3
  double delta_avg = 0, delta_max = 0, delta_avg_se = 0;
  double theory_delta = 0, theory_ratio = 0;
};

namespace detail {

template <typename Fn>
inline void parallel_items(uint64_t count, int threads, Fn&& fn) {
  int workers = worker_count(threads);
  if (workers <= 1 || count < 2) {
    for (uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<uint64_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (uint64_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

// Kahan-style accumulation so parallel aggregation stays order-independent:
// partial sums are collected per item index and reduced sequentially.
inline double reduce(const std::vector<double>& v) {
  double s = 0.0, c = 0.0;
  for (double x : v) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace detail

inline SimResult run_trials(const SimConfig& cfg, const CovertParams& p,
                            const Dmmac& ch, uint64_t trials) {
  if (trials < 1) throw DomainError("run_trials: trials >= 1");
  validate_config(cfg, p);
  SimResult res;
  auto eta = decode_thresholds(cfg, p, ch);

  std::mt19937_64 cb_rng = stream_rng(cfg.seed, 0xC0DEB00CULL);
  Codebook shared = generate_codebooks(cfg, p, ch, cb_rng);

  std::vector<double> err0(trials, 0.0), err1(trials, 0.0);
  std::vector<double> e1w1(trials, 0.0), e1w2(trials, 0.0), e1w3(trials, 0.0);

  detail::parallel_items(trials, cfg.threads, [&](uint64_t i) {
    auto rng = stream_rng(cfg.seed, 1 + i);
    const Codebook* cb = &shared;
    Codebook own;
    if (cfg.redraw) {
      auto crng = stream_rng(cfg.seed, 0xC0DEB00CULL + 1 + i);
      own = generate_codebooks(cfg, p, ch, crng);
      cb = &own;
    }
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto pick = [&](uint64_t m) {
      return std::min<uint64_t>(m - 1, static_cast<uint64_t>(uni(rng) * m));
    };
    uint64_t w1 = pick(cfg.M1), s1 = pick(cfg.K1), w2 = pick(cfg.M2),
             s2 = pick(cfg.K2), w3 = pick(cfg.M3);
    for (int H : {0, 1}) {
      Encoded e = encode(cfg, p, *cb, H, w1, s1, w2, s2, w3, rng);
      // channel pass
      std::vector<uint8_t> y(cfg.n);
      std::vector<uint8_t> x1f(cfg.n, 0), x2f(cfg.n, 0);
      for (uint32_t j : e.x1) x1f[j] = 1;
      for (uint32_t j : e.x2) x2f[j] = 1;
      for (int j = 0; j < cfg.n; ++j) {
        auto row = ch.y_row(x1f[j], x2f[j], (*e.x3)[j]);
        double u = uni(rng), acc = 0.0;
        int pickv = ch.y_size() - 1;
        for (int v = 0; v < ch.y_size(); ++v) {
          acc += row[v];
          if (u < acc) {
            pickv = v;
            break;
          }
        }
        y[j] = static_cast<uint8_t>(pickv);
      }
      DecodeResult d = decode(cfg, p, *cb, ch, y, s1, s2, eta);
      if (H == 0) {
        bool ok = d.ok3 && d.w3 == w3;
        err0[i] = ok ? 0.0 : 1.0;
      } else {
        bool ok3 = d.ok3 && d.w3 == w3;
        bool ok1 = d.ok1 && d.w1 == w1;
        bool ok2 = d.ok2 && d.w2 == w2;
        err1[i] = (ok1 && ok2 && ok3) ? 0.0 : 1.0;
        e1w1[i] = ok1 ? 0.0 : 1.0;
        e1w2[i] = ok2 ? 0.0 : 1.0;
        e1w3[i] = ok3 ? 0.0 : 1.0;
      }
    }
  });

  res.trials0 = res.trials1 = trials;
  res.pe0_hat = detail::reduce(err0) / trials;
  res.pe1_hat = detail::reduce(err1) / trials;
  res.pe1_w1 = detail::reduce(e1w1) / trials;
  res.pe1_w2 = detail::reduce(e1w2) / trials;
  res.pe1_w3 = detail::reduce(e1w3) / trials;
  res.pe0_ci = wilson(res.pe0_hat, trials);
  res.pe1_ci = wilson(res.pe1_hat, trials);
  return res;
}

// Theory value of the average divergence (xi6 = 0 unless given).
inline double delta_theory(const SimConfig& cfg, const CovertParams& p,
                           const Dmmac& ch, double xi6 = 0.0) {
  double e = 0.0;
  for (int t = 0; t < p.joint.t_size; ++t) {
    double r1 = p.rho[t][0], r2 = p.rho[t][1];
    if (r1 + r2 == 0.0) continue;
    for (int x3 = 0; x3 < ch.x3_size(); ++x3) {
      double w = p.joint.prob(t, x3);
      if (w > 0.0) e += w * (r1 + r2) * (r1 + r2) * chi2_mixture(ch, r1, r2, x3);
    }
  }
  double wn = cfg.omega_n();
  return (1.0 + xi6) * std::max(cfg.phi[0], cfg.phi[1]) * wn * wn / 2.0 * e;
}

struct DeltaEstimate {
  double value = 0, se = 0;
};

// Unbiased Monte Carlo estimate of delta_{n, w3}: sample Z^n under the true
// H=1 mixture and average log(Qhat / base). Qhat is summed exactly over all
// (w1,s1,w2,s2) in log-space; user 2's local randomness on the L1 slots is
// integrated analytically through the averaged channel.
inline DeltaEstimate estimate_delta(const SimConfig& cfg, const CovertParams& p,
                                    const Codebook& cb, const Dmmac& ch,
                                    uint64_t w3, uint64_t samples) {
  if (samples < 1) throw DomainError("estimate_delta: samples >= 1");
  uint64_t n1 = cfg.M1 * cfg.K1, n2 = cfg.M2 * cfg.K2;
  if (n1 * n2 > cfg.mixture_cap)
    throw DomainError("estimate_delta: codeword-pair count exceeds the exact-mixture cap");
  const auto& x3 = cb.x3[w3];
  double alpha = cfg.alpha_n();

  // Short-circuit: all-zero covert codebooks (and no local randomness mass)
  // give exactly zero divergence.
  bool any_mass = false;
  for (const auto& w : cb.x1) any_mass |= !w.empty();
  for (const auto& w : cb.x2) any_mass |= !w.empty();
  for (int i = 0; i < cfg.n && !any_mass; ++i)
    if (cb.slot_class[i] == kSlotL1 && p.rho[cb.mux.t_seq[i]][1] * alpha > 0.0)
      any_mass = true;
  if (!any_mass) return {0.0, 0.0};

  // Per-slot channel laws under H=1 given covert bits (b1, b2); on L1 slots
  // user 2's bit is averaged out with intensity rho2*alpha.
  // law(i, b1, b2=0/1 meaningful only on codeword slots).
  auto slot_law = [&](int i, int b1, int b2, int z) -> double {
    uint8_t cls = cb.slot_class[i];
    if (cls == kSlotL1) {
      double a2 = p.rho[cb.mux.t_seq[i]][1] * alpha;
      return (1.0 - a2) * ch.z(b1, 0, x3[i], z) + a2 * ch.z(b1, 1, x3[i], z);
    }
    if (cls == kSlotSilent) return ch.z(0, 0, x3[i], z);
    return ch.z(b1, b2, x3[i], z);
  };

  // Per-sample: draw a pair, synthesize z, then score all pairs.
  std::vector<double> vals(samples, 0.0);
  double logN = std::log(static_cast<double>(n1)) + std::log(static_cast<double>(n2));

  detail::parallel_items(samples, cfg.threads, [&](uint64_t sidx) {
    auto rng = stream_rng(cfg.seed, 0xDE17A000ULL + sidx);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    uint64_t a = std::min<uint64_t>(n1 - 1, static_cast<uint64_t>(uni(rng) * n1));
    uint64_t b = std::min<uint64_t>(n2 - 1, static_cast<uint64_t>(uni(rng) * n2));
    std::vector<uint8_t> b1(cfg.n, 0), b2(cfg.n, 0);
    for (uint32_t j : cb.x1[a]) b1[j] = 1;
    for (uint32_t j : cb.x2[b]) b2[j] = 1;
    std::vector<uint8_t> z(cfg.n);
    for (int j = 0; j < cfg.n; ++j) {
      double u = uni(rng), acc = 0.0;
      int pick = ch.z_size() - 1;
      for (int v = 0; v < ch.z_size(); ++v) {
        acc += slot_law(j, b1[j], b2[j], v);
        if (u < acc) {
          pick = v;
          break;
        }
      }
      z[j] = static_cast<uint8_t>(pick);
    }

    // log(law / base) tables for this z: single-on corrections per slot and
    // the common L1 floor shared by every pair.
    double common = 0.0;
    std::vector<double> d10(cfg.n, 0.0), d01(cfg.n, 0.0), d11(cfg.n, 0.0);
    for (int j = 0; j < cfg.n; ++j) {
      double base = ch.z(0, 0, x3[j], z[j]);
      uint8_t cls = cb.slot_class[j];
      if (cls == kSlotSilent) continue;
      if (cls == kSlotL1) {
        double off = slot_law(j, 0, 0, z[j]);
        common += std::log(off / base);
        d10[j] = std::log(slot_law(j, 1, 0, z[j]) / off);
      } else {
        d10[j] = std::log(ch.z(1, 0, x3[j], z[j]) / base);
        d01[j] = std::log(ch.z(0, 1, x3[j], z[j]) / base);
        d11[j] = std::log(ch.z(1, 1, x3[j], z[j]) / base);
      }
    }
    // Per-codeword additive scores.
    std::vector<double> s1(n1, 0.0), s2(n2, 0.0);
    for (uint64_t w = 0; w < n1; ++w)
      for (uint32_t j : cb.x1[w]) s1[w] += d10[j];
    for (uint64_t w = 0; w < n2; ++w)
      for (uint32_t j : cb.x2[w])
        if (cb.slot_class[j] == kSlotL12) s2[w] += d01[j];
    // log-sum-exp over all pairs with the pairwise intersection correction.
    double mx = -kInf;
    std::vector<double> pair_scores;
    pair_scores.reserve(n1 * n2);
    for (uint64_t wa = 0; wa < n1; ++wa) {
      const auto& ones1 = cb.x1[wa];
      for (uint64_t wb = 0; wb < n2; ++wb) {
        const auto& ones2 = cb.x2[wb];
        double s = s1[wa] + s2[wb];
        // both-on slots in L12
        size_t ia = 0, ib = 0;
        while (ia < ones1.size() && ib < ones2.size()) {
          if (ones1[ia] < ones2[ib]) ++ia;
          else if (ones1[ia] > ones2[ib]) ++ib;
          else {
            uint32_t j = ones1[ia];
            if (cb.slot_class[j] == kSlotL12) s += d11[j] - d10[j] - d01[j];
            ++ia;
            ++ib;
          }
        }
        pair_scores.push_back(s);
        mx = std::max(mx, s);
      }
    }
    double acc = 0.0;
    for (double s : pair_scores) acc += std::exp(s - mx);
    vals[sidx] = common + mx + std::log(acc) - logN;
  });

  double mean = detail::reduce(vals) / samples;
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var = samples > 1 ? var / (samples - 1) : 0.0;
  return {mean, std::sqrt(var / samples)};
}

inline double covertness_bound(double delta) {
  if (delta < 0.0) throw DomainError("covertness_bound: delta >= 0");
  return std::clamp(1.0 - delta, 0.0, 1.0);
}

// Message/key sizes at `factor` times the finite-blocklength achievability
// expressions (factor applied to the message exponents; key totals follow
// the corresponding warden divergences).
struct SizePreset {
  uint64_t M1 = 1, K1 = 1, M2 = 1, K2 = 1, M3 = 1;
  double logM1 = 0, logM2 = 0, logM3 = 0;
};

inline SizePreset theorem_sizes(const SimConfig& cfg, const CovertParams& p,
                                const Dmmac& ch, double factor) {
  DivergenceProfile d = divergence_profile(ch);
  double ey1 = 0, ey2 = 0, ez1 = 0, ez2 = 0;
  for (int t = 0; t < p.joint.t_size; ++t)
    for (int x3 = 0; x3 < ch.x3_size(); ++x3) {
      double w = p.joint.prob(t, x3);
      ey1 += w * p.rho[t][0] * d.dy1[x3];
      ey2 += w * p.rho[t][1] * d.dy2[x3];
      ez1 += w * p.rho[t][0] * d.dz1[x3];
      ez2 += w * p.rho[t][1] * d.dz2[x3];
    }
  double scale = cfg.omega_n() * std::sqrt(static_cast<double>(cfg.n));
  SizePreset out;
  out.logM1 = factor * (1.0 - cfg.xi[0]) * cfg.phi[0] * scale * ey1;
  out.logM2 = factor * (1.0 - cfg.xi[1]) * cfg.phi[1] * scale * ey2;
  out.logM3 = factor * (1.0 - cfg.xi[2]) * cfg.n * cond_mi_nc(ch, p.joint);
  double logMK1 = (1.0 + cfg.xi[3]) * cfg.phi[0] * scale * ez1;
  double logMK2 = (1.0 + cfg.xi[4]) * cfg.phi[1] * scale * ez2;
  auto sz = [](double lg) {
    // clamp so the count fits comfortably in 64 bits; callers needing the
    // exact exponent use the log fields
    lg = std::min(lg, 40.0);
    return std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(std::exp(lg))));
  };
  out.M1 = sz(out.logM1);
  out.M2 = sz(out.logM2);
  out.M3 = sz(out.logM3);
  out.K1 = sz(std::max(0.0, logMK1 - out.logM1));
  out.K2 = sz(std::max(0.0, logMK2 - out.logM2));
  return out;
}

}  // namespace covertmac
