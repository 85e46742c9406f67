#pragma once

// Search over the existential parameters of the achievable region: the joint
// phase/input law P_{TX3}, per-phase intensities rho, and the beta pair.
// Beta is eliminated analytically (the rates are linear in it), so the
// numerical search runs over an unconstrained reparameterization of
// (P_{TX3}, rho): softmax for the simplex, exp for the intensities.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "covertmac/region.hpp"
#include "covertmac/rng.hpp"

namespace covertmac {

enum class Axis { r1, r2, R3 };

inline std::string axis_name(Axis a) {
  switch (a) {
    case Axis::r1: return "r1";
    case Axis::r2: return "r2";
    default: return "R3";
  }
}

inline std::optional<Axis> axis_from_name(const std::string& s) {
  if (s == "r1") return Axis::r1;
  if (s == "r2") return Axis::r2;
  if (s == "R3" || s == "r3") return Axis::R3;
  return std::nullopt;
}

struct RegionQuery {
  std::array<double, 3> weights{0, 0, 0};  // (r1, r2, R3)
  std::array<double, 2> budget{kInf, kInf};
  std::optional<double> fix_r1, fix_r2, fix_R3;
};

struct MaximizeOptions {
  int t_size = 6;
  int starts = 64;
  uint64_t seed = 1;
  int grid = 0;  // > 0: deterministic coarse grid (|T| = 1) instead of search
  int threads = 0;
  int force_x3 = -1;  // >= 0: pin X3 to this symbol on every phase
};

struct MaximizeResult {
  bool feasible = false;
  std::string message;
  RateKeyTuple tuple;
  CovertParams params;
  double objective = -kInf;
};

inline int worker_count(int requested) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("COVERTMAC_THREADS")) n = std::atoi(env);
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
  }
  return std::max(1, n);
}

namespace detail {

// Precomputed channel tables so one objective evaluation is allocation-free.
struct RegionEvaluator {
  int x3_size = 0, t_size = 0;
  int force_x3 = -1;
  std::array<std::vector<double>, 2> dy, dz;  // per user, indexed by x3
  std::function<double(double, double, int)> chi2;
  std::function<double(const JointInputLaw&)> r3;

  static RegionEvaluator for_mac(const Dmmac& ch, int t_size, int force_x3 = -1) {
    RegionEvaluator ev;
    DivergenceProfile d = divergence_profile(ch);
    ev.x3_size = ch.x3_size();
    ev.t_size = t_size;
    ev.force_x3 = force_x3;
    ev.dy = {d.dy1, d.dy2};
    ev.dz = {d.dz1, d.dz2};
    ev.chi2 = [ch](double a, double b, int x3) { return chi2_mixture(ch, a, b, x3); };
    ev.r3 = [ch](const JointInputLaw& j) { return cond_mi_nc(ch, j); };
    return ev;
  }

  static RegionEvaluator for_ic(const DmicChannel& ch, int t_size, int force_x3 = -1) {
    RegionEvaluator ev;
    Dmmac m1 = ch.receiver_mac(1), m2 = ch.receiver_mac(2);
    DivergenceProfile d1 = divergence_profile(m1), d2 = divergence_profile(m2);
    ev.x3_size = ch.x3_size();
    ev.t_size = t_size;
    ev.force_x3 = force_x3;
    ev.dy = {d1.dy1, d2.dy2};
    ev.dz = {d1.dz1, d1.dz2};
    ev.chi2 = [m1](double a, double b, int x3) { return chi2_mixture(m1, a, b, x3); };
    ev.r3 = [m1, m2](const JointInputLaw& j) {
      return std::min(cond_mi_nc(m1, j), cond_mi_nc(m2, j));
    };
    return ev;
  }

  int simplex_dim() const { return force_x3 >= 0 ? t_size : t_size * x3_size; }
  int dim() const { return simplex_dim() + 2 * t_size; }

  // u -> (joint, rho)
  void decode(const std::vector<double>& u, JointInputLaw& joint,
              std::vector<std::array<double, 2>>& rho) const {
    joint.t_size = t_size;
    joint.x3_size = x3_size;
    joint.p.assign(static_cast<size_t>(t_size) * x3_size, 0.0);
    int n = simplex_dim();
    double mx = -kInf;
    for (int i = 0; i < n; ++i) mx = std::max(mx, u[i]);
    double sum = 0.0;
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
      w[i] = std::exp(std::clamp(u[i] - mx, -40.0, 0.0));
      sum += w[i];
    }
    for (int i = 0; i < n; ++i) w[i] /= sum;
    if (force_x3 >= 0) {
      for (int t = 0; t < t_size; ++t)
        joint.p[static_cast<size_t>(t) * x3_size + force_x3] = w[t];
    } else {
      for (int i = 0; i < n; ++i) joint.p[i] = w[i];
    }
    rho.resize(t_size);
    for (int t = 0; t < t_size; ++t)
      for (int l = 0; l < 2; ++l)
        rho[t][l] = std::exp(std::clamp(u[n + 2 * t + l], -25.0, 8.0));
  }

  CornerTerms terms(const JointInputLaw& joint,
                    const std::vector<std::array<double, 2>>& rho) const {
    CornerTerms out;
    out.R3 = r3(joint);
    double den2 = 0.0;
    std::array<double, 2> num_r{0, 0}, num_k{0, 0};
    for (int t = 0; t < t_size; ++t) {
      double r1 = rho[t][0], r2 = rho[t][1];
      for (int x3 = 0; x3 < x3_size; ++x3) {
        double w = joint.prob(t, x3);
        if (w == 0.0) continue;
        if (r1 + r2 > 0.0) den2 += w * (r1 + r2) * (r1 + r2) * chi2(r1, r2, x3);
        for (int l = 0; l < 2; ++l) {
          if (rho[t][l] == 0.0) continue;
          num_r[l] += w * rho[t][l] * dy[l][x3];
          num_k[l] += w * rho[t][l] * (dz[l][x3] - dy[l][x3]);
        }
      }
    }
    out.denom = std::sqrt(std::max(den2, 1e-300));
    for (int l = 0; l < 2; ++l) {
      out.a[l] = std::sqrt(2.0) * num_r[l] / out.denom;
      out.b[l] = std::sqrt(2.0) * num_k[l] / out.denom;
    }
    return out;
  }
};

struct BetaChoice {
  std::array<double, 2> beta{0, 0};
  double violation = 0;  // constraint slack used as a penalty
};

inline BetaChoice choose_beta(const CornerTerms& t, const RegionQuery& q) {
  BetaChoice out;
  for (int l = 0; l < 2; ++l) {
    const std::optional<double>& fix = (l == 0) ? q.fix_r1 : q.fix_r2;
    double cap = 1.0;
    if (t.b[l] > 0.0 && q.budget[l] < kInf)
      cap = std::min(cap, q.budget[l] / t.b[l]);
    if (fix) {
      double want = *fix;
      if (t.a[l] <= 0.0) {
        out.beta[l] = 0.0;
        out.violation += want;  // cannot reach a positive rate
      } else {
        double b = want / t.a[l];
        out.beta[l] = std::min(b, cap);
        if (b > cap) out.violation += (b - cap) * t.a[l];
      }
    } else {
      out.beta[l] = std::max(0.0, cap);
    }
  }
  return out;
}

inline double query_objective(const RegionQuery& q, const CornerTerms& t,
                              const BetaChoice& bc) {
  double r1 = bc.beta[0] * t.a[0], r2 = bc.beta[1] * t.a[1];
  double obj = q.weights[0] * r1 + q.weights[1] * r2 + q.weights[2] * t.R3;
  double viol = bc.violation;
  if (q.fix_R3 && t.R3 < *q.fix_R3) viol += (*q.fix_R3 - t.R3);
  return obj - 1e4 * viol;
}

// Derivative-free simplex refinement with a fixed evaluation budget.
inline void nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                        std::vector<double>& x, double& fx, double step, int max_eval) {
  size_t n = x.size();
  std::vector<std::vector<double>> pts(n + 1, x);
  std::vector<double> fv(n + 1);
  fv[0] = fx;
  int evals = 0;
  for (size_t i = 0; i < n; ++i) {
    pts[i + 1][i] += step;
    fv[i + 1] = f(pts[i + 1]);
    ++evals;
  }
  auto order = [&]() {
    std::vector<size_t> idx(n + 1);
    for (size_t i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return fv[a] > fv[b]; });
    std::vector<std::vector<double>> p2(n + 1);
    std::vector<double> f2(n + 1);
    for (size_t i = 0; i <= n; ++i) {
      p2[i] = pts[idx[i]];
      f2[i] = fv[idx[i]];
    }
    pts.swap(p2);
    fv.swap(f2);
  };
  std::vector<double> cen(n), xr(n), xe(n), xc(n);
  while (evals < max_eval) {
    order();
    if (fv[0] - fv[n] < 1e-12) break;
    for (size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (size_t i = 0; i < n; ++i) s += pts[i][j];
      cen[j] = s / n;
    }
    for (size_t j = 0; j < n; ++j) xr[j] = cen[j] + (cen[j] - pts[n][j]);
    double fr = f(xr);
    ++evals;
    if (fr > fv[0]) {
      for (size_t j = 0; j < n; ++j) xe[j] = cen[j] + 2.0 * (cen[j] - pts[n][j]);
      double fe = f(xe);
      ++evals;
      if (fe > fr) {
        pts[n] = xe;
        fv[n] = fe;
      } else {
        pts[n] = xr;
        fv[n] = fr;
      }
    } else if (fr > fv[n - 1]) {
      pts[n] = xr;
      fv[n] = fr;
    } else {
      for (size_t j = 0; j < n; ++j) xc[j] = cen[j] + 0.5 * (pts[n][j] - cen[j]);
      double fc = f(xc);
      ++evals;
      if (fc > fv[n]) {
        pts[n] = xc;
        fv[n] = fc;
      } else {
        for (size_t i = 1; i <= n; ++i) {
          for (size_t j = 0; j < n; ++j)
            pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
          fv[i] = f(pts[i]);
          ++evals;
        }
      }
    }
  }
  order();
  x = pts[0];
  fx = fv[0];
}

struct StartOutcome {
  double score = -kInf;
  std::vector<double> u;
};

inline MaximizeResult maximize_impl(const RegionQuery& q, const RegionEvaluator& ev,
                                    const MaximizeOptions& opts,
                                    const std::vector<double>* hint) {
  MaximizeResult res;
  if (q.budget[0] < 0.0 || q.budget[1] < 0.0) {
    res.message = "negative key budget";
    return res;
  }
  bool any_weight = q.weights[0] > 0 || q.weights[1] > 0 || q.weights[2] > 0;
  if (!any_weight) throw DomainError("maximize: all objective weights are zero");

  JointInputLaw joint;
  std::vector<std::array<double, 2>> rho;
  auto score_of = [&](const std::vector<double>& u) {
    JointInputLaw j;
    std::vector<std::array<double, 2>> r;
    ev.decode(u, j, r);
    CornerTerms t = ev.terms(j, r);
    return query_objective(q, t, choose_beta(t, q));
  };

  int dim = ev.dim();
  int total = opts.starts + (hint ? 1 : 0);
  std::vector<StartOutcome> outs(total);
  auto run_start = [&](int s) {
    std::vector<double> u(dim);
    if (hint && s == opts.starts) {
      u = *hint;
    } else {
      auto rng = stream_rng(opts.seed, static_cast<uint64_t>(s));
      std::uniform_real_distribution<double> uni(-3.0, 3.0);
      for (double& v : u) v = uni(rng);
    }
    double fu = score_of(u);
    // Coordinate pattern search to get into a good basin. The useful optima
    // often sit near the boundary of the reparameterized space (degenerate
    // phase laws, widely separated per-phase intensities), so the walk has to
    // be able to travel several units per coordinate before refinement.
    double step = 3.2;
    for (int round = 0; round < 7; ++round) {
      for (int i = 0; i < dim; ++i) {
        for (double sgn : {1.0, -1.0}) {
          std::vector<double> v = u;
          v[i] += sgn * step;
          double fv = score_of(v);
          if (fv > fu) {
            u = std::move(v);
            fu = fv;
          }
        }
      }
      step *= 0.5;
    }
    nelder_mead(score_of, u, fu, 0.25, 220 * dim);
    outs[s] = {fu, std::move(u)};
  };

  int workers = std::min(worker_count(opts.threads), total);
  if (workers <= 1) {
    for (int s = 0; s < total; ++s) run_start(s);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (int s = next.fetch_add(1); s < total; s = next.fetch_add(1)) run_start(s);
      });
    for (auto& th : pool) th.join();
  }

  int best = 0;
  for (int s = 1; s < total; ++s) {
    if (outs[s].score > outs[best].score ||
        (outs[s].score == outs[best].score && outs[s].u < outs[best].u))
      best = s;
  }

  ev.decode(outs[best].u, joint, rho);
  CornerTerms t = ev.terms(joint, rho);
  BetaChoice bc = choose_beta(t, q);
  if (bc.violation > 1e-6 || (q.fix_R3 && t.R3 < *q.fix_R3 - 1e-6)) {
    res.message = "requested constraints unreachable at the best point found";
    return res;
  }
  res.feasible = true;
  res.params.joint = joint;
  res.params.rho = rho;
  res.params.beta = {std::clamp(bc.beta[0], 0.0, 1.0), std::clamp(bc.beta[1], 0.0, 1.0)};
  RateKeyTuple tup;
  tup.r1 = res.params.beta[0] * t.a[0];
  tup.r2 = res.params.beta[1] * t.a[1];
  tup.R3 = t.R3;
  tup.k1_raw = res.params.beta[0] * t.b[0];
  tup.k2_raw = res.params.beta[1] * t.b[1];
  tup.k1 = std::max(0.0, tup.k1_raw);
  tup.k2 = std::max(0.0, tup.k2_raw);
  res.tuple = tup;
  res.objective = q.weights[0] * tup.r1 + q.weights[1] * tup.r2 + q.weights[2] * tup.R3;
  return res;
}

// Coarse deterministic audit grid: single phase, x3 law on a simplex grid,
// rho direction on a 1-D grid. Intended for cross-checking, not for tight
// optima.
inline MaximizeResult maximize_grid(const RegionQuery& q, const RegionEvaluator& ev,
                                    int n) {
  if (ev.x3_size > 6) throw DomainError("maximize: grid mode needs |X3| <= 6");
  MaximizeResult res;
  JointInputLaw joint;
  joint.t_size = 1;
  joint.x3_size = ev.x3_size;
  std::vector<std::array<double, 2>> rho(1);
  std::vector<int> comp(ev.x3_size, 0);
  auto scan_rho = [&]() {
      for (int s = 0; s <= n; ++s) {
        rho[0] = {static_cast<double>(s) / n, static_cast<double>(n - s) / n};
        if (rho[0][0] + rho[0][1] == 0.0) continue;
        CornerTerms t = ev.terms(joint, rho);
        BetaChoice bc = choose_beta(t, q);
        double sc = query_objective(q, t, bc);
        if (sc > res.objective + 1e-15 ||
            (!res.feasible && sc > res.objective)) {
          if (bc.violation > 1e-6 || (q.fix_R3 && t.R3 < *q.fix_R3 - 1e-6)) continue;
          res.feasible = true;
          res.objective = sc;
          res.params.joint = joint;
          res.params.rho = rho;
          res.params.beta = {std::clamp(bc.beta[0], 0.0, 1.0),
                             std::clamp(bc.beta[1], 0.0, 1.0)};
          RateKeyTuple tup;
          tup.r1 = res.params.beta[0] * t.a[0];
          tup.r2 = res.params.beta[1] * t.a[1];
          tup.R3 = t.R3;
          tup.k1_raw = res.params.beta[0] * t.b[0];
          tup.k2_raw = res.params.beta[1] * t.b[1];
          tup.k1 = std::max(0.0, tup.k1_raw);
          tup.k2 = std::max(0.0, tup.k2_raw);
          res.tuple = tup;
        }
      }
  };
  if (ev.force_x3 >= 0) {
    joint.p.assign(ev.x3_size, 0.0);
    joint.p[ev.force_x3] = 1.0;
    scan_rho();
  } else {
    std::function<void(int, int)> walk = [&](int pos, int left) {
      if (pos == ev.x3_size - 1) {
        comp[pos] = left;
        joint.p.assign(ev.x3_size, 0.0);
        for (int i = 0; i < ev.x3_size; ++i)
          joint.p[i] = static_cast<double>(comp[i]) / n;
        scan_rho();
        return;
      }
      for (int c = 0; c <= left; ++c) {
        comp[pos] = c;
        walk(pos + 1, left - c);
      }
    };
    walk(0, n);
  }
  if (!res.feasible) res.message = "no feasible grid point";
  else res.objective = q.weights[0] * res.tuple.r1 + q.weights[1] * res.tuple.r2 +
                       q.weights[2] * res.tuple.R3;
  return res;
}

}  // namespace detail

inline MaximizeResult maximize(const RegionQuery& q, const Dmmac& ch,
                               const MaximizeOptions& opts = {}) {
  auto ev = detail::RegionEvaluator::for_mac(ch, opts.t_size, opts.force_x3);
  if (opts.grid > 0) return detail::maximize_grid(q, ev, opts.grid);
  return detail::maximize_impl(q, ev, opts, nullptr);
}

inline MaximizeResult maximize(const RegionQuery& q, const DmicChannel& ch,
                               const MaximizeOptions& opts = {}) {
  MaximizeOptions o = opts;
  if (o.t_size == 6) o.t_size = 7;  // the IC parameterization uses one more phase
  auto ev = detail::RegionEvaluator::for_ic(ch, o.t_size, o.force_x3);
  if (o.grid > 0) return detail::maximize_grid(q, ev, o.grid);
  return detail::maximize_impl(q, ev, o, nullptr);
}

struct SweepPoint {
  double axis1 = 0, axis2 = 0;
  RateKeyTuple tuple;
  CovertParams params;
};

inline double axis_value(const RateKeyTuple& t, Axis a) {
  switch (a) {
    case Axis::r1: return t.r1;
    case Axis::r2: return t.r2;
    default: return t.R3;
  }
}

// Support-function sampling of one 2-D face of the region: weight angles
// sweep [0, pi/2]; a tiny secondary weight keeps the free axis maximal at
// the endpoints so the curve is well defined.
inline std::vector<SweepPoint> boundary_sweep(const Dmmac& ch, RegionQuery base,
                                              Axis a1, Axis a2, int angles = 181,
                                              MaximizeOptions opts = {}) {
  if (a1 == a2) throw DomainError("boundary_sweep: axes must differ");
  auto ev = detail::RegionEvaluator::for_mac(ch, opts.t_size, opts.force_x3);
  std::vector<SweepPoint> out;
  std::vector<double> hint;
  for (int i = 0; i < angles; ++i) {
    double th = (angles == 1) ? 0.0 : (M_PI / 2.0) * i / (angles - 1);
    RegionQuery q = base;
    q.weights = {0, 0, 0};
    q.weights[static_cast<int>(a1)] = std::cos(th) + 1e-6;
    q.weights[static_cast<int>(a2)] = std::sin(th) + 1e-6;
    MaximizeResult r = hint.empty()
                           ? detail::maximize_impl(q, ev, opts, nullptr)
                           : detail::maximize_impl(q, ev, opts, &hint);
    if (!r.feasible) continue;
    SweepPoint p;
    p.axis1 = axis_value(r.tuple, a1);
    p.axis2 = axis_value(r.tuple, a2);
    p.tuple = r.tuple;
    p.params = r.params;
    out.push_back(std::move(p));
    // reuse the winning basin for the next angle
    hint.resize(ev.dim());
    {
      const JointInputLaw& j = out.back().params.joint;
      int n = ev.simplex_dim();
      for (int k = 0; k < n; ++k) {
        double mass = ev.force_x3 >= 0
                          ? j.prob(k, ev.force_x3)
                          : j.p[k];
        hint[k] = std::log(std::max(mass, 1e-18));
      }
      for (int t = 0; t < opts.t_size; ++t)
        for (int l = 0; l < 2; ++l)
          hint[n + 2 * t + l] = std::log(std::max(out.back().params.rho[t][l], 1e-11));
    }
  }
  return out;
}

}  // namespace covertmac
