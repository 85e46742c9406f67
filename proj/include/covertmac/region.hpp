#pragma once

// Asymptotic rate-key regions: corner-point evaluation for the three-user
// MAC, the general L-user MAC (binary and non-binary covert alphabets), and
// the interference channel, plus the convexity mixture construction and the
// closed-form single-user tradeoff. All rates in nats; covert rates and key
// rates share the sqrt(n * delta_n) normalization, non-covert rates are per
// channel use.

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "covertmac/channel.hpp"
#include "covertmac/infodiv.hpp"

namespace covertmac {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct CovertParams {
  JointInputLaw joint;                      // P_{T X3}
  std::vector<std::array<double, 2>> rho;   // per phase (rho1_t, rho2_t)
  std::array<double, 2> beta{1.0, 1.0};
  // Per-phase beta override (used by convex_mix to splice parameter sets
  // with different global betas); empty means use `beta` on every phase.
  std::vector<std::array<double, 2>> beta_phase;

  double beta_of(int user, int t) const {
    return beta_phase.empty() ? beta[user] : beta_phase[t][user];
  }
};

struct RateKeyTuple {
  double r1 = 0, r2 = 0, R3 = 0;
  double k1 = 0, k2 = 0;          // required key rates, clamped below at 0
  double k1_raw = 0, k2_raw = 0;  // signed key expressions before clamping
};

inline void validate_params(const CovertParams& p, const Dmmac& ch) {
  if (p.joint.x3_size != ch.x3_size())
    throw DomainError("params: x3 alphabet mismatch");
  if (p.joint.t_size < 1 ||
      p.joint.p.size() != static_cast<size_t>(p.joint.t_size) * p.joint.x3_size)
    throw DomainError("params: joint law has wrong shape");
  if (p.rho.size() != static_cast<size_t>(p.joint.t_size))
    throw DomainError("params: need one rho pair per phase");
  double mass = 0.0;
  for (double v : p.joint.p) {
    if (v < 0.0) throw DomainError("params: negative probability");
    mass += v;
  }
  if (std::abs(mass - 1.0) > 1e-9) throw DomainError("params: joint law not normalized");
  for (auto [a, b] : p.rho)
    if (a < 0.0 || b < 0.0) throw DomainError("params: negative rho");
  auto bcheck = [](double b) {
    if (b < 0.0 || b > 1.0 + 1e-12) throw DomainError("params: beta outside [0,1]");
  };
  bcheck(p.beta[0]);
  bcheck(p.beta[1]);
  for (const auto& bp : p.beta_phase) {
    bcheck(bp[0]);
    bcheck(bp[1]);
  }
  if (!p.beta_phase.empty() && p.beta_phase.size() != p.rho.size())
    throw DomainError("params: beta_phase size mismatch");
}

// Linear pieces of the corner formulas at beta = 1: r_l = beta_l * a[l],
// raw key expression = beta_l * b[l]. Shared by corner, corner_ic and the
// optimizer's analytic beta elimination.
struct CornerTerms {
  std::array<double, 2> a{0, 0};
  std::array<double, 2> b{0, 0};
  double denom = 0;  // sqrt(E[(rho1+rho2)^2 chi^2])
  double R3 = 0;
};

namespace detail {

// dy_user[l][x3]: divergence at user l's own receiver; dz likewise at the
// warden. chi2(t, x3) must match the warden law used in dz.
template <typename Chi2Fn>
inline CornerTerms corner_terms_impl(const CovertParams& p,
                                     const std::array<const std::vector<double>*, 2>& dy,
                                     const std::array<const std::vector<double>*, 2>& dz,
                                     Chi2Fn chi2, double r3) {
  CornerTerms out;
  out.R3 = r3;
  double den2 = 0.0;
  std::array<double, 2> num_r{0, 0}, num_k{0, 0};
  for (int t = 0; t < p.joint.t_size; ++t) {
    double rho1 = p.rho[t][0], rho2 = p.rho[t][1];
    for (int x3 = 0; x3 < p.joint.x3_size; ++x3) {
      double w = p.joint.prob(t, x3);
      if (w == 0.0) continue;
      if (rho1 + rho2 > 0.0)
        den2 += w * (rho1 + rho2) * (rho1 + rho2) * chi2(rho1, rho2, x3);
      for (int l = 0; l < 2; ++l) {
        double rl = p.rho[t][l];
        if (rl == 0.0) continue;
        double bl = p.beta_of(l, t);
        num_r[l] += w * bl * rl * (*dy[l])[x3];
        num_k[l] += w * bl * rl * ((*dz[l])[x3] - (*dy[l])[x3]);
      }
    }
  }
  if (den2 <= 0.0)
    throw DomainError("corner: zero denominator (no active covert intensity)");
  out.denom = std::sqrt(den2);
  for (int l = 0; l < 2; ++l) {
    out.a[l] = std::sqrt(2.0) * num_r[l] / out.denom;
    out.b[l] = std::sqrt(2.0) * num_k[l] / out.denom;
  }
  return out;
}

inline RateKeyTuple tuple_from_terms(const CornerTerms& t) {
  RateKeyTuple out;
  out.r1 = t.a[0];
  out.r2 = t.a[1];
  out.R3 = t.R3;
  out.k1_raw = t.b[0];
  out.k2_raw = t.b[1];
  out.k1 = std::max(0.0, t.b[0]);
  out.k2 = std::max(0.0, t.b[1]);
  return out;
}

}  // namespace detail

// Terms with beta folded in (beta_of applied per phase).
inline CornerTerms corner_terms(const CovertParams& p, const Dmmac& ch) {
  validate_params(p, ch);
  DivergenceProfile d = divergence_profile(ch);
  auto chi2 = [&](double r1, double r2, int x3) { return chi2_mixture(ch, r1, r2, x3); };
  return detail::corner_terms_impl(p, {&d.dy1, &d.dy2}, {&d.dz1, &d.dz2}, chi2,
                                   cond_mi_nc(ch, p.joint));
}

inline RateKeyTuple corner(const CovertParams& p, const Dmmac& ch) {
  return detail::tuple_from_terms(corner_terms(p, ch));
}

inline CornerTerms corner_terms_ic(const CovertParams& p, const DmicChannel& ch) {
  Dmmac mac1 = ch.receiver_mac(1), mac2 = ch.receiver_mac(2);
  validate_params(p, mac1);
  DivergenceProfile d1 = divergence_profile(mac1);
  DivergenceProfile d2 = divergence_profile(mac2);
  auto chi2 = [&](double r1, double r2, int x3) { return chi2_mixture(mac1, r1, r2, x3); };
  double r3 = std::min(cond_mi_nc(mac1, p.joint), cond_mi_nc(mac2, p.joint));
  // User l's rate sees its own receiver Y_l; the warden terms are shared.
  return detail::corner_terms_impl(p, {&d1.dy1, &d2.dy2}, {&d1.dz1, &d1.dz2}, chi2, r3);
}

inline RateKeyTuple corner_ic(const CovertParams& p, const DmicChannel& ch) {
  return detail::tuple_from_terms(corner_terms_ic(p, ch));
}

// ---- General MAC (Theorems with L users / non-binary covert alphabets) ----

struct GeneralCovertParams {
  std::vector<double> t_pmf;
  // nc_law[t]: pmf over flattened non-covert tuples given T = t.
  std::vector<std::vector<double>> nc_law;
  // rho[t][l] for covert user l; beta[l] in [0,1].
  std::vector<std::vector<double>> rho;
  std::vector<double> beta;
  // psi[t][l]: pmf over user l's nonzero symbols; may be empty when all
  // covert alphabets are binary (then psi is the point mass on symbol 1).
  std::vector<std::vector<std::vector<double>>> psi;
};

struct GeneralRateKey {
  std::vector<double> r;            // covert users
  std::vector<double> r_nc_bound;   // indexed by subset mask - 1
  std::vector<double> k, k_raw;
};

inline GeneralRateKey corner_general(const GeneralCovertParams& p,
                                     const GeneralMac& ch) {
  int Lc = ch.l_c();
  int T = static_cast<int>(p.t_pmf.size());
  if (T < 1 || p.nc_law.size() != static_cast<size_t>(T) ||
      p.rho.size() != static_cast<size_t>(T))
    throw DomainError("corner_general: per-phase tables have wrong shape");
  if (static_cast<int>(p.beta.size()) != Lc)
    throw DomainError("corner_general: need one beta per covert user");
  bool nonbinary = false;
  for (int s : ch.covert_sizes()) nonbinary |= (s > 2);
  if (nonbinary && p.psi.empty())
    throw DomainError("corner_general: psi pmfs required for non-binary alphabets");

  // Psi-averaged divergences per (t, l, nc) and the chi-squared denominator.
  std::vector<int> zeros(Lc, 0);
  double den2 = 0.0;
  std::vector<double> num_r(Lc, 0.0), num_k(Lc, 0.0);
  for (int t = 0; t < T; ++t) {
    double pt = p.t_pmf[t];
    if (pt == 0.0) continue;
    if (static_cast<int>(p.rho[t].size()) != Lc)
      throw DomainError("corner_general: rho row has wrong length");
    std::vector<std::vector<double>> psis(Lc);
    for (int l = 0; l < Lc; ++l) {
      psis[l] = p.psi.empty() ? std::vector<double>(ch.covert_sizes()[l] - 1, 0.0)
                              : p.psi[t][l];
      if (p.psi.empty() && !psis[l].empty()) psis[l][0] = 1.0;
    }
    double norm1 = 0.0;
    for (double v : p.rho[t]) {
      if (v < 0.0) throw DomainError("corner_general: negative rho");
      norm1 += v;
    }
    for (int nc = 0; nc < ch.nc_tuple_count(); ++nc) {
      double w = pt * p.nc_law[t][nc];
      if (w == 0.0) continue;
      if (norm1 > 0.0)
        den2 += w * norm1 * norm1 * chi2_general(ch, p.rho[t], psis, nc);
      size_t base = ch.row_index_flat_nc(zeros, nc);
      for (int l = 0; l < Lc; ++l) {
        if (p.rho[t][l] == 0.0) continue;
        double dy = 0.0, dz = 0.0;
        for (int sym = 1; sym < ch.covert_sizes()[l]; ++sym) {
          double pw = psis[l][sym - 1];
          if (pw == 0.0) continue;
          std::vector<int> cov(Lc, 0);
          cov[l] = sym;
          size_t row = ch.row_index_flat_nc(cov, nc);
          auto vy = kl(ch.y_row(row), ch.y_row(base));
          auto vz = kl(ch.z_row(row), ch.z_row(base));
          if (!vy || !vz) throw DomainError("corner_general: infinite divergence");
          dy += pw * *vy;
          dz += pw * *vz;
        }
        num_r[l] += w * p.rho[t][l] * dy;
        num_k[l] += w * p.rho[t][l] * (dz - dy);
      }
    }
  }
  if (den2 <= 0.0)
    throw DomainError("corner_general: zero denominator (no active covert intensity)");
  double den = std::sqrt(den2);

  GeneralRateKey out;
  out.r.resize(Lc);
  out.k.resize(Lc);
  out.k_raw.resize(Lc);
  for (int l = 0; l < Lc; ++l) {
    out.r[l] = p.beta[l] * std::sqrt(2.0) * num_r[l] / den;
    out.k_raw[l] = p.beta[l] * std::sqrt(2.0) * num_k[l] / den;
    out.k[l] = std::max(0.0, out.k_raw[l]);
  }
  out.r_nc_bound = cond_mi_nc(ch, p.t_pmf, p.nc_law);
  return out;
}

// ---- Corollary-style special cases ----

// Channel with users 2 and 3 inert: covert capacity as a function of the
// available key rate. Evaluated at x3 = 0 (the channel must not depend on
// x2, x3 for the reduction to be meaningful).
inline double single_user_tradeoff(double k1, const Dmmac& ch) {
  if (k1 < 0.0) throw DomainError("single_user_tradeoff: negative key rate");
  auto dy = kl(ch.y_row(1, 0, 0), ch.y_row(0, 0, 0));
  auto dz = kl(ch.z_row(1, 0, 0), ch.z_row(0, 0, 0));
  if (!dy || !dz) throw DomainError("single_user_tradeoff: infinite divergence");
  double cap = std::sqrt(2.0) * *dy / std::sqrt(chi2_mixture(ch, 1.0, 0.0, 0));
  double gap = *dz - *dy;
  if (gap <= 0.0) return cap;  // key-free: the first branch is +inf
  if (*dy == 0.0) return 0.0;
  return std::min(k1 * *dy / gap, cap);
}

inline RateKeyTuple two_user_region_point(double rho1, double rho2,
                                          std::array<double, 2> beta,
                                          const Dmmac& ch) {
  if (std::abs(rho1 + rho2 - 1.0) > 1e-12)
    throw DomainError("two_user_region_point: rho1 + rho2 must equal 1");
  CovertParams p;
  p.joint.t_size = 1;
  p.joint.x3_size = ch.x3_size();
  p.joint.p.assign(ch.x3_size(), 0.0);
  p.joint.p[0] = 1.0;
  p.rho = {{rho1, rho2}};
  p.beta = beta;
  RateKeyTuple out = corner(p, ch);
  out.R3 = 0.0;
  return out;
}

inline RateKeyTuple jammer_region_point(const CovertParams& p, const Dmmac& ch) {
  RateKeyTuple out = corner(p, ch);
  out.R3 = 0.0;
  return out;
}

// ---- Convexity mixture (12-phase construction) ----

inline CovertParams convex_mix(const CovertParams& A, const CovertParams& B,
                               double lambda, const Dmmac& ch) {
  if (lambda < 0.0 || lambda > 1.0) throw DomainError("convex_mix: lambda in [0,1]");
  validate_params(A, ch);
  validate_params(B, ch);
  // nu rescales B's intensities so the chi-squared masses agree; then every
  // corner component is affine in the phase mixture.
  auto den = [&](const CovertParams& p) {
    double s = 0.0;
    for (int t = 0; t < p.joint.t_size; ++t) {
      double r1 = p.rho[t][0], r2 = p.rho[t][1];
      if (r1 + r2 == 0.0) continue;
      for (int x3 = 0; x3 < p.joint.x3_size; ++x3) {
        double w = p.joint.prob(t, x3);
        if (w > 0.0) s += w * (r1 + r2) * (r1 + r2) * chi2_mixture(ch, r1, r2, x3);
      }
    }
    return s;
  };
  double dA = den(A), dB = den(B);
  if (dB <= 0.0 || dA <= 0.0)
    throw DomainError("convex_mix: zero chi-squared mass on one side");
  double nu = std::sqrt(dA / dB);

  CovertParams m;
  m.joint.t_size = A.joint.t_size + B.joint.t_size;
  m.joint.x3_size = ch.x3_size();
  m.joint.p.resize(static_cast<size_t>(m.joint.t_size) * m.joint.x3_size);
  m.rho.resize(m.joint.t_size);
  m.beta_phase.resize(m.joint.t_size);
  for (int t = 0; t < A.joint.t_size; ++t) {
    for (int x3 = 0; x3 < m.joint.x3_size; ++x3)
      m.joint.p[static_cast<size_t>(t) * m.joint.x3_size + x3] =
          lambda * A.joint.prob(t, x3);
    m.rho[t] = A.rho[t];
    m.beta_phase[t] = {A.beta_of(0, t), A.beta_of(1, t)};
  }
  for (int t = 0; t < B.joint.t_size; ++t) {
    int tt = A.joint.t_size + t;
    for (int x3 = 0; x3 < m.joint.x3_size; ++x3)
      m.joint.p[static_cast<size_t>(tt) * m.joint.x3_size + x3] =
          (1.0 - lambda) * B.joint.prob(t, x3);
    m.rho[tt] = {nu * B.rho[t][0], nu * B.rho[t][1]};
    m.beta_phase[tt] = {B.beta_of(0, t), B.beta_of(1, t)};
  }
  return m;
}

// ---- Params JSON ----

inline nlohmann::json to_json(const CovertParams& p) {
  nlohmann::json j;
  j["t_size"] = p.joint.t_size;
  j["x3_size"] = p.joint.x3_size;
  nlohmann::json rows = nlohmann::json::array();
  for (int t = 0; t < p.joint.t_size; ++t) {
    nlohmann::json row = nlohmann::json::array();
    for (int x3 = 0; x3 < p.joint.x3_size; ++x3) row.push_back(p.joint.prob(t, x3));
    rows.push_back(std::move(row));
  }
  j["p_tx3"] = std::move(rows);
  nlohmann::json rh = nlohmann::json::array();
  for (const auto& r : p.rho) rh.push_back({r[0], r[1]});
  j["rho"] = std::move(rh);
  j["beta"] = {p.beta[0], p.beta[1]};
  if (!p.beta_phase.empty()) {
    nlohmann::json bp = nlohmann::json::array();
    for (const auto& b : p.beta_phase) bp.push_back({b[0], b[1]});
    j["beta_phase"] = std::move(bp);
  }
  return j;
}

inline CovertParams params_from_json(const nlohmann::json& j) {
  CovertParams p;
  try {
    p.joint.t_size = j.at("t_size").get<int>();
    p.joint.x3_size = j.at("x3_size").get<int>();
    for (const auto& row : j.at("p_tx3"))
      for (const auto& v : row) p.joint.p.push_back(v.get<double>());
    for (const auto& r : j.at("rho"))
      p.rho.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    p.beta = {j.at("beta").at(0).get<double>(), j.at("beta").at(1).get<double>()};
    if (j.contains("beta_phase"))
      for (const auto& b : j.at("beta_phase"))
        p.beta_phase.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("params file: ") + e.what());
  }
  if (p.joint.p.size() != static_cast<size_t>(p.joint.t_size) * p.joint.x3_size)
    throw ParseError("params file: p_tx3 has wrong shape");
  return p;
}

}  // namespace covertmac
