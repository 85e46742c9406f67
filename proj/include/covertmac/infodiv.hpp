#pragma once

// Divergence and mutual-information primitives. All quantities are in nats.
// KL divergence returns nullopt when the first argument is not absolutely
// continuous w.r.t. the second (the +infinity case), so callers decide how
// to handle it instead of propagating inf through arithmetic.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "covertmac/channel.hpp"

namespace covertmac {

inline std::optional<double> kl(std::span<const double> p,
                                std::span<const double> q) {
  if (p.size() != q.size()) throw DomainError("kl: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::nullopt;
    s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

// Per-x3 divergences of each covert user's on-symbol output law from the
// all-off law, at the legitimate receiver and at the warden.
struct DivergenceProfile {
  // Indexed by x3; the "12" tables are for both users on simultaneously.
  std::vector<double> dy1, dy2, dy12, dz1, dz2, dz12;
};

inline DivergenceProfile divergence_profile(const Dmmac& ch) {
  DivergenceProfile out;
  for (auto* v : {&out.dy1, &out.dy2, &out.dy12, &out.dz1, &out.dz2, &out.dz12})
    v->resize(ch.x3_size());
  for (int x3 = 0; x3 < ch.x3_size(); ++x3) {
    auto need = [&](std::optional<double> v, const char* what) {
      if (!v) throw DomainError(std::string("divergence_profile: infinite ") + what);
      return *v;
    };
    out.dy1[x3] = need(kl(ch.y_row(1, 0, x3), ch.y_row(0, 0, x3)), "D_Y(1)");
    out.dy2[x3] = need(kl(ch.y_row(0, 1, x3), ch.y_row(0, 0, x3)), "D_Y(2)");
    out.dy12[x3] = need(kl(ch.y_row(1, 1, x3), ch.y_row(0, 0, x3)), "D_Y(1,2)");
    out.dz1[x3] = need(kl(ch.z_row(1, 0, x3), ch.z_row(0, 0, x3)), "D_Z(1)");
    out.dz2[x3] = need(kl(ch.z_row(0, 1, x3), ch.z_row(0, 0, x3)), "D_Z(2)");
    out.dz12[x3] = need(kl(ch.z_row(1, 1, x3), ch.z_row(0, 0, x3)), "D_Z(1,2)");
  }
  return out;
}

// Chi-squared distance at the warden between the rho-weighted mixture of the
// two users' on-laws and the all-off law, for a given x3. Scale-invariant in
// (rho1, rho2); rho1 + rho2 must be positive.
inline double chi2_mixture(const Dmmac& ch, double rho1, double rho2, int x3) {
  double tot = rho1 + rho2;
  if (rho1 < 0.0 || rho2 < 0.0 || tot <= 0.0)
    throw DomainError("chi2_mixture: need rho1, rho2 >= 0 with rho1 + rho2 > 0");
  double w1 = rho1 / tot, w2 = rho2 / tot;
  double s = 0.0;
  for (int z = 0; z < ch.z_size(); ++z) {
    double base = ch.z(0, 0, x3, z);
    double mix = w1 * ch.z(1, 0, x3, z) + w2 * ch.z(0, 1, x3, z);
    double d = mix - base;
    if (d == 0.0) continue;
    if (base == 0.0) throw DomainError("chi2_mixture: mixture escapes base support");
    s += d * d / base;
  }
  return s;
}

// Same quantity for the general MAC: the mixture runs over all covert users
// and, for non-binary alphabets, over each user's pmf psi_l on its nonzero
// symbols. weights[l] = rho_l; psis[l] is a pmf of length covert_sizes[l]-1.
inline double chi2_general(const GeneralMac& ch, std::span<const double> weights,
                           const std::vector<std::vector<double>>& psis,
                           int nc_flat) {
  if (static_cast<int>(weights.size()) != ch.l_c() ||
      static_cast<int>(psis.size()) != ch.l_c())
    throw DomainError("chi2_general: need one weight and one psi per covert user");
  double tot = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw DomainError("chi2_general: negative weight");
    tot += w;
  }
  if (tot <= 0.0) throw DomainError("chi2_general: weights sum to zero");

  std::vector<int> zeros(ch.l_c(), 0);
  size_t base_row = ch.row_index_flat_nc(zeros, nc_flat);
  std::vector<double> mix(ch.z_size(), 0.0);
  for (int l = 0; l < ch.l_c(); ++l) {
    if (static_cast<int>(psis[l].size()) != ch.covert_sizes()[l] - 1)
      throw DomainError("chi2_general: psi has wrong length");
    for (int sym = 1; sym < ch.covert_sizes()[l]; ++sym) {
      double w = (weights[l] / tot) * psis[l][sym - 1];
      if (w == 0.0) continue;
      std::vector<int> cov(ch.l_c(), 0);
      cov[l] = sym;
      auto row = ch.z_row(ch.row_index_flat_nc(cov, nc_flat));
      for (int z = 0; z < ch.z_size(); ++z) mix[z] += w * row[z];
    }
  }
  auto base = ch.z_row(base_row);
  double s = 0.0;
  for (int z = 0; z < ch.z_size(); ++z) {
    double d = mix[z] - base[z];
    if (d == 0.0) continue;
    if (base[z] == 0.0) throw DomainError("chi2_general: mixture escapes base support");
    s += d * d / base[z];
  }
  return s;
}

// Joint law of (T, X3): p[t*x3_size + x3]. Phases are the time-sharing
// states; x3 the non-covert input.
struct JointInputLaw {
  int t_size = 0;
  int x3_size = 0;
  std::vector<double> p;  // size t_size * x3_size, sums to 1

  double prob(int t, int x3) const { return p[static_cast<size_t>(t) * x3_size + x3]; }
  double t_marginal(int t) const {
    double s = 0.0;
    for (int x3 = 0; x3 < x3_size; ++x3) s += prob(t, x3);
    return s;
  }
};

// I(X3; Y | X1=0, X2=0, T) under the given joint law, in nats.
inline double cond_mi_nc(const Dmmac& ch, const JointInputLaw& law) {
  if (law.x3_size != ch.x3_size())
    throw DomainError("cond_mi_nc: x3 alphabet mismatch");
  double mi = 0.0;
  std::vector<double> py(ch.y_size());
  for (int t = 0; t < law.t_size; ++t) {
    double pt = law.t_marginal(t);
    if (pt == 0.0) continue;
    std::fill(py.begin(), py.end(), 0.0);
    for (int x3 = 0; x3 < ch.x3_size(); ++x3) {
      double w = law.prob(t, x3) / pt;
      auto row = ch.y_row(0, 0, x3);
      for (int y = 0; y < ch.y_size(); ++y) py[y] += w * row[y];
    }
    for (int x3 = 0; x3 < ch.x3_size(); ++x3) {
      double w = law.prob(t, x3) / pt;
      if (w == 0.0) continue;
      auto row = ch.y_row(0, 0, x3);
      double d = 0.0;
      for (int y = 0; y < ch.y_size(); ++y) {
        if (row[y] == 0.0) continue;
        d += row[y] * std::log(row[y] / py[y]);
      }
      mi += pt * w * d;
    }
  }
  return mi;
}

// General MAC: I(X_J; Y | X_cov = 0, X_{J^c}, T) for every nonempty subset J
// of non-covert users, with all covert users silenced. nc_law[t][nc_flat] is
// the conditional joint pmf of the non-covert tuple given T = t (product
// structure not required). Returns table[subset_mask - 1] averaged over T.
inline std::vector<double> cond_mi_nc(const GeneralMac& ch,
                                      const std::vector<double>& t_pmf,
                                      const std::vector<std::vector<double>>& nc_law) {
  int L = ch.l_nc();
  if (L < 1) throw DomainError("cond_mi_nc: no non-covert users");
  int masks = (1 << L) - 1;
  std::vector<double> table(masks, 0.0);
  std::vector<int> zeros(ch.l_c(), 0);
  int N = ch.nc_tuple_count();

  for (size_t t = 0; t < t_pmf.size(); ++t) {
    double pt = t_pmf[t];
    if (pt == 0.0) continue;
    const auto& q = nc_law[t];
    if (static_cast<int>(q.size()) != N)
      throw DomainError("cond_mi_nc: nc_law row has wrong length");
    for (int mask = 1; mask <= masks; ++mask) {
      // Key a tuple by its components outside J; average the channel over
      // the components inside J conditionally on the rest.
      double mi = 0.0;
      // Group tuples by complement projection.
      std::vector<int> comp_key(N);
      for (int flat = 0; flat < N; ++flat) {
        auto tup = ch.unflatten_nc(flat);
        int key = 0;
        for (int i = 0; i < L; ++i)
          if (!(mask & (1 << i))) key = key * ch.nc_sizes()[i] + tup[i];
          else key = key * ch.nc_sizes()[i];  // zero out J components
        comp_key[flat] = key;
      }
      // For each complement class: P(Y | class) and the per-tuple rows.
      for (int flat = 0; flat < N; ++flat) {
        if (q[flat] == 0.0) continue;
        // class mass and averaged output law
        double cls = 0.0;
        std::vector<double> py(ch.y_size(), 0.0);
        for (int g = 0; g < N; ++g) {
          if (comp_key[g] != comp_key[flat] || q[g] == 0.0) continue;
          cls += q[g];
          auto row = ch.y_row(ch.row_index_flat_nc(zeros, g));
          for (int y = 0; y < ch.y_size(); ++y) py[y] += q[g] * row[y];
        }
        for (double& v : py) v /= cls;
        auto row = ch.y_row(ch.row_index_flat_nc(zeros, flat));
        double d = 0.0;
        for (int y = 0; y < ch.y_size(); ++y) {
          if (row[y] == 0.0) continue;
          d += row[y] * std::log(row[y] / py[y]);
        }
        mi += q[flat] * d;
      }
      table[mask - 1] += pt * mi;
    }
  }
  return table;
}

// Decomposition of a covert user's conditional mutual information into
// divergences from an off-row: with X ~ Bern(p_on) for user `user` and the
// other user's symbol fixed at other_sym,
//   I(X; Y | X3) = p_on * E[D(on-row || off-row)] - E[D(mix-row || off-row)]
// where the off-row keeps other_sym in place. Returns |direct - form|; the
// identity is exact, so the residual is numerical noise only.
inline double mi_identity_gap(const Dmmac& ch, int user, int other_sym,
                              double p_on, std::span<const double> px3) {
  if (static_cast<int>(px3.size()) != ch.x3_size())
    throw DomainError("mi_identity_gap: px3 size mismatch");
  if (p_on < 0.0 || p_on > 1.0) throw DomainError("mi_identity_gap: bad p_on");
  auto row_of = [&](int sym, int x3) {
    return user == 1 ? ch.y_row(sym, other_sym, x3) : ch.y_row(other_sym, sym, x3);
  };
  double direct = 0.0, form = 0.0;
  std::vector<double> mix(ch.y_size());
  for (int x3 = 0; x3 < ch.x3_size(); ++x3) {
    if (px3[x3] == 0.0) continue;
    auto r0 = row_of(0, x3), r1 = row_of(1, x3);
    for (int y = 0; y < ch.y_size(); ++y) mix[y] = (1 - p_on) * r0[y] + p_on * r1[y];
    double d = 0.0;
    for (int y = 0; y < ch.y_size(); ++y) {
      if (r0[y] > 0.0) d += (1 - p_on) * r0[y] * std::log(r0[y] / mix[y]);
      if (r1[y] > 0.0) d += p_on * r1[y] * std::log(r1[y] / mix[y]);
    }
    direct += px3[x3] * d;
    auto d_off = [&](std::span<const double> p) {
      auto v = kl(p, r0);
      if (!v) throw DomainError("mi_identity_gap: support violation vs off-row");
      return *v;
    };
    form += px3[x3] * (p_on * d_off(r1) - d_off(mix));
  }
  return std::abs(direct - form);
}

// D(warden law averaged over X1~Bern(a1), X2~Bern(a2) || all-off law),
// divided by its small-intensity approximation ((a1+a2)^2/2) * chi^2.
// Tends to 1 as a1 + a2 -> 0.
inline double local_div_ratio(const Dmmac& ch, double a1, double a2, int x3) {
  double tot = a1 + a2;
  if (a1 < 0.0 || a2 < 0.0 || tot <= 0.0 || tot > 0.2)
    throw DomainError("local_div_ratio: need a1, a2 >= 0 with a1 + a2 in (0, 0.2]");
  auto base = ch.z_row(0, 0, x3);
  std::vector<double> mix(ch.z_size());
  for (int z = 0; z < ch.z_size(); ++z)
    mix[z] = (1 - a1) * (1 - a2) * ch.z(0, 0, x3, z) + (1 - a1) * a2 * ch.z(0, 1, x3, z) +
             a1 * (1 - a2) * ch.z(1, 0, x3, z) + a1 * a2 * ch.z(1, 1, x3, z);
  auto v = kl(mix, base);
  if (!v) throw DomainError("local_div_ratio: support violation");
  return *v / ((tot * tot / 2.0) * chi2_mixture(ch, a1 / tot, a2 / tot, x3));
}

}  // namespace covertmac
