#pragma once

// Discrete memoryless channel models: the three-user MAC with two covert
// users, the L-user MAC with arbitrary covert alphabets, and the two-receiver
// interference channel. All probability tensors are immutable after
// construction and safe to share across threads.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace covertmac {

inline constexpr double kRowSumTol = 1e-12;
inline constexpr double kRowGapTol = 1e-12;

struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationIssue {
  std::string condition;  // e.g. "row_sum", "29c", "29f"
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

// Three-user MAC: covert users 1,2 binary, non-covert user 3 over an
// arbitrary finite alphabet. Rows of gamma_y/gamma_z are indexed
// (x1, x2, x3) and hold a pmf over the output alphabet.
class Dmmac {
 public:
  Dmmac() = default;
  Dmmac(int x3_size, int y_size, int z_size, std::vector<double> gamma_y,
        std::vector<double> gamma_z)
      : x3_size_(x3_size),
        y_size_(y_size),
        z_size_(z_size),
        gamma_y_(std::move(gamma_y)),
        gamma_z_(std::move(gamma_z)) {
    if (x3_size_ < 1 || y_size_ < 1 || z_size_ < 1)
      throw StructuralError("dmmac: alphabet sizes must be >= 1");
    if (gamma_y_.size() != static_cast<size_t>(4 * x3_size_ * y_size_))
      throw StructuralError("dmmac: gamma_y has wrong size");
    if (gamma_z_.size() != static_cast<size_t>(4 * x3_size_ * z_size_))
      throw StructuralError("dmmac: gamma_z has wrong size");
  }

  int x3_size() const { return x3_size_; }
  int y_size() const { return y_size_; }
  int z_size() const { return z_size_; }

  std::span<const double> y_row(int x1, int x2, int x3) const {
    return {gamma_y_.data() + row_index(x1, x2, x3) * y_size_,
            static_cast<size_t>(y_size_)};
  }
  std::span<const double> z_row(int x1, int x2, int x3) const {
    return {gamma_z_.data() + row_index(x1, x2, x3) * z_size_,
            static_cast<size_t>(z_size_)};
  }
  double y(int x1, int x2, int x3, int yy) const { return y_row(x1, x2, x3)[yy]; }
  double z(int x1, int x2, int x3, int zz) const { return z_row(x1, x2, x3)[zz]; }

  const std::vector<double>& gamma_y() const { return gamma_y_; }
  const std::vector<double>& gamma_z() const { return gamma_z_; }

  bool operator==(const Dmmac&) const = default;

 private:
  size_t row_index(int x1, int x2, int x3) const {
    return static_cast<size_t>(((x1 * 2) + x2) * x3_size_ + x3);
  }

  int x3_size_ = 0, y_size_ = 0, z_size_ = 0;
  std::vector<double> gamma_y_, gamma_z_;
};

// MAC with l_c covert users (alphabets containing the off-symbol 0) and
// l_nc non-covert users. Input rows are indexed by the mixed-radix tuple
// (x_1, ..., x_{l_c}, x_{l_c+1}, ..., x_L) in row-major order.
class GeneralMac {
 public:
  GeneralMac() = default;
  GeneralMac(std::vector<int> covert_sizes, std::vector<int> nc_sizes,
             int y_size, int z_size, std::vector<double> gamma_y,
             std::vector<double> gamma_z)
      : covert_sizes_(std::move(covert_sizes)),
        nc_sizes_(std::move(nc_sizes)),
        y_size_(y_size),
        z_size_(z_size),
        gamma_y_(std::move(gamma_y)),
        gamma_z_(std::move(gamma_z)) {
    if (y_size_ < 1 || z_size_ < 1)
      throw StructuralError("general_mac: output sizes must be >= 1");
    input_rows_ = 1;
    for (int s : covert_sizes_) {
      if (s < 1) throw StructuralError("general_mac: bad covert alphabet size");
      input_rows_ *= s;
    }
    nc_rows_ = 1;
    for (int s : nc_sizes_) {
      if (s < 1) throw StructuralError("general_mac: bad nc alphabet size");
      nc_rows_ *= s;
    }
    input_rows_ *= nc_rows_;
    if (gamma_y_.size() != static_cast<size_t>(input_rows_) * y_size_)
      throw StructuralError("general_mac: gamma_y has wrong size");
    if (gamma_z_.size() != static_cast<size_t>(input_rows_) * z_size_)
      throw StructuralError("general_mac: gamma_z has wrong size");
  }

  int l_c() const { return static_cast<int>(covert_sizes_.size()); }
  int l_nc() const { return static_cast<int>(nc_sizes_.size()); }
  const std::vector<int>& covert_sizes() const { return covert_sizes_; }
  const std::vector<int>& nc_sizes() const { return nc_sizes_; }
  int y_size() const { return y_size_; }
  int z_size() const { return z_size_; }
  int nc_tuple_count() const { return nc_rows_; }

  // Mixed-radix flattening; covert symbols first, then non-covert.
  size_t row_index(std::span<const int> covert, std::span<const int> nc) const {
    size_t idx = 0;
    for (size_t i = 0; i < covert_sizes_.size(); ++i)
      idx = idx * covert_sizes_[i] + covert[i];
    for (size_t i = 0; i < nc_sizes_.size(); ++i)
      idx = idx * nc_sizes_[i] + nc[i];
    return idx;
  }
  // nc tuple given by its flat index in [0, nc_tuple_count).
  size_t row_index_flat_nc(std::span<const int> covert, int nc_flat) const {
    size_t idx = 0;
    for (size_t i = 0; i < covert_sizes_.size(); ++i)
      idx = idx * covert_sizes_[i] + covert[i];
    return idx * nc_rows_ + nc_flat;
  }
  std::vector<int> unflatten_nc(int nc_flat) const {
    std::vector<int> t(nc_sizes_.size());
    for (int i = static_cast<int>(nc_sizes_.size()) - 1; i >= 0; --i) {
      t[i] = nc_flat % nc_sizes_[i];
      nc_flat /= nc_sizes_[i];
    }
    return t;
  }

  std::span<const double> y_row(size_t row) const {
    return {gamma_y_.data() + row * y_size_, static_cast<size_t>(y_size_)};
  }
  std::span<const double> z_row(size_t row) const {
    return {gamma_z_.data() + row * z_size_, static_cast<size_t>(z_size_)};
  }

  const std::vector<double>& gamma_y() const { return gamma_y_; }
  const std::vector<double>& gamma_z() const { return gamma_z_; }

  bool operator==(const GeneralMac&) const = default;

 private:
  std::vector<int> covert_sizes_, nc_sizes_;
  int y_size_ = 0, z_size_ = 0;
  int input_rows_ = 0, nc_rows_ = 0;
  std::vector<double> gamma_y_, gamma_z_;
};

// Interference channel: two covert users, one non-covert user, two
// legitimate receivers (Y1, Y2) and a warden (Z).
class DmicChannel {
 public:
  DmicChannel() = default;
  DmicChannel(int x3_size, int y1_size, int y2_size, int z_size,
              std::vector<double> gamma_y1, std::vector<double> gamma_y2,
              std::vector<double> gamma_z)
      : x3_size_(x3_size),
        y1_size_(y1_size),
        y2_size_(y2_size),
        z_size_(z_size),
        gamma_y1_(std::move(gamma_y1)),
        gamma_y2_(std::move(gamma_y2)),
        gamma_z_(std::move(gamma_z)) {
    if (x3_size_ < 1 || y1_size_ < 1 || y2_size_ < 1 || z_size_ < 1)
      throw StructuralError("dmic: alphabet sizes must be >= 1");
    auto need = [&](const std::vector<double>& g, int out, const char* name) {
      if (g.size() != static_cast<size_t>(4 * x3_size_ * out))
        throw StructuralError(std::string("dmic: ") + name + " has wrong size");
    };
    need(gamma_y1_, y1_size_, "gamma_y1");
    need(gamma_y2_, y2_size_, "gamma_y2");
    need(gamma_z_, z_size_, "gamma_z");
  }

  int x3_size() const { return x3_size_; }
  int y1_size() const { return y1_size_; }
  int y2_size() const { return y2_size_; }
  int z_size() const { return z_size_; }

  std::span<const double> y1_row(int x1, int x2, int x3) const {
    return {gamma_y1_.data() + row_index(x1, x2, x3) * y1_size_,
            static_cast<size_t>(y1_size_)};
  }
  std::span<const double> y2_row(int x1, int x2, int x3) const {
    return {gamma_y2_.data() + row_index(x1, x2, x3) * y2_size_,
            static_cast<size_t>(y2_size_)};
  }
  std::span<const double> z_row(int x1, int x2, int x3) const {
    return {gamma_z_.data() + row_index(x1, x2, x3) * z_size_,
            static_cast<size_t>(z_size_)};
  }

  const std::vector<double>& gamma_y1() const { return gamma_y1_; }
  const std::vector<double>& gamma_y2() const { return gamma_y2_; }
  const std::vector<double>& gamma_z() const { return gamma_z_; }

  // View of one receiver as a MAC, sharing the warden law.
  Dmmac receiver_mac(int receiver) const {
    if (receiver == 1) return Dmmac(x3_size_, y1_size_, z_size_, gamma_y1_, gamma_z_);
    if (receiver == 2) return Dmmac(x3_size_, y2_size_, z_size_, gamma_y2_, gamma_z_);
    throw DomainError("dmic: receiver must be 1 or 2");
  }

  bool operator==(const DmicChannel&) const = default;

 private:
  size_t row_index(int x1, int x2, int x3) const {
    return static_cast<size_t>(((x1 * 2) + x2) * x3_size_ + x3);
  }

  int x3_size_ = 0, y1_size_ = 0, y2_size_ = 0, z_size_ = 0;
  std::vector<double> gamma_y1_, gamma_y2_, gamma_z_;
};

namespace detail {

inline void check_rows(std::span<const double> g, int rows, int cols,
                       const std::string& name, ValidationReport& rep) {
  for (int r = 0; r < rows; ++r) {
    double sum = 0.0;
    bool neg = false;
    for (int c = 0; c < cols; ++c) {
      double v = g[static_cast<size_t>(r) * cols + c];
      if (v < 0.0) neg = true;
      sum += v;
    }
    if (neg)
      rep.issues.push_back({"row_nonneg", name + " row " + std::to_string(r) +
                                              " has a negative entry"});
    if (std::abs(sum - 1.0) > kRowSumTol)
      rep.issues.push_back({"row_sum", name + " row " + std::to_string(r) +
                                           " sums to " + std::to_string(sum)});
  }
}

// Support inclusion p << q (exact zeros) and distinctness, reported with the
// offending symbol index.
inline void check_support(std::span<const double> p, std::span<const double> q,
                          const std::string& cond, const std::string& where,
                          ValidationReport& rep) {
  for (size_t i = 0; i < p.size(); ++i) {
    if (q[i] == 0.0 && p[i] > 0.0) {
      rep.issues.push_back(
          {cond, where + ", output " + std::to_string(i) + ": support violation"});
      return;
    }
  }
}

inline void check_distinct(std::span<const double> p, std::span<const double> q,
                           const std::string& cond, const std::string& where,
                           ValidationReport& rep) {
  double gap = 0.0;
  for (size_t i = 0; i < p.size(); ++i) gap = std::max(gap, std::abs(p[i] - q[i]));
  if (gap <= kRowGapTol)
    rep.issues.push_back({cond, where + ": warden rows identical (gap " +
                                    std::to_string(gap) + ")"});
}

}  // namespace detail

// Regularity check for the three-user MAC: absolute continuity of each
// covert user's on-symbol law w.r.t. the all-off law at both receivers, and
// distinctness at the warden, for every x3.
inline ValidationReport validate(const Dmmac& ch) {
  ValidationReport rep;
  detail::check_rows(ch.gamma_y(), 4 * ch.x3_size(), ch.y_size(), "gamma_y", rep);
  detail::check_rows(ch.gamma_z(), 4 * ch.x3_size(), ch.z_size(), "gamma_z", rep);
  if (!rep.ok()) return rep;
  for (int x3 = 0; x3 < ch.x3_size(); ++x3) {
    const std::string at = "x3=" + std::to_string(x3);
    detail::check_support(ch.y_row(0, 1, x3), ch.y_row(0, 0, x3), "29a", at, rep);
    detail::check_support(ch.y_row(1, 0, x3), ch.y_row(0, 0, x3), "29c", at, rep);
    detail::check_support(ch.z_row(0, 1, x3), ch.z_row(0, 0, x3), "29e", at, rep);
    detail::check_support(ch.z_row(1, 0, x3), ch.z_row(0, 0, x3), "29g", at, rep);
    detail::check_distinct(ch.z_row(0, 1, x3), ch.z_row(0, 0, x3), "29f", at, rep);
    detail::check_distinct(ch.z_row(1, 0, x3), ch.z_row(0, 0, x3), "29h", at, rep);
  }
  return rep;
}

inline ValidationReport validate(const GeneralMac& ch) {
  ValidationReport rep;
  int rows = 1;
  for (int s : ch.covert_sizes()) rows *= s;
  rows *= ch.nc_tuple_count();
  detail::check_rows(ch.gamma_y(), rows, ch.y_size(), "gamma_y", rep);
  detail::check_rows(ch.gamma_z(), rows, ch.z_size(), "gamma_z", rep);
  if (!rep.ok()) return rep;
  std::vector<int> zeros(ch.l_c(), 0);
  for (int nc = 0; nc < ch.nc_tuple_count(); ++nc) {
    size_t base_row = ch.row_index_flat_nc(zeros, nc);
    for (int l = 0; l < ch.l_c(); ++l) {
      for (int sym = 1; sym < ch.covert_sizes()[l]; ++sym) {
        std::vector<int> cov(ch.l_c(), 0);
        cov[l] = sym;
        size_t row = ch.row_index_flat_nc(cov, nc);
        const std::string at = "user " + std::to_string(l + 1) + ", symbol " +
                               std::to_string(sym) + ", nc_tuple " +
                               std::to_string(nc);
        detail::check_support(ch.y_row(row), ch.y_row(base_row), "29a", at, rep);
        detail::check_support(ch.z_row(row), ch.z_row(base_row), "29e", at, rep);
        detail::check_distinct(ch.z_row(row), ch.z_row(base_row), "29f", at, rep);
      }
    }
  }
  return rep;
}

inline ValidationReport validate(const DmicChannel& ch) {
  ValidationReport rep;
  detail::check_rows(ch.gamma_y1(), 4 * ch.x3_size(), ch.y1_size(), "gamma_y1", rep);
  detail::check_rows(ch.gamma_y2(), 4 * ch.x3_size(), ch.y2_size(), "gamma_y2", rep);
  detail::check_rows(ch.gamma_z(), 4 * ch.x3_size(), ch.z_size(), "gamma_z", rep);
  if (!rep.ok()) return rep;
  for (int x3 = 0; x3 < ch.x3_size(); ++x3) {
    const std::string at = "x3=" + std::to_string(x3);
    detail::check_support(ch.y1_row(0, 1, x3), ch.y1_row(0, 0, x3), "29a", at, rep);
    detail::check_support(ch.y1_row(1, 0, x3), ch.y1_row(0, 0, x3), "29c", at, rep);
    detail::check_support(ch.y2_row(0, 1, x3), ch.y2_row(0, 0, x3), "29a", at, rep);
    detail::check_support(ch.y2_row(1, 0, x3), ch.y2_row(0, 0, x3), "29c", at, rep);
    detail::check_support(ch.z_row(0, 1, x3), ch.z_row(0, 0, x3), "29e", at, rep);
    detail::check_support(ch.z_row(1, 0, x3), ch.z_row(0, 0, x3), "29g", at, rep);
    detail::check_distinct(ch.z_row(0, 1, x3), ch.z_row(0, 0, x3), "29f", at, rep);
    detail::check_distinct(ch.z_row(1, 0, x3), ch.z_row(0, 0, x3), "29h", at, rep);
  }
  return rep;
}

// Per-phase warden laws averaged over the covert users' sparse inputs with
// on-probabilities rho1*alpha and rho2*alpha.
struct AveragedWardenLaws {
  // z_given_x3[x3*z_size + z], z_given_x1x3[(x1*x3_size+x3)*z_size + z], ...
  int x3_size = 0, z_size = 0;
  std::vector<double> z_given_x3;
  std::vector<double> z_given_x1x3;
  std::vector<double> z_given_x2x3;
};

inline AveragedWardenLaws averaged_channel(const Dmmac& ch, double rho1,
                                           double rho2, double alpha_n) {
  double a1 = rho1 * alpha_n, a2 = rho2 * alpha_n;
  if (a1 < 0.0 || a2 < 0.0 || a1 > 1.0 || a2 > 1.0)
    throw DomainError("averaged_channel: rho*alpha must lie in [0,1]");
  AveragedWardenLaws out;
  out.x3_size = ch.x3_size();
  out.z_size = ch.z_size();
  out.z_given_x3.assign(static_cast<size_t>(ch.x3_size()) * ch.z_size(), 0.0);
  out.z_given_x1x3.assign(2 * out.z_given_x3.size(), 0.0);
  out.z_given_x2x3.assign(2 * out.z_given_x3.size(), 0.0);
  for (int x3 = 0; x3 < ch.x3_size(); ++x3) {
    for (int z = 0; z < ch.z_size(); ++z) {
      double g00 = ch.z(0, 0, x3, z), g01 = ch.z(0, 1, x3, z);
      double g10 = ch.z(1, 0, x3, z), g11 = ch.z(1, 1, x3, z);
      size_t i = static_cast<size_t>(x3) * ch.z_size() + z;
      out.z_given_x3[i] = (1 - a1) * (1 - a2) * g00 + (1 - a1) * a2 * g01 +
                          a1 * (1 - a2) * g10 + a1 * a2 * g11;
      out.z_given_x1x3[i] = (1 - a2) * g00 + a2 * g01;                    // x1=0
      out.z_given_x1x3[out.z_given_x3.size() + i] = (1 - a2) * g10 + a2 * g11;
      out.z_given_x2x3[i] = (1 - a1) * g00 + a1 * g10;                    // x2=0
      out.z_given_x2x3[out.z_given_x3.size() + i] = (1 - a1) * g01 + a1 * g11;
    }
  }
  return out;
}

}  // namespace covertmac
