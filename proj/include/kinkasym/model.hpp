#pragma once

// Shared domain types for the confined Ising chain
//
//   H = -J0 sum_{i=1}^{L-1} Z_i Z_{i+1} - g sum_{i=2}^{L-1} X_i
//       - h sum_{i=1}^{L} Z_i - J sum_{i=1}^{L-2} Z_i X_{i+1} Z_{i+2}
//
// Sites are 1-based throughout the public API. Note the term ranges: the
// transverse field skips both boundary sites, which is what makes the kink
// parity s_1 s_L conserved for every choice of couplings.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kinkasym/errors.hpp"

namespace kinkasym {

struct ModelParams {
  double J0 = 1.0;
  double g = 0.0;
  double h = 0.0;
  double J = 0.0;
  int L = 4;

  /// True iff J == -g exactly (no tolerance).
  [[nodiscard]] bool kink_conserving() const noexcept { return J == -g; }

  void validate() const {
    if (L < 4) throw RangeError("chain length L must be >= 4, got " + std::to_string(L));
  }
};

/// Classical product configuration, spins stored as +1 (up) / -1 (down).
class SpinPattern {
 public:
  SpinPattern() = default;

  explicit SpinPattern(std::vector<int> spins) : spins_(std::move(spins)) {
    for (int s : spins_)
      if (s != 1 && s != -1) throw RangeError("spin values must be +1 or -1");
  }

  static SpinPattern all_up(int L) { return SpinPattern(std::vector<int>(static_cast<std::size_t>(L), 1)); }

  /// Parses a `u`/`d` string, e.g. "uuuudduuuu".
  static SpinPattern parse(std::string_view text) {
    std::vector<int> spins;
    spins.reserve(text.size());
    for (char c : text) {
      if (c == 'u' || c == 'U')
        spins.push_back(1);
      else if (c == 'd' || c == 'D')
        spins.push_back(-1);
      else
        throw RangeError(std::string("invalid pattern character '") + c + "'");
    }
    return SpinPattern(std::move(spins));
  }

  /// Basis index with site 1 as the most significant bit and down = 1.
  static SpinPattern from_index(std::uint64_t index, int L) {
    std::vector<int> spins(static_cast<std::size_t>(L));
    for (int i = 0; i < L; ++i) spins[static_cast<std::size_t>(i)] = ((index >> (L - 1 - i)) & 1U) ? -1 : 1;
    return SpinPattern(std::move(spins));
  }

  [[nodiscard]] std::uint64_t to_index() const {
    std::uint64_t index = 0;
    for (int s : spins_) index = (index << 1U) | (s == -1 ? 1U : 0U);
    return index;
  }

  [[nodiscard]] std::string to_string() const {
    std::string out;
    out.reserve(spins_.size());
    for (int s : spins_) out.push_back(s == 1 ? 'u' : 'd');
    return out;
  }

  [[nodiscard]] int size() const noexcept { return static_cast<int>(spins_.size()); }
  /// 1-based site access.
  [[nodiscard]] int operator()(int site) const { return spins_.at(static_cast<std::size_t>(site - 1)); }
  [[nodiscard]] std::span<const int> spins() const noexcept { return spins_; }

  /// Sites first..last (1-based, inclusive) as a new pattern.
  [[nodiscard]] SpinPattern slice(int first, int last) const {
    if (first < 1 || last > size() || first > last) throw RangeError("pattern slice out of range");
    return SpinPattern(std::vector<int>(spins_.begin() + (first - 1), spins_.begin() + last));
  }

  friend bool operator==(const SpinPattern&, const SpinPattern&) = default;

 private:
  std::vector<int> spins_;
};

enum class ChargeKind {
  SiteNumber,    ///< down spins on sites 1..L_A
  LinkKink,      ///< kinks on links (1,2)..(L_A-1,L_A)
  KwSiteNumber,  ///< down spins on sites 2..L_A (kink number after the KW map)
};

struct ChargeSpec {
  ChargeKind kind = ChargeKind::LinkKink;
  int subsystem_length = 1;

  void validate(int L) const {
    if (subsystem_length < 1 || subsystem_length >= L)
      throw RangeError("charge subsystem length must satisfy 1 <= L_A < L");
  }

  /// max(Q) - min(Q) over all configurations of the subsystem.
  [[nodiscard]] int spectral_range() const noexcept {
    return kind == ChargeKind::SiteNumber ? subsystem_length : subsystem_length - 1;
  }

  /// Charge of a subsystem configuration given as a basis index over L_A
  /// sites (site 1 most significant, down = 1).
  [[nodiscard]] int value(std::uint64_t local_index) const noexcept {
    const int n = subsystem_length;
    auto down = [&](int site) { return static_cast<int>((local_index >> (n - site)) & 1U); };
    int q = 0;
    switch (kind) {
      case ChargeKind::SiteNumber:
        for (int i = 1; i <= n; ++i) q += down(i);
        break;
      case ChargeKind::KwSiteNumber:
        for (int i = 2; i <= n; ++i) q += down(i);
        break;
      case ChargeKind::LinkKink:
        for (int i = 1; i < n; ++i) q += down(i) ^ down(i + 1);
        break;
    }
    return q;
  }
};

inline std::string to_string(ChargeKind kind) {
  switch (kind) {
    case ChargeKind::SiteNumber: return "site_number";
    case ChargeKind::LinkKink: return "link_kink";
    case ChargeKind::KwSiteNumber: return "kw_site_number";
  }
  return "unknown";
}

inline ChargeKind parse_charge_kind(std::string_view text) {
  if (text == "site_number") return ChargeKind::SiteNumber;
  if (text == "link_kink") return ChargeKind::LinkKink;
  if (text == "kw_site_number") return ChargeKind::KwSiteNumber;
  throw RangeError("unknown charge kind '" + std::string(text) + "'");
}

/// Down domain on sites j..j+n-1; the domain must be strictly interior so
/// the state carries exactly two kinks.
inline SpinPattern build_domain_wall(int L, int j, int n) {
  if (L < 4) throw RangeError("chain length L must be >= 4");
  if (n < 1 || j < 2 || j + n - 1 > L - 1)
    throw RangeError("domain (j=" + std::to_string(j) + ", n=" + std::to_string(n) +
                     ") must satisfy 2 <= j, j+n-1 <= L-1, n >= 1");
  std::vector<int> spins(static_cast<std::size_t>(L), 1);
  for (int i = j; i < j + n; ++i) spins[static_cast<std::size_t>(i - 1)] = -1;
  return SpinPattern(std::move(spins));
}

inline int kink_count(const SpinPattern& p) {
  const auto s = p.spins();
  int kinks = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) kinks += (1 - s[i] * s[i + 1]) / 2;
  return kinks;
}

/// t_1 = s_1, t_i = s_{i-1} s_i.
inline SpinPattern kw_forward(const SpinPattern& p) {
  const auto s = p.spins();
  std::vector<int> t(s.begin(), s.end());
  for (std::size_t i = 1; i < s.size(); ++i) t[i] = s[i - 1] * s[i];
  return SpinPattern(std::move(t));
}

/// s_i = prod_{k<=i} t_k.
inline SpinPattern kw_inverse(const SpinPattern& p) {
  const auto t = p.spins();
  std::vector<int> s(t.begin(), t.end());
  for (std::size_t i = 1; i < t.size(); ++i) s[i] = s[i - 1] * t[i];
  return SpinPattern(std::move(s));
}

}  // namespace kinkasym
