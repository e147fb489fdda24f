// Word sets X_k over {0,1,2} with |X_k words| = 3^{k-1}: squaring phases
// X_{k+1} = X_k 0^{n_k} X_k and chained phases X_{k+1} = {a_i 0^{n_k} a_{i+1}}
// over the lexicographic enumeration of X_k. Shallow levels are explicit,
// deeper ones answer contains/rank/unrank from the rule.
#pragma once

#include "wordlab/language.hpp"
#include "wordlab/numeric.hpp"
#include "wordlab/words.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace wordlab::xk {

inline const Alphabet& alphabet() {
  static const Alphabet a("012");
  return a;
}

constexpr char kZero = 0;

inline Word zeros(std::size_t n) { return Word(n, kZero); }

class LevelError : public std::runtime_error {
 public:
  explicit LevelError(std::size_t k) : std::runtime_error("level " + std::to_string(k) + " must be explicit") {}
};

struct XkParams {
  unsigned r = 2;
  std::size_t max_level = 7;
  std::uint64_t explicit_bytes = 64ULL << 20;  // explicit word lists up to this size
};

enum class Rule { base, squaring, chained };

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::base: return "base";
    case Rule::squaring: return "squaring";
    case Rule::chained: return "chained";
  }
  return "?";
}

struct XkLevel {
  std::size_t k = 0;
  std::uint64_t n = 0;  // 3^{k-1}
  BigInt s;
  Rule rule = Rule::base;
  bool is_explicit = false;
  std::string flat;  // sorted words back to back, explicit levels only

  std::size_t count() const { return n ? flat.size() / n : 0; }
  std::string_view word(std::size_t i) const { return std::string_view(flat).substr(i * n, n); }
};

class XkSystem {
 public:
  explicit XkSystem(XkParams p = {}) : p_(p) {
    if (p.r < 2) throw std::invalid_argument("r must be at least 2");
    if (p.max_level < 2 || p.max_level > 40) throw std::invalid_argument("max_level out of range");
    checkpoints_.push_back(2);
    while (checkpoints_.back() <= p.max_level + 1)
      checkpoints_.push_back((checkpoints_.back() - 1) * (std::size_t{1} << p.r) + 1);

    levels_.resize(p.max_level + 1);
    for (std::size_t k = 1; k <= p.max_level; ++k) {
      auto& L = levels_[k];
      L.k = k;
      L.n = ipow(3, k - 1).convert_to<std::uint64_t>();
      L.rule = k == 1 ? Rule::base : rule_for(k);
      L.s = k == 1 ? BigInt(2) : (L.rule == Rule::squaring ? levels_[k - 1].s * levels_[k - 1].s : levels_[k - 1].s);
      bool fits = L.s * L.n <= p.explicit_bytes;
      if (fits && (k == 1 || levels_[k - 1].is_explicit)) build_explicit(k);
    }
  }

  const XkParams& params() const { return p_; }
  std::size_t max_level() const { return p_.max_level; }
  const XkLevel& level(std::size_t k) const { return levels_.at(k); }
  std::uint64_t n(std::size_t k) const { return level(k).n; }
  const BigInt& s(std::size_t k) const { return level(k).s; }
  // k_1 = 2, k_{l+1} = (k_l - 1) 2^r + 1; index l-1 holds k_l.
  const std::vector<std::size_t>& checkpoints() const { return checkpoints_; }
  std::size_t checkpoint(std::size_t l) const { return checkpoints_.at(l - 1); }

  std::size_t deepest_explicit() const {
    std::size_t k = 0;
    while (k + 1 <= p_.max_level && levels_[k + 1].is_explicit) ++k;
    return k;
  }

  const XkLevel& explicit_level(std::size_t k) const {
    if (k == 0 || k > p_.max_level || !levels_[k].is_explicit) throw LevelError(k);
    return levels_[k];
  }

  bool contains(std::size_t k, std::string_view w) const { return rank(k, w).has_value(); }

  // Position in the lexicographic order of X_k, or nullopt if w is not in X_k.
  std::optional<BigInt> rank(std::size_t k, std::string_view w) const {
    const auto& L = level(k);
    if (w.size() != L.n) return std::nullopt;
    if (L.is_explicit) {
      std::size_t lo = 0, hi = L.count();
      while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (L.word(mid) < w)
          lo = mid + 1;
        else
          hi = mid;
      }
      if (lo < L.count() && L.word(lo) == w) return BigInt(lo);
      return std::nullopt;
    }
    std::uint64_t m = level(k - 1).n;
    for (std::uint64_t i = m; i < 2 * m; ++i)
      if (w[i] != kZero) return std::nullopt;
    auto ra = rank(k - 1, w.substr(0, m));
    auto rb = rank(k - 1, w.substr(2 * m));
    if (!ra || !rb) return std::nullopt;
    const BigInt& sp = s(k - 1);
    if (L.rule == Rule::squaring) return *ra * sp + *rb;
    if (*rb != (*ra + 1) % sp) return std::nullopt;
    return ra;
  }

  Word unrank(std::size_t k, const BigInt& i) const {
    const auto& L = level(k);
    if (i < 0 || i >= L.s) throw std::out_of_range("rank out of range");
    if (L.is_explicit) return Word(L.word(i.convert_to<std::size_t>()));
    const BigInt& sp = s(k - 1);
    Word z = zeros(level(k - 1).n);
    if (L.rule == Rule::squaring) return unrank(k - 1, i / sp) + z + unrank(k - 1, i % sp);
    return unrank(k - 1, i) + z + unrank(k - 1, (i + 1) % sp);
  }

  // Smallest d with n <= 3^{d-1}.
  static std::size_t level_for(std::uint64_t n) {
    std::size_t d = 1;
    std::uint64_t p = 1;
    while (p < n) {
      p *= 3;
      ++d;
    }
    return d;
  }

  // Hosts 0^pad x 0^pad for x in X_d: their length-n windows (n <= pad, n <= 3^{d-1})
  // are exactly the factors of X_{d+1}.
  std::vector<Word> padded_hosts(std::size_t d, std::size_t pad) const {
    const auto& L = explicit_level(d);
    std::vector<Word> out;
    out.reserve(L.count());
    Word z = zeros(pad);
    for (std::size_t i = 0; i < L.count(); ++i) {
      Word h;
      h.reserve(2 * pad + L.n);
      h += z;
      h += L.word(i);
      h += z;
      out.push_back(std::move(h));
    }
    return out;
  }

 private:
  Rule rule_for(std::size_t k) const {
    if (k == 2) return Rule::squaring;  // X_2 = X_1 0 X_1
    for (std::size_t l = 0; l + 1 < checkpoints_.size(); ++l) {
      std::size_t kl = checkpoints_[l], next = checkpoints_[l + 1];
      if (k > kl && k <= next) return k <= kl + p_.r ? Rule::squaring : Rule::chained;
    }
    throw std::logic_error("no phase for level");
  }

  void build_explicit(std::size_t k) {
    auto& L = levels_[k];
    if (k == 1) {
      L.flat = {char(1), char(2)};
      L.is_explicit = true;
      return;
    }
    const auto& P = levels_[k - 1];
    Word z = zeros(P.n);
    std::size_t c = P.count();
    L.flat.reserve(L.s.convert_to<std::size_t>() * L.n);
    for (std::size_t i = 0; i < c; ++i) {
      if (L.rule == Rule::squaring) {
        for (std::size_t j = 0; j < c; ++j) {
          L.flat += P.word(i);
          L.flat += z;
          L.flat += P.word(j);
        }
      } else {
        L.flat += P.word(i);
        L.flat += z;
        L.flat += P.word((i + 1) % c);
      }
    }
    L.is_explicit = true;
    for (std::size_t i = 1; i < L.count(); ++i)
      if (!(L.word(i - 1) < L.word(i))) throw std::logic_error("explicit level not sorted");
  }

  XkParams p_;
  std::vector<std::size_t> checkpoints_;
  std::vector<XkLevel> levels_;
};

// ---------------------------------------------------------------------------
// Factor language

inline FactorSet xk_factor_set(const XkSystem& sys, std::uint64_t n, FactorOptions opt = {}) {
  if (n == 0) return factor_set(std::vector<Word>{}, 0);
  auto d = XkSystem::level_for(n);
  auto hosts = sys.padded_hosts(d, n);
  return count_factors(hosts, n, opt);
}

namespace detail {

// Distinct length-i suffixes of {0^pad x} (or prefixes of {x 0^pad}) over x in X_d.
inline std::vector<std::uint64_t> distinct_edges(const XkLevel& L, std::size_t max_i, bool suffix) {
  std::vector<std::uint64_t> out(max_i + 1, 0);
  std::vector<std::string_view> v;
  for (std::size_t i = 1; i <= max_i; ++i) {
    if (i >= L.n) {
      out[i] = L.count();  // zero padding keeps them distinct, whole word visible
      continue;
    }
    v.clear();
    for (std::size_t j = 0; j < L.count(); ++j) {
      auto w = L.word(j);
      v.push_back(suffix ? w.substr(L.n - i) : w.substr(0, i));
    }
    std::sort(v.begin(), v.end());
    out[i] = static_cast<std::uint64_t>(std::unique(v.begin(), v.end()) - v.begin());
  }
  return out;
}

}  // namespace detail

// Exact p(n) from the parent level. A window of 0^n a 0^m b 0^n (x = a 0^m b in X_d)
// either stays on one side of the gap, or contains a's last letter, 0^m and b's
// first letter. The second kind has a unique maximal zero run of length exactly m
// bounded by nonzero letters (runs inside a, b are shorter), so these windows are
// disjoint from the first kind and are determined by (i, suffix, prefix).
inline std::uint64_t structural_complexity(const XkSystem& sys, std::uint64_t n) {
  if (n == 0) return 1;
  auto d = XkSystem::level_for(n);
  if (d == 1) return 3;
  const auto& P = sys.explicit_level(d - 1);
  const std::uint64_t m = P.n;
  std::vector<Word> side;
  Word zn = zeros(n), zm = zeros(m);
  for (std::size_t j = 0; j < P.count(); ++j) {
    side.push_back(zn + Word(P.word(j)) + zm);
    side.push_back(zm + Word(P.word(j)) + zn);
  }
  FactorOptions opt;
  opt.force_mode = FactorMode::exact;
  std::uint64_t total = count_factors(side, n, opt).count;
  if (n < m + 2) return total;
  const std::uint64_t span = n - m;  // letters outside the 0^m run
  if (sys.level(d).rule == Rule::squaring) {
    auto S = detail::distinct_edges(P, span - 1, true);
    auto Pr = detail::distinct_edges(P, span - 1, false);
    for (std::uint64_t i = 1; i + 1 <= span; ++i) total += S[i] * Pr[span - i];
    return total;
  }
  // chained: only consecutive pairs occur
  std::vector<std::pair<Fp128, Fp128>> pairs;
  const std::size_t c = P.count();
  for (std::uint64_t i = 1; i + 1 <= span; ++i) {
    pairs.clear();
    std::uint64_t j2 = span - i;
    for (std::size_t j = 0; j < c; ++j) {
      Word a = Word(P.word(j)), b = Word(P.word((j + 1) % c));
      Word suf = i >= m ? zeros(i - m) + a : a.substr(m - i);
      Word pre = j2 >= m ? b + zeros(j2 - m) : b.substr(0, j2);
      pairs.emplace_back(fingerprint(suf), fingerprint(pre));
    }
    std::sort(pairs.begin(), pairs.end());
    total += static_cast<std::uint64_t>(std::unique(pairs.begin(), pairs.end()) - pairs.begin());
  }
  return total;
}

inline std::vector<std::uint64_t> xk_complexity_table(const XkSystem& sys, std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = lo; n <= hi; ++n) out.push_back(structural_complexity(sys, n));
  return out;
}

class XkLanguage : public LanguageOracle {
 public:
  explicit XkLanguage(const XkSystem& sys) : sys_(sys) {}
  std::size_t alphabet_size() const override { return 3; }
  std::size_t max_length() const override { return sys_.n(sys_.deepest_explicit()); }

 protected:
  std::vector<Word> compute_factors(std::size_t n) const override {
    if (n == 0) return {Word()};
    return factor_set(sys_.padded_hosts(XkSystem::level_for(n), n), n).members;
  }

 private:
  const XkSystem& sys_;
};

// ---------------------------------------------------------------------------
// p(n) <= 4 * 3^{a M + 1} * n^{a M + 1}, a = log 4 / log 3, M = 2^r.
// 3^{aM} = 4^M, and with e = floor(log_3 n): 4^{eM} <= n^{aM} < 4^{(e+1)M}.

enum class BoundVerdict { pass_exact, fail_exact, pass_float, fail_float };

inline const char* verdict_name(BoundVerdict v) {
  switch (v) {
    case BoundVerdict::pass_exact: return "pass";
    case BoundVerdict::fail_exact: return "fail";
    case BoundVerdict::pass_float: return "pass (floating point)";
    case BoundVerdict::fail_float: return "fail (floating point)";
  }
  return "?";
}

inline BoundVerdict power_law_bound(unsigned r, std::uint64_t n, const BigInt& p) {
  const std::uint64_t M = std::uint64_t{1} << r;
  std::uint64_t e = 0;
  for (std::uint64_t q = 3; q <= n; q *= 3) ++e;
  BigInt base = 12 * ipow(4, M) * BigInt(n);
  if (p <= base * ipow(4, e * M)) return BoundVerdict::pass_exact;
  if (p > base * ipow(4, (e + 1) * M)) return BoundVerdict::fail_exact;
  long double lhs = std::log(static_cast<long double>(p.convert_to<double>()));
  long double rhs = std::log(static_cast<long double>(base.convert_to<double>())) +
                    static_cast<long double>(M) * std::log(4.0L) / std::log(3.0L) * std::log(static_cast<long double>(n));
  return lhs <= rhs ? BoundVerdict::pass_float : BoundVerdict::fail_float;
}

// ---------------------------------------------------------------------------
// Structural checks on explicit levels

struct StructureReport {
  struct Level {
    std::size_t k = 0;
    bool count_ok = false;     // explicit word count equals s_k
    bool boundary_ok = true;   // first and last letters nonzero
    bool extension_ok = true;  // a 0^n prefix and 0^n a suffix of words one level up
    bool pushdown_ok = true;   // length-n_d prefixes/suffixes lie in X_d, d < k
    std::string witness;       // first violation, rendered
  };
  std::vector<Level> levels;
  bool checkpoint_identity = true;  // s_{k_l} = 4^{k_l - 1}
  bool pass() const {
    if (!checkpoint_identity) return false;
    for (const auto& l : levels)
      if (!(l.count_ok && l.boundary_ok && l.extension_ok && l.pushdown_ok)) return false;
    return true;
  }
};

inline StructureReport verify_xk_structure(const XkSystem& sys, std::size_t k_max) {
  StructureReport rep;
  const auto& ab = alphabet();
  for (std::size_t k = 1; k <= k_max; ++k) {
    const auto& L = sys.explicit_level(k);
    StructureReport::Level lv;
    lv.k = k;
    lv.count_ok = BigInt(L.count()) == L.s;
    auto fail = [&](bool& flag, std::string_view w) {
      if (flag && lv.witness.empty()) lv.witness = ab.render(w);
      flag = false;
    };
    Word z = zeros(L.n);
    const bool up = k + 1 <= sys.max_level();
    for (std::size_t i = 0; i < L.count(); ++i) {
      auto w = L.word(i);
      if (w.front() == kZero || w.back() == kZero) fail(lv.boundary_ok, w);
      if (up) {
        // the rule one level up names the candidates; membership is checked independently
        Word a(w);
        Word beta, gamma;
        if (sys.level(k + 1).rule == Rule::squaring) {
          beta = gamma = a + z + a;
        } else {
          beta = a + z + Word(L.word(static_cast<std::size_t>((i + 1) % L.count())));
          gamma = Word(L.word(static_cast<std::size_t>((i + L.count() - 1) % L.count()))) + z + a;
        }
        if (!sys.contains(k + 1, beta) || !sys.contains(k + 1, gamma)) fail(lv.extension_ok, w);
      }
      for (std::size_t d = 1; d < k; ++d) {
        std::uint64_t nd = sys.n(d);
        if (!sys.contains(d, w.substr(0, nd)) || !sys.contains(d, w.substr(L.n - nd))) fail(lv.pushdown_ok, w);
      }
    }
    rep.levels.push_back(lv);
  }
  for (auto kl : sys.checkpoints())
    if (kl <= sys.max_level() && sys.s(kl) != ipow(4, kl - 1)) rep.checkpoint_identity = false;
  return rep;
}

// ---------------------------------------------------------------------------
// Derivative spike at checkpoint l

struct SpikeReport {
  unsigned r = 0;
  std::size_t l = 0;
  std::uint64_t t = 0;     // n_{k_l + r}
  std::uint64_t s = 0;     // s_{k_{l+1}}
  std::uint64_t base = 0;  // n_{k_{l+1}}
  std::uint64_t lo = 0, hi = 0;
  std::vector<std::uint64_t> p;  // p(base) .. p(hi)

  // witness families
  std::uint64_t family_b = 0, family_b_distinct = 0, family_b_members_ok = 0;
  std::uint64_t family_b_decode_audited = 0, family_b_decode_failures = 0;
  std::uint64_t family_a = 0, family_a_distinct = 0;
  std::uint64_t overlap = 0;
  std::uint64_t union_size = 0;
  bool lower_ok = false;  // union - p(base) >= t s^2 and p(hi) >= union
  bool upper_ok = false;  // p(hi) <= 11 t s^2 ("proof constant")
  static constexpr unsigned kProofConstant = 11;

  // derivative
  std::vector<std::uint64_t> candidates;  // m with 3 p'(m) >= s^2
  std::uint64_t m = 0;
  std::uint64_t p_m = 0, dp_m = 0;
  Rational epsilon;
  BigInt lhs, rhs;  // p'(m)^b m^a  vs  p(m)^b
  bool epsilon_ok = false;

  std::uint64_t p_at(std::uint64_t n) const { return p.at(n - base); }
  bool pass() const {
    return lower_ok && upper_ok && !candidates.empty() && epsilon_ok && family_b_decode_failures == 0 &&
           family_b_members_ok == family_b;
  }
};

namespace detail {

// (u, v, i) back from 0^i u 0^N v 0^{t-i}: the only run of exactly N zeros
// bounded by nonzero letters separates u from v.
inline std::optional<std::tuple<Word, Word, std::uint64_t>> decode_xi(const Word& xi, std::uint64_t t, std::uint64_t N) {
  std::optional<std::tuple<Word, Word, std::uint64_t>> out;
  std::size_t i = 0;
  while (i < xi.size()) {
    if (xi[i] != kZero) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < xi.size() && xi[j] == kZero) ++j;
    if (i > 0 && j < xi.size() && j - i == N) {
      if (out) return std::nullopt;  // two such runs
      std::uint64_t start = i >= t ? i - t : 0;
      if (i < t) return std::nullopt;
      out = std::make_tuple(xi.substr(start, t), xi.substr(j, t), start);
    }
    i = j;
  }
  return out;
}

}  // namespace detail

inline SpikeReport verify_derivative_spike(const XkSystem& sys, std::size_t l, Rational epsilon) {
  SpikeReport rep;
  rep.r = sys.params().r;
  rep.l = l;
  rep.epsilon = epsilon;
  const std::size_t kl = sys.checkpoint(l), kn = sys.checkpoint(l + 1);
  const std::size_t ku = kl + rep.r;  // level of u, v
  if (kn + 1 > sys.max_level()) throw LevelError(kn + 1);
  rep.t = sys.n(ku);
  rep.s = sys.s(kn).convert_to<std::uint64_t>();
  rep.base = sys.n(kn);
  rep.lo = rep.base + 1;
  rep.hi = rep.base + 3 * rep.t;
  const std::uint64_t t = rep.t, N = rep.base;

  rep.p = xk_complexity_table(sys, rep.base, rep.hi);

  // Family B: xi_{u,v,i} = 0^i u 0^N v 0^{t-i}. The padding choice works because
  // u ends a word of X_{kn} right after a zero block of length >= t, and v starts one
  // right before such a block; membership is certified through an explicit host.
  const auto& U = sys.explicit_level(ku);
  const auto& K = sys.explicit_level(kn);
  std::unordered_map<Word, std::size_t> ends_with, starts_with;
  for (std::size_t j = 0; j < K.count(); ++j) {
    auto w = K.word(j);
    ends_with.try_emplace(Word(w.substr(K.n - t)), j);
    starts_with.try_emplace(Word(w.substr(0, t)), j);
  }
  std::vector<Fp128> fb;
  fb.reserve(U.count() * U.count() * (t + 1));
  const Word zN = zeros(N);
  Word host, xi;
  for (std::size_t a = 0; a < U.count(); ++a) {
    Word u(U.word(a));
    auto ia = ends_with.find(u);
    for (std::size_t b = 0; b < U.count(); ++b) {
      Word v(U.word(b));
      auto ib = starts_with.find(v);
      bool host_ok = false;
      if (ia != ends_with.end() && ib != starts_with.end()) {
        host = Word(K.word(ia->second)) + zN + Word(K.word(ib->second));
        host_ok = sys.contains(kn + 1, host);
      }
      for (std::uint64_t i = 0; i <= t; ++i) {
        xi = zeros(i) + u + zN + v + zeros(t - i);
        Fp128 f = fingerprint(xi);
        fb.push_back(f);
        ++rep.family_b;
        if (host_ok && host.compare(K.n - t - i, xi.size(), xi) == 0) ++rep.family_b_members_ok;
        if (wordlab::detail::audit_selected(f, 0xB)) {
          ++rep.family_b_decode_audited;
          auto dec = detail::decode_xi(xi, t, N);
          if (!dec || std::get<0>(*dec) != u || std::get<1>(*dec) != v || std::get<2>(*dec) != i)
            ++rep.family_b_decode_failures;
        }
      }
    }
  }
  std::sort(fb.begin(), fb.end());
  rep.family_b_distinct = static_cast<std::uint64_t>(std::unique(fb.begin(), fb.end()) - fb.begin());
  fb.resize(rep.family_b_distinct);
  auto in_b = [&](const Fp128& f) { return std::binary_search(fb.begin(), fb.end(), f); };

  // Family A: one extension u_a a v_a (|u_a| = t, |v_a| = 2t) per factor a of length N,
  // taken from windows of 0^{2N} x 0^{2N}, x in X_{kn+1}; extensions outside B preferred.
  // For a = 0^N the extension is xi_{u0,v0,0} with u0 = v0 the first word of X_{ku}.
  struct Choice {
    Fp128 ext;
    bool in_b;
  };
  std::unordered_map<Fp128, Choice, Fp128Hash> chosen;
  const Word zero_word = zN;
  const Fp128 zero_fp = fingerprint(zero_word);
  {
    Word u0(U.word(0));
    chosen[zero_fp] = {fingerprint(u0 + zN + u0 + zeros(t)), true};
  }
  const auto& H = sys.explicit_level(kn + 1);
  const Word pad = zeros(2 * N);
  PrefixHash ph;
  for (std::size_t j = 0; j < H.count(); ++j) {
    host = pad + Word(H.word(j)) + pad;
    ph.assign(host);
    for (std::size_t q = t; q + N + 2 * t <= host.size(); ++q) {
      Fp128 a = ph.window(q, N);
      auto it = chosen.find(a);
      if (it != chosen.end() && (!it->second.in_b || a == zero_fp)) continue;
      Fp128 e = ph.window(q - t, N + 3 * t);
      bool eb = in_b(e);
      if (it == chosen.end())
        chosen.emplace(a, Choice{e, eb});
      else if (!eb)
        it->second = {e, false};
    }
  }
  rep.family_a = chosen.size();
  std::vector<Fp128> fa;
  for (const auto& [a, c] : chosen) {
    fa.push_back(c.ext);
    if (in_b(c.ext)) ++rep.overlap;
  }
  std::sort(fa.begin(), fa.end());
  rep.family_a_distinct = static_cast<std::uint64_t>(std::unique(fa.begin(), fa.end()) - fa.begin());
  rep.union_size = rep.family_a_distinct + rep.family_b_distinct - rep.overlap;

  const BigInt ts2 = BigInt(t) * rep.s * rep.s;
  const std::uint64_t p_base = rep.p_at(N), p_hi = rep.p_at(rep.hi);
  rep.lower_ok = rep.family_a == p_base && rep.family_a_distinct == rep.family_a &&
                 rep.family_b_distinct == rep.family_b && BigInt(rep.union_size) >= BigInt(p_base) + ts2 &&
                 rep.union_size <= p_hi;
  rep.upper_ok = BigInt(p_hi) <= SpikeReport::kProofConstant * ts2;

  // m with p'(m) >= s^2 / 3; among those the one maximizing p'(m)^b m^a / p(m)^b
  auto e = RationalExponent::from(epsilon);
  const auto a_exp = static_cast<std::uint64_t>(e.num), b_exp = static_cast<std::uint64_t>(e.den);
  BigInt best_l, best_r;
  for (std::uint64_t m = rep.lo; m <= rep.hi; ++m) {
    std::uint64_t dp = rep.p_at(m) - rep.p_at(m - 1);
    if (BigInt(3) * dp < BigInt(rep.s) * rep.s) continue;
    rep.candidates.push_back(m);
    BigInt lhs = ipow(BigInt(dp), b_exp) * ipow(BigInt(m), a_exp);
    BigInt rhs = ipow(BigInt(rep.p_at(m)), b_exp);
    if (rep.m == 0 || lhs * best_r > best_l * rhs) {
      rep.m = m;
      rep.p_m = rep.p_at(m);
      rep.dp_m = dp;
      best_l = lhs;
      best_r = rhs;
    }
  }
  rep.lhs = best_l;
  rep.rhs = best_r;
  rep.epsilon_ok = rep.m != 0 && best_l >= best_r;
  return rep;
}

}  // namespace wordlab::xk
