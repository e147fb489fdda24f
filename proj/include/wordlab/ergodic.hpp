// Uniquely ergodic subshift from a subexponential f: the c_k sequence, the
// levels W(k) = W(k-1) C(k-1) of length-2^k words, the queue that forces every
// built word to reappear as a prefix, and exact frequency intervals.
#pragma once

#include "wordlab/growth.hpp"
#include "wordlab/numeric.hpp"
#include "wordlab/words.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace wordlab::ergodic {

class UnsupportedError : public std::runtime_error {
 public:
  explicit UnsupportedError(const std::string& what) : std::runtime_error("unsupported: " + what) {}
};

// Raised when the construction cannot continue as designed. Should never fire.
class ConstructionError : public std::runtime_error {
 public:
  explicit ConstructionError(const std::string& what) : std::runtime_error("construction invariant: " + what) {}
};

inline Alphabet alphabet_of_size(std::size_t b) {
  static const std::string letters = "abcdefghijklmnopqrstuvwxyz";
  if (b < 2 || b > letters.size()) throw std::invalid_argument("f(1) must be in [2,26]");
  return Alphabet(letters.substr(0, b));
}

enum class ChoicePolicy { lexicographic, seeded_random };

struct ErgodicParams {
  growth::GrowthTable f;
  std::size_t max_level = 8;  // K: W(0..K) get built
  ChoicePolicy policy = ChoicePolicy::lexicographic;
  std::uint64_t seed = 1;
  std::uint64_t max_bytes = 2ULL << 30;
};

// f(n) = 2^ceil(sqrt n), the default input.
inline growth::GrowthTable default_f(std::size_t n_max) {
  return growth::tabulate(n_max, [](std::size_t n) {
    return BigInt(1) << static_cast<unsigned>(iroot_ceil(BigInt(n), 2).convert_to<std::uint64_t>());
  });
}

struct CSequence {
  std::vector<BigInt> c;  // c_0..c_K
  std::vector<BigInt> N;  // N_k = b c_0 ... c_k
  std::vector<bool> second_branch;  // c_k came from the floor branch (or its forced 1)
  std::set<std::size_t> ones;
  std::size_t b = 0;
};

// Checks the input, then runs the branch rule. f must reach 2^{K+2}.
inline CSequence build_c_sequence(const growth::GrowthTable& f, std::size_t K) {
  if (f.size() == 0 || f(1) < 2) throw std::invalid_argument("f(1) must be at least 2");
  if (K >= 40 || f.size() < (std::size_t{1} << (K + 2))) throw growth::HorizonError();
  auto rep = growth::check_growth_properties(f);
  if (!rep.nondecreasing) throw std::invalid_argument("f must be non-decreasing");
  if (!rep.submultiplicative) throw std::invalid_argument("f must be submultiplicative");

  CSequence s;
  s.b = f(1).convert_to<std::size_t>();
  auto F = [&](std::size_t e) { return f(std::size_t{1} << e); };
  s.c.assign(K + 1, 0);
  s.second_branch.assign(K + 1, false);
  s.c[0] = 1;
  for (std::size_t k = 0; k + 1 <= K; ++k) {
    BigInt Nk = BigInt(s.b);
    for (std::size_t i = 0; i <= k; ++i) Nk *= s.c[i];
    if (s.c[k + 1] != 0) continue;  // set to 1 by an earlier floor step
    BigInt cap = 2 * F(k + 2);
    if (Nk * Nk <= cap) {
      s.c[k + 1] = Nk;
    } else {
      s.c[k + 1] = cap / Nk;
      s.second_branch[k + 1] = true;
      if (k + 2 <= K) {
        s.c[k + 2] = 1;
        s.second_branch[k + 2] = true;
      }
    }
  }
  BigInt acc = BigInt(s.b);
  for (std::size_t k = 0; k <= K; ++k) {
    acc *= s.c[k];
    s.N.push_back(acc);
    if (s.c[k] == 1) s.ones.insert(k);
  }
  // The floor branch never firing means N_k squares all the way: f looks exponential.
  if (K >= 3 && std::none_of(s.second_branch.begin(), s.second_branch.end(), [](bool x) { return x; }))
    throw UnsupportedError("exponential growth (no c_k = 1 past k = 0 within range)");
  return s;
}

struct CSequenceCheck {
  bool c0_is_one = true;
  bool c_bounds = true;    // 1 <= c_{k+1} <= N_k
  bool sandwich = true;    // f(2^k) <= N_k <= 2 f(2^{k+1})
  bool branch_rule = true; // recomputed independently of the builder's bookkeeping
  std::optional<std::size_t> first_violation;
  bool pass() const { return c0_is_one && c_bounds && sandwich && branch_rule; }
};

inline CSequenceCheck check_c_sequence(const growth::GrowthTable& f, const CSequence& s) {
  CSequenceCheck r;
  const std::size_t K = s.c.size() - 1;
  auto F = [&](std::size_t e) { return f(std::size_t{1} << e); };
  auto fail = [&](bool& flag, std::size_t k) {
    flag = false;
    if (!r.first_violation) r.first_violation = k;
  };
  r.c0_is_one = s.c[0] == 1;
  for (std::size_t k = 0; k <= K; ++k) {
    if (k + 1 <= K && (s.c[k + 1] < 1 || s.c[k + 1] > s.N[k])) fail(r.c_bounds, k);
    if (F(k) > s.N[k] || s.N[k] > 2 * F(k + 1)) fail(r.sandwich, k);
  }
  // c_{k+1} is N_k when N_k^2 fits under 2f(2^{k+2}), the floor quotient
  // otherwise, unless a floor step at k-1 already forced it to 1.
  bool forced_next = false;
  for (std::size_t k = 0; k + 1 <= K; ++k) {
    BigInt cap = 2 * F(k + 2);
    if (forced_next) {
      if (s.c[k + 1] != 1) fail(r.branch_rule, k + 1);
      forced_next = false;
      continue;
    }
    bool square = s.N[k] * s.N[k] <= cap;
    if (s.c[k + 1] != (square ? s.N[k] : cap / s.N[k])) fail(r.branch_rule, k + 1);
    forced_next = !square;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Levels

struct QueueRef {
  std::size_t level = 0;
  std::size_t index = 0;  // into the level's sorted word list
};

struct ErgodicLevel {
  std::size_t k = 0;
  std::size_t len = 0;      // 2^k
  std::string flat;         // W(k), sorted, back to back
  std::vector<std::uint32_t> queue_order;  // order in which W(k) was appended to U
  std::vector<std::uint32_t> chosen;       // C(k) as indices into W(k); empty at the top level
  std::uint64_t c = 0;
  bool consumed_head = false;
  std::optional<QueueRef> head_before;     // u_1 when C(k) was chosen
  std::size_t queue_len = 0;               // |U(k)|

  std::size_t count() const { return len ? flat.size() / len : 0; }
  std::string_view word(std::size_t i) const { return std::string_view(flat).substr(i * len, len); }
  bool contains(std::string_view w) const {
    if (w.size() != len) return false;
    std::size_t lo = 0, hi = count();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (word(mid) < w) lo = mid + 1;
      else hi = mid;
    }
    return lo < count() && word(lo) == w;
  }
};

class ErgodicSystem {
 public:
  ErgodicSystem(ErgodicParams p) : p_(std::move(p)), cseq_(build_c_sequence(p_.f, p_.max_level)), ab_(alphabet_of_size(cseq_.b)) {
    build();
  }

  const ErgodicParams& params() const { return p_; }
  const CSequence& cseq() const { return cseq_; }
  const Alphabet& alphabet() const { return ab_; }
  std::size_t depth() const { return levels_.size() - 1; }
  const ErgodicLevel& level(std::size_t k) const { return levels_.at(k); }
  const std::vector<ErgodicLevel>& levels() const { return levels_; }
  std::string_view queue_word(const QueueRef& q) const { return levels_.at(q.level).word(q.index); }

 private:
  void build() {
    const std::size_t K = p_.max_level;
    std::uint64_t bytes = 0;
    for (std::size_t k = 0; k <= K; ++k) {
      BigInt words = k == 0 ? BigInt(cseq_.b) : cseq_.N[k - 1];
      BigInt need = words * (BigInt(1) << k);
      if (need > BigInt(p_.max_bytes) || (bytes += need.convert_to<std::uint64_t>()) > p_.max_bytes) throw BudgetError("budget");
    }
    std::mt19937_64 rng(p_.seed);
    const bool lex = p_.policy == ChoicePolicy::lexicographic;

    ErgodicLevel L0;
    L0.len = 1;
    for (std::size_t a = 0; a < cseq_.b; ++a) L0.flat.push_back(static_cast<char>(a));
    levels_.push_back(std::move(L0));

    // U is the concatenation of the levels' queue orders; head_ is a global position.
    std::size_t total = 0, head = 0;
    auto append_order = [&](ErgodicLevel& L) {
      L.queue_order.resize(L.count());
      std::iota(L.queue_order.begin(), L.queue_order.end(), 0U);
      if (!lex) std::shuffle(L.queue_order.begin(), L.queue_order.end(), rng);
      total += L.count();
    };
    append_order(levels_[0]);
    levels_[0].queue_len = total;
    auto ref_at = [&](std::size_t pos) {
      for (std::size_t k = 0; k < levels_.size(); ++k) {
        if (pos < levels_[k].count()) return QueueRef{k, levels_[k].queue_order[pos]};
        pos -= levels_[k].count();
      }
      throw ConstructionError("queue position out of range");
    };

    for (std::size_t k = 0; k < K; ++k) {
      ErgodicLevel& L = levels_[k];
      L.k = k;
      const std::uint64_t ck = cseq_.c[k].convert_to<std::uint64_t>();
      L.c = ck;
      if (ck > L.count()) throw ConstructionError("c_k exceeds |W(k)| at k=" + std::to_string(k));
      QueueRef u1 = ref_at(head);
      L.head_before = u1;
      std::string_view uw = queue_word(u1);
      if (ck == 1 && L.len >= uw.size()) {
        // C(k) = {v}, v in W(k) starting with the queue head; the head is dropped
        std::vector<std::uint32_t> cand;
        for (std::size_t i = 0; i < L.count(); ++i)
          if (L.word(i).substr(0, uw.size()) == uw) cand.push_back(static_cast<std::uint32_t>(i));
        if (cand.empty()) throw ConstructionError("no word of W(" + std::to_string(k) + ") extends queue head " + ab_.render(uw));
        std::size_t pick = 0;
        if (!lex) pick = std::uniform_int_distribution<std::size_t>(0, cand.size() - 1)(rng);
        L.chosen = {cand[pick]};
        L.consumed_head = true;
        ++head;
      } else {
        std::vector<std::uint32_t> all(L.count());
        std::iota(all.begin(), all.end(), 0U);
        if (!lex) std::shuffle(all.begin(), all.end(), rng);
        all.resize(ck);
        std::sort(all.begin(), all.end());
        L.chosen = std::move(all);
      }
      // W(k+1) = W(k) C(k); sorted because W(k) is sorted and C(k) is ascending
      ErgodicLevel next;
      next.k = k + 1;
      next.len = L.len * 2;
      next.flat.reserve(L.count() * L.chosen.size() * next.len);
      for (std::size_t i = 0; i < L.count(); ++i)
        for (auto j : L.chosen) {
          next.flat.append(L.word(i));
          next.flat.append(L.word(j));
        }
      levels_.push_back(std::move(next));
      append_order(levels_.back());
      levels_.back().queue_len = total - head;
    }
    levels_.back().k = K;
    levels_.back().c = cseq_.c[K].convert_to<std::uint64_t>();
  }

  ErgodicParams p_;
  CSequence cseq_;
  Alphabet ab_;
  std::vector<ErgodicLevel> levels_;
};

// ---------------------------------------------------------------------------
// Frequency intervals

struct FrequencyInterval {
  Word u;
  std::size_t n = 0;
  Rational a, b;  // min / max of phi_u over W(n)
  Rational delta() const { return b - a; }
};

inline FrequencyInterval frequency_interval(const ErgodicSystem& sys, const Word& u, std::size_t n) {
  const auto& L = sys.level(n);
  std::uint64_t lo = UINT64_MAX, hi = 0;
  for (std::size_t i = 0; i < L.count(); ++i) {
    auto c = count_occurrences(u, L.word(i));
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  return FrequencyInterval{u, n, Rational(BigInt(lo), BigInt(L.len)), Rational(BigInt(hi), BigInt(L.len))};
}

struct NestingReport {
  Word u;
  std::vector<FrequencyInterval> intervals;
  bool a_nondecreasing = true;
  bool nested = true;          // I_{n+1} inside I_n + [0, d/2^{n+1}]
  bool delta_step = true;      // Delta_{n+1} <= Delta_n + d/2^{n+1}
  bool delta_halving = true;   // Delta_{n+1} <= Delta_n/2 + d/2^{n+1} for c_n = 1
  bool explicit_bound = true;  // Delta_{n+1} <= 2^{-k_n} Delta_{n0} + d/2^{n0}, every n0 <= n
  bool telescoped_bound = true;  // same with the partial geometric sum in place of d/2^{n0}
  std::vector<std::size_t> halving_levels;       // n with c_n = 1 and n+1 built
  std::vector<std::size_t> consumption_levels;   // subset where the queue head was consumed
  std::optional<std::string> first_violation;
  bool pass() const { return a_nondecreasing && nested && delta_step && delta_halving && explicit_bound && telescoped_bound; }
};

inline NestingReport verify_interval_nesting(const ErgodicSystem& sys, const Word& u) {
  if (sys.depth() < 2) throw std::invalid_argument("need at least 3 levels");
  NestingReport r;
  r.u = u;
  const Rational d(static_cast<long long>(u.size()));
  for (std::size_t n = 0; n <= sys.depth(); ++n) r.intervals.push_back(frequency_interval(sys, u, n));
  auto slack = [&](std::size_t n) { return d / Rational(BigInt(1) << (n + 1)); };  // d / 2^{n+1}
  auto note = [&](bool& flag, const std::string& what) {
    flag = false;
    if (!r.first_violation) r.first_violation = what;
  };
  const auto& ones = sys.cseq().ones;
  for (std::size_t n = 0; n + 1 <= sys.depth(); ++n) {
    const auto& I = r.intervals[n];
    const auto& J = r.intervals[n + 1];
    if (J.a < I.a) note(r.a_nondecreasing, "a decreases at n=" + std::to_string(n));
    if (J.a < I.a || J.b > I.b + slack(n)) note(r.nested, "nesting at n=" + std::to_string(n));
    if (J.delta() > I.delta() + slack(n)) note(r.delta_step, "delta step at n=" + std::to_string(n));
    if (ones.count(n)) {
      r.halving_levels.push_back(n);
      if (sys.level(n).consumed_head) r.consumption_levels.push_back(n);
      if (J.delta() > I.delta() / 2 + slack(n)) note(r.delta_halving, "delta halving at n=" + std::to_string(n));
    }
  }
  for (std::size_t n0 = 0; n0 + 1 <= sys.depth(); ++n0) {
    std::size_t kn = 0;
    Rational geo = 0;
    for (std::size_t n = n0; n + 1 <= sys.depth(); ++n) {
      kn += ones.count(n);
      geo += slack(n);
      Rational shrink = r.intervals[n0].delta() / Rational(BigInt(1) << kn);
      const Rational& lhs = r.intervals[n + 1].delta();
      std::string at = " at n0=" + std::to_string(n0) + ", n=" + std::to_string(n);
      if (lhs > shrink + d / Rational(BigInt(1) << n0)) note(r.explicit_bound, "explicit bound" + at);
      if (lhs > shrink + geo) note(r.telescoped_bound, "telescoped bound" + at);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Decomposition of a factor into level blocks

struct Block {
  std::size_t level = 0;
  Word word;
};

struct Decomposition {
  std::vector<Block> ascending;   // u_1..u_r, strictly increasing levels
  std::vector<Block> descending;  // w_1..w_s, strictly decreasing levels
  std::size_t host_level = 0;     // smallest level containing the factor (search) or the given host level
  bool verified = false;

  std::vector<Block> blocks() const {
    auto out = ascending;
    out.insert(out.end(), descending.begin(), descending.end());
    return out;
  }
};

class NotAFactorError : public std::runtime_error {
 public:
  explicit NotAFactorError(std::size_t deepest)
      : std::runtime_error("not a factor of any built word (searched to level " + std::to_string(deepest) + ")") {}
};

namespace detail {

// z in W(t), p a proper prefix of it: greedy binary expansion, levels decreasing.
inline void prefix_blocks(std::string_view z, std::size_t t, std::size_t len, std::vector<Block>& out) {
  while (len > 0) {
    std::size_t m = 0;
    while ((std::size_t{2} << m) <= len) ++m;
    if (m > t) throw ConstructionError("prefix longer than host");
    out.push_back(Block{m, Word(z.substr(0, std::size_t{1} << m))});
    // the rest is a prefix of the next block, an element of C(m)
    z = z.substr(std::size_t{1} << m, std::size_t{1} << m);
    len -= std::size_t{1} << m;
    t = m;
  }
}

// z in W(t), s a suffix of length len: levels increasing.
inline void suffix_blocks(std::string_view z, std::size_t t, std::size_t len, std::vector<Block>& out) {
  std::vector<Block> rev;
  while (len > 0) {
    if (len == z.size()) {
      rev.push_back(Block{t, Word(z)});
      break;
    }
    std::size_t half = z.size() / 2;
    if (len <= half) {
      z = z.substr(half);
    } else {
      rev.push_back(Block{t - 1, Word(z.substr(half))});
      z = z.substr(0, half);
      len -= half;
    }
    --t;
  }
  out.insert(out.end(), rev.rbegin(), rev.rend());
}

}  // namespace detail

inline bool check_decomposition(const ErgodicSystem& sys, std::string_view v, const Decomposition& d) {
  Word joined;
  for (std::size_t i = 0; i < d.ascending.size(); ++i)
    if (i && d.ascending[i].level <= d.ascending[i - 1].level) return false;
  for (std::size_t i = 0; i < d.descending.size(); ++i)
    if (i && d.descending[i].level >= d.descending[i - 1].level) return false;
  for (const auto& b : d.blocks()) {
    if (b.level > sys.depth() || !sys.level(b.level).contains(b.word)) return false;
    joined += b.word;
  }
  return joined == v;
}

// The window [offset, offset+len) of z in W(t).
inline Decomposition decompose_window(const ErgodicSystem& sys, std::string_view z, std::size_t t, std::size_t offset,
                                      std::size_t len) {
  if (z.size() != (std::size_t{1} << t) || offset + len > z.size() || len == 0)
    throw std::invalid_argument("window outside host");
  Decomposition d;
  d.host_level = t;
  std::string_view v = z.substr(offset, len);
  // descend while the window sits inside one half
  while (len < z.size()) {
    std::size_t half = z.size() / 2;
    if (offset + len <= half) {
      z = z.substr(0, half);
    } else if (offset >= half) {
      z = z.substr(half);
      offset -= half;
    } else {
      break;
    }
    --t;
  }
  if (len == z.size()) {
    d.ascending.push_back(Block{t, Word(z)});
  } else {
    std::size_t half = z.size() / 2;
    detail::suffix_blocks(z.substr(0, half), t - 1, half - offset, d.ascending);
    detail::prefix_blocks(z.substr(half), t - 1, offset + len - half, d.descending);
  }
  d.verified = check_decomposition(sys, v, d);
  return d;
}

inline Decomposition decompose_factor(const ErgodicSystem& sys, const Word& v) {
  if (v.empty()) throw std::invalid_argument("empty factor");
  for (std::size_t t = 0; t <= sys.depth(); ++t) {
    const auto& L = sys.level(t);
    if (L.len < v.size()) continue;
    for (std::size_t i = 0; i < L.count(); ++i) {
      auto pos = L.word(i).find(v);
      if (pos != std::string_view::npos) return decompose_window(sys, L.word(i), t, pos, v.size());
    }
  }
  throw NotAFactorError(sys.depth());
}

// ---------------------------------------------------------------------------
// Frequencies of long windows against the level intervals

struct DeviationCheck {
  std::size_t n = 0;  // window length 2^n
  std::size_t t = 0;
  Rational lower, upper;  // a_t (1 - 2^{t+1}/N) and max b_j + 2^{t+1}/N + (2n+1)d/N
  Rational min_seen, max_seen;
  Rational midpoint_deepest;
  Rational max_deviation;  // from the midpoint of the deepest interval
  std::uint64_t windows = 0;
  bool ok = true;
};

// Every length-2^n window of every W(n+3) word; t defaults to max(n-2, 0).
inline std::vector<DeviationCheck> verify_frequency_deviation(const ErgodicSystem& sys, const Word& u,
                                                              std::optional<std::size_t> t_override = {}) {
  std::vector<DeviationCheck> out;
  std::vector<FrequencyInterval> I;
  for (std::size_t n = 0; n <= sys.depth(); ++n) I.push_back(frequency_interval(sys, u, n));
  const auto& deep = I.back();
  Rational mid = (deep.a + deep.b) / 2;
  const std::size_t d = u.size();
  for (std::size_t n = 0; n + 3 <= sys.depth(); ++n) {
    DeviationCheck c;
    c.n = n;
    c.t = t_override ? std::min(*t_override, n) : (n >= 2 ? n - 2 : 0);
    const std::uint64_t N = std::uint64_t{1} << n;
    Rational edge(BigInt(2) << c.t, BigInt(N));
    Rational Bmax = I[c.t].b;
    for (std::size_t j = c.t; j <= n; ++j) Bmax = std::max(Bmax, I[j].b);
    c.lower = I[c.t].a * (1 - edge);
    c.upper = Bmax + edge + Rational(BigInt((2 * n + 1) * d), BigInt(N));
    c.midpoint_deepest = mid;
    std::uint64_t lo = UINT64_MAX, hi = 0;
    const auto& H = sys.level(n + 3);
    std::vector<std::uint32_t> pref;
    for (std::size_t i = 0; i < H.count(); ++i) {
      auto w = H.word(i);
      // pref[j] = number of occurrences of u starting before j
      pref.assign(w.size() + 1, 0);
      for (std::size_t j = 0; j < w.size(); ++j) pref[j + 1] = pref[j] + (j + d <= w.size() && w.substr(j, d) == u);
      for (std::size_t s = 0; s + N <= w.size(); ++s) {
        std::uint64_t cnt = N >= d ? pref[s + N - d + 1] - pref[s] : 0;
        lo = std::min(lo, cnt);
        hi = std::max(hi, cnt);
        ++c.windows;
      }
    }
    c.min_seen = Rational(BigInt(lo), BigInt(N));
    c.max_seen = Rational(BigInt(hi), BigInt(N));
    c.ok = c.min_seen >= c.lower && c.max_seen <= c.upper;
    c.max_deviation = std::max(abs(c.max_seen - mid), abs(c.min_seen - mid));
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Complexity at dyadic scales

struct ComplexityEntry {
  std::uint64_t n = 0;
  std::uint64_t deeper = 0;   // distinct length-n factors of W(K)
  std::uint64_t shallower = 0;  // of W(K-1)
  bool stabilized() const { return deeper == shallower; }
  const char* label() const { return stabilized() ? "stabilized" : "lower bound"; }
};

inline ComplexityEntry subshift_complexity(const ErgodicSystem& sys, std::uint64_t n, const FactorOptions& opt = {}) {
  const std::size_t K = sys.depth();
  auto count_at = [&](std::size_t k) -> std::uint64_t {
    const auto& L = sys.level(k);
    if (L.len < n) return 0;
    std::vector<Word> hosts;
    hosts.reserve(L.count());
    for (std::size_t i = 0; i < L.count(); ++i) hosts.emplace_back(L.word(i));
    return count_factors(hosts, n, opt).count;
  };
  return ComplexityEntry{n, count_at(K), count_at(K - 1)};
}

struct SandwichEntry {
  std::size_t k = 0;
  BigInt f_half;        // f(2^{k-1})
  BigInt W;             // |W(k)|
  BigInt f_double;      // 2 f(2^k)
  std::uint64_t factors_next = 0;  // distinct length-2^k factors of W(k+1)
  BigInt factor_cap;    // 2^k |W(k+1)|
  bool ok() const { return f_half <= W && W <= f_double && BigInt(factors_next) <= factor_cap; }
};

// k = 1..K-1.
inline std::vector<SandwichEntry> dyadic_sandwich(const ErgodicSystem& sys) {
  std::vector<SandwichEntry> out;
  const auto& f = sys.params().f;
  for (std::size_t k = 1; k + 1 <= sys.depth(); ++k) {
    SandwichEntry e;
    e.k = k;
    e.f_half = f(std::size_t{1} << (k - 1));
    e.W = BigInt(sys.level(k).count());
    e.f_double = 2 * f(std::size_t{1} << k);
    const auto& L = sys.level(k + 1);
    std::vector<Word> hosts;
    for (std::size_t i = 0; i < L.count(); ++i) hosts.emplace_back(L.word(i));
    e.factors_next = count_factors(hosts, std::size_t{1} << k).count;
    e.factor_cap = (BigInt(1) << k) * L.count();
    out.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

struct RunLogEntry {
  std::size_t k = 0;
  BigInt c;
  std::uint64_t W = 0;
  std::size_t queue_len = 0;
  bool consumed_head = false;
  std::optional<Word> head;
};

inline std::vector<RunLogEntry> run_log(const ErgodicSystem& sys) {
  std::vector<RunLogEntry> out;
  for (std::size_t k = 0; k <= sys.depth(); ++k) {
    const auto& L = sys.level(k);
    RunLogEntry e{k, sys.cseq().c[k], L.count(), L.queue_len, L.consumed_head, std::nullopt};
    if (L.consumed_head && L.head_before) e.head = Word(sys.queue_word(*L.head_before));
    out.push_back(std::move(e));
  }
  return out;
}

inline void write_intervals_csv(std::ostream& os, const NestingReport& r) {
  os << "n,a_n,b_n,delta_n\n";
  for (const auto& I : r.intervals)
    os << I.n << ',' << rational_string(I.a) << ',' << rational_string(I.b) << ',' << rational_string(I.delta()) << '\n';
}

}  // namespace wordlab::ergodic
