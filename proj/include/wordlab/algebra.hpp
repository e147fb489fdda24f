// Convolution algebra of the groupoid Z x X for a subshift X given by a
// LanguageOracle. An element is a finite sum c * 1_{{d} x Z}, Z a cylinder
// {x : x[lo..hi] = pattern}; all terms of one element share the window.
#pragma once

#include "wordlab/language.hpp"
#include "wordlab/numeric.hpp"
#include "wordlab/subst.hpp"
#include "wordlab/words.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wordlab::algebra {

class AlgebraDepthError : public std::runtime_error {
 public:
  explicit AlgebraDepthError(std::size_t len)
      : std::runtime_error("depth: length " + std::to_string(len) + " required"), len_(len) {}
  std::size_t required_length() const { return len_; }

 private:
  std::size_t len_;
};

// Q by default; GF(p) when prime is set (coefficients kept as integers in [0, p)).
struct Field {
  std::optional<std::uint64_t> prime;

  Rational norm(const Rational& x) const {
    if (!prime) return x;
    BigInt p(*prime);
    BigInt n = numerator_of(x) % p;
    if (n < 0) n += p;
    BigInt d = denominator_of(x) % p;
    if (d == 0) throw std::domain_error("denominator vanishes mod p");
    BigInt inv = boost::multiprecision::powm(d, p - 2, p);
    return Rational((n * inv) % p);
  }
  std::string name() const { return prime ? "GF(" + std::to_string(*prime) + ")" : "Q"; }
  bool operator==(const Field& o) const { return prime == o.prime; }
};

namespace detail {

inline const std::vector<Word>& lang(const LanguageOracle& L, std::size_t n) {
  static const std::vector<Word> empty_only{Word()};
  if (n == 0) return empty_only;
  if (n > L.max_length()) throw AlgebraDepthError(n);
  return L.factors(n);
}

inline bool in_lang(const LanguageOracle& L, const Word& w) {
  if (w.empty()) return true;
  if (w.size() > L.max_length()) throw AlgebraDepthError(w.size());
  return L.contains(w);
}

}  // namespace detail

class Element {
 public:
  using Key = std::pair<std::int64_t, Word>;  // (degree, pattern on the window)

  explicit Element(const LanguageOracle& L, Field F = {}) : L_(&L), F_(std::move(F)) {}

  // c * 1_{{d} x {x : x[lo, lo+|pattern|) = pattern}}
  static Element cylinder(const LanguageOracle& L, std::int64_t d, std::int64_t lo, const Word& pattern,
                          Rational c = 1, Field F = {}) {
    Element e(L, F);
    e.lo_ = pattern.empty() ? 0 : lo;
    e.len_ = pattern.size();
    e.add_raw(d, pattern, c);
    return e.canonical();
  }

  // 1_{{d} x X}
  static Element shift(const LanguageOracle& L, std::int64_t d, Field F = {}) { return cylinder(L, d, 0, Word(), 1, F); }

  // Terms over a window [lo, lo+len); patterns outside L_w vanish.
  static Element from_terms(const LanguageOracle& L, std::int64_t lo, std::size_t len,
                            const std::vector<std::tuple<std::int64_t, Word, Rational>>& terms, Field F = {}) {
    Element e(L, F);
    e.lo_ = len ? lo : 0;
    e.len_ = len;
    for (const auto& [d, w, c] : terms) {
      if (w.size() != len) throw std::invalid_argument("pattern does not match window");
      e.add_raw(d, w, c);
    }
    return e.canonical();
  }

  const LanguageOracle& oracle() const { return *L_; }
  const Field& field() const { return F_; }
  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return lo_ + static_cast<std::int64_t>(len_) - 1; }
  std::size_t width() const { return len_; }
  const std::map<Key, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  std::set<std::int64_t> degrees() const {
    std::set<std::int64_t> out;
    for (const auto& [k, c] : terms_) out.insert(k.first);
    return out;
  }

  // Smallest N with the element in W_N.
  std::int64_t filtration_index() const {
    std::int64_t r = 0;
    for (const auto& [k, c] : terms_) r = std::max(r, std::abs(k.first));
    if (len_ && !terms_.empty()) r = std::max({r, std::abs(lo_), std::abs(hi())});
    return r;
  }

  Rational coefficient(std::int64_t d, const Word& pattern) const {
    auto it = terms_.find({d, pattern});
    return it == terms_.end() ? Rational(0) : it->second;
  }

  // Same function written over a larger window.
  Element extended(std::int64_t lo, std::size_t len) const {
    if (len_ && (lo > lo_ || lo + static_cast<std::int64_t>(len) < lo_ + static_cast<std::int64_t>(len_)))
      throw std::invalid_argument("window does not cover the element");
    Element e(*L_, F_);
    e.lo_ = len ? lo : 0;
    e.len_ = len;
    if (len == len_) {
      e.terms_ = terms_;
      return e;
    }
    std::size_t off = len_ ? static_cast<std::size_t>(lo_ - lo) : 0;
    std::unordered_map<std::string_view, std::vector<const Word*>> by_core;
    for (const auto& x : detail::lang(*L_, len)) by_core[std::string_view(x).substr(off, len_)].push_back(&x);
    for (const auto& [k, c] : terms_) {
      auto it = by_core.find(k.second);
      if (it == by_core.end()) continue;
      for (const Word* x : it->second) e.add_raw(k.first, *x, c);
    }
    return e;
  }

  // Drop zero coefficients and patterns outside L_w, then shrink the window
  // from either end while the dropped position never matters.
  Element canonical() const {
    Element e(*L_, F_);
    e.lo_ = lo_;
    e.len_ = len_;
    for (const auto& [k, c] : terms_)
      if (c != 0 && detail::in_lang(*L_, k.second)) e.terms_.emplace(k, c);
    bool changed = true;
    while (changed && e.len_ > 0) {
      changed = false;
      while (e.len_ > 0 && e.trim(true)) changed = true;
      while (e.len_ > 0 && e.trim(false)) changed = true;
    }
    if (e.len_ == 0) e.lo_ = 0;
    return e;
  }

  void add_raw(std::int64_t d, const Word& pattern, const Rational& c) {
    Rational v = F_.norm(c);
    if (v == 0) return;
    auto [it, fresh] = terms_.try_emplace(Key{d, pattern}, v);
    if (!fresh) {
      it->second = F_.norm(it->second + v);
      if (it->second == 0) terms_.erase(it);
    }
  }

 private:
  // Remove the leftmost (or rightmost) window position if coefficients never
  // depend on it. Missing terms count as zero.
  bool trim(bool left) {
    const std::size_t n = len_;
    const auto& alphabet = detail::lang(*L_, 1);
    std::map<Key, Rational> reduced;
    for (const auto& [k, c] : terms_) {
      Word core = left ? k.second.substr(1) : k.second.substr(0, n - 1);
      Key rk{k.first, core};
      if (reduced.count(rk)) continue;
      for (const auto& a : alphabet) {
        Word ext = left ? a + core : core + a;
        if (!detail::in_lang(*L_, ext)) continue;
        auto it = terms_.find(Key{k.first, ext});
        Rational v = it == terms_.end() ? Rational(0) : it->second;
        if (v != c) return false;
      }
      reduced.emplace(rk, c);
    }
    terms_ = std::move(reduced);
    if (left) ++lo_;
    --len_;
    return true;
  }

  const LanguageOracle* L_;
  Field F_;
  std::int64_t lo_ = 0;
  std::size_t len_ = 0;
  std::map<Key, Rational> terms_;

  friend Element convolve(const Element&, const Element&);
};

inline void check_compatible(const Element& a, const Element& b) {
  if (&a.oracle() != &b.oracle()) throw std::invalid_argument("elements over different oracles");
  if (!(a.field() == b.field())) throw std::invalid_argument("elements over different fields");
}

inline std::pair<std::int64_t, std::size_t> hull(const Element& a, const Element& b) {
  if (a.width() == 0) return {b.lo(), b.width()};
  if (b.width() == 0) return {a.lo(), a.width()};
  std::int64_t lo = std::min(a.lo(), b.lo()), hi = std::max(a.hi(), b.hi());
  return {lo, static_cast<std::size_t>(hi - lo + 1)};
}

inline Element scale(const Rational& c, const Element& a) {
  std::vector<std::tuple<std::int64_t, Word, Rational>> t;
  for (const auto& [k, v] : a.terms()) t.emplace_back(k.first, k.second, v * c);
  return Element::from_terms(a.oracle(), a.lo(), a.width(), t, a.field());
}

inline Element add(const Element& a, const Element& b, const Rational& cb = 1) {
  check_compatible(a, b);
  auto [lo, len] = hull(a, b);
  Element x = a.extended(lo, len), y = b.extended(lo, len);
  std::vector<std::tuple<std::int64_t, Word, Rational>> t;
  for (const auto& [k, v] : x.terms()) t.emplace_back(k.first, k.second, v);
  for (const auto& [k, v] : y.terms()) t.emplace_back(k.first, k.second, v * cb);
  return Element::from_terms(a.oracle(), lo, len, t, a.field());
}

inline Element operator+(const Element& a, const Element& b) { return add(a, b); }
inline Element operator-(const Element& a, const Element& b) { return add(a, b, -1); }

// Equality as functions on the groupoid. Minimal windows need not be unique
// for a general language, so compare through the difference.
inline bool equal(const Element& a, const Element& b) { return (a - b).is_zero(); }
inline bool operator==(const Element& a, const Element& b) { return equal(a, b); }

// (f * g)(d, x) = sum_q f(d - q, T^q x) g(q, x), with (T^q x)[i] = x[i + q].
inline Element convolve(const Element& f, const Element& g) {
  check_compatible(f, g);
  const auto& L = f.oracle();
  std::map<std::int64_t, std::vector<const Element::Key*>> g_by_deg;
  for (const auto& [k, c] : g.terms()) g_by_deg[k.first].push_back(&k);
  if (f.is_zero() || g.is_zero()) return Element(L, f.field());

  // common window of the result
  std::int64_t lo = 0, hi = -1;
  bool any = false;
  auto widen = [&](std::int64_t a, std::int64_t b) {
    if (!any) lo = a, hi = b, any = true;
    else lo = std::min(lo, a), hi = std::max(hi, b);
  };
  if (g.width()) widen(g.lo(), g.hi());
  if (f.width())
    for (const auto& [q, ks] : g_by_deg) widen(f.lo() + q, f.hi() + q);
  const std::size_t len = any ? static_cast<std::size_t>(hi - lo + 1) : 0;

  Element out(L, f.field());
  out.lo_ = len ? lo : 0;
  out.len_ = len;
  for (const auto& [q, gkeys] : g_by_deg) {
    // constrained positions (relative to lo): g's window and f's window moved by q
    std::vector<std::int64_t> gpos, fpos;
    for (std::size_t i = 0; i < g.width(); ++i) gpos.push_back(g.lo() - lo + static_cast<std::int64_t>(i));
    for (std::size_t i = 0; i < f.width(); ++i) fpos.push_back(f.lo() + q - lo + static_cast<std::int64_t>(i));
    std::vector<std::int64_t> pos = gpos;
    pos.insert(pos.end(), fpos.begin(), fpos.end());
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    std::vector<int> slot(len, -1);
    for (std::size_t i = 0; i < pos.size(); ++i) slot[static_cast<std::size_t>(pos[i])] = static_cast<int>(i);

    std::unordered_map<Word, std::vector<const Word*>> index;
    const bool covered = pos.size() == len;
    if (!covered) {
      for (const auto& x : detail::lang(L, len)) {
        Word key(pos.size(), '\0');
        for (std::size_t i = 0; i < pos.size(); ++i) key[i] = x[static_cast<std::size_t>(pos[i])];
        index[key].push_back(&x);
      }
    }
    for (const auto* gk : gkeys) {
      const Rational& gc = g.terms().at(*gk);
      Word base(pos.size(), '\0');
      std::vector<char> set(pos.size(), 0);
      for (std::size_t i = 0; i < gpos.size(); ++i) {
        auto s = static_cast<std::size_t>(slot[static_cast<std::size_t>(gpos[i])]);
        base[s] = gk->second[i];
        set[s] = 1;
      }
      for (const auto& [fk, fc] : f.terms()) {
        Word key = base;
        bool ok = true;
        for (std::size_t i = 0; i < fpos.size() && ok; ++i) {
          auto s = static_cast<std::size_t>(slot[static_cast<std::size_t>(fpos[i])]);
          if (set[s] && key[s] != fk.second[i]) ok = false;
          key[s] = fk.second[i];
        }
        if (!ok) continue;
        Rational c = fc * gc;
        std::int64_t d = fk.first + q;
        if (covered) {
          if (detail::in_lang(L, key)) out.add_raw(d, key, c);
        } else {
          auto it = index.find(key);
          if (it == index.end()) continue;
          for (const Word* x : it->second) out.add_raw(d, *x, c);
        }
      }
    }
  }
  return out.canonical();
}

inline Element convolve(std::initializer_list<Element> fs) {
  auto it = fs.begin();
  Element acc = *it;
  for (++it; it != fs.end(); ++it) acc = convolve(acc, *it);
  return acc;
}

inline Element canonicalize(const Element& f) { return f.canonical(); }

struct Generators {
  Element one, T, Tinv;
  std::vector<Element> proj;  // proj[s] = 1_{{0} x {x[0] = s}}
};

inline Generators make_generators(const LanguageOracle& L, Field F = {}) {
  Generators g{Element::shift(L, 0, F), Element::shift(L, 1, F), Element::shift(L, -1, F), {}};
  for (std::size_t s = 0; s < L.alphabet_size(); ++s)
    g.proj.push_back(Element::cylinder(L, 0, 0, Word(1, static_cast<char>(s)), 1, F));
  return g;
}

// ---------------------------------------------------------------------------
// Points of the groupoid

struct GroupoidPoint {
  std::int64_t degree = 0;
  std::int64_t lo = 0;  // coordinate of sample[0]
  Word sample;

  static GroupoidPoint make(const LanguageOracle& L, std::int64_t degree, std::int64_t lo, Word sample) {
    if (!detail::in_lang(L, sample)) throw std::invalid_argument("sample not in the language");
    return {degree, lo, std::move(sample)};
  }
  // T^q applied to the space coordinate
  GroupoidPoint shifted(std::int64_t q, std::int64_t new_degree) const { return {new_degree, lo - q, sample}; }
};

inline Rational evaluate_at(const Element& f, const GroupoidPoint& p) {
  if (f.width() == 0) return f.coefficient(p.degree, Word());
  if (f.lo() < p.lo || f.hi() > p.lo + static_cast<std::int64_t>(p.sample.size()) - 1)
    throw std::invalid_argument("insufficient sample");
  return f.coefficient(p.degree, p.sample.substr(static_cast<std::size_t>(f.lo() - p.lo), f.width()));
}

// ---------------------------------------------------------------------------
// Random elements for property checks

struct RandomShape {
  std::size_t max_terms = 3;
  std::int64_t degree_range = 2;  // degrees in [-r, r]
  std::int64_t window_range = 2;  // window start in [-r, r]
  std::size_t max_width = 3;
  std::optional<std::int64_t> degree;  // homogeneous of this degree
};

inline Element random_element(const LanguageOracle& L, std::mt19937_64& rng, const RandomShape& s = {}, Field F = {}) {
  auto pick = [&](std::int64_t a, std::int64_t b) { return std::uniform_int_distribution<std::int64_t>(a, b)(rng); };
  for (;;) {
    std::size_t width = static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(s.max_width)));
    std::int64_t lo = pick(-s.window_range, s.window_range);
    const auto& words = detail::lang(L, width);
    std::size_t terms = static_cast<std::size_t>(pick(1, static_cast<std::int64_t>(s.max_terms)));
    std::vector<std::tuple<std::int64_t, Word, Rational>> t;
    for (std::size_t i = 0; i < terms; ++i) {
      std::int64_t d = s.degree ? *s.degree : pick(-s.degree_range, s.degree_range);
      const Word& w = words[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(words.size()) - 1))];
      std::int64_t num = pick(-3, 3);
      if (num == 0) num = 1;
      t.emplace_back(d, w, Rational(num, pick(1, 2)));
    }
    auto e = Element::from_terms(L, lo, width, t, F);
    if (!e.is_zero()) return e;
  }
}

// A random nonzero element of W_n: window inside [-n, n], degrees in [-n, n].
inline Element random_w_element(const LanguageOracle& L, std::mt19937_64& rng, std::uint64_t n, std::size_t max_terms = 4,
                                Field F = {}) {
  const auto nn = static_cast<std::int64_t>(n);
  auto pick = [&](std::int64_t a, std::int64_t b) { return std::uniform_int_distribution<std::int64_t>(a, b)(rng); };
  for (;;) {
    auto width = static_cast<std::size_t>(pick(0, 2 * nn + 1));
    std::int64_t lo = width ? pick(-nn, nn - static_cast<std::int64_t>(width) + 1) : 0;
    const auto& words = detail::lang(L, width);
    std::vector<std::tuple<std::int64_t, Word, Rational>> t;
    auto terms = static_cast<std::size_t>(pick(1, static_cast<std::int64_t>(max_terms)));
    for (std::size_t i = 0; i < terms; ++i) {
      std::int64_t num = pick(-5, 5);
      t.emplace_back(pick(-nn, nn), words[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(words.size()) - 1))],
                     Rational(num == 0 ? 1 : num, pick(1, 3)));
    }
    auto e = Element::from_terms(L, lo, width, t, F);
    if (!e.is_zero()) return e;
  }
}

// ---------------------------------------------------------------------------
// Identities

struct IdentityReport {
  bool t_tinv = false, tinv_t = false;
  bool proj_sum = false;
  bool proj_shift = true;    // proj(s) * T^d = 1_{{d} x {x[d] = s}}
  bool conjugation = true;   // T^{-d} * proj(s) * T^d = 1_{{0} x {x[d] = s}}
  bool unit_laws = true;
  bool idempotent = true;    // canonicalize twice changes nothing
  std::size_t assoc_checked = 0, assoc_failed = 0;
  std::size_t degree_checked = 0, degree_failed = 0;
  std::optional<std::string> first_failure;
  bool pass() const {
    return t_tinv && tinv_t && proj_sum && proj_shift && conjugation && unit_laws && idempotent && assoc_failed == 0 &&
           degree_failed == 0;
  }
};

inline Element power_of_T(const LanguageOracle& L, std::int64_t d, Field F = {}) { return Element::shift(L, d, F); }

inline IdentityReport verify_identities(const LanguageOracle& L, std::int64_t d_max, std::size_t triples,
                                        std::size_t pairs, std::uint64_t seed, Field F = {}) {
  IdentityReport r;
  auto G = make_generators(L, F);
  auto note = [&](bool& flag, const std::string& what) {
    flag = false;
    if (!r.first_failure) r.first_failure = what;
  };
  r.t_tinv = convolve(G.T, G.Tinv) == G.one;
  r.tinv_t = convolve(G.Tinv, G.T) == G.one;
  Element sum(L, F);
  for (const auto& p : G.proj) sum = sum + p;
  r.proj_sum = sum == G.one;
  for (std::int64_t d = -d_max; d <= d_max; ++d) {
    // T^{*d} built by repeated convolution, not by the shortcut constructor
    Element Td = G.one;
    for (std::int64_t i = 0; i < std::abs(d); ++i) Td = convolve(Td, d > 0 ? G.T : G.Tinv);
    Element Tmd = G.one;
    for (std::int64_t i = 0; i < std::abs(d); ++i) Tmd = convolve(Tmd, d > 0 ? G.Tinv : G.T);
    for (std::size_t s = 0; s < G.proj.size(); ++s) {
      Word letter(1, static_cast<char>(s));
      if (!(convolve(G.proj[s], Td) == Element::cylinder(L, d, d, letter, 1, F)))
        note(r.proj_shift, "proj shift d=" + std::to_string(d));
      if (!(convolve({Tmd, G.proj[s], Td}) == Element::cylinder(L, 0, d, letter, 1, F)))
        note(r.conjugation, "conjugation d=" + std::to_string(d));
    }
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < triples; ++i) {
    auto a = random_element(L, rng, {}, F), b = random_element(L, rng, {}, F), c = random_element(L, rng, {}, F);
    ++r.assoc_checked;
    if (!(convolve(convolve(a, b), c) == convolve(a, convolve(b, c)))) {
      ++r.assoc_failed;
      if (!r.first_failure) r.first_failure = "associativity, triple " + std::to_string(i);
    }
    if (i < 100) {
      if (!(convolve(G.one, a) == a) || !(convolve(a, G.one) == a)) note(r.unit_laws, "unit law");
      auto once = canonicalize(a);
      auto twice = canonicalize(once);
      if (once.terms() != twice.terms() || once.lo() != twice.lo() || once.width() != twice.width())
        note(r.idempotent, "canonicalize not idempotent");
    }
  }
  for (std::size_t i = 0; i < pairs; ++i) {
    RandomShape sp, sq;
    sp.degree = std::uniform_int_distribution<std::int64_t>(-3, 3)(rng);
    sq.degree = std::uniform_int_distribution<std::int64_t>(-3, 3)(rng);
    auto a = random_element(L, rng, sp, F), b = random_element(L, rng, sq, F);
    ++r.degree_checked;
    auto prod = convolve(a, b);
    bool ok = true;
    for (auto d : prod.degrees()) ok = ok && d == *sp.degree + *sq.degree;
    if (!ok) {
      ++r.degree_failed;
      if (!r.first_failure) r.first_failure = "degree additivity, pair " + std::to_string(i);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// W_N dimensions: (2N+1) p(2N+1)

struct DimRow {
  std::uint64_t N = 0;
  std::uint64_t p = 0;  // p_w(2N+1)
  BigInt dim;
  std::optional<Rational> ratio;  // dim(N) / dim(N/2) at even N
};

inline BigInt w_basis_dimension(const LanguageOracle& L, std::uint64_t N) {
  return BigInt(2 * N + 1) * detail::lang(L, 2 * N + 1).size();
}

inline std::vector<DimRow> dims_table(const LanguageOracle& L, std::uint64_t N_max) {
  std::vector<DimRow> rows;
  for (std::uint64_t N = 0; N <= N_max; ++N) {
    DimRow r{N, detail::lang(L, 2 * N + 1).size(), w_basis_dimension(L, N), std::nullopt};
    if (N > 0 && N % 2 == 0) r.ratio = Rational(r.dim, rows[N / 2].dim);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Witness product: 1_{{-k} x T^k(W)} * f * 1_{{0} x W} = (sum_{i in A} c_i) 1_{{0} x W}

// A cylinder W = {x : x[lo, lo + |pattern|) = pattern} cut out by a master word.
struct MasterCylinder {
  std::size_t level = 0;  // master words of this level, alpha beta or beta alpha
  int orientation = 0;    // 0: alpha beta, 1: beta alpha
  std::uint64_t n = 0;    // W sits on [-n-p, n+q]
  std::uint64_t p = 0, q = 0;
  Word pattern;
  std::int64_t lo() const { return -static_cast<std::int64_t>(n + p); }
  std::int64_t hi() const { return static_cast<std::int64_t>(n + q); }
};

// Smallest l with 2n+1 <= Ntilde_{l+1}.
inline std::size_t witness_level(const subst::SubstWord& w, std::uint64_t n) { return w.level_for(2 * n + 1) - 1; }

struct WitnessReport {
  std::uint64_t n = 0;
  std::size_t l = 0;
  std::int64_t k = 0;
  Word xi;  // the point's window on [-n, n]
  MasterCylinder W;
  std::vector<std::size_t> A;  // indices into f's term list
  Rational alpha_sum;
  bool cond_i = false, cond_ii = false, cond_iii = false;
  std::optional<std::int64_t> cond_iii_failure;
  bool product_ok = false;
  std::int64_t left_index = 0, right_index = 0;  // W_N memberships of the outer factors
  bool pass() const { return cond_i && cond_ii && cond_iii && product_ok && alpha_sum != 0; }
};

inline WitnessReport witness_product(const Element& f, std::uint64_t n, const subst::SubstWord& w) {
  if (f.is_zero()) throw std::invalid_argument("f = 0");
  if (f.filtration_index() > static_cast<std::int64_t>(n)) throw std::invalid_argument("f not in W_n");
  const auto& L = f.oracle();
  WitnessReport r;
  r.n = n;
  r.l = witness_level(w, n);
  const auto& lev = w.level(r.l + 1);
  const std::int64_t nn = static_cast<std::int64_t>(n);

  // a point (k, xi) with f(k, xi) != 0: first nonzero term over the full window
  Element full = f.extended(-nn, 2 * n + 1);
  auto first = full.terms().begin();
  r.k = first->first.first;
  r.xi = first->first.second;

  // embed xi in alpha beta (or beta alpha)
  std::size_t pos = lev.ab.find(r.xi);
  r.W.orientation = 0;
  if (pos == Word::npos) {
    pos = lev.ba.find(r.xi);
    r.W.orientation = 1;
  }
  if (pos == Word::npos) throw std::logic_error("window of the point factors neither master word");
  r.W.level = r.l + 1;
  r.W.n = n;
  r.W.p = pos;
  r.W.q = 2 * lev.N - pos - (2 * n + 1);
  r.W.pattern = r.W.orientation == 0 ? lev.ab : lev.ba;

  // condition (i)/(ii) term by term on f's own representation
  std::size_t idx = 0;
  bool i_ok = true, ii_ok = true;
  for (const auto& [key, c] : f.terms()) {
    bool on_point = key.first == r.k &&
                    (f.width() == 0 || r.xi.compare(static_cast<std::size_t>(f.lo() + nn), f.width(), key.second) == 0);
    bool w_inside = f.width() == 0 ||
                    r.W.pattern.compare(static_cast<std::size_t>(f.lo() - r.W.lo()), f.width(), key.second) == 0;
    if (on_point) {
      r.A.push_back(idx);
      r.alpha_sum += c;
      i_ok = i_ok && w_inside;
    } else {
      ii_ok = ii_ok && (key.first != r.k || !w_inside);
    }
    ++idx;
  }
  r.alpha_sum = f.field().norm(r.alpha_sum);
  r.cond_i = i_ok;
  r.cond_ii = ii_ok;

  Element Wel = Element::cylinder(L, 0, r.W.lo(), r.W.pattern, 1, f.field());
  // (iii) W and T^d(W) are disjoint for 0 < |d| <= 2n; T^d(W) moves the window by -d
  r.cond_iii = true;
  for (std::int64_t d = -2 * nn; d <= 2 * nn; ++d) {
    if (d == 0) continue;
    Element TdW = Element::cylinder(L, 0, r.W.lo() - d, r.W.pattern, 1, f.field());
    if (!convolve(Wel, TdW).is_zero()) {
      r.cond_iii = false;
      r.cond_iii_failure = d;
      break;
    }
  }
  Element left = Element::cylinder(L, -r.k, r.W.lo() - r.k, r.W.pattern, 1, f.field());
  Element prod = convolve(convolve(left, f), Wel);
  r.product_ok = prod == scale(r.alpha_sum, Wel);
  r.left_index = left.filtration_index();
  r.right_index = Wel.filtration_index();
  return r;
}

// ---------------------------------------------------------------------------
// 1 = sum_u 1_{{0} x I_u} over u in L(7N_{l+1}), each term rebuilt as
// (left) * 1_{{0} x W} * (right) from an occurrence of the master word in u.

struct UnitDecompositionReport {
  std::size_t l = 0;
  std::uint64_t N = 0;  // N_{l+1}
  MasterCylinder W;
  std::size_t terms = 0;
  std::uint64_t term_cap = 0;  // 14 * 7N_{l+1}
  bool sum_is_one = false;
  bool chains_ok = true;
  bool split_lengths_ok = true;  // e_u + t_u = 5N_{l+1}
  std::optional<Word> failing_u;
  std::int64_t max_left_index = 0, max_right_index = 0;
  std::uint64_t left_bound = 0, right_bound = 0;  // 12N, 9N
  std::uint64_t measured_c = 0;                   // ceil(max index / N)
  bool pass() const {
    return sum_is_one && chains_ok && split_lengths_ok && terms <= term_cap &&
           max_left_index <= static_cast<std::int64_t>(left_bound) && max_right_index <= static_cast<std::int64_t>(right_bound);
  }
};

// Default placement: the widest centred window, n = (Ntilde - 1) / 2, with
// the rest of the master word split as evenly as possible.
inline MasterCylinder default_master_cylinder(const subst::SubstWord& w, std::size_t l) {
  const auto& lev = w.level(l + 1);
  MasterCylinder W;
  W.level = l + 1;
  W.n = (lev.Ntilde - 1) / 2;
  W.p = (2 * lev.N - 2 * W.n - 1) / 2;
  W.q = 2 * lev.N - 2 * W.n - 1 - W.p;
  W.pattern = lev.ab;
  return W;
}

inline UnitDecompositionReport verify_unit_decomposition(const subst::SubstLanguage& L, std::size_t l,
                                                         std::optional<MasterCylinder> given = {}, Field F = {}) {
  const auto& w = L.word();
  UnitDecompositionReport r;
  r.l = l;
  r.W = given ? *given : default_master_cylinder(w, l);
  const auto& lev = w.level(l + 1);
  if (r.W.level != l + 1 || 2 * r.W.n + 1 + r.W.p + r.W.q != 2 * lev.N) throw std::invalid_argument("cylinder does not match level");
  const std::uint64_t N = lev.N;
  r.N = N;
  r.term_cap = 14 * 7 * N;
  r.left_bound = 12 * N;
  r.right_bound = 9 * N;
  const auto& Ls = detail::lang(L, 7 * N);
  r.terms = Ls.size();

  std::vector<std::tuple<std::int64_t, Word, Rational>> parts;
  for (const auto& u : Ls) parts.emplace_back(0, u, 1);
  r.sum_is_one = Element::from_terms(L, 0, 7 * N, parts, F) == Element::shift(L, 0, F);

  const auto n = static_cast<std::int64_t>(r.W.n), p = static_cast<std::int64_t>(r.W.p), q = static_cast<std::int64_t>(r.W.q);
  const auto twoN = static_cast<std::int64_t>(2 * N);
  Element Wel = Element::cylinder(L, 0, r.W.lo(), r.W.pattern, 1, F);
  for (const auto& u : Ls) {
    auto e_pos = u.find(r.W.pattern);
    if (e_pos == Word::npos) {
      r.chains_ok = false;
      r.failing_u = u;
      throw std::logic_error("length-7N factor without the master word: " + subst::alphabet().render(u));
    }
    const auto e = static_cast<std::int64_t>(e_pos);
    Word eta = u.substr(0, e_pos), theta = u.substr(e_pos + 2 * N);
    if (eta.size() + theta.size() != 5 * N) r.split_lengths_ok = false;
    Element left = convolve(Element::cylinder(L, 0, 0, eta, 1, F), Element::shift(L, -(n + p + e), F));
    Element right = convolve({Element::shift(L, -(n + q + 1), F), Element::cylinder(L, 0, 0, theta, 1, F),
                              Element::shift(L, e + twoN, F)});
    Element chain = convolve(convolve(left, Wel), right);
    if (!(chain == Element::cylinder(L, 0, 0, u, 1, F))) {
      r.chains_ok = false;
      if (!r.failing_u) r.failing_u = u;
    }
    r.max_left_index = std::max(r.max_left_index, left.filtration_index());
    r.max_right_index = std::max(r.max_right_index, right.filtration_index());
  }
  auto worst = static_cast<std::uint64_t>(std::max(r.max_left_index, r.max_right_index));
  r.measured_c = (worst + N - 1) / N;
  return r;
}

// ---------------------------------------------------------------------------
// Finite-scale bracket for the return function

struct RetBracket {
  std::uint64_t n = 0;
  // lower side: Ret_V(8n) >= s from a window v of length 2(s-1)+n without u
  std::uint64_t rec = 0;
  std::uint64_t s_lower = 0;
  Word u, v;
  bool v_misses_u = false;
  std::size_t vanishing_samples = 0;
  bool vanishing_ok = true;
  // upper side
  bool upper_run = false;
  std::string upper_note;
  BigInt K;             // smallest integer with 2^gamma 4 (2n+1)^gamma <= K n^gamma
  BigInt ceil_K_n_gamma;
  std::uint64_t c = 0;  // measured in the unit decomposition
  std::int64_t left_W = 0, right_W = 0;  // W_N indices actually used
  BigInt left_V, right_V;                // 8 * W index (W_N lies in V^{8N})
  BigInt left_bound, right_bound;        // 8(c+3)ceil(Kn^gamma), 8(c+2)ceil(Kn^gamma)
  std::optional<WitnessReport> witness;
  std::optional<UnitDecompositionReport> unit;
  bool pass() const {
    bool lower = v_misses_u && vanishing_ok;
    if (!upper_run) return lower;
    return lower && witness->pass() && unit->pass() && left_V <= left_bound && right_V <= right_bound;
  }
};

inline RetBracket ret_bracket_report(const subst::SubstLanguage& L, std::uint64_t n, std::uint64_t seed = 1,
                                     std::size_t vanishing_samples = 20, std::uint64_t max_bytes = 2ULL << 30) {
  const auto& w = L.word();
  if (!w.gamma()) throw std::invalid_argument("gamma required");
  RetBracket r;
  r.n = n;
  auto rec = subst::recurrence_function(w, n);
  r.rec = rec.rec;
  r.s_lower = (rec.rec - n + 1) / 2;  // ceil((Rec - n)/2)
  std::mt19937_64 rng(seed);
  if (r.s_lower > 0 && rec.certificate) {
    const auto& cert = *rec.certificate;
    const auto& H = w.level(rec.host_level);
    const Word& host = cert.host == 0 ? H.ab : H.ba;
    const std::uint64_t sp = r.s_lower - 1;
    r.u = cert.missing;
    r.v = host.substr(cert.window, 2 * sp + n);
    r.v_misses_u = r.v.find(r.u) == Word::npos;
    // each type-(*) product L * a * R vanishes at (0, w') with w'[-s', s'+n-1] = v
    const std::int64_t s = static_cast<std::int64_t>(sp);
    const std::uint64_t margin = 2 * sp + n + 1;
    const Word& deep = w.level(w.depth()).ab;
    std::size_t at = deep.find(r.v, margin);
    if (at == Word::npos || at + r.v.size() + margin > deep.size()) {
      r.vanishing_ok = false;
    } else {
      Word sample = deep.substr(at - margin, r.v.size() + 2 * margin);
      GroupoidPoint pt{0, -s - static_cast<std::int64_t>(margin), sample};
      Element a = Element::cylinder(L, 0, 0, r.u);
      const auto& Z = detail::lang(L, 2 * sp + 1);
      auto pick = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
      for (std::size_t i = 0; i < vanishing_samples; ++i) {
        Element left = Element::cylinder(L, pick(-s, s), -s, Z[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(Z.size()) - 1))]);
        Element right = Element::cylinder(L, pick(-s, s), -s, Z[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(Z.size()) - 1))]);
        ++r.vanishing_samples;
        if (evaluate_at(convolve({left, a, right}), pt) != 0) r.vanishing_ok = false;
      }
    }
  }

  // upper side: witness product on proj(a) in W_n, then the unit decomposition on its W
  auto g = RationalExponent::from(*w.gamma());
  const auto num = static_cast<std::uint64_t>(g.num);
  const auto den = static_cast<unsigned>(g.den);
  r.K = iroot_ceil(ceil_div(ipow(2, num) * ipow(4, den) * ipow(2 * n + 1, num), ipow(n, num)), den);
  r.ceil_K_n_gamma = iroot_ceil(ipow(r.K, den) * ipow(n, num), den);
  std::size_t l = 0;
  try {
    l = witness_level(w, n);
  } catch (const subst::DepthError& e) {
    r.upper_note = "skipped: " + std::string(e.what());
    return r;
  }
  const std::uint64_t N = w.level(l + 1).N;
  // listing L(7N) scans every window of both master words of its host level
  BigInt scan = 0;
  try {
    scan = BigInt(4 * w.level(w.host_level_for(7 * N)).N) * (7 * N);
  } catch (const subst::DepthError&) {
    scan = -1;
  }
  if (7 * N > L.max_length() || scan < 0 || scan > max_bytes || BigInt(14 * 7 * N) * (7 * N) > max_bytes) {
    r.upper_note = "skipped: L(" + std::to_string(7 * N) + ") exceeds the budget";
    return r;
  }
  r.upper_run = true;
  auto G = make_generators(L);
  r.witness = witness_product(G.proj[0], n, w);
  r.unit = verify_unit_decomposition(L, l, r.witness->W);
  r.c = r.unit->measured_c;
  r.left_W = r.unit->max_left_index + r.witness->left_index;
  r.right_W = r.unit->max_right_index + r.witness->right_index;
  r.left_V = 8 * BigInt(r.left_W);
  r.right_V = 8 * BigInt(r.right_W);
  r.left_bound = 8 * (r.c + 3) * r.ceil_K_n_gamma;
  r.right_bound = 8 * (r.c + 2) * r.ceil_K_n_gamma;
  return r;
}

}  // namespace wordlab::algebra
