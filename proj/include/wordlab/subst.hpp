// The two-letter word w = lim alpha_k with alpha_{k+1} = (alpha_k^2 beta_k)^{n_{k+1}},
// beta_{k+1} = (beta_k^2 alpha_k)^{n_{k+1}}: levels, factor language through the
// master words alpha_k beta_k / beta_k alpha_k, and exact recurrence values.
#pragma once

#include "wordlab/language.hpp"
#include "wordlab/numeric.hpp"
#include "wordlab/words.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wordlab::subst {

inline const Alphabet& alphabet() {
  static const Alphabet ab("ab");
  return ab;
}

class DepthError : public std::runtime_error {
 public:
  explicit DepthError(std::size_t level)
      : std::runtime_error("depth: level " + std::to_string(level) + " required"), level_(level) {}
  std::size_t required_level() const { return level_; }

 private:
  std::size_t level_;
};

struct SubstParams {
  std::optional<Rational> gamma;           // exact, >= 1
  std::vector<std::uint64_t> explicit_n;   // n_1, n_2, ... used when gamma is absent
  std::uint64_t max_bytes = 2ULL << 30;
};

// Decimal or a/b. Anything else (sqrt, exponents, names) is refused because
// the ceilings below are only certified for exact rationals.
inline Rational parse_gamma(const std::string& s) {
  auto dot = s.find('.');
  if (dot != std::string::npos && s.find('/') == std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("precision");
    return Rational(BigInt(digits), ipow(10, s.size() - dot - 1));
  }
  for (char c : s)
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/')) throw std::invalid_argument("precision");
  return parse_rational(s);
}

struct NSequence {
  std::vector<BigInt> n;  // n[j-1] = n_j
  std::vector<BigInt> N;  // N[j] = N_j, N[0] = 1
  // Growth condition N_j^gamma <= N_{j+1} <= 2 N_j^gamma, per j = 1..len-1.
  std::vector<bool> growth_ok;
  std::optional<std::size_t> j1;  // smallest j from which every computed j satisfies it
};

inline BigInt next_n(const BigInt& Nj, const Rational& gamma) {
  auto e = RationalExponent::from(gamma - 1);
  // ceil(N^{e}/3) = ceil(ceil(N^e)/3)
  BigInt r = ceil_pow(Nj, e);
  BigInt m = ceil_div(r, 3);
  return m < 2 ? BigInt(2) : m;
}

inline NSequence choose_n_sequence(const SubstParams& p, std::size_t count) {
  NSequence s;
  s.N.push_back(1);
  if (p.gamma) {
    if (*p.gamma < 1) throw std::invalid_argument("gamma must be at least 1");
    for (std::size_t j = 1; j <= count; ++j) {
      BigInt nj = j == 1 ? BigInt(2) : next_n(s.N.back(), *p.gamma);
      s.n.push_back(nj);
      s.N.push_back(s.N.back() * 3 * nj);
    }
    auto g = RationalExponent::from(*p.gamma);
    for (std::size_t j = 1; j + 1 < s.N.size(); ++j) {
      // N_j^a <= N_{j+1}^b <= 2^b N_j^a
      BigInt lhs = ipow(s.N[j], static_cast<std::uint64_t>(g.num));
      BigInt mid = ipow(s.N[j + 1], static_cast<std::uint64_t>(g.den));
      s.growth_ok.push_back(lhs <= mid && mid <= ipow(2, static_cast<std::uint64_t>(g.den)) * lhs);
    }
    std::optional<std::size_t> last_bad;
    for (std::size_t j = 0; j < s.growth_ok.size(); ++j)
      if (!s.growth_ok[j]) last_bad = j + 1;
    if (!s.growth_ok.empty() && last_bad != s.growth_ok.size()) s.j1 = last_bad ? *last_bad + 1 : 1;
  } else {
    if (p.explicit_n.size() < count) throw std::invalid_argument("explicit n list too short");
    for (std::size_t j = 1; j <= count; ++j) {
      if (p.explicit_n[j - 1] < 2) throw std::invalid_argument("n_j must be at least 2");
      s.n.emplace_back(p.explicit_n[j - 1]);
      s.N.push_back(s.N.back() * 3 * s.n.back());
    }
  }
  return s;
}

struct SubstLevel {
  std::size_t k = 0;
  std::uint64_t N = 1;
  std::uint64_t Ntilde = 0;  // N_k - 3N_{k-1}; unused at k = 0
  Word alpha, beta;
  Word ab, ba;  // master words
};

class SubstWord {
 public:
  // Levels 0..K. K = 0 picks the deepest level whose storage fits max_bytes.
  SubstWord(const SubstParams& p, std::size_t K = 0) : params_(p) {
    std::size_t want = K;
    if (want == 0) {
      std::size_t avail = p.gamma ? 64 : p.explicit_n.size();
      BigInt bytes = 4;
      for (std::size_t k = 1; k <= avail; ++k) {
        bytes += 4 * choose_n_sequence(p, k).N[k];
        if (bytes > p.max_bytes) break;
        want = k;
      }
      if (want == 0) throw BudgetError("budget");
    }
    seq_ = choose_n_sequence(p, want);
    BigInt bytes = 0;
    for (std::size_t k = 0; k <= want; ++k) bytes += 4 * seq_.N[k];
    if (bytes > p.max_bytes) throw BudgetError("budget");

    SubstLevel l0;
    l0.alpha = Word(1, 0);
    l0.beta = Word(1, 1);
    l0.ab = l0.alpha + l0.beta;
    l0.ba = l0.beta + l0.alpha;
    levels_.push_back(std::move(l0));
    for (std::size_t k = 1; k <= want; ++k) {
      const auto& prev = levels_.back();
      SubstLevel L;
      L.k = k;
      L.N = seq_.N[k].convert_to<std::uint64_t>();
      L.Ntilde = L.N - 3 * prev.N;
      auto reps = seq_.n[k - 1].convert_to<std::uint64_t>();
      Word ua = prev.alpha + prev.alpha + prev.beta;
      Word ub = prev.beta + prev.beta + prev.alpha;
      L.alpha.reserve(L.N);
      L.beta.reserve(L.N);
      for (std::uint64_t i = 0; i < reps; ++i) {
        L.alpha += ua;
        L.beta += ub;
      }
      L.ab = L.alpha + L.beta;
      L.ba = L.beta + L.alpha;
      levels_.push_back(std::move(L));
    }
  }

  std::size_t depth() const { return levels_.size() - 1; }
  const SubstLevel& level(std::size_t k) const {
    if (k > depth()) throw DepthError(k);
    return levels_[k];
  }
  const NSequence& sequence() const { return seq_; }
  const SubstParams& params() const { return params_; }
  std::optional<Rational> gamma() const { return params_.gamma; }

  // Smallest k >= 1 with n <= Ntilde_k among built levels, else DepthError.
  std::size_t level_for(std::uint64_t n) const {
    for (std::size_t k = 1; k <= depth(); ++k)
      if (n <= levels_[k].Ntilde) return k;
    throw DepthError(depth() + 1);
  }

  // Smallest m with len <= Ntilde_m: windows of that length are exactly the
  // windows of the level-m master words.
  std::size_t host_level_for(std::uint64_t len) const {
    for (std::size_t m = 1; m <= depth(); ++m)
      if (len <= levels_[m].Ntilde) return m;
    // name the level that would be needed
    std::size_t m = depth() + 1;
    if (params_.gamma) {
      for (; m < depth() + 8; ++m) {
        auto more = choose_n_sequence(params_, m);
        if (BigInt(len) <= more.N[m] - 3 * more.N[m - 1]) break;
      }
    }
    throw DepthError(m);
  }

  std::vector<Word> masters(std::size_t m) const { return {level(m).ab, level(m).ba}; }

 private:
  SubstParams params_;
  NSequence seq_;
  std::vector<SubstLevel> levels_;
};

// ---------------------------------------------------------------------------

inline FactorSet subst_factor_set(const SubstWord& w, std::uint64_t n, FactorOptions opt = {}) {
  if (n == 0) return factor_set(std::vector<Word>{}, 0);
  auto hosts = w.masters(w.level_for(n));
  return count_factors(hosts, n, opt);
}

inline std::uint64_t complexity(const SubstWord& w, std::uint64_t n) {
  FactorOptions opt;
  return subst_factor_set(w, n, opt).count;
}

// p(n) for n in [lo, hi], each at its minimal level.
inline std::vector<std::uint64_t> complexity_table(const SubstWord& w, std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = lo; n <= hi; ++n) out.push_back(complexity(w, n));
  return out;
}

class SubstLanguage : public LanguageOracle {
 public:
  explicit SubstLanguage(const SubstWord& w) : w_(w) {}
  std::size_t alphabet_size() const override { return 2; }
  std::size_t max_length() const override { return w_.level(w_.depth()).Ntilde; }
  const SubstWord& word() const { return w_; }

 protected:
  std::vector<Word> compute_factors(std::size_t n) const override {
    if (n == 0) return {Word()};
    return factor_set(w_.masters(w_.level_for(n)), n).members;
  }

 private:
  const SubstWord& w_;
};

// ---------------------------------------------------------------------------

struct Densities {
  Rational a_alpha, b_alpha, a_beta, b_beta;
  bool operator==(const Densities&) const = default;
};

inline Densities densities(const SubstWord& w, std::size_t k) {
  const auto& L = w.level(k);
  Word a(1, 0), b(1, 1);
  return {frequency(a, L.alpha), frequency(b, L.alpha), frequency(a, L.beta), frequency(b, L.beta)};
}

// 1/2 (1 +- 3^{-k})
inline Densities density_closed_form(std::size_t k) {
  Rational t(BigInt(1), ipow(3, k));
  Rational hi = (1 + t) / 2, lo = (1 - t) / 2;
  return {hi, lo, lo, hi};
}

// ---------------------------------------------------------------------------

inline std::vector<std::uint64_t> occurrences(std::string_view pat, std::string_view host) {
  auto pi = prefix_function(pat);
  std::vector<std::uint64_t> out;
  std::size_t q = 0;
  for (std::size_t i = 0; i < host.size(); ++i) {
    while (q > 0 && (q == pat.size() || pat[q] != host[i])) q = pi[q - 1];
    if (pat[q] == host[i]) ++q;
    if (q == pat.size()) out.push_back(i + 1 - pat.size());
  }
  return out;
}

struct CubePositions {
  std::size_t k = 0;
  std::vector<std::uint64_t> beta_in_ab;   // 1-indexed starts of beta_k^3 in alpha_{k+1} beta_{k+1}
  std::vector<std::uint64_t> alpha_in_ba;  // mirrored: alpha_k^3 in beta_{k+1} alpha_{k+1}
  std::uint64_t lo = 0, hi = 0;            // N_{k+1} - 3N_k + 2 .. N_{k+1}
  bool in_window() const {
    auto ok = [&](const std::vector<std::uint64_t>& v) {
      for (auto i : v)
        if (i < lo || i > hi) return false;
      return true;
    };
    return !beta_in_ab.empty() && !alpha_in_ba.empty() && ok(beta_in_ab) && ok(alpha_in_ba);
  }
};

inline CubePositions beta_cubed_positions(const SubstWord& w, std::size_t k) {
  const auto& L = w.level(k);
  const auto& U = w.level(k + 1);
  CubePositions r;
  r.k = k;
  r.lo = U.N - 3 * L.N + 2;
  r.hi = U.N;
  for (auto i : occurrences(L.beta + L.beta + L.beta, U.ab)) r.beta_in_ab.push_back(i + 1);
  for (auto i : occurrences(L.alpha + L.alpha + L.alpha, U.ba)) r.alpha_in_ba.push_back(i + 1);
  return r;
}

// ---------------------------------------------------------------------------

struct RecCertificate {
  std::uint64_t length = 0;  // Rec - 1
  int host = 0;              // 0: alpha beta, 1: beta alpha
  std::uint64_t window = 0;  // 0-based start in that master word
  Word missing;
};

struct RecResult {
  std::uint64_t n = 0;
  std::uint64_t rec = 0;
  std::size_t factor_level = 0;  // k(n)
  std::size_t host_level = 0;    // m
  std::uint64_t search_hi = 0;
  std::optional<RecCertificate> certificate;
  std::optional<bool> linear_agrees;
};

inline std::optional<BigInt> rec_upper_bound(const SubstWord& w, std::uint64_t n) {
  if (!w.gamma()) return std::nullopt;
  auto g = RationalExponent::from(*w.gamma());
  auto a = static_cast<std::uint64_t>(g.num);
  auto b = static_cast<unsigned>(g.den);
  // floor(14 * 2^gamma * n^gamma)
  return iroot_floor(ipow(14, b) * ipow(2, a) * ipow(n, a), b);
}

inline std::optional<BigInt> rec_lower_bound(const SubstWord& w, std::uint64_t n) {
  if (!w.gamma()) return std::nullopt;
  auto g = RationalExponent::from(*w.gamma());
  auto a = static_cast<std::uint64_t>(g.num);
  // ceil(3^{-gamma} n^gamma)
  return iroot_ceil(ceil_div(ipow(n, a), ipow(3, a)), static_cast<unsigned>(g.den));
}

class RecSolver {
 public:
  RecSolver(const SubstWord& w, std::uint64_t n) : w_(w), n_(n) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    k_ = w.level_for(n);
    hi_ = 7 * w.level(k_).N;
    m_ = w.host_level_for(hi_);
    pats_ = subst_factor_set(w, n).members;
    const auto& H = w.level(m_);
    ab_ = std::make_unique<ContainmentScanner>(H.ab, pats_);
    ba_ = std::make_unique<ContainmentScanner>(H.ba, pats_);
  }

  // Every window of length K contains every factor of length n.
  bool holds(std::uint64_t K, unsigned workers = 1, RecCertificate* why = nullptr) const {
    auto r = ab_->scan(K, workers);
    int host = 0;
    if (r.all_contained) {
      r = ba_->scan(K, workers);
      host = 1;
    }
    if (!r.all_contained && why) {
      const auto& sc = host == 0 ? *ab_ : *ba_;
      *why = {K, host, *r.failing_window, sc.patterns()[*r.missing_pattern]};
    }
    return r.all_contained;
  }

  RecResult solve(unsigned workers = 1, bool linear_check = false) const {
    RecResult res;
    res.n = n_;
    res.factor_level = k_;
    res.host_level = m_;
    res.search_hi = hi_;
    if (!holds(hi_, workers)) throw std::runtime_error("recurrence exceeds 7N_k at n=" + std::to_string(n_));
    std::uint64_t lo = n_, hi = hi_;  // holds(hi); answer in [lo, hi]
    while (lo < hi) {
      std::uint64_t mid = lo + (hi - lo) / 2;
      if (holds(mid, workers))
        hi = mid;
      else
        lo = mid + 1;
    }
    res.rec = lo;
    if (lo > n_) {
      RecCertificate c;
      if (holds(lo - 1, workers, &c)) throw std::logic_error("containment not monotone");
      res.certificate = c;
    }
    if (linear_check) {
      std::uint64_t K = n_;
      while (!holds(K, workers)) ++K;
      res.linear_agrees = K == res.rec;
    }
    return res;
  }

  std::size_t factor_level() const { return k_; }
  std::size_t host_level() const { return m_; }
  const std::vector<Word>& patterns() const { return ab_->patterns(); }

 private:
  const SubstWord& w_;
  std::uint64_t n_;
  std::size_t k_ = 0, m_ = 0;
  std::uint64_t hi_ = 0;
  std::vector<Word> pats_;
  std::unique_ptr<ContainmentScanner> ab_, ba_;
};

inline RecResult recurrence_function(const SubstWord& w, std::uint64_t n, unsigned workers = 1,
                                     bool linear_check = false) {
  return RecSolver(w, n).solve(workers, linear_check);
}

// ---------------------------------------------------------------------------

struct SubstPropertyReport {
  struct EverySeven {
    std::size_t k = 0, host_level = 0;
    std::uint64_t windows = 0;
    bool ok = false;
  };
  struct Aperiodic {
    std::size_t k = 0;
    std::optional<std::size_t> ab_period, ba_period;
    bool ok() const { return !ab_period && !ba_period; }
  };
  struct Exponent {
    std::uint64_t n = 0, rec = 0;
    double exponent = 0;  // log Rec / log n
    bool floor_applies = false;  // n = 3N_k, where Rec(n) >= N_{k+1} forces the floor
    bool above_floor = true;
  };
  std::vector<EverySeven> every_seven;
  std::vector<Aperiodic> aperiodic;
  std::uint64_t p_lo = 0, p_hi = 0;
  std::vector<std::uint64_t> p;
  bool p_upper_ok = true, p_lower_ok = true;
  std::optional<std::uint64_t> p_first_violation;
  std::vector<Exponent> exponents;
  double max_exponent = 0;
  std::string exponent_label;

  bool pass() const {
    for (const auto& e : every_seven)
      if (!e.ok) return false;
    for (const auto& a : aperiodic)
      if (!a.ok()) return false;
    for (const auto& e : exponents)
      if (e.floor_applies && !e.above_floor) return false;
    return p_upper_ok && p_lower_ok;
  }
};

// exponent_samples: n values for the Rec diagnostic; empty picks N-tilde_k and
// 3N_k for levels where the host depth allows it.
inline SubstPropertyReport verify_substitution_properties(const SubstWord& w, std::size_t k_max,
                                              std::vector<std::uint64_t> exponent_samples = {},
                                              unsigned workers = 1) {
  SubstPropertyReport r;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const auto& L = w.level(k);
    SubstPropertyReport::EverySeven e;
    e.k = k;
    e.host_level = w.host_level_for(7 * L.N);
    std::vector<Word> pats{L.ab, L.ba};
    e.ok = true;
    for (const auto& host : w.masters(e.host_level)) {
      e.windows += host.size() - 7 * L.N + 1;
      e.ok = e.ok && sliding_containment_scan(host, 7 * L.N, pats, workers).all_contained;
    }
    r.every_seven.push_back(e);

    r.aperiodic.push_back({k, min_period(L.ab, L.Ntilde), min_period(L.ba, L.Ntilde)});
  }

  r.p_lo = w.level(1).Ntilde;
  r.p_hi = w.level(k_max).Ntilde;
  r.p = complexity_table(w, r.p_lo, r.p_hi);
  for (std::uint64_t n = r.p_lo; n <= r.p_hi; ++n) {
    auto pn = r.p[n - r.p_lo];
    bool up = pn <= 14 * n, low = pn >= n + 1;
    r.p_upper_ok = r.p_upper_ok && up;
    r.p_lower_ok = r.p_lower_ok && low;
    if ((!up || !low) && !r.p_first_violation) r.p_first_violation = n;
  }

  if (exponent_samples.empty()) {
    for (std::size_t k = 1; k <= k_max; ++k)
      for (std::uint64_t n : {w.level(k).Ntilde, 3 * w.level(k).N}) {
        try {
          w.host_level_for(7 * w.level(w.level_for(n)).N);
          exponent_samples.push_back(n);
        } catch (const DepthError&) {
        }
      }
    std::sort(exponent_samples.begin(), exponent_samples.end());
    exponent_samples.erase(std::unique(exponent_samples.begin(), exponent_samples.end()), exponent_samples.end());
  }
  for (auto n : exponent_samples) {
    if (n < 2) continue;
    auto rec = recurrence_function(w, n, workers).rec;
    SubstPropertyReport::Exponent e;
    e.n = n;
    e.rec = rec;
    e.exponent = std::log(static_cast<double>(rec)) / std::log(static_cast<double>(n));
    for (std::size_t k = 0; k <= w.depth(); ++k)
      if (n == 3 * w.level(k).N) e.floor_applies = true;
    if (auto lb = rec_lower_bound(w, n)) e.above_floor = BigInt(rec) >= *lb;
    r.max_exponent = std::max(r.max_exponent, e.exponent);
    r.exponents.push_back(e);
  }
  if (!w.gamma())
    r.exponent_label = "no gamma";
  else if (*w.gamma() == 1)
    r.exponent_label = "uninformative at gamma=1";
  else
    r.exponent_label = "diagnostic";
  return r;
}

}  // namespace wordlab::subst
