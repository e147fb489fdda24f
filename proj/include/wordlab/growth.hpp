// Tabulated integer growth functions and the superlinear-complexity
// candidate f built from a superlinear g.
#pragma once

#include "wordlab/numeric.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wordlab::growth {

class HorizonError : public std::runtime_error {
 public:
  HorizonError() : std::runtime_error("horizon") {}
};

// f(1..N). Index 0 of the storage holds f(1).
class GrowthTable {
 public:
  GrowthTable() = default;
  explicit GrowthTable(std::vector<BigInt> values) : v_(std::move(values)) {}

  std::size_t size() const { return v_.size(); }  // N_max
  const BigInt& operator()(std::size_t n) const { return v_.at(n - 1); }
  BigInt& operator()(std::size_t n) { return v_.at(n - 1); }
  void push_back(BigInt x) { v_.push_back(std::move(x)); }
  const std::vector<BigInt>& values() const { return v_; }

  bool positive() const {
    for (const auto& x : v_)
      if (x <= 0) return false;
    return true;
  }

 private:
  std::vector<BigInt> v_;
};

template <class F>
GrowthTable tabulate(std::size_t n_max, F&& fn) {
  std::vector<BigInt> v;
  v.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) v.emplace_back(fn(n));
  return GrowthTable(std::move(v));
}

inline std::uint64_t bit_length(std::uint64_t n) {
  std::uint64_t b = 0;
  while (n) {
    ++b;
    n >>= 1U;
  }
  return b;
}

// The closed-form pickers. "nlogn" is n * bitlength(n) so that g(1) = 1.
inline GrowthTable pick_g(const std::string& kind, std::size_t n_max) {
  if (kind == "id") return tabulate(n_max, [](std::size_t n) { return BigInt(n); });
  if (kind == "n2" || kind == "square") return tabulate(n_max, [](std::size_t n) { return BigInt(n) * n; });
  if (kind == "nlogn") return tabulate(n_max, [](std::size_t n) { return BigInt(n) * bit_length(n); });
  throw std::invalid_argument("unknown g: " + kind);
}

// One value per line, or "n,value" lines; values must start at n = 1.
inline GrowthTable read_table(std::istream& in) {
  std::vector<BigInt> v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    std::string val = comma == std::string::npos ? line : line.substr(comma + 1);
    if (comma != std::string::npos) {
      auto n = std::stoull(line.substr(0, comma));
      if (n != v.size() + 1) throw std::invalid_argument("table must be contiguous from n=1");
    }
    v.emplace_back(val);
  }
  if (v.empty()) throw std::invalid_argument("empty table");
  return GrowthTable(std::move(v));
}

inline GrowthTable read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_table(in);
}

// ---------------------------------------------------------------------------

struct Derivative {
  GrowthTable values;            // f'(1..N)
  bool first_is_convention = true;  // f'(1) set to 0, f(0) is not tabulated
};

inline Derivative discrete_derivative(const GrowthTable& f) {
  std::vector<BigInt> d;
  d.reserve(f.size());
  for (std::size_t n = 1; n <= f.size(); ++n) d.push_back(n == 1 ? BigInt(0) : f(n) - f(n - 1));
  return {GrowthTable(std::move(d)), true};
}

// Inverse of discrete_derivative given f(1).
inline GrowthTable cumulative_sum(const Derivative& d, const BigInt& f1) {
  std::vector<BigInt> v;
  BigInt acc = f1;
  for (std::size_t n = 1; n <= d.values.size(); ++n) {
    if (n > 1) acc += d.values(n);
    v.push_back(acc);
  }
  return GrowthTable(std::move(v));
}

struct GrowthReport {
  bool nondecreasing = true;
  std::optional<std::size_t> strictly_increasing_from;  // smallest n0 with f(n) < f(n+1) for all n >= n0
  bool submultiplicative = true;
  std::uint64_t pairs_tested = 0;
  bool exhaustive_pairs = false;
  std::vector<std::pair<std::size_t, std::size_t>> violations;  // (m, n) with f(m+n) > f(m) f(n)
  std::vector<Rational> doubling_ratios;                        // f(2n)/f(n), n = 1..N/2
};

// Submultiplicativity is checked on every pair when N <= exhaustive_limit,
// otherwise on all pairs with m, n <= exhaustive_limit / 2 plus dyadic pairs
// and sampled pairs drawn from the seed.
inline GrowthReport check_growth_properties(const GrowthTable& f, std::size_t exhaustive_limit = 2000,
                                            std::uint64_t seed = 1, std::size_t samples = 100000) {
  GrowthReport r;
  const std::size_t N = f.size();
  std::optional<std::size_t> last_flat;
  for (std::size_t n = 1; n < N; ++n) {
    if (f(n + 1) < f(n)) r.nondecreasing = false;
    if (!(f(n) < f(n + 1))) last_flat = n;
  }
  if (N >= 1) r.strictly_increasing_from = last_flat ? std::optional<std::size_t>(*last_flat + 1) : 1;
  if (r.strictly_increasing_from && *r.strictly_increasing_from >= N && N > 1) r.strictly_increasing_from.reset();

  auto test = [&](std::size_t m, std::size_t n) {
    if (m + n > N) return;
    ++r.pairs_tested;
    if (f(m + n) > f(m) * f(n)) {
      r.submultiplicative = false;
      if (r.violations.size() < 1000) r.violations.emplace_back(m, n);
    }
  };
  if (N <= exhaustive_limit) {
    r.exhaustive_pairs = true;
    for (std::size_t m = 1; m <= N; ++m)
      for (std::size_t n = m; m + n <= N; ++n) test(m, n);
  } else {
    std::size_t half = exhaustive_limit / 2;
    for (std::size_t m = 1; m <= half; ++m)
      for (std::size_t n = m; n <= half; ++n) test(m, n);
    for (std::size_t m = 1; 2 * m <= N; m *= 2)
      for (std::size_t n = m; m + n <= N; n *= 2) test(m, n);
    for (std::size_t n = 1; 2 * n <= N; ++n) test(n, n);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(1, N - 1);
    for (std::size_t i = 0; i < samples; ++i) {
      std::size_t m = pick(rng);
      std::uniform_int_distribution<std::size_t> rest(1, N - m);
      test(m, rest(rng));
    }
  }
  for (std::size_t n = 1; 2 * n <= N; ++n) r.doubling_ratios.push_back(Rational(f(2 * n), f(n)));
  return r;
}

// ---------------------------------------------------------------------------

struct SuperlinearWitness {
  GrowthTable g;
  std::vector<std::uint64_t> d;      // d[0] is d_2, d[1] is d_3, ...
  GrowthTable f;
  std::vector<std::uint32_t> omega;  // omega[n-1] = omega(n)
  std::size_t n0 = 1;                // constraint holds for all tabulated n >= n0

  std::size_t index_of(std::size_t j) const { return j + 2; }  // position in d -> marker index i (d starts at i = 2)
};

namespace detail {

// ceil(g(n) / (2(n+1))); i! < g(n)/(2(n+1)) iff i! < this value.
inline BigInt slack(const GrowthTable& g, std::size_t n) { return ceil_div(g(n), BigInt(2 * (n + 1))); }

}  // namespace detail

inline std::vector<std::uint32_t> omega_table(const std::vector<std::uint64_t>& d, std::size_t n_max) {
  std::vector<std::uint32_t> om(n_max, 0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::uint32_t w = 0;
    for (std::size_t j = 0; j < d.size(); ++j)
      if (2 * d[j] <= n) w = static_cast<std::uint32_t>(j + 2);
    om[n - 1] = w;
  }
  return om;
}

inline SuperlinearWitness build_superlinear_witness(const GrowthTable& g) {
  const std::size_t N = g.size();
  if (N < 4 || !g.positive()) throw HorizonError();
  // suffix minima of the slack so that "for all n >= 2d" is one lookup
  std::vector<BigInt> suffix_min(N + 2);
  for (std::size_t n = N; n >= 1; --n) {
    BigInt s = detail::slack(g, n);
    suffix_min[n] = (n == N || s < suffix_min[n + 1]) ? s : suffix_min[n + 1];
  }

  SuperlinearWitness w;
  w.g = g;
  std::uint64_t i = 2;
  std::uint64_t cand = 2;  // d_2 > 1
  while (2 * cand <= N) {
    if (factorial(i) < suffix_min[2 * cand]) {
      w.d.push_back(cand);
      ++i;
      cand = 1;
      while (cand <= 4 * w.d.back()) cand *= 2;
    } else {
      cand *= 2;
    }
  }
  if (w.d.empty()) throw HorizonError();

  w.omega = omega_table(w.d, N);
  std::optional<std::size_t> last_bad;
  for (std::size_t n = 1; n <= N; ++n)
    if (!(factorial(w.omega[n - 1]) < detail::slack(g, n))) last_bad = n;
  if (last_bad && *last_bad == N) throw HorizonError();
  w.n0 = last_bad ? *last_bad + 1 : 1;

  std::vector<BigInt> f(N);
  f[0] = 2;
  std::size_t next = 0;
  for (std::size_t n = 2; n <= N; ++n) {
    if (next < w.d.size() && n == 2 * w.d[next]) {
      f[n - 1] = BigInt(next + 2) * f[w.d[next] - 1];
      ++next;
    } else {
      f[n - 1] = f[n - 2] + 1;
    }
  }
  w.f = GrowthTable(std::move(f));

  // invariants of the witness itself
  for (std::size_t j = 0; j < w.d.size(); ++j) {
    if ((w.d[j] & (w.d[j] - 1)) != 0) throw std::logic_error("d not a power of two");
    if (j > 0 && !(w.d[j] > 4 * w.d[j - 1])) throw std::logic_error("d_{i+1} > 4 d_i violated");
  }
  if (w.d[0] <= 1) throw std::logic_error("d_2 must exceed 1");
  return w;
}

struct WitnessReport {
  bool strictly_increasing = true;
  bool square_bound = true;       // f(2n) <= f(n)^2
  bool telescoping_bound = true;  // f(n) <= 2(n+1) omega(n)!
  bool marked_rule = true;        // f(2 d_i) = i f(d_i)
  bool below_g = true;            // f(n) <= g(n) for n >= n0
  bool constraint = true;         // omega(n)! < g(n)/(2(n+1)) for n >= n0
  std::optional<std::size_t> first_violation;
  bool pass() const {
    return strictly_increasing && square_bound && telescoping_bound && marked_rule && below_g && constraint;
  }
};

inline WitnessReport check_witness(const SuperlinearWitness& w) {
  WitnessReport r;
  const std::size_t N = w.f.size();
  auto note = [&](bool& flag, std::size_t n) {
    flag = false;
    if (!r.first_violation) r.first_violation = n;
  };
  // factorials are tiny in number; cache them by omega value
  std::vector<BigInt> fact{1};
  auto fac = [&](std::uint32_t k) -> const BigInt& {
    while (fact.size() <= k) fact.push_back(fact.back() * fact.size());
    return fact[k];
  };
  for (std::size_t n = 1; n <= N; ++n) {
    if (n < N && !(w.f(n) < w.f(n + 1))) note(r.strictly_increasing, n);
    if (2 * n <= N && w.f(2 * n) > w.f(n) * w.f(n)) note(r.square_bound, n);
    if (w.f(n) > BigInt(2 * (n + 1)) * fac(w.omega[n - 1])) note(r.telescoping_bound, n);
    if (n >= w.n0) {
      if (w.f(n) > w.g(n)) note(r.below_g, n);
      if (!(fac(w.omega[n - 1]) * BigInt(2 * (n + 1)) < w.g(n))) note(r.constraint, n);
    }
  }
  for (std::size_t j = 0; j < w.d.size(); ++j)
    if (w.f(2 * w.d[j]) != BigInt(j + 2) * w.f(w.d[j])) note(r.marked_rule, 2 * w.d[j]);
  return r;
}

// CSV: n, f, f_prime, doubling_ratio_num, doubling_ratio_den
inline void write_csv(std::ostream& os, const GrowthTable& f) {
  auto d = discrete_derivative(f);
  os << "n,f,f_prime,doubling_ratio_num,doubling_ratio_den\n";
  for (std::size_t n = 1; n <= f.size(); ++n) {
    os << n << ',' << f(n) << ',' << d.values(n) << ',';
    if (2 * n <= f.size()) {
      Rational q(f(2 * n), f(n));
      os << numerator_of(q) << ',' << denominator_of(q);
    } else {
      os << ',';
    }
    os << '\n';
  }
}

}  // namespace wordlab::growth
