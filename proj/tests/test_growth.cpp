#include "wordlab/growth.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace wordlab;
using namespace wordlab::growth;

namespace {

GrowthTable from_list(std::initializer_list<long> xs) {
  std::vector<BigInt> v;
  for (long x : xs) v.emplace_back(x);
  return GrowthTable(std::move(v));
}

// Independent check of omega(n)! < n^2 / (2(n+1)) using 128-bit integers.
bool square_constraint(unsigned omega, unsigned __int128 n) {
  unsigned __int128 fact = 1;
  for (unsigned i = 2; i <= omega; ++i) fact *= i;
  return fact * 2 * (n + 1) < n * n;
}

}  // namespace

TEST_CASE("discrete derivative examples") {
  auto d = discrete_derivative(from_list({2, 3, 4}));
  REQUIRE(d.first_is_convention);
  REQUIRE(d.values.values() == from_list({0, 1, 1}).values());
}

TEST_CASE("derivative then cumulative sum reproduces f") {
  auto w = build_superlinear_witness(pick_g("n2", 5000));
  auto d = discrete_derivative(w.f);
  REQUIRE(cumulative_sum(d, w.f(1)).values() == w.f.values());
  auto g = pick_g("nlogn", 300);
  REQUIRE(cumulative_sum(discrete_derivative(g), g(1)).values() == g.values());
}

TEST_CASE("growth properties of n+1") {
  auto f = tabulate(300, [](std::size_t n) { return BigInt(n + 1); });
  auto r = check_growth_properties(f);
  REQUIRE(r.nondecreasing);
  REQUIRE(r.strictly_increasing_from == std::optional<std::size_t>(1));
  REQUIRE(r.submultiplicative);
  REQUIRE(r.exhaustive_pairs);
  REQUIRE(r.violations.empty());
  REQUIRE(r.doubling_ratios.size() == 150);
  REQUIRE(r.doubling_ratios[0] == Rational(3, 2));
}

TEST_CASE("growth properties report violating pairs") {
  auto f = tabulate(20, [](std::size_t n) { return BigInt(1) << n; });  // 2^n: equality, fine
  REQUIRE(check_growth_properties(f).submultiplicative);
  auto h = tabulate(20, [](std::size_t n) { return n < 10 ? BigInt(1) : BigInt(100); });
  auto r = check_growth_properties(h);
  REQUIRE_FALSE(r.submultiplicative);
  for (auto [m, n] : r.violations) REQUIRE(h(m + n) > h(m) * h(n));
  REQUIRE(r.strictly_increasing_from == std::nullopt);
  auto dec = from_list({3, 2, 5});
  REQUIRE_FALSE(check_growth_properties(dec).nondecreasing);
}

TEST_CASE("superlinear witness for n^2 up to 10^6") {
  const std::size_t N = 1'000'000;
  auto w = build_superlinear_witness(pick_g("n2", N));

  // oracle: greedy over powers of two with the constraint evaluated at every n
  std::vector<std::uint64_t> expect;
  std::uint64_t cand = 2;
  unsigned idx = 2;
  while (2 * cand <= N) {
    bool ok = true;
    for (std::uint64_t n = 2 * cand; n <= N && ok; ++n) ok = square_constraint(idx, n);
    if (ok) {
      expect.push_back(cand);
      ++idx;
      cand = 1;
      while (cand <= 4 * expect.back()) cand *= 2;
    } else {
      cand *= 2;
    }
  }
  REQUIRE(w.d == expect);
  REQUIRE(w.d == std::vector<std::uint64_t>{4, 32, 256, 2048, 16384, 131072});

  // n0 is the first n from which every later n satisfies the constraint
  std::size_t last_bad = 0;
  for (std::size_t n = 1; n <= N; ++n) {
    unsigned om = 0;
    for (std::size_t j = 0; j < expect.size(); ++j)
      if (2 * expect[j] <= n) om = static_cast<unsigned>(j + 2);
    REQUIRE(w.omega[n - 1] == om);
    if (!square_constraint(om, n)) last_bad = n;
  }
  REQUIRE(w.n0 == last_bad + 1);

  REQUIRE(w.f(1) == 2);
  REQUIRE(w.f(2) == 3);
  REQUIRE(w.f(8) == 2 * w.f(4));
  REQUIRE(w.f(64) == 3 * w.f(32));
  auto fp = discrete_derivative(w.f);
  REQUIRE(fp.values(8) == w.f(4) - 4 + 1);

  auto rep = check_witness(w);
  REQUIRE(rep.pass());
  for (std::size_t n = w.n0; n <= N; n += 997) REQUIRE(w.f(n) <= BigInt(n) * n);
}

TEST_CASE("witness satisfies the doubling bound via the generic checker") {
  auto w = build_superlinear_witness(pick_g("n2", 20000));
  auto r = check_growth_properties(w.f);
  REQUIRE(r.strictly_increasing_from == std::optional<std::size_t>(1));
  for (std::size_t n = 1; 2 * n <= w.f.size(); ++n) REQUIRE(w.f(2 * n) <= w.f(n) * w.f(n));
}

TEST_CASE("horizon errors") {
  REQUIRE_THROWS_WITH(build_superlinear_witness(pick_g("n2", 7)), "horizon");
  // linear g never leaves room for 2! below g(n)/(2(n+1))
  REQUIRE_THROWS_WITH(build_superlinear_witness(pick_g("id", 4096)), "horizon");
}

TEST_CASE("custom table reader") {
  std::istringstream a("1\n4\n9\n");
  REQUIRE(read_table(a).values() == from_list({1, 4, 9}).values());
  std::istringstream b("# comment\n1,5\n2,7\n");
  REQUIRE(read_table(b)(2) == 7);
  std::istringstream c("2,5\n");
  REQUIRE_THROWS(read_table(c));
}

TEST_CASE("csv export columns") {
  std::ostringstream os;
  write_csv(os, from_list({2, 3, 4, 6}));
  REQUIRE(os.str() ==
          "n,f,f_prime,doubling_ratio_num,doubling_ratio_den\n"
          "1,2,0,3,2\n2,3,1,2,1\n3,4,1,,\n4,6,2,,\n");
}
