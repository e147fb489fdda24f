#include "wordlab/words.hpp"

#include <catch_amalgamated.hpp>

#include <random>
#include <set>

using namespace wordlab;

namespace {

const Alphabet ab("ab");

// Oracles written independently of the library: plain loops over positions.
std::uint64_t naive_count(const std::string& u, const std::string& w) {
  std::uint64_t c = 0;
  for (std::size_t i = 0; i + u.size() <= w.size(); ++i)
    if (w.compare(i, u.size(), u) == 0) ++c;
  return c;
}

std::set<std::string> naive_windows(const std::vector<std::string>& hosts, std::size_t n) {
  std::set<std::string> out;
  for (const auto& h : hosts)
    for (std::size_t i = 0; i + n <= h.size(); ++i) out.insert(h.substr(i, n));
  return out;
}

std::optional<std::size_t> naive_period(const std::string& w, std::size_t d_max) {
  for (std::size_t d = 1; d <= d_max; ++d) {
    bool ok = true;
    for (std::size_t i = 0; i + d < w.size() && ok; ++i) ok = w[i] == w[i + d];
    if (ok) return d;
  }
  return std::nullopt;
}

std::optional<std::size_t> naive_first_failure(const std::string& host, std::size_t K,
                                               const std::vector<std::string>& pats) {
  for (std::size_t s = 0; s + K <= host.size(); ++s) {
    std::string win = host.substr(s, K);
    for (const auto& p : pats)
      if (win.find(p) == std::string::npos) return s;
  }
  return std::nullopt;
}

std::string random_word(std::mt19937_64& rng, std::size_t len, int sigma) {
  std::uniform_int_distribution<int> d(0, sigma - 1);
  std::string s(len, '\0');
  for (auto& c : s) c = static_cast<char>(d(rng));
  return s;
}

// alpha_2 beta_2 for n_1 = n_2 = 2, spelled out by hand.
std::string master2() {
  std::string a1 = "aabaab", b1 = "bbabba";
  std::string a2, b2;
  for (int i = 0; i < 2; ++i) a2 += a1 + a1 + b1;
  for (int i = 0; i < 2; ++i) b2 += b1 + b1 + a1;
  return a2 + b2;
}

}  // namespace

TEST_CASE("alphabet round trip") {
  Alphabet sigma("012");
  REQUIRE(sigma.render(sigma.parse("101000101")) == "101000101");
  REQUIRE_THROWS(sigma.parse("13"));
  REQUIRE_THROWS(Alphabet("aa"));
}

TEST_CASE("count_occurrences examples") {
  REQUIRE(count_occurrences(ab.parse("a"), ab.parse("a")) == 1);
  REQUIRE(count_occurrences(ab.parse("aa"), ab.parse("aabaab")) == 2);
  REQUIRE_THROWS_WITH(count_occurrences("", ab.parse("ab")), "empty pattern");
  // overlapping
  REQUIRE(count_occurrences(ab.parse("aa"), ab.parse("aaaa")) == 3);
}

TEST_CASE("occurrence additivity over splits") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> len(1, 40), ulen(1, 4);
  for (int iter = 0; iter < 10000; ++iter) {
    std::string w = random_word(rng, len(rng), 2);
    std::string u = random_word(rng, ulen(rng), 2);
    std::uniform_int_distribution<std::size_t> cut(0, w.size());
    std::size_t c = cut(rng);
    std::string w0 = w.substr(0, c), w1 = w.substr(c);
    auto whole = count_occurrences(u, w);
    REQUIRE(whole == naive_count(u, w));
    auto parts = naive_count(u, w0) + naive_count(u, w1);
    REQUIRE(parts <= whole);
    REQUIRE(whole <= parts + u.size() - 1);
  }
  std::string w0 = ab.parse("aab"), u = ab.parse("aa");
  REQUIRE(count_occurrences(u, w0 + w0) == 2);
}

TEST_CASE("frequency examples") {
  REQUIRE(frequency(ab.parse("a"), ab.parse("aabaab")) == Rational(2, 3));
  REQUIRE(frequency(ab.parse("b"), ab.parse("aaaa")) == 0);
  std::string alpha1 = ab.parse("aabaab"), pw;
  for (int i = 1; i <= 5; ++i) {
    pw += alpha1;
    REQUIRE(frequency(ab.parse("a"), pw) == Rational(2, 3));
  }
  REQUIRE_THROWS(frequency(ab.parse("a"), ""));
}

TEST_CASE("factor_set examples") {
  std::vector<Word> h{ab.parse("aabaab")};
  auto f6 = factor_set(h, 6);
  REQUIRE(f6.count == 1);
  REQUIRE(f6.members[0] == ab.parse("aabaab"));
  auto f2 = factor_set(h, 2);
  REQUIRE(f2.count == 3);
  REQUIRE(f2.members == std::vector<Word>{ab.parse("aa"), ab.parse("ab"), ab.parse("ba")});
  Alphabet sigma("012");
  std::vector<Word> x3{sigma.parse("101000101")};
  REQUIRE(factor_set(x3, 3).contains(sigma.parse("000")));
  REQUIRE(factor_set(h, 0).count == 1);
  std::vector<Word> two{ab.parse("aabaab"), ab.parse("bbabba")};
  REQUIRE(distinct_factor_count(two, 1) == 2);
}

TEST_CASE("factor sets agree with naive enumeration in both modes") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<std::string> hosts;
    std::size_t m = 1 + rng() % 4;
    for (std::size_t i = 0; i < m; ++i) hosts.push_back(random_word(rng, 1 + rng() % 60, 2 + static_cast<int>(iter % 2)));
    std::size_t n = rng() % 12;
    auto oracle = naive_windows(hosts, n);
    FactorOptions exact, fpm;
    exact.force_mode = FactorMode::exact;
    fpm.force_mode = FactorMode::fingerprint;
    auto e = count_factors(hosts, n, exact);
    auto f = count_factors(hosts, n, fpm);
    std::uint64_t expect = n == 0 ? 1 : oracle.size();
    REQUIRE(e.count == expect);
    REQUIRE(f.count == expect);
    REQUIRE(f.audit_mismatches == 0);
    if (n > 0) REQUIRE(std::vector<std::string>(oracle.begin(), oracle.end()) == e.members);
  }
}

TEST_CASE("factor count invariant under permuting and duplicating hosts") {
  std::mt19937_64 rng(3);
  std::vector<Word> hosts;
  for (int i = 0; i < 5; ++i) hosts.push_back(random_word(rng, 50, 2));
  for (std::size_t n : {1, 3, 7, 20}) {
    auto base = distinct_factor_count(hosts, n);
    auto perm = hosts;
    std::shuffle(perm.begin(), perm.end(), rng);
    REQUIRE(distinct_factor_count(perm, n) == base);
    perm.push_back(perm[0]);
    REQUIRE(distinct_factor_count(perm, n) == base);
  }
}

TEST_CASE("fingerprint mode audits a sample and honours the budget") {
  std::mt19937_64 rng(5);
  std::vector<Word> hosts;
  for (int i = 0; i < 20; ++i) hosts.push_back(random_word(rng, 20000, 3));
  FactorOptions fpm;
  fpm.force_mode = FactorMode::fingerprint;
  auto f = count_factors(hosts, 30, fpm);
  FactorOptions ex;
  ex.force_mode = FactorMode::exact;
  REQUIRE(f.count == count_factors(hosts, 30, ex).count);
  REQUIRE(f.audit_sampled > 0);
  REQUIRE(f.audit_mismatches == 0);
  FactorOptions tiny;
  tiny.max_bytes = 1024;
  REQUIRE_THROWS_WITH(count_factors(hosts, 30, tiny), "budget");
}

TEST_CASE("min_period examples and oracle") {
  REQUIRE(min_period(ab.parse("aaa"), 2) == 1);
  REQUIRE(min_period(ab.parse("aabaab"), 5) == 3);
  REQUIRE_FALSE(min_period(ab.parse("aabaabbbabba"), 3).has_value());
  std::mt19937_64 rng(9);
  for (int iter = 0; iter < 2000; ++iter) {
    std::string base = random_word(rng, 1 + rng() % 5, 2);
    std::string w;
    std::size_t len = 2 + rng() % 30;
    while (w.size() < len) w += base;
    w.resize(len);
    if (rng() % 3 == 0) w[rng() % len] ^= 1;
    std::size_t dmax = rng() % w.size();
    REQUIRE(min_period(w, dmax) == naive_period(w, dmax));
  }
}

TEST_CASE("sliding containment scan examples") {
  auto r = sliding_containment_scan(ab.parse("aabaab"), 6, {ab.parse("aa")});
  REQUIRE(r.all_contained);
  Word m = ab.parse(master2());
  std::vector<Word> letters{ab.parse("a"), ab.parse("b")};
  auto r3 = sliding_containment_scan(m, 3, letters);
  REQUIRE_FALSE(r3.all_contained);
  REQUIRE(ab.render(m.substr(*r3.failing_window, 3)) == "bbb");
  REQUIRE(sliding_containment_scan(m, 4, letters).all_contained);
  REQUIRE_THROWS(sliding_containment_scan(m, 2, {ab.parse("aab")}));
}

TEST_CASE("containment scan agrees with naive rescan") {
  std::mt19937_64 rng(13);
  for (int iter = 0; iter < 400; ++iter) {
    std::string host = random_word(rng, 20 + rng() % 80, 2);
    std::vector<std::string> pats;
    std::size_t np = 1 + rng() % 4;
    for (std::size_t i = 0; i < np; ++i) pats.push_back(random_word(rng, 1 + rng() % 3, 2));
    std::size_t K = 3 + rng() % (host.size() - 3);
    auto got = sliding_containment_scan(host, K, pats, 1 + static_cast<unsigned>(iter % 3));
    auto expect = naive_first_failure(host, K, pats);
    REQUIRE(got.all_contained == !expect.has_value());
    if (expect) REQUIRE(got.failing_window == expect);
  }
}

TEST_CASE("containment verdict is monotone in K on a master word") {
  Word m = ab.parse(master2());
  auto pats = factor_set(std::vector<Word>{m}, 3).members;
  ContainmentScanner sc(m, pats);
  bool seen_true = false;
  for (std::size_t K = 3; K <= m.size(); ++K) {
    bool v = sc.scan(K).all_contained;
    if (seen_true) REQUIRE(v);
    seen_true = seen_true || v;
  }
  REQUIRE(seen_true);
}
