#include "wordlab/algebra.hpp"

#include <catch_amalgamated.hpp>

using namespace wordlab;
using namespace wordlab::algebra;

namespace {

const subst::SubstWord& word_g2() {
  static const subst::SubstWord w([] {
    subst::SubstParams p;
    p.gamma = Rational(2);
    return p;
  }(), 4);
  return w;
}

const subst::SubstLanguage& lang_g2() {
  static const subst::SubstLanguage L(word_g2());
  return L;
}

Word P(std::string_view s) { return subst::alphabet().parse(s); }

// Evaluate pointwise from the definition of convolution, no windows merged.
Rational brute_product(const Element& f, const Element& g, const GroupoidPoint& pt) {
  Rational sum = 0;
  for (auto q : g.degrees()) sum += evaluate_at(f, pt.shifted(q, pt.degree - q)) * evaluate_at(g, {q, pt.lo, pt.sample});
  return sum;
}

}  // namespace

TEST_CASE("generators satisfy the defining relations") {
  const auto& L = lang_g2();
  auto rep = verify_identities(L, 3, 300, 300, 7);
  INFO(rep.first_failure.value_or(""));
  REQUIRE(rep.pass());
  REQUIRE(rep.assoc_checked == 300);
  REQUIRE(rep.degree_checked == 300);
}

TEST_CASE("patterns outside the language vanish") {
  const auto& L = lang_g2();
  REQUIRE_FALSE(L.contains(P("bbbb")));
  REQUIRE(Element::cylinder(L, 0, 0, P("bbbb")).is_zero());
  // splitting a cylinder by its one-letter extensions gives it back, window trimmed
  auto G = make_generators(L);
  auto e = Element::cylinder(L, 2, 0, P("ab"));
  auto split = Element::cylinder(L, 2, 0, P("aba")) + Element::cylinder(L, 2, 0, P("abb"));
  REQUIRE(split == e);
  REQUIRE(split.width() == 2);
  REQUIRE(split.lo() == 0);
  REQUIRE((G.proj[0] + G.proj[1]).width() == 0);
  REQUIRE((e - e).is_zero());
}

TEST_CASE("canonical form drops a position only when it never matters") {
  const auto& L = lang_g2();
  auto a = Element::from_terms(L, -1, 2, {{0, P("aa"), 1}, {0, P("ba"), 2}});
  REQUIRE(a.width() == 2);
  REQUIRE(a.coefficient(0, P("aa")) == 1);
  auto b = Element::from_terms(L, -1, 2, {{0, P("aa"), 3}, {0, P("ba"), 3}});
  REQUIRE(b.width() == 1);
  REQUIRE(b.lo() == 0);
  REQUIRE(b.coefficient(0, P("a")) == 3);
}

TEST_CASE("convolution agrees with the pointwise sum") {
  const auto& L = lang_g2();
  const auto& host = word_g2().level(3).ab;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> at(0, host.size() - 41);
  std::uniform_int_distribution<std::int64_t> deg(-4, 4);
  for (int i = 0; i < 400; ++i) {
    auto f = random_element(L, rng), g = random_element(L, rng);
    GroupoidPoint pt{deg(rng), -20, host.substr(at(rng), 40)};
    auto fg = convolve(f, g);
    REQUIRE(evaluate_at(fg, pt) == brute_product(f, g, pt));
  }
}

TEST_CASE("evaluation needs a covering sample") {
  const auto& L = lang_g2();
  auto e = Element::cylinder(L, 0, 3, P("ab"));
  REQUIRE_THROWS_WITH(evaluate_at(e, {0, 0, P("aab")}), "insufficient sample");
  REQUIRE(evaluate_at(e, {0, 0, P("aabab")}) == 1);
  REQUIRE(evaluate_at(e, {1, 0, P("aabab")}) == 0);
  REQUIRE_THROWS(GroupoidPoint::make(L, 0, 0, P("bbbb")));
}

TEST_CASE("prime field coefficients") {
  const auto& L = lang_g2();
  Field F{5};
  auto G = make_generators(L, F);
  auto x = scale(Rational(1, 2), G.proj[0]);
  REQUIRE(x.coefficient(0, P("a")) == 3);
  auto five = scale(5, G.one);
  REQUIRE(five.is_zero());
  auto rep = verify_identities(L, 2, 100, 100, 3, F);
  REQUIRE(rep.pass());
  REQUIRE_THROWS(add(G.one, Element::shift(L, 0)));
}

TEST_CASE("dimension of the filtration pieces") {
  const auto& L = lang_g2();
  REQUIRE(w_basis_dimension(L, 0) == 2);
  REQUIRE(w_basis_dimension(L, 1) == 3 * L.factors(3).size());
  auto rows = dims_table(L, 8);
  REQUIRE(rows.size() == 9);
  for (const auto& r : rows) REQUIRE(r.dim == BigInt(2 * r.N + 1) * r.p);
  REQUIRE(rows[4].ratio);
  REQUIRE(*rows[4].ratio == Rational(rows[4].dim, rows[2].dim));
}

TEST_CASE("witness product isolates a coefficient") {
  const auto& L = lang_g2();
  auto G = make_generators(L);
  for (std::uint64_t n : {1, 2, 4}) {
    auto r = witness_product(G.proj[0], n, word_g2());
    INFO("n=" << n);
    REQUIRE(r.pass());
    REQUIRE(r.alpha_sum == 1);
    REQUIRE(r.k == 0);
  }
  auto diff = G.proj[0] - G.proj[1];
  auto r = witness_product(diff, 1, word_g2());
  REQUIRE(r.pass());
  REQUIRE((r.alpha_sum == 1 || r.alpha_sum == -1));
  // a homogeneous element of nonzero degree
  auto shifted = convolve(G.proj[1], G.T);
  auto rs = witness_product(shifted, 1, word_g2());
  REQUIRE(rs.pass());
  REQUIRE(rs.k == 1);
  REQUIRE_THROWS(witness_product(Element(L), 1, word_g2()));
  REQUIRE_THROWS(witness_product(Element::cylinder(L, 0, 3, P("a")), 1, word_g2()));
}

TEST_CASE("unit decomposition at the first level") {
  const auto& L = lang_g2();
  auto r = verify_unit_decomposition(L, 0);
  INFO(r.failing_u.value_or(Word()));
  REQUIRE(r.sum_is_one);
  REQUIRE(r.chains_ok);
  REQUIRE(r.split_lengths_ok);
  REQUIRE(r.pass());
  REQUIRE(r.N == 6);
  REQUIRE(r.terms == L.factors(42).size());
  REQUIRE(r.measured_c <= 12);
}

TEST_CASE("return function bracket") {
  const auto& L = lang_g2();
  auto r = ret_bracket_report(L, 3);
  INFO(r.upper_note);
  REQUIRE(r.v_misses_u);
  REQUIRE(r.vanishing_ok);
  REQUIRE(r.K == 88);
  REQUIRE(r.upper_run);
  REQUIRE(r.pass());
  auto big = ret_bracket_report(L, 18);
  auto rec = subst::recurrence_function(word_g2(), 18).rec;
  REQUIRE(big.s_lower == (rec - 18 + 1) / 2);
  REQUIRE(big.v.size() == 2 * (big.s_lower - 1) + 18);
  REQUIRE(big.upper_note.find("L(9072)") != std::string::npos);
  REQUIRE(big.v_misses_u);
  REQUIRE(big.vanishing_ok);
  REQUIRE_FALSE(big.upper_run);
  REQUIRE(big.pass());
}
