// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "wordlab/algebra.hpp"
#include "wordlab/ergodic.hpp"
#include "wordlab/growth.hpp"
#include "wordlab/subst.hpp"
#include "wordlab/xk.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace wordlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

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

// smallest d in [1, d_max] with w[i] = w[i+d] for all i, by direct comparison
std::optional<std::size_t> naive_period(const Word& w, std::size_t d_max) {
  for (std::size_t d = 1; d <= d_max; ++d) {
    bool ok = true;
    for (std::size_t i = 0; i + d < w.size() && ok; ++i) ok = w[i] == w[i + d];
    if (ok) return d;
  }
  return std::nullopt;
}

Outcome densities() {
  std::ostringstream d;
  bool ok = true;
  for (std::size_t k = 0; k <= 4; ++k) {
    auto got = subst::densities(word_g2(), k);
    ok = ok && got == subst::density_closed_form(k);
    d << (k ? " " : "") << "k=" << k << ":" << rational_string(got.a_alpha);
  }
  return {ok, d.str()};
}

Outcome linear_complexity() {
  const auto& w = word_g2();
  std::uint64_t lo = w.level(1).Ntilde, hi = 1188;
  auto p = subst::complexity_table(w, lo, hi);
  std::uint64_t worst_num = 0, worst_n = lo;
  for (std::uint64_t n = lo; n <= hi; ++n) {
    auto pn = p[n - lo];
    if (pn > 14 * n || pn < n + 1) return {false, "n=" + std::to_string(n) + " p=" + std::to_string(pn)};
    if (pn * worst_n > worst_num * n) worst_num = pn, worst_n = n;
  }
  return {true, "n in [" + std::to_string(lo) + "," + std::to_string(hi) + "], max p/n = " + std::to_string(worst_num) + "/" +
                    std::to_string(worst_n)};
}

Outcome cube_localization() {
  std::ostringstream d;
  bool ok = true;
  for (std::size_t k = 0; k <= 2; ++k) {
    auto c = subst::beta_cubed_positions(word_g2(), k);
    ok = ok && c.in_window();
    d << (k ? " " : "") << "k=" << k << ":" << c.beta_in_ab.size() << " in [" << c.lo << "," << c.hi << "]";
  }
  return {ok, d.str()};
}

Outcome aperiodicity() {
  bool ok = true;
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto& L = word_g2().level(k);
    ok = ok && !naive_period(L.ab, L.Ntilde) && !naive_period(L.ba, L.Ntilde);
    ok = ok && !min_period(L.ab, L.Ntilde) && !min_period(L.ba, L.Ntilde);
  }
  return {ok, "k=1..3, d <= Ntilde_k, direct scan and prefix function agree"};
}

Outcome recurrence_bracket() {
  const auto& w = word_g2();
  auto r18 = subst::recurrence_function(w, 18).rec;
  auto r108 = subst::recurrence_function(w, 108).rec;
  const auto N2 = w.level(2).N, N3 = w.level(3).N;
  bool ok = N2 <= r18 && r18 <= 7 * N2 && N3 <= r108 && r108 <= 7 * N3;
  return {ok, "Rec(18)=" + std::to_string(r18) + " in [" + std::to_string(N2) + "," + std::to_string(7 * N2) +
                  "], Rec(108)=" + std::to_string(r108) + " in [" + std::to_string(N3) + "," + std::to_string(7 * N3) + "]"};
}

Outcome xk_structure() {
  xk::XkSystem sys(xk::XkParams{2, 7, 64ULL << 20});
  auto rep = xk::verify_xk_structure(sys, 6);
  bool counts = true;
  for (std::size_t k = 1; k <= 6; ++k) counts = counts && BigInt(sys.level(k).count()) == sys.s(k);
  std::string w;
  for (const auto& l : rep.levels)
    if (!l.witness.empty()) w = " witness k=" + std::to_string(l.k) + ":" + l.witness;
  return {rep.pass() && counts && rep.levels.size() == 6, "levels 1..6, |X_6| = " + sys.s(6).str() + w};
}

Outcome derivative_spike() {
  xk::XkSystem sys(xk::XkParams{2, 7, 64ULL << 20});
  auto rep = xk::verify_derivative_spike(sys, 1, Rational(1, 2));
  const std::uint64_t ts2 = rep.t * rep.s * rep.s;  // 27 * 65536
  bool injective = rep.family_a_distinct == rep.family_a && rep.family_b_distinct == rep.family_b &&
                   rep.family_b_decode_failures == 0 && rep.family_b_decode_audited > 0 &&
                   rep.family_b_members_ok == rep.family_b;
  bool lower = rep.p_at(162) - rep.p_at(81) >= 1769472 && rep.union_size >= rep.p_at(81) + ts2 && rep.p_at(162) >= rep.union_size;
  bool upper = rep.p_at(162) <= 11 * ts2;
  bool m_ok = rep.m >= 82 && rep.m <= 162 && 3 * rep.dp_m >= 65536 && rep.epsilon_ok;
  // exact enumeration, independent of the structural count
  bool brute = true;
  FactorOptions exact;
  exact.force_mode = FactorMode::exact;
  for (std::uint64_t n : {std::uint64_t{81}, rep.m - 1, rep.m, std::uint64_t{162}}) {
    auto fs = xk::xk_factor_set(sys, n, exact);
    brute = brute && fs.mode == FactorMode::exact && fs.count == rep.p_at(n);
  }
  std::ostringstream d;
  d << "p(81)=" << rep.p_at(81) << " p(162)=" << rep.p_at(162) << " diff=" << rep.p_at(162) - rep.p_at(81)
    << " cap=" << 11 * ts2 << " m=" << rep.m << " p'(m)=" << rep.dp_m << " families " << rep.family_a << "+" << rep.family_b
    << " distinct, audited " << rep.family_b_decode_audited;
  return {injective && lower && upper && m_ok && brute && rep.pass(), d.str()};
}

Outcome superlinear_witness() {
  auto g = growth::pick_g("n2", 1000000);
  auto w = growth::build_superlinear_witness(g);
  auto r = growth::check_witness(w);
  bool ok = r.strictly_increasing && r.square_bound && r.telescoping_bound && r.marked_rule;
  std::ostringstream d;
  d << "marked d_i:";
  for (auto x : w.d) d << " " << x;
  if (r.first_violation) d << " first violation n=" << *r.first_violation;
  return {ok, d.str()};
}

Outcome ergodic_intervals() {
  ergodic::ErgodicParams p;
  p.f = ergodic::default_f(std::size_t{1} << 10);
  p.max_level = 8;
  ergodic::ErgodicSystem sys(p);
  bool ok = true;
  std::ostringstream d;
  for (const char* u : {"a", "b", "ab"}) {
    auto r = ergodic::verify_interval_nesting(sys, sys.alphabet().parse(u));
    ok = ok && r.a_nondecreasing && r.nested && r.delta_halving && !r.consumption_levels.empty();
    d << u << ":Delta_8=" << rational_string(r.intervals.back().delta()) << " ";
  }
  d << "consumption levels";
  auto r = ergodic::verify_interval_nesting(sys, sys.alphabet().parse("a"));
  for (auto n : r.consumption_levels) d << " " << n;
  return {ok, d.str()};
}

Outcome algebra_identities() {
  auto r = algebra::verify_identities(lang_g2(), 3, 1000, 1000, 1);
  return {r.pass() && r.assoc_checked == 1000 && r.degree_checked == 1000,
          std::to_string(r.assoc_checked) + " triples, " + std::to_string(r.degree_checked) + " pairs" +
              (r.first_failure ? ", first failure: " + *r.first_failure : "")};
}

Outcome unit_decomposition() {
  std::ostringstream d;
  bool ok = true;
  for (std::size_t l : {0, 1}) {
    auto r = algebra::verify_unit_decomposition(lang_g2(), l);
    ok = ok && r.pass() && r.terms <= 14 * 7 * r.N;
    d << "l=" << l << ": " << r.terms << "/" << r.term_cap << " terms, indices " << r.max_left_index << "<=" << r.left_bound
      << " " << r.max_right_index << "<=" << r.right_bound << "; ";
  }
  return {ok, d.str()};
}

Outcome witness_products() {
  std::mt19937_64 rng(1);
  std::size_t good = 0;
  for (int i = 0; i < 20; ++i) {
    auto f = algebra::random_w_element(lang_g2(), rng, 3);
    auto r = algebra::witness_product(f, 3, word_g2());
    if (r.pass()) ++good;
  }
  return {good == 20, std::to_string(good) + "/20 random elements of W_3"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"densities exact", densities},
      {"linear complexity", linear_complexity},
      {"cube localization", cube_localization},
      {"aperiodicity", aperiodicity},
      {"recurrence bracket", recurrence_bracket},
      {"X_k structure", xk_structure},
      {"complexity sandwich and derivative spike", derivative_spike},
      {"superlinear witness", superlinear_witness},
      {"ergodic intervals", ergodic_intervals},
      {"algebra identities", algebra_identities},
      {"identity decomposition", unit_decomposition},
      {"witness product", witness_products},
  };
  int failed = 0, idx = 0;
  for (const auto& [name, fn] : criteria) {
    ++idx;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s %2d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", idx, name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
