// Batch front-end: family subcommands, report emission, exit codes.
//   0  ok, every check passed
//   1  a check failed; the witness is written into the report
//   2  usage, input or resource error
#pragma once

#include "wordlab/algebra.hpp"
#include "wordlab/ergodic.hpp"
#include "wordlab/growth.hpp"
#include "wordlab/subst.hpp"
#include "wordlab/xk.hpp"

#include <CLI11.hpp>
#include <boost/multiprecision/miller_rabin.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace wordlab::cli {

using Json = nlohmann::ordered_json;
inline constexpr const char* kSchema = "wordlab.report/1";
inline constexpr std::uint64_t kMinBytes = 64ULL << 20;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Report {
  std::string command;
  std::uint64_t seed = 1;
  std::vector<std::pair<std::string, std::string>> params;
  bool pass = true;
  Json summary = Json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
  Json witness;  // null unless something failed

  void param(const std::string& k, const std::string& v) { params.emplace_back(k, v); }
  void row(std::vector<Json> r) { rows.push_back(std::move(r)); }
  void fail(Json w) {
    pass = false;
    if (witness.is_null()) witness = std::move(w);
  }
};

inline std::string big(const BigInt& x) { return x.str(); }
inline std::string rat(const Rational& q) { return rational_string(q); }

inline std::string cell_text(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_null()) return "";
  return j.dump();
}

inline void write_csv(std::ostream& os, const Report& r) {
  os << "# seed=" << r.seed << "\n# schema=" << kSchema << "\n# command=" << r.command << "\n";
  for (const auto& [k, v] : r.params) os << "# " << k << "=" << v << "\n";
  os << "# pass=" << (r.pass ? "true" : "false") << "\n";
  if (!r.witness.is_null()) os << "# witness=" << r.witness.dump() << "\n";
  for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
  os << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << "\n";
  }
}

inline void write_json(std::ostream& os, const Report& r) {
  Json j;
  j["schema"] = kSchema;
  j["command"] = r.command;
  j["seed"] = r.seed;
  Json p = Json::object();
  for (const auto& [k, v] : r.params) p[k] = v;
  j["params"] = p;
  j["pass"] = r.pass;
  j["summary"] = r.summary;
  j["columns"] = r.columns;
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(row);
  j["rows"] = rows;
  if (!r.witness.is_null()) j["witness"] = r.witness;
  os << j.dump(2) << "\n";
}

inline Json element_json(const algebra::Element& e) {
  Json j;
  j["field"] = e.field().name();
  j["window"] = e.width() ? Json::array({e.lo(), e.hi()}) : Json::array();
  Json terms = Json::array();
  for (const auto& [k, c] : e.terms())
    terms.push_back({{"d", k.first},
                     {"pattern", subst::alphabet().render(k.second)},
                     {"coeff_num", big(numerator_of(c))},
                     {"coeff_den", big(denominator_of(c))}});
  j["terms"] = terms;
  return j;
}

// "a..b" or a single value
inline std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& s) {
  try {
    auto dots = s.find("..");
    std::uint64_t lo = std::stoull(s.substr(0, dots));
    std::uint64_t hi = dots == std::string::npos ? lo : std::stoull(s.substr(dots + 2));
    if (lo == 0 || hi < lo) throw UsageError("bad range: " + s);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError("bad range: " + s);
  }
}

struct Globals {
  std::uint64_t seed = 1;
  std::uint64_t max_bytes = 2ULL << 30;
  std::string format = "csv";
  std::string output;
  unsigned workers = 1;
};

// ---------------------------------------------------------------------------
// growth

struct GrowthOpts {
  std::string g = "n2";
  std::size_t n_max = 1000;
  std::string table;
};

inline growth::GrowthTable growth_input(const GrowthOpts& o, Report& r) {
  if (!o.table.empty()) {
    r.param("table", o.table);
    return growth::read_table_file(o.table);
  }
  r.param("g", o.g);
  r.param("n_max", std::to_string(o.n_max));
  return growth::pick_g(o.g, o.n_max);
}

inline Report growth_build(const Globals&, const GrowthOpts& o) {
  Report r;
  r.command = "growth build";
  auto g = growth_input(o, r);
  auto w = growth::build_superlinear_witness(g);
  auto chk = growth::check_witness(w);
  Json d = Json::array();
  for (std::size_t j = 0; j < w.d.size(); ++j) d.push_back({{"i", w.index_of(j)}, {"d_i", w.d[j]}});
  r.summary["marked"] = d;
  r.summary["n0"] = w.n0;
  r.summary["strictly_increasing"] = chk.strictly_increasing;
  r.summary["square_bound"] = chk.square_bound;
  r.summary["telescoping_bound"] = chk.telescoping_bound;
  r.summary["marked_rule"] = chk.marked_rule;
  r.summary["below_g"] = chk.below_g;
  r.summary["constraint"] = chk.constraint;
  if (!chk.pass()) r.fail({{"first_violation", *chk.first_violation}});
  r.columns = {"n", "g", "f", "f_prime", "omega"};
  for (std::size_t n = 1; n <= w.f.size(); ++n)
    r.row({n, big(w.g(n)), big(w.f(n)), n == 1 ? std::string("0") : big(w.f(n) - w.f(n - 1)), w.omega[n - 1]});
  return r;
}

inline Report growth_check(const Globals& G, const GrowthOpts& o) {
  Report r;
  r.command = "growth check";
  auto f = growth_input(o, r);
  auto rep = growth::check_growth_properties(f, 2000, G.seed);
  r.summary["nondecreasing"] = rep.nondecreasing;
  r.summary["strictly_increasing_from"] = rep.strictly_increasing_from ? Json(*rep.strictly_increasing_from) : Json();
  r.summary["submultiplicative"] = rep.submultiplicative;
  r.summary["pairs_tested"] = rep.pairs_tested;
  r.summary["exhaustive_pairs"] = rep.exhaustive_pairs;
  if (!rep.nondecreasing || !rep.submultiplicative) {
    Json v = Json::array();
    for (std::size_t i = 0; i < rep.violations.size() && i < 10; ++i) v.push_back({rep.violations[i].first, rep.violations[i].second});
    r.fail({{"nondecreasing", rep.nondecreasing}, {"submultiplicative_violations", v}});
  }
  r.columns = {"n", "f", "f_prime", "doubling_ratio"};
  for (std::size_t n = 1; n <= f.size(); ++n)
    r.row({n, big(f(n)), n == 1 ? std::string("0") : big(f(n) - f(n - 1)),
           2 * n <= f.size() ? Json(rat(Rational(f(2 * n), f(n)))) : Json()});
  return r;
}

// ---------------------------------------------------------------------------
// xk

struct XkOpts {
  unsigned r = 2;
  std::size_t levels = 7;
  std::string n = "1..81";
  std::size_t k = 0;
  std::size_t l = 1;
  std::string epsilon = "1/2";
};

inline xk::XkSystem xk_system(const Globals& G, const XkOpts& o, Report& r) {
  r.param("r", std::to_string(o.r));
  r.param("levels", std::to_string(o.levels));
  return xk::XkSystem(xk::XkParams{o.r, o.levels, G.max_bytes / 32});
}

inline std::vector<std::uint64_t> with_p0(std::vector<std::uint64_t> tail, std::uint64_t lo) {
  if (lo == 1) tail.insert(tail.begin(), 1);  // p(0) = 1, the empty word
  return tail;
}

inline Report xk_build(const Globals& G, const XkOpts& o) {
  Report r;
  r.command = "xk build";
  auto sys = xk_system(G, o, r);
  r.summary["checkpoints"] = sys.checkpoints();
  r.summary["deepest_explicit"] = sys.deepest_explicit();
  r.columns = {"k", "n_k", "s_k", "rule", "explicit"};
  for (std::size_t k = 1; k <= sys.max_level(); ++k) {
    const auto& L = sys.level(k);
    r.row({k, L.n, big(L.s), xk::rule_name(L.rule), L.is_explicit});
  }
  return r;
}

inline Report xk_complexity(const Globals& G, const XkOpts& o) {
  Report r;
  r.command = "xk complexity";
  auto sys = xk_system(G, o, r);
  auto [lo, hi] = parse_range(o.n);
  r.param("n", o.n);
  auto p = with_p0(xk::xk_complexity_table(sys, lo == 1 ? 1 : lo - 1, hi), lo);
  r.columns = {"n", "p", "p_prime", "bound"};
  for (std::uint64_t n = lo; n <= hi; ++n) {
    auto pn = p[n - lo + 1], pp = p[n - lo];
    auto v = xk::power_law_bound(o.r, n, BigInt(pn));
    if (v == xk::BoundVerdict::fail_exact) r.fail({{"n", n}, {"p", pn}});
    r.row({n, pn, pn - pp, xk::verdict_name(v)});
  }
  return r;
}

inline Report xk_structure(const Globals& G, const XkOpts& o) {
  Report r;
  r.command = "xk verify-structure";
  auto sys = xk_system(G, o, r);
  std::size_t k = o.k ? o.k : sys.deepest_explicit();
  r.param("k", std::to_string(k));
  auto rep = xk::verify_xk_structure(sys, k);
  r.summary["checkpoint_identity"] = rep.checkpoint_identity;
  if (!rep.checkpoint_identity) r.fail({{"checkpoint_identity", false}});
  r.columns = {"k", "count_ok", "boundary_ok", "extension_ok", "pushdown_ok", "witness"};
  for (const auto& lv : rep.levels) {
    bool ok = lv.count_ok && lv.boundary_ok && lv.extension_ok && lv.pushdown_ok;
    if (!ok) r.fail({{"k", lv.k}, {"word", lv.witness}});
    r.row({lv.k, lv.count_ok, lv.boundary_ok, lv.extension_ok, lv.pushdown_ok, lv.witness});
  }
  return r;
}

inline Report xk_spike(const Globals& G, const XkOpts& o) {
  Report r;
  r.command = "xk verify-spike";
  auto sys = xk_system(G, o, r);
  r.param("l", std::to_string(o.l));
  r.param("epsilon", o.epsilon);
  auto rep = xk::verify_derivative_spike(sys, o.l, parse_rational(o.epsilon));
  auto& s = r.summary;
  s["t"] = rep.t;
  s["s"] = rep.s;
  s["base"] = rep.base;
  s["window"] = {rep.lo, rep.hi};
  s["family_a"] = {{"size", rep.family_a}, {"distinct", rep.family_a_distinct}};
  s["family_b"] = {{"size", rep.family_b},
                   {"distinct", rep.family_b_distinct},
                   {"members_ok", rep.family_b_members_ok},
                   {"decode_audited", rep.family_b_decode_audited},
                   {"decode_failures", rep.family_b_decode_failures}};
  s["overlap"] = rep.overlap;
  s["union"] = rep.union_size;
  s["lower_ok"] = rep.lower_ok;
  s["upper_ok"] = rep.upper_ok;
  s["candidates"] = rep.candidates;
  s["m"] = rep.m;
  s["p_m"] = rep.p_m;
  s["p_prime_m"] = rep.dp_m;
  s["spike_threshold"] = rat(Rational(BigInt(rep.s) * rep.s, 3));
  s["epsilon_lhs"] = big(rep.lhs);
  s["epsilon_rhs"] = big(rep.rhs);
  s["epsilon_ok"] = rep.epsilon_ok;
  if (!rep.pass())
    r.fail({{"lower_ok", rep.lower_ok}, {"upper_ok", rep.upper_ok}, {"candidates", rep.candidates.size()},
            {"epsilon_ok", rep.epsilon_ok}});
  r.columns = {"n", "p", "p_prime"};
  for (std::uint64_t n = rep.base; n <= rep.hi; ++n)
    r.row({n, rep.p_at(n), n == rep.base ? Json() : Json(rep.p_at(n) - rep.p_at(n - 1))});
  return r;
}

// ---------------------------------------------------------------------------
// ergodic

struct ErgodicOpts {
  std::size_t levels = 8;
  std::string f_table;
  std::string policy = "lexicographic";
  std::string u = "a";
  std::string v;
};

inline ergodic::ErgodicSystem ergodic_system(const Globals& G, const ErgodicOpts& o, Report& r) {
  ergodic::ErgodicParams p;
  p.max_level = o.levels;
  p.seed = G.seed;
  p.max_bytes = G.max_bytes;
  if (o.policy == "lexicographic")
    p.policy = ergodic::ChoicePolicy::lexicographic;
  else if (o.policy == "random")
    p.policy = ergodic::ChoicePolicy::seeded_random;
  else
    throw UsageError("unknown policy: " + o.policy);
  p.f = o.f_table.empty() ? ergodic::default_f(std::size_t{4} << o.levels) : growth::read_table_file(o.f_table);
  r.param("levels", std::to_string(o.levels));
  r.param("f", o.f_table.empty() ? "2^ceil(sqrt(n))" : o.f_table);
  r.param("policy", o.policy);
  return ergodic::ErgodicSystem(std::move(p));
}

inline Report ergodic_build(const Globals& G, const ErgodicOpts& o) {
  Report r;
  r.command = "ergodic build";
  auto sys = ergodic_system(G, o, r);
  auto chk = ergodic::check_c_sequence(sys.params().f, sys.cseq());
  r.summary["alphabet_size"] = sys.cseq().b;
  Json cs = Json::array();
  for (const auto& c : sys.cseq().c) cs.push_back(big(c));
  r.summary["c"] = cs;
  r.summary["ones"] = sys.cseq().ones;
  r.summary["c_sequence_ok"] = chk.pass();
  if (!chk.pass())
    r.fail({{"c0_is_one", chk.c0_is_one}, {"c_bounds", chk.c_bounds}, {"sandwich", chk.sandwich},
            {"branch_rule", chk.branch_rule}, {"first_violation", chk.first_violation ? Json(*chk.first_violation) : Json()}});
  r.columns = {"k", "c", "W", "queue_len", "consumed_head", "head"};
  for (const auto& e : ergodic::run_log(sys))
    r.row({e.k, big(e.c), e.W, e.queue_len, e.consumed_head, e.head ? Json(sys.alphabet().render(*e.head)) : Json()});
  return r;
}

inline Report ergodic_intervals(const Globals& G, const ErgodicOpts& o) {
  Report r;
  r.command = "ergodic intervals";
  auto sys = ergodic_system(G, o, r);
  r.param("u", o.u);
  auto rep = ergodic::verify_interval_nesting(sys, sys.alphabet().parse(o.u));
  r.summary["a_nondecreasing"] = rep.a_nondecreasing;
  r.summary["nested"] = rep.nested;
  r.summary["delta_step"] = rep.delta_step;
  r.summary["delta_halving"] = rep.delta_halving;
  r.summary["explicit_bound"] = rep.explicit_bound;
  r.summary["telescoped_bound"] = rep.telescoped_bound;
  r.summary["halving_levels"] = rep.halving_levels;
  r.summary["consumption_levels"] = rep.consumption_levels;
  if (!rep.pass()) r.fail({{"first_violation", rep.first_violation.value_or("")}});
  r.columns = {"n", "a_n", "b_n", "delta_n"};
  for (const auto& I : rep.intervals) r.row({I.n, rat(I.a), rat(I.b), rat(I.delta())});
  return r;
}

inline Report ergodic_decompose(const Globals& G, const ErgodicOpts& o) {
  Report r;
  r.command = "ergodic decompose";
  if (o.v.empty()) throw UsageError("--v is required");
  auto sys = ergodic_system(G, o, r);
  r.param("v", o.v);
  auto d = ergodic::decompose_factor(sys, sys.alphabet().parse(o.v));
  r.summary["host_level"] = d.host_level;
  r.summary["verified"] = d.verified;
  if (!d.verified) r.fail({{"v", o.v}});
  r.columns = {"index", "part", "level", "word"};
  std::size_t i = 0;
  for (const auto& b : d.ascending) r.row({i++, "ascending", b.level, sys.alphabet().render(b.word)});
  for (const auto& b : d.descending) r.row({i++, "descending", b.level, sys.alphabet().render(b.word)});
  return r;
}

// ---------------------------------------------------------------------------
// subst

struct SubstOpts {
  std::string gamma = "2";
  std::string n_seq;
  std::size_t levels = 4;
  std::string n = "1..200";
  std::size_t k = 0;
};

inline subst::SubstWord subst_word(const Globals& G, const SubstOpts& o, Report& r) {
  subst::SubstParams p;
  p.max_bytes = G.max_bytes;
  if (!o.n_seq.empty()) {
    std::stringstream ss(o.n_seq);
    std::string tok;
    while (std::getline(ss, tok, ',')) p.explicit_n.push_back(std::stoull(tok));
    r.param("n_seq", o.n_seq);
  } else {
    p.gamma = subst::parse_gamma(o.gamma);
    r.param("gamma", rat(*p.gamma));
  }
  r.param("levels", std::to_string(o.levels));
  return subst::SubstWord(p, o.levels);
}

inline Report subst_build(const Globals& G, const SubstOpts& o) {
  Report r;
  r.command = "subst build";
  auto w = subst_word(G, o, r);
  r.columns = {"k", "n_k", "N_k", "Ntilde_k"};
  for (std::size_t k = 0; k <= w.depth(); ++k) {
    const auto& L = w.level(k);
    r.row({k, k ? Json(big(w.sequence().n[k - 1])) : Json(), L.N, k ? Json(L.Ntilde) : Json()});
  }
  return r;
}

inline Report subst_complexity(const Globals& G, const SubstOpts& o) {
  Report r;
  r.command = "subst complexity";
  auto w = subst_word(G, o, r);
  auto [lo, hi] = parse_range(o.n);
  r.param("n", o.n);
  auto p = with_p0(subst::complexity_table(w, lo == 1 ? 1 : lo - 1, hi), lo);
  r.columns = {"n", "p", "p_prime", "p_le_14n", "p_ge_n_plus_1"};
  for (std::uint64_t n = lo; n <= hi; ++n) {
    auto pn = p[n - lo + 1], pp = p[n - lo];
    bool up = pn <= 14 * n, low = pn >= n + 1;
    if (!up || !low) r.fail({{"n", n}, {"p", pn}});
    r.row({n, pn, pn - pp, up, low});
  }
  return r;
}

inline Report subst_densities(const Globals& G, const SubstOpts& o) {
  Report r;
  r.command = "subst densities";
  auto w = subst_word(G, o, r);
  std::size_t kmax = o.k ? std::min(o.k, w.depth()) : w.depth();
  r.columns = {"k", "phi_a_alpha", "phi_b_alpha", "phi_a_beta", "phi_b_beta", "closed_form"};
  for (std::size_t k = 0; k <= kmax; ++k) {
    auto d = subst::densities(w, k);
    bool ok = d == subst::density_closed_form(k);
    if (!ok) r.fail({{"k", k}, {"phi_a_alpha", rat(d.a_alpha)}});
    r.row({k, rat(d.a_alpha), rat(d.b_alpha), rat(d.a_beta), rat(d.b_beta), ok});
  }
  return r;
}

inline Report subst_recurrence(const Globals& G, const SubstOpts& o) {
  Report r;
  r.command = "subst recurrence";
  auto w = subst_word(G, o, r);
  auto [lo, hi] = parse_range(o.n);
  r.param("n", o.n);
  r.columns = {"n", "rec", "lower_bound", "upper_bound", "upper_ok", "host_level", "missing_host", "missing_window", "missing"};
  for (std::uint64_t n = lo; n <= hi; ++n) {
    auto res = subst::recurrence_function(w, n, G.workers);
    auto lb = subst::rec_lower_bound(w, n), ub = subst::rec_upper_bound(w, n);
    bool up = !ub || BigInt(res.rec) <= *ub;
    if (!up) r.fail({{"n", n}, {"rec", res.rec}, {"upper_bound", big(*ub)}});
    Json host, win, miss;
    if (res.certificate) {
      host = res.certificate->host == 0 ? "ab" : "ba";
      win = res.certificate->window;
      miss = subst::alphabet().render(res.certificate->missing);
    }
    r.row({n, res.rec, lb ? Json(big(*lb)) : Json(), ub ? Json(big(*ub)) : Json(), up, res.host_level, host, win, miss});
  }
  return r;
}

inline Report subst_verify(const Globals& G, const SubstOpts& o) {
  Report r;
  r.command = "subst verify";
  auto w = subst_word(G, o, r);
  std::size_t kmax = o.k ? o.k : (w.depth() > 1 ? w.depth() - 1 : 1);
  r.param("k", std::to_string(kmax));
  r.columns = {"check", "k", "ok", "detail"};
  auto add = [&](const std::string& what, std::size_t k, bool ok, Json detail) {
    if (!ok) r.fail({{"check", what}, {"k", k}, {"detail", detail}});
    r.row({what, k, ok, cell_text(detail)});
  };
  for (std::size_t k = 0; k <= w.depth(); ++k) {
    auto d = subst::densities(w, k);
    add("density", k, d == subst::density_closed_form(k), rat(d.a_alpha));
  }
  for (std::size_t k = 0; k + 1 <= w.depth() && k < kmax; ++k) {
    auto c = subst::beta_cubed_positions(w, k);
    add("cube_window", k, c.in_window(), std::to_string(c.beta_in_ab.size()) + " occurrences");
  }
  auto rep = subst::verify_substitution_properties(w, kmax, {}, G.workers);
  for (const auto& e : rep.every_seven) add("every_7N_window", e.k, e.ok, std::to_string(e.windows) + " windows");
  for (const auto& a : rep.aperiodic)
    add("aperiodic", a.k, a.ok(), a.ok() ? Json("") : Json("period " + std::to_string(a.ab_period.value_or(*a.ba_period))));
  add("p_le_14n", 0, rep.p_upper_ok, std::to_string(rep.p_lo) + ".." + std::to_string(rep.p_hi));
  add("p_ge_n_plus_1", 0, rep.p_lower_ok, std::to_string(rep.p_lo) + ".." + std::to_string(rep.p_hi));
  for (const auto& e : rep.exponents) {
    std::ostringstream ss;
    ss << "n=" << e.n << " rec=" << e.rec << " log_ratio=" << e.exponent;
    if (e.floor_applies) add("rec_floor", 0, e.above_floor, ss.str());
  }
  r.summary["exponent_label"] = rep.exponent_label;
  return r;
}

// ---------------------------------------------------------------------------
// algebra

struct AlgebraOpts {
  std::string gamma = "2";
  std::size_t levels = 4;
  std::uint64_t prime = 0;
  std::size_t triples = 1000, pairs = 1000;
  std::int64_t d_max = 3;
  std::uint64_t n = 3;
  std::size_t count = 20;
  std::size_t l = 0;
  std::uint64_t n_max = 20;
};

inline subst::SubstWord algebra_word(const Globals& G, const AlgebraOpts& o, Report& r) {
  subst::SubstParams p;
  p.gamma = subst::parse_gamma(o.gamma);
  p.max_bytes = G.max_bytes;
  r.param("gamma", rat(*p.gamma));
  r.param("levels", std::to_string(o.levels));
  return subst::SubstWord(p, o.levels);
}

inline algebra::Field algebra_field(const AlgebraOpts& o, Report& r) {
  algebra::Field F;
  if (o.prime) {
    if (o.prime < 2 || !boost::multiprecision::miller_rabin_test(BigInt(o.prime), 25))
      throw UsageError("--prime must be prime");
    F.prime = o.prime;
  }
  r.param("field", F.name());
  return F;
}

inline Report algebra_identities(const Globals& G, const AlgebraOpts& o) {
  Report r;
  r.command = "algebra identities";
  auto w = algebra_word(G, o, r);
  auto F = algebra_field(o, r);
  subst::SubstLanguage L(w);
  auto rep = algebra::verify_identities(L, o.d_max, o.triples, o.pairs, G.seed, F);
  r.columns = {"check", "ok", "count"};
  r.row({"T*Tinv=1", rep.t_tinv, 1});
  r.row({"Tinv*T=1", rep.tinv_t, 1});
  r.row({"sum_proj=1", rep.proj_sum, 1});
  r.row({"proj_shift", rep.proj_shift, 2 * o.d_max + 1});
  r.row({"conjugation", rep.conjugation, 2 * o.d_max + 1});
  r.row({"unit_laws", rep.unit_laws, std::min<std::size_t>(o.triples, 100)});
  r.row({"canonical_idempotent", rep.idempotent, std::min<std::size_t>(o.triples, 100)});
  r.row({"associativity", rep.assoc_failed == 0, rep.assoc_checked});
  r.row({"degree_additivity", rep.degree_failed == 0, rep.degree_checked});
  if (!rep.pass()) r.fail({{"first_failure", rep.first_failure.value_or("")}});
  return r;
}

inline Report algebra_witness(const Globals& G, const AlgebraOpts& o) {
  Report r;
  r.command = "algebra witness-product";
  auto w = algebra_word(G, o, r);
  auto F = algebra_field(o, r);
  r.param("n", std::to_string(o.n));
  r.param("count", std::to_string(o.count));
  subst::SubstLanguage L(w);
  std::mt19937_64 rng(G.seed);
  r.columns = {"i", "terms", "k", "alpha_sum", "cond_i", "cond_ii", "cond_iii", "product_ok", "left_index", "right_index"};
  for (std::size_t i = 0; i < o.count; ++i) {
    auto f = algebra::random_w_element(L, rng, o.n, 4, F);
    auto rep = algebra::witness_product(f, o.n, w);
    if (i == 0) {
      r.summary["l"] = rep.l;
      r.summary["W_level"] = rep.W.level;
    }
    if (!rep.pass()) r.fail({{"i", i}, {"element", element_json(f)}});
    r.row({i, f.terms().size(), rep.k, rat(rep.alpha_sum), rep.cond_i, rep.cond_ii, rep.cond_iii, rep.product_ok,
           rep.left_index, rep.right_index});
  }
  return r;
}

inline Report algebra_unit(const Globals& G, const AlgebraOpts& o) {
  Report r;
  r.command = "algebra decompose-identity";
  auto w = algebra_word(G, o, r);
  auto F = algebra_field(o, r);
  r.param("l", std::to_string(o.l));
  subst::SubstLanguage L(w);
  auto rep = algebra::verify_unit_decomposition(L, o.l, std::nullopt, F);
  r.columns = {"quantity", "value"};
  r.row({"N", rep.N});
  r.row({"cylinder_n", rep.W.n});
  r.row({"cylinder_p", rep.W.p});
  r.row({"cylinder_q", rep.W.q});
  r.row({"terms", rep.terms});
  r.row({"term_cap", rep.term_cap});
  r.row({"sum_is_one", rep.sum_is_one});
  r.row({"chains_ok", rep.chains_ok});
  r.row({"split_lengths_ok", rep.split_lengths_ok});
  r.row({"max_left_index", rep.max_left_index});
  r.row({"left_bound", rep.left_bound});
  r.row({"max_right_index", rep.max_right_index});
  r.row({"right_bound", rep.right_bound});
  r.row({"measured_c", rep.measured_c});
  if (!rep.pass()) r.fail({{"u", rep.failing_u ? Json(subst::alphabet().render(*rep.failing_u)) : Json()}});
  return r;
}

inline Report algebra_ret(const Globals& G, const AlgebraOpts& o) {
  Report r;
  r.command = "algebra ret-bracket";
  auto w = algebra_word(G, o, r);
  r.param("n", std::to_string(o.n));
  subst::SubstLanguage L(w);
  auto rep = algebra::ret_bracket_report(L, o.n, G.seed, 20, G.max_bytes);
  r.columns = {"quantity", "value"};
  r.row({"rec", rep.rec});
  r.row({"ret_lower", rep.s_lower});
  r.row({"missing_u", subst::alphabet().render(rep.u)});
  r.row({"v_misses_u", rep.v_misses_u});
  r.row({"vanishing_samples", rep.vanishing_samples});
  r.row({"vanishing_ok", rep.vanishing_ok});
  r.row({"upper_run", rep.upper_run});
  if (!rep.upper_note.empty()) r.row({"upper_note", rep.upper_note});
  r.row({"K", big(rep.K)});
  r.row({"ceil_K_n_gamma", big(rep.ceil_K_n_gamma)});
  if (rep.upper_run) {
    r.row({"c", rep.c});
    r.row({"left_W_index", rep.left_W});
    r.row({"right_W_index", rep.right_W});
    r.row({"left_V_degree", big(rep.left_V)});
    r.row({"left_bound", big(rep.left_bound)});
    r.row({"right_V_degree", big(rep.right_V)});
    r.row({"right_bound", big(rep.right_bound)});
  }
  if (!rep.pass()) r.fail({{"n", o.n}, {"v_misses_u", rep.v_misses_u}, {"vanishing_ok", rep.vanishing_ok}});
  return r;
}

inline Report algebra_dims(const Globals& G, const AlgebraOpts& o) {
  Report r;
  r.command = "algebra dims";
  auto w = algebra_word(G, o, r);
  r.param("n_max", std::to_string(o.n_max));
  subst::SubstLanguage L(w);
  r.columns = {"N", "p_2N_plus_1", "dim_W_N", "ratio_dim_N_over_dim_half"};
  for (const auto& row : algebra::dims_table(L, o.n_max))
    r.row({row.N, row.p, big(row.dim), row.ratio ? Json(rat(*row.ratio)) : Json()});
  return r;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Word and subshift laboratory"};
  app.name("wordlab");
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file with defaults (flags override)");

  Globals G;
  app.add_option("--seed", G.seed, "seed for every randomized choice");
  app.add_option("--max-bytes", G.max_bytes, "memory budget in bytes (>= 64 MiB)")->envname("WORDLAB_MAX_BYTES");
  app.add_option("--format", G.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", G.output, "write the report here instead of stdout");
  app.add_option("--workers", G.workers, "worker threads")->check(CLI::Range(1u, 256u));

  std::function<Report()> action;
  auto on = [&](CLI::App* sub, std::function<Report()> fn) {
    sub->callback([&action, fn] { action = fn; });
  };

  GrowthOpts go;
  auto* growth_cmd = app.add_subcommand("growth", "tabulated growth functions");
  growth_cmd->require_subcommand(1);
  growth_cmd->add_option("--g", go.g, "id, n2 or nlogn")->check(CLI::IsMember({"id", "n2", "square", "nlogn"}));
  growth_cmd->add_option("--n-max", go.n_max, "table length");
  growth_cmd->add_option("--table", go.table, "read f from a file: one value per line or n,value");
  on(growth_cmd->add_subcommand("build", "superlinear f from g. CSV columns: n,g,f,f_prime,omega"),
     [&] { return growth_build(G, go); });
  on(growth_cmd->add_subcommand("check", "monotone and submultiplicative checks. CSV columns: n,f,f_prime,doubling_ratio"),
     [&] { return growth_check(G, go); });

  XkOpts xo;
  auto* xk_cmd = app.add_subcommand("xk", "levels X_k over {0,1,2}");
  xk_cmd->require_subcommand(1);
  xk_cmd->add_option("--r", xo.r, "checkpoint spacing")->check(CLI::Range(1u, 8u));
  xk_cmd->add_option("--levels", xo.levels, "deepest level");
  on(xk_cmd->add_subcommand("build", "level table. CSV columns: k,n_k,s_k,rule,explicit"), [&] { return xk_build(G, xo); });
  auto* xk_cx = xk_cmd->add_subcommand("complexity", "complexity table. CSV columns: n,p,p_prime,bound");
  xk_cx->add_option("--n", xo.n, "range lo..hi");
  on(xk_cx, [&] { return xk_complexity(G, xo); });
  auto* xk_st = xk_cmd->add_subcommand("verify-structure",
                                       "level structure checks. CSV columns: k,count_ok,boundary_ok,extension_ok,pushdown_ok,witness");
  xk_st->add_option("--k", xo.k, "deepest level to check (default: deepest explicit)");
  on(xk_st, [&] { return xk_structure(G, xo); });
  auto* xk_sp = xk_cmd->add_subcommand("verify-spike", "derivative spike at a checkpoint. CSV columns: n,p,p_prime");
  xk_sp->add_option("--l", xo.l, "checkpoint index");
  xk_sp->add_option("--epsilon", xo.epsilon, "exponent as a/b");
  on(xk_sp, [&] { return xk_spike(G, xo); });

  ErgodicOpts eo;
  auto* erg_cmd = app.add_subcommand("ergodic", "strictly ergodic subshift levels W(k)");
  erg_cmd->require_subcommand(1);
  erg_cmd->add_option("--levels", eo.levels, "deepest level K");
  erg_cmd->add_option("--f-table", eo.f_table, "growth table file (default 2^ceil(sqrt n))");
  erg_cmd->add_option("--policy", eo.policy, "lexicographic or random");
  on(erg_cmd->add_subcommand("build", "run log. CSV columns: k,c,W,queue_len,consumed_head,head"),
     [&] { return ergodic_build(G, eo); });
  auto* erg_iv = erg_cmd->add_subcommand("intervals", "frequency intervals of u. CSV columns: n,a_n,b_n,delta_n");
  erg_iv->add_option("--u", eo.u, "word over a..z");
  on(erg_iv, [&] { return ergodic_intervals(G, eo); });
  auto* erg_dc = erg_cmd->add_subcommand("decompose", "block decomposition of a factor. CSV columns: index,part,level,word");
  erg_dc->add_option("--v", eo.v, "factor to decompose")->required();
  on(erg_dc, [&] { return ergodic_decompose(G, eo); });

  SubstOpts so;
  auto* sub_cmd = app.add_subcommand("subst", "substitution words with prescribed recurrence");
  sub_cmd->require_subcommand(1);
  sub_cmd->add_option("--gamma", so.gamma, "exact rational exponent >= 1");
  sub_cmd->add_option("--n-seq", so.n_seq, "explicit n_1,n_2,... instead of gamma");
  sub_cmd->add_option("--levels", so.levels, "deepest level");
  on(sub_cmd->add_subcommand("build", "level sizes. CSV columns: k,n_k,N_k,Ntilde_k"), [&] { return subst_build(G, so); });
  auto* sub_cx = sub_cmd->add_subcommand("complexity", "complexity. CSV columns: n,p,p_prime,p_le_14n,p_ge_n_plus_1");
  sub_cx->add_option("--n", so.n, "range lo..hi");
  on(sub_cx, [&] { return subst_complexity(G, so); });
  auto* sub_dn = sub_cmd->add_subcommand(
      "densities", "letter densities. CSV columns: k,phi_a_alpha,phi_b_alpha,phi_a_beta,phi_b_beta,closed_form");
  sub_dn->add_option("--k", so.k, "deepest level");
  on(sub_dn, [&] { return subst_densities(G, so); });
  auto* sub_rc = sub_cmd->add_subcommand(
      "recurrence",
      "recurrence function. CSV columns: n,rec,lower_bound,upper_bound,upper_ok,host_level,missing_host,missing_window,missing");
  sub_rc->add_option("--n", so.n, "range lo..hi");
  on(sub_rc, [&] { return subst_recurrence(G, so); });
  auto* sub_vf = sub_cmd->add_subcommand("verify", "structural checks. CSV columns: check,k,ok,detail");
  sub_vf->add_option("--k", so.k, "deepest level for the window checks");
  on(sub_vf, [&] { return subst_verify(G, so); });

  AlgebraOpts ao;
  auto* alg_cmd = app.add_subcommand("algebra", "convolution algebra of the substitution subshift");
  alg_cmd->require_subcommand(1);
  alg_cmd->add_option("--gamma", ao.gamma, "exact rational exponent >= 1");
  alg_cmd->add_option("--levels", ao.levels, "deepest substitution level");
  alg_cmd->add_option("--prime", ao.prime, "work over GF(p) instead of Q");
  auto* alg_id = alg_cmd->add_subcommand("identities", "generator relations and random laws. CSV columns: check,ok,count");
  alg_id->add_option("--triples", ao.triples, "random associativity triples");
  alg_id->add_option("--pairs", ao.pairs, "random homogeneous pairs");
  alg_id->add_option("--d-max", ao.d_max, "largest shift in the fixed relations");
  on(alg_id, [&] { return algebra_identities(G, ao); });
  auto* alg_wp = alg_cmd->add_subcommand(
      "witness-product",
      "three-factor witness on random elements of W_n. CSV columns: "
      "i,terms,k,alpha_sum,cond_i,cond_ii,cond_iii,product_ok,left_index,right_index");
  alg_wp->add_option("--n", ao.n, "filtration index");
  alg_wp->add_option("--count", ao.count, "number of random elements");
  on(alg_wp, [&] { return algebra_witness(G, ao); });
  auto* alg_ud = alg_cmd->add_subcommand("decompose-identity", "unit decomposition at level l+1. CSV columns: quantity,value");
  alg_ud->add_option("--l", ao.l, "level");
  on(alg_ud, [&] { return algebra_unit(G, ao); });
  auto* alg_rb = alg_cmd->add_subcommand("ret-bracket", "finite bracket for the return function. CSV columns: quantity,value");
  alg_rb->add_option("--n", ao.n, "argument");
  on(alg_rb, [&] { return algebra_ret(G, ao); });
  auto* alg_dm = alg_cmd->add_subcommand("dims", "filtration dimensions. CSV columns: N,p_2N_plus_1,dim_W_N,ratio_dim_N_over_dim_half");
  alg_dm->add_option("--n-max", ao.n_max, "largest N");
  on(alg_dm, [&] { return algebra_dims(G, ao); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  if (!action) {
    err << app.help();
    return 2;
  }

  try {
    if (G.max_bytes < kMinBytes) throw UsageError("--max-bytes must be at least 64 MiB");
    Report rep = action();
    rep.seed = G.seed;
    rep.params.emplace(rep.params.begin(), "max_bytes", std::to_string(G.max_bytes));
    std::ostringstream buf;
    if (G.format == "json")
      write_json(buf, rep);
    else
      write_csv(buf, rep);
    if (G.output.empty()) {
      out << buf.str();
    } else {
      std::ofstream f(G.output, std::ios::binary);
      if (!f || !(f << buf.str()) || !f.flush()) {
        err << "error: cannot write " << G.output << "\n";
        return 2;
      }
    }
    if (!rep.pass) err << "verification failed: " << rep.witness.dump() << "\n";
    return rep.pass ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace wordlab::cli
