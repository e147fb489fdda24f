#include "wordlab/cli.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

using namespace wordlab;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "wordlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / ("wordlab_test_" + name);
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("subst complexity report obeys the linear bound") {
  auto r = run({"subst", "--gamma", "2", "--levels", "4", "complexity", "--n", "1..200", "--format", "csv"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.rfind("# seed=1\n", 0) == 0);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 200);
  std::uint64_t prev = 1;
  for (const auto& row : rows) {
    auto n = std::stoull(row[0]), p = std::stoull(row[1]);
    REQUIRE(p <= 14 * n);
    REQUIRE(std::stoull(row[2]) == p - prev);
    prev = p;
  }
  // p(n) for small n read off a long prefix
  subst::SubstParams sp;
  sp.gamma = Rational(2);
  subst::SubstWord w(sp, 3);
  const auto& host = w.level(3).ab;
  for (std::size_t n = 1; n <= 20; ++n) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i + n <= host.size(); ++i) seen.insert(host.substr(i, n));
    REQUIRE(std::to_string(seen.size()) == rows[n - 1][1]);
  }
}

TEST_CASE("density and recurrence rows") {
  auto d = run({"subst", "densities"});
  REQUIRE(d.code == 0);
  auto rows = csv_rows(d.out);
  REQUIRE(rows[1][0] == "1");
  REQUIRE(rows[1][1] == "2/3");
  auto rec = run({"subst", "recurrence", "--n", "1"});
  REQUIRE(rec.code == 0);
  rows = csv_rows(rec.out);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0][1] == "4");
}

TEST_CASE("algebra commands pass") {
  auto u = run({"algebra", "decompose-identity", "--gamma", "2", "--l", "0"});
  REQUIRE(u.code == 0);
  REQUIRE(u.out.find("# pass=true") != std::string::npos);
  REQUIRE(run({"algebra", "identities", "--triples", "50", "--pairs", "50"}).code == 0);
  REQUIRE(run({"algebra", "--prime", "7", "identities", "--triples", "20", "--pairs", "20"}).code == 0);
  REQUIRE(run({"algebra", "--prime", "8", "identities"}).code == 2);
  auto dims = run({"algebra", "dims", "--n-max", "2"});
  REQUIRE(dims.code == 0);
  REQUIRE(csv_rows(dims.out)[0][2] == "2");
}

TEST_CASE("json reports carry schema, seed and params") {
  auto r = run({"--format", "json", "--seed", "9", "algebra", "witness-product", "--count", "5"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["schema"] == "wordlab.report/1");
  REQUIRE(j["seed"] == 9);
  REQUIRE(j["params"]["n"] == "3");
  REQUIRE(j["rows"].size() == 5);
  REQUIRE(j["pass"] == true);
  REQUIRE_FALSE(j.contains("witness"));
}

TEST_CASE("identical invocations give identical bytes") {
  std::vector<std::string> args{"--seed", "5", "--format", "json", "algebra", "witness-product", "--count", "6"};
  auto a = run(args), b = run(args);
  REQUIRE(a.out == b.out);
  args[1] = "6";
  REQUIRE(run(args).out != a.out);
  auto e1 = run({"--seed", "3", "ergodic", "--levels", "5", "--policy", "random", "build"});
  auto e2 = run({"--seed", "3", "ergodic", "--levels", "5", "--policy", "random", "build"});
  REQUIRE(e1.code == 0);
  REQUIRE(e1.out == e2.out);
}

TEST_CASE("verification failure exits 1 with a witness") {
  auto table = temp_file("bad_table.txt", "1\n3\n2\n4\n");
  auto r = run({"--format", "json", "growth", "--table", table.string(), "check"});
  REQUIRE(r.code == 1);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["pass"] == false);
  REQUIRE(j["witness"]["nondecreasing"] == false);
  auto csv = run({"growth", "--table", table.string(), "check"});
  REQUIRE(csv.code == 1);
  REQUIRE(csv.out.find("# witness=") != std::string::npos);
}

TEST_CASE("usage and resource errors exit 2") {
  auto r = run({"subst", "--no-such-flag", "build"});
  REQUIRE(r.code == 2);
  REQUIRE(r.err.find("Usage") != std::string::npos);
  REQUIRE(run({"subst"}).code == 2);
  REQUIRE(run({"--max-bytes", "1000", "subst", "build"}).code == 2);
  REQUIRE(run({"--format", "xml", "subst", "build"}).code == 2);
  REQUIRE(run({"subst", "--gamma", "sqrt(2)", "build"}).code == 2);
  REQUIRE(run({"subst", "complexity", "--n", "5..2"}).code == 2);
  REQUIRE(run({"--output", "/nonexistent/dir/report.csv", "subst", "build"}).code == 2);
  REQUIRE(run({"ergodic", "--levels", "4", "decompose", "--v", "zzzz"}).code == 2);
  REQUIRE(run({"--max-bytes", "67108864", "subst", "--levels", "6", "build"}).code == 2);
}

TEST_CASE("budget from the environment") {
  ::setenv("WORDLAB_MAX_BYTES", "1024", 1);
  auto low = run({"subst", "build"});
  ::unsetenv("WORDLAB_MAX_BYTES");
  REQUIRE(low.code == 2);
  REQUIRE(low.err.find("64 MiB") != std::string::npos);
  ::setenv("WORDLAB_MAX_BYTES", "134217728", 1);
  auto ok = run({"subst", "build"});
  ::unsetenv("WORDLAB_MAX_BYTES");
  REQUIRE(ok.code == 0);
  REQUIRE(ok.out.find("# max_bytes=134217728") != std::string::npos);
}

TEST_CASE("config file supplies defaults and flags override") {
  auto cfg = temp_file("cfg.ini", "seed=7\nformat=json\n");
  auto r = run({"--config", cfg.string(), "subst", "build"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["seed"] == 7);
  auto o = run({"--config", cfg.string(), "--seed", "8", "--format", "csv", "subst", "build"});
  REQUIRE(o.out.rfind("# seed=8\n", 0) == 0);
}

TEST_CASE("output file") {
  auto path = std::filesystem::temp_directory_path() / "wordlab_test_out.csv";
  auto r = run({"--output", path.string(), "subst", "build"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.empty());
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  REQUIRE(first == "# seed=1");
}

TEST_CASE("other families run") {
  REQUIRE(run({"growth", "--n-max", "4096", "build"}).code == 0);
  // n log n with f(1) = 1 breaks f(2) <= f(1)^2
  REQUIRE(run({"growth", "--g", "nlogn", "--n-max", "200", "check"}).code == 1);
  std::string succ;
  for (int n = 1; n <= 300; ++n) succ += std::to_string(n + 1) + "\n";
  REQUIRE(run({"growth", "--table", temp_file("succ.txt", succ).string(), "check"}).code == 0);
  auto xb = run({"xk", "--levels", "5", "build"});
  REQUIRE(xb.code == 0);
  REQUIRE(csv_rows(xb.out)[1][2] == "4");
  REQUIRE(run({"xk", "--levels", "6", "complexity", "--n", "1..30"}).code == 0);
  REQUIRE(run({"xk", "--levels", "6", "verify-structure", "--k", "5"}).code == 0);
  auto iv = run({"ergodic", "intervals", "--u", "ab"});
  REQUIRE(iv.code == 0);
  REQUIRE(csv_rows(iv.out).size() == 9);
  auto dc = run({"ergodic", "--levels", "5", "decompose", "--v", "aab"});
  REQUIRE(dc.code == 0);
  REQUIRE(run({"subst", "--levels", "3", "verify", "--k", "2"}).code == 0);
  REQUIRE(run({"subst", "--n-seq", "3,2", "--levels", "2", "build"}).code == 0);
}

TEST_CASE("installed binary exit codes") {
  const char* bin = std::getenv("WORDLAB_BIN");
  if (!bin) SKIP("WORDLAB_BIN not set");
  auto status = [&](const std::string& args) {
    int s = std::system((std::string(bin) + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  REQUIRE(status("subst build") == 0);
  REQUIRE(status("--bogus subst build") == 2);
  auto table = temp_file("bad_table2.txt", "1\n3\n2\n4\n");
  REQUIRE(status("growth --table " + table.string() + " check") == 1);
}

TEST_CASE("derivative spike example") {
  auto r = run({"--format", "json", "xk", "--r", "2", "verify-spike", "--l", "1", "--epsilon", "1/2"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  auto m = j["summary"]["m"].get<std::uint64_t>();
  REQUIRE(m >= 82);
  REQUIRE(m <= 162);
  REQUIRE(3 * j["summary"]["p_prime_m"].get<std::uint64_t>() >= 65536);
}
