#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "projprime/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "projprime");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  Result r;
  r.code = projprime::cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

std::string config_of(const std::string& out) {
  const auto at = out.find("config=");
  return at == std::string::npos ? "" : out.substr(at + 7, 16);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "projprime_cli_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  fs::remove(p.string() + ".hits");
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("isprime") {
  Result r = run({"isprime", "8191"});
  CHECK(r.code == 0);
  CHECK(r.out == "prime (4 digits)\n");
  r = run({"isprime", "2047"});
  CHECK(contains(r.out, "composite"));
  CHECK(contains(r.out, "factor 23"));
  r = run({"isprime", "-"}, "  31\n");
  CHECK(r.out == "prime (2 digits)\n");
  r = run({"isprime", "2^31"});
  CHECK(contains(r.out, "composite"));
  r = run({"--format", "json", "isprime", "2047"});
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "composite");
  CHECK(j["witness"] == "23");
  r = run({"--format", "csv", "isprime", "8191"});
  CHECK(r.out.rfind("digits,verdict,", 0) == 0);
}

TEST_CASE("repunit piped into isprime") {
  const Result rep = run({"repunit", "1201", "1999"});
  REQUIRE(rep.code == 0);
  CHECK(rep.out.size() == 6154);
  const Result r = run({"--rounds", "3", "isprime", "-"}, rep.out);
  CHECK(r.code == 0);
  CHECK(r.out == "probable prime (6153 digits, 3 rounds)\n");
}

TEST_CASE("search-fixed-n summary") {
  Result r = run({"--quiet", "search-fixed-n", "--n", "3", "--p-max", "1e4"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "3 | 117 | 9803"));
  CHECK(contains(r.out, "hits=117 max_p=9803 primes=1229"));
  CHECK(r.err.empty());

  r = run({"--format", "json", "--quiet", "search-fixed-n", "--n", "3", "--p-max", "1000"});
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["hits"] == 23);
  CHECK(j["max_p"] == 911);
  CHECK(j["primes"] == 168);
  CHECK(j["complete"] == true);

  r = run({"--format", "csv", "--quiet", "search-fixed-n", "--n", "3", "--p-max", "1000"});
  CHECK(contains(r.out, "n,p_max,primes,hits,max_p,complete\n3,1000,168,23,911,1\n"));
}

TEST_CASE("exit codes") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({}).code == 64);
  CHECK(run({"bogus"}).code == 64);
  CHECK(run({"search-fixed-n", "--n", "3"}).code == 64);
  CHECK(run({"--format", "xml", "isprime", "7"}).code == 64);
  CHECK(run({"isprime", "abc"}).code == 2);
  CHECK(run({"estimate", "--formula", "fixed-n", "--n", "4", "--x", "100"}).code == 2);
  CHECK(run({"--quiet", "search-fixed-n", "--n", "9", "--p-max", "100"}).code == 2);

  const fs::path ck = scratch("bad.ckpt");
  std::ofstream(ck) << "garbage\n";
  const Result r = run({"--quiet", "search-fixed-n", "--n", "3", "--p-max", "1000", "--checkpoint", ck.string()});
  CHECK(r.code == 3);
  CHECK(contains(r.err, "projprime: integrity error:"));
}

TEST_CASE("config digest") {
  const std::vector<std::string> a{"--quiet", "search-fixed-n", "--n", "3", "--p-max", "1000"};
  const std::string c1 = config_of(run(a).out);
  CHECK(c1.size() == 16);
  CHECK(config_of(run(a).out) == c1);
  // Output location and worker count do not change the result.
  CHECK(config_of(run({"--workers", "3", "--quiet", "search-fixed-n", "--n", "3", "--p-max", "1000"}).out) == c1);
  CHECK(config_of(run({"--quiet", "search-fixed-n", "--p-max", "1000", "--n", "3"}).out) == c1);
  CHECK(config_of(run({"--quiet", "search-fixed-n", "--n", "5", "--p-max", "1000"}).out) != c1);
  CHECK(config_of(run({"--seed", "7", "--quiet", "search-fixed-n", "--n", "3", "--p-max", "1000"}).out) != c1);
}

TEST_CASE("config files") {
  const fs::path cfg = scratch("saved.ini");
  const Result first = run({"--rounds", "20", "--save-config", cfg.string(), "--quiet", "search-fixed-n", "--n", "5",
                            "--p-max", "2000"});
  REQUIRE(first.code == 0);
  REQUIRE(fs::exists(cfg));
  const Result again = run({"--config", cfg.string(), "--quiet", "search-fixed-n"});
  CHECK(again.code == 0);
  CHECK(again.out == first.out);
}

TEST_CASE("worker count from the environment") {
  ::setenv("PROJPRIME_WORKERS", "2", 1);
  const Result r = run({"--quiet", "search-fixed-n", "--n", "3", "--p-max", "1e4"});
  ::unsetenv("PROJPRIME_WORKERS");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "hits=117"));
  ::setenv("PROJPRIME_WORKERS", "zero", 1);
  CHECK(run({"--quiet", "search-fixed-n", "--n", "3", "--p-max", "100"}).code == 64);
  ::unsetenv("PROJPRIME_WORKERS");
}

TEST_CASE("output file") {
  const fs::path out = scratch("out.csv");
  const Result r = run({"--format", "csv", "--out", out.string(), "--quiet", "search-fixed-n", "--n", "3", "--p-max",
                        "1000"});
  CHECK(r.code == 0);
  std::ifstream f(out);
  std::stringstream s;
  s << f.rdbuf();
  CHECK(contains(s.str(), "3,1000,168,23,911,1"));
}

TEST_CASE("checkpointed search resumes") {
  const fs::path ck = scratch("cli.ckpt");
  const std::vector<std::string> base{"--quiet", "search-fixed-n", "--n", "3", "--p-max", "50000",
                                      "--segment-size", "5000", "--checkpoint", ck.string()};
  std::vector<std::string> part = base;
  part.insert(part.end(), {"--stop-after", "4"});
  CHECK(run(part).code == 0);
  const Result done = run(base);
  CHECK(done.code == 0);
  const Result fresh = run({"--quiet", "search-fixed-n", "--n", "3", "--p-max", "50000", "--segment-size", "5000"});
  CHECK(done.out == fresh.out);
  CHECK(fs::exists(ck.string() + ".hits"));
}

TEST_CASE("other subcommands") {
  Result r = run({"repunit", "2", "5"});
  CHECK(r.out == "31\n");
  r = run({"--quiet", "collisions", "--m-max", "1e4", "--domain", "all-integers"});
  CHECK(contains(r.out, "31 = R(2,5) = R(5,3)"));
  CHECK(contains(r.out, "8191 = R(2,13) = R(90,3)"));
  r = run({"bunyakovsky", "--coeffs", "2520,0,0,-1,0,0,0,0,0,1"});
  CHECK(contains(r.out, "fixed_divisor=504"));
  r = run({"--quiet", "bunyakovsky", "--coeffs", "1,1,1", "--count-to", "1e6", "--domain", "primes"});
  CHECK(contains(r.out, "4684"));
  r = run({"--quiet", "search-fixed-p", "--p", "7", "--n-max", "200"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "131"));
  r = run({"--quiet", "search-prime-powers", "--q-max", "2^60", "--p", "2", "--include-n2"});
  CHECK(contains(r.out, "59"));
  r = run({"estimate", "--formula", "c-n", "--n", "3"});
  CHECK(contains(r.out, "1.875"));

  const fs::path pts = scratch("pts.csv");
  std::ofstream(pts) << "x,y\n1e10,15801827\n2e10,29684763\n3e10,42963858\n";
  r = run({"--format", "json", "fit", "--input", pts.string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.contains("alpha"));
  CHECK(run({"fit", "--input", scratch("missing.csv").string()}).code != 0);
}

}  // TEST_SUITE
