#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bnf/builders.hpp"
#include "bnf/classify.hpp"
#include "bnf/game.hpp"
#include "bnf/json.hpp"
#include "bnf/random.hpp"

using namespace bnf;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
};

Invocation run(const std::string& args) {
  const std::string cmd = std::string(BNF_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  Invocation r;
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / ("bnf_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    auto path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }

  std::filesystem::path dir_;
};

std::string join(const ElementTuple& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s;
}

}  // namespace

TEST_F(CliTest, ChainExamples) {
  const std::string c2 = write("c2.struct", serialize_structure(build_linear_order(2)));
  const std::string c3 = write("c3.struct", serialize_structure(build_linear_order(3)));
  Invocation r = run("bf --left " + c3 + " --right " + c2 + " --n 1");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "holds\n");
  r = run("bf --left " + c2 + " --right " + c3 + " --n 1");
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, ClassifyJson) {
  const std::string f = write("f.fml", "(forall (x) (exists (y) (rel R x y)))");
  Invocation r = run("classify --formula " + f + " --json");
  ASSERT_EQ(r.code, 0);
  const ComplexityReport rep = report_from_json(Json::parse(r.out));
  EXPECT_EQ(rep, classify(parse_formula("(forall (x) (exists (y) (rel R x y)))")));
}

TEST_F(CliTest, ExitCodesMatchVerdicts) {
  Rng rng(3);
  const char* dirs[] = {"leq", "geq", "equiv"};
  for (int i = 0; i < 100; ++i) {
    Structure l = random_structure(rng, binary_signature(), 1 + uniform_index(rng, 3), 0.4);
    Structure r = random_structure(rng, binary_signature(), 1 + uniform_index(rng, 3), 0.4);
    const std::size_t len = uniform_index(rng, 2);
    ElementTuple a = random_tuple(rng, l, len), b = random_tuple(rng, r, len);
    const int n = static_cast<int>(uniform_index(rng, 3));
    const std::string dir = dirs[i % 3];
    const std::string lf = write("l.struct", serialize_structure(l)), rf = write("r.struct", serialize_structure(r));
    Invocation out = run("bf --json --left " + lf + " --right " + rf + " --n " + std::to_string(n) + " --direction " + dir +
                  " --left-tuple '" + join(a) + "' --right-tuple '" + join(b) + "'");
    Position pos(l, a, r, b, n);
    const bool expected = dir == "leq" ? bf_leq(pos).holds : dir == "geq" ? bf_geq(pos).holds : bf_equiv(pos).holds;
    ASSERT_EQ(out.code, expected ? 0 : 1) << out.out;
    Json j = Json::parse(out.out);
    EXPECT_EQ(j["holds"].get<bool>(), expected);
    EXPECT_EQ(Json::parse(j.dump()), j);
  }
}

TEST_F(CliTest, Errors) {
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("bf --left missing.struct --right chain:2 --n 1").code, 2);
  const std::string bad = write("bad.struct", "signature R/2\nuniverse 2\nrel R: (0,7)\n");
  EXPECT_EQ(run("bf --left " + bad + " --right chain:2 --n 1").code, 2);
  EXPECT_EQ(run("classify --formula '(rel R x'").code, 2);
  EXPECT_EQ(run("verify --suite nope").code, 2);
}

TEST_F(CliTest, VerifyIsDeterministic) {
  Invocation a = run("verify --suite karp --seed 7 --json");
  Invocation b = run("verify --suite karp --seed 7 --json");
  ASSERT_EQ(a.code, 0);
  Json ja = Json::parse(a.out), jb = Json::parse(b.out);
  EXPECT_EQ(ja["suites"][0]["checked"], jb["suites"][0]["checked"]);
  EXPECT_EQ(ja["suites"][0]["detail"], jb["suites"][0]["detail"]);
}
