#include <cstdlib>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "json.hpp"
#include "lmirep/set_io.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kCli = LMIREP_CLI;
const std::string kData = LMIREP_DATA;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lmirep_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = kCli + " " + args + " > " + (dir_ / "stdout.txt").string() + " 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string data(const std::string& name) const { return kData + "/" + name; }
  json load(const std::string& name) const { return json::parse(lmirep::read_text_file(path(name))); }
  std::string stdout_text() const { return lmirep::read_text_file(dir_ / "stdout.txt"); }

  fs::path dir_;
};

TEST_F(Cli, PipelineDiskPassesAtOrderOne) {
  ASSERT_EQ(run("pipeline " + data("disk.sas") + " --json " + path("r.json") + " -o " + path("rep.json")), 0)
      << stdout_text();
  const json r = load("r.json");
  EXPECT_EQ(r["pipeline"]["verdict"], "PASS");
  EXPECT_EQ(r["pipeline"]["order"], 1);
  EXPECT_EQ(r["pipeline"]["route"], "sos-concave");
  EXPECT_EQ(r["provenance"]["seed"], 1);
  EXPECT_EQ(r["provenance"]["inputs"][0]["sha256"].get<std::string>().size(), 64u);
  EXPECT_TRUE(load("rep.json")["metadata"].contains("provenance"));
}

TEST_F(Cli, PipelineTvScreenPassesAtOrderTwo) {
  ASSERT_EQ(run("pipeline " + data("tvscreen.sas") + " --json " + path("r.json")), 0) << stdout_text();
  const json r = load("r.json");
  EXPECT_EQ(r["pipeline"]["order"], 2);
  EXPECT_EQ(r["pipeline"]["route"], "sos-concave");
}

TEST_F(Cli, VerifyMismatchedPairExitsOne) {
  ASSERT_EQ(run("build-moment " + data("disk.sas") + " -o " + path("disk.json")), 0) << stdout_text();
  EXPECT_EQ(run("verify " + path("disk.json") + " " + data("square.sas") + " --directions 16"), 1) << stdout_text();
  EXPECT_EQ(run("verify " + path("disk.json") + " " + data("disk.sas") + " --directions 16 --csv " + path("g.csv")), 0);
  EXPECT_TRUE(fs::exists(path("g.csv")));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run(""), 64);
  EXPECT_EQ(run("verify"), 64);
  EXPECT_EQ(run("pipeline " + data("disk.sas") + " --mode bogus"), 64);
  EXPECT_EQ(run("certify " + path("missing.sas")), 66);
  lmirep::write_text_file(path("bad.sas"), "vars 2\nset a:\n  ineq 1 - x3\n");
  EXPECT_EQ(run("certify " + path("bad.sas")), 65);
  EXPECT_NE(stdout_text().find("line 3"), std::string::npos);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, RerunsAreByteIdenticalExceptTimestamp) {
  for (const char* tag : {"a", "b"}) {
    ASSERT_EQ(run("pipeline " + data("disk.sas") + " --directions 16 --seed 7 --json " + path(std::string(tag) + ".json") +
                  " -o " + path(std::string(tag) + "_rep.json")),
              0);
  }
  for (const char* stem : {"", "_rep"}) {
    json a = load(std::string("a") + stem + ".json");
    json b = load(std::string("b") + stem + ".json");
    const json::json_pointer at(stem[0] ? "/metadata/provenance" : "/provenance");
    EXPECT_EQ(a[at]["output_sha256"], b[at]["output_sha256"]);
    EXPECT_EQ(a[at]["seed"], 7);
    a[at].erase("timestamp");
    b[at].erase("timestamp");
    EXPECT_EQ(a.dump(), b.dump());
  }
}

TEST_F(Cli, LocalizeAutoPatchesVerify) {
  ASSERT_EQ(run("localize " + data("disk.sas") + " --centers auto:8 --delta auto --order 1 -o " + path("loc.json")), 0)
      << stdout_text();
  const json rep = load("loc.json");
  EXPECT_EQ(rep["metadata"]["cover"]["patches"].size(), 8u);
  EXPECT_EQ(rep["metadata"]["cover"]["provenance"], "auto");
  EXPECT_EQ(run("verify " + path("loc.json") + " " + data("disk.sas") + " --emit-plots " + path("plots")), 0)
      << stdout_text();
  EXPECT_TRUE(fs::exists(path("plots/gaps.csv")));
}

TEST_F(Cli, LocalizeManualCenters) {
  lmirep::write_text_file(path("c.txt"), "# one center\n0, 0\n");
  ASSERT_EQ(run("localize " + data("disk.sas") + " --centers " + path("c.txt") + " --delta 2 -o " + path("loc.json")), 0)
      << stdout_text();
  EXPECT_EQ(load("loc.json")["metadata"]["cover"]["provenance"], "manual");
  EXPECT_EQ(run("localize " + data("disk.sas") + " --centers auto:x -o " + path("x.json")), 64);
}

TEST_F(Cli, CertifyReportsAndProbes) {
  EXPECT_EQ(run("certify " + data("tangent_circle.sas") + " --json " + path("c.json") + " --emit-plots " + path("p")), 2);
  EXPECT_NE(stdout_text().find("REDUNDANT-SUSPECT"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("p/eigenvalues.csv")));
  EXPECT_EQ(run("certify " + data("disk.sas") + " --pdlh 1,0 --pdlh-delta 0.3 --json " + path("d.json")), 0);
  EXPECT_EQ(load("d.json")["pdlh"]["verdict"], "PROBE-PASS");
}

TEST_F(Cli, UnionOfRepresentations) {
  ASSERT_EQ(run("build-moment " + data("disk.sas") + " -o " + path("a.json")), 0);
  ASSERT_EQ(run("union " + path("a.json") + " " + path("a.json") + " -o " + path("u.json")), 0) << stdout_text();
  EXPECT_EQ(run("verify " + path("u.json") + " " + data("disk.sas") + " --directions 8"), 0) << stdout_text();
  ASSERT_EQ(run("build-moment " + data("two_disks.sas") + " -o " + path("two.json")), 0);
  EXPECT_EQ(run("verify " + path("two.json") + " " + data("two_disks.sas") + " --directions 16"), 0) << stdout_text();
}

}  // namespace
