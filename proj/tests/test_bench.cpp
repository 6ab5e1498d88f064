#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "util.hpp"

namespace nsbtune {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  CliRun r;
  std::string cmd = std::string(NSBTUNE_CLI) + " " + args + " 2>&1";
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
  int status = pclose(f);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("nsbtune_test_" + std::to_string(getpid()));
  fs::create_directories(dir);
  return dir / name;
}

fs::path write(const std::string& name, const std::string& text) {
  fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Corpus, SixCases) {
  ASSERT_EQ(corpus().size(), 6u);
  for (const BenchmarkCase& c : corpus()) {
    Program p = parse(c.source);
    EXPECT_TRUE(p.requirement(c.target).has_value()) << c.name;
  }
  EXPECT_THROW(find_case("nope"), Error);
}

TEST(Grid, Expansion) {
  BenchOptions o;
  o.cases = {"pid", "trapezoid"};
  o.requirements = {8, 16};
  o.uniform_both = true;
  EXPECT_EQ(expand_grid(o).size(), 2u * 2 * 2 * 2);
  o.cases.clear();
  o.uniform_both = false;
  EXPECT_EQ(expand_grid(o).size(), 6u * 2 * 2);
}

TEST(Bench, DeterministicAndConsistent) {
  BenchOptions o;
  o.cases = {"pid", "accelerometer"};
  o.requirements = {8, 16};
  o.uniform_both = true;
  o.trials = 20;
  o.jobs = 3;
  auto a = run_bench(o);
  o.jobs = 1;
  auto b = run_bench(o);
  EXPECT_EQ(bench_csv(a), bench_csv(b));
  EXPECT_EQ(bench_markdown(a), bench_markdown(b));
  for (const JobResult& r : a) {
    ASSERT_TRUE(r.ok()) << r.status;
    ASSERT_TRUE(r.validation.has_value());
    EXPECT_TRUE(r.validation->pass) << r.job.case_name << " " << r.job.requirement;
    Program p = parse(find_case(r.job.case_name).source);
    p.set_requirement(find_case(r.job.case_name).target, r.job.requirement);
    Summary s = summarize(tuning_from_json(r.tuning_json), p);
    EXPECT_EQ(s.counts.count, r.summary.counts.count);
    EXPECT_EQ(s.counts.mp, r.tune->stats.mp);
    EXPECT_DOUBLE_EQ(s.savings.var_savings_pct, r.summary.savings.var_savings_pct);
    EXPECT_DOUBLE_EQ(s.savings.op_savings_pct, r.summary.savings.op_savings_pct);
  }
}

TEST(Bench, CsvShape) {
  BenchOptions o;
  o.cases = {"trapezoid"};
  o.requirements = {8};
  o.modes = {Mode::Pi};
  o.trials = 5;
  std::string csv = bench_csv(run_bench(o));
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header.rfind("program,requirement,mode,objective,mp,fp16,fp32,fp64,fp128,", 0), 0u);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
  EXPECT_EQ(row.rfind("trapezoid,8,pi,sum,", 0), 0u);
}

TEST(Bench, FixedSlackIsUsed) {
  BenchOptions o;
  o.cases = {"pid"};
  o.requirements = {12};
  o.modes = {Mode::Pi};
  o.loop_slack = 4;
  o.validate = false;
  auto r = run_bench(o);
  ASSERT_TRUE(r[0].ok());
  EXPECT_EQ(r[0].loop_slack, 4);
  EXPECT_FALSE(r[0].validation.has_value());
}

TEST(Cli, TunePidAnnotated) {
  fs::path src = write("pid.pop", find_case("pid").source);
  CliRun r = cli("tune " + src.string() + " --objective minmax --mode pi --loop-slack 2");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("require_nsb(m1, 12);"), std::string::npos);
  EXPECT_NE(r.out.find("m1|"), std::string::npos);
  EXPECT_NE(r.out.find("mp=16"), std::string::npos) << r.out;
}

TEST(Cli, TuneJson) {
  fs::path src = write("pid.pop", find_case("pid").source);
  fs::path out = scratch("pid.json");
  CliRun r = cli("tune " + src.string() + " --loop-slack 2 --emit json --json-out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(j.at("mp").get<int>(), 16);
  EXPECT_EQ(j.at("labels").size(), test::pid().tuned_labels().size());
}

TEST(Cli, CycleExitsTwo) {
  fs::path src = write("pid.pop", find_case("pid").source);
  CliRun r = cli("tune " + src.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("cycle"), std::string::npos) << r.out;
}

TEST(Cli, InputErrorsExitOne) {
  EXPECT_EQ(cli("tune " + write("bad.pop", "x = ;").string()).code, 1);
  EXPECT_EQ(cli("tune /nonexistent/file.pop").code, 1);
  CliRun r = cli("bench --cases \"\" --out " + scratch("empty").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("Usage"), std::string::npos) << r.out;
}

TEST(Cli, ValidateRoundTrip) {
  fs::path src = write("pid.pop", find_case("pid").source);
  fs::path good = scratch("good.json");
  ASSERT_EQ(cli("tune " + src.string() + " --loop-slack 2 --json-out " + good.string()).code, 0);
  EXPECT_EQ(cli("validate " + src.string() + " --tuning " + good.string() + " --require m1:12").code,
            0);
  auto j = nlohmann::json::parse(slurp(good));
  for (auto& l : j["labels"]) l["nsb"] = l["nsb"].get<int>() / 2;
  fs::path bad = write("bad.json", j.dump());
  EXPECT_EQ(cli("validate " + src.string() + " --tuning " + bad.string() + " --require m1:12").code,
            3);
}

TEST(Cli, BenchWritesArtifacts) {
  fs::path out = scratch("bench");
  CliRun r = cli("bench --cases trapezoid --requirements 8 --modes pi --trials 10 --out " +
              out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(out / "bench.csv"));
  EXPECT_TRUE(fs::exists(out / "report.md"));
  EXPECT_FALSE(fs::is_empty(out / "tunings"));
}

}  // namespace
}  // namespace nsbtune
