#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vexlab/harness.hpp"

using namespace vexlab;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vexlab");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

Json json_of(const CliRun& r) { return Json::parse(r.out); }

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("vexlab_test_" + name);
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(VEXLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(ExponentText, Grammar) {
  const auto c = exponent_spec_from_text("const:2.5", 2);
  EXPECT_EQ(c["family"], "constant");
  EXPECT_EQ(c["dimension"], 2);
  const auto l = exponent_spec_from_text("lerner:a=0.1,b=0.05", 1);
  EXPECT_EQ(exponent_from_spec(l).spec(), make_lerner(0.1, 0.05).spec());
  EXPECT_EQ(exponent_from_spec(exponent_spec_from_text("lerner:alpha=0.1,beta=0.05", 1)).spec(),
            make_lerner(0.1, 0.05).spec());
  for (const char* bad : {"", "const:", "const:abc", "lerner:a=0.1", "lerner:a=0.1,b=0.05,c=1", "nope:1",
                          "file:/nonexistent/vexlab.json"})
    EXPECT_THROW(exponent_from_spec(exponent_spec_from_text(bad, 1)), SpecError) << bad;
  EXPECT_THROW(exponent_from_spec(exponent_spec_from_text("const:1", 1)), SpecError);
}

TEST(ExponentText, FileSpec) {
  const auto path = temp_path("exponent.json");
  std::ofstream(path) << make_piecewise({0.0}, {2.0, 3.0}).spec().dump();
  const auto p = exponent_from_spec(exponent_spec_from_text("file:" + path.string(), 1));
  EXPECT_EQ(p({-1.0}), 2.0);
  EXPECT_EQ(p({1.0}), 3.0);
}

TEST(ParseJob, NormalizesDefaults) {
  std::ostringstream help;
  const auto job = parse_job({"vexlab", "norm", "-p", "const:2", "-f", "indicator(0,4)", "-g", "-8:8:4096"}, help);
  ASSERT_TRUE(job);
  EXPECT_EQ(job->command, "norm");
  EXPECT_EQ(job->dimension, 1);
  EXPECT_EQ(job->seed, 1u);
  EXPECT_EQ(job->options["tol"], 1e-10);
  EXPECT_EQ(JobSpec::from_json(job->to_json()).to_json(), job->to_json());

  const auto osc = parse_job({"vexlab", "oscsup", "-f", "loglog(r)", "--samples", "50"}, help);
  ASSERT_TRUE(osc);
  EXPECT_EQ(osc->options["search"]["samples_per_decade"], 50);
  EXPECT_EQ(osc->options["search"]["side_range"][0], 1e-6);

  EXPECT_FALSE(parse_job({"vexlab", "--help"}, help));
  EXPECT_NE(help.str().find("decompose"), std::string::npos);
}

TEST(Cli, NormReport) {
  const auto r = cli({"norm", "-p", "const:2", "-f", "indicator(0,4)", "-g", "-8:8:4096"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json_of(r);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["tool"], "vexlab");
  EXPECT_NEAR(j["result"]["norm"].get<double>(), 2.0, 1e-6);
  EXPECT_TRUE(j.contains("wall_clock_seconds"));
}

TEST(Cli, ExitCodesForBadInput) {
  for (const std::vector<std::string>& args : std::vector<std::vector<std::string>>{
           {},
           {"frobnicate"},
           {"norm", "-p", "const:1", "-f", "x", "-g", "0:1:8"},
           {"norm", "-p", "lerner:a=0.05,b=0.1", "-f", "x", "-g", "0:1:8"},
           {"norm", "-p", "const:2", "-f", "x", "-g", "0:1"},
           {"norm", "-p", "const:2", "-f", "x +", "-g", "0:1:8"},
           {"norm", "-p", "const:2", "-g", "0:1:8"},
           {"norm", "-p", "const:2", "-f", "x2", "-g", "0:1:8"},
           {"norm", "-p", "const:2", "-f", "x", "-g", "0:1:8", "--format", "csv"},
           {"modular", "-p", "const:2", "-f", "x", "-g", "0:1:8", "--lambda", "0"},
           {"maximal", "-f", "x", "-g", "0:1:8", "--scales", "some"},
           {"decompose", "-p", "const:3", "--strategy", "manual", "--p0", "4"},
           {"decompose", "-p", "const:3", "--strategy", "manual", "--p0", "2", "--theta", "0.9"},
           {"decompose", "-p", "const:3", "--strategy", "rs", "--theta", "0.5"},
           {"probe", "-p", "const:2", "-g", "0:1:8", "--kinds", "steps"},
           {"classify", "-p", "const:2", "--p-inf", "abc"},
           {"norm", "-p", "const:2", "-f", "log(x)", "-g", "-1:1:8"},
       }) {
    const auto r = cli(args);
    EXPECT_EQ(r.code, 2) << ::testing::PrintToString(args) << " " << r.err;
    EXPECT_NE(r.err.find("vexlab: "), std::string::npos);
  }
  const auto r = cli({"norm", "-p", "const:1", "-f", "x", "-g", "0:1:8"});
  EXPECT_NE(r.err.find("p_- must exceed 1"), std::string::npos) << r.err;
  const auto l = cli({"norm", "-p", "lerner:a=0.05,b=0.1", "-f", "x", "-g", "0:1:8"});
  EXPECT_NE(l.err.find("0<β<α"), std::string::npos) << l.err;
}

TEST(Cli, CheckFailuresExitOne) {
  const auto osc = cli({"oscsup", "-f", "x", "--samples", "100", "--assert-finite"});
  EXPECT_EQ(osc.code, 1);
  EXPECT_TRUE(json_of(osc)["result"]["divergent"].get<bool>());
  EXPECT_EQ(cli({"oscsup", "-f", "x", "--samples", "100"}).code, 0);

  const auto inf = cli({"classify", "-p", "lerner:a=0.1,b=0.05", "--diagnostics", "infinity", "--p-inf", "2.1",
                        "--loglog-radii", "7.853981634,14.13716694,20.42035225,26.70353756,32.98672286,39.26990817",
                        "--assert-finite"});
  EXPECT_EQ(inf.code, 1) << inf.err;
  EXPECT_TRUE(json_of(inf)["result"]["infinity"]["divergent"].get<bool>());

  const auto dec = cli({"decompose", "-p", "const:3", "--strategy", "manual", "--p0", "4", "--theta", "0.5"});
  EXPECT_EQ(dec.code, 0) << dec.err;
  EXPECT_TRUE(json_of(dec)["result"]["pass"].get<bool>());
}

TEST(Cli, CsvOutput) {
  const auto r = cli({"maximal", "-f", "indicator(0,1)", "-g", "-2:2:8", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "x1,value");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 9);
}

TEST(Cli, PayloadIsDeterministic) {
  const std::vector<std::vector<std::string>> jobs{
      {"norm", "-p", "lerner:a=0.1,b=0.05", "-f", "exp(-x^2)", "-g", "-8:8:1024"},
      {"maximal", "-p", "const:2", "-f", "indicator(0,1)", "-g", "-4:4:64", "--scales", "all"},
      {"oscsup", "-f", "loglog(r)", "--samples", "100"},
      {"classify", "-p", "lerner:a=0.1,b=0.05", "--pairs", "200", "--samples", "2000"},
      {"decompose", "-p", "lerner:a=0.1,b=0.05", "--strategy", "lerner", "--samples", "1000", "--pairs", "1000"},
      {"probe", "-p", "const:2", "-g", "-4:4:256", "--count", "5"},
  };
  for (const auto& args : jobs) {
    std::ostringstream help;
    std::vector<std::string> full{"vexlab"};
    full.insert(full.end(), args.begin(), args.end());
    const auto job = parse_job(full, help);
    ASSERT_TRUE(job);
    const auto a = run_job(*job), b = run_job(*job);
    EXPECT_EQ(a.report.payload().dump(), b.report.payload().dump()) << args[0];
    EXPECT_FALSE(a.report.payload().contains("wall_clock_seconds"));
  }
}

TEST(Cli, JobFileRoundTrip) {
  const auto report = temp_path("report.json");
  const auto jobfile = temp_path("job.json");
  const auto r = cli({"decompose", "-p", "const:3", "--strategy", "rs", "--samples", "500", "--pairs", "500", "-o",
                      report.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  Json rep;
  std::ifstream(report) >> rep;
  Json job = rep["job"];
  job["out"] = "";
  std::ofstream(jobfile) << job.dump();

  const auto again = cli({"--job", jobfile.string(), "decompose"});
  ASSERT_EQ(again.code, 0) << again.err;
  auto j = json_of(again);
  j.erase("wall_clock_seconds");
  rep.erase("wall_clock_seconds");
  j["job"]["out"] = rep["job"]["out"];
  EXPECT_EQ(j.dump(), rep.dump());

  EXPECT_EQ(cli({"--job", jobfile.string(), "norm"}).code, 2);
  EXPECT_EQ(cli({"--job", "/nonexistent/job.json", "norm"}).code, 2);
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run_binary("norm -p const:2 -f 'indicator(0,4)' -g -8:8:512"), 0);
  EXPECT_EQ(run_binary("oscsup -f x --samples 50 --assert-finite"), 1);
  EXPECT_EQ(run_binary("norm -p const:1 -f x -g 0:1:8"), 2);
  EXPECT_EQ(run_binary("--version"), 0);
}
