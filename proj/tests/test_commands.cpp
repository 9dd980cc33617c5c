#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "guae/commands.hpp"

namespace guae {
namespace {

namespace fs = std::filesystem;

class Workspace : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("guae_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& body) const {
    std::ofstream(path(name)) << body;
    return path(name);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::vector<nlohmann::json> jsonl(const std::string& p) {
    std::vector<nlohmann::json> out;
    std::ifstream in(p);
    for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
    return out;
  }

  fs::path dir_;
  std::ostringstream err_;
};

using Score = Workspace;
using Advantage = Workspace;
using Simulate = Workspace;
using Diagnose = Workspace;

TEST_F(Score, BatchWithBadLineContinues) {
  const std::string ref = R"({"name":"click","arguments":{"coordinate":[100,100]}})";
  const auto in = write("in.jsonl",
                        R"({"thought":"tap it","prediction":"{\"name\":\"click\",\"arguments\":{\"coordinate\":[100,100]}}","reference":)" +
                            ref + "}\n" + "this is not json\n" +
                            R"({"thought":"","prediction":"garbage","reference":)" + ref + "}\n");
  ASSERT_EQ(cmd_score(in, path("out.jsonl"), {}, err_), kExitOk);
  const auto recs = jsonl(path("out.jsonl"));
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0]["r_combined"], 1.0);
  EXPECT_EQ(recs[0]["label"], "consistent");
  EXPECT_EQ(recs[0]["success"], true);
  EXPECT_FALSE(recs[1]["record_error"].is_null());
  EXPECT_EQ(recs[2]["parse_error"], "MalformedDocument");
  EXPECT_DOUBLE_EQ(recs[2]["r_combined"].get<double>(), 0.075);
  EXPECT_TRUE(fs::exists(path("out.jsonl.manifest.json")));
}

TEST_F(Score, MissingInputIsIoError) {
  EXPECT_EQ(cmd_score(path("nope.jsonl"), path("out.jsonl"), {}, err_), kExitIo);
}

TEST_F(Score, InvalidConfigIsConfigError) {
  const auto in = write("in.jsonl", "");
  EXPECT_EQ(cmd_score(in, path("out.jsonl"), {{"lambda", "2"}}, err_), kExitConfig);
  EXPECT_EQ(cmd_score(in, path("out.jsonl"), {{"lambda", "abc"}}, err_), kExitConfig);
}

TEST_F(Advantage, AppendsAdvantagesAndFlagsBadRecords) {
  const auto in = write("g.jsonl", "{\"group_id\":\"a\",\"rewards\":[1,1,1,1,1,1,1,1]}\n{\"group_id\":\"b\"}\n"
                                   "{\"group_id\":\"c\",\"rewards\":[0,1.5]}\n{\"group_id\":\"d\",\"rewards\":[1,0]}\n");
  ASSERT_EQ(cmd_advantage(in, path("a.jsonl"), {}, err_), kExitOk);
  const auto recs = jsonl(path("a.jsonl"));
  ASSERT_EQ(recs.size(), 4u);
  EXPECT_EQ(recs[0]["group_id"], "a");
  EXPECT_EQ(recs[0]["variant"], "guae");
  EXPECT_NEAR(recs[0]["advantages"][0].get<double>(), 0.38319302456384643, 1e-12);
  EXPECT_TRUE(recs[1].contains("error"));
  EXPECT_EQ(recs[1]["line"], 2);
  EXPECT_TRUE(recs[2].contains("error"));
  EXPECT_EQ(recs[3]["advantages"].size(), 2u);
}

TEST_F(Advantage, VariantSelection) {
  const auto in = write("g.jsonl", "{\"rewards\":[1,0]}\n");
  ASSERT_EQ(cmd_advantage(in, path("a.jsonl"), {{"variant", "base"}}, err_), kExitOk);
  const auto recs = jsonl(path("a.jsonl"));
  EXPECT_NEAR(recs[0]["advantages"][0].get<double>(), 0.99999800000399999, 1e-14);
  EXPECT_TRUE(recs[0]["gate"].is_null());
  EXPECT_EQ(cmd_advantage(in, path("a.jsonl"), {{"variant", "other"}}, err_), kExitConfig);
  EXPECT_EQ(cmd_advantage(in, path("a.jsonl"), {{"p_low", "0.5"}}, err_), kExitConfig);
}

TEST_F(Simulate, ZeroStepsWritesHeaderOnly) {
  ASSERT_EQ(cmd_simulate(path("sim"), {{"steps", "0"}}, err_), kExitOk);
  const auto text = slurp(path("sim/trace.csv"));
  EXPECT_EQ(text.rfind("# config:", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_NE(text.find("step,state,"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("sim/manifest.json")));
}

TEST_F(Simulate, RerunIsByteIdentical) {
  const Settings s = {{"steps", "30"}, {"n_states", "2"}, {"compare", "base,guae"}, {"schedule", "0.2,0.8"},
                      {"schedule_groups", "500"}, {"seed", "11"}};
  ASSERT_EQ(cmd_simulate(path("a"), s, err_), kExitOk);
  ASSERT_EQ(cmd_simulate(path("b"), s, err_), kExitOk);
  for (const char* f : {"trace_base.csv", "trace_guae.csv", "collapse.csv"}) {
    const auto x = slurp(path(std::string("a/") + f));
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, slurp(path(std::string("b/") + f))) << f;
  }
  Settings other = s;
  other["seed"] = "12";
  ASSERT_EQ(cmd_simulate(path("c"), other, err_), kExitOk);
  EXPECT_NE(slurp(path("a/trace_base.csv")), slurp(path("c/trace_base.csv")));
}

TEST_F(Simulate, BadConfigRejected) {
  EXPECT_EQ(cmd_simulate(path("x"), {{"init", "sideways"}}, err_), kExitConfig);
  EXPECT_EQ(cmd_simulate(path("x"), {{"K", "0"}}, err_), kExitConfig);
  EXPECT_EQ(cmd_simulate(path("x"), {{"compare", "base,zzz"}}, err_), kExitConfig);
}

TEST_F(Diagnose, ReportIsPermutationInvariant) {
  std::vector<std::string> lines;
  for (int i = 0; i < 40; ++i) {
    std::string r = "[";
    for (int k = 0; k < 6; ++k) r += std::string(k ? "," : "") + (i % 4 == 0 || (i * 7 + k * 3) % 5 < 2 ? "1" : "0");
    lines.push_back("{\"group_id\":\"g" + std::to_string(i) + "\",\"rewards\":" + r + "]}");
  }
  std::string fwd, rev;
  for (const auto& l : lines) fwd += l + "\n";
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) rev += *it + "\n";
  ASSERT_EQ(cmd_diagnose(write("f.jsonl", fwd), path("f"), {}, err_), kExitOk) << err_.str();
  ASSERT_EQ(cmd_diagnose(write("r.jsonl", rev), path("r"), {}, err_), kExitOk);
  EXPECT_EQ(slurp(path("f/report.csv")), slurp(path("r/report.csv")));
  EXPECT_EQ(slurp(path("f/hist.csv")), slurp(path("r/hist.csv")));
}

TEST_F(Diagnose, SkipsMalformedLines) {
  const auto in = write("g.jsonl", "{\"rewards\":[1,1]}\nnot json\n{\"rewards\":[0,1]}\n");
  ASSERT_EQ(cmd_diagnose(in, path("d"), {}, err_), kExitOk);
  const auto report = slurp(path("d/report.csv"));
  std::istringstream ss(report);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  EXPECT_EQ(header,
            "n_groups,skipped_lines,n_advantages,low_std_ratio,all_equal_ratio,near_zero_mass_0_01,"
            "near_zero_mass_0_1,mean_abs_advantage");
  EXPECT_EQ(row.substr(0, 6), "2,1,4,");
}

TEST_F(Diagnose, MissingInput) { EXPECT_EQ(cmd_diagnose(path("none"), path("d"), {}, err_), kExitIo); }

TEST_F(Workspace, SettingsParsing) {
  const auto s = parse_settings("# comment\nlambda = 0.7\nvariant: base\n\n");
  EXPECT_EQ(s.at("lambda"), "0.7");
  EXPECT_EQ(s.at("variant"), "base");
  EXPECT_THROW(parse_settings("no separator here"), Error);
  const auto j = load_settings_file(write("c.json", R"({"steps": 10, "variant": "vat-only"})"));
  EXPECT_EQ(j.at("steps"), "10");
  EXPECT_EQ(j.at("variant"), "vat-only");
}

TEST_F(Workspace, ManifestReloadsAsConfig) {
  ASSERT_EQ(cmd_simulate(path("a"), {{"steps", "5"}, {"beta", "0.02"}, {"seed", "3"}}, err_), kExitOk);
  const auto s = load_settings_file(path("a/manifest.json"));
  ASSERT_EQ(cmd_simulate(path("b"), s, err_), kExitOk);
  EXPECT_EQ(slurp(path("a/trace.csv")), slurp(path("b/trace.csv")));
}

#ifdef GUAE_CLI_PATH
int run(const std::string& args) { return std::system((std::string(GUAE_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str()); }

int exit_code(int status) { return WIFEXITED(status) ? WEXITSTATUS(status) : -1; }

TEST_F(Workspace, CliEndToEnd) {
  const auto in = write("g.jsonl", "{\"group_id\":\"a\",\"rewards\":[1,0,1]}\n");
  EXPECT_EQ(exit_code(run("advantage " + in + " --variant base --out " + path("a.jsonl"))), 0);
  EXPECT_TRUE(fs::exists(path("a.jsonl")));
  EXPECT_EQ(exit_code(run("simulate --steps 3 --seed 9 --out " + path("s1"))), 0);
  EXPECT_EQ(exit_code(run("--seed 9 simulate --steps 3 --out " + path("s2"))), 0);
  EXPECT_EQ(slurp(path("s1/trace.csv")), slurp(path("s2/trace.csv")));
  EXPECT_EQ(exit_code(run("diagnose " + path("missing.jsonl") + " --out " + path("d"))), 2);
  EXPECT_EQ(exit_code(run("simulate --beta -1 --out " + path("bad"))), 3);
}
#endif

}  // namespace
}  // namespace guae
