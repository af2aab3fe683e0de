#include <gtest/gtest.h>

#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "support.hpp"
#include "tracer/cli.hpp"

namespace tracer::cli {
namespace {

using testing::data_path;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tracer");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, ExitCodeMapping) {
  EXPECT_EQ(exit_code(ErrorKind::InconsistentPremises), 1);
  EXPECT_EQ(exit_code(ErrorKind::NoSuggestion), 1);
  EXPECT_EQ(exit_code(ErrorKind::ResourceLimit), 3);
  EXPECT_EQ(exit_code(ErrorKind::Internal), 3);
  EXPECT_EQ(exit_code(ErrorKind::SyntaxError), 2);
  EXPECT_EQ(exit_code(ErrorKind::UnknownTarget), 2);
}

TEST(Cli, CheckVerdicts) {
  CliRun ok = run_cli({"check", data_path("sidp.forl"), data_path("table1.trace.json")});
  EXPECT_EQ(ok.code, 0) << ok.err;
  CliRun bad = run_cli({"check", data_path("sidp.forl"), data_path("contains-chain.trace.json"), "--json"});
  EXPECT_EQ(bad.code, 1);
  auto j = nlohmann::json::parse(bad.out);
  EXPECT_EQ(j["verdict"], "Inconsistent");
  EXPECT_EQ(j["violated"], nlohmann::json({"contains_transitive", "contains_left_unique"}));
  EXPECT_EQ(j["schema"], 1);
}

TEST(Cli, InferJsonIsDeterministic) {
  std::vector<std::string> args = {"infer", data_path("sidp.forl"), data_path("table1.trace.json"), "--target",
                                   "requires", "--target", "conflicts", "--target", "refines", "--json"};
  CliRun a = run_cli(args);
  CliRun b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto j = nlohmann::json::parse(a.out);
  EXPECT_FALSE(j["stats"].contains("ms"));
  EXPECT_EQ(j.dump(2) + "\n", a.out);  // sorted keys, two-space indent
  args.push_back("--timing");
  EXPECT_TRUE(nlohmann::json::parse(run_cli(args).out)["stats"].contains("ms"));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"bogus"}).code, 2);
  EXPECT_EQ(run_cli({"infer", data_path("sidp.forl"), data_path("table1.trace.json")}).code, 2);
  EXPECT_EQ(run_cli({"infer", data_path("sidp.forl"), data_path("table1.trace.json"), "--target", "nope"}).code, 2);
  EXPECT_EQ(run_cli({"check", data_path("missing.forl"), data_path("table1.trace.json")}).code, 2);
  EXPECT_EQ(run_cli({"infer", data_path("sidp.forl"), data_path("contains-chain.trace.json"), "--target", "requires"}).code,
            1);
}

TEST(Cli, ParseReportsDiagnostics) {
  auto bad = std::filesystem::temp_directory_path() / "tracer-cli-bad.forl";
  std::ofstream(bad) << "sig A {}\nfact { some Q }\n";
  CliRun r = run_cli({"parse", bad.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;
  CliRun ok = run_cli({"parse", data_path("sidp.forl")});
  EXPECT_EQ(ok.code, 0) << ok.err;
  std::filesystem::remove(bad);
}

TEST(Cli, DiscoverAndDlTrace) {
  CliRun d = run_cli({"discover", data_path("alm.forl"), data_path("alm-discover.trace.json"), "--fresh", "1",
                   "--link-fresh", "--json"});
  ASSERT_EQ(d.code, 0) << d.err;
  auto j = nlohmann::json::parse(d.out);
  EXPECT_EQ(j["suggestions"][0]["sigs"], nlohmann::json({"Specification"}));
  EXPECT_EQ(run_cli({"discover", data_path("alm.forl"), data_path("alm-discover.trace.json")}).code, 1);

  auto ws = std::filesystem::temp_directory_path() / "tracer-cli-dl.trace.json";
  CliRun dl = run_cli({"dl-trace", data_path("table1.sentences.txt"), "--lexicon", data_path("sidp.lexicon.json"),
                    "--ontology", data_path("sidp.ontology"), "--emit-workspace", ws.string(), "--json"});
  ASSERT_EQ(dl.code, 0) << dl.err;
  EXPECT_EQ(nlohmann::json::parse(dl.out)["traces"].size(), 6u);
  EXPECT_EQ(run_cli({"check", data_path("sidp.forl"), ws.string()}).code, 0);
  std::filesystem::remove(ws);
}

TEST(Cli, ExportDimacs) {
  CliRun a = run_cli({"export-dimacs", data_path("sidp.forl"), data_path("table1.trace.json"), "--target", "requires"});
  CliRun b = run_cli({"export-dimacs", data_path("sidp.forl"), data_path("table1.trace.json"), "--target", "requires"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("p cnf "), std::string::npos);
}

}  // namespace
}  // namespace tracer::cli
