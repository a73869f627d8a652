#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "prism/checkpoint.hpp"
#include "prism/structure_io.hpp"

namespace fs = std::filesystem;
using namespace prism;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("prism_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::cli_dispatch(args, out_, err_);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write_config(const std::string& p, const std::string& extra = "") {
    std::ofstream(p) << "epochs = 2\nbatch_size = 8\ndim = 8\nlayers = 1\nrbf_centers = 6\nR_c = 9\nseed = 3\n"
                     << extra;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, MissingSubcommandOrFlagIsUsageError) {
  EXPECT_EQ(run({}), 1);
  EXPECT_NE(err_.str().find("Usage"), std::string::npos);
  EXPECT_EQ(run({"build-graphs", "--input", path("a.jsonl"), "--rc", "5", "--Rc", "15"}), 1);
  EXPECT_NE(err_.str().find("--out"), std::string::npos);
  EXPECT_EQ(run({"no-such-command"}), 1);
}

TEST_F(CliTest, HelpExitsZero) { EXPECT_EQ(run({"--help"}), 0); }

TEST_F(CliTest, GenerateDataIsByteReproducible) {
  ASSERT_EQ(run({"generate-data", "--kind", "mixed", "--n", "20", "--seed", "4", "--out", path("a.jsonl")}), 0);
  ASSERT_EQ(run({"generate-data", "--kind", "mixed", "--n", "20", "--seed", "4", "--out", path("b.jsonl")}), 0);
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  EXPECT_EQ(parse_structures(path("a.jsonl")).size(), 20u);
  EXPECT_EQ(run({"generate-data", "--kind", "weird", "--n", "2", "--out", path("c.jsonl")}), 1);
  EXPECT_EQ(run({"generate-data", "--kind", "mixed", "--n", "0", "--out", path("c.jsonl")}), 1);
}

TEST_F(CliTest, BuildGraphsDumpFormat) {
  ASSERT_EQ(run({"generate-data", "--kind", "short-range", "--n", "3", "--seed", "1", "--out", path("s.jsonl")}), 0);
  ASSERT_EQ(run({"build-graphs", "--input", path("s.jsonl"), "--rc", "5", "--Rc", "15", "--out", path("g.jsonl")}), 0);
  std::ifstream in(path("g.jsonl"));
  std::string line;
  std::vector<std::string> kinds;
  const auto structures = parse_structures(path("s.jsonl"));
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    kinds.push_back(j.at("kind").get<std::string>());
    const std::size_t width = kinds.back() == "multiscale" ? 5 : 8;
    for (const auto& e : j.at("edges")) EXPECT_EQ(e.size(), width);
    if (kinds.back() == "atomistic") {
      const auto& s = structures[(kinds.size() - 1) / 4];
      EXPECT_EQ(j.at("id").get<std::string>(), s.id());
      EXPECT_EQ(j.at("num_nodes").get<int>(), int(s.size()));
      EXPECT_EQ(j.at("edges").size(), build_atomistic_graph(s, 5.0).num_edges());
    }
  }
  ASSERT_EQ(kinds.size(), 12u);
  EXPECT_EQ(kinds[0], "atomistic");
  EXPECT_EQ(kinds[1], "similarity");
  EXPECT_EQ(kinds[2], "cell");
  EXPECT_EQ(kinds[3], "multiscale");
  EXPECT_EQ(run({"build-graphs", "--input", path("s.jsonl"), "--rc", "5", "--Rc", "4", "--out", path("h.jsonl")}), 1);
  EXPECT_EQ(run({"build-graphs", "--input", path("missing.jsonl"), "--rc", "5", "--Rc", "15", "--out",
                 path("h.jsonl")}),
            1);
}

TEST_F(CliTest, DumpKeepsFullPrecision) {
  const CrystalStructure s(LatticeMatrix::cubic(3.0), {{Vec3(0, 0, 0), 1}, {Vec3(1.0 / 3.0, 0, 0), 1}}, "p");
  const auto g = build_atomistic_graph(s, 2.5);
  const auto j = nlohmann::json::parse(cli::graph_to_json_line("p", g));
  for (std::size_t k = 0; k < g.num_edges(); ++k)
    EXPECT_EQ(j["edges"][k][5].get<double>(), g.edges[k].disp[0]);
}

TEST_F(CliTest, TrainEvaluateFusionRoundTrip) {
  ASSERT_EQ(run({"generate-data", "--kind", "long-range", "--n", "24", "--seed", "2", "--out", path("d.jsonl")}), 0);
  write_config(path("run.cfg"), "data = " + path("d.jsonl") + "\n");
  ASSERT_EQ(run({"train", "--config", path("run.cfg"), "--checkpoint", path("m1.json"), "--log", path("l1.csv")}), 0)
      << err_.str();
  ASSERT_EQ(run({"train", "--config", path("run.cfg"), "--checkpoint", path("m2.json"), "--log", path("l2.csv")}), 0);
  EXPECT_EQ(slurp(path("m1.json")), slurp(path("m2.json")));
  EXPECT_EQ(slurp(path("l1.csv")), slurp(path("l2.csv")));
  ASSERT_EQ(run({"train", "--config", path("run.cfg"), "--checkpoint", path("m3.json"), "--seed", "9"}), 0);
  EXPECT_NE(slurp(path("m1.json")), slurp(path("m3.json")));

  ASSERT_EQ(run({"evaluate", "--input", path("d.jsonl"), "--checkpoint", path("m1.json"), "--out", path("p.csv")}), 0);
  EXPECT_NE(out_.str().find("mae "), std::string::npos);
  EXPECT_EQ(slurp(path("p.csv")).rfind("id,target,prediction\n", 0), 0u);

  ASSERT_EQ(run({"fusion-report", "--checkpoint", path("m1.json"), path("m3.json"), "--out", path("f.csv")}), 0);
  const std::string first = slurp(path("f.csv"));
  ASSERT_EQ(run({"fusion-report", "--checkpoint", path("m1.json"), path("m3.json"), "--out", path("f.csv")}), 0);
  EXPECT_EQ(slurp(path("f.csv")), first);
}

TEST_F(CliTest, TrainValidation) {
  write_config(path("bad.cfg"), "bogus_key = 1\n");
  EXPECT_EQ(run({"train", "--config", path("bad.cfg"), "--checkpoint", path("m.json")}), 1);
  EXPECT_NE(err_.str().find("line 8"), std::string::npos);
  write_config(path("nodata.cfg"));
  EXPECT_EQ(run({"train", "--config", path("nodata.cfg"), "--checkpoint", path("m.json")}), 1);
  ASSERT_EQ(run({"generate-data", "--kind", "long-range", "--n", "8", "--seed", "2", "--out", path("d.jsonl")}), 0);
  EXPECT_EQ(run({"train", "--config", path("nodata.cfg"), "--input", path("d.jsonl"), "--checkpoint", path("m.json"),
                 "--set", "learning_rate=1e200"}),
            2);
}

TEST_F(CliTest, CheckInvarianceReport) {
  ASSERT_EQ(run({"generate-data", "--kind", "short-range", "--n", "2", "--seed", "6", "--out", path("s.jsonl")}), 0);
  ASSERT_EQ(run({"check-invariance", "--input", path("s.jsonl"), "--trials", "5", "--out", path("r.csv")}), 0)
      << err_.str();
  const std::string report = slurp(path("r.csv"));
  EXPECT_EQ(report.rfind("check,trials,max_dev,tol,pass\n", 0), 0u);
  EXPECT_NE(report.find("cell.readout,10,"), std::string::npos);
  ASSERT_EQ(run({"check-invariance", "--input", path("s.jsonl"), "--trials", "5", "--out", path("r2.csv")}), 0);
  EXPECT_EQ(slurp(path("r2.csv")), report);
  // An impossible tolerance turns the run red.
  EXPECT_EQ(run({"check-invariance", "--input", path("s.jsonl"), "--trials", "5", "--tol", "-1", "--out",
                 path("r3.csv")}),
            1);
}
