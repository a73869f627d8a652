#include <gtest/gtest.h>

#include <sstream>

#include "prism/error.hpp"
#include "prism/run_config.hpp"
#include "prism/structure_io.hpp"

using namespace prism;

namespace {

const char* kTwoRecords =
    R"({"id":"a","lattice":[[4,0,0],[0,4,0],[0,0,4]],"frac_coords":[[0,0,0],[0.5,0.5,0.5]],"atomic_numbers":[11,17],"target":-1.5})"
    "\n"
    R"({"id":"b","lattice":[[3,0,0],[0,3,0],[0,0,3]],"frac_coords":[[1.2,0,-0.25]],"atomic_numbers":[6]})"
    "\n";

std::vector<CrystalStructure> parse(const std::string& text, ParseOptions opt = {}) {
  std::istringstream in(text);
  return parse_structures(in, opt);
}

template <typename E>
std::size_t error_line(const std::string& text, ParseOptions opt = {}) {
  try {
    parse(text, opt);
  } catch (const E& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(StructureIo, ParsesWellFormedFile) {
  const auto v = parse(kTwoRecords);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].id(), "a");
  EXPECT_EQ(*v[0].target(), -1.5);
  EXPECT_EQ(v[0].atomic_numbers(), (std::vector<int>{11, 17}));
  EXPECT_FALSE(v[1].target().has_value());
}

TEST(StructureIo, LatticeVectorsAreColumns) {
  const auto v = parse(R"({"id":"x","lattice":[[1,2,3],[0,4,0],[0,0,5]],"frac_coords":[[1,0,0]],"atomic_numbers":[1]})");
  EXPECT_TRUE(v[0].lattice().column(0).isApprox(Vec3(1, 2, 3)));
}

TEST(StructureIo, LenientWrapAndStrictMode) {
  const auto v = parse(kTwoRecords);
  EXPECT_NEAR(v[1].site(0).frac[0], 0.2, 1e-12);
  EXPECT_NEAR(v[1].site(0).frac[2], 0.75, 1e-12);
  EXPECT_EQ(error_line<InvalidFraction>(kTwoRecords, {true}), 2u);
}

TEST(StructureIo, SkipsCommentsAndBlankLines) {
  const auto v = parse(std::string("# header\n\n") + kTwoRecords);
  EXPECT_EQ(v.size(), 2u);
}

TEST(StructureIo, ErrorsCarryLineNumbers) {
  const std::string singular =
      std::string("# c\n") +
      R"({"id":"s","lattice":[[1,0,0],[2,0,0],[0,0,1]],"frac_coords":[[0,0,0]],"atomic_numbers":[1]})";
  EXPECT_EQ(error_line<InvalidLattice>(singular), 2u);
  EXPECT_EQ(error_line<ParseError>(std::string(kTwoRecords) + "{not json\n"), 3u);
  EXPECT_EQ(error_line<ParseError>(R"({"id":"m","lattice":[[1,0,0],[0,1,0],[0,0,1]],"frac_coords":[[0,0,0]]})"), 1u);
  EXPECT_EQ(error_line<ParseError>(
                R"({"id":"m","lattice":[[1,0,0],[0,1,0],[0,0,1]],"frac_coords":[[0,0,0]],"atomic_numbers":[1,2]})"),
            1u);
  EXPECT_EQ(error_line<ParseError>(
                R"({"id":"m","lattice":[[1,0,0],[0,1,0],[0,0,1]],"frac_coords":[[0,0,0]],"atomic_numbers":[200]})"),
            1u);
  EXPECT_EQ(
      error_line<ParseError>(R"({"id":"m","lattice":[[1,0,0],[0,1,0]],"frac_coords":[[0,0,0]],"atomic_numbers":[1]})"),
      1u);
  EXPECT_EQ(error_line<ParseError>(R"({"id":"m","lattice":[[1,0,0],[0,1,0],[0,0,1]],"frac_coords":[],"atomic_numbers":[]})"),
            1u);
}

TEST(StructureIo, RoundTripIsIdempotent) {
  const auto first = serialize_structures(parse(kTwoRecords));
  const auto second = serialize_structures(parse(first));
  EXPECT_EQ(first, second);
  EXPECT_EQ(first.rfind("# prism-structures", 0), 0u);
  const auto back = parse(first);
  EXPECT_EQ(back[0].lattice().matrix(), parse(kTwoRecords)[0].lattice().matrix());
}

TEST(StructureIo, FullPrecisionSurvives) {
  const CrystalStructure s(LatticeMatrix::cubic(3.0000000000000004), {{Vec3(0.1, 1.0 / 3.0, 0.7), 8}}, "p", 0.1 + 0.2);
  const auto back = parse(structure_to_json_line(s));
  EXPECT_EQ(back[0].lattice().matrix(), s.lattice().matrix());
  EXPECT_EQ(back[0].site(0).frac, s.site(0).frac);
  EXPECT_EQ(*back[0].target(), 0.1 + 0.2);
}

TEST(RunConfigIo, ParsesKeysAndComments) {
  std::istringstream in(
      "# training run\n"
      "learning_rate = 0.01\n"
      "epochs=7   # short\n"
      "seed = 42\n"
      "augmentation = random-rotation\n"
      "expert_cell = false\n"
      "R_c = 12.5\n"
      "data = /tmp/x.jsonl\n");
  const auto c = parse_run_config(in);
  EXPECT_EQ(c.train.learning_rate, 0.01);
  EXPECT_EQ(c.train.epochs, 7);
  EXPECT_EQ(c.train.seed, 42u);
  EXPECT_EQ(c.train.augmentation, Augmentation::RandomRotation);
  EXPECT_FALSE(c.train.model.experts.cell);
  EXPECT_EQ(c.train.model.R_c, 12.5);
  EXPECT_EQ(c.data, "/tmp/x.jsonl");
}

TEST(RunConfigIo, RejectsUnknownAndMalformed) {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      parse_run_config(in);
    } catch (const ConfigError& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  EXPECT_TRUE(fails_with("epochs = 3\nlearning_rat = 1\n", "line 2"));
  EXPECT_TRUE(fails_with("epochs = three\n", "integer"));
  EXPECT_TRUE(fails_with("just text\n", "line 1"));
  EXPECT_TRUE(fails_with("r_c = 5\nR_c = 4\n", "R_c"));
  EXPECT_TRUE(fails_with("r_f = 0\n", "r_f"));
  EXPECT_TRUE(fails_with("seed = -1\n", "seed"));
  EXPECT_TRUE(fails_with("augmentation = flip\n", "augmentation"));
}

TEST(RunConfigIo, ToStringRoundTrips) {
  RunConfig c;
  c.train.learning_rate = 0.1 + 0.2;
  c.train.model.layers = 3;
  c.train.model.experts.similarity = false;
  c.log = "/tmp/log.csv";
  std::istringstream in(run_config_to_string(c));
  const auto back = parse_run_config(in);
  EXPECT_EQ(back.train.learning_rate, c.train.learning_rate);
  EXPECT_EQ(back.train.model, c.train.model);
  EXPECT_EQ(back.log, c.log);
  EXPECT_EQ(run_config_to_string(back), run_config_to_string(c));
}
