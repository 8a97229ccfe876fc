#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sbmsi/error.hpp"
#include "sbmsi/graph_io.hpp"

namespace sbmsi {
namespace {

namespace fs = std::filesystem;

class GraphIo : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sbmsi_graph_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
  static void spit(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << s;
  }

  fs::path dir_;
};

TEST_F(GraphIo, RoundTripIsBitExact) {
  const auto p = validate_params(3000, 12.5, 3.25, 0.17);
  StoredGraph stored{{p.n, p.a, p.b, p.alpha, 0xDEADBEEFCAFEF00DULL}, sample_sbm(p, 9)};
  write_graph(dir_ / "one", stored);
  const StoredGraph back = read_graph(dir_ / "one");
  EXPECT_EQ(back.header, stored.header);
  EXPECT_EQ(back.graph, stored.graph);
  write_graph(dir_ / "two", back);
  for (const char* f : {kGraphHeaderFile, kEdgesFile, kLabelsFile}) {
    EXPECT_EQ(slurp(dir_ / "one" / f), slurp(dir_ / "two" / f)) << f;
  }
}

TEST_F(GraphIo, AwkwardDoublesSurvive) {
  StoredGraph stored{{5, 0.1 + 0.2, 1.0 / 3.0, 0.49999999999999994, 0}, LabeledGraph(5, {}, {1, 1, 1, -1, -1}, {1, -1, 1, -1, 1})};
  write_graph(dir_, stored);
  const StoredGraph back = read_graph(dir_);
  EXPECT_EQ(back.header.a, stored.header.a);
  EXPECT_EQ(back.header.b, stored.header.b);
  EXPECT_EQ(back.header.alpha, stored.header.alpha);
}

TEST_F(GraphIo, EdgeFileIsSortedWithHeader) {
  const LabeledGraph g(4, {{3, 2}, {1, 0}, {0, 2}}, {1, 1, 1, 1}, {1, 1, 1, 1});
  EXPECT_EQ(edges_to_csv(g), "u,v\n0,1\n0,2\n2,3\n");
  EXPECT_EQ(labels_to_csv(LabeledGraph(2, {}, {1, -1}, {-1, -1})), "vertex,sigma,sigma_tilde\n0,1,-1\n1,-1,-1\n");
}

TEST_F(GraphIo, MissingFilesAreIoErrors) {
  try {
    read_graph(dir_ / "nowhere");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Io);
    EXPECT_FALSE(e.is_validation());
  }
}

TEST_F(GraphIo, MalformedContentIsRejected) {
  const LabeledGraph g(3, {{0, 1}}, {1, 1, -1}, {1, -1, -1});
  write_graph(dir_, {{3, 2, 1, 0.1, 0}, g});

  spit(dir_ / kEdgesFile, "u,v\n0,7\n");
  EXPECT_THROW(read_graph(dir_), Error);
  spit(dir_ / kEdgesFile, "u,v\n0,x\n");
  EXPECT_THROW(read_graph(dir_), Error);
  spit(dir_ / kEdgesFile, "u,v\n0,1\n");
  spit(dir_ / kLabelsFile, "vertex,sigma,sigma_tilde\n0,1,1\n1,2,1\n2,1,1\n");
  EXPECT_THROW(read_graph(dir_), Error);
  spit(dir_ / kLabelsFile, "vertex,sigma,sigma_tilde\n0,1,1\n");
  try {
    read_graph(dir_);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LengthMismatch);
  }
  spit(dir_ / kGraphHeaderFile, "{\"n\": 3}");
  EXPECT_THROW(read_graph(dir_), Error);
}

}  // namespace
}  // namespace sbmsi
