// Copyright 2026 The CBE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cbe/io.hpp"
#include "cbe_cli/cli.hpp"
#include "test_util.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cbe::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

double last_recall_at(const std::string& csv, std::size_t m) {
  std::istringstream in(csv);
  std::string line;
  double value = -1.0;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() == 4 && cells[2] == std::to_string(m)) value = std::stod(cells[3]);
  }
  return value;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testutil::temp_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, GenDataWritesMatrixAndPrintsConfig) {
  const auto r = run({"gen-data", "--kind", "clustered", "--n", "50", "--d", "16",
                      "--seed", "4", "--queries", "10", "--queries-out", path("q.cbem"),
                      "--out", path("db.cbem")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("seed=4"), std::string::npos);
  const auto db = cbe::read_matrix(path("db.cbem"));
  const auto q = cbe::read_matrix(path("q.cbem"));
  EXPECT_EQ(db.rows(), 50u);
  EXPECT_EQ(q.rows(), 10u);
  EXPECT_TRUE(db.is_unit_normalized());
}

TEST_F(CliTest, EncodeIsReproducibleAndThreadIndependent) {
  ASSERT_EQ(run({"gen-data", "--n", "200", "--d", "32", "--out", path("x.cbem")}).code, 0);
  for (const std::string method : {"cbe-rand", "lsh", "bilinear", "fjlt"}) {
    ASSERT_EQ(run({"encode", "--method", method, "--seed", "9", "--in", path("x.cbem"),
                   "--out", path("a.cbec")})
                  .code,
              0);
    ASSERT_EQ(run({"--threads", "4", "encode", "--method", method, "--seed", "9", "--in",
                   path("x.cbem"), "--out", path("b.cbec")})
                  .code,
              0);
    EXPECT_EQ(slurp(path("a.cbec")), slurp(path("b.cbec"))) << method;
  }
  const auto pre = run({"encode", "--method", "cbe-rand", "--seed", "9", "--in",
                        path("x.cbem"), "--precondition", "block=8", "--out", path("p.cbec")});
  ASSERT_EQ(pre.code, 0) << pre.err;
  EXPECT_NE(slurp(path("p.cbec")), slurp(path("a.cbec")));
}

TEST_F(CliTest, TrainedParamsBeatRandomRecall) {
  ASSERT_EQ(run({"gen-data", "--kind", "clustered", "--n", "2000", "--d", "64", "--seed",
                 "1", "--queries", "100", "--queries-out", path("q.cbem"), "--out",
                 path("db.cbem")})
                .code,
            0);
  const auto trained = run({"train", "--in", path("db.cbem"), "--seed", "3", "--out",
                            path("opt.cbep")});
  ASSERT_EQ(trained.code, 0) << trained.err;
  EXPECT_TRUE(fs::exists(path("opt.cbep.trace.csv")));
  for (const std::string set : {"db", "q"}) {
    ASSERT_EQ(run({"encode", "--params", path("opt.cbep"), "--in", path(set + ".cbem"),
                   "--out", path("opt." + set + ".cbec")})
                  .code,
              0);
    ASSERT_EQ(run({"encode", "--method", "cbe-rand", "--seed", "3", "--in",
                   path(set + ".cbem"), "--out", path("rand." + set + ".cbec")})
                  .code,
              0);
  }
  auto recall = [&](const std::string& prefix) {
    const auto r = run({"eval-recall", "--db", path("db.cbem"), "--queries", path("q.cbem"),
                        "--codes-db", path(prefix + ".db.cbec"), "--codes-q",
                        path(prefix + ".q.cbec"), "--m-max", "20"});
    EXPECT_EQ(r.code, 0) << r.err;
    return last_recall_at(r.out, 10);
  };
  const double opt = recall("opt");
  const double rand = recall("rand");
  EXPECT_GE(opt, rand);
  EXPECT_GT(rand, 0.0);
}

TEST_F(CliTest, ExitCodes) {
  const auto missing = run({"encode", "--method", "lsh", "--seed", "1", "--in",
                            path("nope.cbem"), "--out", path("c.cbec")});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("nope.cbem"), std::string::npos);

  EXPECT_EQ(run({"encode", "--bogus", "1"}).code, 1);
  EXPECT_EQ(run({"gen-data", "--n", "5", "--d", "4", "--out", path("x"), "--what"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);

  ASSERT_EQ(run({"gen-data", "--n", "20", "--d", "8", "--out", path("x.cbem")}).code, 0);
  const auto both = run({"encode", "--method", "lsh", "--in", path("x.cbem"), "--out",
                         path("c.cbec")});
  EXPECT_EQ(both.code, 1);
  EXPECT_NE(both.err.find("--seed"), std::string::npos);
  const auto bad_pre = run({"encode", "--method", "lsh", "--seed", "1", "--in",
                            path("x.cbem"), "--precondition", "block=3", "--out",
                            path("c.cbec")});
  EXPECT_EQ(bad_pre.code, 1);
  EXPECT_NE(bad_pre.err.find("--precondition"), std::string::npos);

  std::ofstream(path("bad.cbem")) << "garbage";
  EXPECT_EQ(run({"train", "--in", path("bad.cbem"), "--out", path("p.cbep")}).code, 2);

  std::ofstream constraints(path("pairs.txt"));
  constraints << "[dissimilar]\n";
  for (int i = 0; i + 1 < 20; ++i) constraints << i << ' ' << i + 1 << '\n';
  constraints.close();
  const auto unbounded = run({"train", "--in", path("x.cbem"), "--lambda", "0", "--mu",
                              "100", "--constraints", path("pairs.txt"), "--out",
                              path("p.cbep")});
  EXPECT_EQ(unbounded.code, 3) << unbounded.err;
}

TEST_F(CliTest, EvalAngleAndBenchEmitCsv) {
  const auto angle = run({"eval-angle", "--theta", "1.0,2.0", "--d", "32", "--k", "8,16",
                          "--trials", "50", "--seed", "2"});
  ASSERT_EQ(angle.code, 0) << angle.err;
  EXPECT_NE(angle.out.find("theta,k,trials,mean,variance,bound\n"), std::string::npos);
  std::size_t rows = 0;
  for (char c : angle.out) rows += c == '\n';
  EXPECT_EQ(rows, 1u + 4u + 1u + 4u);  // pair comments, header, four cells

  const auto bench = run({"bench", "--d-list", "64,128", "--methods", "cbe-rand,lsh",
                          "--reps", "1", "--out", path("t.csv")});
  ASSERT_EQ(bench.code, 0) << bench.err;
  const auto csv = slurp(path("t.csv"));
  EXPECT_EQ(csv.rfind("method,d,k,metric,value\n", 0), 0u);
  EXPECT_NE(csv.find("cbe-rand,128,128,ns_per_point,"), std::string::npos);
  EXPECT_EQ(run({"bench", "--d-list", "100"}).code, 1);
}

}  // namespace
