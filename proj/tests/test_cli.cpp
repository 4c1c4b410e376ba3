#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "caretlab/caretlab.hpp"

using namespace caretlab;

namespace {

struct RunResult {
  std::string out;
  int exit_code = -1;
};

std::string samples(const std::string& name) { return std::string(CARETLAB_SAMPLES) + "/" + name; }

RunResult run(const std::string& args) {
  const std::string cmd = std::string(CARETLAB_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  RunResult r;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string strip_wall_time(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("meta.wall_ms") == std::string::npos) out += line + "\n";
  return out;
}

std::string field(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  const std::string prefix = key + " = ";
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return "<missing " + key + ">";
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("caretlab_cli_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace

TEST(Cli, TreesEnumListsCanonicalOrder) {
  const auto r = run("trees enum --size 3");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(field(r.out, "count"), "2");
  EXPECT_EQ(field(r.out, "tree.0.tree"), "((1 1) 1)");
  EXPECT_EQ(field(r.out, "tree.1.tree"), "(1 (1 1))");
  EXPECT_EQ(field(r.out, "meta.exit_code"), "0");
}

TEST(Cli, MagmaIdemOnCyclicAddition) {
  const auto r = run("magma idem --magma " + samples("z2add.txt") + " --tol 1e-9 --seed 7");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(field(r.out, "success"), "true");
  EXPECT_EQ(field(r.out, "residual"), "0/1");
  EXPECT_EQ(field(r.out, "measure.0.element"), "0");
}

TEST(Cli, RamseyScanForThree) {
  const auto r = run("ramsey scan --m 3 --max-n 4 --threshold 0");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(field(r.out, "row.0.n"), "3");
  EXPECT_EQ(field(r.out, "row.0.verdict"), "fails");
  EXPECT_EQ(field(r.out, "row.1.n"), "4");
  EXPECT_EQ(field(r.out, "row.1.verdict"), "suffices");
  const auto csv = run("ramsey scan --m 3 --max-n 4 --threshold 0 --format csv");
  EXPECT_NE(csv.out.find("n,verdict,certificate_kind,oscillation"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("trees stats --tree \"(1 (1 1))\"").exit_code, 0);
  EXPECT_EQ(run("trees stats --tree \"(1 1\"").exit_code, 1);
  EXPECT_EQ(run("trees enum --size 40").exit_code, 1);
  EXPECT_EQ(run("magma idem --magma /nonexistent/file.txt").exit_code, 1);
  EXPECT_EQ(run("measure push --mu " + samples("uniform_t4.csv") + " --map f --f x1").exit_code, 1);
  EXPECT_EQ(run("ramsey adversary --m 3 --n 3 --threshold 0").exit_code, 2);
  EXPECT_EQ(run("ramsey adversary --m 3 --n 4 --threshold 0 --budget 50").exit_code, 0);
  EXPECT_EQ(run("magma quotient --label left-comb --max-size 5 --large 1,2,3,4,5").exit_code, 2);
  EXPECT_EQ(run("magma quotient --label size-parity --max-size 6").exit_code, 0);
  EXPECT_EQ(run("ramsey constant --coloring " + samples("gap_coloring_t4.csv") + " --m 3").exit_code, 0);
}

TEST(Cli, ValidateDiagnostics) {
  TempDir dir;
  write_file(dir.file("short.csv"), "tree,weight\n1,1/2\n(1 1),1/4\n");
  write_file(dir.file("holey.csv"), "tree,value\n((1 1) 1),1/1\n");
  const auto bad = run("validate " + dir.file("short.csv") + " " + dir.file("holey.csv"));
  EXPECT_EQ(bad.exit_code, 2);
  EXPECT_NE(field(bad.out, "file.0.diagnostic").find("deficit 1/4"), std::string::npos);
  EXPECT_NE(field(bad.out, "file.1.diagnostic").find("(1 (1 1))"), std::string::npos);
  const auto good = run("validate " + samples("uniform_t4.csv") + " " + samples("z2add.txt"));
  EXPECT_EQ(good.exit_code, 0);
  EXPECT_EQ(field(good.out, "file.0.diagnostic"), "ok");
  EXPECT_EQ(field(good.out, "file.1.diagnostic"), "ok");
}

TEST(Cli, EmittedFilesRoundTrip) {
  TempDir dir;
  const auto conv = run("measure conv --mu " + samples("uniform_t4.csv") + " --nu " + samples("uniform_t4.csv") +
                        " --format csv --out " + dir.file("conv.csv"));
  ASSERT_EQ(conv.exit_code, 0);
  const auto mu = parse_tree_measure(read_file(samples("uniform_t4.csv")));
  EXPECT_EQ(parse_tree_measure(read_file(dir.file("conv.csv"))), convolve(CaretOp{}, mu, mu));
  EXPECT_EQ(run("validate " + dir.file("conv.csv")).exit_code, 0);

  const auto idem = run("magma idem --magma " + samples("shift.txt") + " --format csv --out " + dir.file("idem.csv"));
  ASSERT_EQ(idem.exit_code, 0);
  const auto nu = parse_element_measure(read_file(dir.file("idem.csv")));
  EXPECT_EQ(verify_idempotent(shift_magma(2), nu), 0);

  const auto adv = run("ramsey adversary --m 3 --n 3 --threshold 0 --witness-out " + dir.file("w.csv"));
  ASSERT_EQ(adv.exit_code, 2);
  const Coloring w = parse_coloring(read_file(dir.file("w.csv")));
  TreeCatalog cat;
  EXPECT_EQ(format_coloring(w, cat), read_file(dir.file("w.csv")));
  EXPECT_EQ(min_oscillation_copy(w, EmbeddingTable(3, 3, cat)).oscillation, 1);
}

TEST(Cli, RandomizedCommandsAreReproducible) {
  TempDir dir;
  TreeCatalog cat;
  std::mt19937_64 rng(5);
  write_file(dir.file("c6.csv"), format_coloring(random_binary_coloring(6, rng), cat));
  const std::vector<std::string> commands = {
      "magma idem --magma " + samples("z2add.txt") + " --seed 11",
      "magma idem --magma " + samples("leftzero.txt") + " --seed 3 --method residual-descent",
      "magma classify --order 3 --instances 40 --seed 9 --threads 2",
      "hindman pairs --magma " + samples("shift.txt") + " --g 0 --eps 1/100 --count 4 --seed 2",
      "ramsey adversary --m 4 --n 6 --budget 80 --seed 13 --threads 2",
      "ramsey scan --m 3 --max-n 6 --budget 40 --seed 21 --threads 2",
      "ramsey strong --coloring " + dir.file("c6.csv") + " --m 3 --budget 25 --seed 4",
  };
  for (const auto& cmd : commands) {
    const auto first = run(cmd);
    ASSERT_NE(first.exit_code, 1) << cmd;
    const std::string want = strip_wall_time(first.out);
    for (int rep = 0; rep < 2; ++rep) {
      const auto again = run(cmd);
      EXPECT_EQ(again.exit_code, first.exit_code) << cmd;
      EXPECT_EQ(strip_wall_time(again.out), want) << cmd;
    }
  }
}

TEST(Cli, ModuleCommandsSmoke) {
  const std::vector<std::string> ok = {
      "trees stats --tree \"((1 1) 1)\" --address 0 --prune 0 --indices 0,1,2",
      "trees stats --size 4",
      "measure eval --mu " + samples("uniform_t4.csv") + " --coloring " + samples("gap_coloring_t4.csv"),
      "measure push --mu " + samples("uniform_t4.csv") + " --map hr --r 0110",
      "measure push --mu " + samples("uniform_t4.csv") + " --map ev --magma " + samples("shift.txt") + " --g 0",
      "magma classify --magma " + samples("z2add.txt"),
      "f act --f x0 --tree \"((1 1) 1)\"",
      "f compose --f x0 --g x0",
      "f defect --f x0 --mu " + samples("uniform_t4.csv"),
      "stats addresses --mu " + samples("uniform_t4.csv") + " --sigma 0 --varsigma 1",
      "stats monotonicity --mu " + samples("uniform_t4.csv"),
      "constructions hr --tree \"(1 (1 1))\" --r 011",
      "constructions usigma --sigma 010",
      "constructions odometer --tree \"(1 (1 1))\" --p 3 --r 010",
      "constructions er --tree \"(1 1)\" --r 0101 --n 1",
      "ramsey solve --coloring " + samples("gap_coloring_t4.csv") + " --m 3",
      "ramsey strong --coloring " + samples("gap_coloring_t4.csv") + " --m 3",
  };
  for (const auto& cmd : ok) {
    const auto r = run(cmd);
    EXPECT_NE(r.exit_code, 1) << cmd << "\n" << r.out;
  }
  EXPECT_EQ(field(run("constructions usigma --sigma 010").out, "tree"), "((1 1) 1)");
  EXPECT_EQ(field(run("f act --f x0 --tree \"((1 1) 1)\"").out, "result"), "(1 (1 (1 1)))" == std::string() ? "" : "(1 (1 1))");
}
