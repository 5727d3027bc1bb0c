#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "pvn/pvn.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pvn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  Outcome run(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + PVN_CLI_PATH + "\" " + args + " >\"" +
                            out.string() + "\" 2>\"" + err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    const int status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return {status, slurp(out), slurp(err)};
  }

  fs::path dir_;
};

const char* kHarmonic = R"([potential]
kind = harmonic
mass = 1
omega = 1
hbar = 1

[grid]
x_min = -5.013256549262001
length = 10.026513098524002
n = 16

[lattice]
n_x = 4
n_p = 4
)";

}  // namespace

TEST_F(Cli, FghAndPvnAgree) {
  const fs::path cfg = write("h.ini", kHarmonic);
  ASSERT_EQ(run("solve --config \"" + cfg.string() + "\" --out \"" + (dir_ / "fgh").string() + "\"").status, 0);
  const fs::path pcfg = write("p.ini", std::string(kHarmonic) + "\n[solver]\nbasis = pvn\n");
  const Outcome r = run("solve --config \"" + pcfg.string() + "\" --out \"" + (dir_ / "pvn").string() + "\"");
  ASSERT_EQ(r.status, 0) << r.err;
  const pvn::CsvTable f = pvn::read_csv(dir_ / "fgh" / "eigenvalues.csv");
  const pvn::CsvTable p = pvn::read_csv(dir_ / "pvn" / "eigenvalues.csv");
  ASSERT_EQ(f.rows.size(), 16u);
  ASSERT_EQ(p.rows.size(), 16u);
  for (std::size_t i = 0; i < 16; ++i) {
    const double ef = f.number(i, f.require("energy")), ep = p.number(i, p.require("energy"));
    EXPECT_NEAR(ep, ef, 1e-8 * std::abs(ef)) << "level " << i;
  }
  const std::string meta = slurp(dir_ / "pvn" / "meta.txt");
  EXPECT_NE(meta.find("config.solver.basis = pvn"), std::string::npos);
  EXPECT_NE(meta.find("reference = analytic"), std::string::npos);
}

TEST_F(Cli, InvalidConfigNamesField) {
  const fs::path cfg = write("bad.ini", "[potential]\nkind = harmonic\nomega = -2\n");
  const Outcome r = run("solve --config \"" + cfg.string() + "\" --out \"" + (dir_ / "o").string() + "\"");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("potential"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "o" / "eigenvalues.csv"));

  const fs::path cfg2 = write("bad2.ini", "[solver]\nbasis = bvn\ndigits = many\n");
  const Outcome r2 = run("solve --config \"" + cfg2.string() + "\"");
  EXPECT_NE(r2.status, 0);
  EXPECT_NE(r2.err.find("solver.digits"), std::string::npos) << r2.err;
  EXPECT_NE(r2.err.find("line 3"), std::string::npos) << r2.err;

  EXPECT_NE(run("solve").status, 0);
  EXPECT_NE(run("").status, 0);
}

TEST_F(Cli, RerunsAreByteIdentical) {
  const fs::path cfg = write("s.ini",
                             "[potential]\nkind = harmonic\n[scaling]\nd_min = 1\nd_max = 3\n"
                             "samples = 20000\n[run]\nseed = 11\n");
  ASSERT_EQ(run("scaling --quiet --config \"" + cfg.string() + "\" --out \"" + (dir_ / "a").string() + "\"").status, 0);
  ASSERT_EQ(run("scaling --quiet --config \"" + cfg.string() + "\" --out \"" + (dir_ / "b").string() + "\"").status, 0);
  ASSERT_EQ(run("scaling --quiet --config \"" + cfg.string() + "\" --seed 12 --out \"" + (dir_ / "c").string() + "\"").status, 0);
  const std::string a = slurp(dir_ / "a" / "scaling.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b" / "scaling.csv"));
  EXPECT_NE(a, slurp(dir_ / "c" / "scaling.csv"));

  const fs::path sw = write("sw.ini", "[potential]\nkind = harmonic\n[sweep]\nsizes = 8, 12, 16\n");
  ASSERT_EQ(run("sweep --config \"" + sw.string() + "\" --out \"" + (dir_ / "s1").string() + "\"").status, 0);
  ASSERT_EQ(run("sweep --config \"" + sw.string() + "\" --out \"" + (dir_ / "s2").string() + "\"").status, 0);
  EXPECT_EQ(slurp(dir_ / "s1" / "convergence.csv"), slurp(dir_ / "s2" / "convergence.csv"));

  ASSERT_EQ(run("plot --no-timestamp --input \"" + (dir_ / "s1" / "convergence.csv").string() +
                "\" --kind convergence --out \"" + (dir_ / "p1.svg").string() + "\"").status, 0);
  ASSERT_EQ(run("plot --no-timestamp --input \"" + (dir_ / "s1" / "convergence.csv").string() +
                "\" --kind convergence --out \"" + (dir_ / "p2.svg").string() + "\"").status, 0);
  EXPECT_EQ(slurp(dir_ / "p1.svg"), slurp(dir_ / "p2.svg"));
}

TEST_F(Cli, PlotFailuresWriteNothing) {
  const fs::path empty = write("empty.csv", "");
  const Outcome r = run("plot --input \"" + empty.string() + "\" --kind convergence --out \"" +
                    (dir_ / "e.svg").string() + "\"");
  EXPECT_NE(r.status, 0);
  EXPECT_FALSE(r.err.empty());
  EXPECT_FALSE(fs::exists(dir_ / "e.svg"));

  const fs::path wrong = write("wrong.csv", "index,energy\n0,0.5\n");
  const Outcome r2 = run("plot --input \"" + wrong.string() + "\" --kind convergence --out \"" +
                     (dir_ / "w.svg").string() + "\"");
  EXPECT_NE(r2.status, 0);
  EXPECT_NE(r2.err.find("method"), std::string::npos) << r2.err;
  EXPECT_FALSE(fs::exists(dir_ / "w.svg"));

  EXPECT_NE(run("plot --input \"" + wrong.string() + "\" --kind pie").status, 0);
}

TEST_F(Cli, LongRunningGate) {
  const fs::path cfg = write("t.ini",
                             "[potential]\nkind = triangle2d\nmass = 96\n[grid]\nx_min = -4\n"
                             "length = 10.5\nn = 80\ny_min = -5.25\ny_length = 10.5\nn_y = 80\n");
  const Outcome r = run("solve --config \"" + cfg.string() + "\" --out \"" + (dir_ / "o").string() + "\"");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("long-running"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "o"));
}

TEST_F(Cli, MorseBvnWritesCells) {
  const Outcome r = run("solve --config \"" + std::string(PVN_CONFIG_DIR) + "/morse_bvn.ini\" --out \"" +
                    (dir_ / "m").string() + "\"");
  ASSERT_EQ(r.status, 0) << r.err;
  const pvn::CsvTable cells = pvn::read_csv(dir_ / "m" / "cells.csv");
  EXPECT_EQ(cells.rows.size(), 100u);
  int kept = 0;
  for (std::size_t i = 0; i < cells.rows.size(); ++i) kept += cells.number(i, cells.require("kept")) != 0;
  EXPECT_EQ(kept, 48);
  EXPECT_NE(slurp(dir_ / "m" / "meta.txt").find("n_converged = 24"), std::string::npos);
  ASSERT_EQ(run("plot --input \"" + (dir_ / "m" / "cells.csv").string() + "\" --kind cells").status, 0);
  EXPECT_TRUE(fs::exists(dir_ / "m" / "cells.svg"));
}

TEST_F(Cli, EfficiencySingleHbar) {
  const fs::path cfg = write("e.ini",
                             "[potential]\nkind = morse\nmass = 6\ndepth = 12\nbeta = 0.5\n"
                             "[efficiency]\nhbars = 1\n");
  const Outcome r = run("efficiency --config \"" + cfg.string() + "\" --out \"" + (dir_ / "o").string() + "\"");
  ASSERT_EQ(r.status, 0) << r.err;
  const pvn::CsvTable t = pvn::read_csv(dir_ / "o" / "efficiency.csv");
  ASSERT_EQ(t.rows.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(t.rows[i][t.require("status")], "ok");
}

TEST(ShippedConfigs, AllParse) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(PVN_CONFIG_DIR)) {
    if (e.path().extension() != ".ini") continue;
    SCOPED_TRACE(e.path().string());
    const pvn::RunConfig c = pvn::load_config(e.path().string());
    EXPECT_NO_THROW(pvn::make_potential(c.potential));
    ++n;
  }
  EXPECT_GE(n, 6);
}
