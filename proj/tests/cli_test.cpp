#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "rcsid/rcsid.hpp"

using namespace rcsid;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;  // stdout and stderr interleaved
};

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("rcsid_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const std::string& name) { return (dir_ / name).string(); }

  static CliResult run(const std::string& args) {
    const std::string cmd = std::string(RCSID_CLI) + " " + args + " 2>&1";
    FILE* p = ::popen(cmd.c_str(), "r");
    CliResult r{-1, {}};
    if (!p) return r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  // 181-sample signature on the 2-degree grid drawn from `d`.
  static std::string write_fixture(const std::string& name, const Distribution& d, std::uint64_t seed,
                                   const std::string& label) {
    const auto az = azimuth_grid(0.0, 2.0, 360.0);
    const RcsSignature sig(az, sample(d, az.size(), seed), 15e9, Polarization::HH, label);
    io::write_signature(path(name), sig);
    return path(name);
  }

  static inline fs::path dir_;
};

}  // namespace

TEST_F(Cli, MieOpticalSphere) {
  const auto r = run("mie --radius 0.1524 --freq 15e9");
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream in(r.out);
  double sigma = 0.0;
  char comma;
  in >> sigma >> comma;
  EXPECT_NEAR(sigma, std::numbers::pi * 0.1524 * 0.1524, 0.02 * sigma);
  EXPECT_NE(r.out.find("Optical"), std::string::npos);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  const auto missing = run("mie --freq 15e9");
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.out.find("--radius"), std::string::npos);
  EXPECT_EQ(run("mie --radius 0.1 --freq 1e9 --exact --approx").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
  EXPECT_EQ(run("mie --radius -1 --freq 1e9").code, 2);
}

TEST_F(Cli, SynthProcessRoundTrip) {
  const auto target = write_fixture("truth.csv", Distribution(DistributionFamily::Lognormal, {-3.0, 0.6}), 9, "drone");
  const std::string synth = "synth --target " + target + " --seed 4 --out " + path("raw.csv") +
                            " --background-out " + path("bg.csv") + " --reference-out " + path("ref.csv");
  ASSERT_EQ(run(synth).code, 0);
  const std::string first = slurp(path("raw.csv"));
  ASSERT_EQ(run(synth).code, 0);
  EXPECT_EQ(slurp(path("raw.csv")), first);
  EXPECT_TRUE(fs::exists(path("raw.csv.manifest.json")));

  const auto r = run("process --sweep " + path("raw.csv") + " --background " + path("bg.csv") + " --reference " +
                     path("ref.csv") + " --gate-start-ns 15 --gate-stop-ns 25 --out " + path("sig.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto truth = io::read_signature(target);
  const auto got = io::read_signature(path("sig.csv"));
  ASSERT_EQ(got.size(), truth.size());
  for (std::size_t i = 0; i < got.size(); ++i)
    EXPECT_NEAR(to_dbsm(got.rcs()[i]), to_dbsm(truth.rcs()[i]), 0.5) << "azimuth " << got.azimuths()[i];
}

TEST_F(Cli, CorruptCsvNamesTheRow) {
  std::ofstream(path("bad.csv")) << "azimuth_deg,rcs_m2\n0,0.1\n2,0.2\n4,zzz\n";
  const auto r = run("fit --input " + path("bad.csv") + " --family Gamma");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("bad.csv:4"), std::string::npos) << r.out;
}

TEST_F(Cli, RankAndBuildDatabase) {
  const auto a = write_fixture("a.csv", Distribution(DistributionFamily::Lognormal, {-3.0, 0.5}), 1, "a");
  const auto b = write_fixture("b.csv", Distribution(DistributionFamily::Lognormal, {-2.0, 0.5}), 2, "b");
  ASSERT_EQ(run("rank --input a=" + a + " --out " + path("rank.csv")).code, 0);
  const auto rows = io::read_ranking(path("rank.csv"));
  ASSERT_FALSE(rows.empty());
  bool lognormal_top = false;
  for (const auto& row : rows)
    if (row.family == DistributionFamily::Lognormal) lognormal_top = row.rank_aic <= 2;
  EXPECT_TRUE(lognormal_top);

  for (const std::string crit : {"aic", "bic"}) {
    const std::string cmd = "build-db --input a=" + a + " --input b=" + b + " --criterion " + crit +
                            " --freq 15e9 --polarization HH --out " + path("db_" + crit + ".json");
    ASSERT_EQ(run(cmd).code, 0);
    const std::string first = slurp(path("db_" + crit + ".json"));
    ASSERT_EQ(run(cmd).code, 0);
    EXPECT_EQ(slurp(path("db_" + crit + ".json")), first);
    const auto db = io::read_database(path("db_" + crit + ".json"));
    EXPECT_EQ(db.class_names(), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(db.criterion, parse_criterion(crit));
  }
}

TEST_F(Cli, ClassifyFullSectorMatchesNoSector) {
  const auto a = write_fixture("ca.csv", Distribution(DistributionFamily::Lognormal, {-3.0, 0.5}), 3, "a");
  const auto b = write_fixture("cb.csv", Distribution(DistributionFamily::Lognormal, {-2.0, 0.5}), 4, "b");
  const auto test = write_fixture("ct.csv", Distribution(DistributionFamily::Lognormal, {-2.0, 0.5}), 5, "t");
  ASSERT_EQ(run("build-db --input a=" + a + " --input b=" + b + " --freq 15e9 --polarization HH --out " +
                path("cdb.json")).code, 0);
  ASSERT_EQ(run("classify --db " + path("cdb.json") + " --input " + test + " --out " + path("d1.csv")).code, 0);
  ASSERT_EQ(run("classify --db " + path("cdb.json") + " --input " + test + " --sector 0:360 --out " +
                path("d2.csv")).code, 0);
  EXPECT_EQ(slurp(path("d1.csv")), slurp(path("d2.csv")));
  EXPECT_EQ(io::read_decision(path("d1.csv")).decision, "b");
  EXPECT_EQ(run("classify --db " + path("cdb.json") + " --input " + test + " --sector 0:400").code, 2);
}

TEST_F(Cli, SimulateWritesParsableOutputs) {
  const std::string db = path("sdb.json");
  ASSERT_EQ(run("build-db --stats near=-12:2 --stats far=-20:2 --freq 15e9 --polarization HH --out " + db).code, 0);
  const auto r = run("simulate --db " + db + " --snr 0,10 --trials 40 --samples 31 --seed 3 --threads 2 --svg --out " +
                     path("sim"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto acc = io::read_accuracy(path("sim_accuracy.csv"));
  ASSERT_EQ(acc.size(), 2u);
  for (const auto& [snr, a] : acc) {
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
  }
  std::size_t total = 0;
  for (const auto& c : io::read_counts(path("sim_counts.csv"))) total += c.count;
  EXPECT_EQ(total, 2u * 2u * 40u);
  const auto svg = slurp(path("sim_accuracy.svg"));
  EXPECT_NE(svg.find("<!-- point series="), std::string::npos);
  const auto manifest = io::read_json(path("sim_manifest.json"));
  EXPECT_EQ(manifest.at("seed"), 3);

  const auto held = run("simulate --db " + db + " --hold-out near --snr 10 --trials 20 --samples 31 --out " +
                        path("held"));
  ASSERT_EQ(held.code, 0) << held.out;
  EXPECT_NE(slurp(path("held_heldout.csv")).find("near,far,1"), std::string::npos);
  EXPECT_EQ(run("simulate --db " + db + " --hold-out nobody --snr 10 --trials 5 --out " + path("x")).code, 2);
}
