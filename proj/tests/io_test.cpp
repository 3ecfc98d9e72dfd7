#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "rcsid/rcsid.hpp"

using namespace rcsid;
using F = DistributionFamily;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const auto p = fs::temp_directory_path() / ("rcsid_io_test_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Csv, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 15e9})
    EXPECT_EQ(std::strtod(io::format_double(v).c_str(), nullptr), v);
}

TEST(Csv, SignatureRoundTrip) {
  const auto az = azimuth_grid(0.0, 2.0, 360.0);
  const RcsSignature sig(az, sample(Distribution(F::Lognormal, {-3.0, 0.5}), az.size(), 3), 15e9,
                         Polarization::HH, "M600");
  const auto path = scratch() / "sig.csv";
  io::write_signature(path, sig);
  const auto back = io::read_signature(path);
  EXPECT_EQ(back.azimuths(), sig.azimuths());
  EXPECT_EQ(back.rcs(), sig.rcs());
  EXPECT_EQ(back.frequency(), 15e9);
  EXPECT_EQ(back.polarization(), Polarization::HH);
  EXPECT_EQ(back.label(), "M600");
  EXPECT_EQ(io::signature_csv(back), slurp(path));
}

TEST(Csv, CorruptRowNamesFileAndLine) {
  std::istringstream in("azimuth_deg,rcs_m2\n0,0.1\n2,abc\n");
  const auto t = io::parse_csv(in, "x.csv", io::signature_header);
  try {
    io::signature_from_table(t);
    FAIL();
  } catch (const validation_error& e) {
    EXPECT_NE(std::string(e.what()).find("x.csv:3"), std::string::npos) << e.what();
  }
  std::istringstream bad_header("az,rcs\n0,1\n");
  EXPECT_THROW(io::parse_csv(bad_header, "y.csv", io::signature_header), validation_error);
  std::istringstream ragged("azimuth_deg,rcs_m2\n0,1,2\n");
  try {
    io::parse_csv(ragged, "z.csv", io::signature_header);
    FAIL();
  } catch (const validation_error& e) {
    EXPECT_NE(std::string(e.what()).find("z.csv:2"), std::string::npos);
  }
  std::istringstream negative("azimuth_deg,rcs_m2\n0,1\n2,-1\n");
  EXPECT_THROW(io::signature_from_table(io::parse_csv(negative, "n.csv", io::signature_header)), validation_error);
}

TEST(Csv, SweepRoundTripAndAxisChecks) {
  const FrequencySweep s({1e9, 2e9, 3e9}, {0.0, 2.0}, Polarization::VV,
                         {{1, 2}, {3, 4}, {5, 6}, {7, 8}, {9, 10}, {11, 12}});
  const auto path = scratch() / "sweep.csv";
  io::write_sweep(path, s);
  const auto back = io::read_sweep(path);
  EXPECT_EQ(back.s21(), s.s21());
  EXPECT_EQ(back.frequencies(), s.frequencies());
  EXPECT_EQ(back.azimuths(), s.azimuths());

  const std::string head = "freq_hz,azimuth_deg,polarization,s21_real,s21_imag\n";
  std::istringstream missing(head + "1,0,VV,1,0\n1,2,VV,1,0\n2,0,VV,1,0\n");
  EXPECT_THROW(io::sweep_from_table(io::parse_csv(missing, "m.csv", io::sweep_header)), validation_error);
  std::istringstream unsorted(head + "2,0,VV,1,0\n1,0,VV,1,0\n");
  EXPECT_THROW(io::sweep_from_table(io::parse_csv(unsorted, "u.csv", io::sweep_header)), validation_error);
  std::istringstream mixed(head + "1,0,VV,1,0\n2,0,HH,1,0\n");
  EXPECT_THROW(io::sweep_from_table(io::parse_csv(mixed, "p.csv", io::sweep_header)), validation_error);
}

TEST(Csv, ReportsRoundTrip) {
  std::map<std::string, Ranking> rankings;
  rankings.emplace("a", rank_models(sample(Distribution(F::Gamma, {2.0, 1.0}), 181, 1)));
  const auto dir = scratch();
  io::write_text(dir / "rank.csv", io::ranking_csv(rankings));
  const auto rows = io::read_ranking(dir / "rank.csv");
  ASSERT_EQ(rows.size(), rankings.at("a").scores.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& s = rankings.at("a").scores[i];
    EXPECT_EQ(rows[i].family, s.family);
    EXPECT_EQ(rows[i].aic, s.aic);
    EXPECT_EQ(rows[i].rank_bic, s.rank_bic);
    EXPECT_EQ(rows[i].loglik, s.loglik);
  }

  ModelDatabase db;
  db.classes.emplace("x", FittedModel{Distribution(F::Lognormal, {-2.0, 0.4}), 2, 0.0, 0});
  db.classes.emplace("y", FittedModel{Distribution(F::Lognormal, {-1.5, 0.4}), 2, 0.0, 0});
  std::map<std::string, Generator> g;
  for (const auto& [k, m] : db.classes) g.emplace(k, m.dist);
  const auto r = run_snr_sweep(db, g, {{0.0, 10.0}, 20, 31, std::nullopt, 1, 1});
  io::write_text(dir / "counts.csv", io::counts_csv(r));
  io::write_text(dir / "acc.csv", io::accuracy_csv(r));
  const auto counts = io::read_counts(dir / "counts.csv");
  EXPECT_EQ(counts.size(), 8u);
  std::size_t total = 0;
  for (const auto& c : counts) total += c.count;
  EXPECT_EQ(total, 2u * 2u * 20u);
  const auto acc = io::read_accuracy(dir / "acc.csv");
  ASSERT_EQ(acc.size(), 2u);
  EXPECT_EQ(acc[1].second, r.accuracy[1]);

  const auto decision = classify_map(db, std::vector<double>{0.1, 0.2, 0.15});
  io::write_text(dir / "dec.csv", io::decision_csv(decision));
  const auto back = io::read_decision(dir / "dec.csv");
  EXPECT_EQ(back.decision, decision.decision);
  EXPECT_EQ(back.log_likelihoods, decision.log_likelihoods);
}

TEST(Json, FittedModelRoundTrip) {
  for (auto f : all_families) {
    std::vector<double> xs = sample(Distribution(F::Gamma, {3.0, 1.0}), 200, 5);
    if (f == F::Normal || f == F::GEV) xs = sample(Distribution(F::Normal, {5.0, 1.0}), 200, 5);
    const auto m = fit_mle(f, xs);
    const auto j = io::to_json(m);
    EXPECT_EQ(j.at("params").size(), param_names(f).size());
    EXPECT_EQ(j.contains("beta_scale"), f == F::Beta);
    const auto back = io::fitted_model_from_json(j, "mem");
    EXPECT_EQ(back.family(), f);
    EXPECT_EQ(back.params(), m.params());
    EXPECT_EQ(back.loglik, m.loglik);
    EXPECT_EQ(back.n, m.n);
    EXPECT_EQ(back.dist.beta_scale(), m.dist.beta_scale());
    EXPECT_EQ(io::dump(io::to_json(back)), io::dump(j));
  }
}

TEST(Json, DatabaseSchemaAndErrors) {
  ModelDatabase db;
  db.criterion = Criterion::BIC;
  db.frequency = 15e9;
  db.polarization = Polarization::HH;
  db.classes.emplace("a", FittedModel{Distribution(F::Gamma, {2.0, 0.1}), 2, -10.0, 181});
  db.classes.emplace("b", FittedModel{Distribution(F::Normal, {0.3, 0.1}), 2, -11.0, 181});
  const auto j = io::to_json(db);
  EXPECT_EQ(j.at("schema"), io::database_schema);
  EXPECT_TRUE(j.at("classes").at("b").at("support")[0].is_null());
  const auto back = io::database_from_json(j, "mem");
  EXPECT_EQ(back.criterion, Criterion::BIC);
  EXPECT_EQ(back.class_names(), db.class_names());
  EXPECT_EQ(io::dump(io::to_json(back)), io::dump(j));

  auto wrong = j;
  wrong["schema"] = "something/9";
  EXPECT_THROW(io::database_from_json(wrong, "mem"), validation_error);
  auto bad_family = j;
  bad_family["classes"]["a"]["family"] = "Cauchy";
  EXPECT_THROW(io::database_from_json(bad_family, "mem"), validation_error);
  auto bad_param = j;
  bad_param["classes"]["a"]["params"]["shape"] = -1.0;
  EXPECT_THROW(io::database_from_json(bad_param, "mem"), validation_error);
  auto missing = j;
  missing["classes"]["a"]["params"].erase("scale");
  EXPECT_THROW(io::database_from_json(missing, "mem"), validation_error);
}

TEST(Config, ParsesAndRejectsUnknownKeys) {
  const std::vector<io::ConfigKey> schema{{"gate_start_ns", io::ValueType::Number, ""},
                                          {"pad", io::ValueType::Integer, ""},
                                          {"snr", io::ValueType::NumberList, ""},
                                          {"label", io::ValueType::Text, ""}};
  std::istringstream good("# gate\ngate_start_ns = 17.5\npad=4  # comment\nsnr = 0, 2,4\nlabel = M600\n");
  const auto cfg = io::parse_config(good, "run.cfg", schema);
  EXPECT_EQ(cfg.number("gate_start_ns", 0.0), 17.5);
  EXPECT_EQ(cfg.integer("pad", 0), 4);
  EXPECT_EQ(cfg.numbers("snr", {}), (std::vector<double>{0, 2, 4}));
  EXPECT_EQ(cfg.text("label", ""), "M600");
  EXPECT_EQ(cfg.number("missing", 3.0), 3.0);
  EXPECT_EQ(cfg.canonical(), "gate_start_ns=17.5\nlabel=M600\npad=4\nsnr=0, 2,4\n");

  std::istringstream unknown("gate_start_ns = 1\ngate_stop = 2\n");
  try {
    io::parse_config(unknown, "run.cfg", schema);
    FAIL();
  } catch (const validation_error& e) {
    EXPECT_NE(std::string(e.what()).find("run.cfg:2"), std::string::npos) << e.what();
  }
  std::istringstream dup("pad = 1\npad = 2\n");
  EXPECT_THROW(io::parse_config(dup, "d.cfg", schema), validation_error);
  std::istringstream badnum("pad = 1.5\n");
  EXPECT_THROW(io::parse_config(badnum, "b.cfg", schema), validation_error);
  std::istringstream noeq("pad 1\n");
  EXPECT_THROW(io::parse_config(noeq, "e.cfg", schema), validation_error);
}

TEST(Manifest, DigestsAndFields) {
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto dir = scratch();
  io::write_text(dir / "in.txt", "abc");
  io::RunManifest m;
  m.command = "test";
  m.seed = 42;
  m.add_input(dir / "in.txt");
  m.write(dir / "m.json");
  const auto j = io::read_json(dir / "m.json");
  EXPECT_EQ(j.at("version"), version);
  EXPECT_EQ(j.at("seed"), 42);
  EXPECT_EQ(j.at("inputs").at((dir / "in.txt").string()), io::sha256_hex("abc"));
  EXPECT_FALSE(j.at("started_utc").get<std::string>().empty());
}

TEST(Svg, EmbedsExactPoints) {
  const std::vector<double> x{0, 2, 4}, y{0.25, 0.5, 0.875};
  const auto svg = io::accuracy_svg({{"full", x, y}});
  EXPECT_NE(svg.find("<!-- point series=full snr_db=2 accuracy=0.5 -->"), std::string::npos);
  EXPECT_NE(svg.find("<!-- point series=full snr_db=4 accuracy=0.875 -->"), std::string::npos);
  EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
  EXPECT_THROW(io::accuracy_svg({}), validation_error);
}
