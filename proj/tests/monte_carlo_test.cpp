#include <cmath>

#include <gtest/gtest.h>

#include "rcsid/monte_carlo.hpp"

using namespace rcsid;
using F = DistributionFamily;

namespace {

FittedModel lognormal(double mu, double s) { return FittedModel{Distribution(F::Lognormal, {mu, s}), 2, 0.0, 0}; }

std::map<std::string, Generator> generators_of(const ModelDatabase& db) {
  std::map<std::string, Generator> g;
  for (const auto& [name, m] : db.classes) g.emplace(name, m.dist);
  return g;
}

}  // namespace

TEST(NoisePower, Examples) {
  EXPECT_NEAR(noise_power(std::vector<double>{2.0, 2.0}, 10.0), 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(noise_power(std::vector<double>{0.5, 1.5}, 0.0), 1.0);
  EXPECT_NEAR(noise_power(std::vector<double>{1.0, 3.0}, 3.0103), 1.0, 1e-5);
  EXPECT_THROW(noise_power(std::vector<double>{}, 3.0), validation_error);
}

TEST(InjectNoise, InfiniteSnrIsIdentity) {
  const std::vector<double> xs{0.1, 0.5, 2.0};
  EXPECT_EQ(inject_noise(xs, {std::numeric_limits<double>::infinity(), 3}), xs);
}

TEST(InjectNoise, MeanPowerAddsNoisePower) {
  const std::vector<double> ones(1000000, 1.0);
  const auto noisy = inject_noise(ones, {0.0, 5});
  double m = 0.0;
  for (double v : noisy) m += v;
  m /= static_cast<double>(noisy.size());
  EXPECT_NEAR(m, 2.0, 0.02);
  for (double v : noisy) EXPECT_GE(v, noisy_rcs_floor);
}

TEST(InjectNoise, Deterministic) {
  const std::vector<double> xs{0.1, 0.5, 2.0, 0.7};
  EXPECT_EQ(inject_noise(xs, {4.0, 11}), inject_noise(xs, {4.0, 11}));
  EXPECT_NE(inject_noise(xs, {4.0, 11}), inject_noise(xs, {4.0, 12}));
  const RcsSignature sig({0, 90, 180, 270}, xs);
  EXPECT_EQ(inject_noise(sig, {4.0, 11}).rcs(), inject_noise(xs, {4.0, 11}));
}

TEST(SnrSweep, FarSeparatedClassesArePerfect) {
  ModelDatabase db;
  db.classes.emplace("a", lognormal(-3.0, 0.2));
  db.classes.emplace("b", lognormal(-1.0, 0.2));  // 10 s apart
  const auto r = run_snr_sweep(db, generators_of(db), {{20.0}, 100, 181, std::nullopt, 1, 1});
  EXPECT_DOUBLE_EQ(r.accuracy[0], 1.0);
  const auto m = confusion_matrix(r, 20.0);
  EXPECT_DOUBLE_EQ(m[0][0], 1.0);
  EXPECT_DOUBLE_EQ(m[1][1], 1.0);
}

TEST(SnrSweep, IdenticalModelsGiveChance) {
  ModelDatabase db;
  for (const char* name : {"a", "b", "c"}) db.classes.emplace(name, lognormal(-2.0, 0.5));
  const std::size_t trials = 300;
  const auto r = run_snr_sweep(db, generators_of(db), {{10.0}, trials, 181, std::nullopt, 2, 1});
  const double m = 3.0, se = std::sqrt((1.0 / m) * (1.0 - 1.0 / m) / (trials * m));
  EXPECT_NEAR(r.accuracy[0], 1.0 / m, 3.0 * se);
  for (const auto& row : confusion_matrix(r, 10.0)) {
    double s = 0.0;
    for (double v : row) s += v;
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(SnrSweep, MirroredClassesGiveSymmetricConfusion) {
  // ln X ~ N(+-0.15, 0.5): the two classes are mirror images in the log domain.
  ModelDatabase db;
  db.classes.emplace("lo", lognormal(-0.15, 0.5));
  db.classes.emplace("hi", lognormal(0.15, 0.5));
  const std::size_t trials = 2000;
  const auto r = run_snr_sweep(db, generators_of(db), {{std::numeric_limits<double>::infinity()}, trials, 3, std::nullopt, 7, 1});
  const auto m = confusion_matrix(r, r.snr_grid[0]);
  const double p = 0.5 * (m[0][1] + m[1][0]);
  const double se = std::sqrt(2.0 * p * (1.0 - p) / trials);
  EXPECT_NEAR(m[0][1], m[1][0], 3.0 * se + 1e-12);
}

TEST(SnrSweep, AccuracyIsMeanOfDiagonal) {
  ModelDatabase db;
  db.classes.emplace("a", lognormal(-2.0, 0.5));
  db.classes.emplace("b", lognormal(-1.7, 0.5));
  const auto r = run_snr_sweep(db, generators_of(db), {{0.0, 6.0}, 50, 31, std::nullopt, 3, 1});
  for (double snr : r.snr_grid) {
    const auto m = confusion_matrix(r, snr);
    EXPECT_NEAR(r.accuracy[snr_index(r, snr)], 0.5 * (m[0][0] + m[1][1]), 1e-12);
  }
  EXPECT_THROW(confusion_matrix(r, 3.0), validation_error);
}

TEST(SnrSweep, ThreadCountDoesNotChangeResults) {
  ModelDatabase db;
  db.classes.emplace("a", lognormal(-2.0, 0.5));
  db.classes.emplace("b", lognormal(-1.8, 0.5));
  db.classes.emplace("c", lognormal(-1.6, 0.4));
  SweepOptions opt{{0.0, 5.0, 10.0}, 40, 61, SectorSpec(0.0, 120.0), 99, 1};
  const auto seq = run_snr_sweep(db, generators_of(db), opt);
  opt.threads = 4;
  const auto par = run_snr_sweep(db, generators_of(db), opt);
  EXPECT_EQ(seq.counts, par.counts);
  EXPECT_EQ(seq.accuracy, par.accuracy);
}

TEST(SnrSweep, ReplayedSignatures) {
  ModelDatabase db;
  db.classes.emplace("a", lognormal(-3.0, 0.3));
  db.classes.emplace("b", lognormal(-1.0, 0.3));
  const auto az = azimuth_grid(0.0, 2.0, 360.0);
  std::map<std::string, Generator> g{
      {"a", RcsSignature(az, sample(db.classes.at("a").dist, az.size(), 1))},
      {"b", RcsSignature(az, sample(db.classes.at("b").dist, az.size(), 2))}};
  const auto r = run_snr_sweep(db, g, {{15.0}, 30, 181, SectorSpec(0.0, 120.0), 4, 1});
  EXPECT_DOUBLE_EQ(r.accuracy[0], 1.0);
}

TEST(SnrSweep, Validation) {
  ModelDatabase db;
  db.classes.emplace("a", lognormal(-3.0, 0.3));
  db.classes.emplace("b", lognormal(-1.0, 0.3));
  auto g = generators_of(db);
  EXPECT_THROW(run_snr_sweep(db, g, {{}, 10, 10, std::nullopt, 0, 1}), validation_error);
  EXPECT_THROW(run_snr_sweep(db, g, {{1.0}, 0, 10, std::nullopt, 0, 1}), validation_error);
  g.erase("b");
  EXPECT_THROW(run_snr_sweep(db, g, {{1.0}, 10, 10, std::nullopt, 0, 1}), validation_error);
}

TEST(HeldOut, DuplicateModelTakesEverything) {
  ModelDatabase db;
  db.classes.emplace("a", lognormal(-3.0, 0.4));
  db.classes.emplace("b", lognormal(-1.0, 0.4));
  db.classes.emplace("twin", lognormal(-1.0, 0.4));
  const auto reps = held_out_experiment(db, "twin", {Criterion::AIC, {20.0}, 100, 181, 5, 1});
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_DOUBLE_EQ(reps[0].assignment_histogram.at("b"), 1.0);
  double s = 0.0;
  for (const auto& [k, v] : reps[0].assignment_histogram) s += v;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_THROW(held_out_experiment(db, "nope", {Criterion::AIC, {20.0}, 10, 181, 5, 1}), validation_error);
}

TEST(HeldOut, FromTrainingSamples) {
  std::map<std::string, std::vector<double>> training{
      {"a", sample(Distribution(F::Lognormal, {-3.0, 0.4}), 181, 1)},
      {"b", sample(Distribution(F::Lognormal, {-1.0, 0.4}), 181, 2)},
      {"c", sample(Distribution(F::Lognormal, {-1.3, 0.4}), 181, 3)}};
  const auto reps = held_out_experiment(training, "c", {Criterion::AIC, {0.0, 20.0}, 100, 181, 5, 1});
  ASSERT_EQ(reps.size(), 2u);
  EXPECT_GT(reps[1].assignment_histogram.at("b"), 0.95);
  EXPECT_THROW(held_out_experiment(training, "zz", {Criterion::AIC, {0.0}, 10, 181, 5, 1}), validation_error);
}
