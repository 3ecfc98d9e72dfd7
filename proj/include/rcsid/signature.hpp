#pragma once

// Sweep and signature containers, dBsm conversion and azimuth sectors.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcsid/error.hpp"

namespace rcsid {

enum class Polarization { VV, HH };

inline std::string to_string(Polarization p) { return p == Polarization::VV ? "VV" : "HH"; }

inline Polarization parse_polarization(const std::string& s) {
  if (s == "VV" || s == "vv") return Polarization::VV;
  if (s == "HH" || s == "hh") return Polarization::HH;
  throw validation_error("unknown polarization '" + s + "' (expected VV or HH)");
}

inline double to_dbsm(double rcs_m2) {
  detail::require_domain(rcs_m2 > 0.0, "to_dbsm: RCS must be positive");
  return 10.0 * std::log10(rcs_m2);
}

inline double from_dbsm(double dbsm) {
  detail::require(std::isfinite(dbsm), "from_dbsm: value must be finite");
  return std::pow(10.0, dbsm / 10.0);
}

// Wraps an angle in degrees onto [0, 360).
inline double normalize_azimuth(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

/// Raw S21 grid over frequency x azimuth at one polarization.
///
/// Storage is frequency-major: `s21[f * n_azimuth + a]`.
class FrequencySweep {
 public:
  FrequencySweep(std::vector<double> frequencies, std::vector<double> azimuths,
                 Polarization polarization, std::vector<std::complex<double>> s21)
      : frequencies_(std::move(frequencies)),
        azimuths_(std::move(azimuths)),
        polarization_(polarization),
        s21_(std::move(s21)) {
    detail::require(frequencies_.size() >= 2, "FrequencySweep: need at least two frequencies");
    detail::require(!azimuths_.empty(), "FrequencySweep: azimuth axis is empty");
    detail::require(s21_.size() == frequencies_.size() * azimuths_.size(),
                    "FrequencySweep: S21 matrix size does not match axis lengths");
    const double step = frequencies_[1] - frequencies_[0];
    detail::require(step > 0.0, "FrequencySweep: frequency step must be positive");
    for (std::size_t i = 1; i < frequencies_.size(); ++i) {
      const double d = frequencies_[i] - frequencies_[i - 1];
      detail::require(std::abs(d - step) <= 1e-9 * std::abs(frequencies_[i]),
                      "FrequencySweep: frequency grid is not uniform");
    }
    for (std::size_t i = 1; i < azimuths_.size(); ++i)
      detail::require(azimuths_[i] > azimuths_[i - 1],
                      "FrequencySweep: azimuths must be strictly increasing");
  }

  const std::vector<double>& frequencies() const { return frequencies_; }
  const std::vector<double>& azimuths() const { return azimuths_; }
  Polarization polarization() const { return polarization_; }
  const std::vector<std::complex<double>>& s21() const { return s21_; }

  std::size_t n_freq() const { return frequencies_.size(); }
  std::size_t n_azimuth() const { return azimuths_.size(); }
  double frequency_step() const { return frequencies_[1] - frequencies_[0]; }

  std::complex<double> at(std::size_t f, std::size_t a) const { return s21_[f * n_azimuth() + a]; }

  std::vector<std::complex<double>> column(std::size_t a) const {
    std::vector<std::complex<double>> out(n_freq());
    for (std::size_t f = 0; f < n_freq(); ++f) out[f] = at(f, a);
    return out;
  }

 private:
  std::vector<double> frequencies_;
  std::vector<double> azimuths_;
  Polarization polarization_;
  std::vector<std::complex<double>> s21_;
};

/// Calibrated linear RCS (m^2) versus azimuth for one frequency and polarization.
class RcsSignature {
 public:
  RcsSignature(std::vector<double> azimuths, std::vector<double> rcs_linear, double frequency = 0.0,
               Polarization polarization = Polarization::VV, std::string label = {})
      : azimuths_(std::move(azimuths)),
        rcs_(std::move(rcs_linear)),
        frequency_(frequency),
        polarization_(polarization),
        label_(std::move(label)) {
    detail::require(azimuths_.size() == rcs_.size(),
                    "RcsSignature: azimuth and RCS lists differ in length");
    for (std::size_t i = 0; i < rcs_.size(); ++i)
      if (!(rcs_[i] > 0.0) || !std::isfinite(rcs_[i]))
        throw validation_error("RcsSignature: RCS at azimuth " + std::to_string(azimuths_[i]) +
                               " is not a positive finite value");
  }

  const std::vector<double>& azimuths() const { return azimuths_; }
  const std::vector<double>& rcs() const { return rcs_; }
  double frequency() const { return frequency_; }
  Polarization polarization() const { return polarization_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return rcs_.size(); }
  bool empty() const { return rcs_.empty(); }

  RcsSignature with_rcs(std::vector<double> rcs) const {
    return RcsSignature(azimuths_, std::move(rcs), frequency_, polarization_, label_);
  }

 private:
  std::vector<double> azimuths_;
  std::vector<double> rcs_;
  double frequency_;
  Polarization polarization_;
  std::string label_;
};

/// Evenly spaced azimuths `start, start+step, ...` up to and including `stop`.
inline std::vector<double> azimuth_grid(double start, double step, double stop) {
  detail::require(step > 0.0 && stop >= start, "azimuth_grid: invalid range");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = start + step * static_cast<double>(i);
  return out;
}

struct DbStats {
  double mean_db;
  double std_db;
};

// Mean and population standard deviation of the per-sample dBsm values.
inline DbStats db_stats(std::span<const double> rcs_linear) {
  detail::require(!rcs_linear.empty(), "db_stats: empty signature");
  double sum = 0.0;
  for (double x : rcs_linear) sum += to_dbsm(x);
  const double mean = sum / static_cast<double>(rcs_linear.size());
  double ss = 0.0;
  for (double x : rcs_linear) {
    const double d = to_dbsm(x) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / static_cast<double>(rcs_linear.size()))};
}

inline DbStats db_stats(const RcsSignature& sig) { return db_stats(sig.rcs()); }

/// Azimuth sector `center +/- width/2`, closed at both edges.
class SectorSpec {
 public:
  SectorSpec(double center_deg, double width_deg)
      : center_(normalize_azimuth(center_deg)), width_(width_deg) {
    detail::require(width_deg > 0.0 && width_deg <= 360.0,
                    "SectorSpec: width must lie in (0, 360] degrees");
  }

  double center() const { return center_; }
  double width() const { return width_; }
  bool full_circle() const { return width_ >= 360.0; }

  bool contains(double azimuth_deg) const {
    if (full_circle()) return true;
    const double offset = std::fmod(normalize_azimuth(azimuth_deg) - center_ + 540.0, 360.0) - 180.0;
    return std::abs(offset) <= 0.5 * width_ + 1e-9;
  }

 private:
  double center_;
  double width_;
};

/// Indices of the samples that fall inside `sector`, in input order.
///
/// A full-circle sector selects everything. Otherwise an azimuth that is
/// congruent (mod 360) to one already selected is skipped, so a sweep that
/// carries both 0 and 360 contributes that direction once.
inline std::vector<std::size_t> sector_indices(std::span<const double> azimuths,
                                               const SectorSpec& sector) {
  std::vector<std::size_t> idx;
  if (sector.full_circle()) {
    idx.resize(azimuths.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
  }
  std::vector<double> seen;
  for (std::size_t i = 0; i < azimuths.size(); ++i) {
    if (!sector.contains(azimuths[i])) continue;
    const double key = normalize_azimuth(azimuths[i]);
    const bool dup = std::any_of(seen.begin(), seen.end(), [&](double s) {
      const double d = std::abs(s - key);
      return std::min(d, 360.0 - d) < 1e-9;
    });
    if (dup) continue;
    seen.push_back(key);
    idx.push_back(i);
  }
  return idx;
}

inline RcsSignature sector_slice(const RcsSignature& sig, const SectorSpec& sector) {
  if (sector.full_circle()) return sig;
  const auto idx = sector_indices(sig.azimuths(), sector);
  if (idx.empty())
    throw validation_error("sector_slice: sector centered at " + std::to_string(sector.center()) +
                           " deg selects no samples");
  std::vector<double> az, rcs;
  az.reserve(idx.size());
  rcs.reserve(idx.size());
  for (std::size_t i : idx) {
    az.push_back(sig.azimuths()[i]);
    rcs.push_back(sig.rcs()[i]);
  }
  return RcsSignature(std::move(az), std::move(rcs), sig.frequency(), sig.polarization(), sig.label());
}

}  // namespace rcsid
