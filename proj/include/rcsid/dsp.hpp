#pragma once

// Chamber post-processing: background subtraction, Hann band-limiting,
// transform to time, Tukey range gating, transform back and sphere
// calibration. Also a synthetic chamber for desk-side verification.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcsid/error.hpp"
#include "rcsid/fft.hpp"
#include "rcsid/mie.hpp"
#include "rcsid/random.hpp"
#include "rcsid/signature.hpp"

namespace rcsid {

using cplx = std::complex<double>;

struct FreqTrace {
  std::vector<double> frequencies;  // Hz, uniform
  std::vector<cplx> values;

  double step() const { return frequencies[1] - frequencies[0]; }
};

/// Time response on t_m = m / (n * df), m = 0 .. n-1.
///
/// Keeps the originating frequency grid so the forward transform can return to it.
struct TimeTrace {
  std::vector<double> times;  // s
  std::vector<cplx> values;
  double f_start = 0.0;
  double df = 0.0;
  std::size_t n_freq = 0;

  double step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
  double span() const { return step() * static_cast<double>(times.size()); }
};

struct GateSpec {
  double t_start;  // s
  double t_stop;   // s
  double taper_fraction = 0.5;

  void validate() const {
    detail::require(t_start < t_stop, "GateSpec: t_start must be before t_stop");
    detail::require(taper_fraction >= 0.0 && taper_fraction <= 1.0,
                    "GateSpec: taper fraction must lie in [0, 1]");
  }
  double width() const { return t_stop - t_start; }
  double center() const { return 0.5 * (t_start + t_stop); }
};

struct Echo {
  double delay;  // s
  cplx amplitude;
};

/// Synthetic chamber contents.
///
/// `echoes` are clutter returns that appear only while a target is mounted
/// (mount interactions, multipath off the target), so background subtraction
/// cannot remove them. `background` is the static empty-chamber response,
/// present in every sweep; empty means zero.
struct ClutterSpec {
  std::vector<Echo> echoes;
  std::vector<cplx> background;
};

inline FreqTrace background_subtract(const FreqTrace& target, const FreqTrace& background) {
  detail::require(target.frequencies.size() == background.frequencies.size(),
                  "background_subtract: frequency axes differ in length");
  for (std::size_t i = 0; i < target.frequencies.size(); ++i)
    detail::require(std::abs(target.frequencies[i] - background.frequencies[i]) <=
                        1e-9 * std::abs(target.frequencies[i]),
                    "background_subtract: frequency axes differ at bin " + std::to_string(i));
  FreqTrace out{target.frequencies, target.values};
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= background.values[i];
  return out;
}

// w_i = 0.5 (1 - cos(2 pi i / (n - 1))); both ends exactly zero.
inline std::vector<double> hann_weights(std::size_t n) {
  detail::require(n >= 2, "hann_window: need at least two samples");
  std::vector<double> w(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom));
  w.front() = 0.0;
  w.back() = 0.0;
  return w;
}

inline FreqTrace hann_window(const FreqTrace& t) {
  const auto w = hann_weights(t.values.size());
  FreqTrace out = t;
  for (std::size_t i = 0; i < w.size(); ++i) out.values[i] *= w[i];
  return out;
}

/// Inverse DFT after appending (pad_factor - 1) * n zeros.
inline TimeTrace to_time(const FreqTrace& t, int zero_pad_factor = 4) {
  detail::require(zero_pad_factor >= 1, "to_time: zero-pad factor must be >= 1");
  detail::require(t.frequencies.size() >= 2 && t.frequencies.size() == t.values.size(),
                  "to_time: malformed frequency trace");
  const std::size_t n = t.values.size();
  const std::size_t padded = n * static_cast<std::size_t>(zero_pad_factor);
  std::vector<cplx> buf(padded, cplx{0.0, 0.0});
  std::copy(t.values.begin(), t.values.end(), buf.begin());
  TimeTrace out;
  out.values = fft::inverse(std::move(buf));
  out.df = t.step();
  out.f_start = t.frequencies.front();
  out.n_freq = n;
  out.times.resize(padded);
  const double dt = 1.0 / (static_cast<double>(padded) * out.df);
  for (std::size_t m = 0; m < padded; ++m) out.times[m] = dt * static_cast<double>(m);
  return out;
}

/// Forward DFT back onto the original frequency bins (padding bins dropped).
inline FreqTrace to_freq(const TimeTrace& t) {
  auto spec = fft::forward(t.values);
  spec.resize(t.n_freq);
  FreqTrace out;
  out.values = std::move(spec);
  out.frequencies.resize(t.n_freq);
  for (std::size_t k = 0; k < t.n_freq; ++k)
    out.frequencies[k] = t.f_start + t.df * static_cast<double>(k);
  return out;
}

/// Tukey window value at time t for `gate`: 1 across the central
/// (1 - taper_fraction) of the gate, raised-cosine edges, 0 outside.
inline double tukey_weight(double t, const GateSpec& gate) {
  if (t < gate.t_start || t > gate.t_stop) return 0.0;
  const double u = (t - gate.t_start) / gate.width();
  const double a = gate.taper_fraction;
  if (a <= 0.0) return 1.0;
  if (u < 0.5 * a) return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * u / a));
  if (u > 1.0 - 0.5 * a) return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (1.0 - u) / a));
  return 1.0;
}

inline TimeTrace tukey_gate(const TimeTrace& t, const GateSpec& gate) {
  gate.validate();
  if (gate.t_start < 0.0 || gate.t_stop > t.span())
    throw validation_error("tukey_gate: gate [" + std::to_string(gate.t_start) + ", " +
                           std::to_string(gate.t_stop) + "] s lies outside the trace span [0, " +
                           std::to_string(t.span()) + "] s");
  TimeTrace out = t;
  for (std::size_t m = 0; m < out.values.size(); ++m) out.values[m] *= tukey_weight(out.times[m], gate);
  return out;
}

struct ProcessOptions {
  int zero_pad_factor = 4;
  std::optional<double> center_frequency;  // defaults to the band midpoint
};

inline std::size_t nearest_bin(const std::vector<double>& freqs, double f) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < freqs.size(); ++i)
    if (std::abs(freqs[i] - f) < std::abs(freqs[best] - f)) best = i;
  return best;
}

namespace detail {

inline FreqTrace column_trace(const FrequencySweep& s, std::size_t a) {
  return FreqTrace{s.frequencies(), s.column(std::min(a, s.n_azimuth() - 1))};
}

inline void require_same_axis(const FrequencySweep& a, const FrequencySweep& b, const char* what) {
  require(a.n_freq() == b.n_freq(), std::string(what) + ": frequency axes differ in length");
  for (std::size_t i = 0; i < a.n_freq(); ++i)
    require(std::abs(a.frequencies()[i] - b.frequencies()[i]) <= 1e-9 * a.frequencies()[i],
            std::string(what) + ": frequency axes differ");
}

}  // namespace detail

/// Gated response power |X(f_c)|^2 of one azimuth column after
/// subtract -> Hann -> to_time -> gate -> to_freq.
inline double gated_power(const FreqTrace& raw, const FreqTrace& background, const GateSpec& gate,
                          const ProcessOptions& opt, std::size_t center_bin) {
  const auto gated = tukey_gate(to_time(hann_window(background_subtract(raw, background)),
                                        opt.zero_pad_factor),
                                gate);
  const auto spec = to_freq(gated);
  return std::norm(spec.values[center_bin]);
}

/// Per-azimuth processed power of a sweep (the D_RCS or S_RCS list).
inline std::vector<double> processed_powers(const FrequencySweep& sweep,
                                            const FrequencySweep& background, const GateSpec& gate,
                                            const ProcessOptions& opt) {
  detail::require_same_axis(sweep, background, "process_sweep");
  detail::require(background.n_azimuth() == 1 || background.n_azimuth() == sweep.n_azimuth(),
                  "process_sweep: background must have one azimuth or match the sweep");
  const auto& f = sweep.frequencies();
  const double fc = opt.center_frequency.value_or(0.5 * (f.front() + f.back()));
  const std::size_t bin = nearest_bin(f, fc);
  std::vector<double> out(sweep.n_azimuth());
  for (std::size_t a = 0; a < sweep.n_azimuth(); ++a) {
    const double p = gated_power(detail::column_trace(sweep, a),
                                 detail::column_trace(background, a), gate, opt, bin);
    if (!(p > 0.0) || !std::isfinite(p))
      throw validation_error("process_sweep: empty target zone at azimuth " +
                             std::to_string(sweep.azimuths()[a]) + " deg");
    out[a] = p;
  }
  return out;
}

struct Calibration {
  FrequencySweep reference;  // sphere measurement, same frequency axis
  Sphere sphere;
};

/// Turns a raw sweep into a calibrated linear RCS signature.
///
/// The sphere reference runs through the identical chain against the same
/// background; its processed power is averaged over its azimuths (the sphere
/// is aspect-independent) and used as S_RCS for every target azimuth. The
/// sphere's theoretical RCS is the exact series at the extraction frequency.
inline RcsSignature process_sweep(const FrequencySweep& sweep, const FrequencySweep& background,
                                  const GateSpec& gate, const Calibration& cal,
                                  const ProcessOptions& opt = {}, std::string label = {}) {
  gate.validate();
  detail::require_same_axis(sweep, cal.reference, "process_sweep (calibration)");
  const auto d_rcs = processed_powers(sweep, background, gate, opt);
  const auto s_each = processed_powers(cal.reference, background, gate, opt);
  double s_mean = 0.0;
  for (double v : s_each) s_mean += v;
  s_mean /= static_cast<double>(s_each.size());
  const std::vector<double> s_rcs(d_rcs.size(), s_mean);

  const auto& f = sweep.frequencies();
  const double fc = f[nearest_bin(f, opt.center_frequency.value_or(0.5 * (f.front() + f.back())))];
  const double sigma_th = sphere_rcs_exact(cal.sphere, wavelength_of(fc));
  return RcsSignature(sweep.azimuths(), calibrate(d_rcs, s_rcs, sigma_th), fc, sweep.polarization(),
                      std::move(label));
}

/// Gate of the given width centered on the strongest time-domain return,
/// averaged over azimuths, after background subtraction and Hann windowing.
inline GateSpec suggest_gate(const FrequencySweep& sweep, const FrequencySweep& background,
                             double width, double taper_fraction = 0.5, int zero_pad_factor = 4) {
  detail::require(width > 0.0, "suggest_gate: width must be positive");
  std::vector<double> mag;
  double span = 0.0, dt = 0.0;
  for (std::size_t a = 0; a < sweep.n_azimuth(); ++a) {
    const auto tt = to_time(hann_window(background_subtract(detail::column_trace(sweep, a),
                                                            detail::column_trace(background, a))),
                            zero_pad_factor);
    if (mag.empty()) mag.assign(tt.values.size(), 0.0);
    for (std::size_t m = 0; m < mag.size(); ++m) mag[m] += std::abs(tt.values[m]);
    span = tt.span();
    dt = tt.step();
  }
  const auto peak = static_cast<std::size_t>(std::max_element(mag.begin(), mag.end()) - mag.begin());
  const double center = dt * static_cast<double>(peak);
  const double lo = std::clamp(center - 0.5 * width, 0.0, span - width);
  return GateSpec{lo, lo + width, taper_fraction};
}

struct SynthesisConfig {
  std::vector<double> frequencies;  // Hz, uniform
  double target_delay;              // s, round trip to the target zone
  std::uint64_t seed = 0;
};

inline std::vector<double> linear_frequencies(double f_start, double f_stop, std::size_t n) {
  detail::require(n >= 2 && f_stop > f_start && f_start > 0.0, "frequency grid: invalid range");
  std::vector<double> f(n);
  const double step = (f_stop - f_start) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) f[i] = f_start + step * static_cast<double>(i);
  return f;
}

/// Received power ratio for a target of RCS sigma at frequency f.
inline double echo_power(double sigma, double freq_hz, const ChamberGeometry& g) {
  return link_power_ratio(sigma, wavelength_of(freq_hz), g).ratio;
}

namespace detail {

inline cplx delayed(cplx amplitude, double freq_hz, double delay) {
  return amplitude * std::polar(1.0, -2.0 * std::numbers::pi * freq_hz * delay);
}

inline cplx complex_noise(Rng& rng, double power) {
  const double s = std::sqrt(0.5 * power);
  const double re = rng.normal();
  const double im = rng.normal();
  return {s * re, s * im};
}

inline FrequencySweep synthesize(const std::vector<double>& sigma_per_az,
                                 const std::vector<double>& azimuths, const ClutterSpec& clutter,
                                 const ChamberGeometry& geometry, double noise_power,
                                 const SynthesisConfig& cfg, Polarization pol) {
  const auto& f = cfg.frequencies;
  require(clutter.background.empty() || clutter.background.size() == f.size(),
          "synthesize_sweep: background trace length differs from the frequency axis");
  for (const auto& e : clutter.echoes) require(e.delay >= 0.0, "synthesize_sweep: negative delay");
  require(cfg.target_delay >= 0.0, "synthesize_sweep: negative target delay");
  const std::size_t na = azimuths.size();
  std::vector<cplx> s21(f.size() * na);
  Rng rng(cfg.seed);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double link = echo_power(1.0, f[k], geometry);
    cplx fixed = clutter.background.empty() ? cplx{} : clutter.background[k];
    for (const auto& e : clutter.echoes) fixed += delayed(e.amplitude, f[k], e.delay);
    const cplx target_phase = delayed(1.0, f[k], cfg.target_delay);
    for (std::size_t a = 0; a < na; ++a) {
      cplx v = fixed + std::sqrt(sigma_per_az[a] * link) * target_phase;
      if (noise_power > 0.0) v += complex_noise(rng, noise_power);
      s21[k * na + a] = v;
    }
  }
  return FrequencySweep(f, azimuths, pol, std::move(s21));
}

}  // namespace detail

/// Synthetic target sweep.
///
/// S21(f, phi) = background(f) + sum_c a_c e^{-i 2 pi f d_c}
///             + sqrt(sigma(phi) k(f)) e^{-i 2 pi f d_t} + n,
/// with k(f) the compact-range link factor and n complex Gaussian noise whose
/// power is `noise_floor_db` relative to the mean target echo power at the
/// band center. Deterministic for a given seed.
inline FrequencySweep synthesize_sweep(const RcsSignature& target, const ClutterSpec& clutter,
                                       const ChamberGeometry& geometry, double noise_floor_db,
                                       const SynthesisConfig& cfg) {
  detail::require(cfg.frequencies.size() >= 2, "synthesize_sweep: need a frequency grid");
  const double fc = 0.5 * (cfg.frequencies.front() + cfg.frequencies.back());
  double mean_sigma = 0.0;
  for (double s : target.rcs()) mean_sigma += s;
  mean_sigma /= static_cast<double>(target.size());
  const double noise_power =
      std::isfinite(noise_floor_db) ? echo_power(mean_sigma, fc, geometry) * std::pow(10.0, noise_floor_db / 10.0)
                                    : 0.0;
  return detail::synthesize(target.rcs(), target.azimuths(), clutter, geometry, noise_power, cfg,
                            target.polarization());
}

/// Empty-chamber sweep (one azimuth): the static background plus noise of the
/// given absolute power. Target-borne clutter echoes are not present.
inline FrequencySweep synthesize_background(const ClutterSpec& clutter, double noise_power,
                                            const SynthesisConfig& cfg,
                                            Polarization pol = Polarization::VV) {
  ClutterSpec static_only{{}, clutter.background};
  const ChamberGeometry unit{1.0, 0.0, 1.0, 1.0, 1.0};
  return detail::synthesize({0.0}, {0.0}, static_only, unit, noise_power, cfg, pol);
}

}  // namespace rcsid
