#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "tollcast/date.hpp"
#include "tollcast/error.hpp"
#include "tollcast/rng.hpp"
#include "tollcast/series.hpp"

namespace tollcast {

// A dated disturbance: every day in [date, date + duration_days) has its
// level multiplied by `multiplier` (a surge > 1, a collapse near 0).
struct SynthEvent {
  Date date;
  int duration_days = 1;
  double multiplier = 1.0;
};

struct MissingSpan {
  Date start;
  int length = 1;
};

// Deterministic toll-traffic generator. The clean level composes
// multiplicatively: base * (1 + trend * years) * weekly[dow] *
// (1 + annual_amplitude * cos(2*pi*(doy - peak_day_of_year)/365.25)) *
// event multipliers. The noisy twin adds relative Gaussian noise, replaces it
// with +-10x spikes at `outlier_rate`, blanks the missing spans, and clips
// at zero.
struct SynthConfig {
  Date start_date{2013, 1, 1};
  int n_days = 1461;
  double base_level = 10000.0;
  std::array<double, 7> weekly_amplitudes{1, 1, 1, 1, 1, 1, 1};
  double annual_amplitude = 0.0;
  int peak_day_of_year = 196;
  double trend_per_year = 0.0;
  std::vector<SynthEvent> events;
  double outlier_rate = 0.0;
  std::vector<MissingSpan> missing_spans;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
  int station_code = 1;
  VehicleClass vehicle_class = VehicleClass::tc1;
};

struct SynthResult {
  DailySeries noisy;
  DailySeries clean;
  int outlier_days = 0;
  int clipped_days = 0;
};

namespace detail {

inline void validate(const SynthConfig& cfg) {
  if (cfg.n_days < 1) throw config_error("n_days must be >= 1");
  if (!(cfg.base_level > 0.0)) throw config_error("base_level must be > 0");
  for (double w : cfg.weekly_amplitudes) {
    if (!(w > 0.0)) throw config_error("weekly amplitudes must be > 0");
  }
  if (cfg.annual_amplitude < 0.0 || cfg.annual_amplitude >= 1.0) {
    throw config_error("annual_amplitude must lie in [0, 1)");
  }
  if (cfg.peak_day_of_year < 1 || cfg.peak_day_of_year > 366) {
    throw config_error("peak_day_of_year must lie in 1..366");
  }
  if (cfg.outlier_rate < 0.0 || cfg.outlier_rate > 1.0) {
    throw config_error("outlier_rate must lie in [0, 1]");
  }
  if (cfg.noise_sigma < 0.0) throw config_error("noise_sigma must be >= 0");
  for (const auto& e : cfg.events) {
    if (e.duration_days < 1) throw config_error("event duration must be >= 1");
    if (e.multiplier < 0.0) throw config_error("event multiplier must be >= 0");
  }
  for (const auto& m : cfg.missing_spans) {
    if (m.length < 1) throw config_error("missing span length must be >= 1");
  }
}

}  // namespace detail

// Deterministic daily level before any noise.
inline double synth_clean_value(const SynthConfig& cfg, Date date) {
  const double t = static_cast<double>(date - cfg.start_date);
  const double years = t / 365.25;
  const double trend = 1.0 + cfg.trend_per_year * years;
  const double weekly =
      cfg.weekly_amplitudes[static_cast<std::size_t>(date.day_of_week())];
  constexpr double two_pi = 2.0 * 3.141592653589793238462643383279502884;
  const double annual =
      1.0 + cfg.annual_amplitude *
                std::cos(two_pi * (date.day_of_year() - cfg.peak_day_of_year) / 365.25);
  double v = cfg.base_level * trend * weekly * annual;
  for (const auto& e : cfg.events) {
    if (date >= e.date && date < e.date + e.duration_days) v *= e.multiplier;
  }
  return v;
}

inline SynthResult generate(const SynthConfig& cfg) {
  detail::validate(cfg);
  SynthResult result;
  auto& clean = result.clean;
  clean.station_code = cfg.station_code;
  clean.vehicle_class = cfg.vehicle_class;
  clean.start_date = cfg.start_date;
  clean.values.reserve(static_cast<std::size_t>(cfg.n_days));
  auto& noisy = result.noisy;
  noisy = clean;

  Rng rng(cfg.seed);
  for (int i = 0; i < cfg.n_days; ++i) {
    const Date date = cfg.start_date + i;
    const double level = synth_clean_value(cfg, date);
    if (level < 0.0) {
      throw config_error("trend drives the level negative at " + date.to_string());
    }
    clean.values.emplace_back(level);
    // Fixed draw order per day: one gate draw, then either a sign draw or a
    // noise draw, so the stream stays aligned whatever the outcome.
    double eps;
    if (rng.uniform01() < cfg.outlier_rate) {
      eps = rng.uniform01() < 0.5 ? -10.0 : 10.0;
      ++result.outlier_days;
    } else {
      eps = cfg.noise_sigma > 0.0 ? cfg.noise_sigma * rng.normal() : 0.0;
    }
    double v = level * (1.0 + eps);
    if (v < 0.0) {
      v = 0.0;
      ++result.clipped_days;
    }
    noisy.values.emplace_back(v);
  }
  const Date end = cfg.start_date + (cfg.n_days - 1);
  for (const auto& span : cfg.missing_spans) {
    for (int k = 0; k < span.length; ++k) {
      const Date d = span.start + k;
      if (d < cfg.start_date || d > end) {
        throw config_error("missing span day " + d.to_string() +
                           " lies outside the generated range");
      }
      noisy.values[static_cast<std::size_t>(d - cfg.start_date)].reset();
    }
  }
  return result;
}

// Per-day truth for all three vehicle classes at one station. TC2 and TC3
// scale the base level down and draw their own noise streams; events and
// missing spans are shared (the station goes dark as a whole).
struct StationSynth {
  SynthResult tc1, tc2, tc3;
  std::vector<TrafficRecord> noisy_records;
  std::vector<TrafficRecord> clean_records;
};

inline StationSynth generate_station(const SynthConfig& cfg, double tc2_fraction = 0.3,
                                     double tc3_fraction = 0.12) {
  if (!(tc2_fraction > 0.0) || !(tc3_fraction > 0.0)) {
    throw config_error("class fractions must be > 0");
  }
  StationSynth out;
  out.tc1 = generate(cfg);
  SynthConfig c2 = cfg;
  c2.vehicle_class = VehicleClass::tc2;
  c2.base_level = cfg.base_level * tc2_fraction;
  c2.seed = Rng::derive(cfg.seed, 0x7c2);
  out.tc2 = generate(c2);
  SynthConfig c3 = cfg;
  c3.vehicle_class = VehicleClass::tc3;
  c3.base_level = cfg.base_level * tc3_fraction;
  c3.seed = Rng::derive(cfg.seed, 0x7c3);
  out.tc3 = generate(c3);

  for (int i = 0; i < cfg.n_days; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const Date date = cfg.start_date + i;
    TrafficRecord clean_rec{cfg.station_code, date,
                            std::llround(*out.tc1.clean.values[k]),
                            std::llround(*out.tc2.clean.values[k]),
                            std::llround(*out.tc3.clean.values[k])};
    out.clean_records.push_back(clean_rec);
    if (!out.tc1.noisy.values[k]) continue;  // station dark, no row at all
    TrafficRecord noisy_rec{cfg.station_code, date,
                            std::llround(*out.tc1.noisy.values[k]),
                            std::llround(*out.tc2.noisy.values[k]),
                            std::llround(*out.tc3.noisy.values[k])};
    out.noisy_records.push_back(noisy_rec);
  }
  return out;
}

}  // namespace tollcast
