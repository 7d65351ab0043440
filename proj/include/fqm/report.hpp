#pragma once

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fqm {

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;

  bool operator==(const WilsonInterval&) const = default;
};

// Wilson score interval at 95% confidence (z = 1.96). Zero trials carry no
// information: the interval is all of [0, 1].
inline WilsonInterval wilson95(std::size_t wins, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double z = 1.96;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(wins) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct TrialRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::optional<int> challenge;       // distinguish game: the hidden bit b
  bool outcome = false;
  std::optional<double> probability;  // exact per-trial win probability, when known
  std::optional<double> wall_ms;      // set only when timing is requested
};

// One game run: config echo, per-trial rows, and summary statistics. The win
// count is game-specific (the runner sets it); finalize derives the rate and
// interval from it.
struct GameResult {
  std::string game;
  std::vector<std::pair<std::string, std::string>> config;
  std::size_t trials = 0;
  std::size_t wins = 0;
  double win_rate = 0.0;
  WilsonInterval interval;
  std::vector<std::pair<std::string, double>> stats;
  std::vector<TrialRow> rows;

  void finalize() {
    win_rate = trials == 0 ? 0.0 : static_cast<double>(wins) / static_cast<double>(trials);
    interval = wilson95(wins, trials);
  }
};

// Shortest round-trip decimal form, locale-independent.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

// One row per trial plus a final summary row whose outcome column holds the
// win rate. Column set is fixed across games: config columns repeat their
// value on every row; challenge/probability/wall_ms are empty when unset.
inline std::string to_csv(const GameResult& r) {
  std::string out = "trial,seed";
  for (const auto& [key, value] : r.config) {
    (void)value;
    out += "," + detail::csv_escape(key);
  }
  out += ",challenge,outcome,probability,wall_ms\n";

  std::string config_cells;
  for (const auto& [key, value] : r.config) {
    (void)key;
    config_cells += "," + detail::csv_escape(value);
  }
  for (const TrialRow& row : r.rows) {
    out += std::to_string(row.trial) + "," + std::to_string(row.seed) + config_cells;
    out += ",";
    if (row.challenge) out += std::to_string(*row.challenge);
    out += row.outcome ? ",1" : ",0";
    out += ",";
    if (row.probability) out += format_double(*row.probability);
    out += ",";
    if (row.wall_ms) out += format_double(*row.wall_ms);
    out += "\n";
  }
  out += "summary," + config_cells + ",," + format_double(r.win_rate) + ",,\n";
  return out;
}

}  // namespace fqm
