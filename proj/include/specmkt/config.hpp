#ifndef SPECMKT_CONFIG_HPP
#define SPECMKT_CONFIG_HPP

// Flat key = value experiment configs. Keys mirror the model symbols:
// beta, alpha, gamma, n, xi, xi_split, epsilon, and optionally E plus a
// fixed strategy (s, f) for direct evaluation.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "specmkt/errors.hpp"
#include "specmkt/market.hpp"

namespace specmkt {

struct ExperimentConfig {
  MarketConfig market;
  std::vector<double> xi_split;  // grants; resolved to an explicit list
  double epsilon = 1e-3;
  std::optional<StrategyProfile> strategy;  // present when s and f were given

  GovernmentPolicy policy() const { return GovernmentPolicy::linear(xi_split); }
};

namespace detail {

inline std::string format_number(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view token, const std::string& where) {
  const std::string text(trim(token));
  if (text.empty()) throw config_error(where + ": empty number");
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw config_error(where + ": cannot parse number '" + text + "'");
  }
  if (used != text.size())
    throw config_error(where + ": trailing characters in number '" + text + "'");
  if (!std::isfinite(value)) throw config_error(where + ": number must be finite");
  return value;
}

inline std::vector<double> parse_list(std::string_view value, const std::string& where) {
  std::vector<double> out;
  std::size_t start = 0;
  const std::string text(value);
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = comma == std::string::npos ? text.substr(start)
                                                  : text.substr(start, comma - start);
    out.push_back(parse_number(piece, where));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline int parse_integer(double value, const std::string& where) {
  if (std::abs(value - std::round(value)) > 1e-9)
    throw config_error(where + ": expected an integer, got " + format_number(value));
  return static_cast<int>(std::llround(value));
}

}  // namespace detail

/// Parse a config from text; `name` labels diagnostics ("file:line: ...").
inline ExperimentConfig parse_config(std::string_view text, const std::string& name) {
  std::map<std::string, std::pair<std::vector<double>, int>> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    ++line_no;
    const auto eol = text.find('\n', pos);
    auto line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                               : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw config_error(where + ": expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    if (key.empty()) throw config_error(where + ": missing key");
    if (entries.count(key)) throw config_error(where + ": duplicate key '" + key + "'");
    entries[key] = {detail::parse_list(line.substr(eq + 1), where + ", key '" + key + "'"),
                    line_no};
  }

  const auto take_scalar = [&](const std::string& key,
                               std::optional<double> fallback) -> double {
    const auto it = entries.find(key);
    if (it == entries.end()) {
      if (fallback) return *fallback;
      throw config_error(name + ": missing required key '" + key + "'");
    }
    if (it->second.first.size() != 1)
      throw config_error(name + ":" + std::to_string(it->second.second) + ": key '" + key +
                         "' expects a single value");
    const double v = it->second.first.front();
    entries.erase(it);
    return v;
  };
  const auto take_list = [&](const std::string& key) -> std::optional<std::vector<double>> {
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    auto v = it->second.first;
    entries.erase(it);
    return v;
  };

  ExperimentConfig out;
  out.market.home_calls = take_scalar("beta", std::nullopt);
  out.market.outside_calls = take_scalar("alpha", 1.0);
  out.market.utility_scale = take_scalar("gamma", std::nullopt);
  out.market.total_subsidy = take_scalar("xi", std::nullopt);
  out.epsilon = take_scalar("epsilon", 1e-3);
  if (!(out.epsilon > 0.0)) throw config_error(name + ": epsilon must be positive");

  const auto populations = take_list("n");
  if (!populations) throw config_error(name + ": missing required key 'n'");
  out.market.region_count = static_cast<int>(populations->size());
  for (std::size_t k = 0; k < populations->size(); ++k)
    out.market.populations.push_back(
        detail::parse_integer((*populations)[k], name + ": key 'n'"));

  if (const auto split = take_list("xi_split")) {
    out.xi_split = *split;
  } else {
    out.xi_split = {out.market.total_subsidy / 2.0, out.market.total_subsidy / 2.0};
  }
  out.market.provider_count = static_cast<int>(out.xi_split.size());

  if (const auto cash = take_list("E")) out.market.initial_cash = *cash;

  const auto spend = take_list("s");
  const auto fees = take_list("f");
  if (spend.has_value() != fees.has_value())
    throw config_error(name + ": keys 's' and 'f' must be given together");
  if (spend) {
    const auto J = static_cast<std::size_t>(out.market.provider_count);
    const auto K = static_cast<std::size_t>(out.market.region_count);
    if (spend->size() != J * K)
      throw config_error(name + ": key 's' expects " + std::to_string(J * K) +
                         " row-major values");
    if (fees->size() != J)
      throw config_error(name + ": key 'f' expects one fee per provider");
    StrategyProfile profile{Matrix(J, K), *fees};
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t k = 0; k < K; ++k) profile.spend(j, k) = (*spend)[j * K + k];
    out.strategy = std::move(profile);
  }

  if (!entries.empty()) {
    const auto& [key, value] = *entries.begin();
    throw config_error(name + ":" + std::to_string(value.second) + ": unknown key '" +
                       key + "'");
  }

  validate(out.market);
  validate(GovernmentPolicy::linear(out.xi_split), out.market);
  return out;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.filename().string());
}

/// Canonical text form; parsing it and serializing again is the identity.
inline std::string serialize_config(const ExperimentConfig& cfg) {
  using detail::format_number;
  std::string out;
  const auto list = [&](const std::vector<double>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ", ";
      s += format_number(values[i]);
    }
    return s;
  };
  out += "beta = " + format_number(cfg.market.home_calls) + "\n";
  out += "alpha = " + format_number(cfg.market.outside_calls) + "\n";
  out += "gamma = " + format_number(cfg.market.utility_scale) + "\n";
  std::vector<double> pops;
  for (int n : cfg.market.populations) pops.push_back(static_cast<double>(n));
  out += "n = " + list(pops) + "\n";
  out += "xi = " + format_number(cfg.market.total_subsidy) + "\n";
  out += "xi_split = " + list(cfg.xi_split) + "\n";
  out += "epsilon = " + format_number(cfg.epsilon) + "\n";
  if (!cfg.market.initial_cash.empty()) out += "E = " + list(cfg.market.initial_cash) + "\n";
  if (cfg.strategy) {
    std::vector<double> spend;
    for (std::size_t j = 0; j < cfg.strategy->spend.rows(); ++j)
      for (std::size_t k = 0; k < cfg.strategy->spend.cols(); ++k)
        spend.push_back(cfg.strategy->spend(j, k));
    out += "s = " + list(spend) + "\n";
    out += "f = " + list(cfg.strategy->fees) + "\n";
  }
  return out;
}

}  // namespace specmkt

#endif  // SPECMKT_CONFIG_HPP
