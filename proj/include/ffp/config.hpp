#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ffp/experiments.hpp"
#include "ffp/format.hpp"

namespace ffp {

inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.kind == b.kind && a.ell == b.ell && a.n_values == b.n_values && a.trials == b.trials &&
         a.seed == b.seed && a.seed_set == b.seed_set && a.dist == b.dist && a.triple == b.triple &&
         a.pp_truncation == b.pp_truncation && a.jobs == b.jobs && a.z_cap == b.z_cap &&
         a.skew_cap == b.skew_cap && a.kurt_cap == b.kurt_cap && a.residual_cap == b.residual_cap &&
         a.rel_err_cap == b.rel_err_cap && a.ks_cap == b.ks_cap && a.tv_cap == b.tv_cap &&
         a.collapse_cap_factor == b.collapse_cap_factor && a.rank_ratio_cap == b.rank_ratio_cap &&
         a.hs_rate_factor == b.hs_rate_factor && a.hs_final_cap == b.hs_final_cap &&
         a.solve_failure_cap == b.solve_failure_cap && a.hist_lo == b.hist_lo && a.hist_hi == b.hist_hi &&
         a.hist_bins == b.hist_bins;
}

// Flat key = value config format; '#' starts a comment, dist and levy values
// are the tagged records of the corresponding types. serialize_config emits
// the canonical form, and parse(serialize(c)) == c for every valid config.
inline std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream os;
  os << "kind = " << to_string(config.kind) << "\n";
  os << "ell = " << config.ell << "\n";
  os << "N = ";
  for (std::size_t i = 0; i < config.n_values.size(); ++i) {
    if (i) os << ",";
    os << config.n_values[i];
  }
  os << "\n";
  os << "trials = " << config.trials << "\n";
  os << "seed = " << config.seed << "\n";
  os << "dist = " << to_string(config.dist) << "\n";
  if (config.triple) os << "levy = " << to_string(*config.triple) << "\n";
  os << "truncation = " << config.pp_truncation << "\n";
  os << "jobs = " << config.jobs << "\n";
  os << "z_cap = " << fmt_double(config.z_cap) << "\n";
  os << "skew_cap = " << fmt_double(config.skew_cap) << "\n";
  os << "kurt_cap = " << fmt_double(config.kurt_cap) << "\n";
  os << "residual_cap = " << fmt_double(config.residual_cap) << "\n";
  os << "rel_err_cap = " << fmt_double(config.rel_err_cap) << "\n";
  os << "ks_cap = " << fmt_double(config.ks_cap) << "\n";
  os << "tv_cap = " << fmt_double(config.tv_cap) << "\n";
  os << "collapse_cap_factor = " << fmt_double(config.collapse_cap_factor) << "\n";
  os << "rank_ratio_cap = " << fmt_double(config.rank_ratio_cap) << "\n";
  os << "hs_rate_factor = " << fmt_double(config.hs_rate_factor) << "\n";
  os << "hs_final_cap = " << fmt_double(config.hs_final_cap) << "\n";
  os << "solve_failure_cap = " << fmt_double(config.solve_failure_cap) << "\n";
  os << "hist = " << fmt_double(config.hist_lo) << "," << fmt_double(config.hist_hi) << ","
     << config.hist_bins << "\n";
  return os.str();
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  bool have_kind = false;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
    if (blank) continue;
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key or value");

    auto as_ll = [&](const std::string& v) {
      std::size_t used = 0;
      long long out = std::stoll(v, &used);
      if (used != v.size()) throw std::invalid_argument("config: bad integer for " + key);
      return out;
    };
    auto as_double = [&](const std::string& v) {
      std::size_t used = 0;
      double out = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument("config: bad number for " + key);
      return out;
    };

    if (key == "kind") {
      config.kind = experiment_kind_from_string(value);
      have_kind = true;
    } else if (key == "ell") {
      config.ell = static_cast<int>(as_ll(value));
    } else if (key == "N") {
      config.n_values.clear();
      std::istringstream vs(value);
      std::string item;
      while (std::getline(vs, item, ',')) config.n_values.push_back(as_ll(trim(item)));
      if (config.n_values.empty()) throw std::invalid_argument("config: N needs at least one value");
    } else if (key == "trials") {
      config.trials = as_ll(value);
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(std::stoull(value));
      config.seed_set = true;
    } else if (key == "dist") {
      config.dist = dist_from_string(value);
    } else if (key == "levy") {
      config.triple = levy_triple_from_string(value);
    } else if (key == "truncation") {
      config.pp_truncation = as_ll(value);
    } else if (key == "jobs") {
      config.jobs = static_cast<int>(as_ll(value));
    } else if (key == "z_cap") {
      config.z_cap = as_double(value);
    } else if (key == "skew_cap") {
      config.skew_cap = as_double(value);
    } else if (key == "kurt_cap") {
      config.kurt_cap = as_double(value);
    } else if (key == "residual_cap") {
      config.residual_cap = as_double(value);
    } else if (key == "rel_err_cap") {
      config.rel_err_cap = as_double(value);
    } else if (key == "ks_cap") {
      config.ks_cap = as_double(value);
    } else if (key == "tv_cap") {
      config.tv_cap = as_double(value);
    } else if (key == "collapse_cap_factor") {
      config.collapse_cap_factor = as_double(value);
    } else if (key == "rank_ratio_cap") {
      config.rank_ratio_cap = as_double(value);
    } else if (key == "hs_rate_factor") {
      config.hs_rate_factor = as_double(value);
    } else if (key == "hs_final_cap") {
      config.hs_final_cap = as_double(value);
    } else if (key == "solve_failure_cap") {
      config.solve_failure_cap = as_double(value);
    } else if (key == "hist") {
      detail::TextCursor cur{value};
      config.hist_lo = cur.number();
      cur.expect(',');
      config.hist_hi = cur.number();
      cur.expect(',');
      config.hist_bins = static_cast<int>(cur.number());
      if (!cur.done()) throw std::invalid_argument("config: hist expects lo,hi,bins");
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  if (!have_kind) throw std::invalid_argument("config: kind is required");
  if (!config.seed_set) throw std::invalid_argument("config: seed is required and must be stated explicitly");
  validate(config);
  return config;
}

inline ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("parse_config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace ffp
