// Command-line front end: exact polynomial algebra on JSON coefficient
// arrays plus the seeded Monte Carlo experiment runners.
//
// Exit codes: 0 success / statistical pass, 2 statistical failure,
// 1 usage or runtime error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ffp/ffp.hpp"

namespace {

std::string number_token(double v) {
  if (std::abs(v - std::llround(v)) <= 1e-9 * std::max(1.0, std::abs(v)))
    return std::to_string(std::llround(v));
  return ffp::fmt_double(v);
}

std::string coeff_json(const std::vector<double>& c) {
  std::string out = "[";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ",";
    out += number_token(c[i]);
  }
  out += "]";
  return out;
}

std::vector<double> parse_coeff_array(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a JSON array of coefficients");
  std::vector<double> c;
  for (const auto& v : j) {
    if (!v.is_number()) throw std::invalid_argument("coefficient arrays must contain numbers only");
    c.push_back(v.get<double>());
  }
  return c;
}

struct ExperimentCli {
  std::string config_path;
  std::string dist_text;
  std::string levy_text;
  std::vector<long long> n_values;
  int ell = 0;
  long long trials = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  long long truncation = 0;
  int jobs = -1;
  std::string out_dir;
  std::string format = "json,csv";
};

void add_experiment_flags(CLI::App* cmd, ExperimentCli& opts) {
  cmd->add_option("--config", opts.config_path, "config file (flat key = value format)");
  cmd->add_option("--ell", opts.ell, "degree of the derivative polynomial");
  cmd->add_option("--N", opts.n_values, "ambient degree(s), comma separated")->delimiter(',');
  cmd->add_option("--trials", opts.trials, "Monte Carlo trials");
  auto* seed = cmd->add_option("--seed", opts.seed, "master seed (required; no environment fallback)");
  cmd->callback([seed, &opts] { opts.seed_given = opts.seed_given || seed->count() > 0; });
  cmd->add_option("--dist", opts.dist_text, "root law, e.g. gaussian, rademacher, stable(1.5,0.5,1)");
  cmd->add_option("--levy", opts.levy_text, "Levy triple, e.g. atomic(c=0.5,sigma2=0,atoms=[(1,1)])");
  cmd->add_option("--truncation", opts.truncation, "point process ladder length");
  cmd->add_option("--jobs", opts.jobs, "worker threads (default: machine parallelism)");
  cmd->add_option("--out", opts.out_dir, "output directory for report and CSV data");
  cmd->add_option("--format", opts.format, "any of json,csv (default both)");
}

ffp::ExperimentConfig build_config(ffp::ExperimentKind kind, const ExperimentCli& opts) {
  ffp::ExperimentConfig config;
  if (!opts.config_path.empty()) {
    config = ffp::parse_config(opts.config_path);
    if (config.kind != kind)
      throw std::invalid_argument("config kind '" + ffp::to_string(config.kind) +
                                  "' does not match the subcommand");
  } else {
    config.kind = kind;
    config.trials = 2000;
  }
  if (opts.ell > 0) config.ell = opts.ell;
  if (!opts.n_values.empty()) config.n_values = opts.n_values;
  if (opts.trials > 0) config.trials = opts.trials;
  if (opts.seed_given) {
    config.seed = opts.seed;
    config.seed_set = true;
  }
  if (!opts.dist_text.empty()) config.dist = ffp::dist_from_string(opts.dist_text);
  if (!opts.levy_text.empty()) config.triple = ffp::levy_triple_from_string(opts.levy_text);
  if (opts.truncation > 0) config.pp_truncation = opts.truncation;
  if (opts.jobs >= 0) config.jobs = opts.jobs;
  ffp::validate(config);
  return config;
}

int run_and_emit(ffp::ExperimentKind kind, const ExperimentCli& opts) {
  bool want_json = false, want_csv = false;
  {
    std::stringstream ss(opts.format);
    std::string token;
    while (std::getline(ss, token, ',')) {
      if (token == "json") want_json = true;
      else if (token == "csv") want_csv = true;
      else throw std::invalid_argument("--format accepts json and csv, got '" + token + "'");
    }
  }
  auto config = build_config(kind, opts);
  auto report = ffp::run_experiment(config);
  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
    auto dir = std::filesystem::path(opts.out_dir);
    if (want_json) {
      std::ofstream f(dir / "report.json");
      f << report.to_json().dump(2) << "\n";
    }
    if (want_csv) {
      std::ofstream(dir / "trials.csv") << report.rows_csv();
      std::ofstream(dir / "histograms.csv") << report.histograms_csv();
    }
  }

  std::size_t ok = 0;
  for (const auto& c : report.checks) ok += c.pass ? 1 : 0;
  std::printf("[%s] ell=%d trials=%lld seed=%llu -> %s (%zu/%zu checks, %.2fs)\n", report.kind.c_str(),
              config.ell, config.trials, static_cast<unsigned long long>(config.seed),
              report.passed ? "PASS" : "FAIL", ok, report.checks.size(), report.runtime_seconds);
  for (const auto& c : report.checks)
    if (!c.pass)
      std::printf("  failed: %s value=%.6g target=%.6g tolerance=%.6g\n", c.name.c_str(), c.value, c.target,
                  c.tolerance);
  return report.passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite free probability toolkit"};
  app.require_subcommand(1);

  int hermite_degree = 0;
  auto* hermite_cmd = app.add_subcommand("hermite", "coefficients of the probabilists' Hermite polynomial");
  hermite_cmd->add_option("--degree", hermite_degree, "degree k >= 0")->required();

  int laguerre_degree = 0;
  double laguerre_alpha = 0.0;
  auto* laguerre_cmd = app.add_subcommand("laguerre", "monic generalized Laguerre coefficients");
  laguerre_cmd->add_option("--degree", laguerre_degree, "degree n >= 0")->required();
  laguerre_cmd->add_option("--alpha", laguerre_alpha, "parameter alpha")->required();

  std::string conv_p, conv_q;
  auto* conv_cmd = app.add_subcommand("convolve", "finite free additive convolution of two monic polynomials");
  conv_cmd->add_option("--p", conv_p, "JSON coefficients, highest degree first")->required();
  conv_cmd->add_option("--q", conv_q, "JSON coefficients, highest degree first")->required();

  std::string cum_p;
  auto* cum_cmd = app.add_subcommand("cumulants", "finite free cumulants of a monic polynomial");
  cum_cmd->add_option("--p", cum_p, "JSON coefficients, highest degree first")->required();

  std::string der_p;
  int der_k = 0;
  auto* der_cmd = app.add_subcommand("derive", "monic normalized derivative of degree k");
  der_cmd->add_option("--p", der_p, "JSON coefficients, highest degree first")->required();
  der_cmd->add_option("--k", der_k, "target degree k")->required();

  ExperimentCli clt_roots_opts, clt_poly_opts, clt_cumulants_opts, id_limit_opts;
  add_experiment_flags(app.add_subcommand("clt-roots", "root fluctuation CLT experiment"), clt_roots_opts);
  add_experiment_flags(app.add_subcommand("clt-poly", "coefficient fluctuation CLT experiment"), clt_poly_opts);
  add_experiment_flags(app.add_subcommand("clt-cumulants", "cumulant fluctuation CLT experiment"),
                       clt_cumulants_opts);
  add_experiment_flags(app.add_subcommand("id-limit", "infinitely divisible limit experiment"), id_limit_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (hermite_cmd->parsed()) {
      std::cout << coeff_json(ffp::hermite_signed_coefficients<double>(hermite_degree)) << "\n";
      return 0;
    }
    if (laguerre_cmd->parsed()) {
      std::cout << coeff_json(ffp::laguerre_monic_signed_coefficients<double>(laguerre_degree, laguerre_alpha))
                << "\n";
      return 0;
    }
    if (conv_cmd->parsed()) {
      auto p = ffp::from_signed_coefficients(parse_coeff_array(conv_p));
      auto q = ffp::from_signed_coefficients(parse_coeff_array(conv_q));
      std::cout << coeff_json(ffp::signed_coefficients(ffp::finite_free_convolve(p, q))) << "\n";
      return 0;
    }
    if (cum_cmd->parsed()) {
      auto p = ffp::from_signed_coefficients(parse_coeff_array(cum_p));
      auto kappa = ffp::coeffs_to_cumulants(ffp::top_coefficients(p, p.degree()), p.degree());
      std::cout << coeff_json(kappa) << "\n";
      return 0;
    }
    if (der_cmd->parsed()) {
      auto p = ffp::from_signed_coefficients(parse_coeff_array(der_p));
      std::cout << coeff_json(ffp::signed_coefficients(ffp::normalized_derivative(p, der_k))) << "\n";
      return 0;
    }
    if (app.get_subcommand("clt-roots")->parsed())
      return run_and_emit(ffp::ExperimentKind::clt_roots, clt_roots_opts);
    if (app.get_subcommand("clt-poly")->parsed())
      return run_and_emit(ffp::ExperimentKind::clt_poly, clt_poly_opts);
    if (app.get_subcommand("clt-cumulants")->parsed())
      return run_and_emit(ffp::ExperimentKind::clt_cumulants, clt_cumulants_opts);
    if (app.get_subcommand("id-limit")->parsed())
      return run_and_emit(ffp::ExperimentKind::id_limit, id_limit_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
