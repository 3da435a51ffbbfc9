#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpmix/distances.hpp"
#include "dpmix/f0_check.hpp"
#include "dpmix/harness.hpp"
#include "dpmix/mixture_json.hpp"
#include "dpmix/sieve.hpp"
#include "dpmix/tails.hpp"

namespace {

std::vector<double> parse_grid_spec(const std::string& spec) {
  std::stringstream ss(spec);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 3)
    throw std::runtime_error("--grid expects lo:hi:points, got '" + spec + "'");
  return dpmix::make_log_grid(std::stod(parts[0]), std::stod(parts[1]),
                              std::stoi(parts[2]));
}

int cmd_tails(const std::string& prior_path, const std::string& statistic,
              const std::string& grid_spec, long samples, std::uint64_t seed,
              const std::string& out) {
  const dpmix::BaseMeasureSpec spec = dpmix::parse_base_measure_file(prior_path);
  const dpmix::TailStatistic stat = dpmix::tail_statistic_from_name(statistic);
  std::vector<double> grid;
  if (!grid_spec.empty()) {
    grid = parse_grid_spec(grid_spec);
  } else {
    grid = dpmix::quantile_log_grid(
        dpmix::sample_statistic(spec, stat, samples, seed));
  }
  const dpmix::TailEstimate est = dpmix::estimate_survival(spec, stat, grid, samples, seed);
  std::optional<double> analytic;
  if (stat == dpmix::TailStatistic::condition_number)
    analytic = dpmix::analytic_condition_number_exponent(spec.covariance);
  if (!out.empty()) dpmix::write_tail_csv(out, est, analytic);
  std::cout << "statistic: " << est.statistic << "\n"
            << "samples:   " << est.n_samples << "\n"
            << "slope:     " << est.fitted_slope << " (stderr " << est.slope_stderr
            << ")\n";
  if (analytic) std::cout << "analytic:  " << -*analytic << "\n";
  return 0;
}

int cmd_distance(const std::string& f_path, const std::string& g_path,
                 const std::string& metric, long budget, std::uint64_t seed) {
  const dpmix::MixtureDensity f = dpmix::load_mixture(f_path);
  const dpmix::MixtureDensity g = dpmix::load_mixture(g_path);
  dpmix::RngStream rng(seed);
  dpmix::DistanceEstimate est{};
  if (metric == "hellinger")
    est = dpmix::hellinger(f, g, budget, rng);
  else if (metric == "l1")
    est = dpmix::l1_distance(f, g, budget, rng);
  else if (metric == "kl")
    est = dpmix::kl_mc(f, g, budget, rng);
  else
    throw std::runtime_error("--metric must be hellinger, l1 or kl");
  std::cout << metric << ": " << est.value << " (stderr " << est.stderr_ << ", n_evals "
            << est.n_evals << ")\n";
  return 0;
}

void write_kv_csv(const std::string& path,
                  const std::vector<std::pair<std::string, double>>& rows) {
  std::ofstream outf(path);
  if (!outf) throw std::runtime_error("cannot open " + path);
  outf.precision(17);
  outf << "name,value\n";
  for (const auto& [k, v] : rows) outf << k << "," << v << "\n";
}

int cmd_sieve(const std::string& mode, dpmix::SieveParams p, double a_bar, double a_under,
              double u, double r, double kappa, double c, const std::string& out) {
  std::vector<std::pair<std::string, double>> rows;
  if (mode == "entropy") {
    dpmix::EntropyParams ep;
    ep.H = p.H;
    ep.M = p.M;
    ep.sigma = p.sigma;
    ep.epsilon = p.epsilon;
    ep.d = p.d;
    ep.a_bar.assign(static_cast<std::size_t>(p.H), a_bar);
    ep.a_under.assign(static_cast<std::size_t>(p.H), a_under);
    ep.u.assign(static_cast<std::size_t>(p.H), u);
    rows.emplace_back("log_covering_bound", dpmix::entropy_bound(ep));
  } else if (mode == "complement") {
    const dpmix::ComplementBound b = dpmix::prior_complement_bound(p);
    rows.emplace_back("first_term", b.first_term);
    rows.emplace_back("second_term", b.second_term);
    rows.emplace_back("total", b.total);
  } else if (mode == "summability") {
    dpmix::TailRequirements req;
    req.r = r;
    req.c1 = p.c1;
    req.c2 = p.c2;
    req.c3 = p.c3;
    req.kappa = kappa;
    req.d = p.d;
    const dpmix::SummabilityResult s = dpmix::summability_series(p, req, c);
    rows.emplace_back("log_value", s.log_value);
    rows.emplace_back("value", s.value);
    rows.emplace_back("diverges_r", s.diverges_r ? 1.0 : 0.0);
    rows.emplace_back("diverges_kappa", s.diverges_kappa ? 1.0 : 0.0);
    rows.emplace_back("K_partial", s.K_partial);
    rows.emplace_back("c4", s.c4);
    rows.emplace_back("H", static_cast<double>(s.H));
    rows.emplace_back("C_limit", dpmix::sieve_constant_limit(c, p.c2, p.d));
  } else {
    throw std::runtime_error("--mode must be entropy, complement or summability");
  }
  for (const auto& [k, v] : rows) std::cout << k << ": " << v << "\n";
  if (!out.empty()) write_kv_csv(out, rows);
  return 0;
}

int cmd_fit(const std::string& data_path, bool header, const std::string& prior_path,
            double alpha, long trunc, long iters, long burnin, long thin,
            std::uint64_t seed, bool standardize, const std::string& out) {
  const Eigen::MatrixXd data = dpmix::ingest_data(data_path, header);
  std::cout << "data: " << data.rows() << " rows, " << data.cols() << " columns\n";
  dpmix::DPMixtureModel model;
  model.alpha = alpha;
  model.base = dpmix::parse_base_measure_file(prior_path);
  model.H = trunc > 0 ? trunc : dpmix::default_truncation(alpha, data.rows());
  dpmix::MCMCConfig cfg;
  cfg.iterations = iters;
  cfg.burn_in = burnin;
  cfg.thin = thin;
  cfg.seed = seed;
  cfg.standardize = standardize;
  const dpmix::PosteriorDraws draws = dpmix::fit(data, model, cfg);
  std::cout << "snapshots: " << draws.snapshots.size() << " (truncation " << model.H
            << ")\n";
  for (const auto& [name, rate] : draws.acceptance_rates)
    std::cout << "acceptance " << name << ": " << rate << "\n";
  if (!out.empty()) {
    nlohmann::json j;
    j["n_data"] = draws.n_data;
    j["truncation"] = model.H;
    j["occupied_counts"] = draws.occupied_counts;
    j["acceptance_rates"] = draws.acceptance_rates;
    j["snapshots"] = nlohmann::json::array();
    for (const auto& snap : draws.snapshots)
      j["snapshots"].push_back(dpmix::mixture_to_json(snap));
    std::ofstream outf(out);
    if (!outf) throw std::runtime_error("cannot open " + out);
    outf << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_check_f0(const std::string& f0_path, double eta, double delta, double m_bound,
                 long budget, std::uint64_t seed) {
  dpmix::F0Spec spec;
  spec.density = dpmix::load_mixture(f0_path);
  spec.eta = eta;
  spec.delta = delta;
  spec.M = m_bound;
  dpmix::RngStream rng(seed);
  const dpmix::F0Report rep = dpmix::check_all(spec, budget, rng);
  auto show = [](const char* name, const dpmix::CheckResult& c) {
    std::cout << name << ": " << (c.pass ? "pass" : "FAIL") << " (estimate " << c.estimate
              << ", stderr " << c.stderr_ << ")\n";
  };
  show("bounded        ", rep.bounded);
  show("entropy        ", rep.entropy);
  show("local_log_ratio", rep.local_log_ratio);
  show("moment         ", rep.moment);
  std::cout << "overall: " << (rep.all_pass ? "pass" : "FAIL") << "\n";
  return rep.all_pass ? 0 : 1;
}

int cmd_consistency(const std::string& config_path, const std::string& out_dir,
                    int workers) {
  const dpmix::Config file = dpmix::Config::parse_file(config_path);
  const dpmix::ExperimentConfig config = dpmix::parse_experiment_config(file);
  std::filesystem::create_directories(out_dir);
  const dpmix::ExperimentResult result = dpmix::run(config, workers);
  const std::filesystem::path dir(out_dir);
  dpmix::write_results_csv(result, (dir / "results.csv").string());
  dpmix::write_manifest(config, result, (dir / "manifest.json").string());
  std::cout << "n,median_distance,iqr,median_exceedance\n";
  for (const auto& s : dpmix::summarize(result))
    std::cout << s.n << "," << s.median_distance << "," << s.iqr << ","
              << s.median_exceedance << "\n";
  std::cout << "wrote " << (dir / "results.csv").string() << " and "
            << (dir / "manifest.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet-process Gaussian mixture toolkit"};
  app.require_subcommand(1);

  // tails
  auto* tails = app.add_subcommand("tails", "Monte Carlo tail survival of a base measure");
  std::string t_prior, t_stat = "condition_number", t_grid, t_out;
  long t_samples = 100000;
  std::uint64_t t_seed = 0;
  tails->add_option("--prior", t_prior, "base-measure config file")->required();
  tails->add_option("--statistic", t_stat,
                    "norm_theta | lambda_max_inv | lambda_min_inv_reciprocal | "
                    "condition_number");
  tails->add_option("--grid", t_grid, "lo:hi:points log-spaced grid (default: quantile grid)");
  tails->add_option("--samples", t_samples, "Monte Carlo draws");
  tails->add_option("--seed", t_seed, "RNG seed");
  tails->add_option("--out", t_out, "survival CSV path");

  // distance
  auto* dist = app.add_subcommand("distance", "distance between two mixture densities");
  std::string d_f, d_g, d_metric = "hellinger";
  long d_budget = 100000;
  std::uint64_t d_seed = 0;
  dist->add_option("--f", d_f, "first mixture JSON")->required();
  dist->add_option("--g", d_g, "second mixture JSON")->required();
  dist->add_option("--metric", d_metric, "hellinger | l1 | kl");
  dist->add_option("--budget", d_budget, "Monte Carlo budget");
  dist->add_option("--seed", d_seed, "RNG seed");

  // sieve
  auto* sieve = app.add_subcommand("sieve", "sieve entropy/complement/summability bounds");
  std::string s_mode = "complement", s_out;
  dpmix::SieveParams sp;
  double s_abar = 2.0, s_aunder = 0.0, s_u = 2.0, s_r = 2.0, s_kappa = 5.0, s_c = 1.0;
  sieve->add_option("--mode", s_mode, "entropy | complement | summability");
  sieve->add_option("--epsilon", sp.epsilon, "resolution epsilon");
  sieve->add_option("--H", sp.H, "components kept");
  sieve->add_option("--M", sp.M, "eigenvalue ladder length");
  sieve->add_option("--sigma", sp.sigma, "scale floor");
  sieve->add_option("--alpha", sp.alpha, "DP mass");
  sieve->add_option("--c1", sp.c1, "tail constant c1");
  sieve->add_option("--c2", sp.c2, "tail constant c2");
  sieve->add_option("--c3", sp.c3, "tail constant c3");
  sieve->add_option("--C", sp.C, "sieve constant C");
  sieve->add_option("--n", sp.n, "sample size");
  sieve->add_option("--d", sp.d, "dimension");
  sieve->add_option("--a-bar", s_abar, "outer location shell radius (entropy mode)");
  sieve->add_option("--a-under", s_aunder, "inner location shell radius (entropy mode)");
  sieve->add_option("--u", s_u, "condition-number cap (entropy mode)");
  sieve->add_option("--r", s_r, "location tail exponent parameter (summability mode)");
  sieve->add_option("--kappa", s_kappa, "condition-number tail exponent (summability mode)");
  sieve->add_option("--c", s_c, "test constant c (summability mode)");
  sieve->add_option("--out", s_out, "name,value CSV path");

  // fit
  auto* fit = app.add_subcommand("fit", "blocked Gibbs posterior fit");
  std::string f_data, f_prior, f_out;
  bool f_header = false, f_standardize = false;
  double f_alpha = 1.0;
  long f_trunc = 0, f_iters = 1000, f_burnin = 200, f_thin = 1;
  std::uint64_t f_seed = 0;
  fit->add_option("--data", f_data, "data CSV (one row per observation)")->required();
  fit->add_flag("--header", f_header, "data CSV has a header line");
  fit->add_option("--prior", f_prior, "base-measure config file")->required();
  fit->add_option("--alpha", f_alpha, "DP mass");
  fit->add_option("--trunc", f_trunc, "truncation H (0 = automatic)");
  fit->add_option("--iters", f_iters, "total iterations");
  fit->add_option("--burnin", f_burnin, "burn-in iterations");
  fit->add_option("--thin", f_thin, "thinning stride");
  fit->add_option("--seed", f_seed, "RNG seed");
  fit->add_flag("--standardize", f_standardize, "standardize columns during fitting");
  fit->add_option("--out", f_out, "posterior snapshot JSON path");

  // check-f0
  auto* checkf0 = app.add_subcommand("check-f0", "verify the data-density conditions");
  std::string c_f0;
  double c_eta = 1.0, c_delta = 0.5, c_m = 1.0;
  long c_budget = 20000;
  std::uint64_t c_seed = 0;
  checkf0->add_option("--f0", c_f0, "density mixture JSON")->required();
  checkf0->add_option("--eta", c_eta, "moment slack eta");
  checkf0->add_option("--delta", c_delta, "local infimum radius delta");
  checkf0->add_option("--m-bound", c_m, "sup-density bound M");
  checkf0->add_option("--budget", c_budget, "Monte Carlo budget");
  checkf0->add_option("--seed", c_seed, "RNG seed");

  // consistency
  auto* cons = app.add_subcommand("consistency", "posterior-consistency experiment");
  std::string x_config, x_out = ".";
  int x_workers = 1;
  cons->add_option("--config", x_config, "experiment config file")->required();
  cons->add_option("--out-dir", x_out, "output directory");
  cons->add_option("--workers", x_workers, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (tails->parsed())
      return cmd_tails(t_prior, t_stat, t_grid, t_samples, t_seed, t_out);
    if (dist->parsed()) return cmd_distance(d_f, d_g, d_metric, d_budget, d_seed);
    if (sieve->parsed())
      return cmd_sieve(s_mode, sp, s_abar, s_aunder, s_u, s_r, s_kappa, s_c, s_out);
    if (fit->parsed())
      return cmd_fit(f_data, f_header, f_prior, f_alpha, f_trunc, f_iters, f_burnin,
                     f_thin, f_seed, f_standardize, f_out);
    if (checkf0->parsed())
      return cmd_check_f0(c_f0, c_eta, c_delta, c_m, c_budget, c_seed);
    if (cons->parsed()) return cmd_consistency(x_config, x_out, x_workers);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
