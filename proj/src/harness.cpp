#include "dpmix/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dpmix/mixture_json.hpp"

namespace dpmix {

namespace {

const char* kResultsHeader = "n,replicate,hellinger_mean,exceedance_frac,seconds,seed";

double parse_cell(const std::string& cell, long line_no) {
  char* end = nullptr;
  const std::string trimmed = [&]() {
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : cell.substr(b, e - b + 1);
  }();
  if (trimmed.empty())
    throw std::runtime_error("line " + std::to_string(line_no) + ": empty field");
  const double v = std::strtod(trimmed.c_str(), &end);
  if (end != trimmed.c_str() + trimmed.size() || !std::isfinite(v))
    throw std::runtime_error("line " + std::to_string(line_no) + ": non-numeric value '" +
                             trimmed + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) cells.push_back(cur);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// linearly interpolated quantile of an unsorted copy (h = (m-1)p convention)
double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("quantile: empty input");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - std::floor(h)) * (v[hi] - v[lo]);
}

MixtureDensity f0_density_from_config(const Config& cfg) {
  if (cfg.has("f0.file")) {
    MixtureDensity f = load_mixture(cfg.get_string("f0.file"));
    const long d = static_cast<long>(f.components.front().mean.size());
    if (cfg.has("f0.d") && cfg.get_long("f0.d") != d)
      throw std::invalid_argument("f0.d does not match the dimension in f0.file");
    return f;
  }
  const long d = cfg.get_long("f0.d");
  if (d < 1) throw std::invalid_argument("f0.d must be >= 1");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  if (cfg.has("f0.mean")) {
    const std::vector<double> m = cfg.get_double_list("f0.mean");
    if (m.size() == 1)
      mean.setConstant(m[0]);
    else if (static_cast<long>(m.size()) == d)
      for (long k = 0; k < d; ++k) mean(k) = m[static_cast<std::size_t>(k)];
    else
      throw std::invalid_argument("f0.mean must have 1 or f0.d entries");
  }
  const double scale = cfg.get_double_or("f0.cov_scale", 1.0);
  if (!(scale > 0.0)) throw std::invalid_argument("f0.cov_scale must be positive");
  MixtureDensity f;
  f.weights = {1.0};
  f.components.push_back(
      {mean, SPDMatrix(scale * Eigen::MatrixXd::Identity(d, d))});
  return f;
}

struct Job {
  long n = 0;
  long replicate = 0;
  std::uint64_t stream = 0;
};

ResultRow run_job(const ExperimentConfig& config, const Job& job) {
  RngStream rng(config.seed, job.stream);
  const long d = static_cast<long>(config.f0.density.components.front().mean.size());
  Eigen::MatrixXd data(job.n, d);
  for (long i = 0; i < job.n; ++i)
    data.row(i) = sample_mixture(config.f0.density, rng).transpose();

  const std::uint64_t mcmc_seed = rng.raw()();
  DPMixtureModel model = config.model;
  if (model.H == 0) model.H = default_truncation(model.alpha, job.n);
  MCMCConfig mc = config.mcmc;
  mc.seed = mcmc_seed;

  const auto t0 = std::chrono::steady_clock::now();
  const PosteriorDraws draws = fit(data, model, mc);
  const std::vector<double> trace = posterior_distance_trace(
      draws, config.f0.density, config.distance_budget, rng, config.metric);
  const auto t1 = std::chrono::steady_clock::now();

  double mean = 0.0, exceed = 0.0;
  for (double v : trace) {
    mean += v;
    if (v > config.epsilon_ball) exceed += 1.0;
  }
  const double m = static_cast<double>(trace.size());
  ResultRow row;
  row.n = job.n;
  row.replicate = job.replicate;
  row.hellinger_mean = mean / m;
  row.exceedance_frac = exceed / m;
  row.seconds = std::chrono::duration<double>(t1 - t0).count();
  row.seed = mcmc_seed;
  return row;
}

nlohmann::json check_to_json(const CheckResult& c) {
  return {{"estimate", c.estimate}, {"stderr", c.stderr_}, {"pass", c.pass}};
}

}  // namespace

ExperimentConfig parse_experiment_config(const Config& cfg) {
  static const std::set<std::string> scalar_keys = {
      "f0.d",
      "f0.mean",
      "f0.cov_scale",
      "f0.file",
      "f0.eta",
      "f0.delta",
      "f0.m_bound",
      "mcmc.iterations",
      "mcmc.burn_in",
      "mcmc.thin",
      "mcmc.standardize",
      "experiment.n_grid",
      "experiment.replicates",
      "experiment.epsilon",
      "experiment.seed",
      "experiment.alpha",
      "experiment.trunc",
      "experiment.distance_budget",
      "experiment.f0_check_budget",
      "experiment.metric",
  };
  std::vector<std::string> unknown;
  Config prior_cfg;
  for (const auto& [key, value] : cfg.entries()) {
    if (key.rfind("prior.", 0) == 0 || key.rfind("location.", 0) == 0)
      prior_cfg.set(key, value);
    else if (scalar_keys.count(key) == 0)
      unknown.push_back(key);
  }
  if (!unknown.empty()) {
    std::string msg = "experiment config: unknown keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw std::invalid_argument(msg);
  }

  ExperimentConfig out;
  out.f0.density = f0_density_from_config(cfg);
  out.f0.eta = cfg.get_double_or("f0.eta", 1.0);
  out.f0.delta = cfg.get_double_or("f0.delta", 0.5);
  out.f0.M = cfg.get_double_or("f0.m_bound", 1.0);

  out.model.base = parse_base_measure(prior_cfg);
  out.model.alpha = cfg.get_double_or("experiment.alpha", 1.0);
  if (!(out.model.alpha > 0.0))
    throw std::invalid_argument("experiment.alpha must be positive");
  out.model.H = cfg.get_long_or("experiment.trunc", 0);
  if (out.model.H < 0) throw std::invalid_argument("experiment.trunc must be >= 0");

  out.mcmc.iterations = cfg.get_long_or("mcmc.iterations", 1000);
  out.mcmc.burn_in = cfg.get_long_or("mcmc.burn_in", 200);
  out.mcmc.thin = cfg.get_long_or("mcmc.thin", 1);
  out.mcmc.standardize = cfg.get_bool_or("mcmc.standardize", false);

  out.n_grid = cfg.get_long_list("experiment.n_grid");
  if (out.n_grid.empty()) throw std::invalid_argument("experiment.n_grid is empty");
  for (std::size_t i = 0; i + 1 < out.n_grid.size(); ++i)
    if (out.n_grid[i] >= out.n_grid[i + 1])
      throw std::invalid_argument("experiment.n_grid must be strictly ascending");
  if (out.n_grid.front() < 1)
    throw std::invalid_argument("experiment.n_grid entries must be >= 1");

  out.replicates = cfg.get_long_or("experiment.replicates", 1);
  if (out.replicates < 1) throw std::invalid_argument("experiment.replicates must be >= 1");
  out.epsilon_ball = cfg.get_double_or("experiment.epsilon", 0.3);
  if (!(out.epsilon_ball > 0.0))
    throw std::invalid_argument("experiment.epsilon must be positive");
  out.seed = static_cast<std::uint64_t>(cfg.get_long_or("experiment.seed", 0));
  out.distance_budget = cfg.get_long_or("experiment.distance_budget", 10000);
  if (out.distance_budget < 10000)
    throw std::invalid_argument("experiment.distance_budget must be >= 10000");
  out.f0_check_budget = cfg.get_long_or("experiment.f0_check_budget", 20000);
  out.metric = cfg.get_string_or("experiment.metric", "hellinger");
  if (out.metric != "hellinger" && out.metric != "l1")
    throw std::invalid_argument("experiment.metric must be hellinger or l1");

  const long prior_d = static_cast<long>(
      out.f0.density.components.front().mean.size());
  if (out.model.base.d() != prior_d)
    throw std::invalid_argument("prior dimension does not match f0 dimension");
  return out;
}

ExperimentResult run(const ExperimentConfig& config, int workers) {
  if (workers < 1) throw std::invalid_argument("run: workers must be >= 1");
  ExperimentResult result;
  {
    RngStream gate(config.seed, 0);
    result.f0_report = check_all(config.f0, config.f0_check_budget, gate);
    if (!result.f0_report.all_pass) {
      std::string msg = "run: f0 failed checks:";
      if (!result.f0_report.bounded.pass) msg += " bounded";
      if (!result.f0_report.entropy.pass) msg += " entropy";
      if (!result.f0_report.local_log_ratio.pass) msg += " local_log_ratio";
      if (!result.f0_report.moment.pass) msg += " moment";
      throw std::runtime_error(msg);
    }
  }

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < config.n_grid.size(); ++i)
    for (long r = 0; r < config.replicates; ++r)
      jobs.push_back({config.n_grid[i], r,
                      static_cast<std::uint64_t>(jobs.size()) + 1});

  result.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      try {
        result.rows[j] = run_job(config, jobs[j]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const int pool = std::min<int>(workers, static_cast<int>(jobs.size()));
  std::vector<std::thread> threads;
  for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return result;
}

std::vector<SummaryRow> summarize(const ExperimentResult& result) {
  if (result.rows.empty()) throw std::invalid_argument("summarize: empty result");
  std::vector<long> order;
  std::map<long, std::vector<const ResultRow*>> by_n;
  for (const auto& row : result.rows) {
    if (by_n.count(row.n) == 0) order.push_back(row.n);
    by_n[row.n].push_back(&row);
  }
  std::vector<SummaryRow> out;
  for (long n : order) {
    std::vector<double> dist, exc;
    for (const ResultRow* r : by_n[n]) {
      dist.push_back(r->hellinger_mean);
      exc.push_back(r->exceedance_frac);
    }
    SummaryRow s;
    s.n = n;
    s.median_distance = quantile(dist, 0.5);
    s.iqr = quantile(dist, 0.75) - quantile(dist, 0.25);
    s.median_exceedance = quantile(exc, 0.5);
    out.push_back(s);
  }
  return out;
}

Eigen::MatrixXd ingest_data(const std::string& path, bool header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_data: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  long cols = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;  // trailing newline
      throw std::runtime_error("line " + std::to_string(line_no) + ": empty line");
    }
    if (header && line_no == 1) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_cell(c, line_no));
    if (cols < 0)
      cols = static_cast<long>(row.size());
    else if (static_cast<long>(row.size()) != cols)
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(cols) + " columns, got " +
                               std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("ingest_data: no data rows in " + path);
  Eigen::MatrixXd m(static_cast<long>(rows.size()), cols);
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < cols; ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void write_results_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_results_csv: cannot open " + path);
  out << kResultsHeader << "\n";
  out.precision(17);
  for (const auto& r : result.rows)
    out << r.n << "," << r.replicate << "," << r.hellinger_mean << ","
        << r.exceedance_frac << "," << r.seconds << "," << r.seed << "\n";
  if (!out) throw std::runtime_error("write_results_csv: write failed for " + path);
}

ExperimentResult read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_results_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_results_csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader)
    throw std::runtime_error("read_results_csv: unexpected header '" + line + "'");
  ExperimentResult result;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != 6)
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 6 fields, got " + std::to_string(cells.size()));
    ResultRow r;
    r.n = static_cast<long>(parse_cell(cells[0], line_no));
    r.replicate = static_cast<long>(parse_cell(cells[1], line_no));
    r.hellinger_mean = parse_cell(cells[2], line_no);
    r.exceedance_frac = parse_cell(cells[3], line_no);
    r.seconds = parse_cell(cells[4], line_no);
    r.seed = static_cast<std::uint64_t>(std::strtoull(cells[5].c_str(), nullptr, 10));
    result.rows.push_back(r);
  }
  return result;
}

void write_manifest(const ExperimentConfig& config, const ExperimentResult& result,
                    const std::string& path) {
  nlohmann::json j;
  j["master_seed"] = config.seed;
  j["epsilon_ball"] = config.epsilon_ball;
  j["metric"] = config.metric;
  j["distance_budget"] = config.distance_budget;
  j["f0_check_budget"] = config.f0_check_budget;
  j["n_grid"] = config.n_grid;
  j["replicates"] = config.replicates;
  j["mcmc"] = {{"iterations", config.mcmc.iterations},
               {"burn_in", config.mcmc.burn_in},
               {"thin", config.mcmc.thin},
               {"standardize", config.mcmc.standardize}};
  j["model"] = {{"alpha", config.model.alpha},
                {"truncation", config.model.H},
                {"base", serialize_base_measure(config.model.base)}};
  j["f0"] = {{"eta", config.f0.eta},
             {"delta", config.f0.delta},
             {"m_bound", config.f0.M},
             {"density", mixture_to_json(config.f0.density)}};
  j["f0_checks"] = {{"bounded", check_to_json(result.f0_report.bounded)},
                    {"entropy", check_to_json(result.f0_report.entropy)},
                    {"local_log_ratio", check_to_json(result.f0_report.local_log_ratio)},
                    {"moment", check_to_json(result.f0_report.moment)},
                    {"all_pass", result.f0_report.all_pass}};
  j["rows"] = result.rows.size();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_manifest: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write_manifest: write failed for " + path);
}

}  // namespace dpmix
