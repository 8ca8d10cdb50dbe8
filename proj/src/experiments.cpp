#include "mdd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <mutex>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <random>
#include <thread>

#include "mdd/conjugate.hpp"
#include "mdd/errors.hpp"
#include "mdd/io.hpp"
#include "mdd/resampling.hpp"

namespace mdd::experiments {

using nlohmann::json;

namespace {

double log_normal_density(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * d * d / var;
}

double draw_beta(double a, double b, Rng& rng) {
  const double x = std::gamma_distribution<double>(a, 1.0)(rng);
  const double y = std::gamma_distribution<double>(b, 1.0)(rng);
  return x / (x + y);
}

double mixture_mean(double psi, const Family& baseline_post, const Family& informative_post) {
  return psi * baseline_post.mean() + (1.0 - psi) * informative_post.mean();
}

// Squared errors of every requested estimator for one simulated dataset.
std::vector<double> replicate(const MseConfig& cfg, double theta0, std::uint64_t seed) {
  Rng rng = make_rng(derive_seed(seed, {0}));
  const Sample data = sample(Family::normal(theta0, cfg.sigma2), static_cast<std::size_t>(cfg.m), rng);
  const ConjugateModel model(ModelTag::NN, Family::normal(cfg.prior_mean, cfg.zeta2), cfg.c, cfg.sigma2);
  const Family post_b = posterior(model, Component::Baseline, data);
  const Family post_i = posterior(model, Component::Informative, data);

  auto mdd_estimate = [&](Algorithm algo, std::uint64_t stream) {
    if (cfg.force_psi) return mixture_mean(*cfg.force_psi, post_b, post_i);
    ResamplingConfig rc;
    rc.algorithm = algo;
    rc.epsilon = cfg.epsilon;
    rc.k_max = cfg.k_max;
    rc.seed = derive_seed(seed, {stream});
    return mixture_mean(compute_weight(model, data, rc).psi, post_b, post_i);
  };

  std::vector<double> errors;
  errors.reserve(cfg.estimators.size());
  for (Estimator e : cfg.estimators) {
    double estimate = 0.0;
    switch (e) {
      case Estimator::MddRes1: estimate = mdd_estimate(Algorithm::Res1, 1); break;
      case Estimator::MddRes2: estimate = mdd_estimate(Algorithm::Res2, 2); break;
      case Estimator::Informative: estimate = post_i.mean(); break;
      case Estimator::Baseline: estimate = post_b.mean(); break;
      case Estimator::HierarchicalGibbs: {
        GibbsConfig g;
        g.c = cfg.c;
        g.zeta2 = cfg.zeta2;
        g.sigma2 = cfg.sigma2;
        g.prior_mean = cfg.prior_mean;
        g.iters = cfg.gibbs_iters;
        g.burn_in = cfg.gibbs_burn_in;
        Rng grng = make_rng(derive_seed(seed, {3}));
        estimate = gibbs_hierarchical(data, g, grng).posterior_mean;
        break;
      }
    }
    errors.push_back((estimate - theta0) * (estimate - theta0));
  }
  return errors;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

}  // namespace

void GibbsConfig::validate() const {
  if (!(c > 0.0 && zeta2 > 0.0 && sigma2 > 0.0)) throw ConfigError("variances and c must be > 0");
  if (!(a > 0.0 && b > 0.0)) throw ConfigError("Beta hyperparameters must be > 0");
  if (burn_in < 0 || iters <= burn_in) throw ConfigError("need iters > burn_in >= 0");
  if (batches < 2) throw ConfigError("batch-means error needs at least 2 batches");
}

GibbsResult gibbs_hierarchical(std::span<const double> data, const GibbsConfig& cfg, Rng& rng) {
  cfg.validate();
  const double m = static_cast<double>(data.size());
  const double sum = std::accumulate(data.begin(), data.end(), 0.0);
  std::normal_distribution<double> std_normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  double theta = data.empty() ? cfg.prior_mean : sum / m;
  double p = 0.5;
  int z = 0;

  const int kept = cfg.iters - cfg.burn_in;
  std::vector<double> draws;
  draws.reserve(static_cast<std::size_t>(kept));
  double p_sum = 0.0, z_sum = 0.0;

  for (int it = 0; it < cfg.iters; ++it) {
    const double v = z == 1 ? cfg.c * cfg.zeta2 : cfg.zeta2;
    const double precision = 1.0 / v + m / cfg.sigma2;
    const double mean = (cfg.prior_mean / v + sum / cfg.sigma2) / precision;
    theta = mean + std_normal(rng) / std::sqrt(precision);

    const double l1 = std::log(p) + log_normal_density(theta, cfg.prior_mean, cfg.c * cfg.zeta2);
    const double l0 = std::log1p(-p) + log_normal_density(theta, cfg.prior_mean, cfg.zeta2);
    const double prob_wide = 1.0 / (1.0 + std::exp(l0 - l1));
    z = unif(rng) < prob_wide ? 1 : 0;

    p = draw_beta(cfg.a + z, cfg.b + 1 - z, rng);
    p = std::clamp(p, 1e-300, 1.0 - 1e-16);

    if (it >= cfg.burn_in) {
      draws.push_back(theta);
      p_sum += p;
      z_sum += z;
    }
  }

  const double post_mean = std::accumulate(draws.begin(), draws.end(), 0.0) / kept;
  const int per_batch = kept / cfg.batches;
  double se = 0.0;
  if (per_batch >= 1) {
    double ss = 0.0;
    for (int bi = 0; bi < cfg.batches; ++bi) {
      const auto first = draws.begin() + static_cast<std::ptrdiff_t>(bi) * per_batch;
      const double bm = std::accumulate(first, first + per_batch, 0.0) / per_batch;
      ss += (bm - post_mean) * (bm - post_mean);
    }
    se = std::sqrt(ss / (cfg.batches - 1) / cfg.batches);
  }
  return {post_mean, se, p_sum / kept, z_sum / kept};
}

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::MddRes1: return "mdd_res1";
    case Estimator::MddRes2: return "mdd_res2";
    case Estimator::Informative: return "informative";
    case Estimator::Baseline: return "baseline";
    case Estimator::HierarchicalGibbs: return "hierarchical_gibbs";
  }
  return "unknown";
}

Estimator estimator_from_string(std::string_view name) {
  for (auto e : {Estimator::MddRes1, Estimator::MddRes2, Estimator::Informative, Estimator::Baseline,
                 Estimator::HierarchicalGibbs})
    if (to_string(e) == name) return e;
  throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

void MseConfig::validate() const {
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (m < 1) throw ConfigError("m must be >= 1");
  if (theta0_grid.empty()) throw ConfigError("theta0 grid must not be empty");
  if (estimators.empty()) throw ConfigError("no estimators requested");
  if (!(c >= 1.0 && zeta2 > 0.0 && sigma2 > 0.0)) throw ConfigError("need c >= 1 and positive variances");
  if (force_psi && !(*force_psi >= 0.0 && *force_psi <= 1.0)) throw ConfigError("forced psi must lie in [0, 1]");
}

std::vector<MseRow> run_mse_sim(const MseConfig& cfg) {
  cfg.validate();
  const std::size_t n_grid = cfg.theta0_grid.size();
  const auto reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t n_tasks = n_grid * reps;
  std::vector<std::vector<double>> errors(n_tasks);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < n_tasks; t = next++) {
      const std::size_t gi = t / reps, r = t % reps;
      try {
        errors[t] = replicate(cfg, cfg.theta0_grid[gi], derive_seed(cfg.seed, {gi, r}));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_tasks;
      }
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_tasks));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<MseRow> rows;
  for (std::size_t gi = 0; gi < n_grid; ++gi) {
    for (std::size_t ei = 0; ei < cfg.estimators.size(); ++ei) {
      double sum = 0.0, sq = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const double e = errors[gi * reps + r][ei];
        sum += e;
        sq += e * e;
      }
      const double n = static_cast<double>(reps);
      const double mse = sum / n;
      const double var = reps > 1 ? std::max(0.0, (sq - n * mse * mse) / (n - 1.0)) : 0.0;
      rows.push_back({cfg.theta0_grid[gi], cfg.estimators[ei], mse, std::sqrt(var / n), cfg.replications});
    }
  }
  return rows;
}

json to_json(const MseConfig& cfg) {
  json estimators = json::array();
  for (Estimator e : cfg.estimators) estimators.push_back(std::string(to_string(e)));
  json j = {{"c", cfg.c},
            {"zeta2", cfg.zeta2},
            {"sigma2", cfg.sigma2},
            {"prior_mean", cfg.prior_mean},
            {"m", cfg.m},
            {"replications", cfg.replications},
            {"theta0_grid", cfg.theta0_grid},
            {"estimators", estimators},
            {"seed", cfg.seed},
            {"epsilon", cfg.epsilon},
            {"k_max", cfg.k_max},
            {"gibbs_iters", cfg.gibbs_iters},
            {"gibbs_burn_in", cfg.gibbs_burn_in}};
  j["force_psi"] = cfg.force_psi ? json(*cfg.force_psi) : json(nullptr);
  return j;
}

MseConfig mse_config_from_json(const json& j) {
  MseConfig cfg;
  cfg.c = j.value("c", cfg.c);
  cfg.zeta2 = j.value("zeta2", cfg.zeta2);
  cfg.sigma2 = j.value("sigma2", cfg.sigma2);
  cfg.prior_mean = j.value("prior_mean", cfg.prior_mean);
  cfg.m = j.value("m", cfg.m);
  cfg.replications = j.value("replications", cfg.replications);
  cfg.theta0_grid = j.value("theta0_grid", cfg.theta0_grid);
  if (j.contains("estimators")) {
    cfg.estimators.clear();
    for (const auto& e : j.at("estimators")) cfg.estimators.push_back(estimator_from_string(e.get<std::string>()));
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.k_max = j.value("k_max", cfg.k_max);
  cfg.gibbs_iters = j.value("gibbs_iters", cfg.gibbs_iters);
  cfg.gibbs_burn_in = j.value("gibbs_burn_in", cfg.gibbs_burn_in);
  if (j.contains("force_psi") && !j.at("force_psi").is_null()) cfg.force_psi = j.at("force_psi").get<double>();
  cfg.validate();
  return cfg;
}

std::string exact(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_mse_csv(std::ostream& out, std::span<const MseRow> rows, const MseConfig& cfg) {
  out << "# version: " << version_string() << '\n';
  out << "# config: " << to_json(cfg).dump() << '\n';
  out << "theta0,estimator,mse,se,replications\n";
  for (const auto& r : rows)
    out << exact(r.theta0) << ',' << to_string(r.estimator) << ',' << exact(r.mse) << ','
        << exact(r.standard_error) << ',' << r.replications << '\n';
  if (!out) throw std::runtime_error("failed writing MSE table");
}

std::vector<MseRow> read_mse_csv(std::istream& in) {
  std::vector<MseRow> rows;
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "theta0,estimator,mse,se,replications")
        throw ConfigError("unexpected MSE table header: " + line);
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 5) throw ConfigError("malformed MSE row at line " + std::to_string(line_no));
    rows.push_back({std::stod(cells[0]), estimator_from_string(cells[1]), std::stod(cells[2]),
                    std::stod(cells[3]), std::stoi(cells[4])});
  }
  return rows;
}

}  // namespace mdd::experiments
