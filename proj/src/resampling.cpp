#include "mdd/resampling.hpp"

#include <json.hpp>
#include <sstream>

#include "mdd/errors.hpp"
#include "mdd/hellinger.hpp"
#include "mdd/io.hpp"
#include "mdd/rng.hpp"

namespace mdd {

namespace {

// The parameter of the data density that the prior is placed on.
double model_parameter(const Family& lik) {
  return lik.tag() == FamilyTag::Binomial ? lik.param(1) : lik.param(0);
}

double ml_parameter(const ConjugateModel& model, std::span<const double> data) {
  return model_parameter(ml_estimate(model.data_family(), data, model.nuisance()));
}

double omega(const ConjugateModel& model, std::span<const double> data) {
  return hellinger_cf(posterior(model, Component::Baseline, data),
                      posterior(model, Component::Informative, data))
      .value;
}

double draw_theta_star(const ConjugateModel& model, const ResamplingConfig& cfg, Rng& rng) {
  return cfg.theta_star ? *cfg.theta_star : sample_one(model.informative(), rng);
}

void finish(ResamplingTrace& t, const ResamplingConfig& cfg) {
  const auto& last = t.steps.back();
  t.final_psi = last.psi;
  t.final_omega = last.omega;
  t.m_star = t.m + static_cast<int>(t.steps.size());
  t.terminated_by = last.omega < cfg.epsilon ? Termination::Tolerance : Termination::Cap;
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Res1: return "res1";
    case Algorithm::Res2: return "res2";
    case Algorithm::Natural: return "natural";
  }
  return "unknown";
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Tolerance: return "tolerance";
    case Termination::Cap: return "cap";
    case Termination::NotApplicable: return "none";
  }
  return "unknown";
}

Algorithm algorithm_from_string(std::string_view name) {
  for (auto a : {Algorithm::Res1, Algorithm::Res2, Algorithm::Natural})
    if (to_string(a) == name) return a;
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected res1, res2 or natural)");
}

void ResamplingConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (k_max < 1) throw ConfigError("k_max must be >= 1");
  if (bandwidth && !(*bandwidth > 0.0)) throw ConfigError("bandwidth must be > 0");
}

ResamplingTrace run_res1(const ConjugateModel& model, std::span<const double> data,
                         const ResamplingConfig& cfg) {
  cfg.validate();
  Rng rng = make_rng(derive_seed(cfg.seed, {1}));
  ResamplingTrace t;
  t.m = static_cast<int>(data.size());
  t.theta_star = draw_theta_star(model, cfg, rng);
  t.theta0 = cfg.theta0 ? *cfg.theta0 : ml_parameter(model, data);

  const Family reference = model.likelihood(t.theta0);
  const Family generator = model.likelihood(t.theta_star);
  std::vector<double> pooled(data.begin(), data.end());
  std::vector<double> generated;
  pooled.reserve(pooled.size() + static_cast<std::size_t>(cfg.k_max));
  generated.reserve(static_cast<std::size_t>(cfg.k_max));

  for (int k = 1; k <= cfg.k_max; ++k) {
    const double y = sample_one(generator, rng);
    pooled.push_back(y);
    generated.push_back(y);
    const double psi =
        hellinger_sample(reference, cfg.pooled ? std::span<const double>(pooled) : generated, cfg.bandwidth)
            .value;
    t.steps.push_back({k, psi, omega(model, pooled)});
    if (t.steps.back().omega < cfg.epsilon) break;
  }
  finish(t, cfg);
  return t;
}

ResamplingTrace run_res2(const ConjugateModel& model, std::span<const double> data,
                         const ResamplingConfig& cfg) {
  cfg.validate();
  Rng rng = make_rng(derive_seed(cfg.seed, {2}));
  ResamplingTrace t;
  t.m = static_cast<int>(data.size());
  t.theta_star = draw_theta_star(model, cfg, rng);
  const Family target = model.likelihood(t.theta_star);

  std::vector<double> held(data.begin(), data.end());
  held.reserve(held.size() + static_cast<std::size_t>(cfg.k_max));

  for (int k = 1; k <= cfg.k_max; ++k) {
    double theta_hat = 0.0;
    try {
      theta_hat = (k == 1 && cfg.theta0) ? *cfg.theta0 : ml_parameter(model, held);
    } catch (const DegenerateDataError& e) {
      std::ostringstream os;
      os << "res2 step " << k << ": " << e.what();
      throw DegenerateDataError(os.str());
    }
    if (k == 1) t.theta0 = theta_hat;
    const Family fitted = model.likelihood(theta_hat);
    const double psi = hellinger_cf(fitted, target).value;
    held.push_back(sample_one(fitted, rng));
    t.steps.push_back({k, psi, omega(model, held)});
    if (t.steps.back().omega < cfg.epsilon) break;
  }
  finish(t, cfg);
  return t;
}

WeightResult compute_weight(const ConjugateModel& model, std::span<const double> data,
                            const ResamplingConfig& cfg) {
  cfg.validate();
  ResamplingTrace t;
  switch (cfg.algorithm) {
    case Algorithm::Res1: t = run_res1(model, data, cfg); break;
    case Algorithm::Res2: t = run_res2(model, data, cfg); break;
    case Algorithm::Natural: {
      t.m = t.m_star = static_cast<int>(data.size());
      const double psi = natural_weight(model, data);
      t.steps.push_back({0, psi, omega(model, data)});
      t.final_psi = psi;
      t.final_omega = t.steps.back().omega;
      t.terminated_by = Termination::NotApplicable;
      t.theta_star = t.theta0 = data.empty() ? model.informative().mean() : sample_mean(data);
      break;
    }
  }
  return {t.final_psi, t.m_star, std::move(t)};
}

void write_trace_jsonl(std::ostream& out, const ConjugateModel& model, const ResamplingConfig& cfg,
                       const ResamplingTrace& trace) {
  using nlohmann::json;
  json config = {{"algorithm", std::string(to_string(cfg.algorithm))},
                 {"epsilon", cfg.epsilon},
                 {"k_max", cfg.k_max},
                 {"seed", cfg.seed},
                 {"pooled", cfg.pooled}};
  config["theta0"] = cfg.theta0 ? json(*cfg.theta0) : json(nullptr);
  config["theta_star"] = cfg.theta_star ? json(*cfg.theta_star) : json(nullptr);
  config["bandwidth"] = cfg.bandwidth ? json(*cfg.bandwidth) : json(nullptr);
  out << json{{"record", "header"},
              {"version", version_string()},
              {"model", to_json(model)},
              {"config", config}}
             .dump()
      << '\n';
  for (const auto& s : trace.steps)
    out << json{{"record", "step"}, {"k", s.k}, {"psi", s.psi}, {"omega", s.omega}}.dump() << '\n';
  out << json{{"record", "summary"},
              {"m", trace.m},
              {"m_star", trace.m_star},
              {"psi", trace.final_psi},
              {"omega", trace.final_omega},
              {"terminated_by", std::string(to_string(trace.terminated_by))},
              {"theta_star", trace.theta_star},
              {"theta0", trace.theta0}}
             .dump()
      << '\n';
}

}  // namespace mdd
