#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mdd/rng.hpp"

namespace mdd::experiments {

/// Two-level normal model
///   y_i | theta ~ N(theta, sigma2)
///   theta | z   ~ N(prior_mean, zeta2)  (z = 0)  or  N(prior_mean, c zeta2)  (z = 1)
///   z | p       ~ Bernoulli(p),  p ~ Be(a, b)
/// so p is the probability of the wide component.
struct GibbsConfig {
  double c = 100.0;
  double zeta2 = 1.0;
  double sigma2 = 5.0;
  double prior_mean = 0.0;
  double a = 1.0;
  double b = 1.0;
  int iters = 6000;
  int burn_in = 1000;
  int batches = 25;  // batch-means standard error

  void validate() const;
};

struct GibbsResult {
  double posterior_mean;  // average of the kept theta draws
  double standard_error;
  double mean_p;
  double wide_fraction;  // share of kept draws with z = 1
};

GibbsResult gibbs_hierarchical(std::span<const double> data, const GibbsConfig& cfg, Rng& rng);

enum class Estimator { MddRes1, MddRes2, Informative, Baseline, HierarchicalGibbs };

std::string_view to_string(Estimator e);
Estimator estimator_from_string(std::string_view name);

struct MseConfig {
  double c = 100.0;
  double zeta2 = 1.0;
  double sigma2 = 5.0;
  double prior_mean = 0.0;
  int m = 5;
  int replications = 50;
  std::vector<double> theta0_grid = {-12, -10, -8, -6, -4, -2, 0, 2, 4, 6, 8, 10, 12};
  std::vector<Estimator> estimators = {Estimator::MddRes1, Estimator::MddRes2, Estimator::Informative,
                                       Estimator::Baseline, Estimator::HierarchicalGibbs};
  std::uint64_t seed = 20240611;
  double epsilon = 0.05;
  int k_max = 1000;
  std::optional<double> force_psi;  // bypass resampling for both MDD estimators
  int gibbs_iters = 6000;
  int gibbs_burn_in = 1000;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct MseRow {
  double theta0;
  Estimator estimator;
  double mse;
  double standard_error;
  int replications;

  bool operator==(const MseRow&) const = default;
};

/// For every grid value and replication: draw m observations from
/// N(theta0, sigma2) and score each estimator's posterior mean. Tasks use
/// seeds derived from (seed, grid index, replication), so the table does not
/// depend on the number of threads.
std::vector<MseRow> run_mse_sim(const MseConfig& cfg);

nlohmann::json to_json(const MseConfig& cfg);
MseConfig mse_config_from_json(const nlohmann::json& j);

/// CSV with `# version:` and `# config:` comment lines, then
/// theta0,estimator,mse,se,replications with round-trip precision.
void write_mse_csv(std::ostream& out, std::span<const MseRow> rows, const MseConfig& cfg);
std::vector<MseRow> read_mse_csv(std::istream& in);

/// Format a double so that it parses back to the same value.
std::string exact(double v);

}  // namespace mdd::experiments
