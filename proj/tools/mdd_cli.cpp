// Command-line front end: `mdd <subcommand> [--config cfg.json] [flags]`.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "mdd/errors.hpp"
#include "mdd/ess.hpp"
#include "mdd/experiments.hpp"
#include "mdd/io.hpp"
#include "mdd/logistic.hpp"
#include "mdd/resampling.hpp"

namespace {

using nlohmann::json;
using mdd::experiments::exact;

// JSON config files: {"<subcommand>": {"<long option>": value, ...}}.
// Object values (e.g. an inline model) are passed through as JSON text.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw CLI::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [section, body] : j.items()) {
      if (!body.is_object()) throw CLI::ConfigError("config section '" + section + "' must be an object");
      for (const auto& [key, value] : body.items()) {
        CLI::ConfigItem item;
        item.parents = {section};
        item.name = key;
        if (value.is_array()) {
          for (const auto& v : value) item.inputs.push_back(scalar(v));
        } else {
          item.inputs.push_back(scalar(value));
        }
        items.push_back(std::move(item));
      }
    }
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return exact(v.get<double>());
    return v.dump();
  }
};

json load_json_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return json::parse(arg);
  std::ifstream in(arg);
  if (!in) throw std::runtime_error("cannot open '" + arg + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("'" + arg + "' is not valid JSON: " + e.what());
  }
}

std::vector<double> read_data_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file '" + path + "'");
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        if (line_no == 1) break;  // header row
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": not a number: '" + cell + "'");
      }
    }
  }
  return values;
}

// Writes to a file, or stdout for "-".
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path != "-") {
      if (auto parent = std::filesystem::path(path).parent_path(); !parent.empty())
        std::filesystem::create_directories(parent);
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot write '" + path + "'");
    }
  }
  ~Output() {
    if (file_.is_open()) file_.close();
  }
  std::ostream& stream() { return path_ == "-" ? std::cout : file_; }

 private:
  std::string path_;
  std::ofstream file_;
};

void write_curve(std::ostream& out, const mdd::EssResult& r) {
  out << "m,delta\n";
  for (const auto& p : r.curve) out << p.m << ',' << exact(p.delta) << '\n';
}

json summary(const mdd::EssResult& r) {
  return {{"ess", r.ess}, {"raw", r.raw}, {"method", std::string(mdd::to_string(r.method))}, {"plug_in", r.plug_in}};
}

const char* kLogisticHeader = "sigma2,psi,ess,ess_mu,ess_beta,se_mu,se_beta,ess_integer\n";

void write_logistic_row(std::ostream& out, double sigma2, double psi, const mdd::logistic::EssResult& r) {
  out << exact(sigma2) << ',' << exact(psi) << ',' << exact(r.ess) << ',' << exact(r.ess_intercept) << ','
      << exact(r.ess_slope) << ',' << exact(r.se_intercept) << ',' << exact(r.se_slope) << ','
      << exact(r.ess_integer) << '\n';
}

void write_jeffreys(std::ostream& out, const mdd::Family& prior, const std::vector<double>& weights, int m_from,
                    int m_to) {
  out << "m,delta_informative,delta_jeffreys";
  for (double w : weights) out << ",delta_mixture_" << exact(w);
  out << '\n';
  for (int m = m_from; m <= m_to; ++m) {
    const auto d = mdd::jeffreys::deltas(m, prior, weights);
    out << m << ',' << exact(d.informative) << ',' << exact(d.jeffreys);
    for (double v : d.mixture) out << ',' << exact(v);
    out << '\n';
  }
}

json jeffreys_summary(const mdd::Family& prior, const std::vector<double>& weights) {
  json j = json::object();
  j["informative"] = summary(mdd::jeffreys::ess(0.0, prior));
  j["jeffreys"] = summary(mdd::jeffreys::ess(1.0, prior));
  json mix = json::array();
  for (double w : weights) {
    json s = summary(mdd::jeffreys::ess(w, prior));
    s["psi"] = w;
    mix.push_back(s);
  }
  j["mixture"] = mix;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixture data-dependent priors: resampling weights, effective sample sizes, simulations"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON configuration file");
  app.set_version_flag("--version", mdd::version_string());

  std::uint64_t seed = 0;
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Root random seed")->envname("MDD_SEED")->capture_default_str();
  };

  // resample
  auto* resample = app.add_subcommand("resample", "Compute the mixture weight with a resampling algorithm");
  std::string model_arg, data_path, algo = "res1", out_path = "-";
  mdd::ResamplingConfig rcfg;
  std::optional<double> theta0, theta_star, bandwidth;
  bool generated_only = false;
  resample->add_option("--model", model_arg, "Model JSON file or inline JSON")->required();
  resample->add_option("--data", data_path, "Observations (CSV)")->required();
  resample->add_option("--algo", algo, "res1 | res2 | natural")->capture_default_str();
  resample->add_option("--eps", rcfg.epsilon, "Stop tolerance on omega")->capture_default_str();
  resample->add_option("--k-max", rcfg.k_max, "Iteration cap")->capture_default_str();
  resample->add_option("--theta0", theta0, "Known data-generating parameter");
  resample->add_option("--theta-star", theta_star, "Fix the prior draw");
  resample->add_option("--bandwidth", bandwidth, "KDE bandwidth for res1");
  resample->add_flag("--generated-only", generated_only, "res1: compare against generated data only");
  resample->add_option("--out", out_path, "Trace output (JSON lines), '-' for stdout")->capture_default_str();
  add_seed(resample);

  // ess
  auto* ess = app.add_subcommand("ess", "Effective sample size of a conjugate or mixture prior");
  std::optional<double> mdd_psi;
  std::optional<int> m_max;
  std::string curve_path, summary_path = "-";
  ess->add_option("--model", model_arg, "Model JSON file or inline JSON")->required();
  ess->add_option("--mdd-psi", mdd_psi, "Mixture weight; informative prior when omitted");
  ess->add_option("--m-max", m_max, "Grid size (grows automatically when omitted)");
  ess->add_option("--out", curve_path, "Distance curve CSV (m,delta)");
  ess->add_option("--summary", summary_path, "Summary JSON, '-' for stdout")->capture_default_str();

  // jeffreys-exp
  auto* jeff = app.add_subcommand("jeffreys-exp", "Exponential model with a Jeffreys baseline");
  double shape = 4.0, rate = 8.0;
  std::vector<double> weights{0.2, 0.5, 0.8};
  int m_from = 1, m_to = 20;
  std::string jeff_out = "-";
  jeff->add_option("--shape", shape, "Informative Gamma shape")->capture_default_str();
  jeff->add_option("--rate", rate, "Informative Gamma rate")->capture_default_str();
  jeff->add_option("--psi", weights, "Mixture weights")->delimiter(',')->capture_default_str();
  jeff->add_option("--m-from", m_from)->capture_default_str();
  jeff->add_option("--m-to", m_to)->capture_default_str();
  jeff->add_option("--out", jeff_out, "Distance table CSV, '-' for stdout")->capture_default_str();
  jeff->add_option("--summary", summary_path, "Summary JSON, '-' for stdout")->capture_default_str();

  // logistic-ess
  auto* logit = app.add_subcommand("logistic-ess", "ESS of priors for the dose-toxicity logistic model");
  std::string variant = "informative", standardization = "center", logit_out = "-";
  double psi = 0.0, sigma2 = 4.0, c = 1e4;
  std::optional<double> sigma2_slope;
  long T = 100000;
  logit->add_option("--variant", variant, "informative | mdd-flat | mdd-improper")->capture_default_str();
  logit->add_option("--psi", psi, "Mixture weight")->capture_default_str();
  logit->add_option("--sigma2", sigma2, "Prior variance (both coefficients)")->capture_default_str();
  logit->add_option("--sigma2-slope", sigma2_slope, "Separate prior variance for the slope");
  logit->add_option("--c", c, "Baseline variance inflation")->capture_default_str();
  logit->add_option("--T", T, "Monte Carlo replicates")->capture_default_str();
  logit->add_option("--standardization", standardization, "center | sample_sd | population_sd")
      ->capture_default_str();
  logit->add_option("--out", logit_out, "CSV output, '-' for stdout")->capture_default_str();
  add_seed(logit);

  // mse-sim
  auto* mse = app.add_subcommand("mse-sim", "MSE of posterior-mean estimators over a grid of true values");
  mdd::experiments::MseConfig mcfg;
  std::string mse_out = "-", mse_summary;
  std::optional<double> force_psi;
  mse->add_option("--replications,-R", mcfg.replications)->capture_default_str();
  mse->add_option("--theta0", mcfg.theta0_grid, "Grid of true values")->delimiter(',');
  mse->add_option("--c", mcfg.c)->capture_default_str();
  mse->add_option("--zeta2", mcfg.zeta2)->capture_default_str();
  mse->add_option("--sigma2", mcfg.sigma2)->capture_default_str();
  mse->add_option("--m", mcfg.m)->capture_default_str();
  mse->add_option("--eps", mcfg.epsilon)->capture_default_str();
  mse->add_option("--k-max", mcfg.k_max)->capture_default_str();
  mse->add_option("--force-psi", force_psi, "Skip resampling and use this weight");
  mse->add_option("--threads", mcfg.threads)->capture_default_str();
  mse->add_option("--out", mse_out, "CSV output, '-' for stdout")->capture_default_str();
  mse->add_option("--summary", mse_summary, "Summary JSON");
  add_seed(mse);

  // tables
  auto* tables = app.add_subcommand("tables", "Logistic ESS tables, Jeffreys distances and the MSE study");
  std::string out_dir = "results";
  bool skip_mse = false;
  tables->add_option("--T", T)->capture_default_str();
  tables->add_option("--standardization", standardization)->capture_default_str();
  tables->add_option("--replications,-R", mcfg.replications)->capture_default_str();
  tables->add_option("--out-dir", out_dir)->capture_default_str();
  tables->add_flag("--skip-mse", skip_mse);
  add_seed(tables);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*resample) {
      const auto model = mdd::model_from_json(load_json_arg(model_arg));
      const auto data = read_data_csv(data_path);
      rcfg.algorithm = mdd::algorithm_from_string(algo);
      rcfg.seed = seed;
      rcfg.theta0 = theta0;
      rcfg.theta_star = theta_star;
      rcfg.bandwidth = bandwidth;
      rcfg.pooled = !generated_only;
      const auto result = mdd::compute_weight(model, data, rcfg);
      Output out(out_path);
      mdd::write_trace_jsonl(out.stream(), model, rcfg, result.trace);
    } else if (*ess) {
      const auto model = mdd::model_from_json(load_json_arg(model_arg));
      const auto result = mdd_psi ? mdd::ess_mdd(mdd::MddPrior{*mdd_psi, model}, m_max)
                                  : mdd::ess_grid(model.informative(), model, model.informative().mean(), m_max);
      if (!curve_path.empty()) {
        Output out(curve_path);
        write_curve(out.stream(), result);
      }
      json s = summary(result);
      s["closed_form"] = mdd::ess_closed_form(model).raw;
      s["model"] = mdd::to_json(model);
      s["psi"] = mdd_psi ? json(*mdd_psi) : json(nullptr);
      s["version"] = mdd::version_string();
      Output out(summary_path);
      out.stream() << s.dump(2) << '\n';
    } else if (*jeff) {
      const auto prior = mdd::Family::gamma(shape, rate);
      {
        Output out(jeff_out);
        write_jeffreys(out.stream(), prior, weights, m_from, m_to);
      }
      if (summary_path != "-" || jeff_out != "-") {
        Output out(summary_path);
        out.stream() << jeffreys_summary(prior, weights).dump(2) << '\n';
      }
    } else if (*logit) {
      namespace lg = mdd::logistic;
      const auto design = lg::default_design(lg::standardization_from_string(standardization));
      lg::PriorSpec spec{lg::variant_from_string(variant), sigma2, sigma2_slope.value_or(sigma2), psi, c, {}};
      const auto r = lg::ess(spec, design, T, seed);
      Output out(logit_out);
      out.stream() << "# version: " << mdd::version_string() << '\n'
                   << "# config: "
                   << json{{"variant", variant}, {"standardization", standardization}, {"T", T},
                           {"seed", seed}, {"c", c}, {"sigma2_slope", spec.sigma2_slope}}
                          .dump()
                   << '\n'
                   << kLogisticHeader;
      write_logistic_row(out.stream(), sigma2, psi, r);
    } else if (*mse) {
      mcfg.seed = seed;
      mcfg.force_psi = force_psi;
      const auto rows = mdd::experiments::run_mse_sim(mcfg);
      {
        Output out(mse_out);
        mdd::experiments::write_mse_csv(out.stream(), rows, mcfg);
      }
      if (!mse_summary.empty()) {
        json s = {{"version", mdd::version_string()}, {"config", mdd::experiments::to_json(mcfg)}, {"rows", json::array()}};
        for (const auto& r : rows)
          s["rows"].push_back({{"theta0", r.theta0}, {"estimator", std::string(mdd::experiments::to_string(r.estimator))},
                               {"mse", r.mse}, {"se", r.standard_error}});
        Output out(mse_summary);
        out.stream() << s.dump(2) << '\n';
      }
    } else if (*tables) {
      namespace lg = mdd::logistic;
      std::filesystem::create_directories(out_dir);
      const auto design = lg::default_design(lg::standardization_from_string(standardization));
      const auto rows = lg::reproduce_tables(design, T, seed);
      const json provenance = {{"version", mdd::version_string()}, {"T", T}, {"seed", seed},
                               {"standardization", standardization}};
      auto table = [&](const std::string& name, lg::Variant v) {
        Output out((std::filesystem::path(out_dir) / name).string());
        out.stream() << "# version: " << mdd::version_string() << "\n# config: "
                     << json{{"variant", std::string(lg::to_string(v))}, {"T", T}, {"seed", seed},
                             {"standardization", standardization}}
                            .dump()
                     << '\n'
                     << kLogisticHeader;
        for (const auto& r : rows)
          if (r.variant == v) write_logistic_row(out.stream(), r.sigma2, r.psi, r.result);
      };
      table("table3.csv", lg::Variant::Informative);
      table("table4.csv", lg::Variant::MddFlat);
      table("table5.csv", lg::Variant::MddImproper);

      const auto prior = mdd::Family::gamma(4.0, 8.0);
      {
        Output out((std::filesystem::path(out_dir) / "fig4.csv").string());
        write_jeffreys(out.stream(), prior, weights, 1, 20);
      }
      json s = {{"provenance", provenance}, {"jeffreys", jeffreys_summary(prior, weights)}};
      if (!skip_mse) {
        mcfg.seed = seed;
        const auto mrows = mdd::experiments::run_mse_sim(mcfg);
        Output out((std::filesystem::path(out_dir) / "mse.csv").string());
        mdd::experiments::write_mse_csv(out.stream(), mrows, mcfg);
      }
      Output out((std::filesystem::path(out_dir) / "summary.json").string());
      out.stream() << s.dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "mdd: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
