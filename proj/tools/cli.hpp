#pragma once

// Batch front-end. Exit codes: 0 success, 1 a numerical check failed its
// tolerance, 2 bad input (unknown subcommand, unreadable or invalid config).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rfock/rfock.hpp"

namespace rfock::cli {

using io::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInputError = 2;

#ifndef RFOCK_VERSION
#define RFOCK_VERSION "0.0.0"
#endif

struct GlobalOptions {
  double tol = kDefaultTol;
  std::string mollifier = "paper";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out_dir = ".";
};

/// Per-run record written to <out>/manifest.json.
struct RunManifest {
  std::string subcommand;
  std::string config_path;
  GlobalOptions options;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;
  json extra = json::object();

  json to_json() const {
    return {{"subcommand", subcommand},
            {"config", config_path},
            {"seed", options.seed},
            {"version", RFOCK_VERSION},
            {"tolerances", {{"quadrature", options.tol}}},
            {"mollifier", options.mollifier},
            {"threads", options.threads},
            {"wall_seconds", wall_seconds},
            {"outputs", outputs},
            {"details", extra}};
  }
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args);

 private:
  Mollifier conv() const { return mollifier_from_string(opts_.mollifier); }

  std::filesystem::path output_path(const std::string& name) {
    std::filesystem::create_directories(opts_.out_dir);
    const auto p = std::filesystem::path(opts_.out_dir) / name;
    manifest_.outputs.push_back(p.string());
    return p;
  }

  void write_json(const std::string& name, const json& j) {
    std::ofstream f(output_path(name));
    f << j.dump(2) << '\n';
  }

  /// Sidecar metadata next to a CSV result.
  void write_sidecar(const std::string& csv_name, const json& details) {
    json meta = {{"seed", opts_.seed},
                 {"tolerances", {{"quadrature", opts_.tol}}},
                 {"mollifier", opts_.mollifier},
                 {"version", RFOCK_VERSION},
                 {"details", details}};
    write_json(csv_name + ".meta.json", meta);
  }

  static std::vector<Hoop> family_from_any(const json& j, const std::string& path) {
    if (j.is_array()) return io::family_from_json(j, path);
    if (j.contains("hoops")) return io::family_from_json(j.at("hoops"), path + "hoops");
    if (j.contains("family")) return io::family_from_json(j.at("family"), path + "family");
    return {io::hoop_from_json(j, path)};
  }

  double number_or(const json& j, const std::string& key, double fallback) const {
    return j.contains(key) ? io::as_number(j.at(key), key) : fallback;
  }

  /// Gaussian r-Fock marginal from a config carrying "family" and "r".
  CylindricalMeasure fock_from_config(const json& cfg) const {
    const double r = io::as_number(io::require(cfg, "r", ""), "r");
    if (!(r > 0.0)) throw io::FieldError("r", "must be > 0");
    auto family = io::family_from_json(io::require(cfg, "family", ""), "family");
    if (family.empty()) throw io::FieldError("family", "must be non-empty");
    return CylindricalMeasure::fock(family, SmearingScale(r), conv(), opts_.tol, opts_.threads);
  }

  std::vector<CylinderFunction> states_from_config(const json& cfg,
                                                   const CylindricalMeasure& m) const {
    if (!cfg.contains("states")) return default_probe_states(m);
    std::vector<CylinderFunction> states;
    const auto hoops = io::family_from_json(cfg.at("states"), "states");
    for (const auto& h : hoops) states.push_back(CylinderFunction::basis(h));
    return states;
  }

  int cmd_covariance(const std::string& hoops_path, double r, bool oracle_check);
  int cmd_cf(const std::string& hoop_path, const std::string& measure_path, double r);
  int cmd_sample(const std::string& measure_path, const std::string& hoops_path, double r, bool haar,
                 std::size_t draws);
  int cmd_translate(const std::string& measure_path, const std::string& field_path);
  int cmd_rn_check(const std::string& config_path);
  int cmd_hellinger(const std::string& config_path);
  int cmd_ergodic(const std::string& config_path);
  int cmd_classify(const std::string& config_path);
  int cmd_weyl_check(const std::string& config_path);
  int cmd_generator_check(const std::string& config_path);
  int cmd_invariance(const std::string& hoop_path, double r, int transforms);

  std::ostream& out_;
  std::ostream& err_;
  GlobalOptions opts_;
  RunManifest manifest_;
};

inline int Runner::cmd_covariance(const std::string& hoops_path, double r, bool oracle_check) {
  const auto family = family_from_any(io::read_json_file(hoops_path), "");
  if (family.empty()) throw io::FieldError("hoops", "must be non-empty");
  const auto model = covariance_matrix(family, SmearingScale(r), conv(), opts_.tol, opts_.threads);
  const auto m = CylindricalMeasure::gaussian(model);
  write_json("covariance.json", io::measure_to_json(m));
  out_ << "sigma (" << model.size() << "x" << model.size() << ", r = " << r << "):\n";
  for (Eigen::Index i = 0; i < model.sigma.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.sigma.cols(); ++j)
      out_ << (j ? " " : "") << io::format_double(model.sigma(i, j));
    out_ << '\n';
  }
  if (!oracle_check) return kExitOk;
  double worst = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i; j < family.size(); ++j) {
      const auto o = momentum_oracle_covariance(family[i], family[j], SmearingScale(r), conv(), 1.0,
                                                opts_.threads);
      worst = std::max(worst, std::abs(o.value - model.sigma(static_cast<Eigen::Index>(i),
                                                              static_cast<Eigen::Index>(j))));
    }
  const bool pass = worst < 1e-5;
  manifest_.extra["oracle_max_discrepancy"] = worst;
  out_ << "oracle max discrepancy: " << io::format_double(worst) << (pass ? " (pass)" : " (FAIL)")
       << '\n';
  return pass ? kExitOk : kExitCheckFailed;
}

inline int Runner::cmd_cf(const std::string& hoop_path, const std::string& measure_path, double r) {
  const Hoop h = io::hoop_from_json(io::read_json_file(hoop_path));
  std::complex<double> value;
  json details;
  if (!measure_path.empty()) {
    const auto m = io::measure_from_json(io::read_json_file(measure_path));
    value = char_functional(m, h);
  } else {
    if (!(r > 0.0)) throw io::FieldError("r", "must be > 0 (pass --r or --measure)");
    const double s = pair_covariance(h, h, SmearingScale(r), conv(), opts_.tol);
    value = std::exp(-0.5 * s);
    details["sigma"] = s;
    out_ << "sigma_aa = " << io::format_double(s) << '\n';
  }
  out_ << "phi = (" << io::format_double(value.real()) << ", " << io::format_double(value.imag())
       << ")\n";
  details["phi"] = {value.real(), value.imag()};
  manifest_.extra = details;
  write_json("cf.json", details);
  return kExitOk;
}

inline int Runner::cmd_sample(const std::string& measure_path, const std::string& hoops_path,
                              double r, bool haar, std::size_t draws) {
  CylindricalMeasure m;
  if (!measure_path.empty()) {
    m = io::measure_from_json(io::read_json_file(measure_path));
  } else {
    if (hoops_path.empty()) throw io::FieldError("measure", "pass --measure or --hoops");
    auto family = family_from_any(io::read_json_file(hoops_path), "");
    if (haar) {
      m = CylindricalMeasure::haar(std::move(family));
    } else {
      if (!(r > 0.0)) throw io::FieldError("r", "must be > 0 for a Gaussian measure");
      m = CylindricalMeasure::fock(family, SmearingScale(r), conv(), opts_.tol, opts_.threads);
    }
  }
  const CylSample s = sample(m, draws, opts_.seed, opts_.threads);
  std::ofstream f(output_path("samples.csv"));
  io::write_samples_csv(f, s);
  out_ << "wrote " << draws << " draws of " << m.size() << " angles\n";
  return kExitOk;
}

inline int Runner::cmd_translate(const std::string& measure_path, const std::string& field_path) {
  const auto m = io::measure_from_json(io::read_json_file(measure_path));
  const auto lambda = io::test_field_from_json(io::read_json_file(field_path));
  const auto moved = pushforward_translate(m, lambda);
  if (!m.is_gaussian()) out_ << "note: Haar marginal is translation invariant; unchanged\n";
  write_json("translated.json", io::measure_to_json(moved));
  if (moved.is_gaussian()) {
    out_ << "shift:";
    for (Eigen::Index i = 0; i < moved.mean.size(); ++i)
      out_ << ' ' << io::format_double(moved.mean[i] - m.mean[i]);
    out_ << '\n';
  }
  return kExitOk;
}

inline int Runner::cmd_rn_check(const std::string& config_path) {
  const json cfg = io::read_json_file(config_path);
  const auto m = fock_from_config(cfg);
  const std::size_t draws = cfg.contains("draws") ? cfg.at("draws").get<std::size_t>() : 100000;
  std::vector<TestField> fields;
  if (cfg.contains("fields")) {
    for (std::size_t i = 0; i < cfg.at("fields").size(); ++i)
      fields.push_back(io::test_field_from_json(cfg.at("fields")[i],
                                                "fields[" + std::to_string(i) + "]."));
  } else {
    fields.push_back(io::test_field_from_json(io::require(cfg, "lambda", ""), "lambda."));
  }
  const CylSample s = sample(m, draws, opts_.seed, opts_.threads);
  json report = json::array();
  bool pass = true;
  for (const auto& lambda : fields) {
    const Eigen::VectorXd c = shift_vector(lambda, m.family, SmearingScale(m.cov.r), m.cov.conv, m.cov.tol);
    const WrappedGaussian base(m.mean, m.sigma(), 3);
    const WrappedGaussian moved(m.mean + c, m.sigma(), 3);
    double sum = 0.0, sum2 = 0.0, g = 0.0, g2 = 0.0;
    for (Eigen::Index d = 0; d < s.angles.rows(); ++d) {
      const Eigen::VectorXd th = s.angles.row(d).transpose();
      const double rho = std::exp(moved.log_density(th) - base.log_density(th));
      sum += rho;
      sum2 += rho * rho;
      const double v = rho * std::cos(th[0]);
      g += v;
      g2 += v * v;
    }
    const double N = static_cast<double>(draws);
    const double mean_rho = sum / N;
    const double se_rho = std::sqrt(std::max(0.0, sum2 / N - mean_rho * mean_rho) / N);
    const double mean_g = g / N;
    const double se_g = std::sqrt(std::max(0.0, g2 / N - mean_g * mean_g) / N);
    const double exact_g = std::real(char_functional(pushforward_translate(m, lambda),
                                                     Eigen::VectorXd::Unit(m.mean.size(), 0)));
    const bool ok = std::abs(mean_rho - 1.0) < 3.0 * se_rho && std::abs(mean_g - exact_g) < 3.0 * se_g;
    pass = pass && ok;
    report.push_back({{"mean_rn", mean_rho},
                      {"se_rn", se_rho},
                      {"weighted_cos", mean_g},
                      {"translated_cos", exact_g},
                      {"se_cos", se_g},
                      {"pass", ok}});
  }
  manifest_.extra["checks"] = report;
  write_json("rn_check.json", report);
  out_ << report.dump(2) << '\n';
  return pass ? kExitOk : kExitCheckFailed;
}

inline int Runner::cmd_hellinger(const std::string& config_path) {
  const ExperimentConfig cfg = [&] {
    ExperimentConfig c = io::experiment_from_json(io::read_json_file(config_path));
    c.threads = opts_.threads;
    c.conv = conv();
    c.tol = opts_.tol;
    return c;
  }();
  if (cfg.r_values.size() < 2) throw io::FieldError("r_values", "need two smearing scales");
  const SmearingScale r(cfg.r_values[0]);
  const SmearingScale rp(cfg.r_values[1]);
  const auto table = hellinger_decay(cfg, r, rp);
  const auto haar_table = hellinger_decay_haar(cfg, r);
  {
    std::ofstream f(output_path("hellinger_decay.csv"));
    io::write_decay_csv(f, table);
  }
  {
    std::ofstream f(output_path("hellinger_decay_haar.csv"));
    io::write_decay_csv(f, haar_table);
  }
  const int n_star = predicted_crossing(table.front().affinity);
  int observed = -1;
  for (const auto& row : table)
    if (row.affinity < 0.01) {
      observed = row.n;
      break;
    }
  const json details = {{"r", cfg.r_values[0]},
                        {"r_prime", cfg.r_values[1]},
                        {"separation", cfg.separation},
                        {"affinity_n1", table.front().affinity},
                        {"predicted_crossing", n_star},
                        {"observed_crossing", observed}};
  write_sidecar("hellinger_decay.csv", details);
  manifest_.extra = details;
  out_ << details.dump(2) << '\n';
  return kExitOk;
}

inline int Runner::cmd_ergodic(const std::string& config_path) {
  const json raw = io::read_json_file(config_path);
  ExperimentConfig cfg = io::experiment_from_json(raw);
  const int n = raw.contains("n") ? raw.at("n").get<int>() : cfg.family_size_max;
  if (n < 2) throw io::FieldError("n", "must be >= 2");
  const auto family = make_translated_family(cfg.base_hoop, n, cfg.separation, cfg.direction);
  const auto haar = ergodic_average(CylindricalMeasure::haar(family), cfg.draws, opts_.seed, opts_.threads);
  std::ofstream f(output_path("ergodic.csv"));
  f << "measure,n,mean_re,mean_im,spread,expected\n";
  f << "haar," << n << ',' << io::format_double(haar.mean.real()) << ','
    << io::format_double(haar.mean.imag()) << ',' << io::format_double(haar.spread) << ",0\n";
  json rows = json::array();
  rows.push_back({{"measure", "haar"}, {"mean", {haar.mean.real(), haar.mean.imag()}}, {"spread", haar.spread}});
  for (double r : cfg.r_values) {
    const auto m = CylindricalMeasure::fock(family, SmearingScale(r), conv(), opts_.tol, opts_.threads);
    const auto res = ergodic_average(m, cfg.draws, opts_.seed, opts_.threads);
    const double expected = std::exp(-0.5 * m.sigma()(0, 0));
    f << "fock_r=" << r << ',' << n << ',' << io::format_double(res.mean.real()) << ','
      << io::format_double(res.mean.imag()) << ',' << io::format_double(res.spread) << ','
      << io::format_double(expected) << '\n';
    rows.push_back({{"measure", "fock"}, {"r", r}, {"mean", {res.mean.real(), res.mean.imag()}},
                    {"spread", res.spread}, {"expected", expected}});
  }
  f.close();
  write_sidecar("ergodic.csv", {{"n", n}, {"draws", cfg.draws}, {"separation", cfg.separation}});
  manifest_.extra["rows"] = rows;
  out_ << rows.dump(2) << '\n';
  return kExitOk;
}

inline int Runner::cmd_classify(const std::string& config_path) {
  const json raw = io::read_json_file(config_path);
  ExperimentConfig cfg = io::experiment_from_json(raw);
  const int n = cfg.family_size_max;
  const auto family = make_translated_family(cfg.base_hoop, n, cfg.separation, cfg.direction);
  std::vector<CylindricalMeasure> candidates;
  std::vector<std::string> names;
  for (double r : cfg.r_values) {
    candidates.push_back(CylindricalMeasure::fock(family, SmearingScale(r), conv(), opts_.tol, opts_.threads));
    names.push_back("fock_r=" + io::format_double(r));
  }
  const bool with_haar = !raw.contains("include_haar") || raw.at("include_haar").get<bool>();
  if (with_haar) {
    candidates.push_back(CylindricalMeasure::haar(family));
    names.push_back("haar");
  }
  std::ofstream f(output_path("classification.csv"));
  f << "source,draws,misclassification_rate,ambiguous,hellinger_bound\n";
  json rows = json::array();
  bool pass = true;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const CylSample s = sample(candidates[k], cfg.draws, opts_.seed + k, opts_.threads);
    const auto rep = classify_samples(s, candidates, static_cast<int>(k));
    // sum of pairwise affinities bounds the error of the max-likelihood rule
    double bound = 0.0;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      if (j == k) continue;
      try {
        bound += hellinger_affinity(candidates[k], candidates[j]).affinity;
      } catch (const FamilyNotDecorrelated&) {
        bound = 1.0;
      }
    }
    bound = std::min(bound, 1.0);
    const double rate = *rep.misclassification_rate;
    const double slack = 3.0 * std::sqrt(std::max(bound, 1.0 / cfg.draws) / cfg.draws);
    const bool ok = rate <= bound + slack;
    pass = pass && ok;
    f << names[k] << ',' << cfg.draws << ',' << io::format_double(rate) << ',' << rep.ambiguous << ','
      << io::format_double(bound) << '\n';
    rows.push_back({{"source", names[k]}, {"rate", rate}, {"ambiguous", rep.ambiguous},
                    {"hellinger_bound", bound}, {"pass", ok}});
  }
  f.close();
  write_sidecar("classification.csv", {{"n", n}, {"draws", cfg.draws}, {"separation", cfg.separation}});
  manifest_.extra["rows"] = rows;
  out_ << rows.dump(2) << '\n';
  return pass ? kExitOk : kExitCheckFailed;
}

inline int Runner::cmd_weyl_check(const std::string& config_path) {
  const json cfg = io::read_json_file(config_path);
  const auto m = fock_from_config(cfg);
  const Hoop alpha = io::hoop_from_json(io::require(cfg, "alpha", ""), "alpha.");
  const TestField lambda =
      cfg.contains("lambda") ? io::test_field_from_json(cfg.at("lambda"), "lambda.") : TestField{};
  const auto states = states_from_config(cfg, m);
  const double discrepancy = weyl_check(alpha, lambda, m, states);
  const double tolerance = 1e-8;
  const bool pass = discrepancy < tolerance;
  const json report = {{"identity", "weyl"},
                       {"max_discrepancy", discrepancy},
                       {"tolerance", tolerance},
                       {"pass", pass}};
  write_json("weyl_check.json", report);
  manifest_.extra = report;
  out_ << report.dump(2) << '\n';
  return pass ? kExitOk : kExitCheckFailed;
}

inline int Runner::cmd_generator_check(const std::string& config_path) {
  const json cfg = io::read_json_file(config_path);
  const auto m = fock_from_config(cfg);
  const Hoop alpha = io::hoop_from_json(io::require(cfg, "alpha", ""), "alpha.");
  const TestField lambda =
      cfg.contains("lambda") ? io::test_field_from_json(cfg.at("lambda"), "lambda.") : TestField{};
  const double h = number_or(cfg, "h_step", 1e-3);
  if (!(h > 0.0)) throw io::FieldError("h_step", "must be > 0");
  const auto states = states_from_config(cfg, m);
  const double fock = generator_commutator_check(alpha, lambda, m, h, states);
  const double fock_half = generator_commutator_check(alpha, lambda, m, 0.5 * h, states);
  const double haar = haar_commutator_check(alpha, lambda, h, states, conv(), opts_.tol);
  const double tolerance = 1e-5;
  const bool pass = fock < tolerance && haar < tolerance;
  const json report = {{"identity", "generator_commutator"},
                       {"fock_max_discrepancy", fock},
                       {"fock_max_discrepancy_half_step", fock_half},
                       {"convergence_ratio", fock_half > 0.0 ? fock / fock_half : 0.0},
                       {"haar_max_discrepancy", haar},
                       {"h_step", h},
                       {"tolerance", tolerance},
                       {"pass", pass}};
  write_json("generator_check.json", report);
  manifest_.extra = report;
  out_ << report.dump(2) << '\n';
  return pass ? kExitOk : kExitCheckFailed;
}

inline int Runner::cmd_invariance(const std::string& hoop_path, double r, int transforms) {
  const Hoop h = io::hoop_from_json(io::read_json_file(hoop_path));
  if (!(r > 0.0)) throw io::FieldError("r", "must be > 0");
  CounterRng rng(opts_.seed, 0);
  std::vector<EuclideanTransform> ts;
  for (int i = 0; i < transforms; ++i) ts.push_back(random_transform(rng));
  const double worst = euclidean_invariance_report(h, SmearingScale(r), ts, conv(), opts_.tol, opts_.threads);
  const double tolerance = 1e-8;
  const bool pass = worst < tolerance;
  const json report = {{"identity", "euclidean_invariance"},
                       {"transforms", transforms},
                       {"max_discrepancy", worst},
                       {"tolerance", tolerance},
                       {"pass", pass}};
  write_json("invariance.json", report);
  manifest_.extra = report;
  out_ << report.dump(2) << '\n';
  return pass ? kExitOk : kExitCheckFailed;
}

inline int Runner::run(const std::vector<std::string>& args) {
  CLI::App app{"r-Fock measures for U(1) holonomies: cylindrical experiments", "rfock"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--tol", opts_.tol, "quadrature tolerance")->capture_default_str();
  app.add_option("--mollifier", opts_.mollifier, "mollifier normalization")
      ->check(CLI::IsMember({"paper", "unit"}))
      ->capture_default_str();
  app.add_option("--seed", opts_.seed, "RNG seed")->capture_default_str();
  app.add_option("--threads", opts_.threads, "worker threads (0 = all)")->capture_default_str();
  app.add_option("--out", opts_.out_dir, "output directory")->capture_default_str();

  std::string config, hoop, hoops, measure, field;
  double r = 0.0;
  bool oracle_check = false;
  bool haar = false;
  std::size_t draws = 1000;
  int transforms = 20;

  auto* covariance = app.add_subcommand("covariance", "covariance matrix of a hoop family");
  covariance->add_option("--hoops", hoops, "JSON hoop family")->required();
  covariance->add_option("--r", r, "smearing scale")->required();
  covariance->add_flag("--oracle-check", oracle_check, "compare against the momentum-space oracle");

  auto* cf = app.add_subcommand("cf", "characteristic functional of a hoop");
  cf->add_option("--hoop", hoop, "JSON hoop")->required();
  cf->add_option("--r", r, "smearing scale");
  cf->add_option("--measure", measure, "JSON measure (instead of --r)");

  auto* samp = app.add_subcommand("sample", "draw samples of a cylindrical measure");
  samp->add_option("--measure", measure, "JSON measure");
  samp->add_option("--hoops", hoops, "JSON hoop family (with --r or --haar)");
  samp->add_option("--r", r, "smearing scale");
  samp->add_flag("--haar", haar, "sample the Haar marginal");
  samp->add_option("--draws", draws, "number of draws")->check(CLI::PositiveNumber);

  auto* translate = app.add_subcommand("translate", "push a Gaussian marginal forward by a test field");
  translate->add_option("--measure", measure, "JSON measure")->required();
  translate->add_option("--field", field, "JSON test field")->required();

  auto* invariance = app.add_subcommand("invariance", "Euclidean invariance of the self-covariance");
  invariance->add_option("--hoop", hoop, "JSON hoop")->required();
  invariance->add_option("--r", r, "smearing scale")->required();
  invariance->add_option("--transforms", transforms, "random rigid motions")->check(CLI::PositiveNumber);

  std::vector<std::pair<std::string, CLI::App*>> config_cmds;
  for (const char* name : {"rn-check", "hellinger", "ergodic", "classify", "weyl-check", "generator-check"}) {
    auto* sub = app.add_subcommand(name, std::string(name) + " experiment");
    sub->add_option("--config", config, "JSON config")->required();
    config_cmds.emplace_back(name, sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out_ << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  const auto started = std::chrono::steady_clock::now();
  CLI::App* chosen = app.get_subcommands().front();
  manifest_.subcommand = chosen->get_name();
  for (const std::string* path : {&config, &hoops, &hoop, &measure})
    if (!path->empty()) {
      manifest_.config_path = *path;
      break;
    }
  if (opts_.threads == 0) opts_.threads = default_threads();
  manifest_.options = opts_;

  int code = kExitOk;
  try {
    const std::string name = chosen->get_name();
    if (name == "covariance") code = cmd_covariance(hoops, r, oracle_check);
    else if (name == "cf") code = cmd_cf(hoop, measure, r);
    else if (name == "sample") code = cmd_sample(measure, hoops, r, haar, draws);
    else if (name == "translate") code = cmd_translate(measure, field);
    else if (name == "invariance") code = cmd_invariance(hoop, r, transforms);
    else if (name == "rn-check") code = cmd_rn_check(config);
    else if (name == "hellinger") code = cmd_hellinger(config);
    else if (name == "ergodic") code = cmd_ergodic(config);
    else if (name == "classify") code = cmd_classify(config);
    else if (name == "weyl-check") code = cmd_weyl_check(config);
    else if (name == "generator-check") code = cmd_generator_check(config);
  } catch (const io::FieldError& e) {
    err_ << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const json::exception& e) {
    err_ << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const Error& e) {
    err_ << "input error: " << e.what() << '\n';
    return kExitInputError;
  }
  manifest_.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  manifest_.outputs.push_back((std::filesystem::path(opts_.out_dir) / "manifest.json").string());
  write_json("manifest.json", manifest_.to_json());
  manifest_.outputs.pop_back();
  return code;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  Runner runner(out, err);
  return runner.run(args);
}

}  // namespace rfock::cli
