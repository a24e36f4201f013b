// spikelab command-line front end.
//
//   spikelab limits eval --fn f --x 2
//   spikelab limits estimate-F --theta 3 --pmax 300
//   spikelab comb verify --max-l 12
//   spikelab comb btable --l 2
//   spikelab comb s1 --theta 1 --p 3
//   spikelab simulate --config configs/thm3.json --out results/
//   spikelab sweep --config configs/thm1_sweep.json --out results/
//
// Exit codes: 0 success, 1 runtime or numeric failure, 2 usage error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "spikelab/spikelab.hpp"

namespace fs = std::filesystem;
using namespace spikelab;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out = ".";
  std::string config;
};

// "3", "0.5", "-1.25e-3" or "1/2", exactly.
Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos)
    return Rational(BigInt(text.substr(0, slash))) / Rational(BigInt(text.substr(slash + 1)));
  std::string s = text;
  long long exp10 = 0;
  if (const auto e = s.find_first_of("eE"); e != std::string::npos) {
    exp10 = std::stoll(s.substr(e + 1));
    s = s.substr(0, e);
  }
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s = s.substr(1);
  }
  if (const auto dot = s.find('.'); dot != std::string::npos) {
    exp10 -= static_cast<long long>(s.size() - dot - 1);
    s.erase(dot, 1);
  }
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw InvalidArgument("not a number: '" + text + "'");
  Rational r{BigInt(s)};
  BigInt p10 = 1;
  for (long long i = 0; i < std::llabs(exp10); ++i) p10 *= 10;
  r = exp10 >= 0 ? r * Rational(p10) : r / Rational(p10);
  return negative ? -r : r;
}

std::string rational_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

Json rational_value(const Rational& r) {
  if (denominator(r) == 1 && boost::multiprecision::abs(numerator(r)) < BigInt(1) << 62)
    return numerator(r).convert_to<long long>();
  return static_cast<double>(r);
}

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

int run_limits_eval(const std::string& fn, double x, double theta, double alpha, double c, double y,
                    std::optional<double> F) {
  Json out;
  if (fn == "f") out = {{"value", f_bbp(x)}};
  else if (fn == "finv") out = {{"value", f_inverse_upper(y)}};
  else if (fn == "Ecdf") out = {{"value", frechet_E_cdf(alpha, x)}};
  else if (fn == "zetacdf") out = {{"value", zeta_cdf(c, x)}};
  else if (fn == "fzetacdf") out = {{"value", f_zeta_cdf(c, y)}};
  else if (fn == "thm1cdf") out = {{"value", thm1_cdf(theta, alpha, y)}};
  else if (fn == "thm2cdf") out = {{"value", thm2_cdf(F ? *F : F_for_target(theta), c, y)}};
  else if (fn == "thm3cdf") out = {{"value", thm3_cdf(theta, c, y)}};
  else if (fn == "G1" || fn == "G2") {
    const GFunctionResult g = fn == "G1" ? G1(theta) : G2(theta);
    out = {{"value", g.value}, {"inner_root", g.inner_root}, {"residual", g.residual}};
  } else if (fn == "suph" || fn == "suph1" || fn == "suph2") {
    const SupResult s = fn == "suph" ? sup_h_lemma9(theta) : fn == "suph1" ? sup_h1(theta) : sup_h2(theta);
    out = {{"value", s.grid_value}, {"analytic", s.analytic_value}, {"argmax", s.argmax},
           {"residual", std::abs(s.grid_value - s.analytic_value)}};
  } else {
    throw InvalidArgument("unknown function '" + fn + "'");
  }
  emit(out);
  return 0;
}

int run_estimate_F(double theta, int pmax) {
  const FEstimate est = estimate_F(theta, pmax);
  const std::size_t k = est.value.size();
  Json seq = Json::array();
  for (std::size_t i = 0; i < k; ++i) seq.push_back({{"p", est.p[i]}, {"value", est.value[i]}});
  emit({{"theta", theta},
        {"pmax", pmax},
        {"value", est.last()},
        {"bracket", {est.bracket_lo, est.bracket_hi}},
        // change over the final step of the sequence
        {"residual", k >= 2 ? std::abs(est.value[k - 1] - est.value[k - 2]) : 0.0},
        {"sequence", seq}});
  return 0;
}

int run_comb_verify(int max_l) {
  require(max_l >= 1 && max_l <= kCycleClassCap, "verify: --max-l must lie in [1, 12]");
  Json failures = Json::array();
  bool l4 = true, l78 = true, bs = true;
  for (int l = 1; l <= max_l; ++l)
    for (int s = 1; s <= l; ++s)
      if (!verify_lemma4(l, s)) {
        l4 = false;
        failures.push_back({{"check", "lemma4"}, {"l", l}, {"s", s}});
      }
  for (int l = 1; l <= max_l; ++l)
    for (int s = 1; s <= std::min(max_l, 12); ++s) {
      const auto rep = verify_lemma78(l, s);
      if (!rep.holds()) {
        l78 = false;
        failures.push_back({{"check", rep.upper_holds ? "lemma78_lower" : "lemma78_upper"},
                            {"l", l},
                            {"s", s},
                            {"sigma", rational_string(Rational(rep.sigma))},
                            {"bound", rational_string(rep.upper_holds ? rep.lower_bound : rep.upper_bound)}});
      }
    }
  for (int l = 1; l <= max_l; ++l) {
    const auto t = enumerate_cycle_classes(l);
    const BigInt C = catalan(l);
    const auto rep = verify_bsizes(t);
    const bool sums = t.class_count == C && t.vertex_total() == C * (l + 1) && t.position_total() == C * (2 * l + 1);
    if (!rep.holds || !sums) {
      bs = false;
      failures.push_back({{"check", "bsizes"}, {"l", l}, {"t", rep.first_violation_t}});
    }
  }
  auto verdict = [](bool ok) { return ok ? "pass" : "fail"; };
  emit({{"lemma4", verdict(l4)}, {"lemma78", verdict(l78)}, {"bsizes", verdict(bs)}, {"failures", failures}});
  return (l4 && l78 && bs) ? 0 : 1;
}

int run_comb_btable(int l) {
  const auto t = enumerate_cycle_classes(l);
  Json b = Json::object();
  for (int k = 1; k <= l + 1; ++k) b[std::to_string(k)] = t.at(k).convert_to<long long>();
  emit({{"l", l}, {"b", b}, {"catalan", catalan(l).convert_to<long long>()}});
  return 0;
}

int run_comb_sum(const std::string& which, const std::string& theta_text, int p, const std::string& mode) {
  if (which == "s1" && mode == "log") {
    const double theta = static_cast<double>(parse_rational(theta_text));
    const double lv = s1_log(theta, p);
    emit({{"log_value", lv}, {"root", std::exp(lv / (2.0 * p))}, {"mode", "log"}});
    return 0;
  }
  require(mode == "exact", "unknown mode '" + mode + "'");
  const Rational v = parse_rational(theta_text);
  if (which == "s2" && p - 1 > kCycleClassCap) {
    const SumValue est = s2(static_cast<double>(v), p);
    emit({{"log_value", est.log_value}, {"estimate", true}, {"mode", "bound"}});
    return 0;
  }
  Rational r;
  if (which == "s1") r = s1_exact(v, p);
  else if (which == "s2") r = s2_exact(v, p, cycle_class_tables(p - 1));
  else r = s_of_M_exact(p, v, cycle_class_tables(p - 1));
  emit({{"value", rational_value(r)}, {"exact", rational_string(r)}, {"mode", "exact"}});
  return 0;
}

// ---------------------------------------------------------------------------

struct SimFlags {
  std::string law = "pareto";
  double alpha = 2.0;
  double scale = 1.0;
  std::string scaling;
  double theta = 0.0;
  std::string spike = "uniform";
  std::size_t spike_index = 1;
  std::vector<std::size_t> n_list;
  std::size_t trials = 1;
  bool timing = false;
  bool check_spike_order = false;
};

ExperimentConfig build_config(const Globals& g, const SimFlags& f) {
  Json j;
  if (!g.config.empty()) {
    j = read_json_file(g.config);
    if (j.contains("config") && j.at("config").is_object()) j = j.at("config");
  } else {
    Json law = f.law == "pareto" ? Json{{"family", "pareto"}, {"alpha", f.alpha}, {"scale", f.scale}}
                                 : Json{{"family", f.law}};
    Json spike = f.spike == "basis" ? Json{{"kind", "basis"}, {"index", f.spike_index}} : Json{{"kind", f.spike}};
    j = {{"model", {{"law", law}, {"theta", f.theta}, {"spike", spike}}}, {"n_list", f.n_list}, {"trials", f.trials}};
    if (!f.scaling.empty()) j["model"]["scaling"] = f.scaling;
  }
  if (g.seed) j["master_seed"] = *g.seed;
  if (f.timing) j["timing"] = true;
  if (f.check_spike_order) j["check_spike_order"] = true;
  j["threads"] = g.threads;
  return config_from_json(j);
}

int run_simulation(const std::string& command, const Globals& g, const SimFlags& f, bool sweep) {
  const ExperimentConfig cfg = build_config(g, f);
  if (sweep) require(cfg.n_list.size() >= 2, "sweep: need at least two dimensions in n_list");
  RunManifest manifest{command, cfg, run_id(cfg), utc_timestamp(), {}};
  const auto records = run_experiment(cfg);
  const SweepTable table = summarize(cfg, records);
  manifest.finished = utc_timestamp();

  fs::create_directories(g.out);
  std::ostringstream csv;
  write_trials_csv(csv, manifest.id, records);
  write_text_file((fs::path(g.out) / "trials.csv").string(), csv.str());
  Json summary = {{"run_id", manifest.id}, {"rows", summary_json(table)}};
  if (cfg.check_spike_order) {
    std::size_t violations = 0;
    for (const auto& r : records)
      if (r.lambda1_unspiked && r.lambda1 < *r.lambda1_unspiked - 1e-9 * std::max(1.0, std::abs(r.lambda1)))
        ++violations;
    summary["spike_order_violations"] = violations;
  }
  write_text_file((fs::path(g.out) / "summary.json").string(), summary.dump(2) + "\n");
  write_text_file((fs::path(g.out) / "manifest.json").string(), manifest.to_json().dump(2) + "\n");
  emit(summary);
  return 0;
}

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
  cmd->add_option("--law", f.law, "pareto | pareto4_unitvar")->check(CLI::IsMember({"pareto", "pareto4_unitvar"}));
  cmd->add_option("--alpha", f.alpha, "tail index for pareto");
  cmd->add_option("--scale", f.scale, "scale for pareto");
  cmd->add_option("--scaling", f.scaling, "inv_bn | inv_sqrt_n (default from alpha)");
  cmd->add_option("--theta", f.theta, "spike strength");
  cmd->add_option("--spike", f.spike, "uniform | basis")->check(CLI::IsMember({"uniform", "basis"}));
  cmd->add_option("--spike-index", f.spike_index, "1-based coordinate for --spike basis");
  cmd->add_option("--n", f.n_list, "dimensions, ascending")->delimiter(',');
  cmd->add_option("--trials", f.trials, "trials per dimension");
  cmd->add_flag("--timing", f.timing, "record wall_time_ms (makes CSV output run-dependent)");
  cmd->add_flag("--check-spike-order", f.check_spike_order, "also solve the unspiked matrix per trial");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spikelab: spiked heavy-tailed Wigner matrices"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output directory");
  app.add_option("--config", g.config, "JSON config or manifest");

  int rc = 0;
  std::function<int()> action;

  auto* limits = app.add_subcommand("limits", "limit laws and limit functions");
  limits->require_subcommand(1);
  std::string fn;
  double x = 1.0, theta = 1.0, alpha = 2.0, c = 0.25, y = 2.0;
  std::optional<double> F;
  auto* eval = limits->add_subcommand("eval", "evaluate one function");
  eval->add_option("--fn", fn, "f finv Ecdf zetacdf fzetacdf thm1cdf thm2cdf thm3cdf G1 G2 suph suph1 suph2")
      ->required();
  eval->add_option("--x", x);
  eval->add_option("--theta", theta);
  eval->add_option("--alpha", alpha);
  eval->add_option("--c", c);
  eval->add_option("--y", y);
  eval->add_option("--F", F, "F(theta) for thm2cdf; estimated when absent");
  eval->callback([&] { action = [&] { return run_limits_eval(fn, x, theta, alpha, c, y, F); }; });
  int pmax = 300;
  auto* estF = limits->add_subcommand("estimate-F", "finite-p sequence for F(theta) with its bracket");
  estF->add_option("--theta", theta)->required();
  estF->add_option("--pmax", pmax);
  estF->callback([&] { action = [&] { return run_estimate_F(theta, pmax); }; });

  auto* comb = app.add_subcommand("comb", "exact combinatorics");
  comb->require_subcommand(1);
  int max_l = 12, l = 1, p = 1;
  std::string theta_text = "1", mode = "exact";
  auto* verify = comb->add_subcommand("verify", "exhaustive identity and bound checks");
  verify->add_option("--max-l", max_l);
  verify->callback([&] { action = [&] { return run_comb_verify(max_l); }; });
  auto* btable = comb->add_subcommand("btable", "vertex multiplicity counts b_{l,t}");
  btable->add_option("--l", l)->required();
  btable->callback([&] { action = [&] { return run_comb_btable(l); }; });
  for (const char* which : {"s1", "s2", "s-of-M"}) {
    auto* sub = comb->add_subcommand(which, std::string("generating sum ") + which);
    sub->add_option(std::string(which) == "s-of-M" ? "--M" : "--theta", theta_text, "exact decimal or p/q");
    sub->add_option("--p", p)->required();
    if (std::string(which) == "s1") sub->add_option("--mode", mode, "exact | log");
    const std::string name = which;
    sub->callback([&, name] { action = [&, name] { return run_comb_sum(name, theta_text, p, mode); }; });
  }

  SimFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run, writes trials.csv, summary.json, manifest.json");
  add_sim_flags(simulate, sim_flags);
  simulate->callback([&] { action = [&] { return run_simulation("simulate", g, sim_flags, false); }; });
  auto* sweep = app.add_subcommand("sweep", "KS distance against the limit law across n_list");
  add_sim_flags(sweep, sim_flags);
  sweep->callback([&] { action = [&] { return run_simulation("sweep", g, sim_flags, true); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    rc = action ? action() : 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
