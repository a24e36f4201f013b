#pragma once

// JSON configuration, CSV/JSON emission and run manifests.

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spikelab/errors.hpp"
#include "spikelab/monte_carlo.hpp"

namespace spikelab {

using Json = nlohmann::json;

inline constexpr const char* kCodeVersion = "spikelab 0.1.0";

// Shortest round-trip decimal form.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

// ---------------------------------------------------------------------------
// Config <-> JSON

inline TailLaw law_from_json(const Json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "pareto") return TailLaw::pareto(j.at("alpha").get<double>(), j.value("scale", 1.0));
  if (family == "pareto4_unitvar") return TailLaw::pareto4_unit_variance();
  throw InvalidArgument("unknown law family '" + family + "'");
}

inline Json law_to_json(const TailLaw& law) {
  if (law.family() == TailFamily::NormalizedSymmetricPareto4) return {{"family", "pareto4_unitvar"}};
  require(law.family() == TailFamily::SymmetricPareto, "explicit-survival laws cannot be serialized");
  return {{"family", "pareto"}, {"alpha", law.alpha()}, {"scale", law.scale()}};
}

inline SpikeVectorSpec spike_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") return spike::UniformDelocalized{};
  if (kind == "basis") return spike::Basis{j.value("index", std::size_t{1})};
  if (kind == "head")
    return spike::HeadLocalized{j.at("k").get<std::size_t>(), j.value("weights", std::vector<double>{})};
  if (kind == "explicit") return spike::Explicit{j.at("values").get<std::vector<double>>()};
  throw InvalidArgument("unknown spike kind '" + kind + "'");
}

inline Json spike_to_json(const SpikeVectorSpec& spec) {
  if (const auto* b = std::get_if<spike::Basis>(&spec)) return {{"kind", "basis"}, {"index", b->index}};
  if (std::holds_alternative<spike::UniformDelocalized>(spec)) return {{"kind", "uniform"}};
  if (const auto* h = std::get_if<spike::HeadLocalized>(&spec))
    return {{"kind", "head"}, {"k", h->k}, {"weights", h->weights}};
  return {{"kind", "explicit"}, {"values", std::get<spike::Explicit>(spec).values}};
}

inline const char* statistic_name(Statistic s) {
  switch (s) {
    case Statistic::Lambda1: return "lambda1";
    case Statistic::MaxA: return "maxA";
    case Statistic::OpNorm: return "opnorm";
  }
  return "?";
}

inline Statistic statistic_from_name(const std::string& s) {
  if (s == "lambda1") return Statistic::Lambda1;
  if (s == "maxA") return Statistic::MaxA;
  if (s == "opnorm") return Statistic::OpNorm;
  throw InvalidArgument("unknown statistic '" + s + "'");
}

// Accepts a bare config or a manifest carrying one under "config".
inline ExperimentConfig config_from_json(const Json& root) {
  const Json& j = root.contains("config") && root.at("config").is_object() ? root.at("config") : root;
  try {
    ExperimentConfig cfg;
    const Json& m = j.at("model");
    cfg.model.law = law_from_json(m.at("law"));
    const std::string scaling = m.value("scaling", cfg.model.law.alpha() < 4.0 ? "inv_bn" : "inv_sqrt_n");
    if (scaling == "inv_bn") cfg.model.scaling = Scaling::InvBn;
    else if (scaling == "inv_sqrt_n") cfg.model.scaling = Scaling::InvSqrtN;
    else throw InvalidArgument("unknown scaling '" + scaling + "'");
    cfg.model.theta = m.value("theta", 0.0);
    cfg.model.spike = m.contains("spike") ? spike_from_json(m.at("spike")) : SpikeVectorSpec{spike::UniformDelocalized{}};
    cfg.n_list = j.at("n_list").get<std::vector<std::size_t>>();
    cfg.trials = j.value("trials", std::size_t{1});
    cfg.master_seed = j.value("master_seed", std::uint64_t{0});
    if (j.contains("statistics")) {
      cfg.statistics.clear();
      for (const auto& s : j.at("statistics")) cfg.statistics.push_back(statistic_from_name(s.get<std::string>()));
    }
    cfg.threads = j.value("threads", 1u);
    cfg.record_timing = j.value("timing", false);
    cfg.check_spike_order = j.value("check_spike_order", false);
    cfg.validate();
    return cfg;
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

// Canonical form: everything that affects the data files. Threads and timing
// are excluded so that they cannot change run_id.
inline Json config_to_json(const ExperimentConfig& cfg) {
  Json stats = Json::array();
  for (Statistic s : cfg.statistics) stats.push_back(statistic_name(s));
  return {{"model",
           {{"law", law_to_json(cfg.model.law)},
            {"scaling", cfg.model.scaling == Scaling::InvBn ? "inv_bn" : "inv_sqrt_n"},
            {"theta", cfg.model.theta},
            {"spike", spike_to_json(cfg.model.spike)}}},
          {"n_list", cfg.n_list},
          {"trials", cfg.trials},
          {"master_seed", cfg.master_seed},
          {"statistics", stats},
          {"check_spike_order", cfg.check_spike_order}};
}

inline std::string run_id(const ExperimentConfig& cfg) { return hex64(fnv1a64(config_to_json(cfg).dump())); }

// ---------------------------------------------------------------------------
// Output

inline void write_trials_csv(std::ostream& os, const std::string& id, const std::vector<TrialRecord>& recs) {
  os << "run_id,n,trial_index,seed,lambda1,maxA,wall_time_ms\n";
  for (const auto& r : recs)
    os << id << ',' << r.n << ',' << r.trial_index << ',' << r.seed << ',' << format_double(r.lambda1) << ','
       << format_double(r.maxA) << ',' << format_double(r.wall_time_ms) << '\n';
}

inline Json law_params_json(const LimitLawSpec& spec) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, law::FrechetE>) return {{"alpha", s.alpha}};
        else if constexpr (std::is_same_v<T, law::Zeta> || std::is_same_v<T, law::FOfZeta>) return {{"c", s.c}};
        else if constexpr (std::is_same_v<T, law::Thm1>) return {{"theta", s.theta}, {"alpha", s.alpha}};
        else if constexpr (std::is_same_v<T, law::Thm2>) return {{"theta", s.theta}, {"c", s.c}, {"F", s.F}};
        else return {{"theta", s.theta}, {"c", s.c}};
      },
      spec);
}

inline Json summary_json(const SweepTable& table) {
  Json rows = Json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"n", r.n},
                    {"trials", r.trials},
                    {"ks", r.ks},
                    {"ks_shifted", r.ks_shifted},
                    {"median_lambda1", r.median_lambda1},
                    {"median_maxA", r.median_maxA},
                    {"target_law", describe(table.target)},
                    {"params", law_params_json(table.target)}});
  return rows;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::string command;
  ExperimentConfig config;
  std::string id;
  std::string started;
  std::string finished;

  Json to_json() const {
    return {{"manifest_id", id},
            {"command", command},
            {"config", config_to_json(config)},
            {"code_version", kCodeVersion},
            {"master_seed", config.master_seed},
            {"timestamps", {{"started", started}, {"finished", finished}}}};
  }
};

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InvalidArgument("'" + path + "': " + e.what());
  }
}

}  // namespace spikelab
