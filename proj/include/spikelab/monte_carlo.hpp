#pragma once

// Seeded Monte Carlo runner for lambda_1 and max(A), plus empirical CDFs,
// KS distances and convergence sweeps against the theorem limit laws.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "spikelab/errors.hpp"
#include "spikelab/limit_laws.hpp"
#include "spikelab/matrix_lab.hpp"
#include "spikelab/rng.hpp"

namespace spikelab {

enum class Statistic { Lambda1, MaxA, OpNorm };

struct ExperimentConfig {
  SpikedModel model;  // model.n is overwritten per entry of n_list
  std::vector<std::size_t> n_list;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  std::vector<Statistic> statistics{Statistic::Lambda1, Statistic::MaxA};  // lambda1, maxA always recorded
  unsigned threads = 1;
  bool record_timing = false;    // off keeps CSV output byte-stable
  bool check_spike_order = false;  // also solve the unspiked matrix

  void validate() const {
    require(trials >= 1, "config: trials must be >= 1");
    require(!n_list.empty(), "config: n_list must be nonempty");
    require(std::is_sorted(n_list.begin(), n_list.end()) &&
                std::adjacent_find(n_list.begin(), n_list.end()) == n_list.end(),
            "config: n_list must be strictly ascending");
    require(n_list.front() >= 1, "config: dimensions must be >= 1");
    require(threads >= 1, "config: threads must be >= 1");
    SpikedModel probe = model;
    probe.n = n_list.front();
    probe.validate();
  }

  bool wants(Statistic s) const {
    return std::find(statistics.begin(), statistics.end(), s) != statistics.end();
  }
};

struct TrialRecord {
  std::size_t n = 0;
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  double lambda1 = NAN;
  double maxA = NAN;
  std::optional<double> opnorm;
  std::optional<double> lambda1_unspiked;  // lambda_1 of scale * A
  double wall_time_ms = 0.0;
};

inline TrialRecord run_trial(const ExperimentConfig& config, std::size_t n, std::size_t trial_index) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.n = n;
  rec.trial_index = trial_index;
  rec.seed = derive_seed(config.master_seed, n, trial_index);
  SpikedModel model = config.model;
  model.n = n;
  const Matrix A = build_wigner(n, model.law, rec.seed);
  const double scale = model.scale_factor();
  rec.maxA = max_entry_stat(A, scale);
  const Matrix P = perturbed_matrix(A, model);
  rec.lambda1 = largest_eigenvalue(P);
  if (config.wants(Statistic::OpNorm)) rec.opnorm = operator_norm(P);
  if (config.check_spike_order) rec.lambda1_unspiked = largest_eigenvalue(scale * A);
  if (config.record_timing)
    rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

// Records sorted by (n, trial_index); identical for every thread count.
inline std::vector<TrialRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  struct Task { std::size_t n, trial; };
  std::vector<Task> tasks;
  for (std::size_t n : config.n_list)
    for (std::size_t t = 0; t < config.trials; ++t) tasks.push_back({n, t});

  std::vector<TrialRecord> out(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure) return;
      }
      const Task& task = tasks[k];
      try {
        out[k] = run_trial(config, task.n, task.trial);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure)
          failure = std::make_exception_ptr(NumericFailure(
              "trial n=" + std::to_string(task.n) + " index=" + std::to_string(task.trial) +
              " seed=" + std::to_string(derive_seed(config.master_seed, task.n, task.trial)) + ": " + e.what()));
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(tasks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

// ---------------------------------------------------------------------------
// Empirical distributions

class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> values) : values_(std::move(values)) {
    require(!values_.empty(), "EmpiricalDistribution: need at least one sample");
    for (double v : values_) require(!std::isnan(v), "EmpiricalDistribution: NaN sample");
    std::sort(values_.begin(), values_.end());
  }

  const std::vector<double>& sorted() const { return values_; }
  std::size_t size() const { return values_.size(); }

  // Right-continuous step function.
  double cdf(double y) const {
    const auto it = std::upper_bound(values_.begin(), values_.end(), y);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
  }

 private:
  std::vector<double> values_;
};

// sup |F_N - F| over both one-sided limits at every jump. F's left limit is
// taken one ulp below the jump so that atoms in F are handled.
inline double ks_distance(const EmpiricalDistribution& emp, const std::function<double(double)>& cdf) {
  const auto& xs = emp.sorted();
  const double N = static_cast<double>(xs.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i;
    while (j + 1 < xs.size() && xs[j + 1] == xs[i]) ++j;
    const double below = static_cast<double>(i) / N;
    const double above = static_cast<double>(j + 1) / N;
    const double F_left = cdf(std::nextafter(xs[i], -INFINITY));
    const double F_at = cdf(xs[i]);
    d = std::max({d, std::abs(below - F_left), std::abs(above - F_at)});
    i = j + 1;
  }
  return d;
}

// Order statistic at index ceil(qN), 1-based; q = 0 gives the minimum.
inline double quantile(const EmpiricalDistribution& emp, double q) {
  require(q >= 0.0 && q <= 1.0, "quantile: q must lie in [0, 1]");
  const auto& xs = emp.sorted();
  const double N = static_cast<double>(xs.size());
  // Absorb representation error such as 0.34 * 100 = 34.000000000000004.
  auto k = static_cast<std::size_t>(std::ceil(q * N - 1e-9));
  k = std::clamp<std::size_t>(k, 1, xs.size());
  return xs[k - 1];
}

inline double median(const EmpiricalDistribution& emp) { return quantile(emp, 0.5); }

// ---------------------------------------------------------------------------
// Target laws

// F(theta) used by the delocalized alpha = 4 limit: 2 for theta <= 1, otherwise
// the finite-p estimate at p = 300 (never below 2).
inline double F_for_target(double theta) {
  if (theta <= 1.0) return 2.0;
  return std::max(2.0, estimate_F(theta, 300).last());
}

inline LimitLawSpec target_law(const SpikedModel& model) {
  if (model.scaling == Scaling::InvBn) return law::Thm1{model.theta, model.law.alpha()};
  const double c = model.law.tail_constant();
  if (model.theta == 0.0) return law::FOfZeta{c};
  if (spike_is_localized(model.spike)) return law::Thm3{model.theta, c};
  return law::Thm2{model.theta, c, F_for_target(model.theta)};
}

struct SweepRow {
  std::size_t n = 0;
  std::size_t trials = 0;
  double ks = 0.0;            // against the target law
  double ks_shifted = 0.0;    // against the target law with theta + 2
  double median_lambda1 = 0.0;
  double median_maxA = 0.0;
};

struct SweepTable {
  LimitLawSpec target;
  LimitLawSpec shifted;
  std::vector<SweepRow> rows;
};

inline std::vector<double> column(const std::vector<TrialRecord>& recs, std::size_t n,
                                  double TrialRecord::*field) {
  std::vector<double> out;
  for (const auto& r : recs)
    if (r.n == n) out.push_back(r.*field);
  return out;
}

inline SweepTable summarize(const ExperimentConfig& config, const std::vector<TrialRecord>& records) {
  SweepTable table;
  table.target = target_law(config.model);
  SpikedModel shifted = config.model;
  shifted.theta += 2.0;
  table.shifted = target_law(shifted);
  for (std::size_t n : config.n_list) {
    const EmpiricalDistribution lam(column(records, n, &TrialRecord::lambda1));
    const EmpiricalDistribution mx(column(records, n, &TrialRecord::maxA));
    SweepRow row;
    row.n = n;
    row.trials = lam.size();
    row.ks = ks_distance(lam, [&](double y) { return cdf(table.target, y); });
    row.ks_shifted = ks_distance(lam, [&](double y) { return cdf(table.shifted, y); });
    row.median_lambda1 = median(lam);
    row.median_maxA = median(mx);
    table.rows.push_back(row);
  }
  return table;
}

inline SweepTable convergence_sweep(const ExperimentConfig& config) {
  require(config.n_list.size() >= 2, "convergence_sweep: need at least two dimensions");
  return summarize(config, run_experiment(config));
}

}  // namespace spikelab
