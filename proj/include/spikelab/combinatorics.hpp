#pragma once

// Exact Catalan machinery: convolution powers, the positive-composition
// identity, the r(l) tail series, even-cycle classes as Euler tours of rooted
// plane trees, and the generating sums s_1, s_2 and s(p, M).
//
// Everything below the enumeration cap is exact (cpp_int / cpp_rational).
// s_1 also has a long-double path, scaled by 4^-l, that reaches p ~ 1000.

#include <boost/multiprecision/cpp_int.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spikelab/errors.hpp"

namespace spikelab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt binomial(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (long long i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

inline BigInt catalan(int l) {
  require(l >= 0, "catalan: l must be >= 0");
  return binomial(2LL * l, l) / (l + 1);
}

// C_0 .. C_lmax.
struct CatalanTable {
  std::vector<BigInt> values;

  explicit CatalanTable(int lmax) {
    require(lmax >= 0, "CatalanTable: lmax must be >= 0");
    values.reserve(static_cast<std::size_t>(lmax) + 1);
    for (int l = 0; l <= lmax; ++l) values.push_back(catalan(l));
  }

  const BigInt& operator[](int l) const { return values.at(static_cast<std::size_t>(l)); }
  int lmax() const { return static_cast<int>(values.size()) - 1; }

  // C_{l+1} = sum_{i+j=l} C_i C_j for every l < lmax.
  bool satisfies_recurrence() const {
    if (values.front() != 1) return false;
    for (int l = 0; l + 1 <= lmax(); ++l) {
      BigInt acc = 0;
      for (int i = 0; i <= l; ++i) acc += (*this)[i] * (*this)[l - i];
      if (acc != (*this)[l + 1]) return false;
    }
    return true;
  }
};

// row[k] = sum over (l_1..l_s), l_i >= min_part, sum = k, of prod C_{l_i};
// returned for every s in [0, smax] and k in [0, lmax].
inline std::vector<std::vector<BigInt>> composition_table(int lmax, int smax, int min_part) {
  const CatalanTable C(lmax);
  std::vector<std::vector<BigInt>> table(static_cast<std::size_t>(smax) + 1,
                                         std::vector<BigInt>(static_cast<std::size_t>(lmax) + 1, 0));
  table[0][0] = 1;
  for (int s = 1; s <= smax; ++s)
    for (int k = 0; k <= lmax; ++k) {
      BigInt acc = 0;
      for (int part = min_part; part <= k; ++part) acc += C[part] * table[s - 1][k - part];
      table[s][k] = acc;
    }
  return table;
}

// sigma(l, s) = sum_{l_1+..+l_s = l, l_i >= 0} C_{l_1} .. C_{l_s}.
inline BigInt sigma_conv(int l, int s) {
  require(l >= 0 && s >= 1, "sigma_conv: need l >= 0 and s >= 1");
  return composition_table(l, s, 0)[s][l];
}

// Same sum restricted to l_i >= 1; zero when l < s.
inline BigInt positive_conv(int l, int s) {
  require(l >= 0 && s >= 1, "positive_conv: need l >= 0 and s >= 1");
  if (l < s) return 0;
  return composition_table(l, s, 1)[s][l];
}

// positive_conv(l, s) == sigma_conv(l - s, 2s).
inline bool verify_lemma4(int l, int s) {
  require(s >= 1 && l >= s, "verify_lemma4: need l >= s >= 1");
  return positive_conv(l, s) == sigma_conv(l - s, 2 * s);
}

// ---------------------------------------------------------------------------
// r(l) = sum_{i >= l} C_i / 4^i. The full series is c(1/4) = 2, so the tail
// has the exact closed form 2 - sum_{i < l} C_i / 4^i.

struct RTail {
  Rational exact;
  double partial_sum = 0.0;  // terms l .. l + terms - 1
  double remainder_bound = 0.0;
  double value() const { return static_cast<double>(exact); }
};

inline Rational r_tail_exact(int l) {
  require(l >= 0, "r_tail: l must be >= 0");
  Rational head = 0;
  BigInt pow4 = 1;
  for (int i = 0; i < l; ++i) {
    head += Rational(catalan(i), pow4);
    pow4 *= 4;
  }
  return Rational(2) - head;
}

// Series evaluation with a rigorous bound on the neglected terms, using
// C_i / 4^i <= 1 / (sqrt(pi) i^(3/2)) for i >= 1.
inline RTail r_tail(int l, int terms = 200) {
  require(terms >= 1, "r_tail: need at least one term");
  RTail out;
  out.exact = r_tail_exact(l);
  double term = 1.0;  // C_0 / 4^0
  for (int i = 0; i < l; ++i) term *= (2.0 * (2.0 * i + 1.0)) / ((i + 2.0) * 4.0);
  double sum = 0.0;
  for (int i = l; i < l + terms; ++i) {
    sum += term;
    term *= (2.0 * (2.0 * i + 1.0)) / ((i + 2.0) * 4.0);
  }
  out.partial_sum = sum;
  const double first_neglected = static_cast<double>(l + terms);
  // sum_{i >= N} i^(-3/2) <= N^(-3/2) + 2 / sqrt(N)
  out.remainder_bound =
      (std::pow(first_neglected, -1.5) + 2.0 / std::sqrt(first_neglected)) / std::sqrt(M_PI);
  return out;
}

// r as it enters the product bound: r(0) is set to 0 there.
enum class RZeroConvention { Zero, RawSeries };

inline Rational r_for_product(int i, RZeroConvention conv) {
  if (i == 0 && conv == RZeroConvention::Zero) return 0;
  return r_tail_exact(i);
}

struct Lemma78Report {
  int l = 0, s = 0;
  BigInt sigma;
  Rational upper_bound;
  Rational lower_bound;
  bool lower_checked = false;
  bool upper_holds = false;
  bool lower_holds = true;
  bool holds() const { return upper_holds && lower_holds; }
};

// sigma(l,s) <= 2^-s C_{l+s} prod_{i<s} (1 + r(i)/2), and for l > s
// sigma(l,s) >= (C_l / 4)((5/4)^s - 1). Both sides exact rationals.
inline Lemma78Report verify_lemma78(int l, int s, RZeroConvention conv = RZeroConvention::Zero) {
  require(l >= 1 && s >= 1, "verify_lemma78: need l, s >= 1");
  Lemma78Report rep;
  rep.l = l;
  rep.s = s;
  rep.sigma = sigma_conv(l, s);
  Rational ub(catalan(l + s), BigInt(1) << s);
  for (int i = 0; i < s; ++i) ub *= Rational(1) + r_for_product(i, conv) / 2;
  rep.upper_bound = ub;
  rep.upper_holds = Rational(rep.sigma) <= ub;
  if (l > s) {
    rep.lower_checked = true;
    Rational five_fourths_pow = 1;
    for (int i = 0; i < s; ++i) five_fourths_pow *= Rational(5, 4);
    rep.lower_bound = Rational(catalan(l), 4) * (five_fourths_pow - 1);
    rep.lower_holds = Rational(rep.sigma) >= rep.lower_bound;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Even-cycle classes C(l): Euler tours (i_0, .., i_2l = i_0) of rooted plane
// trees with l edges. The multiplicity of a vertex is |{0 <= j <= 2l : i_j = v}|,
// so the root is counted at both ends of the tour.

inline constexpr int kCycleClassCap = 12;

struct CycleClassTable {
  int l = 0;
  std::vector<BigInt> b;  // b[t] for t = 0 .. l+1; b[0] unused
  BigInt class_count;

  BigInt at(int t) const {
    if (t < 1 || t > l + 1) return 0;
    return b[static_cast<std::size_t>(t)];
  }
  BigInt vertex_total() const {
    BigInt acc = 0;
    for (int t = 1; t <= l + 1; ++t) acc += at(t);
    return acc;
  }
  BigInt position_total() const {
    BigInt acc = 0;
    for (int t = 1; t <= l + 1; ++t) acc += at(t) * t;
    return acc;
  }
};

namespace detail {
struct TourWalker {
  int l;
  std::vector<int> visits;  // per vertex id
  std::vector<int> path;    // stack of vertex ids from the root
  std::vector<std::uint64_t> hist;
  std::uint64_t classes = 0;
  int next_id = 1;

  explicit TourWalker(int l_) : l(l_), visits(static_cast<std::size_t>(l_) + 1, 0),
                                hist(static_cast<std::size_t>(l_) + 2, 0) {}

  void run() {
    visits[0] = 1;
    path.assign(1, 0);
    step(0, 0);
  }

  void step(int ups, int downs) {
    if (ups == l && downs == l) {
      ++classes;
      for (int v = 0; v <= l; ++v) ++hist[static_cast<std::size_t>(visits[v])];
      return;
    }
    if (ups < l) {
      const int v = next_id++;
      visits[v] = 1;
      path.push_back(v);
      step(ups + 1, downs);
      path.pop_back();
      visits[v] = 0;
      --next_id;
    }
    if (downs < ups) {
      const int child = path.back();
      path.pop_back();
      ++visits[path.back()];
      step(ups, downs + 1);
      --visits[path.back()];
      path.push_back(child);
    }
  }
};
}  // namespace detail

inline CycleClassTable enumerate_cycle_classes(int l, int cap = kCycleClassCap) {
  require(l >= 1, "enumerate_cycle_classes: l must be >= 1");
  if (l > cap)
    throw InvalidArgument("enumerate_cycle_classes: l = " + std::to_string(l) +
                          " exceeds the enumeration cap " + std::to_string(cap));
  detail::TourWalker walker(l);
  walker.run();
  CycleClassTable table;
  table.l = l;
  table.class_count = walker.classes;
  table.b.assign(static_cast<std::size_t>(l) + 2, 0);
  for (int t = 1; t <= l + 1; ++t) table.b[static_cast<std::size_t>(t)] = walker.hist[static_cast<std::size_t>(t)];
  return table;
}

// b tables for l = 1 .. lmax, index 0 left empty.
inline std::vector<CycleClassTable> cycle_class_tables(int lmax, int cap = kCycleClassCap) {
  std::vector<CycleClassTable> out(static_cast<std::size_t>(std::max(lmax, 0)) + 1);
  for (int l = 1; l <= lmax; ++l) out[static_cast<std::size_t>(l)] = enumerate_cycle_classes(l, cap);
  return out;
}

struct BSizesReport {
  int l = 0;
  bool holds = true;
  int first_violation_t = 0;
};

// (1/4l) C(2l+1-t, l) <= b_{l,t} <= (l+1)^120 C(2l+1-t, l), 1 <= t <= l+1.
inline BSizesReport verify_bsizes(const CycleClassTable& table) {
  BSizesReport rep;
  rep.l = table.l;
  const int l = table.l;
  for (int t = 1; t <= l + 1; ++t) {
    const BigInt proxy = binomial(2LL * l + 1 - t, l);
    const BigInt b = table.at(t);
    const bool lower_ok = proxy <= b * 4 * l;
    // The upper side in log space: log b <= 120 log(l+1) + log proxy.
    const double log_b = std::log(static_cast<double>(b));
    const double log_upper = 120.0 * std::log(l + 1.0) + std::log(static_cast<double>(proxy));
    const bool upper_ok = b == 0 ? true : log_b <= log_upper;
    if (!(lower_ok && upper_ok) && rep.holds) {
      rep.holds = false;
      rep.first_violation_t = t;
    }
  }
  return rep;
}

inline BSizesReport verify_bsizes(int l) { return verify_bsizes(enumerate_cycle_classes(l)); }

// ---------------------------------------------------------------------------
// Generating sums

namespace detail {
inline Rational rational_pow(const Rational& x, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}
}  // namespace detail

// s_1(theta, p) = sum_{s >= 1} sum_{s <= l <= p - s/2}
//                   C(2p-2l-1, s-1) theta^(2p-2l) positive_conv(l, s)
inline Rational s1_exact(const Rational& theta, int p) {
  require(p >= 1, "s1: p must be >= 1");
  require(theta >= 0, "s1: theta must be >= 0");
  const auto pc = composition_table(p, p, 1);
  Rational total = 0;
  for (int s = 1; s <= p; ++s)
    for (int l = s; 2 * l <= 2 * p - s; ++l) {
      const BigInt& inner = pc[static_cast<std::size_t>(s)][static_cast<std::size_t>(l)];
      total += Rational(binomial(2LL * p - 2 * l - 1, s - 1) * inner) *
               detail::rational_pow(theta, 2 * p - 2 * l);
    }
  return total;
}

// Log-space s_1 for p up to ~1000. The positive-composition table is kept
// scaled by 4^-l in long double, which neither overflows nor underflows there.
class S1LogTable {
 public:
  explicit S1LogTable(int pmax) : pmax_(pmax) {
    require(pmax >= 1 && pmax <= 4000, "S1LogTable: pmax must lie in [1, 4000]");
    std::vector<long double> cat(static_cast<std::size_t>(pmax) + 1);
    cat[0] = 1.0L;
    for (int i = 0; i < pmax; ++i) cat[i + 1] = cat[i] * (2.0L * (2.0L * i + 1.0L)) / ((i + 2.0L) * 4.0L);
    scaled_.assign(static_cast<std::size_t>(pmax) + 1, {});
    std::vector<long double> prev(static_cast<std::size_t>(pmax) + 1, 0.0L);
    prev[0] = 1.0L;
    for (int s = 1; s <= pmax; ++s) {
      std::vector<long double> cur(static_cast<std::size_t>(pmax) + 1, 0.0L);
      for (int l = s; l <= pmax; ++l) {
        long double acc = 0.0L;
        for (int part = 1; part <= l - s + 1; ++part) acc += cat[part] * prev[l - part];
        cur[l] = acc;
      }
      scaled_[s] = cur;
      prev = std::move(cur);
    }
  }

  int pmax() const { return pmax_; }

  // log positive_conv(l, s); -inf when l < s.
  double log_positive_conv(int l, int s) const {
    if (l < s || s < 1) return -INFINITY;
    return static_cast<double>(std::log(scaled_[s][l]) + l * std::log(4.0L));
  }

  double log_s1(double theta, int p) const {
    require(p >= 1 && p <= pmax_, "log_s1: p outside the table");
    require(theta > 0.0, "log_s1: theta must be > 0");
    if (p == 1) return -INFINITY;
    const long double log_theta = std::log(static_cast<long double>(theta));
    std::vector<long double> terms;
    long double best = -INFINITY;
    for (int s = 1; s <= p; ++s)
      for (int l = s; 2 * l <= 2 * p - s; ++l) {
        const long double top = 2.0L * p - 2.0L * l - 1.0L;
        const long double log_binom =
            std::lgamma(top + 1.0L) - std::lgamma(static_cast<long double>(s)) - std::lgamma(top - s + 2.0L);
        const long double t = log_binom + (2.0L * p - 2.0L * l) * log_theta +
                              std::log(scaled_[s][l]) + l * std::log(4.0L);
        terms.push_back(t);
        best = std::max(best, t);
      }
    long double acc = 0.0L;
    for (long double t : terms) acc += std::exp(t - best);
    return static_cast<double>(best + std::log(acc));
  }

 private:
  int pmax_;
  std::vector<std::vector<long double>> scaled_;
};

inline double s1_log(double theta, int p) { return S1LogTable(p).log_s1(theta, p); }

struct SumValue {
  Rational exact;      // valid when !estimate
  double log_value = 0.0;
  bool estimate = false;
};

// s_2(theta, p) = sum_{1<=l<=p-1, 1<=t<=l+1, 0<=q<=t-1}
//                   theta^(2p-2l) C(t, q+1) C(2p-2l-1, q) b_{l,t}
inline Rational s2_exact(const Rational& theta, int p, const std::vector<CycleClassTable>& tables) {
  require(p >= 1, "s2: p must be >= 1");
  require(static_cast<int>(tables.size()) >= p, "s2: b tables must reach l = p - 1");
  Rational total = 0;
  for (int l = 1; l <= p - 1; ++l) {
    const Rational theta_pow = detail::rational_pow(theta, 2 * p - 2 * l);
    BigInt inner = 0;
    for (int t = 1; t <= l + 1; ++t)
      for (int q = 0; q <= t - 1; ++q)
        inner += binomial(t, q + 1) * binomial(2LL * p - 2 * l - 1, q) * tables[static_cast<std::size_t>(l)].at(t);
    total += theta_pow * Rational(inner);
  }
  return total;
}

// s(p, M) = M^(2p) + sum_{1<=l<=p-1} M^(2l)
//             sum_{1<=t<=p-l+1, 0<=l0<=min(t/2, l)} C(l-l0+t-1, l-l0) C(t, 2 l0) b_{p-l,t}
inline Rational s_of_M_exact(int p, const Rational& M, const std::vector<CycleClassTable>& tables) {
  require(p >= 1, "s_of_M: p must be >= 1");
  require(M >= 0, "s_of_M: M must be >= 0");
  require(static_cast<int>(tables.size()) >= p, "s_of_M: b tables must reach l = p - 1");
  Rational total = detail::rational_pow(M, 2 * p);
  for (int l = 1; l <= p - 1; ++l) {
    BigInt inner = 0;
    const auto& table = tables[static_cast<std::size_t>(p - l)];
    for (int t = 1; t <= p - l + 1; ++t)
      for (int l0 = 0; 2 * l0 <= t && l0 <= l; ++l0)
        inner += binomial(l - l0 + t - 1, l - l0) * binomial(t, 2 * l0) * table.at(t);
    total += detail::rational_pow(M, 2 * l) * Rational(inner);
  }
  return total;
}

// Beyond the cap, b_{l,t} is replaced by its binomial proxy C(2l+1-t, l) and the
// result is flagged as an estimate (log value only).
inline SumValue s2(double theta, int p, int cap = kCycleClassCap) {
  require(p >= 1, "s2: p must be >= 1");
  require(theta >= 0.0, "s2: theta must be >= 0");
  SumValue out;
  if (p - 1 <= cap) {
    out.exact = s2_exact(Rational(theta), p, cycle_class_tables(p - 1, cap));
    out.log_value = out.exact > 0 ? std::log(static_cast<double>(out.exact)) : -INFINITY;
    return out;
  }
  out.estimate = true;
  if (theta == 0.0) {
    out.log_value = -INFINITY;
    return out;
  }
  std::vector<double> terms;
  for (int l = 1; l <= p - 1; ++l)
    for (int t = 1; t <= l + 1; ++t)
      for (int q = 0; q <= t - 1; ++q) {
        auto lbin = [](double n, double k) {
          return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        };
        terms.push_back((2.0 * p - 2.0 * l) * std::log(theta) + lbin(t, q + 1) +
                        lbin(2.0 * p - 2.0 * l - 1.0, q) + lbin(2.0 * l + 1.0 - t, l));
      }
  const double best = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - best);
  out.log_value = best + std::log(acc);
  return out;
}

inline SumValue s_of_M(int p, double M, int cap = kCycleClassCap) {
  require(p - 1 <= cap, "s_of_M: p - 1 exceeds the enumeration cap");
  SumValue out;
  out.exact = s_of_M_exact(p, Rational(M), cycle_class_tables(p - 1, cap));
  out.log_value = out.exact > 0 ? std::log(static_cast<double>(out.exact)) : -INFINITY;
  return out;
}

}  // namespace spikelab
