#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "abelian/errors.hpp"
#include "abelian/ground_truth.hpp"
#include "abelian/isomorphism.hpp"
#include "abelian/oracle.hpp"
#include "abelian/randomized_generators.hpp"

namespace abelian {

struct TrialRecord {
  std::string group;
  std::uint64_t label_seed = 0;
  std::uint64_t rng_seed = 0;
  std::string mode;
  std::string model;
  double delta = 0.0;
  std::string outcome;  // ok, fail or mismatch
  std::uint64_t products = 0;
  std::uint64_t elements = 0;
  double wall_ms = 0.0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

inline constexpr const char* kTrialCsvHeader =
    "group,label_seed,rng_seed,mode,model,delta,outcome,products,elements,wall_ms";

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
T parse_number(const std::string& s, const char* what) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw InvalidSpecError(std::string("bad ") + what + " field '" + s + "'");
  return v;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << kTrialCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.group << ',' << r.label_seed << ',' << r.rng_seed << ',' << r.mode << ',' << r.model << ','
       << detail::format_double(r.delta) << ',' << r.outcome << ',' << r.products << ',' << r.elements << ','
       << detail::format_double(r.wall_ms) << '\n';
  }
}

inline std::vector<TrialRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTrialCsvHeader) throw InvalidSpecError("missing or unexpected CSV header");
  std::vector<TrialRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 10) throw InvalidSpecError("CSV row has " + std::to_string(f.size()) + " fields");
    TrialRecord r;
    r.group = f[0];
    r.label_seed = detail::parse_number<std::uint64_t>(f[1], "label_seed");
    r.rng_seed = detail::parse_number<std::uint64_t>(f[2], "rng_seed");
    r.mode = f[3];
    r.model = f[4];
    r.delta = detail::parse_number<double>(f[5], "delta");
    r.outcome = f[6];
    r.products = detail::parse_number<std::uint64_t>(f[7], "products");
    r.elements = detail::parse_number<std::uint64_t>(f[8], "elements");
    r.wall_ms = detail::parse_number<double>(f[9], "wall_ms");
    out.push_back(std::move(r));
  }
  return out;
}

/// Runs fn(0..count-1) on up to `workers` threads; fn must be safe to call concurrently.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
    });
  for (auto& t : pool) t.join();
}

struct TrialSetup {
  std::vector<std::uint64_t> factors;
  std::uint64_t label_seed = 0;
  std::uint64_t rng_seed = 0;
  Mode mode = Mode::Det;
  Model model = Model::FS;
  double delta = 0.01;
};

/// One find_basis run compared with the CRT ground truth.
inline TrialRecord run_trial(const TrialSetup& s) {
  TrialRecord r;
  r.group = format_group_spec(s.factors);
  r.label_seed = s.label_seed;
  r.rng_seed = s.rng_seed;
  r.mode = std::string(to_string(s.mode));
  r.model = std::string(to_string(s.model));
  r.delta = s.delta;
  GroupOracle oracle(make_group(s.factors, s.label_seed), s.model);
  Rng rng(s.rng_seed);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const BasisResult b = find_basis(oracle, rng, s.mode, s.delta);
    r.outcome = b.orders == canonical_invariant_factors(s.factors) ? "ok" : "mismatch";
  } catch (const RandomizedFailure&) {
    r.outcome = "fail";
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  r.products = oracle.counters().products;
  r.elements = oracle.counters().elements;
  return r;
}

/// One record per (group, label seed, rng seed), in grid order.
inline std::vector<TrialRecord> run_sweep(const std::vector<std::vector<std::uint64_t>>& grid,
                                          const std::vector<std::uint64_t>& label_seeds,
                                          const std::vector<std::uint64_t>& rng_seeds, Mode mode, Model model,
                                          double delta, unsigned workers = 0) {
  std::vector<TrialSetup> setups;
  for (const auto& g : grid)
    for (auto ls : label_seeds)
      for (auto rs : rng_seeds) setups.push_back({g, ls, rs, mode, model, delta});
  std::vector<TrialRecord> out(setups.size());
  parallel_for(setups.size(), workers, [&](std::size_t i) { out[i] = run_trial(setups[i]); });
  return out;
}

inline bool sweep_clean(const std::vector<TrialRecord>& records) {
  return std::all_of(records.begin(), records.end(), [](const TrialRecord& r) { return r.outcome == "ok"; });
}

// ---- scaling -----------------------------------------------------------------

enum class Family { Z2, Zp, Zp2 };

inline Family parse_family(std::string_view s) {
  if (s == "z2") return Family::Z2;
  if (s == "zp") return Family::Zp;
  if (s == "zp2") return Family::Zp2;
  throw InvalidSpecError("unknown family '" + std::string(s) + "' (expected z2, zp or zp2)");
}

/// Z_2^m, Z_p^m or Z_{p^2}^m.
inline std::vector<std::uint64_t> family_factors(Family f, std::uint64_t p, unsigned m) {
  const std::uint64_t base = f == Family::Z2 ? 2 : f == Family::Zp ? p : checked_mul(p, p);
  return std::vector<std::uint64_t>(m, base);
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t h = xs.size() / 2;
  return xs.size() % 2 ? xs[h] : (xs[h - 1] + xs[h]) / 2.0;
}

/// Least-squares slope of y against x; nullopt with fewer than two distinct x.
inline std::optional<double> fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t k = x.size();
  if (k < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) return std::nullopt;
  return sxy / sxx;
}

struct ScalingPoint {
  unsigned m = 0;
  std::uint64_t n = 0;
  double median_accesses = 0;
  double median_products = 0;
  double median_elements = 0;
  std::uint64_t failures = 0;
  /// median_accesses / (sqrt(n) * log2(n)^3)
  double ratio = 0;
};

struct ScalingReport {
  Family family = Family::Z2;
  Mode mode = Mode::Rand;
  Model model = Model::FS;
  std::vector<ScalingPoint> points;
  std::optional<double> slope;  // of log(median accesses) against log(n)
  std::vector<TrialRecord> trials;
};

inline ScalingReport bench_scaling(Family family, std::uint64_t p, unsigned m_min, unsigned m_max, unsigned trials,
                                   Mode mode, Model model, double delta, std::uint64_t seed = 1,
                                   unsigned workers = 0) {
  if (m_min > m_max) throw InvalidSpecError("empty m range");
  if (trials == 0) throw InvalidSpecError("bench needs at least one trial");
  ScalingReport rep;
  rep.family = family;
  rep.mode = mode;
  rep.model = model;
  std::vector<double> lx, ly;
  for (unsigned m = m_min; m <= m_max; ++m) {
    const auto factors = family_factors(family, p, m);
    std::vector<TrialSetup> setups;
    for (unsigned t = 0; t < trials; ++t) setups.push_back({factors, seed + t, seed * 7919 + t, mode, model, delta});
    std::vector<TrialRecord> recs(setups.size());
    parallel_for(setups.size(), workers, [&](std::size_t i) { recs[i] = run_trial(setups[i]); });

    ScalingPoint pt;
    pt.m = m;
    pt.n = checked_product(factors);
    std::vector<double> acc, prod, elem;
    for (const auto& r : recs) {
      if (r.outcome != "ok") ++pt.failures;
      acc.push_back(static_cast<double>(r.products + r.elements));
      prod.push_back(static_cast<double>(r.products));
      elem.push_back(static_cast<double>(r.elements));
    }
    pt.median_accesses = median(acc);
    pt.median_products = median(prod);
    pt.median_elements = median(elem);
    const double nn = static_cast<double>(pt.n);
    const double lg = std::max(1.0, std::log2(nn));
    pt.ratio = pt.median_accesses / (std::sqrt(nn) * lg * lg * lg);
    lx.push_back(std::log(nn));
    ly.push_back(std::log(pt.median_accesses));
    rep.points.push_back(pt);
    rep.trials.insert(rep.trials.end(), recs.begin(), recs.end());
  }
  rep.slope = fit_slope(lx, ly);
  return rep;
}

// ---- size estimator calibration ---------------------------------------------------

struct EstimateTrial {
  std::uint64_t q = 0;
  std::uint64_t samples_used = 0;
  bool covered = false;
};

struct EstimateReport {
  std::uint64_t n = 0;
  std::vector<EstimateTrial> trials;
  double coverage = 0;  // fraction with n <= q <= 70 n log2 n
  double q_median = 0, q_min = 0, q_max = 0;
  double samples_median = 0;
};

/// Upper end of the calibrated window; log2 n is taken as at least 1 so n = 1 is covered by q = 1.
inline double estimate_upper_bound(std::uint64_t n) {
  const double nn = static_cast<double>(n);
  return 70.0 * nn * std::max(1.0, std::log2(nn));
}

inline EstimateReport estimate_size_report(const std::vector<std::uint64_t>& factors, unsigned trials,
                                           std::uint64_t seed = 1) {
  EstimateReport rep;
  rep.n = checked_product(factors);
  const auto spec = std::make_shared<const GroupSpec>(make_group(factors, seed));
  std::vector<double> qs, ss;
  std::uint64_t covered = 0;
  for (unsigned t = 0; t < trials; ++t) {
    GroupOracle oracle(spec, Model::PS);
    Rng rng(seed * 1'000'003 + t);
    const SizeEstimate est = estimate_size(oracle, rng);
    EstimateTrial tr{est.q, est.samples_used, false};
    tr.covered = est.q >= rep.n && static_cast<double>(est.q) <= estimate_upper_bound(rep.n);
    covered += tr.covered;
    qs.push_back(static_cast<double>(est.q));
    ss.push_back(static_cast<double>(est.samples_used));
    rep.trials.push_back(tr);
  }
  if (trials) {
    rep.coverage = static_cast<double>(covered) / trials;
    rep.q_median = median(qs);
    rep.q_min = *std::min_element(qs.begin(), qs.end());
    rep.q_max = *std::max_element(qs.begin(), qs.end());
    rep.samples_median = median(ss);
  }
  return rep;
}

}  // namespace abelian
