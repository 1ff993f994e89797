// abelian: command-line driver for the group algorithms, sweeps and benchmarks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "abelian/abelian.hpp"

using namespace abelian;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kMismatch = 1, kUsage = 2, kRandomizedFailure = 3 };

struct Globals {
  std::uint64_t seed = 1;
  double delta = 0.01;
  std::string model = "fs";
  std::string out;
  std::string format = "json";
  unsigned retries = 3;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw std::runtime_error("cannot open output file " + g.out);
  f << text;
}

void emit_json(const Globals& g, const json& j) {
  if (g.format != "json") throw UsageError("this subcommand only writes JSON");
  emit(g, j.dump(2) + "\n");
}

json counters_json(const Counters& c) { return {{"products", c.products}, {"elements", c.elements}}; }

json labels_json(const std::vector<Element>& xs) {
  json a = json::array();
  for (auto x : xs) a.push_back(x.label);
  return a;
}

json matrix_json(const IntegerMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
    rows.push_back(row);
  }
  return rows;
}

/// Runs `attempt` with fresh random streams until it stops raising RandomizedFailure.
template <class F>
auto with_retries(const Globals& g, F&& attempt) {
  for (unsigned i = 0;; ++i) {
    try {
      return attempt(g.seed + i * 0x9e3779b97f4a7c15ull);
    } catch (const RandomizedFailure& e) {
      if (i + 1 >= g.retries) throw;
      std::cerr << "randomized failure (" << e.what() << "), retrying\n";
    }
  }
}

// ---- subcommands -------------------------------------------------------------

struct GenArgs {
  std::string group;
  bool det = false, rand = false;
};

void cmd_gen(const Globals& g, const GenArgs& a) {
  if (a.det == a.rand) throw UsageError("gen needs exactly one of --det or --rand");
  const auto factors = parse_group_spec(a.group);
  const Model model = parse_model(g.model);
  json j;
  j["group"] = format_group_spec(factors);
  j["mode"] = a.det ? "det" : "rand";
  j["model"] = g.model;
  with_retries(g, [&](std::uint64_t rng_seed) {
    GroupOracle o(make_group(factors, g.seed), model);
    GeneratorChain chain;
    if (a.det) {
      if (model != Model::FS) throw UsageError("--det needs --model fs");
      chain = generator_plus(o).first;
    } else {
      Rng rng(rng_seed);
      RandomGeneratorsRun<GroupOracle> run(o, rng, g.delta);
      chain = run.run();
      if (run.size_estimate()) j["q"] = *run.size_estimate();
    }
    j["A"] = labels_json(chain.generators);
    j["K"] = chain.orders;
    j["L"] = chain.relations;
    j["identity"] = chain.identity.label;
    j["counters"] = counters_json(o.counters());
    return 0;
  });
  emit_json(g, j);
}

struct BasisArgs {
  std::string group;
  std::string mode = "rand";
};

void cmd_basis(const Globals& g, const BasisArgs& a) {
  const auto factors = parse_group_spec(a.group);
  const Model model = parse_model(g.model);
  const Mode mode = parse_mode(a.mode);
  json j = with_retries(g, [&](std::uint64_t rng_seed) {
    GroupOracle o(make_group(factors, g.seed), model);
    Rng rng(rng_seed);
    const BasisResult b = find_basis(o, rng, mode, g.delta);
    json r;
    r["group"] = format_group_spec(factors);
    r["orders"] = b.orders;
    r["basis"] = labels_json(b.basis);
    json mons = json::array();
    for (const auto& m : b.monomials) mons.push_back(format_monomial(m));
    r["basis_monomials"] = mons;
    r["presentation"] = format_presentation(b.presentation);
    if (b.size_estimate) r["q"] = *b.size_estimate;
    r["counters"] = counters_json(o.counters());
    return r;
  });
  emit_json(g, j);
}

struct IsoArgs {
  std::string g, h;
  std::uint64_t seed_g = 1, seed_h = 2;
  std::string mode = "rand";
  std::uint64_t verify = 0;
};

void cmd_iso(const Globals& g, const IsoArgs& a) {
  const auto fg = parse_group_spec(a.g), fh = parse_group_spec(a.h);
  const Model model = parse_model(g.model);
  const Mode mode = parse_mode(a.mode);
  json j = with_retries(g, [&](std::uint64_t rng_seed) {
    GroupOracle og(make_group(fg, a.seed_g), model), oh(make_group(fh, a.seed_h), model);
    Rng rng(rng_seed);
    const auto res = is_isomorphic(og, oh, rng, mode, g.delta);
    json r;
    r["isomorphic"] = res.isomorphic;
    r["invariant_factors_g"] = res.invariant_factors_g;
    r["invariant_factors_h"] = res.invariant_factors_h;
    r["halted_early"] = res.halted_early;
    if (res.witness && a.verify > 0) r["witness_verified"] = verify_witness(*res.witness, og, oh, a.verify, rng);
    r["counters_g"] = counters_json(og.counters());
    r["counters_h"] = counters_json(oh.counters());
    return r;
  });
  emit_json(g, j);
}

void cmd_snf(const Globals& g, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read presentation file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const Presentation p = parse_presentation(ss.str());
  json j;
  j["presentation"] = format_presentation(p);
  if (p.rank() == 0) {
    j["D"] = j["U"] = j["V"] = json::array();
    j["invariant_factors"] = json::array();
  } else {
    const IntegerMatrix R = build_relation_matrix(p);
    const SnfResult s = smith_normal_form(R);
    j["R"] = matrix_json(R);
    j["D"] = matrix_json(s.D);
    j["U"] = matrix_json(s.U);
    j["V"] = matrix_json(s.V);
    j["invariant_factors"] = invariant_factors(s);
    json basis = json::array();
    for (const auto& y : basis_from_snf(p, s)) basis.push_back(format_monomial(y));
    j["basis"] = basis;
  }
  emit_json(g, j);
}

struct EstimateArgs {
  std::string group;
  unsigned trials = 200;
};

int cmd_estimate(const Globals& g, const EstimateArgs& a) {
  const auto rep = estimate_size_report(parse_group_spec(a.group), a.trials, g.seed);
  if (g.format == "csv") {
    std::ostringstream os;
    os << "trial,q,samples_used,covered\n";
    for (std::size_t i = 0; i < rep.trials.size(); ++i)
      os << i << ',' << rep.trials[i].q << ',' << rep.trials[i].samples_used << ',' << rep.trials[i].covered << '\n';
    emit(g, os.str());
  } else {
    json j;
    j["n"] = rep.n;
    j["trials"] = rep.trials.size();
    j["coverage"] = rep.coverage;
    j["q"] = {{"min", rep.q_min}, {"median", rep.q_median}, {"max", rep.q_max}};
    j["samples_median"] = rep.samples_median;
    json per = json::array();
    for (const auto& t : rep.trials) per.push_back({{"q", t.q}, {"samples_used", t.samples_used}});
    j["per_trial"] = per;
    emit_json(g, j);
  }
  return kOk;
}

struct BenchArgs {
  std::string family = "z2";
  std::uint64_t p = 2;
  unsigned m_min = 10, m_max = 16, trials = 5;
  std::string mode = "rand";
  unsigned workers = 0;
};

int cmd_bench(const Globals& g, const BenchArgs& a) {
  const auto rep = bench_scaling(parse_family(a.family), a.p, a.m_min, a.m_max, a.trials, parse_mode(a.mode),
                                 parse_model(g.model), g.delta, g.seed, a.workers);
  if (g.format == "csv") {
    std::ostringstream os;
    write_csv(os, rep.trials);
    emit(g, os.str());
  } else {
    json pts = json::array();
    for (const auto& pt : rep.points)
      pts.push_back({{"m", pt.m},
                     {"n", pt.n},
                     {"median_accesses", pt.median_accesses},
                     {"median_products", pt.median_products},
                     {"median_elements", pt.median_elements},
                     {"failures", pt.failures},
                     {"ratio", pt.ratio}});
    json j;
    j["family"] = a.family;
    j["mode"] = a.mode;
    j["model"] = g.model;
    j["points"] = pts;
    j["slope"] = rep.slope ? json(*rep.slope) : json(nullptr);
    emit_json(g, j);
  }
  for (const auto& pt : rep.points)
    if (pt.failures) return kRandomizedFailure;
  return kOk;
}

struct AdversaryArgs {
  std::uint64_t p = 2;
  unsigned m = 6;
  std::uint64_t cap = 50'000'000;
};

int cmd_adversary(const Globals& g, const AdversaryArgs& a) {
  const auto rep = adversary_demo(
      a.p, a.m, [](AdversaryOracle& o) { return invariant_factors(to_presentation(generator_plus(o).first)); }, a.cap);
  json runs = json::array();
  for (const auto& r : rep.runs) {
    json jr;
    jr["policy"] = to_string(r.policy);
    jr["inconclusive"] = r.inconclusive;
    jr["answer"] = r.answer;
    jr["committed"] = r.committed ? json(to_string(*r.committed)) : json(nullptr);
    jr["served_at_commit"] = r.served_at_commit ? json(*r.served_at_commit) : json(nullptr);
    jr["counters_at_commit"] = r.counters_at_commit ? counters_json(*r.counters_at_commit) : json(nullptr);
    jr["counters"] = counters_json(r.counters);
    jr["correct"] = r.correct;
    jr["replay_d1"] = r.replay_d1;
    jr["replay_d2"] = r.replay_d2;
    runs.push_back(jr);
  }
  json j;
  j["p"] = rep.p;
  j["m"] = rep.m;
  j["threshold"] = rep.threshold;
  j["runs"] = runs;
  j["correct_for_both"] = rep.correct_for_both();
  j["forced_past_threshold"] = rep.forced_past_threshold();
  j["consistent"] = rep.consistent();
  emit_json(g, j);
  return rep.forced_past_threshold() && rep.consistent() ? kOk : kMismatch;
}

struct SweepArgs {
  std::uint64_t max_order = 100;
  std::vector<std::string> groups;
  unsigned labelings = 5, rng_seeds = 1, workers = 0;
  std::string mode = "det";
};

int cmd_sweep(const Globals& g, const SweepArgs& a) {
  std::vector<std::vector<std::uint64_t>> grid;
  if (a.groups.empty())
    grid = enumerate_abelian_groups(a.max_order);
  else
    for (const auto& s : a.groups) grid.push_back(parse_group_spec(s));
  std::vector<std::uint64_t> ls, rs;
  for (unsigned i = 0; i < a.labelings; ++i) ls.push_back(g.seed + i);
  for (unsigned i = 0; i < a.rng_seeds; ++i) rs.push_back(g.seed * 1'000'003 + i);
  const auto recs = run_sweep(grid, ls, rs, parse_mode(a.mode), parse_model(g.model), g.delta, a.workers);
  if (g.format == "csv") {
    std::ostringstream os;
    write_csv(os, recs);
    emit(g, os.str());
  } else {
    json rows = json::array();
    for (const auto& r : recs)
      rows.push_back({{"group", r.group},
                      {"label_seed", r.label_seed},
                      {"rng_seed", r.rng_seed},
                      {"mode", r.mode},
                      {"model", r.model},
                      {"delta", r.delta},
                      {"outcome", r.outcome},
                      {"products", r.products},
                      {"elements", r.elements},
                      {"wall_ms", r.wall_ms}});
    emit_json(g, rows);
  }
  bool mismatch = false, failure = false;
  for (const auto& r : recs) {
    mismatch |= r.outcome == "mismatch";
    failure |= r.outcome == "fail";
  }
  return mismatch ? kMismatch : failure ? kRandomizedFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite Abelian groups behind a counted Cayley-table oracle"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "labeling / random seed");
  app.add_option("--delta", g.delta, "failure probability for randomized runs")->check(CLI::Range(1e-300, 0.999999));
  app.add_option("--model", g.model, "oracle model")->check(CLI::IsMember({"fs", "ps"}));
  app.add_option("--out", g.out, "write output to this file instead of stdout");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--retries", g.retries, "attempts before a randomized failure is fatal")->check(CLI::PositiveNumber);

  int rc = kOk;
  std::function<int()> action;

  GenArgs gen;
  auto* sc = app.add_subcommand("gen", "build a generator chain with relations");
  sc->add_option("--group", gen.group, "group spec such as 4x3x3")->required();
  sc->add_flag("--det", gen.det, "deterministic coset enumeration");
  sc->add_flag("--rand", gen.rand, "randomized sublinear construction");
  sc->callback([&] { action = [&] { return cmd_gen(g, gen), int(kOk); }; });

  BasisArgs basis;
  sc = app.add_subcommand("basis", "find a basis and its invariant factors");
  sc->add_option("--group", basis.group)->required();
  sc->add_option("--mode", basis.mode)->check(CLI::IsMember({"det", "rand"}));
  sc->callback([&] { action = [&] { return cmd_basis(g, basis), int(kOk); }; });

  IsoArgs iso;
  sc = app.add_subcommand("iso", "decide isomorphism of two groups");
  sc->set_help_flag("--help", "print help; -h is taken by the second group");
  sc->add_option("--g", iso.g)->required();
  sc->add_option("--h", iso.h)->required();
  sc->add_option("--seed-g", iso.seed_g);
  sc->add_option("--seed-h", iso.seed_h);
  sc->add_option("--mode", iso.mode)->check(CLI::IsMember({"det", "rand"}));
  sc->add_option("--verify", iso.verify, "check the witness on this many random pairs");
  sc->callback([&] { action = [&] { return cmd_iso(g, iso), int(kOk); }; });

  std::string pres_path;
  sc = app.add_subcommand("snf", "Smith normal form of a presentation's relation matrix");
  sc->add_option("--presentation", pres_path, "file holding e.g. 'K=4,3,3; L[2,1]=3 L[3,1]=2 L[3,2]=1'")->required();
  sc->callback([&] { action = [&] { return cmd_snf(g, pres_path), int(kOk); }; });

  EstimateArgs est;
  sc = app.add_subcommand("estimate-size", "calibrate the birthday size estimator (PS model)");
  sc->add_option("--group", est.group)->required();
  sc->add_option("--trials", est.trials);
  sc->callback([&] { action = [&] { return cmd_estimate(g, est); }; });

  BenchArgs bench;
  sc = app.add_subcommand("bench", "access-count scaling over Z_2^m, Z_p^m or Z_{p^2}^m");
  sc->add_option("--family", bench.family)->check(CLI::IsMember({"z2", "zp", "zp2"}));
  sc->add_option("--p", bench.p);
  sc->add_option("--m-min", bench.m_min);
  sc->add_option("--m-max", bench.m_max);
  sc->add_option("--trials", bench.trials);
  sc->add_option("--mode", bench.mode)->check(CLI::IsMember({"det", "rand"}));
  sc->add_option("--workers", bench.workers, "0 = one per core");
  sc->callback([&] { action = [&] { return cmd_bench(g, bench); }; });

  AdversaryArgs adv;
  sc = app.add_subcommand("adversary", "run the deterministic pipeline against the lazy adversary");
  sc->add_option("--p", adv.p);
  sc->add_option("--m", adv.m);
  sc->add_option("--cap", adv.cap, "access cap before the run is inconclusive");
  sc->callback([&] { action = [&] { return cmd_adversary(g, adv); }; });

  SweepArgs sweep;
  sc = app.add_subcommand("sweep", "correctness sweep against the CRT ground truth");
  sc->add_option("--max-order", sweep.max_order, "all groups up to this order");
  sc->add_option("--groups", sweep.groups, "explicit group specs instead of --max-order")->delimiter(',');
  sc->add_option("--labelings", sweep.labelings);
  sc->add_option("--rng-seeds", sweep.rng_seeds);
  sc->add_option("--mode", sweep.mode)->check(CLI::IsMember({"det", "rand"}));
  sc->add_option("--workers", sweep.workers, "0 = one per core");
  sc->callback([&] { action = [&] { return cmd_sweep(g, sweep); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    rc = action();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidSpecError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const ModelViolationError& e) {
    std::cerr << "model violation: " << e.what() << "\n";
    return kUsage;
  } catch (const RandomizedFailure& e) {
    std::cerr << "randomized failure budget exceeded: " << e.what() << "\n";
    return kRandomizedFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMismatch;
  }
  return rc;
}
