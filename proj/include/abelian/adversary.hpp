#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "abelian/errors.hpp"
#include "abelian/ground_truth.hpp"
#include "abelian/number_theory.hpp"
#include "abelian/oracle.hpp"

namespace abelian {

/// The two groups the adversary keeps open: D1 = Z_p^{m-2} x Z_p x Z_p, D2 = Z_p^{m-2} x Z_{p^2}.
enum class Commitment { D1, D2 };

inline std::string_view to_string(Commitment c) { return c == Commitment::D1 ? "D1" : "D2"; }

inline std::vector<std::uint64_t> adversary_factors(std::uint64_t p, unsigned m, Commitment c) {
  std::vector<std::uint64_t> f(m - 2, p);
  if (c == Commitment::D1) {
    f.push_back(p);
    f.push_back(p);
  } else {
    f.push_back(checked_mul(p, p));
  }
  return f;
}

/// Raised when a strategy keeps querying past the adversary's hard access cap.
class AdversaryCapExceeded : public AbelianError {
 public:
  using AbelianError::AbelianError;
};

/// FS oracle of order p^m that binds labels lazily. Codes are packed tuple indices; the codes
/// below p^{m-2} form W = Z_p^{m-2} x {(0,0)}, which embeds identically in D1 and D2 and is
/// closed under the group law. Every label that shows up gets the smallest free code of W
/// until W is used up; only then does the adversary commit to one group.
class AdversaryOracle {
 public:
  enum class Access { Identity, Product, Random };
  struct TranscriptEntry {
    Access kind;
    Element a, b;  // operands (Product only)
    Element result;
  };

  AdversaryOracle(std::uint64_t p, unsigned m, Commitment policy, std::uint64_t access_cap = 50'000'000)
      : p_(p), m_(m), policy_(policy), cap_(access_cap) {
    if (p < 2 || m < 2) throw InvalidSpecError("adversary needs p >= 2 and m >= 2");
    if (factorize(p).size() != 1 || factorize(p)[0].second != 1) throw InvalidSpecError("adversary needs a prime p");
    n_ = ipow(p, m);
    if (n_ >= kMaxGroupOrder) throw InvalidSpecError("adversary group too large");
    w_ = ipow(p, m - 2);
    d1_.emplace(GroupSpec::with_labeling(adversary_factors(p, m, Commitment::D1), iota(n_)));
    d2_.emplace(GroupSpec::with_labeling(adversary_factors(p, m, Commitment::D2), iota(n_)));
    label_code_.assign(n_, kUnbound);
    code_label_.assign(n_, kUnbound);
    bind_order_.assign(n_, kUnbound);
  }

  Element op(Element a, Element b) {
    charge();
    ++counters_.products;
    const std::uint64_t ca = code_of(a), cb = code_of(b);
    const std::uint64_t cc = law().add_indices(ca, cb);
    const Element c = label_for(cc);
    record({Access::Product, a, b, c});
    return c;
  }

  Element random_element(Rng& rng) {
    charge();
    ++counters_.elements;
    std::uniform_int_distribution<std::uint64_t> pick(0, (committed_ ? n_ : w_) - 1);
    const Element c = label_for(pick(rng));
    record({Access::Random, {}, {}, c});
    return c;
  }

  Element identity() {
    charge();
    ++counters_.elements;
    const Element c = label_for(0);
    record({Access::Identity, {}, {}, c});
    return c;
  }

  std::uint64_t size() const { return n_; }
  Model model() const { return Model::FS; }
  const Counters& counters() const { return counters_; }

  std::uint64_t p() const { return p_; }
  unsigned m() const { return m_; }
  std::uint64_t threshold() const { return w_; }
  /// Distinct labels handed a code so far.
  std::uint64_t served() const { return served_; }
  std::optional<Commitment> committed() const { return committed_; }
  std::optional<std::uint64_t> served_at_commit() const { return served_at_commit_; }
  std::optional<Counters> counters_at_commit() const { return counters_at_commit_; }
  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }

  /// An honest labeled group for `c` that agrees with every binding made before the
  /// commitment (and, for the committed group, every binding made after it).
  GroupSpec honest_group(Commitment c) const {
    std::vector<std::uint32_t> l2c(n_, kUnbound);
    std::vector<bool> used(n_, false);
    const bool all = committed_ && *committed_ == c;
    for (std::uint64_t l = 0; l < n_; ++l) {
      if (label_code_[l] == kUnbound) continue;
      if (!all && bind_order_[l] >= pre_commit_bindings_) continue;
      l2c[l] = label_code_[l];
      used[label_code_[l]] = true;
    }
    std::uint64_t next = 0;
    for (std::uint64_t l = 0; l < n_; ++l) {
      if (l2c[l] != kUnbound) continue;
      while (used[next]) ++next;
      l2c[l] = static_cast<std::uint32_t>(next);
      used[next] = true;
    }
    return GroupSpec::with_labeling(adversary_factors(p_, m_, c), std::move(l2c));
  }

  /// Replays the pre-commitment transcript against an honest oracle for `c`.
  bool replay(Commitment c) const {
    GroupOracle honest(honest_group(c), Model::FS);
    for (const auto& t : transcript_) {
      switch (t.kind) {
        case Access::Identity:
          if (honest.identity() != t.result) return false;
          break;
        case Access::Product:
          if (honest.op(t.a, t.b) != t.result) return false;
          break;
        case Access::Random:
          if (!honest.spec().contains(t.result)) return false;
          break;
      }
    }
    return true;
  }

 private:
  static constexpr std::uint32_t kUnbound = 0xffffffffu;

  static std::vector<std::uint32_t> iota(std::uint64_t n) {
    std::vector<std::uint32_t> v(n);
    for (std::uint64_t i = 0; i < n; ++i) v[i] = static_cast<std::uint32_t>(i);
    return v;
  }

  // Before the commitment both groups agree on W, so either law will do.
  const GroupSpec& law() const { return committed_ == Commitment::D2 ? *d2_ : *d1_; }

  void charge() {
    if (counters_.total() >= cap_) throw AdversaryCapExceeded("adversary access cap reached");
  }

  void record(TranscriptEntry e) {
    if (!committed_) transcript_.push_back(e);
  }

  void bind(std::uint64_t label, std::uint64_t code) {
    label_code_[label] = static_cast<std::uint32_t>(code);
    code_label_[code] = static_cast<std::uint32_t>(label);
    bind_order_[label] = static_cast<std::uint32_t>(served_);
    ++served_;
    if (!committed_) pre_commit_bindings_ = served_;
  }

  void commit() {
    committed_ = policy_;
    served_at_commit_ = served_ + 1;
    counters_at_commit_ = counters_;
  }

  /// Code of a queried label, binding it on first sight.
  std::uint64_t code_of(Element a) {
    if (a.label >= n_) throw ContractError("label " + std::to_string(a.label) + " out of range");
    if (label_code_[a.label] != kUnbound) return label_code_[a.label];
    if (!committed_ && next_w_free() == w_) commit();
    bind(a.label, committed_ ? next_free_code() : next_w_free());
    return label_code_[a.label];
  }

  /// Label carrying `code`, binding the smallest free label on first use.
  Element label_for(std::uint64_t code) {
    if (code_label_[code] != kUnbound) return Element{code_label_[code]};
    if (!committed_ && code >= w_) throw InternalInconsistencyError("adversary left W before committing");
    while (label_code_[label_cursor_] != kUnbound) ++label_cursor_;
    bind(label_cursor_, code);
    return Element{code_label_[code]};
  }

  std::uint64_t next_w_free() {
    while (w_cursor_ < w_ && code_label_[w_cursor_] != kUnbound) ++w_cursor_;
    return w_cursor_;
  }

  std::uint64_t next_free_code() {
    while (code_label_[code_cursor_] != kUnbound) ++code_cursor_;
    return code_cursor_;
  }

  std::uint64_t p_;
  unsigned m_;
  Commitment policy_;
  std::uint64_t cap_;
  std::uint64_t n_ = 0;
  std::uint64_t w_ = 0;
  std::optional<GroupSpec> d1_, d2_;
  std::vector<std::uint32_t> label_code_, code_label_, bind_order_;
  std::uint64_t served_ = 0;
  std::uint64_t pre_commit_bindings_ = 0;
  std::uint64_t label_cursor_ = 0, w_cursor_ = 0, code_cursor_ = 0;
  std::optional<Commitment> committed_;
  std::optional<std::uint64_t> served_at_commit_;
  std::optional<Counters> counters_at_commit_;
  Counters counters_;
  std::vector<TranscriptEntry> transcript_;
};

/// A deterministic procedure that returns the invariant factors it believes the group has.
using AdversaryStrategy = std::function<std::vector<std::uint64_t>(AdversaryOracle&)>;

struct AdversaryRun {
  Commitment policy = Commitment::D1;
  bool inconclusive = false;
  std::vector<std::uint64_t> answer;
  std::optional<Commitment> committed;
  std::optional<std::uint64_t> served_at_commit;
  std::optional<Counters> counters_at_commit;
  Counters counters;
  bool correct = false;
  bool replay_d1 = false;
  bool replay_d2 = false;
};

struct AdversaryReport {
  std::uint64_t p = 0;
  unsigned m = 0;
  std::uint64_t threshold = 0;
  AdversaryRun runs[2];

  bool correct_for_both() const { return runs[0].correct && runs[1].correct; }
  bool consistent() const {
    for (const auto& r : runs)
      if (!r.inconclusive && !(r.replay_d1 && r.replay_d2)) return false;
    return true;
  }
  /// The lower-bound claim: a strategy right on both commitments must have pushed the
  /// adversary past p^{m-2} served elements.
  bool forced_past_threshold() const {
    if (!correct_for_both()) return false;
    for (const auto& r : runs)
      if (!r.served_at_commit || *r.served_at_commit <= threshold) return false;
    return true;
  }
};

inline AdversaryReport adversary_demo(std::uint64_t p, unsigned m, const AdversaryStrategy& strategy,
                                      std::uint64_t access_cap = 50'000'000) {
  AdversaryReport rep;
  rep.p = p;
  rep.m = m;
  for (int i = 0; i < 2; ++i) {
    AdversaryRun& run = rep.runs[i];
    run.policy = i == 0 ? Commitment::D1 : Commitment::D2;
    AdversaryOracle oracle(p, m, run.policy, access_cap);
    rep.threshold = oracle.threshold();
    try {
      run.answer = strategy(oracle);
    } catch (const AdversaryCapExceeded&) {
      run.inconclusive = true;
    }
    run.committed = oracle.committed();
    run.served_at_commit = oracle.served_at_commit();
    run.counters_at_commit = oracle.counters_at_commit();
    run.counters = oracle.counters();
    // Without a commitment the adversary may still pick either group; it picks its policy.
    const Commitment truth = run.committed.value_or(run.policy);
    run.correct = !run.inconclusive && run.answer == canonical_invariant_factors(adversary_factors(p, m, truth));
    run.replay_d1 = oracle.replay(Commitment::D1);
    run.replay_d2 = oracle.replay(Commitment::D2);
  }
  return rep;
}

}  // namespace abelian
