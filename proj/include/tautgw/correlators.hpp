#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tautgw/gw.hpp"
#include "tautgw/target.hpp"
#include "tautgw/trees.hpp"

namespace tautgw {

/// (level a, basis index α)
using Slot = std::pair<int, int>;

/// Multiset of slots. τ-indices have levels >= 0, κ-indices levels >= -1.
class MultiIndex {
public:
    explicit MultiIndex(int min_level = 0) : min_level_(min_level) {}

    int min_level() const { return min_level_; }
    const std::map<Slot, int>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    int count(int a, int alpha) const;
    MultiIndex& add(int a, int alpha, int mult = 1);
    /// Throws std::invalid_argument if fewer than `mult` copies are present.
    MultiIndex& remove(int a, int alpha, int mult = 1);
    MultiIndex plus(int a, int alpha, int mult = 1) const { return MultiIndex(*this).add(a, alpha, mult); }
    MultiIndex minus(int a, int alpha, int mult = 1) const { return MultiIndex(*this).remove(a, alpha, mult); }
    MultiIndex operator+(const MultiIndex& o) const;

    /// |m| = Σ a·m_a^α over a >= 0.
    int weight() const;
    /// ‖m‖ = Σ m_a^α over a >= 0.
    int norm() const;
    /// All entries, including level -1.
    int size() const;
    std::optional<int> max_level() const;
    /// Π m_a^α!
    Rational factorial() const;
    /// Expanded list of slots in ascending order.
    std::vector<Slot> expanded() const;
    std::string str(char symbol) const;

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.entries_ == b.entries_; }
    friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) { return a.entries_ <=> b.entries_; }

private:
    int min_level_ = 0;
    std::map<Slot, int> entries_;
};

/// Π binom(m_i, m'_i); zero unless m' ⊆ m.
Rational multi_binomial(const MultiIndex& m, const MultiIndex& sub);

/// Visits every sub-multiset s ⊆ m (as (s, m - s, binom(m, s))).
void for_each_submultiset(const MultiIndex& m,
                          const std::function<void(const MultiIndex&, const MultiIndex&, const Rational&)>& f);

struct CorrelatorKey {
    TargetPtr target;
    MultiIndex tau{0};
    MultiIndex kappa{-1};
    Degree beta{0};

    CorrelatorKey(TargetPtr t, MultiIndex m, MultiIndex p, Degree d);

    int n() const { return tau.norm(); }
    std::string str() const;

    friend bool operator==(const CorrelatorKey& a, const CorrelatorKey& b);
    friend bool operator<(const CorrelatorKey& a, const CorrelatorKey& b);
};

/// Σ coef · Π factors.
class CorrelatorCombination {
public:
    struct Term {
        Rational coef;
        std::vector<CorrelatorKey> factors;
    };

    void add(const Rational& coef, std::vector<CorrelatorKey> factors);
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

private:
    std::vector<Term> terms_;
    std::map<std::vector<CorrelatorKey>, std::size_t> index_;
};

/// Complex dimension of M_{0,n}(V,β); throws for β = 0 and n < 3.
int expected_dimension(const CorrelatorKey& key);
/// True iff the key is stable and its insertion degrees sum to twice the
/// dimension of the moduli space.
bool selection(const CorrelatorKey& key);

/// ψ relation with pivot τ_{a1}^{α1} (a1 >= 1) and co-pivots taken from m.
CorrelatorCombination apply_trr_psi(const CorrelatorKey& key, Slot pivot, Slot co1, Slot co2);

/// κ relation with pivot κ_{a1,α1} (a1 >= 0). Without explicit co-pivots the
/// first two τ insertions in ascending order are used.
CorrelatorCombination apply_trr_kappa(const CorrelatorKey& key, Slot pivot,
                                      std::optional<std::pair<Slot, Slot>> copivots = std::nullopt);

/// Puncture/dilaton analogue with pivot τ_a^α. With include_empty = false the
/// term p'' = ∅ is left out.
CorrelatorCombination apply_puncture_dilaton(const CorrelatorKey& key, Slot pivot, bool include_empty = true);

/// Replaces each κ_{-1,α} by an extra e_α insertion.
PureGWKey lift_kappa_minus_one(const CorrelatorKey& key);

struct Evaluation {
    Rational value;
    std::uint64_t reductions = 0;
};

/// ψ classes go first (splitting relation, or the pullback relation when at
/// most two points remain), then κ classes of level >= 0; what is left is a
/// Gromov-Witten invariant with the κ_{-1} classes as extra points.
Rational evaluate(const CorrelatorKey& key);
/// Same value; `reductions` counts the relation applications performed by
/// this call (cache hits cost nothing).
Evaluation evaluate_counted(const CorrelatorKey& key);
Rational evaluate(const CorrelatorCombination& c);
void clear_correlator_cache();

/// ∫ over M_{0,n}(V,d) of the tree sum times ev_i^*(e_{tail_classes[i]});
/// tails absent from the map carry the unit.
Rational integrate_tree_sum(const TreeSum& s, const TargetPtr& target, const std::map<int, int>& tail_classes = {});

/// {"target": {...} | "r": k, "degree": d, "tau": [[a, alpha, mult]...], "kappa": [...]}
CorrelatorKey key_from_json(const nlohmann::json& j);
nlohmann::json key_to_json(const CorrelatorKey& key);

} // namespace tautgw
