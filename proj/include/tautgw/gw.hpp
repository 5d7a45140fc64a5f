#pragma once

#include <vector>

#include "tautgw/series.hpp"
#include "tautgw/target.hpp"

namespace tautgw {

/// ⟨e_{α_1} ... e_{α_n}⟩_d with classes kept sorted.
struct PureGWKey {
    TargetPtr target;
    Degree beta{0};
    std::vector<int> classes;

    PureGWKey(TargetPtr t, Degree d, std::vector<int> cls);
};

/// Genus-0 Gromov-Witten invariant by the selection rule, the unit and
/// divisor axioms and WDVV reconstruction down to the target's seeds.
/// Results are cached per target; the cache is safe to share between threads.
Rational pure_gw(const PureGWKey& key);

/// Unnormalized entry point: classes in any order.
Rational pure_gw(const TargetPtr& target, int degree, std::vector<int> classes);

/// Registry with x^0..x^r and q for the target.
std::shared_ptr<const VarRegistry> potential_registry(const TargetModel& target);

/// Σ_n 1/n! Σ ⟨e_{α_1}..e_{α_n}⟩_d x^{α_1}..x^{α_n} q^d within the truncation.
/// The registry may only contain x-variables and q.
QSeries gw_potential_series(const TargetPtr& target, std::shared_ptr<const VarRegistry> reg, Truncation trunc);

void clear_gw_cache();

} // namespace tautgw
