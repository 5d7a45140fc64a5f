#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tautgw/correlators.hpp"
#include "tautgw/series.hpp"
#include "tautgw/target.hpp"

namespace tautgw {

/// Active variables (all others are set to zero) and truncation for a
/// generating function.
struct PotentialSpec {
    TargetPtr target;
    std::shared_ptr<const VarRegistry> reg;
    Truncation trunc;

    /// Per-variable cap `var_cap`, q-degree cap `q_cap`, optional bound on the
    /// total degree of the non-q variables. A "q" variable is appended if absent.
    static PotentialSpec make(TargetPtr target, std::vector<std::string> names, int var_cap, int q_cap,
                              std::optional<int> max_total = std::nullopt);
};

/// H = Σ (1/m!)(1/p!) ⟨τ^m κ^p⟩_d t^m s^p q^d over the active variables.
/// `jobs` worker threads evaluate monomials; the result does not depend on it.
QSeries build_H_series(const PotentialSpec& spec, int jobs = 1);

struct WdvvEntry {
    std::array<int, 4> indices;  // (a, b, c, d)
    QSeries residual;
};

/// F_{abe} η^{ef} F_{fcd} - F_{bce} η^{ef} F_{fad} for every quadruple of
/// x-indices whose residual is nonzero.
std::vector<WdvvEntry> wdvv_residuals(const QSeries& f, const TargetModel& target);
/// The residual of the first violating quadruple, or the zero series.
QSeries wdvv_residual(const QSeries& f, const TargetModel& target);

struct PdeResidual {
    std::string relation;
    QSeries residual;
};

/// Residuals of the three families of differential equations for H, over all
/// index choices whose left-hand side variables are active. Throws
/// std::invalid_argument if a right-hand side needs an inactive variable
/// that is not identically zero.
std::vector<PdeResidual> trr_pde_residuals(const QSeries& h, const TargetModel& target);

/// h_1..h_N for the projective line.
std::vector<Rational> cp1_h_sequence(int n);

/// Variables x0, x1, s-1_1, s0_0, s0_1 and q on the projective line.
PotentialSpec cp1_five_variable_spec(int q_cap, int var_cap, std::optional<int> max_total = std::nullopt);

/// Σ_{n<=N} e^{-2 s0_0} q̃^n (s0_1)^{2n-2}/(2n-2)! h_n with
/// q̃ = q exp(s-1_1 + e^{s0_0}(x1 + s0_1 x0)), optionally plus
/// e^{s0_0}(x0^2 x1/2 + x0^3 s0_1/6). Variables of the five-variable set that
/// are missing from the registry are set to zero; `h` defaults to the
/// recursion.
QSeries cp1_closed_form_series(int n, const PotentialSpec& spec, bool include_h_in = true,
                               const std::vector<Rational>& h = {});

/// ∂H̃''/∂s0_1 - 2 s0_1 H̃'' H̃''' - x0 H̃''' on the closed form through q^N,
/// primes being q∂/∂q.
QSeries cp1_penult_residual(int n);
QSeries cp1_penult_residual(int n, const std::vector<Rational>& h);

/// ∂H̃/∂x0 - e^{s0_0} s0_1 ∂H̃/∂s-1_1 and ∂H̃/∂x1 - e^{s0_0} ∂H̃/∂s-1_1.
std::vector<PdeResidual> cp1_puncture_dilaton_residuals(const QSeries& htilde);

/// Series as {"vars": [...], "terms": [{"exp": [...], "coef": "p/q"}]}.
nlohmann::json series_to_json(const QSeries& s);

} // namespace tautgw
