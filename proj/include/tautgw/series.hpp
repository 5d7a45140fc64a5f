#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tautgw/rational.hpp"

namespace tautgw {

// x^α is t_0^α; kind T is reserved for descendant levels a >= 1.
enum class VarKind { X, T, S, Q };

struct Variable {
    VarKind kind = VarKind::X;
    int level = 0;  // a (0 for x, unused for q)
    int alpha = 0;  // basis index (unused for q)
    int grading = 0;

    std::string name() const;
    friend bool operator==(const Variable&, const Variable&) = default;
};

struct VarId {
    VarKind kind;
    int level;
    int alpha;
};

/// Parses "x1", "t2_0", "s-1_1", "s0_1", "q". Throws std::invalid_argument.
VarId parse_var_name(std::string_view name);

class VarRegistry {
public:
    /// Rejects duplicate (kind, level, alpha) and odd gradings.
    explicit VarRegistry(std::vector<Variable> vars);

    /// Builds variables from names with gradings |t_a^α| = 2a-2+|e_α|,
    /// |s_a^α| = 2a+|e_α| and |q| = -2*c1_degree.
    static std::shared_ptr<const VarRegistry> from_names(std::span<const std::string> names,
                                                         std::span<const int> basis_gradings,
                                                         int c1_degree);

    std::size_t size() const { return vars_.size(); }
    const Variable& operator[](std::size_t i) const { return vars_[i]; }
    const std::vector<Variable>& variables() const { return vars_; }

    std::optional<std::size_t> find(VarKind kind, int level, int alpha) const;
    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t index(std::string_view name) const;  // throws on unknown
    std::optional<std::size_t> q_index() const { return find(VarKind::Q, 0, 0); }

    friend bool operator==(const VarRegistry& a, const VarRegistry& b) { return a.vars_ == b.vars_; }

private:
    std::vector<Variable> vars_;
};

using Exponents = std::vector<int>;

/// Per-variable exponent caps (the cap on q is the q-degree bound) plus an
/// optional bound on the total exponent of the non-q variables.
struct Truncation {
    std::vector<int> caps;
    std::optional<int> max_total;

    bool admits(const Exponents& e, const VarRegistry& reg) const;
    static Truncation uniform(const VarRegistry& reg, int var_cap, int q_cap,
                              std::optional<int> max_total = std::nullopt);
    friend bool operator==(const Truncation&, const Truncation&) = default;
};

Truncation meet(const Truncation& a, const Truncation& b);

class QSeries {
public:
    using Terms = std::map<Exponents, Rational>;

    QSeries(std::shared_ptr<const VarRegistry> reg, Truncation trunc);

    static QSeries constant(std::shared_ptr<const VarRegistry> reg, Truncation trunc, const Rational& c);
    static QSeries variable(std::shared_ptr<const VarRegistry> reg, Truncation trunc, std::string_view name);
    static QSeries monomial(std::shared_ptr<const VarRegistry> reg, Truncation trunc, Exponents e,
                            const Rational& c);

    const VarRegistry& registry() const { return *reg_; }
    const std::shared_ptr<const VarRegistry>& registry_ptr() const { return reg_; }
    const Truncation& truncation() const { return trunc_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    /// Adds c to the coefficient of e; monomials outside the truncation are dropped.
    void add_term(const Exponents& e, const Rational& c);

    /// Throws std::out_of_range for a monomial outside the truncation,
    /// std::invalid_argument for a wrong-length exponent vector.
    Rational coefficient(const Exponents& e) const;
    Rational coefficient(std::initializer_list<std::pair<std::string_view, int>> mono) const;
    Exponents exponents(std::initializer_list<std::pair<std::string_view, int>> mono) const;

    Rational constant_term() const;
    QSeries scaled(const Rational& c) const;

    /// Re-truncates to a tighter bound.
    QSeries restricted(const Truncation& t) const;

    QSeries partial_derivative(std::string_view var) const;
    QSeries partial_derivative(std::size_t var) const;
    QSeries q_log_derivative() const;

    /// Sum of exponent * grading over all variables.
    int grading(const Exponents& e) const;
    /// The common grading of all monomials; nullopt if empty or mixed.
    std::optional<int> homogeneous_grading() const;

    QSeries& operator+=(const QSeries& o);
    QSeries& operator-=(const QSeries& o);
    friend QSeries operator+(QSeries a, const QSeries& b) { return a += b; }
    friend QSeries operator-(QSeries a, const QSeries& b) { return a -= b; }
    friend QSeries operator*(const QSeries& a, const QSeries& b);
    friend QSeries operator-(const QSeries& a) { return a.scaled(Rational(-1)); }
    friend bool operator==(const QSeries& a, const QSeries& b);

    std::string str() const;

private:
    void require_compatible(const QSeries& o, const char* op) const;

    std::shared_ptr<const VarRegistry> reg_;
    Truncation trunc_;
    Terms terms_;
};

/// All exponent vectors admitted by the truncation with the q exponent fixed
/// at zero, in lexicographic order.
std::vector<Exponents> enumerate_monomials(const VarRegistry& reg, const Truncation& trunc);

/// Σ a^k/k!; requires a zero constant term.
QSeries exp_series(const QSeries& a);

} // namespace tautgw
