#include "tautgw/series.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace tautgw {

namespace {

int parse_int(std::string_view s, std::string_view whole)
{
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("malformed variable name '" + std::string(whole) + "'");
    return v;
}

} // namespace

std::string Variable::name() const
{
    switch (kind) {
    case VarKind::X:
        return "x" + std::to_string(alpha);
    case VarKind::T:
        return "t" + std::to_string(level) + "_" + std::to_string(alpha);
    case VarKind::S:
        return "s" + std::to_string(level) + "_" + std::to_string(alpha);
    case VarKind::Q:
        return "q";
    }
    return "?";
}

VarId parse_var_name(std::string_view name)
{
    if (name == "q")
        return {VarKind::Q, 0, 0};
    if (name.size() < 2)
        throw std::invalid_argument("malformed variable name '" + std::string(name) + "'");
    char head = name.front();
    std::string_view rest = name.substr(1);
    if (head == 'x')
        return {VarKind::X, 0, parse_int(rest, name)};
    if (head != 't' && head != 's')
        throw std::invalid_argument("malformed variable name '" + std::string(name) + "'");
    auto us = rest.find('_');
    if (us == std::string_view::npos)
        throw std::invalid_argument("malformed variable name '" + std::string(name) + "'");
    int level = parse_int(rest.substr(0, us), name);
    int alpha = parse_int(rest.substr(us + 1), name);
    if (head == 't') {
        if (level == 0)
            return {VarKind::X, 0, alpha};
        if (level < 0)
            throw std::invalid_argument("descendant variable with negative level '" + std::string(name) + "'");
        return {VarKind::T, level, alpha};
    }
    if (level < -1)
        throw std::invalid_argument("kappa variable below level -1 '" + std::string(name) + "'");
    return {VarKind::S, level, alpha};
}

VarRegistry::VarRegistry(std::vector<Variable> vars) : vars_(std::move(vars))
{
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i].grading % 2 != 0)
            throw std::invalid_argument("variable " + vars_[i].name() + " has odd grading");
        for (std::size_t j = 0; j < i; ++j)
            if (vars_[i].kind == vars_[j].kind && vars_[i].level == vars_[j].level &&
                vars_[i].alpha == vars_[j].alpha)
                throw std::invalid_argument("duplicate variable " + vars_[i].name());
    }
}

std::shared_ptr<const VarRegistry> VarRegistry::from_names(std::span<const std::string> names,
                                                           std::span<const int> basis_gradings,
                                                           int c1_degree)
{
    std::vector<Variable> vars;
    for (const auto& n : names) {
        VarId id = parse_var_name(n);
        Variable v{id.kind, id.level, id.alpha, 0};
        if (id.kind == VarKind::Q) {
            v.grading = -2 * c1_degree;
        } else {
            if (id.alpha < 0 || static_cast<std::size_t>(id.alpha) >= basis_gradings.size())
                throw std::invalid_argument("variable " + n + " refers to a basis index outside the target");
            int e = basis_gradings[static_cast<std::size_t>(id.alpha)];
            v.grading = id.kind == VarKind::S ? 2 * id.level + e : 2 * id.level - 2 + e;
        }
        vars.push_back(v);
    }
    return std::make_shared<const VarRegistry>(std::move(vars));
}

std::optional<std::size_t> VarRegistry::find(VarKind kind, int level, int alpha) const
{
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        const auto& v = vars_[i];
        if (v.kind != kind)
            continue;
        if (kind == VarKind::Q || (v.level == level && v.alpha == alpha))
            return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> VarRegistry::find(std::string_view name) const
{
    VarId id = parse_var_name(name);
    return find(id.kind, id.level, id.alpha);
}

std::size_t VarRegistry::index(std::string_view name) const
{
    auto i = find(name);
    if (!i)
        throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
    return *i;
}

bool Truncation::admits(const Exponents& e, const VarRegistry& reg) const
{
    int total = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] > caps[i])
            return false;
        if (reg[i].kind != VarKind::Q)
            total += e[i];
    }
    return !max_total || total <= *max_total;
}

Truncation Truncation::uniform(const VarRegistry& reg, int var_cap, int q_cap, std::optional<int> max_total)
{
    Truncation t;
    for (const auto& v : reg.variables())
        t.caps.push_back(v.kind == VarKind::Q ? q_cap : var_cap);
    t.max_total = max_total;
    return t;
}

Truncation meet(const Truncation& a, const Truncation& b)
{
    if (a.caps.size() != b.caps.size())
        throw std::invalid_argument("truncations over different variable sets");
    Truncation t;
    for (std::size_t i = 0; i < a.caps.size(); ++i)
        t.caps.push_back(std::min(a.caps[i], b.caps[i]));
    if (a.max_total && b.max_total)
        t.max_total = std::min(*a.max_total, *b.max_total);
    else
        t.max_total = a.max_total ? a.max_total : b.max_total;
    return t;
}

QSeries::QSeries(std::shared_ptr<const VarRegistry> reg, Truncation trunc)
    : reg_(std::move(reg)), trunc_(std::move(trunc))
{
    if (!reg_)
        throw std::invalid_argument("series without a variable registry");
    if (trunc_.caps.size() != reg_->size())
        throw std::invalid_argument("truncation does not match the variable registry");
}

QSeries QSeries::constant(std::shared_ptr<const VarRegistry> reg, Truncation trunc, const Rational& c)
{
    QSeries s(std::move(reg), std::move(trunc));
    s.add_term(Exponents(s.reg_->size(), 0), c);
    return s;
}

QSeries QSeries::variable(std::shared_ptr<const VarRegistry> reg, Truncation trunc, std::string_view name)
{
    QSeries s(std::move(reg), std::move(trunc));
    Exponents e(s.reg_->size(), 0);
    e[s.reg_->index(name)] = 1;
    s.add_term(e, Rational(1));
    return s;
}

QSeries QSeries::monomial(std::shared_ptr<const VarRegistry> reg, Truncation trunc, Exponents e,
                          const Rational& c)
{
    QSeries s(std::move(reg), std::move(trunc));
    if (e.size() != s.reg_->size())
        throw std::invalid_argument("exponent vector length does not match registry");
    s.add_term(e, c);
    return s;
}

void QSeries::add_term(const Exponents& e, const Rational& c)
{
    if (c.is_zero() || !trunc_.admits(e, *reg_))
        return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero())
            terms_.erase(it);
    }
}

Rational QSeries::coefficient(const Exponents& e) const
{
    if (e.size() != reg_->size())
        throw std::invalid_argument("exponent vector length does not match registry");
    for (int x : e)
        if (x < 0)
            throw std::invalid_argument("negative exponent");
    if (!trunc_.admits(e, *reg_))
        throw std::out_of_range("monomial outside the truncation");
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

Exponents QSeries::exponents(std::initializer_list<std::pair<std::string_view, int>> mono) const
{
    Exponents e(reg_->size(), 0);
    for (const auto& [name, power] : mono)
        e[reg_->index(name)] += power;
    return e;
}

Rational QSeries::coefficient(std::initializer_list<std::pair<std::string_view, int>> mono) const
{
    return coefficient(exponents(mono));
}

Rational QSeries::constant_term() const
{
    auto it = terms_.find(Exponents(reg_->size(), 0));
    return it == terms_.end() ? Rational(0) : it->second;
}

QSeries QSeries::scaled(const Rational& c) const
{
    QSeries r(reg_, trunc_);
    if (c.is_zero())
        return r;
    for (const auto& [e, v] : terms_)
        r.terms_.emplace_hint(r.terms_.end(), e, v * c);
    return r;
}

QSeries QSeries::restricted(const Truncation& t) const
{
    QSeries r(reg_, t);
    for (const auto& [e, v] : terms_)
        if (t.admits(e, *reg_))
            r.terms_.emplace_hint(r.terms_.end(), e, v);
    return r;
}

QSeries QSeries::partial_derivative(std::string_view var) const
{
    return partial_derivative(reg_->index(var));
}

QSeries QSeries::partial_derivative(std::size_t var) const
{
    if (var >= reg_->size())
        throw std::invalid_argument("unknown variable index");
    Truncation t = trunc_;
    t.caps[var] -= 1;
    if (t.max_total && (*reg_)[var].kind != VarKind::Q)
        *t.max_total -= 1;
    QSeries r(reg_, t);
    for (const auto& [e, v] : terms_) {
        if (e[var] == 0)
            continue;
        Exponents d = e;
        d[var] -= 1;
        r.add_term(d, v * Rational(e[var]));
    }
    return r;
}

QSeries QSeries::q_log_derivative() const
{
    auto qi = reg_->q_index();
    if (!qi)
        throw std::invalid_argument("q-derivative of a series without q");
    QSeries r(reg_, trunc_);
    for (const auto& [e, v] : terms_)
        if (e[*qi] != 0)
            r.terms_.emplace_hint(r.terms_.end(), e, v * Rational(e[*qi]));
    return r;
}

int QSeries::grading(const Exponents& e) const
{
    int g = 0;
    for (std::size_t i = 0; i < e.size(); ++i)
        g += e[i] * (*reg_)[i].grading;
    return g;
}

std::optional<int> QSeries::homogeneous_grading() const
{
    std::optional<int> g;
    for (const auto& [e, v] : terms_) {
        int h = grading(e);
        if (g && *g != h)
            return std::nullopt;
        g = h;
    }
    return g;
}

void QSeries::require_compatible(const QSeries& o, const char* op) const
{
    if (!(*reg_ == *o.reg_))
        throw std::invalid_argument(std::string(op) + ": series over different variable registries");
    if (!(trunc_ == o.trunc_))
        throw std::invalid_argument(std::string(op) + ": series with different truncations");
}

QSeries& QSeries::operator+=(const QSeries& o)
{
    require_compatible(o, "add");
    for (const auto& [e, v] : o.terms_)
        add_term(e, v);
    return *this;
}

QSeries& QSeries::operator-=(const QSeries& o)
{
    require_compatible(o, "sub");
    for (const auto& [e, v] : o.terms_)
        add_term(e, -v);
    return *this;
}

QSeries operator*(const QSeries& a, const QSeries& b)
{
    a.require_compatible(b, "mul");
    QSeries r(a.reg_, a.trunc_);
    Exponents e(a.reg_->size());
    for (const auto& [ea, va] : a.terms_)
        for (const auto& [eb, vb] : b.terms_) {
            for (std::size_t i = 0; i < e.size(); ++i)
                e[i] = ea[i] + eb[i];
            r.add_term(e, va * vb);
        }
    return r;
}

bool operator==(const QSeries& a, const QSeries& b)
{
    return *a.reg_ == *b.reg_ && a.trunc_ == b.trunc_ && a.terms_ == b.terms_;
}

std::string QSeries::str() const
{
    if (terms_.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, v] : terms_) {
        if (!first)
            os << " + ";
        first = false;
        os << "(" << v << ")";
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] > 0) {
                os << "*" << (*reg_)[i].name();
                if (e[i] > 1)
                    os << "^" << e[i];
            }
    }
    return os.str();
}

std::vector<Exponents> enumerate_monomials(const VarRegistry& reg, const Truncation& trunc)
{
    std::vector<Exponents> out;
    Exponents e(reg.size(), 0);
    auto qi = reg.q_index();
    // Odometer over the non-q variables, pruned by the total bound.
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < reg.size(); ++i)
        if (!qi || i != *qi)
            free.push_back(i);
    auto recurse = [&](auto&& self, std::size_t k, int total) -> void {
        if (k == free.size()) {
            out.push_back(e);
            return;
        }
        std::size_t v = free[k];
        for (int p = 0; p <= trunc.caps[v]; ++p) {
            if (trunc.max_total && total + p > *trunc.max_total)
                break;
            e[v] = p;
            self(self, k + 1, total + p);
        }
        e[v] = 0;
    };
    recurse(recurse, 0, 0);
    return out;
}

QSeries exp_series(const QSeries& a)
{
    if (!a.constant_term().is_zero())
        throw std::invalid_argument("exp_series: argument has a nonzero constant term");
    QSeries sum = QSeries::constant(a.registry_ptr(), a.truncation(), Rational(1));
    QSeries power = sum;
    for (int k = 1; !power.is_zero(); ++k) {
        power = (power * a).scaled(Rational(1, k));
        sum += power;
    }
    return sum;
}

} // namespace tautgw
