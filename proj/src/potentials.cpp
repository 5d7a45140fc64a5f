#include "tautgw/potentials.hpp"

#include <atomic>
#include <exception>
#include <stdexcept>
#include <thread>

namespace tautgw {

PotentialSpec PotentialSpec::make(TargetPtr target, std::vector<std::string> names, int var_cap, int q_cap,
                                  std::optional<int> max_total)
{
    if (!target)
        throw std::invalid_argument("potential without a target");
    bool has_q = false;
    for (const auto& n : names)
        has_q = has_q || n == "q";
    if (!has_q)
        names.push_back("q");
    PotentialSpec s;
    s.target = std::move(target);
    s.reg = VarRegistry::from_names(names, s.target->gradings(), s.target->c1_degree());
    for (const auto& v : s.reg->variables())
        if (v.kind != VarKind::Q && v.alpha >= s.target->rank())
            throw std::invalid_argument("variable " + v.name() + " refers to a class outside the target");
    s.trunc = Truncation::uniform(*s.reg, var_cap, q_cap, max_total);
    return s;
}

QSeries build_H_series(const PotentialSpec& spec, int jobs)
{
    const auto& reg = *spec.reg;
    auto qi = reg.q_index();
    int qcap = qi ? spec.trunc.caps[*qi] : 0;
    auto monomials = enumerate_monomials(reg, spec.trunc);

    using Cell = std::vector<std::pair<Exponents, Rational>>;
    std::vector<Cell> cells(monomials.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        try {
            for (std::size_t i = next++; i < monomials.size(); i = next++) {
                const Exponents& e = monomials[i];
                MultiIndex m(0), p(-1);
                Rational weight(1);
                for (std::size_t v = 0; v < e.size(); ++v) {
                    if (e[v] == 0)
                        continue;
                    const Variable& var = reg[v];
                    if (var.kind == VarKind::S)
                        p.add(var.level, var.alpha, e[v]);
                    else
                        m.add(var.level, var.alpha, e[v]);
                    weight /= factorial(e[v]);
                }
                for (int d = 0; d <= qcap; ++d) {
                    CorrelatorKey key(spec.target, m, p, Degree(d));
                    if (!selection(key))
                        continue;
                    Rational val = evaluate(key);
                    if (val.is_zero())
                        continue;
                    Exponents out = e;
                    if (qi)
                        out[*qi] = d;
                    cells[i].emplace_back(std::move(out), val * weight);
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure)
                failure = std::current_exception();
            next = monomials.size();
        }
    };

    int n_threads = std::max(1, jobs);
    if (n_threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    QSeries h(spec.reg, spec.trunc);
    for (const auto& cell : cells)
        for (const auto& [e, v] : cell)
            h.add_term(e, v);
    return h;
}

namespace {

std::size_t require_var(const VarRegistry& reg, VarKind kind, int level, int alpha)
{
    auto i = reg.find(kind, level, alpha);
    if (!i) {
        Variable v{kind, level, alpha, 0};
        throw std::invalid_argument("variable " + v.name() + " is not active");
    }
    return *i;
}

QSeries d(const QSeries& s, std::initializer_list<std::size_t> vars)
{
    QSeries r = s;
    for (auto v : vars)
        r = r.partial_derivative(v);
    return r;
}

// a - b after bringing both to the common truncation.
QSeries difference(const QSeries& a, const QSeries& b)
{
    Truncation t = meet(a.truncation(), b.truncation());
    return a.restricted(t) - b.restricted(t);
}

QSeries sum_aligned(const QSeries& a, const QSeries& b)
{
    Truncation t = meet(a.truncation(), b.truncation());
    return a.restricted(t) + b.restricted(t);
}

QSeries product(const QSeries& a, const QSeries& b)
{
    Truncation t = meet(a.truncation(), b.truncation());
    return a.restricted(t) * b.restricted(t);
}

// Σ_{e,f} A_e η^{ef} B_f
QSeries contract(const std::vector<QSeries>& a, const std::vector<QSeries>& b, const TargetModel& target)
{
    std::optional<QSeries> acc;
    for (int e = 0; e < target.rank(); ++e)
        for (int f = 0; f < target.rank(); ++f) {
            const Rational& g = target.eta_inverse(e, f);
            if (g.is_zero())
                continue;
            QSeries term = product(a[static_cast<std::size_t>(e)], b[static_cast<std::size_t>(f)]).scaled(g);
            acc = acc ? sum_aligned(*acc, term) : term;
        }
    return *acc;
}

std::vector<std::size_t> x_indices(const VarRegistry& reg, const TargetModel& target)
{
    std::vector<std::size_t> xs;
    for (int a = 0; a < target.rank(); ++a)
        xs.push_back(require_var(reg, VarKind::X, 0, a));
    return xs;
}

} // namespace

std::vector<WdvvEntry> wdvv_residuals(const QSeries& f, const TargetModel& target)
{
    const auto& reg = f.registry();
    auto xs = x_indices(reg, target);
    int r = target.rank();
    // third derivatives F_{ijk}, indexed by sorted triples
    std::map<std::array<int, 3>, QSeries> third;
    auto f3 = [&](int i, int j, int k) -> const QSeries& {
        std::array<int, 3> key{i, j, k};
        std::sort(key.begin(), key.end());
        auto it = third.find(key);
        if (it == third.end())
            it = third.emplace(key, d(f, {xs[static_cast<std::size_t>(key[0])], xs[static_cast<std::size_t>(key[1])],
                                          xs[static_cast<std::size_t>(key[2])]}))
                     .first;
        return it->second;
    };
    std::vector<WdvvEntry> out;
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
            for (int c = 0; c < r; ++c)
                for (int dd = 0; dd < r; ++dd) {
                    std::vector<QSeries> abe, fcd, bce, fad;
                    for (int e = 0; e < r; ++e) {
                        abe.push_back(f3(a, b, e));
                        fcd.push_back(f3(e, c, dd));
                        bce.push_back(f3(b, c, e));
                        fad.push_back(f3(e, a, dd));
                    }
                    QSeries res = difference(contract(abe, fcd, target), contract(bce, fad, target));
                    if (!res.is_zero())
                        out.push_back({{a, b, c, dd}, res});
                }
    return out;
}

QSeries wdvv_residual(const QSeries& f, const TargetModel& target)
{
    auto all = wdvv_residuals(f, target);
    if (!all.empty())
        return all.front().residual;
    auto xs = x_indices(f.registry(), target);
    QSeries z = d(f, {xs[0], xs[0], xs[0]});
    return product(z, z).scaled(Rational(0));
}

std::vector<PdeResidual> trr_pde_residuals(const QSeries& h, const TargetModel& target)
{
    const auto& reg = h.registry();
    auto xs = x_indices(reg, target);
    int r = target.rank();
    std::vector<std::size_t> ts;  // every active t_a^α, a >= 0
    for (std::size_t i = 0; i < reg.size(); ++i)
        if (reg[i].kind == VarKind::X || reg[i].kind == VarKind::T)
            ts.push_back(i);

    std::vector<PdeResidual> out;
    auto rhs_split = [&](const QSeries& first, std::size_t t2, std::size_t t3) {
        std::vector<QSeries> a, b;
        for (int s = 0; s < r; ++s) {
            a.push_back(d(first, {xs[static_cast<std::size_t>(s)]}));
            b.push_back(d(h, {xs[static_cast<std::size_t>(s)], t2, t3}));
        }
        return contract(a, b, target);
    };
    auto label = [&](const char* fam, std::size_t p, std::size_t t2, std::size_t t3) {
        return std::string(fam) + "(" + reg[p].name() + ";" + reg[t2].name() + "," + reg[t3].name() + ")";
    };

    for (std::size_t i2 = 0; i2 < ts.size(); ++i2)
        for (std::size_t i3 = i2; i3 < ts.size(); ++i3) {
            std::size_t t2 = ts[i2], t3 = ts[i3];
            for (std::size_t p = 0; p < reg.size(); ++p) {
                const Variable& v = reg[p];
                if (v.kind == VarKind::T && v.level >= 1) {
                    std::size_t lower = v.level == 1 ? require_var(reg, VarKind::X, 0, v.alpha)
                                                     : require_var(reg, VarKind::T, v.level - 1, v.alpha);
                    QSeries lhs = d(h, {p, t2, t3});
                    QSeries rhs = rhs_split(d(h, {lower}), t2, t3);
                    out.push_back({label("psi", p, t2, t3), difference(lhs, rhs)});
                } else if (v.kind == VarKind::S && v.level >= 0) {
                    QSeries lhs = d(h, {p, t2, t3});
                    auto lower = reg.find(VarKind::S, v.level - 1, v.alpha);
                    std::optional<QSeries> rhs;
                    if (lower) {
                        rhs = rhs_split(d(h, {*lower}), t2, t3);
                    } else if (v.level == 0 && target.grading(v.alpha) == 0) {
                        // κ_{-1,α} has negative degree and vanishes
                        QSeries z = d(h, {xs[0], t2, t3});
                        rhs = product(z, z).scaled(Rational(0));
                    } else {
                        throw std::invalid_argument("variable s" + std::to_string(v.level - 1) + "_" +
                                                    std::to_string(v.alpha) + " is not active");
                    }
                    if (v.level == 0) {
                        // Σ c^ν_{α,α1} t_a^α ∂³H/∂t_a^ν∂t2∂t3
                        for (std::size_t q = 0; q < reg.size(); ++q) {
                            const Variable& tv = reg[q];
                            if (tv.kind != VarKind::X && tv.kind != VarKind::T)
                                continue;
                            for (int nu = 0; nu < r; ++nu) {
                                const Rational& c = target.cup_coefficient(nu, tv.alpha, v.alpha);
                                if (c.is_zero())
                                    continue;
                                std::size_t tn = tv.kind == VarKind::X ? require_var(reg, VarKind::X, 0, nu)
                                                                       : require_var(reg, VarKind::T, tv.level, nu);
                                QSeries d3 = d(h, {tn, t2, t3});
                                QSeries var = QSeries::variable(h.registry_ptr(), d3.truncation(), tv.name());
                                rhs = sum_aligned(*rhs, product(var, d3).scaled(c));
                            }
                        }
                    }
                    out.push_back({label(v.level == 0 ? "kappa0" : "kappa", p, t2, t3), difference(lhs, *rhs)});
                }
            }
        }
    return out;
}

std::vector<Rational> cp1_h_sequence(int n)
{
    if (n < 1)
        throw std::invalid_argument("h sequence needs N >= 1");
    std::vector<Rational> h{Rational(1)};
    for (int k = 1; k < n; ++k) {
        Rational next;
        for (int l = 1; l <= k; ++l) {
            Rational c = factorial(2 * k - 1) * Rational(l * l) * Rational((k + 1 - l) * (k + 1 - l)) /
                         (factorial(2 * l - 2) * factorial(2 * (k - l)) * Rational(k + 1));
            next += c * h[static_cast<std::size_t>(l - 1)] * h[static_cast<std::size_t>(k - l)];
        }
        h.push_back(next);
    }
    return h;
}

PotentialSpec cp1_five_variable_spec(int q_cap, int var_cap, std::optional<int> max_total)
{
    return PotentialSpec::make(TargetModel::projective_space(1), {"x0", "x1", "s-1_1", "s0_0", "s0_1", "q"}, var_cap,
                               q_cap, max_total);
}

namespace {

QSeries var_or_zero(const PotentialSpec& spec, const char* name)
{
    if (spec.reg->find(name))
        return QSeries::variable(spec.reg, spec.trunc, name);
    return QSeries(spec.reg, spec.trunc);
}

} // namespace

QSeries cp1_closed_form_series(int n, const PotentialSpec& spec, bool include_h_in, const std::vector<Rational>& h_in)
{
    if (!spec.target->is_projective_space() || spec.target->rank() != 2)
        throw std::invalid_argument("closed form is for the projective line");
    for (const auto& v : spec.reg->variables()) {
        std::string nm = v.name();
        if (nm != "x0" && nm != "x1" && nm != "s-1_1" && nm != "s0_0" && nm != "s0_1" && nm != "q")
            throw std::invalid_argument("closed form does not involve variable " + nm);
    }
    auto qi = spec.reg->q_index();
    if (!qi)
        throw std::invalid_argument("closed form needs the variable q");
    std::vector<Rational> h = h_in.empty() ? cp1_h_sequence(std::max(n, 1)) : h_in;
    if (static_cast<int>(h.size()) < n)
        throw std::invalid_argument("not enough h values");

    QSeries x0 = var_or_zero(spec, "x0"), x1 = var_or_zero(spec, "x1");
    QSeries sm1 = var_or_zero(spec, "s-1_1"), s00 = var_or_zero(spec, "s0_0"), s01 = var_or_zero(spec, "s0_1");
    QSeries e_s00 = exp_series(s00);
    QSeries e_m2 = exp_series(s00.scaled(Rational(-2)));
    QSeries arg = sm1 + e_s00 * (x1 + s01 * x0);

    QSeries out(spec.reg, spec.trunc);
    QSeries s01_pow = QSeries::constant(spec.reg, spec.trunc, Rational(1));
    for (int k = 1; k <= n; ++k) {
        if (k > 1)
            s01_pow = s01_pow * s01 * s01;
        Exponents qe(spec.reg->size(), 0);
        qe[*qi] = k;
        QSeries qk = QSeries::monomial(spec.reg, spec.trunc, qe, Rational(1));
        if (qk.is_zero())
            break;
        QSeries term = e_m2 * qk * exp_series(arg.scaled(Rational(k))) * s01_pow;
        out += term.scaled(h[static_cast<std::size_t>(k - 1)] / factorial(2 * k - 2));
    }
    if (include_h_in) {
        QSeries poly = (x0 * x0 * x1).scaled(Rational(1, 2)) + (x0 * x0 * x0 * s01).scaled(Rational(1, 6));
        out += e_s00 * poly;
    }
    return out;
}

QSeries cp1_penult_residual(int n)
{
    return cp1_penult_residual(n, cp1_h_sequence(std::max(n, 1)));
}

QSeries cp1_penult_residual(int n, const std::vector<Rational>& h)
{
    auto spec = PotentialSpec::make(TargetModel::projective_space(1), {"x0", "x1", "s0_1", "q"}, 3, n);
    spec.trunc.caps[spec.reg->index("s0_1")] = 2 * n + 1;
    QSeries ht = cp1_closed_form_series(n, spec, false, h);
    QSeries h2 = ht.q_log_derivative().q_log_derivative();
    QSeries h3 = h2.q_log_derivative();
    QSeries lhs = h2.partial_derivative("s0_1");
    QSeries s01 = QSeries::variable(spec.reg, spec.trunc, "s0_1");
    QSeries x0 = QSeries::variable(spec.reg, spec.trunc, "x0");
    QSeries rhs = product(product(s01, h2), h3).scaled(Rational(2));
    rhs = sum_aligned(rhs, product(x0, h3));
    return difference(lhs, rhs);
}

std::vector<PdeResidual> cp1_puncture_dilaton_residuals(const QSeries& ht)
{
    const auto& reg = ht.registry();
    for (const char* nm : {"x0", "x1", "s-1_1"})
        if (!reg.find(nm))
            throw std::invalid_argument(std::string("variable ") + nm + " is not active");
    auto ptr = ht.registry_ptr();
    const Truncation& tr = ht.truncation();
    QSeries e_s00 = reg.find("s0_0") ? exp_series(QSeries::variable(ptr, tr, "s0_0"))
                                      : QSeries::constant(ptr, tr, Rational(1));
    QSeries s01 = reg.find("s0_1") ? QSeries::variable(ptr, tr, "s0_1") : QSeries(ptr, tr);
    QSeries ds = ht.partial_derivative("s-1_1");
    std::vector<PdeResidual> out;
    out.push_back({"puncture", difference(ht.partial_derivative("x0"), product(product(e_s00, s01), ds))});
    out.push_back({"dilaton", difference(ht.partial_derivative("x1"), product(e_s00, ds))});
    return out;
}

nlohmann::json series_to_json(const QSeries& s)
{
    nlohmann::json vars = nlohmann::json::array();
    for (const auto& v : s.registry().variables())
        vars.push_back(v.name());
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [e, c] : s.terms())
        terms.push_back({{"exp", e}, {"coef", c.str()}});
    return {{"vars", vars}, {"terms", terms}};
}

} // namespace tautgw
