#include "tautgw/trees.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace tautgw {

Decoration Decoration::psi(int tail, int power, int alpha)
{
    if (power < 0 || alpha < 0)
        throw std::invalid_argument("psi decoration needs power >= 0 and alpha >= 0");
    Decoration d;
    d.kind = DecorationKind::Psi;
    d.tail = tail;
    d.power = power;
    d.alpha = alpha;
    d.degree = power;  // plus the degree of e_alpha, which depends on the target
    return d;
}

Decoration Decoration::kappa(int level, int alpha)
{
    if (level < -1 || alpha < 0)
        throw std::invalid_argument("kappa decoration needs level >= -1 and alpha >= 0");
    Decoration d;
    d.kind = DecorationKind::Kappa;
    d.power = level;
    d.alpha = alpha;
    d.degree = level + 1;
    return d;
}

Decoration Decoration::opaque(std::string label, int degree, bool pushforwardable)
{
    Decoration d;
    d.kind = DecorationKind::Opaque;
    d.label = std::move(label);
    d.degree = degree;
    d.pushforwardable = pushforwardable;
    return d;
}

bool Decoration::is_unit() const
{
    switch (kind) {
    case DecorationKind::Psi:
        return power == 0 && alpha == 0;
    case DecorationKind::Kappa:
        return false;
    case DecorationKind::Opaque:
        return degree == 0 && label == "1";
    }
    return false;
}

bool Decoration::positive_degree() const
{
    switch (kind) {
    case DecorationKind::Psi:
        return power > 0 || alpha > 0;
    case DecorationKind::Kappa:
        return true;
    case DecorationKind::Opaque:
        return degree > 0;
    }
    return true;
}

std::string Decoration::str() const
{
    switch (kind) {
    case DecorationKind::Psi:
        return "psi" + std::to_string(tail) + "^" + std::to_string(power) + "e" + std::to_string(alpha);
    case DecorationKind::Kappa:
        return "kappa" + std::to_string(power) + "," + std::to_string(alpha);
    case DecorationKind::Opaque:
        return label + "#" + std::to_string(degree) + (pushforwardable ? "*" : "");
    }
    return "?";
}

// ---- DecoratedTree -------------------------------------------------------

void DecoratedTree::validate() const
{
    int nv = static_cast<int>(vertices.size());
    if (nv == 0)
        throw std::invalid_argument("tree without vertices");
    if (static_cast<int>(edges.size()) != nv - 1)
        throw std::invalid_argument("a tree needs exactly |V|-1 edges");
    for (const auto& v : vertices)
        if (v.beta < 0)
            throw std::invalid_argument("negative vertex degree");
    std::vector<int> comp(static_cast<std::size_t>(nv));
    std::iota(comp.begin(), comp.end(), 0);
    std::function<int(int)> find = [&](int x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= nv || b >= nv || a == b)
            throw std::invalid_argument("edge with a bad endpoint");
        int ra = find(a), rb = find(b);
        if (ra == rb)
            throw std::invalid_argument("edges form a cycle");
        comp[ra] = rb;
    }
    for (auto [label, v] : tails) {
        if (label < 1)
            throw std::invalid_argument("tail labels must be positive");
        if (v < 0 || v >= nv)
            throw std::invalid_argument("tail attached to a missing vertex");
    }
    for (int v = 0; v < nv; ++v) {
        if (!vertex_stable(v))
            throw std::invalid_argument("vertex " + std::to_string(v) + " is unstable");
        for (const auto& d : vertices[v].decorations)
            if (d.kind == DecorationKind::Psi) {
                auto it = tails.find(d.tail);
                if (it == tails.end() || it->second != v)
                    throw std::invalid_argument("psi decoration on a tail not at its vertex");
            }
    }
}

int DecoratedTree::total_degree() const
{
    int s = 0;
    for (const auto& v : vertices)
        s += v.beta;
    return s;
}

int DecoratedTree::valence(int v) const
{
    int c = 0;
    for (auto [a, b] : edges)
        c += (a == v) + (b == v);
    for (const auto& kv : tails)
        c += kv.second == v;
    return c;
}

std::vector<int> DecoratedTree::neighbours(int v) const
{
    std::vector<int> out;
    for (auto [a, b] : edges) {
        if (a == v)
            out.push_back(b);
        else if (b == v)
            out.push_back(a);
    }
    return out;
}

std::vector<int> DecoratedTree::tails_at(int v) const
{
    std::vector<int> out;
    for (auto [label, w] : tails)
        if (w == v)
            out.push_back(label);
    return out;
}

bool DecoratedTree::vertex_stable(int v) const
{
    return vertices[static_cast<std::size_t>(v)].beta > 0 || valence(v) >= 3;
}

namespace {

struct Rooted {
    std::string code;
    long long aut = 1;
};

Rooted encode(const DecoratedTree& t, int v, int parent)
{
    const auto& vx = t.vertices[static_cast<std::size_t>(v)];
    std::string s = "(" + std::to_string(vx.beta) + "|";
    for (int label : t.tails_at(v))
        s += std::to_string(label) + ",";
    s += "|";
    std::vector<std::string> dec;
    for (const auto& d : vx.decorations)
        dec.push_back(d.str());
    std::sort(dec.begin(), dec.end());
    for (const auto& d : dec)
        s += d + ";";
    s += "|";
    std::vector<Rooted> kids;
    for (int w : t.neighbours(v))
        if (w != parent)
            kids.push_back(encode(t, w, v));
    std::sort(kids.begin(), kids.end(), [](const Rooted& a, const Rooted& b) { return a.code < b.code; });
    long long aut = 1;
    for (std::size_t i = 0; i < kids.size();) {
        std::size_t j = i;
        while (j < kids.size() && kids[j].code == kids[i].code) {
            aut *= kids[j].aut;
            s += kids[j].code;
            ++j;
        }
        for (long long k = 2; k <= static_cast<long long>(j - i); ++k)
            aut *= k;
        i = j;
    }
    return {s + ")", aut};
}

} // namespace

std::string DecoratedTree::canonical() const
{
    std::string best;
    for (int v = 0; v < static_cast<int>(vertices.size()); ++v) {
        auto r = encode(*this, v, -1);
        if (v == 0 || r.code < best)
            best = std::move(r.code);
    }
    return best;
}

long long DecoratedTree::aut_order() const
{
    std::vector<Rooted> all;
    for (int v = 0; v < static_cast<int>(vertices.size()); ++v)
        all.push_back(encode(*this, v, -1));
    auto best = std::min_element(all.begin(), all.end(), [](const Rooted& a, const Rooted& b) { return a.code < b.code; });
    long long orbit = std::count_if(all.begin(), all.end(), [&](const Rooted& r) { return r.code == best->code; });
    return best->aut * orbit;
}

namespace {

nlohmann::json decoration_json(const Decoration& d)
{
    switch (d.kind) {
    case DecorationKind::Psi:
        return {{"kind", "psi"}, {"tail", d.tail}, {"power", d.power}, {"alpha", d.alpha}};
    case DecorationKind::Kappa:
        return {{"kind", "kappa"}, {"level", d.power}, {"alpha", d.alpha}};
    case DecorationKind::Opaque:
        return {{"kind", "opaque"}, {"label", d.label}, {"degree", d.degree}, {"pushforwardable", d.pushforwardable}};
    }
    return {};
}

Decoration decoration_from_json(const nlohmann::json& j)
{
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "psi")
        return Decoration::psi(j.at("tail").get<int>(), j.value("power", 0), j.value("alpha", 0));
    if (kind == "kappa")
        return Decoration::kappa(j.at("level").get<int>(), j.at("alpha").get<int>());
    if (kind == "opaque")
        return Decoration::opaque(j.at("label").get<std::string>(), j.value("degree", 0), j.value("pushforwardable", false));
    throw std::invalid_argument("unknown decoration kind '" + kind + "'");
}

} // namespace

nlohmann::json DecoratedTree::to_json() const
{
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& v : vertices) {
        nlohmann::json dec = nlohmann::json::array();
        for (const auto& d : v.decorations)
            dec.push_back(decoration_json(d));
        vs.push_back({{"beta", v.beta}, {"decor", dec}});
    }
    nlohmann::json es = nlohmann::json::array();
    for (auto [a, b] : edges)
        es.push_back({a, b});
    nlohmann::json ts = nlohmann::json::array();
    for (auto [label, v] : tails)
        ts.push_back({{"label", label}, {"vertex", v}});
    return {{"vertices", vs}, {"edges", es}, {"tails", ts}};
}

DecoratedTree DecoratedTree::from_json(const nlohmann::json& j)
{
    DecoratedTree t;
    for (const auto& v : j.at("vertices")) {
        TreeVertex tv;
        tv.beta = v.value("beta", 0);
        if (v.contains("decor"))
            for (const auto& d : v.at("decor"))
                tv.decorations.push_back(decoration_from_json(d));
        t.vertices.push_back(std::move(tv));
    }
    for (const auto& e : j.value("edges", nlohmann::json::array()))
        t.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    for (const auto& tl : j.value("tails", nlohmann::json::array())) {
        int label = tl.at("label").get<int>();
        if (!t.tails.emplace(label, tl.at("vertex").get<int>()).second)
            throw std::invalid_argument("duplicate tail label " + std::to_string(label));
    }
    t.validate();
    return t;
}

DecoratedTree DecoratedTree::single_vertex(int beta, std::vector<int> tail_labels)
{
    DecoratedTree t;
    t.vertices.push_back({beta, {}});
    for (int l : tail_labels)
        t.tails[l] = 0;
    return t;
}

DecoratedTree DecoratedTree::two_vertex(int b1, std::vector<int> first, int b2, std::vector<int> second)
{
    DecoratedTree t;
    t.vertices.push_back({b1, {}});
    t.vertices.push_back({b2, {}});
    t.edges.emplace_back(0, 1);
    for (int l : first)
        t.tails[l] = 0;
    for (int l : second)
        t.tails[l] = 1;
    return t;
}

// ---- TreeSum --------------------------------------------------------------

void TreeSum::add(const DecoratedTree& t, const Rational& c)
{
    if (c.is_zero())
        return;
    std::string key = t.canonical();
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(std::move(key), Entry{t, c});
        return;
    }
    it->second.coef += c;
    if (it->second.coef.is_zero())
        terms_.erase(it);
}

TreeSum& TreeSum::operator+=(const TreeSum& o)
{
    for (const auto& [k, e] : o.terms_)
        add(e.tree, e.coef);
    return *this;
}

TreeSum& TreeSum::operator-=(const TreeSum& o)
{
    for (const auto& [k, e] : o.terms_)
        add(e.tree, -e.coef);
    return *this;
}

TreeSum TreeSum::scaled(const Rational& c) const
{
    TreeSum r;
    for (const auto& [k, e] : terms_)
        r.add(e.tree, e.coef * c);
    return r;
}

bool operator==(const TreeSum& a, const TreeSum& b)
{
    if (a.terms_.size() != b.terms_.size())
        return false;
    for (const auto& [k, e] : a.terms_) {
        auto it = b.terms_.find(k);
        if (it == b.terms_.end() || it->second.coef != e.coef)
            return false;
    }
    return true;
}

nlohmann::json TreeSum::to_json() const
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [k, e] : terms_)
        out.push_back({{"coef", e.coef.str()}, {"tree", e.tree.to_json()}});
    return out;
}

// ---- enumeration -----------------------------------------------------------

std::vector<EnumeratedTree> enumerate_two_vertex_divisors(int n, int d, const SplitConstraints& c)
{
    if (n < 0 || d < 0)
        throw std::invalid_argument("enumeration needs n >= 0 and d >= 0");
    if (n > 24)
        throw std::invalid_argument("too many tails to enumerate splits");
    for (int l : c.on_first)
        if (l < 1 || l > n || c.on_second.count(l))
            throw std::invalid_argument("bad pin for tail " + std::to_string(l));
    for (int l : c.on_second)
        if (l < 1 || l > n)
            throw std::invalid_argument("bad pin for tail " + std::to_string(l));

    std::vector<EnumeratedTree> out;
    std::set<std::string> seen;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> first, second;
        bool ok = true;
        for (int l = 1; l <= n; ++l) {
            bool in_second = mask & (1u << (l - 1));
            if (in_second) {
                second.push_back(l);
                if (c.on_first.count(l) || (c.second_exact && !c.on_second.count(l)))
                    ok = false;
            } else {
                first.push_back(l);
                if (c.on_second.count(l) || (c.first_exact && !c.on_first.count(l)))
                    ok = false;
            }
        }
        if (!ok)
            continue;
        for (int b2 = 0; b2 <= d; ++b2) {
            int b1 = d - b2;
            if (b1 == 0 && first.size() + 1 < 3)
                continue;
            if (b2 == 0 && second.size() + 1 < 3)
                continue;
            auto t = DecoratedTree::two_vertex(b1, first, b2, second);
            if (seen.insert(t.canonical()).second)
                out.push_back({t, t.aut_order()});
        }
    }
    return out;
}

// ---- push and pull ---------------------------------------------------------

namespace {

DecoratedTree remove_vertex(const DecoratedTree& t, int w)
{
    DecoratedTree r;
    std::vector<int> remap(t.vertices.size(), -1);
    for (int v = 0, k = 0; v < static_cast<int>(t.vertices.size()); ++v)
        if (v != w) {
            remap[static_cast<std::size_t>(v)] = k++;
            r.vertices.push_back(t.vertices[static_cast<std::size_t>(v)]);
        }
    for (auto [a, b] : t.edges)
        if (a != w && b != w)
            r.edges.emplace_back(remap[static_cast<std::size_t>(a)], remap[static_cast<std::size_t>(b)]);
    for (auto [label, v] : t.tails)
        if (v != w)
            r.tails[label] = remap[static_cast<std::size_t>(v)];
    return r;
}

} // namespace

TreeSum forgetful_pushforward(const DecoratedTree& t, int label)
{
    t.validate();
    auto it = t.tails.find(label);
    if (it == t.tails.end())
        throw std::invalid_argument("tree has no tail " + std::to_string(label));
    int w = it->second;
    const auto& wv = t.vertices[static_cast<std::size_t>(w)];
    TreeSum out;

    if (wv.beta > 0 || t.valence(w) > 3) {
        DecoratedTree r = t;
        r.tails.erase(label);
        auto& decs = r.vertices[static_cast<std::size_t>(w)].decorations;
        std::vector<std::size_t> push;
        for (std::size_t i = 0; i < decs.size(); ++i) {
            const auto& d = decs[i];
            if ((d.kind == DecorationKind::Psi && d.tail == label) ||
                (d.kind == DecorationKind::Opaque && d.pushforwardable))
                push.push_back(i);
        }
        // Without a class living on the fibre the push-forward vanishes.
        if (push.empty())
            return out;
        if (push.size() > 1)
            throw std::invalid_argument("more than one decoration to push forward at one vertex");
        Decoration& d = decs[push.front()];
        if (d.kind == DecorationKind::Psi)
            d = Decoration::kappa(d.power - 1, d.alpha);
        else
            d = Decoration::opaque("push(" + d.label + ")", d.degree - 1, false);
        r.validate();
        out.add(r, Rational(t.aut_order(), r.aut_order()));
        return out;
    }

    for (const auto& d : wv.decorations)
        if (d.positive_degree())
            return out;
    if (t.vertices.size() == 1)
        throw std::invalid_argument("forgetting a point of M_{0,3}(V,0) leaves no stable space");

    std::vector<int> other_tails;
    for (int l : t.tails_at(w))
        if (l != label)
            other_tails.push_back(l);
    auto nb = t.neighbours(w);
    DecoratedTree r;
    if (nb.size() == 1) {
        // tail j and one edge: j moves to the neighbour
        int u = nb.front();
        DecoratedTree tmp = t;
        tmp.tails.erase(label);
        tmp.tails[other_tails.front()] = u;
        r = remove_vertex(tmp, w);
    } else {
        int u = nb[0], u2 = nb[1];
        DecoratedTree tmp = t;
        tmp.tails.erase(label);
        tmp.edges.emplace_back(u, u2);
        r = remove_vertex(tmp, w);
    }
    r.validate();
    out.add(r, Rational(t.aut_order(), r.aut_order()));
    return out;
}

std::vector<std::pair<DecoratedTree, Rational>> forgetful_pullback_terms(const DecoratedTree& t, int label)
{
    t.validate();
    if (t.tails.count(label))
        throw std::invalid_argument("tail " + std::to_string(label) + " already present");
    if (label < 1)
        throw std::invalid_argument("tail labels must be positive");
    std::vector<std::pair<DecoratedTree, Rational>> out;
    long long aut = t.aut_order();
    for (int v = 0; v < static_cast<int>(t.vertices.size()); ++v) {
        DecoratedTree r = t;
        r.tails[label] = v;
        out.emplace_back(r, Rational(r.aut_order(), aut));
    }
    return out;
}

TreeSum forgetful_pullback(const DecoratedTree& t, int label)
{
    TreeSum s;
    for (auto& [tree, c] : forgetful_pullback_terms(t, label))
        s.add(tree, c);
    return s;
}

// ---- presentations ---------------------------------------------------------

namespace {

template <class F>
void for_each_subset(const std::vector<int>& items, F&& f)
{
    std::size_t n = items.size();
    for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
        std::vector<int> in, out;
        for (std::size_t i = 0; i < n; ++i)
            (mask & (1ul << i) ? in : out).push_back(items[i]);
        f(in, out);
    }
}

std::vector<int> concat(std::vector<int> a, const std::vector<int>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

} // namespace

TreeSum psi_boundary_presentation(int n, int d, int a, std::pair<int, int> refs)
{
    if (a < 1)
        throw std::invalid_argument("psi presentation needs a >= 1");
    if (n < 3)
        throw std::invalid_argument("psi presentation needs at least three tails");
    if (d < 0)
        throw std::invalid_argument("negative degree");
    auto [r1, r2] = refs;
    if (r1 == r2 || r1 == 1 || r2 == 1 || r1 < 1 || r2 < 1 || r1 > n || r2 > n)
        throw std::invalid_argument("reference tails must be two distinct tails other than 1");
    std::vector<int> others;
    for (int l = 2; l <= n; ++l)
        if (l != r1 && l != r2)
            others.push_back(l);
    TreeSum s;
    for_each_subset(others, [&](const std::vector<int>& j, const std::vector<int>& i) {
        for (int b2 = 0; b2 <= d; ++b2) {
            if (b2 == 0 && j.empty())
                continue;
            auto t = DecoratedTree::two_vertex(d - b2, concat({r1, r2}, i), b2, concat({1}, j));
            if (a >= 2)
                t.vertices[1].decorations.push_back(Decoration::psi(1, a - 1, 0));
            s.add(t, Rational(1));
        }
    });
    return s;
}

TreeSum kappa_boundary_presentation(int n, int d, int a, int alpha)
{
    if (a < 0)
        throw std::invalid_argument("kappa presentation needs a >= 0");
    if (n < 2)
        throw std::invalid_argument("kappa presentation needs at least two tails");
    if (d < 0 || alpha < 0)
        throw std::invalid_argument("negative degree or class index");
    std::vector<int> others;
    for (int l = 3; l <= n; ++l)
        others.push_back(l);
    TreeSum s;
    for_each_subset(others, [&](const std::vector<int>& j, const std::vector<int>& i) {
        for (int b2 = 0; b2 <= d; ++b2) {
            if (b2 == 0 && j.size() < 2)
                continue;
            auto t = DecoratedTree::two_vertex(d - b2, concat({1, 2}, i), b2, j);
            t.vertices[1].decorations.push_back(Decoration::kappa(a - 1, alpha));
            s.add(t, Rational(1));
        }
    });
    if (a == 0) {
        std::vector<int> all;
        for (int l = 1; l <= n; ++l)
            all.push_back(l);
        for (int l : others) {
            auto t = DecoratedTree::single_vertex(d, all);
            t.vertices[0].decorations.push_back(Decoration::psi(l, 0, alpha));
            s.add(t, Rational(1));
        }
    }
    return s;
}

} // namespace tautgw
