#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tautgw/rational.hpp"

namespace tautgw {

// Psi:    ψ_tail^power · ev_tail^*(e_alpha)
// Kappa:  κ_{power, alpha} on the vertex moduli space
// Opaque: a named class of the given complex degree
enum class DecorationKind { Psi, Kappa, Opaque };

struct Decoration {
    DecorationKind kind = DecorationKind::Opaque;
    int tail = 0;
    int power = 0;
    int alpha = 0;
    int degree = 0;
    std::string label;
    bool pushforwardable = false;

    static Decoration psi(int tail, int power, int alpha = 0);
    static Decoration kappa(int level, int alpha);
    static Decoration opaque(std::string label, int degree, bool pushforwardable = false);

    bool is_unit() const;
    bool positive_degree() const;
    std::string str() const;

    friend auto operator<=>(const Decoration&, const Decoration&) = default;
};

struct TreeVertex {
    int beta = 0;
    std::vector<Decoration> decorations;
};

/// Genus-0 stable tree with labeled tails.
class DecoratedTree {
public:
    std::vector<TreeVertex> vertices;
    std::vector<std::pair<int, int>> edges;
    std::map<int, int> tails;  // label -> vertex

    /// Throws std::invalid_argument on a non-tree, an unstable vertex, a
    /// negative degree or a dangling reference.
    void validate() const;

    int total_degree() const;
    int num_tails() const { return static_cast<int>(tails.size()); }
    int valence(int v) const;
    std::vector<int> neighbours(int v) const;
    std::vector<int> tails_at(int v) const;
    bool vertex_stable(int v) const;

    /// Equal for two trees iff they are isomorphic (tails, degrees and
    /// decorations preserved).
    std::string canonical() const;
    long long aut_order() const;

    nlohmann::json to_json() const;
    static DecoratedTree from_json(const nlohmann::json& j);

    static DecoratedTree single_vertex(int beta, std::vector<int> tail_labels);
    /// Vertex 0 carries `first` with degree b1, vertex 1 carries `second` with b2.
    static DecoratedTree two_vertex(int b1, std::vector<int> first, int b2, std::vector<int> second);
};

/// Rational combination of trees keyed by canonical form.
class TreeSum {
public:
    struct Entry {
        DecoratedTree tree;
        Rational coef;
    };

    void add(const DecoratedTree& t, const Rational& c);
    const std::map<std::string, Entry>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    TreeSum& operator+=(const TreeSum& o);
    TreeSum& operator-=(const TreeSum& o);
    friend TreeSum operator+(TreeSum a, const TreeSum& b) { return a += b; }
    friend TreeSum operator-(TreeSum a, const TreeSum& b) { return a -= b; }
    TreeSum scaled(const Rational& c) const;
    friend bool operator==(const TreeSum& a, const TreeSum& b);

    nlohmann::json to_json() const;

private:
    std::map<std::string, Entry> terms_;
};

struct SplitConstraints {
    std::set<int> on_first;
    std::set<int> on_second;
    bool first_exact = false;   // no tails on the first vertex beyond the pinned ones
    bool second_exact = false;  // likewise for the second vertex
};

struct EnumeratedTree {
    DecoratedTree tree;
    long long aut = 1;
};

/// Stable two-vertex trees with tails 1..n and total degree d, up to
/// isomorphism. Pinned tails fix which vertex is "first" (degree β1) and
/// which is "second" (β2).
std::vector<EnumeratedTree> enumerate_two_vertex_divisors(int n, int d, const SplitConstraints& c = {});

/// π_* along the map forgetting tail `label`.
TreeSum forgetful_pushforward(const DecoratedTree& t, int label);

/// π^* adding tail `label`; one term per vertex.
TreeSum forgetful_pullback(const DecoratedTree& t, int label);
std::vector<std::pair<DecoratedTree, Rational>> forgetful_pullback_terms(const DecoratedTree& t, int label);

/// ψ_1^a on M_{0,n}(V,d): tail 1 with the tails J on the β2 vertex, the two
/// reference tails with I on the β1 vertex, and ψ_1^{a-1} on the β2 vertex.
TreeSum psi_boundary_presentation(int n, int d, int a, std::pair<int, int> refs = {2, 3});

/// κ_{a,α} on M_{0,n}(V,d) with reference tails 1 and 2: two-vertex trees
/// with κ_{a-1,α} on the non-reference vertex, plus for a = 0 the terms
/// ev_i^*(e_α) for every non-reference tail i.
TreeSum kappa_boundary_presentation(int n, int d, int a, int alpha);

} // namespace tautgw
