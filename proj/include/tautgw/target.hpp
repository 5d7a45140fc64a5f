#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tautgw/rational.hpp"

namespace tautgw {

/// Effective curve class d·[line]; d >= 0.
struct Degree {
    int d = 0;
    explicit Degree(int value);
    friend auto operator<=>(const Degree&, const Degree&) = default;
};

/// A class in H^•(V) written over the basis e_0..e_r.
using CohomologyClass = std::vector<Rational>;

/// Even cohomology ring of the target with its Frobenius data.
///
/// e_0 is the unit. Gradings are real degrees |e_α|. The curve class of
/// unit degree pairs with divisor classes through `beta_pairing`.
class TargetModel {
public:
    static std::shared_ptr<const TargetModel> projective_space(int r);

    struct CustomData {
        std::vector<int> gradings;
        std::vector<std::vector<Rational>> eta;
        // cup[α][β][ν] = c^ν_{αβ}
        std::vector<std::vector<std::vector<Rational>>> cup;
        int c1_degree = 0;
        std::vector<Rational> beta_pairing;  // empty: zero on every class
        // Known Gromov-Witten values used as reconstruction seeds, keyed by
        // (degree, sorted class indices).
        std::map<std::pair<int, std::vector<int>>, Rational> gw_seeds;
    };
    /// Validates unit, symmetry, nondegeneracy, commutativity, associativity,
    /// Frobenius compatibility and evenness; throws std::invalid_argument.
    static std::shared_ptr<const TargetModel> custom(CustomData data);

    static std::shared_ptr<const TargetModel> from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    bool is_projective_space() const { return projective_; }
    /// False only for the point target, where every positive degree is empty.
    bool has_curves() const { return !(projective_ && gradings_.size() == 1); }
    int rank() const { return static_cast<int>(gradings_.size()); }
    int complex_dimension() const { return dim_; }
    int grading(int alpha) const;
    int c1_degree() const { return c1_; }
    const std::vector<int>& gradings() const { return gradings_; }

    const Rational& eta(int a, int b) const;
    const Rational& eta_inverse(int a, int b) const;
    const Rational& cup_coefficient(int nu, int a, int b) const;
    CohomologyClass cup_product(int a, int b) const;
    CohomologyClass multiply(const CohomologyClass& x, int b) const;
    CohomologyClass basis_class(int a) const;

    /// ∫_V γ, i.e. η(γ, e_0).
    Rational integrate(const CohomologyClass& c) const;
    Rational triple_integral(int a, int b, int c) const;

    /// dim M_{0,n}(V, d) = dim V + n - 3 + d·c1; throws when n < 3 and d = 0.
    int moduli_dimension(int n, Degree d) const;
    static bool is_stable(int n, Degree d) { return n >= 3 || d.d > 0; }

    /// ∫_{d·line} e_α for a divisor class; throws for |e_α| != 2.
    Rational integral_over_beta(int alpha, Degree d) const;

    /// Least basis index of grading 2 with nonzero pairing against the line class.
    std::optional<int> divisor_index() const;

    const std::map<std::pair<int, std::vector<int>>, Rational>& gw_seeds() const { return seeds_; }

    /// Stable identity used to key process-wide caches.
    const std::string& identity() const { return identity_; }

private:
    TargetModel() = default;
    void finish();
    void check_index(int a) const;

    bool projective_ = false;
    int dim_ = 0;
    int c1_ = 0;
    std::vector<int> gradings_;
    std::vector<std::vector<Rational>> eta_;
    std::vector<std::vector<Rational>> eta_inv_;
    std::vector<std::vector<std::vector<Rational>>> cup_;
    std::vector<Rational> beta_pairing_;
    std::map<std::pair<int, std::vector<int>>, Rational> seeds_;
    std::string identity_;
};

using TargetPtr = std::shared_ptr<const TargetModel>;

} // namespace tautgw
