#include "tautgw/target.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace tautgw {

Degree::Degree(int value) : d(value)
{
    if (value < 0)
        throw std::invalid_argument("curve degree must be non-negative");
}

namespace {

Rational parse_rational_json(const nlohmann::json& j)
{
    if (j.is_number_integer())
        return Rational(j.get<long>());
    if (j.is_string())
        return Rational::parse(j.get<std::string>());
    throw std::invalid_argument("expected an integer or a \"p/q\" string");
}

// Inverse of a square rational matrix by Gauss-Jordan; throws when singular.
std::vector<std::vector<Rational>> invert(std::vector<std::vector<Rational>> m)
{
    std::size_t n = m.size();
    std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        inv[i][i] = Rational(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && m[piv][col].is_zero())
            ++piv;
        if (piv == n)
            throw std::invalid_argument("Poincare pairing is degenerate");
        std::swap(m[piv], m[col]);
        std::swap(inv[piv], inv[col]);
        Rational p = m[col][col];
        for (std::size_t k = 0; k < n; ++k) {
            m[col][k] /= p;
            inv[col][k] /= p;
        }
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || m[row][col].is_zero())
                continue;
            Rational f = m[row][col];
            for (std::size_t k = 0; k < n; ++k) {
                m[row][k] -= f * m[col][k];
                inv[row][k] -= f * inv[col][k];
            }
        }
    }
    return inv;
}

} // namespace

std::shared_ptr<const TargetModel> TargetModel::projective_space(int r)
{
    if (r < 0)
        throw std::invalid_argument("projective space dimension must be non-negative");
    auto t = std::shared_ptr<TargetModel>(new TargetModel());
    std::size_t n = static_cast<std::size_t>(r) + 1;
    t->projective_ = true;
    t->c1_ = r + 1;
    t->eta_.assign(n, std::vector<Rational>(n));
    t->cup_.assign(n, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n)));
    for (int a = 0; a <= r; ++a) {
        t->gradings_.push_back(2 * a);
        for (int b = 0; b <= r; ++b) {
            if (a + b == r)
                t->eta_[a][b] = Rational(1);
            if (a + b <= r)
                t->cup_[a][b][a + b] = Rational(1);
        }
    }
    t->beta_pairing_.assign(n, Rational(0));
    if (r >= 1) {
        t->beta_pairing_[1] = Rational(1);
        // ⟨⟩_1 on P^1 and the line through two points on P^r.
        if (r == 1)
            t->seeds_[{1, {}}] = Rational(1);
        else
            t->seeds_[{1, {r, r}}] = Rational(1);
    }
    t->finish();
    return t;
}

std::shared_ptr<const TargetModel> TargetModel::custom(CustomData data)
{
    auto t = std::shared_ptr<TargetModel>(new TargetModel());
    std::size_t n = data.gradings.size();
    if (n == 0)
        throw std::invalid_argument("target needs at least one basis class");
    for (int g : data.gradings)
        if (g < 0 || g % 2 != 0)
            throw std::invalid_argument("odd or negative grading: only even cohomology is supported");
    if (data.gradings[0] != 0)
        throw std::invalid_argument("e_0 must have grading 0");
    if (data.eta.size() != n || data.cup.size() != n)
        throw std::invalid_argument("eta/cup dimensions do not match the basis");
    for (const auto& row : data.eta)
        if (row.size() != n)
            throw std::invalid_argument("eta must be square");
    for (const auto& plane : data.cup) {
        if (plane.size() != n)
            throw std::invalid_argument("cup tensor has wrong shape");
        for (const auto& row : plane)
            if (row.size() != n)
                throw std::invalid_argument("cup tensor has wrong shape");
    }
    if (data.beta_pairing.empty())
        data.beta_pairing.assign(n, Rational(0));
    if (data.beta_pairing.size() != n)
        throw std::invalid_argument("beta_pairing length does not match the basis");
    for (std::size_t a = 0; a < n; ++a)
        if (data.gradings[a] != 2 && !data.beta_pairing[a].is_zero())
            throw std::invalid_argument("only grading-2 classes pair with curve classes");

    t->gradings_ = std::move(data.gradings);
    t->eta_ = std::move(data.eta);
    t->cup_ = std::move(data.cup);
    t->c1_ = data.c1_degree;
    t->beta_pairing_ = std::move(data.beta_pairing);
    t->seeds_ = std::move(data.gw_seeds);
    for (auto& [key, value] : t->seeds_) {
        (void)value;
        if (key.first < 0)
            throw std::invalid_argument("seed with negative degree");
        for (int a : key.second)
            if (a < 0 || static_cast<std::size_t>(a) >= n)
                throw std::invalid_argument("seed refers to a basis index outside the target");
    }
    // Seeds are keyed by sorted class lists.
    std::map<std::pair<int, std::vector<int>>, Rational> sorted;
    for (const auto& [key, value] : t->seeds_) {
        auto cls = key.second;
        std::sort(cls.begin(), cls.end());
        sorted[{key.first, cls}] = value;
    }
    t->seeds_ = std::move(sorted);

    int ni = static_cast<int>(n);
    for (int a = 0; a < ni; ++a)
        for (int b = 0; b < ni; ++b) {
            if (t->eta_[a][b] != t->eta_[b][a])
                throw std::invalid_argument("Poincare pairing is not symmetric");
            for (int nu = 0; nu < ni; ++nu) {
                const Rational& c = t->cup_[a][b][nu];
                if (c != t->cup_[b][a][nu])
                    throw std::invalid_argument("cup product is not commutative");
                if (!c.is_zero() && t->gradings_[nu] != t->gradings_[a] + t->gradings_[b])
                    throw std::invalid_argument("cup product does not respect the grading");
            }
            if (t->cup_[0][b][a] != Rational(a == b ? 1 : 0))
                throw std::invalid_argument("e_0 is not the unit of the cup product");
        }
    t->finish();
    for (int a = 0; a < ni; ++a)
        for (int b = 0; b < ni; ++b)
            for (int c = 0; c < ni; ++c) {
                auto left = t->multiply(t->cup_product(a, b), c);
                auto right = t->multiply(t->cup_product(b, c), a);
                if (left != right)
                    throw std::invalid_argument("cup product is not associative");
                Rational l, rr;
                for (int nu = 0; nu < ni; ++nu) {
                    l += t->cup_[a][b][nu] * t->eta_[nu][c];
                    rr += t->cup_[b][c][nu] * t->eta_[a][nu];
                }
                if (l != rr)
                    throw std::invalid_argument("pairing is not compatible with the cup product");
            }
    return t;
}

void TargetModel::finish()
{
    eta_inv_ = invert(eta_);
    dim_ = *std::max_element(gradings_.begin(), gradings_.end()) / 2;
    std::ostringstream os;
    os << "g";
    for (int g : gradings_)
        os << ":" << g;
    os << "|e";
    for (const auto& row : eta_)
        for (const auto& v : row)
            os << ":" << v;
    os << "|c";
    for (const auto& plane : cup_)
        for (const auto& row : plane)
            for (const auto& v : row)
                os << ":" << v;
    os << "|c1:" << c1_ << "|b";
    for (const auto& v : beta_pairing_)
        os << ":" << v;
    os << "|s";
    for (const auto& [key, value] : seeds_) {
        os << ":" << key.first << "[";
        for (int a : key.second)
            os << a << ",";
        os << "]" << value;
    }
    identity_ = os.str();
}

void TargetModel::check_index(int a) const
{
    if (a < 0 || a >= rank())
        throw std::out_of_range("basis index " + std::to_string(a) + " outside the target");
}

int TargetModel::grading(int alpha) const
{
    check_index(alpha);
    return gradings_[alpha];
}

const Rational& TargetModel::eta(int a, int b) const
{
    check_index(a);
    check_index(b);
    return eta_[a][b];
}

const Rational& TargetModel::eta_inverse(int a, int b) const
{
    check_index(a);
    check_index(b);
    return eta_inv_[a][b];
}

const Rational& TargetModel::cup_coefficient(int nu, int a, int b) const
{
    check_index(nu);
    check_index(a);
    check_index(b);
    return cup_[a][b][nu];
}

CohomologyClass TargetModel::cup_product(int a, int b) const
{
    check_index(a);
    check_index(b);
    return cup_[a][b];
}

CohomologyClass TargetModel::multiply(const CohomologyClass& x, int b) const
{
    check_index(b);
    CohomologyClass out(static_cast<std::size_t>(rank()));
    for (int a = 0; a < rank(); ++a) {
        if (x[a].is_zero())
            continue;
        for (int nu = 0; nu < rank(); ++nu)
            if (!cup_[a][b][nu].is_zero())
                out[nu] += x[a] * cup_[a][b][nu];
    }
    return out;
}

CohomologyClass TargetModel::basis_class(int a) const
{
    check_index(a);
    CohomologyClass c(static_cast<std::size_t>(rank()));
    c[a] = Rational(1);
    return c;
}

Rational TargetModel::integrate(const CohomologyClass& c) const
{
    Rational s;
    for (int a = 0; a < rank(); ++a)
        if (!c[a].is_zero())
            s += c[a] * eta_[a][0];
    return s;
}

Rational TargetModel::triple_integral(int a, int b, int c) const
{
    return integrate(multiply(cup_product(a, b), c));
}

int TargetModel::moduli_dimension(int n, Degree d) const
{
    if (n < 0)
        throw std::invalid_argument("negative number of marked points");
    if (!is_stable(n, d))
        throw std::invalid_argument("moduli space M_{0," + std::to_string(n) + "}(V,0) is unstable");
    return dim_ + n - 3 + d.d * c1_;
}

Rational TargetModel::integral_over_beta(int alpha, Degree d) const
{
    check_index(alpha);
    if (gradings_[alpha] != 2)
        throw std::invalid_argument("only grading-2 classes integrate over curve classes");
    return beta_pairing_[alpha] * Rational(d.d);
}

std::optional<int> TargetModel::divisor_index() const
{
    for (int a = 0; a < rank(); ++a)
        if (gradings_[a] == 2 && !beta_pairing_[a].is_zero())
            return a;
    return std::nullopt;
}

std::shared_ptr<const TargetModel> TargetModel::from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw std::invalid_argument("target config must be an object");
    std::string type = j.value("type", std::string("projective_space"));
    if (type == "projective_space") {
        if (!j.contains("r") || !j["r"].is_number_integer())
            throw std::invalid_argument("projective_space target needs an integer \"r\"");
        return projective_space(j["r"].get<int>());
    }
    if (type != "custom")
        throw std::invalid_argument("unknown target type '" + type + "'");
    CustomData d;
    for (const char* field : {"gradings", "eta", "cup", "c1_degree"})
        if (!j.contains(field))
            throw std::invalid_argument(std::string("custom target missing \"") + field + "\"");
    d.gradings = j["gradings"].get<std::vector<int>>();
    for (const auto& row : j["eta"]) {
        d.eta.emplace_back();
        for (const auto& v : row)
            d.eta.back().push_back(parse_rational_json(v));
    }
    for (const auto& plane : j["cup"]) {
        d.cup.emplace_back();
        for (const auto& row : plane) {
            d.cup.back().emplace_back();
            for (const auto& v : row)
                d.cup.back().back().push_back(parse_rational_json(v));
        }
    }
    d.c1_degree = j["c1_degree"].get<int>();
    if (j.contains("beta_pairing"))
        for (const auto& v : j["beta_pairing"])
            d.beta_pairing.push_back(parse_rational_json(v));
    if (j.contains("gw_seeds"))
        for (const auto& s : j["gw_seeds"])
            d.gw_seeds[{s.at("degree").get<int>(), s.at("classes").get<std::vector<int>>()}] =
                parse_rational_json(s.at("value"));
    return custom(std::move(d));
}

nlohmann::json TargetModel::to_json() const
{
    if (projective_)
        return {{"type", "projective_space"}, {"r", rank() - 1}};
    nlohmann::json j;
    j["type"] = "custom";
    j["gradings"] = gradings_;
    for (const auto& row : eta_) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& v : row)
            r.push_back(v.str());
        j["eta"].push_back(r);
    }
    for (const auto& plane : cup_) {
        nlohmann::json p = nlohmann::json::array();
        for (const auto& row : plane) {
            nlohmann::json r = nlohmann::json::array();
            for (const auto& v : row)
                r.push_back(v.str());
            p.push_back(r);
        }
        j["cup"].push_back(p);
    }
    j["c1_degree"] = c1_;
    for (const auto& v : beta_pairing_)
        j["beta_pairing"].push_back(v.str());
    for (const auto& [key, value] : seeds_)
        j["gw_seeds"].push_back({{"degree", key.first}, {"classes", key.second}, {"value", value.str()}});
    return j;
}

} // namespace tautgw
