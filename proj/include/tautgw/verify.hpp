#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tautgw/correlators.hpp"

namespace tautgw {

struct VerifyOptions {
    std::optional<int> r;  // projective space dimension; each suite has its own default set
    int qmax = 3;
    int samples = 50;
    std::uint64_t seed = 20240601;
    int cp1_n = 12;
    int cp1_pde_q = 6;
    int max_degree = 3;
    int jobs = 1;
};

struct SuiteReport {
    std::string name;
    bool passed = true;
    std::vector<std::string> lines;
    std::uint64_t seed = 0;
};

const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite.
SuiteReport run_suite(const std::string& name, const VerifyOptions& opts);

/// A correlator passing the selection rule with degree <= max_degree and at
/// most max_points τ insertions.
CorrelatorKey random_admissible_key(const TargetPtr& target, int max_degree, std::mt19937_64& rng,
                                    int max_points = 5);

struct RelationCheck {
    std::string relation;  // "psi", "kappa", "kappa0" or "pullback"
    std::string detail;
    Rational lhs;
    Rational rhs;
    bool holds() const { return lhs == rhs; }
};

/// Both sides of every relation that applies to the key, with pivots and
/// co-pivots drawn from rng.
std::vector<RelationCheck> check_relations(const CorrelatorKey& key, std::mt19937_64& rng);

} // namespace tautgw
