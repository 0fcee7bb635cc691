#pragma once

/**
 * @file comparison.hpp
 * @brief Comparison of Dirichlet forms for reversible chains on nested state
 * spaces X0 (small) inside X (large).
 *
 * A function f0 on X0 is extended to X through probability measures Q_x on
 * X0 (Q_x = delta_x on X0). Transitions of the large chain are routed
 * through couplings Q_{x,y} of Q_x and Q_y and then along weighted paths of
 * the small chain. Two constants come out:
 *
 *   V_{pi0}(f0) <= C V_pi(f),   C = max_{x in X0} pi0(x)/pi(x)
 *   E_P(f, f)  <= A * E_{P0}(f0, f0)
 *
 * and together 1 - lambda2(P0) >= (1 / (C A)) (1 - lambda2(P)).
 *
 * The engine accepts arbitrary ComparisonData; build_comparison_data()
 * produces the instance relating the four-move walk on F_p to the one on
 * P^1(F_p).
 */

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracwalk/kernels.hpp"

namespace fracwalk {

using Pair = std::pair<std::size_t, std::size_t>;

/// Q_x for every x in X, as atoms over X0 indices.
struct ExtensionMeasures {
    std::vector<std::vector<std::pair<std::size_t, double>>> measure;
};

struct JointAtom {
    std::size_t a;  ///< X0 index
    std::size_t b;  ///< X0 index
    double weight;
};

/// Q_{x,y} for every ordered (x, y) in X with P(x, y) > 0.
struct Coupling {
    std::map<Pair, std::vector<JointAtom>> joint;
};

struct FlowPath {
    std::vector<std::size_t> states;  ///< X0 indices, consecutive P0-edges
    double weight;

    [[nodiscard]] std::size_t length() const noexcept { return states.empty() ? 0 : states.size() - 1; }
};

/// Weighted paths for each (a, b) in X0 x X0 that some coupling charges.
struct Flow {
    std::map<Pair, std::vector<FlowPath>> paths;
};

struct ComparisonData {
    Kernel small;                       ///< P0 on X0
    Kernel large;                       ///< P on X
    Dist small_stationary;              ///< pi0
    Dist large_stationary;              ///< pi
    std::vector<std::size_t> embedding; ///< X0 index -> X index
    ExtensionMeasures ext;
    Coupling coupling;
    Flow flow;

    /// Throws std::invalid_argument naming the first broken invariant:
    /// Q_x = delta_x on X0, unit masses, coupling marginals (1e-12), flow
    /// weights and P0-positive path edges.
    void validate() const;
};

/// 1/2 sum_{x,y} (f(x) - f(y))^2 K(x,y) pi(x).
double dirichlet_form(const Kernel& k, const Dist& pi, std::span<const double> f);

/// 1/2 sum_{x,y} (f(x) - f(y))^2 pi(x) pi(y), i.e. Var_pi(f).
double variance_form(const Dist& pi, std::span<const double> f);

/// Product couplings Q_x (x) Q_y on every edge of `large`.
Coupling independent_coupling(const ExtensionMeasures& ext, const Kernel& large);

/**
 * The F_p / P^1(F_p) instance: X0 = F_p, X = P^1 with infinity at index p,
 * Q_inf uniform on the two finite neighbours b^-1 - a1 and -b^-1 - a1 of
 * infinity, independent couplings, and single-edge paths except for
 * (-a1, -a1), routed -a1 -> b^-1 - a1 -> -a1, and pairs inside
 * {b^-1 - a1, -b^-1 - a1}, routed through -a1.
 * Throws std::invalid_argument when p <= |b|.
 */
ComparisonData build_comparison_data(const WalkParams& params, Modulus m);

/// C = max_{x in X0} pi0(x) / pi(x).
double variance_constant(const ComparisonData& data);

/// Thrown when a pair charged by some coupling has no flow.
class MissingFlowError : public std::invalid_argument {
public:
    explicit MissingFlowError(Pair pair);
    [[nodiscard]] Pair pair() const noexcept { return pair_; }

private:
    Pair pair_;
};

struct DirichletConstant {
    double value = 0.0;
    Pair argmax{0, 0};  ///< X0 edge attaining the supremum
};

/**
 * Three-term supremum over P0-edges (x, y):
 *   1/(P0(x,y) pi0(x)) * sum_{gamma through (x,y)} |gamma| F(gamma) *
 *     [ P(i,o) pi(i) + 2 sum_{b not in X0} Q_b(o) P(i,b) pi(i)
 *       + sum_{a,b not in X0} Q_{a,b}(i,o) P(a,b) pi(a) ]
 * with i, o the endpoints of gamma.
 */
DirichletConstant dirichlet_constant(const ComparisonData& data);

/// f(x) = sum_y Q_x(y) f0(y).
std::vector<double> extend_function(std::span<const double> f0, const ComparisonData& data);

struct ComparisonReport {
    std::uint64_t p = 0;
    double C = 0.0;
    double A = 0.0;
    double u = 0.0;
    double gap_L = 0.0;
    double gap_L0 = 0.0;
    double gap_Q = 0.0;
    bool forms_ok = true;       ///< both form inequalities on every trial
    bool gap_transfer_ok = true;
    bool decomposition_ok = true;
    bool links_ok = true;
    /// First f0 violating a form inequality.
    std::optional<std::vector<double>> witness;

    [[nodiscard]] std::string to_json() const;
};

/**
 * Checks both form inequalities on `trials` random f0 (trial t seeded with
 * seed + t) and the chain
 *   1 - lambda2(Q) >= u (1 - lambda2(L0)) >= (u / (C A)) (1 - lambda2(L))
 * at 1e-8.
 */
ComparisonReport verify_comparison(const StepDist& mu, const WalkParams& params, Modulus m, std::size_t trials,
                                   std::uint64_t seed = 0);

}  // namespace fracwalk
