#pragma once

/**
 * @file mixing.hpp
 * @brief Exact evolution of distributions, total variation, entropy and the
 * entropy (lower) and symmetrisation (upper) bounds on the distance to
 * stationarity of the fractional walk.
 *
 * All logarithms are natural.
 */

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fracwalk/kernels.hpp"

namespace fracwalk {

/// d * K^n by n sparse vector-matrix products.
Dist evolve(const Kernel& k, const Dist& d, std::size_t n);

/// Half the l1 distance. Throws std::invalid_argument on mismatched spaces.
double tv_distance(const Dist& lhs, const Dist& rhs);

double entropy(const StepDist& mu);
double entropy(const Dist& d);

struct BoundValue {
    double raw;
    double clamped;  ///< raw clamped to [0, 1]
};

/// 1 - (n H(mu) + log 2) / log p.
BoundValue lower_bound_tv(std::size_t n, Modulus m, const StepDist& mu);

/// (sqrt(p) / 2) * lambda2^((k - 2) / 4). Requires k >= 2 and lambda2 in [0, 1].
double upper_bound_tv(std::size_t k, Modulus m, double lambda2);

struct EntropyGrowth {
    double walk_entropy;  ///< H(K^n(x, .))
    double budget;        ///< n H(mu)
    bool holds;
};

/// Checks H(K^n(x, .)) <= n H(mu) + 1e-9 by exact evolution from x.
EntropyGrowth entropy_growth_check(const Kernel& k, const StepDist& mu, std::size_t x, std::size_t n);

/// Start states used by worst-case searches: every state up to
/// kExactWorstCaseLimit, otherwise 32 deterministic ones.
inline constexpr std::size_t kExactWorstCaseLimit = 2003;
std::vector<std::size_t> worst_case_starts(std::size_t n_states);

/// ceil(64 log2 N).
std::size_t mixing_step_cap(std::size_t n_states);

struct MixingTime {
    std::size_t steps = 0;
    /// Set when the cap was reached; steps is then a lower bound on t_mix.
    bool capped = false;
    /// Start state attaining the maximum.
    std::size_t worst_start = 0;
};

/**
 * Smallest n with TV(K^n(x, .), uniform) <= eps, taking the sup over
 * worst_case_starts() when `worst_case` is set and x = `start` otherwise.
 * Requires a doubly stochastic kernel. `threads` > 1 splits the starts
 * across workers; the result does not depend on it.
 */
MixingTime mixing_time(const Kernel& k, double eps, bool worst_case, std::size_t start = 0, unsigned threads = 1);

/// TV(K^n(x, .), uniform) for n = 0..steps, for one start.
std::vector<double> tv_profile(const Kernel& k, std::size_t start, std::size_t steps);

struct CurvePoint {
    std::size_t n;
    double tv;
    double lower_bound;   ///< raw
    double upper_bound;   ///< NaN for n < 2
};

struct MixingCurve {
    std::uint64_t p = 0;
    /// Start index, or -1 for the sup over worst_case_starts().
    std::int64_t start_state = -1;
    double lambda2 = 1.0;
    std::vector<CurvePoint> points;

    /// First step at which the sandwich lower <= tv <= upper fails (within
    /// 1e-9), or -1.
    [[nodiscard]] std::int64_t first_violation(double tol = 1e-9) const;
    /// "n,tv,lower_bound,upper_bound" then one row per point.
    [[nodiscard]] std::string to_csv() const;
    [[nodiscard]] std::string to_json() const;
};

/**
 * TV curve of the fractional walk for n = 0..steps together with both bounds.
 * `lambda2` is the second eigenvalue of the symmetrised kernel. A negative
 * `start` takes the sup over worst_case_starts().
 */
MixingCurve mixing_curve(const StepDist& mu, Modulus m, double lambda2, std::size_t steps, std::int64_t start = -1,
                         unsigned threads = 1);

}  // namespace fracwalk
