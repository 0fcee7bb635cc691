#pragma once

/**
 * @file kernels.hpp
 * @brief Sparse row-stochastic transition kernels for the fractional walk and
 * its companion chains.
 *
 * Convention: a Kernel K is row-stochastic, K(x, y) is the probability of
 * moving from x to y, and compose(A, B) runs A first and then B (the matrix
 * product A * B). Under this convention the inversion walk x -> iota(x) + eps
 * is compose(inversion_kernel, step_kernel).
 */

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fracwalk/ffield.hpp"

namespace fracwalk {

/// Thrown when a construction that the theory guarantees to succeed does not.
class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kStochasticTol = 1e-12;

/// Finitely supported law of the integer step.
class StepDist {
public:
    /// Sorts by support value. Rejects duplicates, non-positive masses and
    /// totals further than kStochasticTol from 1.
    StepDist(std::vector<std::int64_t> support, std::vector<double> probs);

    static StepDist uniform(std::vector<std::int64_t> support);
    static StepDist point_mass(std::int64_t at) { return StepDist({at}, {1.0}); }

    [[nodiscard]] std::span<const std::int64_t> support() const noexcept { return support_; }
    [[nodiscard]] std::span<const double> probs() const noexcept { return probs_; }
    [[nodiscard]] std::size_t size() const noexcept { return support_.size(); }

private:
    std::vector<std::int64_t> support_;
    std::vector<double> probs_;
};

/// Two distinct support points and their difference b = a1 - a2.
struct WalkParams {
    std::int64_t a1;
    std::int64_t a2;
    std::int64_t b;

    /// Throws std::invalid_argument when a1 == a2.
    static WalkParams from_pair(std::int64_t a1, std::int64_t a2);
    /// The two heaviest support points, ties going to the smaller integer.
    /// Throws std::invalid_argument on a single-point support.
    static WalkParams from_step(const StepDist& mu);
};

enum class SpaceKind { Fp, P1, SL2 };

std::string_view to_string(SpaceKind kind);

/// Labelled finite index set a kernel lives on.
class StateSpace {
public:
    static StateSpace field(Modulus m);
    static StateSpace projective_line(Modulus m);
    static StateSpace group(Modulus m, std::vector<Mat2> elements);
    /// Used when deserialising a group kernel without element labels.
    static StateSpace unlabeled(SpaceKind kind, std::uint64_t p, std::size_t size);

    [[nodiscard]] SpaceKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::uint64_t prime() const noexcept { return p_; }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    /// Group elements in enumeration order; empty unless kind() == SL2.
    [[nodiscard]] std::span<const Mat2> elements() const noexcept;
    [[nodiscard]] std::string label(std::size_t index) const;

    friend bool operator==(const StateSpace& l, const StateSpace& r) noexcept {
        return l.kind_ == r.kind_ && l.p_ == r.p_ && l.size_ == r.size_;
    }

private:
    StateSpace(SpaceKind k, std::uint64_t p, std::size_t n) : kind_(k), p_(p), size_(n) {}

    SpaceKind kind_;
    std::uint64_t p_;
    std::size_t size_;
    std::shared_ptr<const std::vector<Mat2>> elements_;
};

/// Dense probability vector over a state space.
class Dist {
public:
    /// Checked: entries >= 0 and total within kStochasticTol of 1.
    Dist(StateSpace space, std::vector<double> mass);
    /// No validation; for vectors produced by exact evolution.
    static Dist unchecked(StateSpace space, std::vector<double> mass);
    static Dist point(StateSpace space, std::size_t at);
    static Dist uniform(StateSpace space);

    [[nodiscard]] const StateSpace& space() const noexcept { return space_; }
    [[nodiscard]] std::span<const double> mass() const noexcept { return mass_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return mass_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return mass_.size(); }
    [[nodiscard]] double total() const noexcept;

private:
    struct Unchecked {};
    Dist(Unchecked, StateSpace space, std::vector<double> mass)
        : space_(std::move(space)), mass_(std::move(mass)) {}

    StateSpace space_;
    std::vector<double> mass_;
};

struct Entry {
    std::size_t col;
    double prob;
};

/// Sparse row-stochastic matrix in compressed-row form. Immutable.
class Kernel {
public:
    /// Merges duplicate columns, drops zeros, sorts each row. Throws
    /// std::invalid_argument on negative entries, rows off 1 by more than
    /// row_tol, or a symmetry claim that fails at row_tol.
    Kernel(StateSpace space, std::vector<std::vector<Entry>> rows, bool symmetric = false,
           double row_tol = kStochasticTol);

    static Kernel identity(StateSpace space);

    [[nodiscard]] const StateSpace& space() const noexcept { return space_; }
    [[nodiscard]] std::size_t size() const noexcept { return space_.size(); }
    [[nodiscard]] std::size_t nnz() const noexcept { return cols_.size(); }
    [[nodiscard]] bool is_symmetric() const noexcept { return symmetric_; }

    [[nodiscard]] std::span<const std::size_t> row_cols(std::size_t i) const noexcept {
        return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }
    [[nodiscard]] std::span<const double> row_probs(std::size_t i) const noexcept {
        return {vals_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }
    /// K(i, j) by binary search in row i.
    [[nodiscard]] double at(std::size_t i, std::size_t j) const noexcept;

    /// Row-major N x N copy.
    [[nodiscard]] std::vector<double> to_dense() const;

    /// Largest |K(x,y) - K(y,x)|.
    [[nodiscard]] double asymmetry() const;

private:
    StateSpace space_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> cols_;
    std::vector<double> vals_;
    bool symmetric_ = false;
};

/// Largest entrywise difference; throws std::invalid_argument on mismatched spaces.
double max_abs_diff(const Kernel& lhs, const Kernel& rhs);

/// Runs `first`, then `second`. Throws std::invalid_argument on mismatched spaces.
Kernel compose(const Kernel& first, const Kernel& second);
/// Transpose; only stochastic for doubly stochastic input.
Kernel transpose(const Kernel& k);

/// Law of the step folded onto F_p.
Dist reduce_mod_p(const StepDist& mu, Modulus m);

/// x -> x + eps.
Kernel step_kernel(const StepDist& mu, Modulus m);
/// Deterministic x -> iota(x).
Kernel inversion_kernel(Modulus m);
/// x -> iota(x) + eps: the fractional walk itself.
Kernel walk_kernel(const StepDist& mu, Modulus m);

/**
 * The reversible symmetrisation of the fractional walk: with A the chain
 * "step, invert, step", run A and then its time reversal, i.e. A * A^T.
 * Moves x to iota(iota(x + e1) + e2 - e3) - e4 for independent steps; it is
 * symmetric, doubly stochastic and positive semidefinite. Throws
 * std::invalid_argument when the folded step law has a single atom.
 */
Kernel symmetrized_kernel(const StepDist& mu, Modulus m);

/// Four equiprobable moves on F_p:
/// x +- b and iota(iota(x + a1) +- b) - a1. Symmetric.
Kernel fp_move_kernel(const WalkParams& params, Modulus m);

/// The same four moves on P^1(F_p) with iota_bar. Symmetric, at most four
/// entries per row.
Kernel projective_move_kernel(const WalkParams& params, Modulus m);

/// Right-multiplication walk g -> g s, s uniform over `gens` (as a multiset),
/// on the subgroup they generate, enumerated breadth-first from the
/// identity. `gens` must be closed under inversion.
Kernel cayley_kernel(std::span<const Mat2> gens, Modulus m);

/// Q = u * L0 + (1 - u) * remainder.
struct Decomposition {
    double u;
    Kernel remainder;
};

inline constexpr double kMaxDecompositionWeight = 0.999999;

/**
 * Largest u with Q - u * L0 >= 0 entrywise (capped at
 * kMaxDecompositionWeight) and the normalised remainder. Throws
 * ConstructionError when some edge of L0 is missing from Q (u would be 0).
 */
Decomposition decompose(const Kernel& q, const Kernel& l0);

/// {"space": ..., "p": ..., "rows": [[[col, prob], ...], ...]}
std::string kernel_to_json(const Kernel& k);
Kernel kernel_from_json(std::string_view text);

}  // namespace fracwalk
