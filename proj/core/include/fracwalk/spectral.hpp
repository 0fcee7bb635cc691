#pragma once

/**
 * @file spectral.hpp
 * @brief Eigenvalues of symmetric kernels, spectral gaps, bottleneck ratios
 * and the containment of a quotient spectrum in its covering spectrum.
 */

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracwalk/kernels.hpp"

namespace fracwalk {

inline constexpr std::size_t kDenseLimit = 4000;
inline constexpr std::size_t kExhaustiveCutLimit = 22;
inline constexpr double kResidualTol = 1e-8;
inline constexpr double kContainmentTol = 1e-7;
/// Eigenvalues above 1 - kUnitTol count as copies of the Perron eigenvalue.
inline constexpr double kUnitTol = 1e-9;

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

enum class EigenMode { Dense, Iterative };

std::string to_string(EigenMode mode);

struct SpectralReport {
    /// Descending. All N values in dense mode, the top k in iterative mode.
    std::vector<double> eigenvalues;
    /// Unit eigenvectors for the leading min(N, max(k, 2)) eigenvalues;
    /// empty when residuals were not requested.
    std::vector<std::vector<double>> vectors;
    double lambda2 = 1.0;
    double gap = 0.0;
    EigenMode method = EigenMode::Dense;
    /// max ||K v - lambda v||_2 over the reported pairs; NaN if not computed.
    double residual = std::numeric_limits<double>::quiet_NaN();
    /// Number of eigenvalues within kUnitTol of 1.
    std::size_t unit_multiplicity = 1;
    /// Set when unit_multiplicity > 1; lambda2 is then 1 and gap 0.
    bool disconnected = false;
    /// Largest eigenvalue below 1 - kUnitTol (NaN if none was computed).
    double lambda_below_one = std::numeric_limits<double>::quiet_NaN();
};

/// Eigen-decomposition of a dense symmetric matrix (row-major, n x n).
/// Values ascending; vectors[i] pairs with values[i] when requested.
struct DenseEigen {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};
DenseEigen dense_symmetric_eigen(std::vector<double> a, std::size_t n, bool want_vectors);

/**
 * Spectrum of a kernel flagged symmetric.
 *
 * Dense mode (N <= kDenseLimit) returns every eigenvalue via Householder
 * tridiagonalisation and implicit QL. Iterative mode returns the top `count`
 * via orthogonal iteration with Rayleigh-Ritz extraction, stopping when every
 * residual is below 1e-10 or after 10 N log N sweeps (ConvergenceError).
 * `count` = 0 means all (dense) or 2 (iterative). With `with_residual`
 * off, dense mode skips eigenvectors entirely.
 */
SpectralReport eigen_sym(const Kernel& k, EigenMode mode = EigenMode::Dense, std::size_t count = 0,
                         bool with_residual = true);

/// 1 - lambda2, dense when possible and iterative beyond kDenseLimit.
double spectral_gap(const Kernel& k);

enum class CutMode { Exhaustive, Sweep };

struct CutReport {
    std::vector<std::size_t> set;
    double ratio = 0.0;
    bool exhaustive = false;
};

/**
 * Bottleneck ratio min_{pi(S) <= 1/2} sum_{x in S, y not in S} K(x,y) / |S|
 * of a symmetric kernel (uniform stationary law). Exhaustive mode enumerates
 * every subset (N <= kExhaustiveCutLimit); sweep mode scans prefix and
 * suffix cuts in the order of the second eigenvector and is an upper bound.
 */
CutReport bottleneck_ratio(const Kernel& k, CutMode mode);

/// Ratio of an explicit set; throws if the set holds more than half the states.
double cut_ratio(const Kernel& k, const std::vector<std::size_t>& set);

struct QuotientReport {
    bool contained = false;
    double worst_mismatch = 0.0;
    /// Quotient eigenvalue realising worst_mismatch.
    double worst_eigenvalue = 0.0;
    double lambda2_quotient = 1.0;
    double lambda2_cover = 1.0;
    std::vector<double> quotient_eigenvalues;
    std::size_t cover_size = 0;
};

/// Every eigenvalue of `quotient` must lie within `tol` of an eigenvalue of
/// `cover`. Both must be dense-solvable.
QuotientReport quotient_spectrum_check(const Kernel& quotient, const Kernel& cover, double tol = kContainmentTol);

/// {"p":..., "kernel":..., "lambda2":..., "gap":..., "method":..., "residual":...}
std::string spectral_report_json(const SpectralReport& report, std::uint64_t p, const std::string& kernel_name);

}  // namespace fracwalk
