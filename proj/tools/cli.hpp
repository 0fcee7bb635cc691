#pragma once

// Command-line front end. run() is the whole program minus process setup so
// that tests can drive it in-process.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fracwalk/kernels.hpp"

namespace fracwalk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolation = 2;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct PrimeSelection {
    std::vector<std::uint64_t> primes;
    /// Integers in the range that are not primes >= 5.
    std::uint64_t skipped = 0;
};

/// "101" or "5..199". A single value must itself be a usable prime.
PrimeSelection parse_primes(std::string_view spec);

/// "u01", "u-101" or "v:prob,v:prob,..." where prob may be a fraction "1/4".
StepDist parse_mu(std::string_view spec);

struct RunConfig {
    std::string subcommand;
    std::string p_spec;
    PrimeSelection primes;
    std::string mu_spec = "u01";
    std::optional<std::int64_t> a1;
    std::optional<std::int64_t> b;
    double eps = 0.25;
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string dump_kernel;
    // mix
    std::size_t steps = 64;
    std::int64_t start = -1;
    // spectrum
    std::vector<std::string> kernels{"Q"};
    // compare
    std::size_t trials = 20;
    // hyperbola
    std::uint64_t m = 0;
    std::uint64_t stride = 1;
    std::optional<std::int64_t> i_start;
    std::optional<std::int64_t> j_start;
    /// argv without program name, --threads, --out and --dump-kernel.
    std::vector<std::string> echo;
};

/// Runs one invocation; args exclude the program name. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracwalk::cli
