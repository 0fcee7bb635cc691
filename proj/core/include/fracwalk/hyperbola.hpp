#pragma once

// Counting points of the modular hyperbola xy = 1 (mod p) in boxes I x J of
// cyclic intervals, and exhaustive scans of the worst box.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fracwalk/ffield.hpp"

namespace fracwalk {

/// {start, start+1, ..., start+length-1} mod p, 1 <= length <= p.
class Interval {
public:
    Interval(std::int64_t start, std::uint64_t length, Modulus m);

    [[nodiscard]] std::uint64_t start() const noexcept { return start_; }
    [[nodiscard]] std::uint64_t length() const noexcept { return length_; }
    [[nodiscard]] bool contains(std::uint64_t x) const noexcept;

private:
    std::uint64_t start_;
    std::uint64_t length_;
    std::uint64_t p_;
};

/// |{(x, y) in I x J : xy = 1 mod p}|.
std::uint64_t count_solutions(const Interval& i, const Interval& j, Modulus m);

/// {x in I : iota(x) in J}, ascending. Contains 0 when 0 lies in both I and J.
std::vector<std::uint64_t> inverse_preimage(const Interval& i, const Interval& j, Modulus m);

struct ScanRow {
    std::uint64_t i_start;
    std::uint64_t j_start;
    std::uint64_t count;
};

struct ScanReport {
    std::uint64_t p = 0;
    std::uint64_t m = 0;
    std::uint64_t stride = 1;
    std::uint64_t max_count = 0;
    double max_ratio = 0.0;
    /// First (i_start, j_start) in row-major order attaining max_count.
    std::uint64_t argmax_i = 0;
    std::uint64_t argmax_j = 0;
    std::uint64_t boxes = 0;

    [[nodiscard]] std::string to_json() const;
};

/// Maximum of count_solutions / m over starts 0, stride, 2 stride, ... for
/// both intervals. Requires 1 <= m <= p/2 and stride >= 1. When `rows` is
/// non-null every scanned box is appended to it.
ScanReport scan_max_ratio(Modulus m, std::uint64_t length, std::uint64_t stride = 1,
                          std::vector<ScanRow>* rows = nullptr, unsigned threads = 1);

/// "p,m,i_start,j_start,count,ratio" followed by one line per row.
std::string scan_csv(Modulus m, std::uint64_t length, const std::vector<ScanRow>& rows);

/// Largest delta with 20 delta / (1 - delta) <= gamma, i.e. gamma / (20 + gamma).
double implied_delta(double gamma);

}  // namespace fracwalk
