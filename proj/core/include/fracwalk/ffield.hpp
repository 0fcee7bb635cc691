#pragma once

/**
 * @file ffield.hpp
 * @brief Arithmetic over F_p, the projective line P^1(F_p) and 2x2 matrices
 * acting on it by linear fractional transformations.
 *
 * Residues are stored canonically in [0, p). The projective line is indexed
 * contiguously: finite points 0..p-1 keep their residue as index and the
 * point at infinity takes index p.
 */

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace fracwalk {

/// Largest modulus accepted; keeps residue products inside 64 bits.
inline constexpr std::uint64_t kMaxModulus = (std::uint64_t{1} << 31) - 1;

bool is_prime(std::uint64_t n);

/// An odd prime p >= 5. Construction throws std::invalid_argument otherwise.
class Modulus {
public:
    explicit Modulus(std::uint64_t p);

    [[nodiscard]] std::uint64_t value() const noexcept { return p_; }

    /// Canonical representative of an arbitrary signed integer.
    [[nodiscard]] std::uint64_t reduce(std::int64_t k) const noexcept;

    friend bool operator==(const Modulus&, const Modulus&) = default;

private:
    std::uint64_t p_;
};

class FpElem {
public:
    FpElem(std::int64_t k, Modulus m) : value_(m.reduce(k)), mod_(m) {}

    [[nodiscard]] std::uint64_t value() const noexcept { return value_; }
    [[nodiscard]] const Modulus& modulus() const noexcept { return mod_; }
    [[nodiscard]] bool is_zero() const noexcept { return value_ == 0; }

    FpElem operator+(const FpElem& o) const;
    FpElem operator-(const FpElem& o) const;
    FpElem operator*(const FpElem& o) const;
    FpElem operator-() const;

    /// Multiplicative inverse; throws std::domain_error on zero.
    [[nodiscard]] FpElem inverse() const;

    friend bool operator==(const FpElem&, const FpElem&) = default;

private:
    struct Raw {};
    FpElem(Raw, std::uint64_t v, Modulus m) : value_(v), mod_(m) {}

    std::uint64_t value_;
    Modulus mod_;
};

std::ostream& operator<<(std::ostream& os, const FpElem& x);

/// Inverse of a unit modulo p by the extended Euclidean algorithm.
std::uint64_t inverse_mod(std::uint64_t x, std::uint64_t p);

/// Fractional inversion on F_p: 1/x for x != 0 and 0 -> 0.
FpElem iota(const FpElem& x);

/// A point of P^1(F_p): either a finite residue or infinity.
class ProjPoint {
public:
    static ProjPoint finite(const FpElem& x) { return ProjPoint(x.value(), x.modulus(), false); }
    static ProjPoint infinity(Modulus m) { return ProjPoint(0, m, true); }
    /// Inverse of index(): 0..p-1 finite, p is infinity.
    static ProjPoint from_index(std::size_t idx, Modulus m);

    [[nodiscard]] bool is_infinity() const noexcept { return inf_; }
    /// Residue of a finite point; throws std::logic_error at infinity.
    [[nodiscard]] FpElem residue() const;
    [[nodiscard]] std::size_t index() const noexcept {
        return inf_ ? static_cast<std::size_t>(mod_.value()) : static_cast<std::size_t>(value_);
    }
    [[nodiscard]] const Modulus& modulus() const noexcept { return mod_; }

    /// Translation x -> x + t; infinity is fixed.
    [[nodiscard]] ProjPoint shifted(std::int64_t t) const;

    friend bool operator==(const ProjPoint&, const ProjPoint&) = default;

private:
    ProjPoint(std::uint64_t v, Modulus m, bool inf) : value_(v), mod_(m), inf_(inf) {}

    std::uint64_t value_;
    Modulus mod_;
    bool inf_;
};

std::ostream& operator<<(std::ostream& os, const ProjPoint& x);

/// Inversion on P^1: 1/x away from {0, inf}, swapping 0 and inf.
ProjPoint iota_bar(const ProjPoint& x);

/// Invertible 2x2 matrix over F_p, row-major [[a, b], [c, d]].
class Mat2 {
public:
    /// Throws std::invalid_argument if the determinant vanishes.
    Mat2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, Modulus m);
    static Mat2 identity(Modulus m) { return Mat2(1, 0, 0, 1, m); }

    [[nodiscard]] std::uint64_t a() const noexcept { return e_[0]; }
    [[nodiscard]] std::uint64_t b() const noexcept { return e_[1]; }
    [[nodiscard]] std::uint64_t c() const noexcept { return e_[2]; }
    [[nodiscard]] std::uint64_t d() const noexcept { return e_[3]; }
    [[nodiscard]] const Modulus& modulus() const noexcept { return mod_; }

    [[nodiscard]] std::uint64_t det() const noexcept;
    [[nodiscard]] bool is_special() const noexcept { return det() == 1; }
    [[nodiscard]] Mat2 inverse() const;

    /// Packs the entries into one integer, injective for a fixed modulus.
    [[nodiscard]] std::uint64_t key() const noexcept;

    friend bool operator==(const Mat2&, const Mat2&) = default;

private:
    std::array<std::uint64_t, 4> e_;
    Modulus mod_;
};

std::ostream& operator<<(std::ostream& os, const Mat2& m);
std::string to_string(const Mat2& m);

/// Matrix product mod p; throws std::invalid_argument on modulus mismatch.
Mat2 mat_mul(const Mat2& lhs, const Mat2& rhs);
inline Mat2 operator*(const Mat2& lhs, const Mat2& rhs) { return mat_mul(lhs, rhs); }

/// Linear fractional action x -> (ax + b) / (cx + d) on P^1(F_p).
ProjPoint moebius_act(const Mat2& m, const ProjPoint& x);

/**
 * The symmetric generating set realising the four moves of the projective
 * walk:
 *   x + b,  iota_bar(iota_bar(x + a1) + b) - a1,  x - b,
 *   iota_bar(iota_bar(x + a1) - b) - a1.
 * Entries 0/2 and 1/3 are mutually inverse. Throws std::invalid_argument
 * if b = 0 mod p.
 */
std::array<Mat2, 4> generator_set(std::int64_t a1, std::int64_t b, Modulus m);

}  // namespace fracwalk
