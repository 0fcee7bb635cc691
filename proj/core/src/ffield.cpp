#include "fracwalk/ffield.hpp"

#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fracwalk {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2) {
        if (n % d == 0) return false;
    }
    return true;
}

Modulus::Modulus(std::uint64_t p) : p_(p) {
    if (p < 5 || p > kMaxModulus) {
        throw std::invalid_argument("modulus " + std::to_string(p) + " outside [5, 2^31)");
    }
    if (!is_prime(p)) {
        throw std::invalid_argument("modulus " + std::to_string(p) + " is not prime");
    }
}

std::uint64_t Modulus::reduce(std::int64_t k) const noexcept {
    const auto p = static_cast<std::int64_t>(p_);
    std::int64_t r = k % p;
    if (r < 0) r += p;
    return static_cast<std::uint64_t>(r);
}

std::uint64_t inverse_mod(std::uint64_t x, std::uint64_t p) {
    // Extended Euclid on (x, p), tracking only the coefficient of x.
    std::int64_t r0 = static_cast<std::int64_t>(p), r1 = static_cast<std::int64_t>(x % p);
    std::int64_t t0 = 0, t1 = 1;
    if (r1 == 0) throw std::domain_error("zero has no inverse");
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        std::int64_t tmp = r0 - q * r1;
        r0 = r1;
        r1 = tmp;
        tmp = t0 - q * t1;
        t0 = t1;
        t1 = tmp;
    }
    if (r0 != 1) throw std::domain_error("element is not a unit");
    if (t0 < 0) t0 += static_cast<std::int64_t>(p);
    return static_cast<std::uint64_t>(t0);
}

FpElem FpElem::operator+(const FpElem& o) const {
    const std::uint64_t p = mod_.value();
    std::uint64_t s = value_ + o.value_;
    if (s >= p) s -= p;
    return FpElem(Raw{}, s, mod_);
}

FpElem FpElem::operator-(const FpElem& o) const {
    const std::uint64_t p = mod_.value();
    return FpElem(Raw{}, value_ >= o.value_ ? value_ - o.value_ : value_ + p - o.value_, mod_);
}

FpElem FpElem::operator*(const FpElem& o) const {
    return FpElem(Raw{}, (value_ * o.value_) % mod_.value(), mod_);
}

FpElem FpElem::operator-() const {
    return FpElem(Raw{}, value_ == 0 ? 0 : mod_.value() - value_, mod_);
}

FpElem FpElem::inverse() const {
    return FpElem(Raw{}, inverse_mod(value_, mod_.value()), mod_);
}

std::ostream& operator<<(std::ostream& os, const FpElem& x) { return os << x.value(); }

FpElem iota(const FpElem& x) { return x.is_zero() ? x : x.inverse(); }

ProjPoint ProjPoint::from_index(std::size_t idx, Modulus m) {
    if (idx == m.value()) return infinity(m);
    if (idx > m.value()) throw std::out_of_range("projective index out of range");
    return ProjPoint(idx, m, false);
}

FpElem ProjPoint::residue() const {
    if (inf_) throw std::logic_error("infinity has no residue");
    return FpElem(static_cast<std::int64_t>(value_), mod_);
}

ProjPoint ProjPoint::shifted(std::int64_t t) const {
    if (inf_) return *this;
    return finite(residue() + FpElem(t, mod_));
}

std::ostream& operator<<(std::ostream& os, const ProjPoint& x) {
    if (x.is_infinity()) return os << "inf";
    return os << x.residue().value();
}

ProjPoint iota_bar(const ProjPoint& x) {
    if (x.is_infinity()) return ProjPoint::finite(FpElem(0, x.modulus()));
    const FpElem r = x.residue();
    if (r.is_zero()) return ProjPoint::infinity(x.modulus());
    return ProjPoint::finite(r.inverse());
}

Mat2::Mat2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, Modulus m)
    : e_{m.reduce(a), m.reduce(b), m.reduce(c), m.reduce(d)}, mod_(m) {
    if (det() == 0) throw std::invalid_argument("singular matrix " + to_string(*this));
}

std::uint64_t Mat2::det() const noexcept {
    const std::uint64_t p = mod_.value();
    const std::uint64_t ad = (e_[0] * e_[3]) % p;
    const std::uint64_t bc = (e_[1] * e_[2]) % p;
    return ad >= bc ? ad - bc : ad + p - bc;
}

Mat2 Mat2::inverse() const {
    const auto p = mod_.value();
    const auto di = static_cast<std::int64_t>(inverse_mod(det(), p));
    const auto s = [&](std::uint64_t v) { return static_cast<std::int64_t>(v); };
    const auto neg = [&](std::uint64_t v) { return static_cast<std::int64_t>(v == 0 ? 0 : p - v); };
    return Mat2(s((e_[3] * di) % p), s((neg(e_[1]) * di) % p), s((neg(e_[2]) * di) % p),
                s((e_[0] * di) % p), mod_);
}

std::uint64_t Mat2::key() const noexcept {
    const std::uint64_t p = mod_.value();
    return ((e_[0] * p + e_[1]) * p + e_[2]) * p + e_[3];
}

std::ostream& operator<<(std::ostream& os, const Mat2& m) {
    return os << "[[" << m.a() << "," << m.b() << "],[" << m.c() << "," << m.d() << "]]";
}

std::string to_string(const Mat2& m) {
    std::ostringstream os;
    os << m;
    return os.str();
}

Mat2 mat_mul(const Mat2& l, const Mat2& r) {
    if (!(l.modulus() == r.modulus())) throw std::invalid_argument("modulus mismatch in mat_mul");
    const std::uint64_t p = l.modulus().value();
    const auto s = [](std::uint64_t v) { return static_cast<std::int64_t>(v); };
    return Mat2(s((l.a() * r.a() + l.b() * r.c()) % p), s((l.a() * r.b() + l.b() * r.d()) % p),
                s((l.c() * r.a() + l.d() * r.c()) % p), s((l.c() * r.b() + l.d() * r.d()) % p),
                l.modulus());
}

ProjPoint moebius_act(const Mat2& m, const ProjPoint& x) {
    const Modulus& mod = m.modulus();
    const FpElem a(static_cast<std::int64_t>(m.a()), mod), b(static_cast<std::int64_t>(m.b()), mod);
    const FpElem c(static_cast<std::int64_t>(m.c()), mod), d(static_cast<std::int64_t>(m.d()), mod);
    if (x.is_infinity()) {
        if (c.is_zero()) return ProjPoint::infinity(mod);
        return ProjPoint::finite(a * c.inverse());
    }
    const FpElem r = x.residue();
    const FpElem den = c * r + d;
    if (den.is_zero()) return ProjPoint::infinity(mod);
    return ProjPoint::finite((a * r + b) * den.inverse());
}

std::array<Mat2, 4> generator_set(std::int64_t a1, std::int64_t b, Modulus m) {
    if (m.reduce(b) == 0) throw std::invalid_argument("b vanishes modulo p");
    // Reduce before multiplying so large |a1|, |b| cannot overflow.
    const auto A = static_cast<std::int64_t>(m.reduce(a1));
    const auto B = static_cast<std::int64_t>(m.reduce(b));
    const auto p = static_cast<std::int64_t>(m.value());
    const std::int64_t ab = (A * B) % p;
    const std::int64_t aab = (A * ab) % p;
    return {Mat2(1, B, 0, 1, m), Mat2(1 - ab, -aab, B, ab + 1, m), Mat2(1, -B, 0, 1, m),
            Mat2(1 + ab, aab, -B, 1 - ab, m)};
}

}  // namespace fracwalk
