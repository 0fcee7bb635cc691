#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "fracwalk/ffield.hpp"

using namespace fracwalk;

namespace {

std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 5; p <= n; ++p) {
        if (is_prime(p)) out.push_back(p);
    }
    return out;
}

}  // namespace

TEST(Modulus, AcceptsOddPrimesFromFive) {
    EXPECT_EQ(Modulus(5).value(), 5u);
    EXPECT_EQ(Modulus(2003).value(), 2003u);
    EXPECT_THROW(Modulus(4), std::invalid_argument);
    EXPECT_THROW(Modulus(3), std::invalid_argument);
    EXPECT_THROW(Modulus(2), std::invalid_argument);
    EXPECT_THROW(Modulus(91), std::invalid_argument);
    EXPECT_THROW(Modulus(kMaxModulus + 2), std::invalid_argument);
}

TEST(Modulus, ReducesNegativesCanonically) {
    const Modulus m(7);
    EXPECT_EQ(m.reduce(-1), 6u);
    EXPECT_EQ(m.reduce(-14), 0u);
    EXPECT_EQ(m.reduce(15), 1u);
}

TEST(IsPrime, MatchesSieve) {
    std::vector<bool> sieve(2000, true);
    sieve[0] = sieve[1] = false;
    for (std::size_t i = 2; i < sieve.size(); ++i) {
        for (std::size_t j = 2 * i; j < sieve.size(); j += i) sieve[j] = false;
    }
    for (std::uint64_t n = 0; n < sieve.size(); ++n) EXPECT_EQ(is_prime(n), sieve[n]) << n;
}

TEST(FpElem, ArithmeticWraps) {
    const Modulus m(7);
    const FpElem a(5, m), b(4, m);
    EXPECT_EQ((a + b).value(), 2u);
    EXPECT_EQ((a - b).value(), 1u);
    EXPECT_EQ((b - a).value(), 6u);
    EXPECT_EQ((a * b).value(), 6u);
    EXPECT_EQ((-a).value(), 2u);
    EXPECT_EQ((-FpElem(0, m)).value(), 0u);
    EXPECT_THROW((void)FpElem(0, m).inverse(), std::domain_error);
}

TEST(Iota, Examples) {
    const Modulus m(7);
    EXPECT_EQ(iota(FpElem(0, m)).value(), 0u);
    EXPECT_EQ(iota(FpElem(1, m)).value(), 1u);
    EXPECT_EQ(iota(FpElem(3, m)).value(), 5u);
}

TEST(Iota, InvolutionAndInverse) {
    for (std::uint64_t p : primes_up_to(199)) {
        const Modulus m(p);
        for (std::uint64_t x = 0; x < p; ++x) {
            const FpElem e(static_cast<std::int64_t>(x), m);
            EXPECT_EQ(iota(iota(e)), e);
            if (x != 0) EXPECT_EQ((e * iota(e)).value(), 1u);
        }
    }
}

TEST(InverseMod, LargeModulus) {
    const std::uint64_t p = kMaxModulus;  // 2^31 - 1 is prime
    for (std::uint64_t x : {std::uint64_t{2}, std::uint64_t{3}, std::uint64_t{12345}, p - 1}) {
        const std::uint64_t y = inverse_mod(x, p);
        EXPECT_EQ((x * y) % p, 1u);
    }
}

TEST(IotaBar, Examples) {
    const Modulus m(5);
    EXPECT_TRUE(iota_bar(ProjPoint::finite(FpElem(0, m))).is_infinity());
    EXPECT_EQ(iota_bar(ProjPoint::infinity(m)), ProjPoint::finite(FpElem(0, m)));
    EXPECT_EQ(iota_bar(ProjPoint::finite(FpElem(2, m))), ProjPoint::finite(FpElem(3, m)));
}

TEST(IotaBar, InvolutionOnProjectiveLine) {
    for (std::uint64_t p : primes_up_to(199)) {
        const Modulus m(p);
        for (std::size_t i = 0; i <= p; ++i) {
            const ProjPoint x = ProjPoint::from_index(i, m);
            EXPECT_EQ(iota_bar(iota_bar(x)), x);
            EXPECT_EQ(x.index(), i);
        }
    }
}

TEST(ProjPoint, InfinityHasNoResidue) {
    const Modulus m(5);
    EXPECT_THROW((void)ProjPoint::infinity(m).residue(), std::logic_error);
    EXPECT_TRUE(ProjPoint::infinity(m).shifted(3).is_infinity());
    EXPECT_EQ(ProjPoint::finite(FpElem(4, m)).shifted(2).index(), 1u);
    std::ostringstream os;
    os << ProjPoint::infinity(m);
    EXPECT_FALSE(os.str().empty());
}

TEST(Mat2, RejectsSingular) {
    const Modulus m(7);
    EXPECT_THROW(Mat2(1, 2, 2, 4, m), std::invalid_argument);
    EXPECT_THROW(Mat2(0, 0, 0, 0, m), std::invalid_argument);
    EXPECT_NO_THROW(Mat2(1, 2, 3, 4, m));
    EXPECT_FALSE(Mat2(2, 0, 0, 1, m).is_special());
}

TEST(MoebiusAct, Examples) {
    const Modulus m(7);
    EXPECT_EQ(moebius_act(Mat2(1, 3, 0, 1, m), ProjPoint::finite(FpElem(4, m))).index(), 0u);
    EXPECT_EQ(moebius_act(Mat2(1, 0, 1, 1, m), ProjPoint::infinity(m)).index(), 1u);
    EXPECT_EQ(moebius_act(Mat2(1, 1, 1, 2, m), ProjPoint::finite(FpElem(6, m))).index(), 0u);
}

TEST(MoebiusAct, AllFourCases) {
    const Modulus m(7);
    const Mat2 upper(2, 3, 0, 1, m);
    EXPECT_TRUE(moebius_act(upper, ProjPoint::infinity(m)).is_infinity());
    const Mat2 full(1, 1, 1, 2, m);
    // c x + d = 0 at x = -2 = 5.
    EXPECT_TRUE(moebius_act(full, ProjPoint::finite(FpElem(5, m))).is_infinity());
    // (x + 1)/(x + 2) at x = 1 is 2/3 = 2 * 5 = 10 = 3.
    EXPECT_EQ(moebius_act(full, ProjPoint::finite(FpElem(1, m))).index(), 3u);
}

TEST(MoebiusAct, GroupActionOnGeneratorPairs) {
    for (std::uint64_t p : primes_up_to(101)) {
        const Modulus m(p);
        const auto gens = generator_set(1, 1, m);
        for (const Mat2& g : gens) {
            for (const Mat2& h : gens) {
                const Mat2 gh = g * h;
                for (std::size_t i = 0; i <= p; ++i) {
                    const ProjPoint x = ProjPoint::from_index(i, m);
                    ASSERT_EQ(moebius_act(gh, x), moebius_act(g, moebius_act(h, x))) << "p=" << p;
                }
            }
        }
    }
}

TEST(MatMul, Examples) {
    const Modulus m(5);
    const Mat2 a(1, 1, 0, 1, m), b(1, 0, 1, 1, m);
    EXPECT_EQ(a * b, Mat2(2, 1, 1, 1, m));
    EXPECT_EQ(a * Mat2::identity(m), a);
    const Mat2 c(2, 3, 1, 3, m), d(3, 1, 2, 2, m);
    EXPECT_EQ((c * d).det(), (c.det() * d.det()) % 5);
    EXPECT_EQ(c * c.inverse(), Mat2::identity(m));
    EXPECT_THROW(mat_mul(a, Mat2::identity(Modulus(7))), std::invalid_argument);
}

TEST(Mat2, KeyIsInjective) {
    const Modulus m(5);
    std::vector<std::uint64_t> keys;
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
            for (int c = 0; c < 5; ++c)
                for (int d = 0; d < 5; ++d) {
                    if ((a * d - b * c) % 5 == 0) continue;
                    keys.push_back(Mat2(a, b, c, d, m).key());
                }
    std::sort(keys.begin(), keys.end());
    EXPECT_EQ(std::adjacent_find(keys.begin(), keys.end()), keys.end());
    EXPECT_EQ(keys.size(), 480u);  // |GL_2(F_5)|
}

TEST(GeneratorSet, Examples) {
    const Modulus m(7);
    const auto g = generator_set(0, 1, m);
    EXPECT_EQ(g[0], Mat2(1, 1, 0, 1, m));
    EXPECT_EQ(g[1], Mat2(1, 0, 1, 1, m));
    EXPECT_EQ(g[2], Mat2(1, 6, 0, 1, m));
    EXPECT_EQ(g[3], Mat2(1, 0, 6, 1, m));
    EXPECT_EQ(generator_set(1, 1, m)[1], Mat2(0, 6, 1, 2, m));
    EXPECT_THROW(generator_set(0, 7, m), std::invalid_argument);
    EXPECT_THROW(generator_set(0, 0, m), std::invalid_argument);
}

TEST(GeneratorSet, SymmetricSpecialPairs) {
    for (std::uint64_t p : primes_up_to(199)) {
        const Modulus m(p);
        for (std::int64_t a1 : {-3, 0, 1, 2}) {
            for (std::int64_t b : {-2, -1, 1, 2}) {
                const auto g = generator_set(a1, b, m);
                for (const Mat2& s : g) EXPECT_TRUE(s.is_special());
                EXPECT_EQ(g[0] * g[2], Mat2::identity(m));
                EXPECT_EQ(g[1] * g[3], Mat2::identity(m));
            }
        }
    }
}

TEST(GeneratorSet, RealisesTheFourProjectiveMoves) {
    for (std::uint64_t p : primes_up_to(199)) {
        const Modulus m(p);
        for (const auto& [a1, b] : {std::pair<std::int64_t, std::int64_t>{0, -1}, {-1, -1}, {1, 1}, {2, 3}}) {
            const auto g = generator_set(a1, b, m);
            for (std::size_t i = 0; i <= p; ++i) {
                const ProjPoint x = ProjPoint::from_index(i, m);
                const auto twist = [&](std::int64_t s) {
                    return iota_bar(iota_bar(x.shifted(a1)).shifted(s)).shifted(-a1);
                };
                ASSERT_EQ(moebius_act(g[0], x), x.shifted(b));
                ASSERT_EQ(moebius_act(g[1], x), twist(b));
                ASSERT_EQ(moebius_act(g[2], x), x.shifted(-b));
                ASSERT_EQ(moebius_act(g[3], x), twist(-b));
            }
        }
    }
}
