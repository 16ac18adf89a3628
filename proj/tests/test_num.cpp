#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cw/num.hpp"

#include <random>

using namespace cw;

TEST_CASE("bigint small arithmetic") {
    CHECK(BigInt(2) + BigInt(3) == BigInt(5));
    CHECK(BigInt(-2) + BigInt(3) == BigInt(1));
    CHECK(BigInt(2) - BigInt(3) == BigInt(-1));
    CHECK(BigInt(-4) * BigInt(-5) == BigInt(20));
    CHECK(BigInt(7) / BigInt(2) == BigInt(3));
    CHECK(BigInt(7) % BigInt(2) == BigInt(1));
    CHECK(BigInt(-7) / BigInt(2) == BigInt(-3));
    CHECK(BigInt(-7) % BigInt(2) == BigInt(-1));
    CHECK(BigInt(0).is_zero());
    CHECK(BigInt(5) > BigInt(3));
    CHECK(BigInt(-5) < BigInt(3));
}

TEST_CASE("bigint large arithmetic round trips") {
    BigInt a = BigInt::from_string("123456789012345678901234567890");
    BigInt b = BigInt::from_string("987654321098765432109876543210");
    CHECK((a * b).to_string() == "121932631137021795226185032733622923332237463801111263526900");
    BigInt q, r;
    BigInt::divmod(b, a, q, r);
    CHECK(q == BigInt(8));
    CHECK(a * q + r == b);
    CHECK(r.to_string() == "9000000000900000000090");
}

TEST_CASE("bigint randomized divmod identity") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        BigInt a(static_cast<long long>(rng() % 1000000007));
        BigInt b(static_cast<long long>(rng() % 37 + 1));
        for (int j = 0; j < 3; ++j) a = a * a + b; // grow multi-limb
        BigInt d(static_cast<long long>(rng() % 999999937 + 1));
        if (i % 3 == 0) d = d * d + a % d;
        BigInt q, r;
        BigInt::divmod(a, d, q, r);
        CHECK(q * d + r == a);
        CHECK(r.abs() < d.abs());
    }
}

TEST_CASE("bigint gcd and isqrt") {
    CHECK(BigInt::gcd(BigInt(12), BigInt(18)) == BigInt(6));
    CHECK(BigInt::gcd(BigInt(-12), BigInt(18)) == BigInt(6));
    CHECK(BigInt::gcd(BigInt(0), BigInt(5)) == BigInt(5));
    bool exact = false;
    BigInt s = BigInt::from_string("152415787532388367501905199875019052100").isqrt(exact);
    CHECK(exact);
    CHECK(s.to_string() == "12345678901234567890");
    BigInt t = BigInt(17).isqrt(exact);
    CHECK(!exact);
    CHECK(t == BigInt(4));
}

TEST_CASE("rational reduction and ordering") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-2, -4) == Rational(1, 2));
    CHECK(Rational(2, -4) == Rational(-1, 2));
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(1, 3) * Rational(3, 5) == Rational(1, 5));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(7, 2).pow(-2) == Rational(4, 49));
    Rational root;
    CHECK(Rational(4, 9).sqrt_exact(root));
    CHECK(root == Rational(2, 3));
    CHECK(!Rational(2, 9).sqrt_exact(root));
    CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("gauss rational arithmetic and i*i = -1") {
    GaussRational i = GaussRational::i();
    CHECK(i * i == GaussRational(-1));
    GaussRational z(Rational(1, 2), Rational(3));
    CHECK(z * z.inverse() == GaussRational(1));
    CHECK(i.pow(4) == GaussRational(1));
    CHECK(i.pow(-1) == -i);
}
