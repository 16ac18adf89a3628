#pragma once

#include <cstdint>
#include <string>
#include <vector>
#include <compare>
#include <functional>
#include <stdexcept>

namespace cw {

/// Arbitrary-precision signed integer. Little-endian 64-bit limbs,
/// sign-magnitude, no trailing zero limbs, zero has empty magnitude.
class BigInt {
public:
    BigInt() = default;
    BigInt(long long v);
    static BigInt from_string(const std::string& s);

    bool is_zero() const { return mag_.empty(); }
    bool is_one() const { return sign_ == 1 && mag_.size() == 1 && mag_[0] == 1; }
    bool is_neg() const { return sign_ < 0; }
    bool is_even() const { return mag_.empty() || (mag_[0] & 1) == 0; }
    int sign() const { return sign_; }

    BigInt operator-() const;
    BigInt abs() const;

    friend BigInt operator+(const BigInt& a, const BigInt& b);
    friend BigInt operator-(const BigInt& a, const BigInt& b);
    friend BigInt operator*(const BigInt& a, const BigInt& b);
    /// Truncated division (C semantics). Throws on division by zero.
    friend BigInt operator/(const BigInt& a, const BigInt& b);
    friend BigInt operator%(const BigInt& a, const BigInt& b);
    BigInt& operator+=(const BigInt& b) { *this = *this + b; return *this; }
    BigInt& operator-=(const BigInt& b) { *this = *this - b; return *this; }
    BigInt& operator*=(const BigInt& b) { *this = *this * b; return *this; }

    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);

    friend bool operator==(const BigInt& a, const BigInt& b);
    friend std::strong_ordering operator<=>(const BigInt& a, const BigInt& b);

    static BigInt gcd(BigInt a, BigInt b);
    static BigInt lcm(const BigInt& a, const BigInt& b);
    BigInt pow(uint64_t e) const;
    /// Integer square root of a non-negative value; `exact` reports r*r == *this.
    BigInt isqrt(bool& exact) const;

    double to_double() const;
    /// Value as long long; throws if out of range.
    long long to_ll() const;
    bool fits_ll() const;
    std::string to_string() const;
    size_t hash() const;

private:
    int sign_ = 0;
    std::vector<uint64_t> mag_;

    void trim();
    static int cmp_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b);
    static std::vector<uint64_t> add_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b);
    static std::vector<uint64_t> sub_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b);
    static std::vector<uint64_t> mul_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b);
};

/// Exact rational number; always reduced, denominator positive.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) : Rational(BigInt(n), BigInt(d)) {}
    Rational(BigInt n, BigInt d);
    explicit Rational(BigInt n) : num_(std::move(n)), den_(1) {}

    static Rational from_string(const std::string& s);

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_integer() const { return den_.is_one(); }
    bool is_neg() const { return num_.is_neg(); }
    int sign() const { return num_.sign(); }

    Rational operator-() const;
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational& operator+=(const Rational& b) { *this = *this + b; return *this; }
    Rational& operator-=(const Rational& b) { *this = *this - b; return *this; }
    Rational& operator*=(const Rational& b) { *this = *this * b; return *this; }
    Rational& operator/=(const Rational& b) { *this = *this / b; return *this; }
    Rational inverse() const;
    Rational pow(long long e) const;
    Rational abs() const { return is_neg() ? -*this : *this; }

    friend bool operator==(const Rational& a, const Rational& b);
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    /// Exact square root if this is a perfect square of a rational.
    bool sqrt_exact(Rational& out) const;

    double to_double() const;
    std::string to_string() const;
    size_t hash() const;

private:
    BigInt num_, den_;
    void reduce();
};

/// Element of Q(i): re + im*i with exact rational parts.
class GaussRational {
public:
    GaussRational() = default;
    GaussRational(Rational re) : re_(std::move(re)) {}
    GaussRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}
    GaussRational(long long n) : re_(n) {}
    static GaussRational i() { return GaussRational(Rational(0), Rational(1)); }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }
    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    bool is_one() const { return re_.is_one() && im_.is_zero(); }
    bool is_real() const { return im_.is_zero(); }

    GaussRational operator-() const { return {-re_, -im_}; }
    friend GaussRational operator+(const GaussRational& a, const GaussRational& b);
    friend GaussRational operator-(const GaussRational& a, const GaussRational& b);
    friend GaussRational operator*(const GaussRational& a, const GaussRational& b);
    friend GaussRational operator/(const GaussRational& a, const GaussRational& b);
    GaussRational& operator+=(const GaussRational& b) { *this = *this + b; return *this; }
    GaussRational& operator-=(const GaussRational& b) { *this = *this - b; return *this; }
    GaussRational& operator*=(const GaussRational& b) { *this = *this * b; return *this; }
    GaussRational inverse() const;
    GaussRational pow(long long e) const;

    friend bool operator==(const GaussRational& a, const GaussRational& b);

    size_t hash() const;
    std::string to_string() const;

private:
    Rational re_, im_;
};

inline size_t hash_combine(size_t a, size_t b) {
    return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

} // namespace cw
