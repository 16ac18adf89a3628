#include "cw/num.hpp"

#include <algorithm>
#include <cmath>
#include <cassert>

namespace cw {

using u64 = uint64_t;
using u128 = unsigned __int128;

// ---------------------------------------------------------------- BigInt

BigInt::BigInt(long long v) {
    if (v == 0) return;
    sign_ = v > 0 ? 1 : -1;
    u64 m = v > 0 ? static_cast<u64>(v) : ~static_cast<u64>(v) + 1;
    mag_.push_back(m);
}

void BigInt::trim() {
    while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
    if (mag_.empty()) sign_ = 0;
}

int BigInt::cmp_mag(const std::vector<u64>& a, const std::vector<u64>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

std::vector<u64> BigInt::add_mag(const std::vector<u64>& a, const std::vector<u64>& b) {
    const auto& big = a.size() >= b.size() ? a : b;
    const auto& small = a.size() >= b.size() ? b : a;
    std::vector<u64> r(big.size() + 1, 0);
    u64 carry = 0;
    for (size_t i = 0; i < big.size(); ++i) {
        u128 s = static_cast<u128>(big[i]) + (i < small.size() ? small[i] : 0) + carry;
        r[i] = static_cast<u64>(s);
        carry = static_cast<u64>(s >> 64);
    }
    r[big.size()] = carry;
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

// requires |a| >= |b|
std::vector<u64> BigInt::sub_mag(const std::vector<u64>& a, const std::vector<u64>& b) {
    std::vector<u64> r(a.size(), 0);
    long long borrow = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        u128 bi = (i < b.size() ? b[i] : 0);
        u128 ai = a[i];
        if (ai >= bi + borrow) {
            r[i] = static_cast<u64>(ai - bi - borrow);
            borrow = 0;
        } else {
            r[i] = static_cast<u64>((u128(1) << 64) + ai - bi - borrow);
            borrow = 1;
        }
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

std::vector<u64> BigInt::mul_mag(const std::vector<u64>& a, const std::vector<u64>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<u64> r(a.size() + b.size(), 0);
    for (size_t i = 0; i < a.size(); ++i) {
        u64 carry = 0;
        u64 ai = a[i];
        if (ai == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) {
            u128 cur = static_cast<u128>(ai) * b[j] + r[i + j] + carry;
            r[i + j] = static_cast<u64>(cur);
            carry = static_cast<u64>(cur >> 64);
        }
        size_t k = i + b.size();
        while (carry) {
            u128 cur = static_cast<u128>(r[k]) + carry;
            r[k] = static_cast<u64>(cur);
            carry = static_cast<u64>(cur >> 64);
            ++k;
        }
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

BigInt BigInt::operator-() const {
    BigInt r = *this;
    r.sign_ = -r.sign_;
    return r;
}

BigInt BigInt::abs() const {
    BigInt r = *this;
    if (r.sign_ < 0) r.sign_ = 1;
    return r;
}

BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    BigInt r;
    if (a.sign_ == b.sign_) {
        r.sign_ = a.sign_;
        r.mag_ = BigInt::add_mag(a.mag_, b.mag_);
    } else {
        int c = BigInt::cmp_mag(a.mag_, b.mag_);
        if (c == 0) return BigInt();
        if (c > 0) {
            r.sign_ = a.sign_;
            r.mag_ = BigInt::sub_mag(a.mag_, b.mag_);
        } else {
            r.sign_ = b.sign_;
            r.mag_ = BigInt::sub_mag(b.mag_, a.mag_);
        }
    }
    r.trim();
    return r;
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

BigInt operator*(const BigInt& a, const BigInt& b) {
    BigInt r;
    if (a.sign_ == 0 || b.sign_ == 0) return r;
    r.sign_ = a.sign_ * b.sign_;
    r.mag_ = BigInt::mul_mag(a.mag_, b.mag_);
    r.trim();
    return r;
}

// Knuth algorithm D on 32-bit half-limbs for simplicity of normalization.
static void divmod_mag(const std::vector<u64>& a64, const std::vector<u64>& b64,
                       std::vector<u64>& q64, std::vector<u64>& r64) {
    // expand to 32-bit digits
    auto expand = [](const std::vector<u64>& v) {
        std::vector<uint32_t> d;
        d.reserve(v.size() * 2);
        for (u64 x : v) {
            d.push_back(static_cast<uint32_t>(x));
            d.push_back(static_cast<uint32_t>(x >> 32));
        }
        while (!d.empty() && d.back() == 0) d.pop_back();
        return d;
    };
    auto compress = [](const std::vector<uint32_t>& d) {
        std::vector<u64> v((d.size() + 1) / 2, 0);
        for (size_t i = 0; i < d.size(); ++i) {
            v[i / 2] |= static_cast<u64>(d[i]) << (32 * (i % 2));
        }
        while (!v.empty() && v.back() == 0) v.pop_back();
        return v;
    };
    std::vector<uint32_t> u = expand(a64), v = expand(b64);
    size_t n = v.size(), m = u.size();
    if (m < n) { q64.clear(); r64 = a64; return; }
    if (n == 1) {
        u64 d = v[0], rem = 0;
        std::vector<uint32_t> q(m);
        for (size_t i = m; i-- > 0;) {
            u64 cur = (rem << 32) | u[i];
            q[i] = static_cast<uint32_t>(cur / d);
            rem = cur % d;
        }
        q64 = compress(q);
        r64 = rem ? std::vector<u64>{rem} : std::vector<u64>{};
        return;
    }
    // normalize
    int s = 0;
    while (((v[n - 1] << s) & 0x80000000u) == 0) ++s;
    auto shl = [&](const std::vector<uint32_t>& x) {
        std::vector<uint32_t> y(x.size() + 1, 0);
        for (size_t i = 0; i < x.size(); ++i) {
            y[i] |= x[i] << s;
            if (s) y[i + 1] = x[i] >> (32 - s);
        }
        return y;
    };
    std::vector<uint32_t> un = shl(u);
    std::vector<uint32_t> vn = shl(v);
    vn.resize(n);
    un.resize(m + 1);
    std::vector<uint32_t> q(m - n + 1, 0);
    for (size_t j = m - n + 1; j-- > 0;) {
        u64 num = (static_cast<u64>(un[j + n]) << 32) | un[j + n - 1];
        u64 qhat = num / vn[n - 1];
        u64 rhat = num % vn[n - 1];
        while (qhat >= (u64(1) << 32) ||
               qhat * vn[n - 2] > ((rhat << 32) | un[j + n - 2])) {
            --qhat;
            rhat += vn[n - 1];
            if (rhat >= (u64(1) << 32)) break;
        }
        // multiply-subtract
        long long borrow = 0;
        u64 carry = 0;
        for (size_t i = 0; i < n; ++i) {
            u128 p = static_cast<u128>(qhat) * vn[i] + carry;
            carry = static_cast<u64>(p >> 32);
            long long t = static_cast<long long>(un[i + j]) - static_cast<long long>(p & 0xffffffffu) - borrow;
            if (t < 0) { t += (1LL << 32); borrow = 1; } else borrow = 0;
            un[i + j] = static_cast<uint32_t>(t);
        }
        long long t = static_cast<long long>(un[j + n]) - static_cast<long long>(carry) - borrow;
        if (t < 0) {
            // add back
            t += (1LL << 32);
            --qhat;
            u64 c2 = 0;
            for (size_t i = 0; i < n; ++i) {
                u64 sum = static_cast<u64>(un[i + j]) + vn[i] + c2;
                un[i + j] = static_cast<uint32_t>(sum);
                c2 = sum >> 32;
            }
            t += static_cast<long long>(c2);
        }
        un[j + n] = static_cast<uint32_t>(t);
        q[j] = static_cast<uint32_t>(qhat);
    }
    // denormalize remainder
    std::vector<uint32_t> r(n, 0);
    for (size_t i = 0; i < n; ++i) {
        r[i] = un[i] >> s;
        if (s && i + 1 < un.size()) r[i] |= un[i + 1] << (32 - s);
    }
    q64 = compress(q);
    r64 = compress(r);
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.sign_ == 0) throw std::domain_error("BigInt: division by zero");
    if (a.sign_ == 0) { q = BigInt(); r = BigInt(); return; }
    int c = cmp_mag(a.mag_, b.mag_);
    if (c < 0) { q = BigInt(); r = a; return; }
    BigInt qq, rr;
    divmod_mag(a.mag_, b.mag_, qq.mag_, rr.mag_);
    qq.sign_ = qq.mag_.empty() ? 0 : a.sign_ * b.sign_;
    rr.sign_ = rr.mag_.empty() ? 0 : a.sign_;
    qq.trim();
    rr.trim();
    q = std::move(qq);
    r = std::move(rr);
}

BigInt operator/(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    return q;
}

BigInt operator%(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    return r;
}

bool operator==(const BigInt& a, const BigInt& b) {
    return a.sign_ == b.sign_ && a.mag_ == b.mag_;
}

std::strong_ordering operator<=>(const BigInt& a, const BigInt& b) {
    if (a.sign_ != b.sign_) return a.sign_ <=> b.sign_;
    int c = BigInt::cmp_mag(a.mag_, b.mag_) * (a.sign_ < 0 ? -1 : 1);
    return c <=> 0;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
    a = a.abs();
    b = b.abs();
    while (!b.is_zero()) {
        BigInt r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    if (a.is_zero()) return BigInt(0);
    return a;
}

BigInt BigInt::lcm(const BigInt& a, const BigInt& b) {
    if (a.is_zero() || b.is_zero()) return BigInt(0);
    return (a / gcd(a, b) * b).abs();
}

BigInt BigInt::pow(uint64_t e) const {
    BigInt base = *this, r(1);
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

BigInt BigInt::isqrt(bool& exact) const {
    exact = false;
    if (sign_ < 0) throw std::domain_error("BigInt: isqrt of negative");
    if (is_zero()) { exact = true; return BigInt(0); }
    // Newton iteration starting from a double estimate.
    double d = to_double();
    BigInt x = from_string(std::to_string(static_cast<unsigned long long>(std::sqrt(d) + 2)));
    if (x.is_zero()) x = BigInt(1);
    while (true) {
        BigInt y = (x + *this / x) / BigInt(2);
        if (y >= x) break;
        x = std::move(y);
    }
    while (x * x > *this) x = x - BigInt(1);
    while ((x + BigInt(1)) * (x + BigInt(1)) <= *this) x = x + BigInt(1);
    exact = (x * x == *this);
    return x;
}

double BigInt::to_double() const {
    double r = 0;
    for (size_t i = mag_.size(); i-- > 0;) r = r * 18446744073709551616.0 + static_cast<double>(mag_[i]);
    return sign_ < 0 ? -r : r;
}

bool BigInt::fits_ll() const {
    if (mag_.size() > 1) return false;
    if (mag_.empty()) return true;
    if (sign_ > 0) return mag_[0] <= 0x7fffffffffffffffULL;
    return mag_[0] <= 0x8000000000000000ULL;
}

long long BigInt::to_ll() const {
    if (!fits_ll()) throw std::overflow_error("BigInt: does not fit in long long");
    if (mag_.empty()) return 0;
    if (sign_ > 0) return static_cast<long long>(mag_[0]);
    return -static_cast<long long>(mag_[0] - 1) - 1;
}

std::string BigInt::to_string() const {
    if (is_zero()) return "0";
    std::vector<uint32_t> digits; // base 1e9
    std::vector<u64> work = mag_;
    while (!work.empty()) {
        u64 rem = 0;
        for (size_t i = work.size(); i-- > 0;) {
            u128 cur = (static_cast<u128>(rem) << 64) | work[i];
            work[i] = static_cast<u64>(cur / 1000000000u);
            rem = static_cast<u64>(cur % 1000000000u);
        }
        digits.push_back(static_cast<uint32_t>(rem));
        while (!work.empty() && work.back() == 0) work.pop_back();
    }
    std::string s = sign_ < 0 ? "-" : "";
    s += std::to_string(digits.back());
    for (size_t i = digits.size() - 1; i-- > 0;) {
        std::string part = std::to_string(digits[i]);
        s += std::string(9 - part.size(), '0') + part;
    }
    return s;
}

BigInt BigInt::from_string(const std::string& s) {
    BigInt r;
    size_t i = 0;
    int sign = 1;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
        if (s[i] == '-') sign = -1;
        ++i;
    }
    if (i >= s.size()) throw std::invalid_argument("BigInt: empty literal");
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("BigInt: bad digit");
        r = r * BigInt(10) + BigInt(s[i] - '0');
    }
    if (!r.is_zero()) r.sign_ = sign;
    return r;
}

size_t BigInt::hash() const {
    size_t h = static_cast<size_t>(sign_ + 1);
    for (u64 limb : mag_) h = hash_combine(h, std::hash<u64>{}(limb));
    return h;
}

// ---------------------------------------------------------------- Rational

Rational::Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) {
    if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
    reduce();
}

void Rational::reduce() {
    if (den_.is_neg()) {
        num_ = -num_;
        den_ = -den_;
    }
    if (num_.is_zero()) {
        den_ = BigInt(1);
        return;
    }
    BigInt g = BigInt::gcd(num_, den_);
    if (!g.is_one()) {
        num_ = num_ / g;
        den_ = den_ / g;
    }
}

Rational Rational::from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt::from_string(s));
    return Rational(BigInt::from_string(s.substr(0, slash)),
                    BigInt::from_string(s.substr(slash + 1)));
}

Rational Rational::operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
}

Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}
Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}
Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
}
Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("Rational: division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
}

Rational Rational::inverse() const {
    if (is_zero()) throw std::domain_error("Rational: inverse of zero");
    return Rational(den_, num_);
}

Rational Rational::pow(long long e) const {
    if (e == 0) return Rational(1);
    if (e < 0) return inverse().pow(-e);
    Rational r(BigInt(num_.pow(static_cast<uint64_t>(e))), BigInt(den_.pow(static_cast<uint64_t>(e))));
    return r;
}

bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return (a.num_ * b.den_) <=> (b.num_ * a.den_);
}

bool Rational::sqrt_exact(Rational& out) const {
    if (is_neg()) return false;
    bool e1 = false, e2 = false;
    BigInt rn = num_.isqrt(e1);
    if (!e1) return false;
    BigInt rd = den_.isqrt(e2);
    if (!e2) return false;
    out = Rational(std::move(rn), std::move(rd));
    return true;
}

double Rational::to_double() const {
    // Scale to keep precision when both parts are huge.
    return num_.to_double() / den_.to_double();
}

std::string Rational::to_string() const {
    if (den_.is_one()) return num_.to_string();
    return num_.to_string() + "/" + den_.to_string();
}

size_t Rational::hash() const {
    return hash_combine(num_.hash(), den_.hash());
}

// ---------------------------------------------------------------- GaussRational

GaussRational operator+(const GaussRational& a, const GaussRational& b) {
    return {a.re_ + b.re_, a.im_ + b.im_};
}
GaussRational operator-(const GaussRational& a, const GaussRational& b) {
    return {a.re_ - b.re_, a.im_ - b.im_};
}
GaussRational operator*(const GaussRational& a, const GaussRational& b) {
    return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
}
GaussRational operator/(const GaussRational& a, const GaussRational& b) {
    return a * b.inverse();
}

GaussRational GaussRational::inverse() const {
    Rational n = re_ * re_ + im_ * im_;
    if (n.is_zero()) throw std::domain_error("GaussRational: inverse of zero");
    return {re_ / n, -im_ / n};
}

GaussRational GaussRational::pow(long long e) const {
    if (e < 0) return inverse().pow(-e);
    GaussRational r(1), base = *this;
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
}

size_t GaussRational::hash() const {
    return hash_combine(re_.hash(), im_.hash());
}

std::string GaussRational::to_string() const {
    if (im_.is_zero()) return re_.to_string();
    std::string s;
    if (!re_.is_zero()) s = re_.to_string() + (im_.is_neg() ? "-" : "+");
    else if (im_.is_neg()) s = "-";
    Rational a = im_.abs();
    if (!a.is_one()) s += a.to_string() + "*";
    s += "I";
    return s;
}

} // namespace cw
