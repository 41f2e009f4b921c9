#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace jlm {

/// Exact rational arithmetic on 64-bit words. Intermediates are widened to
/// 128 bits; anything that would not fit back into 64 bits throws instead of
/// wrapping, so callers can decline to fold rather than compute garbage.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) : num_(n), den_(d) { reduce(); }

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_one() const { return num_ == 1 && den_ == 1; }
    bool is_integer() const { return den_ == 1; }
    bool is_negative() const { return num_ < 0; }

    Rational operator-() const { return Rational(checked(-static_cast<__int128>(num_)), den_, already_reduced{}); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
        __int128 d = static_cast<__int128>(a.den_) * b.den_;
        return make(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        __int128 n = static_cast<__int128>(a.num_) * b.num_;
        __int128 d = static_cast<__int128>(a.den_) * b.den_;
        return make(n, d);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        __int128 n = static_cast<__int128>(a.num_) * b.den_;
        __int128 d = static_cast<__int128>(a.den_) * b.num_;
        return make(n, d);
    }

    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return a < b || a == b; }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// a^e for integer e; e < 0 inverts (throws on zero base).
    static Rational pow(const Rational& a, long long e) {
        if (e == 0) return Rational(1);
        Rational base = a;
        if (e < 0) {
            if (a.num_ == 0) throw std::domain_error("zero to negative power");
            base = Rational(a.den_, a.num_);
            e = -e;
        }
        Rational acc(1);
        while (e > 0) {
            if (e & 1) acc *= base;
            base = (e > 1) ? base * base : base;
            e >>= 1;
        }
        return acc;
    }

    /// Exact k-th root when one exists (k >= 1, base >= 0 unless k odd).
    static bool root(const Rational& a, long long k, Rational& out) {
        long long rn, rd;
        if (!iroot(a.num_, k, rn) || !iroot(a.den_, k, rd)) return false;
        out = Rational(rn, rd);
        return true;
    }

private:
    struct already_reduced {};
    Rational(long long n, long long d, already_reduced) : num_(n), den_(d) {}

    static long long checked(__int128 v) {
        if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
        return static_cast<long long>(v);
    }

    static Rational make(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 an = n < 0 ? -n : n;
        __int128 g = gcd128(an, d);
        if (g > 1) { n /= g; d /= g; }
        return Rational(checked(n), checked(d), already_reduced{});
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        return a < 0 ? -a : a;
    }

    static bool iroot(long long v, long long k, long long& out) {
        if (v < 0) {
            if (k % 2 == 0) return false;
            long long r;
            if (!iroot(-v, k, r)) return false;
            out = -r;
            return true;
        }
        if (v <= 1) { out = v; return true; }
        long long lo = 1, hi = 1;
        while (true) {
            __int128 p = ipow128(hi, k);
            if (p >= v || p > INT64_MAX) break;
            hi <<= 1;
        }
        while (lo < hi) {
            long long mid = lo + (hi - lo) / 2;
            __int128 p = ipow128(mid, k);
            if (p < v) lo = mid + 1; else hi = mid;
        }
        if (ipow128(lo, k) == v) { out = lo; return true; }
        return false;
    }

    static __int128 ipow128(long long b, long long k) {
        __int128 acc = 1;
        for (long long i = 0; i < k; ++i) {
            acc *= b;
            if (acc > (static_cast<__int128>(INT64_MAX) + 1) * 2) return acc;  // saturate, caller compares
        }
        return acc;
    }

    void reduce() {
        if (den_ == 0) throw std::domain_error("rational with zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    long long num_;
    long long den_;
};

}  // namespace jlm
