#pragma once

#include "bgwtilt/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace bgwtilt {

/// Element x + y*sqrt(d) of the real quadratic field Q(sqrt(d)), d a positive
/// non-square integer (d = 1 degenerates to Q and is allowed).
/// Arithmetic between elements of different fields is a logic error.
struct Quad {
    Rational x{0};
    Rational y{0};
    long long d = 1;

    Quad() = default;
    Quad(int v) : x(v) {} // NOLINT: implicit, mirrors Rational(int)
    Quad(Rational rx, Rational ry, long long dd) : x(std::move(rx)), y(std::move(ry)), d(dd) {}
    static Quad from_rational(const Rational& r, long long d = 1) { return Quad{r, Rational(0), d}; }
    static Quad sqrt_d(long long d) { return Quad{Rational(0), Rational(1), d}; }

    bool is_zero() const { return x == 0 && y == 0; }
    double value() const { return to_double(x) + to_double(y) * std::sqrt(static_cast<double>(d)); }

    friend long long common_d(const Quad& a, const Quad& b) {
        if (a.y == 0) return b.d;
        if (b.y == 0) return a.d;
        if (a.d != b.d) throw std::logic_error("Quad: mixed quadratic fields");
        return a.d;
    }

    friend Quad operator+(const Quad& a, const Quad& b) {
        return Quad{a.x + b.x, a.y + b.y, common_d(a, b)};
    }
    friend Quad operator-(const Quad& a, const Quad& b) {
        return Quad{a.x - b.x, a.y - b.y, common_d(a, b)};
    }
    friend Quad operator-(const Quad& a) { return Quad{-a.x, -a.y, a.d}; }
    friend Quad operator*(const Quad& a, const Quad& b) {
        long long d = common_d(a, b);
        return Quad{a.x * b.x + Rational(d) * a.y * b.y, a.x * b.y + a.y * b.x, d};
    }
    friend Quad operator/(const Quad& a, const Quad& b) {
        long long d = common_d(a, b);
        Rational norm = b.x * b.x - Rational(d) * b.y * b.y;
        if (norm == 0) throw std::domain_error("Quad: division by zero");
        // multiply by the conjugate
        Rational nx = (a.x * b.x - Rational(d) * a.y * b.y) / norm;
        Rational ny = (a.y * b.x - a.x * b.y) / norm;
        return Quad{nx, ny, d};
    }
    Quad& operator+=(const Quad& o) { return *this = *this + o; }
    Quad& operator*=(const Quad& o) { return *this = *this * o; }
    friend bool operator==(const Quad& a, const Quad& b) {
        if (a.y != 0 && b.y != 0 && a.d != b.d) return false;
        return a.x == b.x && a.y == b.y;
    }
    friend bool operator!=(const Quad& a, const Quad& b) { return !(a == b); }
};

inline Quad pow(Quad base, unsigned long long e) {
    Quad r = Quad::from_rational(Rational(1), base.d);
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

inline double to_double(const Quad& q) { return q.value(); }

} // namespace bgwtilt
