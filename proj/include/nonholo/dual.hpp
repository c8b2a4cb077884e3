#pragma once

// Forward-mode dual numbers, nestable for second derivatives.

#include <cmath>
#include <type_traits>

namespace nonholo {

template <class T>
struct Dual {
    T val{};
    T dot{};

    Dual() = default;
    Dual(double v) : val(T(v)), dot(T(0)) {}
    Dual(T v, T d) : val(std::move(v)), dot(std::move(d)) {}

    static Dual seeded(T v) { return Dual(std::move(v), T(1)); }

    Dual operator-() const { return Dual(-val, -dot); }

    Dual& operator+=(const Dual& o) { val += o.val; dot += o.dot; return *this; }
    Dual& operator-=(const Dual& o) { val -= o.val; dot -= o.dot; return *this; }
    Dual& operator*=(const Dual& o) {
        dot = dot * o.val + val * o.dot;
        val = val * o.val;
        return *this;
    }
    Dual& operator/=(const Dual& o) {
        dot = (dot * o.val - val * o.dot) / (o.val * o.val);
        val = val / o.val;
        return *this;
    }
};

template <class T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T> Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }

template <class T> Dual<T> operator+(Dual<T> a, double b) { return a += Dual<T>(b); }
template <class T> Dual<T> operator+(double a, Dual<T> b) { return b += Dual<T>(a); }
template <class T> Dual<T> operator-(Dual<T> a, double b) { return a -= Dual<T>(b); }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return Dual<T>(a) -= b; }
template <class T> Dual<T> operator*(Dual<T> a, double b) { return a *= Dual<T>(b); }
template <class T> Dual<T> operator*(double a, Dual<T> b) { return b *= Dual<T>(a); }
template <class T> Dual<T> operator/(Dual<T> a, double b) { return a /= Dual<T>(b); }
template <class T> Dual<T> operator/(double a, const Dual<T>& b) { return Dual<T>(a) /= b; }

// Scalar value at the bottom of a dual tower.
inline double value_of(double x) { return x; }
template <class T> double value_of(const Dual<T>& x) { return value_of(x.val); }

template <class T> bool operator<(const Dual<T>& a, const Dual<T>& b) { return value_of(a) < value_of(b); }
template <class T> bool operator>(const Dual<T>& a, const Dual<T>& b) { return value_of(a) > value_of(b); }
template <class T> bool operator<(const Dual<T>& a, double b) { return value_of(a) < b; }
template <class T> bool operator>(const Dual<T>& a, double b) { return value_of(a) > b; }

template <class T> Dual<T> sin(const Dual<T>& x);
template <class T> Dual<T> cos(const Dual<T>& x);

template <class T>
Dual<T> sin(const Dual<T>& x) {
    using std::sin; using std::cos;
    return Dual<T>(sin(x.val), cos(x.val) * x.dot);
}

template <class T>
Dual<T> cos(const Dual<T>& x) {
    using std::sin; using std::cos;
    return Dual<T>(cos(x.val), T(0) - sin(x.val) * x.dot);
}

template <class T>
Dual<T> tan(const Dual<T>& x) {
    return sin(x) / cos(x);
}

template <class T>
Dual<T> sqrt(const Dual<T>& x) {
    using std::sqrt;
    T r = sqrt(x.val);
    return Dual<T>(r, x.dot / (2.0 * r));
}

template <class T>
Dual<T> exp(const Dual<T>& x) {
    using std::exp;
    T e = exp(x.val);
    return Dual<T>(e, e * x.dot);
}

template <class T>
Dual<T> log(const Dual<T>& x) {
    using std::log;
    return Dual<T>(log(x.val), x.dot / x.val);
}

template <class T>
Dual<T> abs(const Dual<T>& x) {
    return value_of(x) < 0 ? -x : x;
}

// Nesting depth of a scalar type: double -> 0, Dual<double> -> 1, ...
template <class T> struct dual_depth : std::integral_constant<int, -1> {};
template <> struct dual_depth<double> : std::integral_constant<int, 0> {};
template <class T> struct dual_depth<Dual<T>> : std::integral_constant<int, dual_depth<T>::value + 1> {};

using dual1 = Dual<double>;
using dual2 = Dual<Dual<double>>;

} // namespace nonholo
