#pragma once

// Angular-momentum algebra. Wigner symbols are evaluated exactly in rational
// arithmetic (GMP) and converted to double once; results are memoized.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "dimershield/error.hpp"

namespace dimershield {

// Integer or half-integer quantum number, stored doubled.
struct HalfInt {
    int twice = 0;

    static constexpr HalfInt from_twice(int t) { return HalfInt{t}; }
    static constexpr HalfInt integer(int v) { return HalfInt{2 * v}; }
    static HalfInt from_double(double v) {
        double t = std::round(2.0 * v);
        if (std::abs(2.0 * v - t) > 1e-9)
            throw ConfigError("value " + std::to_string(v) + " is not a multiple of 1/2");
        return HalfInt{static_cast<int>(t)};
    }

    constexpr double value() const { return 0.5 * twice; }
    constexpr bool is_integer() const { return twice % 2 == 0; }

    constexpr HalfInt operator-() const { return HalfInt{-twice}; }
    constexpr HalfInt operator+(HalfInt o) const { return HalfInt{twice + o.twice}; }
    constexpr HalfInt operator-(HalfInt o) const { return HalfInt{twice - o.twice}; }
    constexpr auto operator<=>(const HalfInt&) const = default;

    std::string str() const {
        if (twice % 2 == 0) return std::to_string(twice / 2);
        return std::to_string(twice) + "/2";
    }
};

namespace angular {

namespace detail {

class FactorialTable {
public:
    const mpz_class& operator()(int n) {
        if (n < 0) throw std::logic_error("negative factorial");
        std::lock_guard lock(mutex_);
        while (static_cast<int>(table_.size()) <= n) {
            if (table_.empty()) {
                table_.emplace_back(1);
            } else {
                mpz_class next = table_.back() * static_cast<unsigned long>(table_.size());
                table_.push_back(next);
            }
        }
        return table_[n];
    }

private:
    std::mutex mutex_;
    std::vector<mpz_class> table_;
};

inline FactorialTable& factorial() {
    static FactorialTable t;
    return t;
}

inline mpz_class fact(int n) { return factorial()(n); }

class SymbolCache {
public:
    bool find(std::uint64_t key, double& out) const {
        std::shared_lock lock(mutex_);
        auto it = map_.find(key);
        if (it == map_.end()) return false;
        out = it->second;
        return true;
    }
    void store(std::uint64_t key, double v) {
        std::unique_lock lock(mutex_);
        map_.emplace(key, v);
    }

private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::uint64_t, double> map_;
};

inline std::uint64_t pack(std::initializer_list<int> xs) {
    std::uint64_t k = 0;
    for (int x : xs) k = (k << 10) | static_cast<std::uint64_t>((x + 512) & 0x3ff);
    return k;
}

inline bool triangle(int a2, int b2, int c2) {
    if (c2 < std::abs(a2 - b2) || c2 > a2 + b2) return false;
    return (a2 + b2 + c2) % 2 == 0;
}

// sign * sqrt(square) with the sign and square given exactly.
inline double signed_sqrt(int sign, const mpq_class& square) {
    return sign * std::sqrt(square.get_d());
}

inline mpq_class delta_sq(int a2, int b2, int c2) {
    mpq_class r(fact((a2 + b2 - c2) / 2) * fact((a2 - b2 + c2) / 2) * fact((-a2 + b2 + c2) / 2),
                fact((a2 + b2 + c2) / 2 + 1));
    r.canonicalize();
    return r;
}

inline double compute_3j(int a2, int b2, int c2, int al2, int be2, int ga2) {
    if (al2 + be2 + ga2 != 0) return 0.0;
    if (std::abs(al2) > a2 || std::abs(be2) > b2 || std::abs(ga2) > c2) return 0.0;
    if ((a2 + al2) % 2 || (b2 + be2) % 2 || (c2 + ga2) % 2) return 0.0;
    if (!triangle(a2, b2, c2)) return 0.0;

    const int apb_c = (a2 + b2 - c2) / 2;
    const int a_al = (a2 - al2) / 2;
    const int b_be = (b2 + be2) / 2;
    const int c_b_al = (c2 - b2 + al2) / 2;
    const int c_a_be = (c2 - a2 - be2) / 2;
    const int tmin = std::max({0, -c_b_al, -c_a_be});
    const int tmax = std::min({apb_c, a_al, b_be});

    mpq_class sum(0);
    for (int t = tmin; t <= tmax; ++t) {
        mpz_class den = fact(t) * fact(c_b_al + t) * fact(c_a_be + t) * fact(apb_c - t) *
                        fact(a_al - t) * fact(b_be - t);
        mpq_class term(1, den);
        if (t % 2) sum -= term;
        else sum += term;
    }
    if (sgn(sum) == 0) return 0.0;

    mpq_class sq = delta_sq(a2, b2, c2);
    sq *= mpq_class(fact((a2 + al2) / 2) * fact((a2 - al2) / 2) * fact((b2 + be2) / 2) *
                    fact((b2 - be2) / 2) * fact((c2 + ga2) / 2) * fact((c2 - ga2) / 2));
    sq *= sum * sum;
    int phase = ((a2 - b2 - ga2) / 2) % 2 == 0 ? 1 : -1;
    return signed_sqrt(phase * sgn(sum), sq);
}

inline double compute_6j(int a2, int b2, int c2, int d2, int e2, int f2) {
    if (!triangle(a2, b2, c2) || !triangle(a2, e2, f2) || !triangle(d2, b2, f2) ||
        !triangle(d2, e2, c2))
        return 0.0;
    const int abc = (a2 + b2 + c2) / 2;
    const int aef = (a2 + e2 + f2) / 2;
    const int dbf = (d2 + b2 + f2) / 2;
    const int dec = (d2 + e2 + c2) / 2;
    const int abde = (a2 + b2 + d2 + e2) / 2;
    const int acdf = (a2 + c2 + d2 + f2) / 2;
    const int bcef = (b2 + c2 + e2 + f2) / 2;
    const int tmin = std::max({abc, aef, dbf, dec});
    const int tmax = std::min({abde, acdf, bcef});

    mpq_class sum(0);
    for (int t = tmin; t <= tmax; ++t) {
        mpz_class den = fact(t - abc) * fact(t - aef) * fact(t - dbf) * fact(t - dec) *
                        fact(abde - t) * fact(acdf - t) * fact(bcef - t);
        mpq_class term(fact(t + 1), den);
        term.canonicalize();
        if (t % 2) sum -= term;
        else sum += term;
    }
    if (sgn(sum) == 0) return 0.0;
    mpq_class sq = delta_sq(a2, b2, c2) * delta_sq(a2, e2, f2) * delta_sq(d2, b2, f2) *
                   delta_sq(d2, e2, c2) * sum * sum;
    return signed_sqrt(sgn(sum), sq);
}

inline SymbolCache& cache_3j() {
    static SymbolCache c;
    return c;
}

inline SymbolCache& cache_6j() {
    static SymbolCache c;
    return c;
}

}  // namespace detail

// Wigner 3-j symbol (j1 j2 j3; m1 m2 m3).
inline double wigner3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
    const auto key =
        detail::pack({j1.twice, j2.twice, j3.twice, m1.twice, m2.twice, m3.twice});
    double v;
    if (detail::cache_3j().find(key, v)) return v;
    v = detail::compute_3j(j1.twice, j2.twice, j3.twice, m1.twice, m2.twice, m3.twice);
    detail::cache_3j().store(key, v);
    return v;
}

inline double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
    return wigner3j(HalfInt::integer(j1), HalfInt::integer(j2), HalfInt::integer(j3),
                    HalfInt::integer(m1), HalfInt::integer(m2), HalfInt::integer(m3));
}

// Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}.
inline double wigner6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
    const auto key =
        detail::pack({j1.twice, j2.twice, j3.twice, j4.twice, j5.twice, j6.twice});
    double v;
    if (detail::cache_6j().find(key, v)) return v;
    v = detail::compute_6j(j1.twice, j2.twice, j3.twice, j4.twice, j5.twice, j6.twice);
    detail::cache_6j().store(key, v);
    return v;
}

inline double wigner6j(int j1, int j2, int j3, int j4, int j5, int j6) {
    return wigner6j(HalfInt::integer(j1), HalfInt::integer(j2), HalfInt::integer(j3),
                    HalfInt::integer(j4), HalfInt::integer(j5), HalfInt::integer(j6));
}

// <j1 m1 j2 m2 | J M>
inline double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J,
                             HalfInt M) {
    const int ph2 = j1.twice - j2.twice + M.twice;
    const double phase = ((ph2 / 2) % 2 == 0) ? 1.0 : -1.0;
    return phase * std::sqrt(J.twice + 1.0) * wigner3j(j1, j2, J, m1, m2, -M);
}

inline double clebsch_gordan(int j1, int m1, int j2, int m2, int J, int M) {
    return clebsch_gordan(HalfInt::integer(j1), HalfInt::integer(m1), HalfInt::integer(j2),
                          HalfInt::integer(m2), HalfInt::integer(J), HalfInt::integer(M));
}

inline double parity_sign(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

// <l m | C^k_q | l' m'> for integer l (rotor or partial wave).
inline double spherical_c(int l, int m, int k, int q, int lp, int mp) {
    if (m != q + mp) return 0.0;
    const double three0 = wigner3j(l, k, lp, 0, 0, 0);
    if (three0 == 0.0) return 0.0;
    return parity_sign(m) * std::sqrt((2.0 * l + 1.0) * (2.0 * lp + 1.0)) * three0 *
           wigner3j(l, k, lp, -m, q, mp);
}

// <j m | j_q | j m'> spherical component of an angular-momentum operator.
inline double angmom_component(HalfInt j, HalfInt m, int q, HalfInt mp) {
    if (m.twice != mp.twice + 2 * q) return 0.0;
    const double jj = j.value();
    const int ph = (j.twice - m.twice) / 2;
    return parity_sign(ph) * std::sqrt(jj * (jj + 1.0) * (2.0 * jj + 1.0)) *
           wigner3j(j, HalfInt::integer(1), j, -m, HalfInt::integer(q), mp);
}

// Spherical-component matrices j_{-1}, j_0, j_{+1} for spin j in the basis
// m = -j..j (ascending). Index q+1.
inline std::array<Eigen::MatrixXd, 3> spin_components(HalfInt j) {
    const int dim = j.twice + 1;
    std::array<Eigen::MatrixXd, 3> out;
    for (int q = -1; q <= 1; ++q) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                M(a, b) = angmom_component(j, HalfInt::from_twice(-j.twice + 2 * a), q,
                                           HalfInt::from_twice(-j.twice + 2 * b));
        out[q + 1] = M;
    }
    return out;
}

}  // namespace angular
}  // namespace dimershield
