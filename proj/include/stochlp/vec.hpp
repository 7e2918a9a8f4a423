#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace stochlp {

using Vec = std::vector<double>;
using Xi = std::vector<double>;
using Rng = std::mt19937_64;

inline Vec zeros(int d) { return Vec(static_cast<size_t>(d), 0.0); }

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// y += c * x
inline void axpy(double c, const Vec& x, Vec& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec scaled(const Vec& a, double c) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

// splitmix64, used to derive independent per-trial seeds from a master seed
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t grid) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ (0x632be59bd9b4e019ULL + trial));
    s = splitmix64(s ^ (0x9e3779b97f4a7c15ULL * (grid + 1)));
    return s;
}

}  // namespace stochlp
