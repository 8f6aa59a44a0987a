// Arithmetic in GF(2^8) with the 0x11D reduction polynomial and generator
// element 0x02, plus dense polynomial helpers (coefficients lowest degree
// first). Log/antilog tables are built at compile time.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace dnastore::gf {

using Element = std::uint8_t;

inline constexpr unsigned kFieldPolynomial = 0x11D;
inline constexpr Element kGenerator = 0x02;
inline constexpr unsigned kOrder = 255;  // multiplicative group order

namespace detail {

struct Tables {
    std::array<Element, 512> exp{};
    std::array<std::uint8_t, 256> log{};
};

constexpr Tables build_tables() {
    Tables t{};
    unsigned x = 1;
    for (unsigned i = 0; i < kOrder; ++i) {
        t.exp[i] = static_cast<Element>(x);
        t.log[x] = static_cast<std::uint8_t>(i);
        x <<= 1;
        if (x & 0x100) x ^= kFieldPolynomial;
    }
    // Doubled table so mul can skip the mod-255 reduction.
    for (unsigned i = kOrder; i < 512; ++i) t.exp[i] = t.exp[i - kOrder];
    return t;
}

inline constexpr Tables tables = build_tables();

}  // namespace detail

constexpr Element add(Element a, Element b) { return a ^ b; }  // subtraction too

constexpr Element mul(Element a, Element b) {
    if (a == 0 || b == 0) return 0;
    return detail::tables.exp[unsigned(detail::tables.log[a]) + detail::tables.log[b]];
}

// alpha^power for any non-negative exponent.
constexpr Element exp(unsigned power) { return detail::tables.exp[power % kOrder]; }

constexpr unsigned log(Element a) {
    if (a == 0) throw std::domain_error("gf: log of zero");
    return detail::tables.log[a];
}

constexpr Element inv(Element a) {
    if (a == 0) throw std::domain_error("gf: zero has no multiplicative inverse");
    return detail::tables.exp[kOrder - detail::tables.log[a]];
}

constexpr Element div(Element a, Element b) {
    if (b == 0) throw std::domain_error("gf: division by zero");
    if (a == 0) return 0;
    return detail::tables.exp[unsigned(detail::tables.log[a]) + kOrder - detail::tables.log[b]];
}

constexpr Element pow(Element a, unsigned e) {
    if (a == 0) return e == 0 ? Element{1} : Element{0};
    return detail::tables.exp[(unsigned(detail::tables.log[a]) * (e % kOrder)) % kOrder];
}

// --- dense polynomials, coefficients lowest degree first -------------------
// The zero polynomial is the empty vector; otherwise the leading (last)
// coefficient is nonzero.

using Polynomial = std::vector<Element>;

inline void poly_trim(Polynomial& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int poly_degree(const Polynomial& p) { return static_cast<int>(p.size()) - 1; }

inline Polynomial poly_add(const Polynomial& a, const Polynomial& b) {
    Polynomial out(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] ^= a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] ^= b[i];
    poly_trim(out);
    return out;
}

inline Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
    if (a.empty() || b.empty()) return {};
    Polynomial out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] ^= mul(a[i], b[j]);
    }
    poly_trim(out);
    return out;
}

// Multiply by the scalar c.
inline Polynomial poly_scale(const Polynomial& a, Element c) {
    Polynomial out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = mul(a[i], c);
    poly_trim(out);
    return out;
}

inline Element poly_eval(const Polynomial& p, Element x) {
    Element acc = 0;
    for (std::size_t i = p.size(); i-- > 0;) acc = add(mul(acc, x), p[i]);
    return acc;
}

// Remainder of a modulo b; b must be nonzero.
inline Polynomial poly_mod(Polynomial a, const Polynomial& b) {
    if (b.empty()) throw std::domain_error("gf: polynomial division by zero");
    poly_trim(a);
    const Element lead_inv = inv(b.back());
    while (a.size() >= b.size()) {
        const Element factor = mul(a.back(), lead_inv);
        const std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] ^= mul(factor, b[i]);
        poly_trim(a);
        if (a.empty()) break;
    }
    return a;
}

// Formal derivative; over GF(2^m) even-power terms vanish.
inline Polynomial poly_derivative(const Polynomial& p) {
    if (p.size() <= 1) return {};
    Polynomial out(p.size() - 1, 0);
    for (std::size_t i = 1; i < p.size(); i += 2) out[i - 1] = p[i];
    poly_trim(out);
    return out;
}

}  // namespace dnastore::gf
