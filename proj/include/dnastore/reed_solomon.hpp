// Systematic Reed-Solomon codec over GF(2^8), parameterized by (n, k), with
// an errors-and-erasures decoder (syndromes, erasure-adjusted Berlekamp-
// Massey, Chien search, Forney magnitudes). Corrects any pattern with
// 2*errors + erasures <= n - k.
//
// Codeword layout is big-endian in the polynomial sense: symbols[0] is the
// coefficient of x^(n-1), so position p evaluates at alpha^(n-1-p).
#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "dnastore/gf256.hpp"

namespace dnastore::rs {

struct RsConfig {
    std::size_t n = 64;  // codeword length in symbols
    std::size_t k = 48;  // message length in symbols
    unsigned symbol_bits = 8;
    unsigned field_polynomial = gf::kFieldPolynomial;
    unsigned first_root_exponent = 0;

    std::size_t parity() const { return n - k; }
    std::size_t max_errors() const { return (n - k) / 2; }  // with no erasures

    void validate() const {
        if (symbol_bits != 8 || field_polynomial != gf::kFieldPolynomial)
            throw std::invalid_argument("rs: only GF(2^8) with polynomial 0x11D is supported");
        if (k < 1 || k > n || n > 255)
            throw std::invalid_argument("rs: require 1 <= k <= n <= 255");
    }

    friend bool operator==(const RsConfig&, const RsConfig&) = default;
};

struct RsCodeword {
    std::vector<gf::Element> symbols;  // k message symbols then n-k parity
};

enum class DecodeStatus { corrected, uncorrectable };

struct DecodeOutcome {
    DecodeStatus status = DecodeStatus::uncorrectable;
    std::vector<gf::Element> message;  // first k symbols; authoritative only when corrected
    std::size_t errors_found = 0;
    std::size_t erasures_used = 0;

    bool corrected() const { return status == DecodeStatus::corrected; }
};

// Monic generator with roots alpha^fre .. alpha^(fre + n-k - 1).
inline gf::Polynomial rs_generator(const RsConfig& cfg) {
    cfg.validate();
    gf::Polynomial g{1};
    for (std::size_t i = 0; i < cfg.parity(); ++i) {
        const gf::Element root = gf::exp(cfg.first_root_exponent + static_cast<unsigned>(i));
        g = gf::poly_mul(g, gf::Polynomial{root, 1});  // (x + root)
    }
    return g;
}

class RsCodec {
public:
    explicit RsCodec(RsConfig cfg) : cfg_(cfg), gen_(rs_generator(cfg)) {}

    const RsConfig& config() const { return cfg_; }
    const gf::Polynomial& generator() const { return gen_; }

    RsCodeword encode(std::span<const gf::Element> message) const {
        if (message.size() != cfg_.k)
            throw std::invalid_argument("rs: message length must equal k");
        RsCodeword cw;
        cw.symbols.assign(message.begin(), message.end());
        cw.symbols.resize(cfg_.n, 0);
        if (cfg_.parity() == 0) return cw;
        // Long division of message(x) * x^(n-k) by the generator; the running
        // remainder lives in the parity tail.
        const std::size_t t2 = cfg_.parity();
        for (std::size_t i = 0; i < cfg_.k; ++i) {
            const gf::Element factor = gf::add(message[i], cw.symbols[cfg_.k + 0]);
            // Shift the remainder window left by one.
            for (std::size_t j = 0; j + 1 < t2; ++j) cw.symbols[cfg_.k + j] = cw.symbols[cfg_.k + j + 1];
            cw.symbols[cfg_.n - 1] = 0;
            if (factor != 0) {
                for (std::size_t j = 0; j < t2; ++j) {
                    // gen_ is lowest-first; coefficient of x^(t2-1-j) pairs with tail slot j.
                    cw.symbols[cfg_.k + j] ^= gf::mul(factor, gen_[t2 - 1 - j]);
                }
            }
        }
        return cw;
    }

    DecodeOutcome decode(std::span<const gf::Element> received,
                         std::span<const std::size_t> erasure_positions = {}) const {
        if (received.size() != cfg_.n)
            throw std::invalid_argument("rs: received length must equal n");
        std::set<std::size_t> erasures(erasure_positions.begin(), erasure_positions.end());
        if (erasures.size() != erasure_positions.size())
            throw std::invalid_argument("rs: duplicate erasure positions");
        for (std::size_t p : erasures)
            if (p >= cfg_.n) throw std::invalid_argument("rs: erasure position out of range");
        if (erasures.size() > cfg_.parity())
            throw std::invalid_argument("rs: more erasures than parity symbols");

        DecodeOutcome out;
        out.erasures_used = erasures.size();
        out.message.assign(received.begin(), received.begin() + static_cast<std::ptrdiff_t>(cfg_.k));

        const std::size_t t2 = cfg_.parity();
        if (t2 == 0) {  // no redundancy; everything passes through
            out.status = DecodeStatus::corrected;
            return out;
        }

        // Syndromes S_j = r(alpha^(fre+j)); received[0] is the highest coefficient.
        gf::Polynomial synd(t2, 0);
        bool all_zero = true;
        for (std::size_t j = 0; j < t2; ++j) {
            const gf::Element x = gf::exp(cfg_.first_root_exponent + static_cast<unsigned>(j));
            gf::Element acc = 0;
            for (std::size_t i = 0; i < cfg_.n; ++i) acc = gf::add(gf::mul(acc, x), received[i]);
            synd[j] = acc;
            all_zero = all_zero && acc == 0;
        }
        if (all_zero) {
            out.status = DecodeStatus::corrected;
            out.errors_found = 0;
            return out;
        }

        // Erasure locator Gamma(x) = prod (1 + X_p x) with X_p = alpha^(n-1-p).
        gf::Polynomial locator{1};
        for (std::size_t p : erasures) {
            const gf::Element xp = gf::exp(static_cast<unsigned>(cfg_.n - 1 - p));
            locator = gf::poly_mul(locator, gf::Polynomial{1, xp});
        }

        // Berlekamp-Massey seeded with the erasure locator; iterates over the
        // remaining syndrome equations only.
        gf::Polynomial lambda = locator;
        gf::Polynomial prev = locator;
        std::size_t el = erasures.size();
        for (std::size_t r = erasures.size() + 1; r <= t2; ++r) {
            gf::Element discrepancy = 0;
            for (std::size_t i = 0; i < lambda.size(); ++i) {
                if (i <= r - 1 && r - 1 - i < t2)
                    discrepancy = gf::add(discrepancy, gf::mul(lambda[i], synd[r - 1 - i]));
            }
            if (discrepancy == 0) {
                prev.insert(prev.begin(), 0);  // prev *= x
                continue;
            }
            gf::Polynomial shifted = prev;
            shifted.insert(shifted.begin(), 0);
            const gf::Polynomial candidate = gf::poly_add(lambda, gf::poly_scale(shifted, discrepancy));
            if (2 * el <= r + erasures.size() - 1) {
                el = r + erasures.size() - el;
                prev = gf::poly_scale(lambda, gf::inv(discrepancy));
            } else {
                prev.insert(prev.begin(), 0);  // prev *= x
            }
            lambda = candidate;
        }
        gf::poly_trim(lambda);

        const std::size_t deg_lambda = lambda.empty() ? 0 : static_cast<std::size_t>(gf::poly_degree(lambda));
        if (lambda.empty() || deg_lambda < erasures.size() ||
            2 * (deg_lambda - erasures.size()) + erasures.size() > t2) {
            out.status = DecodeStatus::uncorrectable;
            return out;
        }

        // Chien search over valid positions.
        std::vector<std::size_t> error_positions;
        std::vector<gf::Element> roots_x;  // X_p for each found position
        for (std::size_t p = 0; p < cfg_.n; ++p) {
            const gf::Element xp = gf::exp(static_cast<unsigned>(cfg_.n - 1 - p));
            const gf::Element x_inv = gf::inv(xp);
            if (gf::poly_eval(lambda, x_inv) == 0) {
                error_positions.push_back(p);
                roots_x.push_back(xp);
            }
        }
        if (error_positions.size() != deg_lambda) {
            out.status = DecodeStatus::uncorrectable;  // roots outside the word
            return out;
        }

        // Forney: Omega = S * Lambda mod x^(n-k); e_p = X_p^(1-fre) * Omega(X_p^-1) / Lambda'(X_p^-1).
        gf::Polynomial omega = gf::poly_mul(synd, lambda);
        if (omega.size() > t2) omega.resize(t2);
        gf::poly_trim(omega);
        const gf::Polynomial lambda_prime = gf::poly_derivative(lambda);

        std::vector<gf::Element> corrected(received.begin(), received.end());
        std::size_t non_erasure_errors = 0;
        for (std::size_t idx = 0; idx < error_positions.size(); ++idx) {
            const gf::Element x = roots_x[idx];
            const gf::Element x_inv = gf::inv(x);
            const gf::Element denom = gf::poly_eval(lambda_prime, x_inv);
            if (denom == 0) {
                out.status = DecodeStatus::uncorrectable;
                return out;
            }
            gf::Element magnitude = gf::div(gf::poly_eval(omega, x_inv), denom);
            // Scale by X^(1-fre).
            const unsigned lx = gf::log(x);
            const unsigned scale = (lx * (1 + gf::kOrder - cfg_.first_root_exponent % gf::kOrder)) % gf::kOrder;
            magnitude = gf::mul(magnitude, gf::exp(scale));
            if (magnitude != 0 && erasures.find(error_positions[idx]) == erasures.end())
                ++non_erasure_errors;
            corrected[error_positions[idx]] ^= magnitude;
        }

        // Re-check syndromes on the corrected word; a failed check means the
        // error pattern exceeded the guarantee.
        for (std::size_t j = 0; j < t2; ++j) {
            const gf::Element x = gf::exp(cfg_.first_root_exponent + static_cast<unsigned>(j));
            gf::Element acc = 0;
            for (std::size_t i = 0; i < cfg_.n; ++i) acc = gf::add(gf::mul(acc, x), corrected[i]);
            if (acc != 0) {
                out.status = DecodeStatus::uncorrectable;
                return out;
            }
        }
        if (2 * non_erasure_errors + erasures.size() > t2) {
            out.status = DecodeStatus::uncorrectable;
            return out;
        }

        out.status = DecodeStatus::corrected;
        out.errors_found = non_erasure_errors;
        out.message.assign(corrected.begin(), corrected.begin() + static_cast<std::ptrdiff_t>(cfg_.k));
        return out;
    }

private:
    RsConfig cfg_;
    gf::Polynomial gen_;
};

inline RsCodeword rs_encode(std::span<const gf::Element> message, const RsConfig& cfg) {
    return RsCodec(cfg).encode(message);
}

inline DecodeOutcome rs_decode(std::span<const gf::Element> received,
                               std::span<const std::size_t> erasures, const RsConfig& cfg) {
    return RsCodec(cfg).decode(received, erasures);
}

}  // namespace dnastore::rs
