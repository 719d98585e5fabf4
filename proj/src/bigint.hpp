#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ppa {

using Int = mpz_class;
using Rat = mpq_class;

// A user/input problem (bad syntax, arity mismatch, invalid instance, ...).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A configured budget was exhausted; the computation was aborted, never answered wrongly.
struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline int sign(const Int& a) { return mpz_sgn(a.get_mpz_t()); }

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

// Floor division and the matching nonnegative remainder.
inline Int floor_div(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Int ceil_div(const Int& a, const Int& b) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Int mod_floor(const Int& a, const Int& b) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline bool divides(const Int& m, const Int& a) {
    if (m == 0) return a == 0;
    return mpz_divisible_p(a.get_mpz_t(), m.get_mpz_t()) != 0;
}

inline Int gcd(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Int lcm(const Int& a, const Int& b) {
    Int l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

// g = gcd(a, b) = x*a + y*b, g >= 0.
inline Int egcd(const Int& a, const Int& b, Int& x, Int& y) {
    Int g;
    mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Int pow_ui(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

// Number of bits of |a|; 0 for a = 0.
inline size_t bit_length(const Int& a) {
    if (a == 0) return 0;
    return mpz_sizeinbase(a.get_mpz_t(), 2);
}

inline Int parse_int(const std::string& s) {
    Int v;
    if (mpz_set_str(v.get_mpz_t(), s.c_str(), 10) != 0)
        throw UsageError("not an integer: '" + s + "'");
    return v;
}

inline long to_long(const Int& a) {
    if (!a.fits_slong_p()) throw ResourceLimit("integer too large for machine range: " + a.get_str());
    return a.get_si();
}

}  // namespace ppa
