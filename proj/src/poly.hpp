#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bigint.hpp"

namespace ppa {

// Exponent tuple of a monomial; length equals the polynomial's arity.
using Exponents = std::vector<uint32_t>;

// Graded lexicographic order: total degree first, then lexicographic.
struct GradedLex {
    bool operator()(const Exponents& a, const Exponents& b) const;
};

// Multivariate polynomial over Z in parameters t1..tk (arity = k).
// Canonical form: no zero coefficients stored, every exponent tuple has
// length `arity`. Values are immutable in spirit: all operations return
// new polynomials.
class Poly {
  public:
    using TermMap = std::map<Exponents, Int, GradedLex>;

    Poly() : arity_(0) {}
    explicit Poly(size_t arity) : arity_(arity) {}

    static Poly constant(size_t arity, Int c);
    static Poly param(size_t arity, size_t index);  // the monomial t_{index}

    size_t arity() const { return arity_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    // Value of a constant polynomial (0 if zero).
    Int constant_value() const;
    const TermMap& terms() const { return terms_; }
    size_t total_degree() const;

    Poly operator-() const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly pow(uint32_t e) const;

    bool operator==(const Poly& o) const { return arity_ == o.arity_ && terms_ == o.terms_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }
    // Total order (arity, then graded-lex on the term list); used for
    // deterministic scalar-term sequences.
    bool less(const Poly& o) const;

    // Sign of the graded-lex-leading coefficient (0 for the zero polynomial).
    int leading_sign() const;

    Int eval(std::span<const Int> point) const;
    // Substitute a value for one parameter, producing a polynomial of arity-1.
    Poly freeze_param(size_t index, const Int& value) const;

    std::string to_string(std::span<const std::string> names) const;

    void add_term(const Exponents& e, const Int& c);  // canonicalizing

  private:
    void check_same_arity(const Poly& o) const;

    size_t arity_;
    TermMap terms_;
};

inline bool operator<(const Poly& a, const Poly& b) { return a.less(b); }

}  // namespace ppa
