#pragma once

#include <optional>
#include <string>
#include <vector>

#include "formula.hpp"

namespace ppa {

struct CooperOptions {
    // Abort once any coefficient/constant/modulus magnitude reaches 2^max_bits,
    // or an intermediate formula grows past max_atoms atoms. The worst case
    // is triply exponential; exceeding a budget is an error, not an answer.
    size_t max_bits = 20000;
    size_t max_atoms = 2000000;
};

// Per-eliminated-variable witness data: any satisfying assignment can be
// assumed to take this variable within the span of `candidates` shifted by
// at most 2*delta. Used to derive certified boxes for oracle cross-checks.
struct ElimCert {
    std::string var;
    std::vector<GTerm> candidates;  // terms over variables still present
    Int delta;
};

// Quantifier-free equivalent of (exists var. f), f quantifier-free NNF.
// May introduce divisibility atoms.
NodePtr<Int> eliminate_exists(const NodePtr<Int>& f, const std::string& var, size_t k,
                              const CooperOptions& opts = {}, ElimCert* cert = nullptr);

// Full elimination: prenex, then eliminate quantifiers innermost-out
// (universals via negation). Certs are recorded innermost-first.
GroundFormula qe(const GroundFormula& f, const CooperOptions& opts = {},
                 std::vector<ElimCert>* certs = nullptr);

bool decide_sentence(const GroundFormula& f, const CooperOptions& opts = {});

struct GrowthStats {
    Int c;  // distinct integers among variable coefficients and divisors
    Int s;  // largest |value| among coefficients, divisors, constants
    Int a;  // number of atoms
};

GrowthStats growth_stats(const GroundFormula& f);

struct GrowthReport {
    GrowthStats before, after;
    int quantifiers = 0;
    bool bound_ok = false;
};

// Compares the elimination's measured growth against
//   c' <= c^(4^m),  s' <= s^((4c)^(4^m)),  a' <= a^(4^m) * s^((4c)^(4^m)).
GrowthReport growth_report(const GroundFormula& f, const CooperOptions& opts = {});

// From innermost-first certificates, a per-variable box radius (prefix
// order) such that bounded and unbounded readings of the sentence agree.
std::vector<std::pair<std::string, Int>> certified_radii(const std::vector<ElimCert>& certs);

}  // namespace ppa
