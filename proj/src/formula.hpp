#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bigint.hpp"
#include "poly.hpp"

namespace ppa {

// Coefficient ring plumbing shared by parametric (Poly) and ground (Int) formulas.
template <class C>
struct Ring;

template <>
struct Ring<Int> {
    static Int zero(size_t) { return Int(0); }
    static Int one(size_t) { return Int(1); }
    static Int neg(const Int& c) { return -c; }
    static bool is_zero(const Int& c) { return c == 0; }
    static int lead_sign(const Int& c) { return sign(c); }
    static bool less(const Int& a, const Int& b) { return a < b; }
};

template <>
struct Ring<Poly> {
    static Poly zero(size_t k) { return Poly(k); }
    static Poly one(size_t k) { return Poly::constant(k, 1); }
    static Poly neg(const Poly& c) { return -c; }
    static bool is_zero(const Poly& c) { return c.is_zero(); }
    static int lead_sign(const Poly& c) { return c.leading_sign(); }
    static bool less(const Poly& a, const Poly& b) { return a.less(b); }
};

// Integer-linear form over group variables: sum coeffs[v]*v + constant.
// No zero coefficient is stored.
template <class C>
struct TermT {
    std::map<std::string, C> coeffs;
    C constant{};

    void add_var(const std::string& v, const C& c);
    TermT neg() const;
    TermT plus(const TermT& o) const;
    TermT minus(const TermT& o) const;
    TermT scaled(const C& c) const;
    bool operator==(const TermT& o) const { return coeffs == o.coeffs && constant == o.constant; }
};

using Term = TermT<Poly>;
using GTerm = TermT<Int>;

enum class AtomKind { LessEq, Equal, Divides };  // term <= 0, term = 0, modulus | term

template <class C>
struct AtomT {
    AtomKind kind = AtomKind::LessEq;
    C modulus{};  // Divides only
    TermT<C> term;
    bool operator==(const AtomT& o) const {
        return kind == o.kind && modulus == o.modulus && term == o.term;
    }
};

using Atom = AtomT<Poly>;
using GAtom = AtomT<Int>;

enum class NodeKind { Atom, And, Or, Not, Exists, Forall };

template <class C>
struct NodeT;
template <class C>
using NodePtr = std::shared_ptr<const NodeT<C>>;

// Immutable formula tree. And/Or are n-ary; And() is "true", Or() is "false".
template <class C>
struct NodeT {
    NodeKind kind;
    AtomT<C> atom;                   // Atom
    std::vector<NodePtr<C>> kids;    // And/Or (n children), Not (1)
    std::string var;                 // Exists/Forall
    NodePtr<C> body;                 // Exists/Forall
};

using Node = NodeT<Poly>;
using GNode = NodeT<Int>;

template <class C> NodePtr<C> mk_atom(AtomT<C> a);
// Canonicalizing atom constructors: Equal/Divides terms are sign-normalized,
// Divides moduli made leading-positive. A zero Divides modulus is rejected.
template <class C> NodePtr<C> mk_leq(TermT<C> t);
template <class C> NodePtr<C> mk_eq(TermT<C> t);
template <class C> NodePtr<C> mk_div(C modulus, TermT<C> t);
template <class C> NodePtr<C> mk_and(std::vector<NodePtr<C>> kids);
template <class C> NodePtr<C> mk_or(std::vector<NodePtr<C>> kids);
template <class C> NodePtr<C> mk_not(NodePtr<C> kid);
template <class C> NodePtr<C> mk_quant(bool universal, std::string var, NodePtr<C> body);
template <class C> NodePtr<C> mk_true() { return mk_and<C>({}); }
template <class C> NodePtr<C> mk_false() { return mk_or<C>({}); }
// a -> b, as (not a) or b.
template <class C> NodePtr<C> mk_implies(NodePtr<C> a, NodePtr<C> b);

template <class C> bool is_true(const NodePtr<C>& n);
template <class C> bool is_false(const NodePtr<C>& n);
template <class C> bool node_equal(const NodePtr<C>& a, const NodePtr<C>& b);

// A formula file: parameter names, free variable names (in declaration
// order, which fixes the point-tuple order everywhere), and the body.
template <class C>
struct FormulaT {
    std::vector<std::string> params;
    std::vector<std::string> vars;
    NodePtr<C> root;

    size_t arity() const { return params.size(); }
};

using Formula = FormulaT<Poly>;
using GroundFormula = FormulaT<Int>;

// ---- Structure queries ----

template <class C> bool node_has_quantifier(const NodePtr<C>& n);
template <class C> void collect_free_vars(const NodePtr<C>& n, std::vector<std::string>& out);
template <class C> bool uses_var(const NodePtr<C>& n, const std::string& v);
// All bound-variable names occurring anywhere (including shadowed ones).
template <class C> void collect_bound_vars(const NodePtr<C>& n, std::vector<std::string>& out);

// ---- Transformations ----

// Flatten and constant-fold: nested And/Or merged, true/false absorbed,
// double negation removed, duplicate children dropped, variable-free
// constant atoms evaluated.
template <class C> NodePtr<C> simplify(const NodePtr<C>& n, size_t k);

// Negation normal form: negation pushed to atoms; "not (t <= 0)" is
// rewritten to "-t + 1 <= 0"; negated Equal/Divides stay as literals.
template <class C> NodePtr<C> to_nnf(const NodePtr<C>& n, size_t k);

struct QuantBlockVar {
    bool universal;
    std::string var;
};

// NNF + prenex with deterministic fresh renaming. Same-polarity prefix
// heads from sibling subtrees are merged to keep alternation minimal.
template <class C>
void prenex_parts(const FormulaT<C>& f, std::vector<QuantBlockVar>& prefix, NodePtr<C>& matrix);

template <class C> FormulaT<C> to_prenex_nnf(const FormulaT<C>& f);

// Disjunctive normal form of a quantifier-free formula.
template <class C> NodePtr<C> to_dnf(const NodePtr<C>& n, size_t k);

struct Alternation {
    int blocks = 0;          // 0 = quantifier-free
    bool first_exists = true;
    std::string to_string() const;
};

template <class C> Alternation classify_alternation(const FormulaT<C>& f);

// Substitute parameter values; Divides atoms whose modulus evaluates to 0
// are rewritten to Equal atoms.
GroundFormula substitute_params(const Formula& f, std::span<const Int> values);

// Substitute var := replacement everywhere (ground formulas; used by QE).
NodePtr<Int> subst_var(const NodePtr<Int>& n, const std::string& var, const GTerm& replacement);

// ---- Rendering ----

template <class C> std::string render_body(const FormulaT<C>& f);
template <class C> std::string render(const FormulaT<C>& f);  // full file format

}  // namespace ppa
