#include "formula.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ppa {

// ---- TermT ----

template <class C>
void TermT<C>::add_var(const std::string& v, const C& c) {
    auto it = coeffs.find(v);
    if (it == coeffs.end()) {
        if (!Ring<C>::is_zero(c)) coeffs.emplace(v, c);
        return;
    }
    it->second = it->second + c;
    if (Ring<C>::is_zero(it->second)) coeffs.erase(it);
}

template <class C>
TermT<C> TermT<C>::neg() const {
    TermT<C> r;
    r.constant = Ring<C>::neg(constant);
    for (const auto& [v, c] : coeffs) r.coeffs.emplace(v, Ring<C>::neg(c));
    return r;
}

template <class C>
TermT<C> TermT<C>::plus(const TermT& o) const {
    TermT<C> r = *this;
    r.constant = r.constant + o.constant;
    for (const auto& [v, c] : o.coeffs) r.add_var(v, c);
    return r;
}

template <class C>
TermT<C> TermT<C>::minus(const TermT& o) const {
    return plus(o.neg());
}

template <class C>
TermT<C> TermT<C>::scaled(const C& s) const {
    TermT<C> r;
    r.constant = constant * s;
    if (Ring<C>::is_zero(s)) return r;
    for (const auto& [v, c] : coeffs) {
        C p = c * s;
        if (!Ring<C>::is_zero(p)) r.coeffs.emplace(v, std::move(p));
    }
    return r;
}

// ---- Node constructors ----

template <class C>
NodePtr<C> mk_atom(AtomT<C> a) {
    auto n = std::make_shared<NodeT<C>>();
    n->kind = NodeKind::Atom;
    n->atom = std::move(a);
    return n;
}

template <class C>
NodePtr<C> mk_leq(TermT<C> t) {
    AtomT<C> a;
    a.kind = AtomKind::LessEq;
    a.term = std::move(t);
    return mk_atom(std::move(a));
}

// Sign of the first name-ordered variable coefficient, else of the constant.
template <class C>
static int term_lead_sign(const TermT<C>& t) {
    if (!t.coeffs.empty()) return Ring<C>::lead_sign(t.coeffs.begin()->second);
    return Ring<C>::lead_sign(t.constant);
}

template <class C>
NodePtr<C> mk_eq(TermT<C> t) {
    if (term_lead_sign(t) < 0) t = t.neg();
    AtomT<C> a;
    a.kind = AtomKind::Equal;
    a.term = std::move(t);
    return mk_atom(std::move(a));
}

template <class C>
NodePtr<C> mk_div(C modulus, TermT<C> t) {
    if (Ring<C>::is_zero(modulus)) throw UsageError("zero divisibility modulus");
    if (Ring<C>::lead_sign(modulus) < 0) modulus = Ring<C>::neg(modulus);
    if (term_lead_sign(t) < 0) t = t.neg();
    AtomT<C> a;
    a.kind = AtomKind::Divides;
    a.modulus = std::move(modulus);
    a.term = std::move(t);
    return mk_atom(std::move(a));
}

template <class C>
NodePtr<C> mk_and(std::vector<NodePtr<C>> kids) {
    auto n = std::make_shared<NodeT<C>>();
    n->kind = NodeKind::And;
    n->kids = std::move(kids);
    return n;
}

template <class C>
NodePtr<C> mk_or(std::vector<NodePtr<C>> kids) {
    auto n = std::make_shared<NodeT<C>>();
    n->kind = NodeKind::Or;
    n->kids = std::move(kids);
    return n;
}

template <class C>
NodePtr<C> mk_not(NodePtr<C> kid) {
    auto n = std::make_shared<NodeT<C>>();
    n->kind = NodeKind::Not;
    n->kids.push_back(std::move(kid));
    return n;
}

template <class C>
NodePtr<C> mk_quant(bool universal, std::string var, NodePtr<C> body) {
    auto n = std::make_shared<NodeT<C>>();
    n->kind = universal ? NodeKind::Forall : NodeKind::Exists;
    n->var = std::move(var);
    n->body = std::move(body);
    return n;
}

template <class C>
NodePtr<C> mk_implies(NodePtr<C> a, NodePtr<C> b) {
    return mk_or<C>({mk_not<C>(std::move(a)), std::move(b)});
}

template <class C>
bool is_true(const NodePtr<C>& n) {
    return n->kind == NodeKind::And && n->kids.empty();
}

template <class C>
bool is_false(const NodePtr<C>& n) {
    return n->kind == NodeKind::Or && n->kids.empty();
}

template <class C>
bool node_equal(const NodePtr<C>& a, const NodePtr<C>& b) {
    if (a.get() == b.get()) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case NodeKind::Atom:
            return a->atom == b->atom;
        case NodeKind::And:
        case NodeKind::Or:
        case NodeKind::Not: {
            if (a->kids.size() != b->kids.size()) return false;
            for (size_t i = 0; i < a->kids.size(); ++i)
                if (!node_equal(a->kids[i], b->kids[i])) return false;
            return true;
        }
        case NodeKind::Exists:
        case NodeKind::Forall:
            return a->var == b->var && node_equal(a->body, b->body);
    }
    return false;
}

// ---- Structure queries ----

template <class C>
bool node_has_quantifier(const NodePtr<C>& n) {
    switch (n->kind) {
        case NodeKind::Atom: return false;
        case NodeKind::Exists:
        case NodeKind::Forall: return true;
        default:
            for (const auto& k : n->kids)
                if (node_has_quantifier(k)) return true;
            return false;
    }
}

template <class C>
static void collect_free_vars_rec(const NodePtr<C>& n, std::set<std::string>& bound,
                                  std::vector<std::string>& out) {
    switch (n->kind) {
        case NodeKind::Atom:
            for (const auto& [v, c] : n->atom.term.coeffs)
                if (!bound.count(v) && std::find(out.begin(), out.end(), v) == out.end())
                    out.push_back(v);
            break;
        case NodeKind::Exists:
        case NodeKind::Forall: {
            bool inserted = bound.insert(n->var).second;
            collect_free_vars_rec(n->body, bound, out);
            if (inserted) bound.erase(n->var);
            break;
        }
        default:
            for (const auto& k : n->kids) collect_free_vars_rec(k, bound, out);
    }
}

template <class C>
void collect_free_vars(const NodePtr<C>& n, std::vector<std::string>& out) {
    std::set<std::string> bound;
    collect_free_vars_rec(n, bound, out);
}

template <class C>
bool uses_var(const NodePtr<C>& n, const std::string& v) {
    switch (n->kind) {
        case NodeKind::Atom: return n->atom.term.coeffs.count(v) != 0;
        case NodeKind::Exists:
        case NodeKind::Forall:
            if (n->var == v) return false;
            return uses_var(n->body, v);
        default:
            for (const auto& k : n->kids)
                if (uses_var(k, v)) return true;
            return false;
    }
}

template <class C>
void collect_bound_vars(const NodePtr<C>& n, std::vector<std::string>& out) {
    switch (n->kind) {
        case NodeKind::Atom: return;
        case NodeKind::Exists:
        case NodeKind::Forall:
            out.push_back(n->var);
            collect_bound_vars(n->body, out);
            return;
        default:
            for (const auto& k : n->kids) collect_bound_vars(k, out);
    }
}

// ---- simplify ----

template <class C>
static bool atom_constant_value(const AtomT<C>& a, bool& out);

template <>
bool atom_constant_value(const AtomT<Int>& a, bool& out) {
    if (!a.term.coeffs.empty()) return false;
    switch (a.kind) {
        case AtomKind::LessEq: out = a.term.constant <= 0; return true;
        case AtomKind::Equal: out = a.term.constant == 0; return true;
        case AtomKind::Divides: out = divides(a.modulus, a.term.constant); return true;
    }
    return false;
}

template <>
bool atom_constant_value(const AtomT<Poly>& a, bool& out) {
    if (!a.term.coeffs.empty() || !a.term.constant.is_constant()) return false;
    Int c = a.term.constant.constant_value();
    switch (a.kind) {
        case AtomKind::LessEq: out = c <= 0; return true;
        case AtomKind::Equal: out = c == 0; return true;
        case AtomKind::Divides:
            if (!a.modulus.is_constant()) return false;
            out = divides(a.modulus.constant_value(), c);
            return true;
    }
    return false;
}

template <class C>
NodePtr<C> simplify(const NodePtr<C>& n, size_t k) {
    switch (n->kind) {
        case NodeKind::Atom: {
            bool v;
            if (atom_constant_value(n->atom, v)) return v ? mk_true<C>() : mk_false<C>();
            return n;
        }
        case NodeKind::Not: {
            NodePtr<C> kid = simplify(n->kids[0], k);
            if (is_true(kid)) return mk_false<C>();
            if (is_false(kid)) return mk_true<C>();
            if (kid->kind == NodeKind::Not) return kid->kids[0];
            return mk_not(std::move(kid));
        }
        case NodeKind::And:
        case NodeKind::Or: {
            bool conj = n->kind == NodeKind::And;
            std::vector<NodePtr<C>> out;
            for (const auto& kid0 : n->kids) {
                NodePtr<C> kid = simplify(kid0, k);
                if (conj ? is_true(kid) : is_false(kid)) continue;
                if (conj ? is_false(kid) : is_true(kid))
                    return conj ? mk_false<C>() : mk_true<C>();
                if (kid->kind == n->kind) {
                    for (const auto& g : kid->kids) out.push_back(g);
                } else {
                    out.push_back(std::move(kid));
                }
            }
            std::vector<NodePtr<C>> dedup;
            for (auto& kid : out) {
                bool seen = false;
                for (const auto& g : dedup)
                    if (node_equal(g, kid)) { seen = true; break; }
                if (!seen) dedup.push_back(std::move(kid));
            }
            if (dedup.size() == 1) return dedup[0];
            return conj ? mk_and(std::move(dedup)) : mk_or(std::move(dedup));
        }
        case NodeKind::Exists:
        case NodeKind::Forall: {
            NodePtr<C> body = simplify(n->body, k);
            if (is_true(body) || is_false(body)) return body;
            if (!uses_var(body, n->var)) return body;
            return mk_quant(n->kind == NodeKind::Forall, n->var, std::move(body));
        }
    }
    return n;
}

// ---- NNF ----

template <class C>
static NodePtr<C> negate_atom(const AtomT<C>& a, size_t k) {
    switch (a.kind) {
        case AtomKind::LessEq: {
            // not (t <= 0)  <=>  -t + 1 <= 0
            TermT<C> t = a.term.neg();
            t.constant = t.constant + Ring<C>::one(k);
            return mk_leq(std::move(t));
        }
        default:
            return mk_not(mk_atom(a));
    }
}

template <class C>
static NodePtr<C> nnf_rec(const NodePtr<C>& n, bool neg, size_t k) {
    switch (n->kind) {
        case NodeKind::Atom:
            return neg ? negate_atom(n->atom, k) : n;
        case NodeKind::Not:
            return nnf_rec(n->kids[0], !neg, k);
        case NodeKind::And:
        case NodeKind::Or: {
            bool conj = (n->kind == NodeKind::And) != neg;
            std::vector<NodePtr<C>> kids;
            kids.reserve(n->kids.size());
            for (const auto& kid : n->kids) kids.push_back(nnf_rec(kid, neg, k));
            return conj ? mk_and(std::move(kids)) : mk_or(std::move(kids));
        }
        case NodeKind::Exists:
        case NodeKind::Forall: {
            bool universal = (n->kind == NodeKind::Forall) != neg;
            return mk_quant(universal, n->var, nnf_rec(n->body, neg, k));
        }
    }
    return n;
}

template <class C>
NodePtr<C> to_nnf(const NodePtr<C>& n, size_t k) {
    return nnf_rec(n, false, k);
}

// ---- prenex ----

namespace {

class FreshNames {
  public:
    explicit FreshNames(std::vector<std::string> seed) {
        for (auto& s : seed) used_.insert(std::move(s));
    }
    // Returns `base` itself when unused, else base_2, base_3, ...
    std::string claim(const std::string& base) {
        if (used_.insert(base).second) return base;
        for (int i = 2;; ++i) {
            std::string cand = base + "_" + std::to_string(i);
            if (used_.insert(cand).second) return cand;
        }
    }

  private:
    std::set<std::string> used_;
};

}  // namespace

template <class C>
static NodePtr<C> rename_var(const NodePtr<C>& n, const std::string& from, const std::string& to) {
    switch (n->kind) {
        case NodeKind::Atom: {
            auto it = n->atom.term.coeffs.find(from);
            if (it == n->atom.term.coeffs.end()) return n;
            AtomT<C> a = n->atom;
            C c = it->second;
            a.term.coeffs.erase(from);
            a.term.add_var(to, c);
            return mk_atom(std::move(a));
        }
        case NodeKind::Exists:
        case NodeKind::Forall: {
            if (n->var == from) return n;  // shadowed
            NodePtr<C> b = rename_var(n->body, from, to);
            if (b.get() == n->body.get()) return n;
            return mk_quant(n->kind == NodeKind::Forall, n->var, std::move(b));
        }
        default: {
            std::vector<NodePtr<C>> kids;
            kids.reserve(n->kids.size());
            bool changed = false;
            for (const auto& kid : n->kids) {
                NodePtr<C> r = rename_var(kid, from, to);
                changed = changed || r.get() != kid.get();
                kids.push_back(std::move(r));
            }
            if (!changed) return n;
            if (n->kind == NodeKind::Not) return mk_not(std::move(kids[0]));
            return n->kind == NodeKind::And ? mk_and(std::move(kids)) : mk_or(std::move(kids));
        }
    }
}

// Prefix depth in alternation blocks.
static int prefix_blocks(const std::vector<QuantBlockVar>& p, size_t from) {
    int blocks = 0;
    for (size_t i = from; i < p.size(); ++i)
        if (blocks == 0 || p[i].universal != p[i - 1].universal) ++blocks;
    return blocks;
}

// Merge sibling prefixes, aligning same-polarity runs to keep the merged
// alternation count at the maximum of the children where possible.
static std::vector<QuantBlockVar> merge_prefixes(std::vector<std::vector<QuantBlockVar>> parts) {
    std::vector<size_t> pos(parts.size(), 0);
    std::vector<QuantBlockVar> out;
    for (;;) {
        int best = -1, best_blocks = -1;
        for (size_t i = 0; i < parts.size(); ++i) {
            if (pos[i] >= parts[i].size()) continue;
            int b = prefix_blocks(parts[i], pos[i]);
            if (b > best_blocks) { best_blocks = b; best = static_cast<int>(i); }
        }
        if (best < 0) break;
        bool polarity = parts[best][pos[best]].universal;
        for (size_t i = 0; i < parts.size(); ++i) {
            while (pos[i] < parts[i].size() && parts[i][pos[i]].universal == polarity)
                out.push_back(parts[i][pos[i]++]);
        }
    }
    return out;
}

template <class C>
static void prenex_rec(const NodePtr<C>& n, FreshNames& names, std::vector<QuantBlockVar>& prefix,
                       NodePtr<C>& matrix) {
    switch (n->kind) {
        case NodeKind::Atom:
        case NodeKind::Not:  // NNF: negation only on atoms
            matrix = n;
            return;
        case NodeKind::Exists:
        case NodeKind::Forall: {
            std::string fresh = names.claim(n->var);
            NodePtr<C> body = n->body;
            if (fresh != n->var) body = rename_var(body, n->var, fresh);
            std::vector<QuantBlockVar> inner;
            NodePtr<C> m;
            prenex_rec(body, names, inner, m);
            prefix.push_back({n->kind == NodeKind::Forall, fresh});
            prefix.insert(prefix.end(), inner.begin(), inner.end());
            matrix = m;
            return;
        }
        case NodeKind::And:
        case NodeKind::Or: {
            std::vector<std::vector<QuantBlockVar>> parts;
            std::vector<NodePtr<C>> mats;
            for (const auto& kid : n->kids) {
                std::vector<QuantBlockVar> p;
                NodePtr<C> m;
                prenex_rec(kid, names, p, m);
                parts.push_back(std::move(p));
                mats.push_back(std::move(m));
            }
            std::vector<QuantBlockVar> merged = merge_prefixes(std::move(parts));
            prefix.insert(prefix.end(), merged.begin(), merged.end());
            matrix = n->kind == NodeKind::And ? mk_and(std::move(mats)) : mk_or(std::move(mats));
            return;
        }
    }
}

template <class C>
void prenex_parts(const FormulaT<C>& f, std::vector<QuantBlockVar>& prefix, NodePtr<C>& matrix) {
    NodePtr<C> n = simplify(to_nnf(f.root, f.arity()), f.arity());
    std::vector<std::string> seed = f.params;
    seed.insert(seed.end(), f.vars.begin(), f.vars.end());
    FreshNames names(std::move(seed));
    prefix.clear();
    prenex_rec(n, names, prefix, matrix);
    // Quantifiers over variables the matrix never mentions are dropped.
    std::vector<QuantBlockVar> kept;
    for (const auto& q : prefix)
        if (uses_var(matrix, q.var)) kept.push_back(q);
    prefix = std::move(kept);
}

template <class C>
FormulaT<C> to_prenex_nnf(const FormulaT<C>& f) {
    std::vector<QuantBlockVar> prefix;
    NodePtr<C> matrix;
    prenex_parts(f, prefix, matrix);
    NodePtr<C> body = matrix;
    for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
        body = mk_quant<C>(it->universal, it->var, std::move(body));
    return {f.params, f.vars, std::move(body)};
}

// ---- DNF ----

template <class C>
NodePtr<C> to_dnf(const NodePtr<C>& n0, size_t k) {
    if (node_has_quantifier(n0)) throw UsageError("DNF requires a quantifier-free formula");
    NodePtr<C> n = simplify(to_nnf(n0, k), k);
    constexpr size_t kMaxConjuncts = 2000000;

    struct Walker {
        size_t k;
        std::vector<std::vector<NodePtr<C>>> run(const NodePtr<C>& m) {
            switch (m->kind) {
                case NodeKind::Atom:
                case NodeKind::Not:
                    return {{m}};
                case NodeKind::Or: {
                    std::vector<std::vector<NodePtr<C>>> all;
                    for (const auto& kid : m->kids) {
                        auto part = run(kid);
                        all.insert(all.end(), part.begin(), part.end());
                        if (all.size() > kMaxConjuncts) throw ResourceLimit("DNF size limit");
                    }
                    return all;
                }
                case NodeKind::And: {
                    std::vector<std::vector<NodePtr<C>>> acc = {{}};
                    for (const auto& kid : m->kids) {
                        auto part = run(kid);
                        std::vector<std::vector<NodePtr<C>>> next;
                        for (const auto& a : acc)
                            for (const auto& b : part) {
                                std::vector<NodePtr<C>> c = a;
                                c.insert(c.end(), b.begin(), b.end());
                                next.push_back(std::move(c));
                                if (next.size() > kMaxConjuncts)
                                    throw ResourceLimit("DNF size limit");
                            }
                        acc = std::move(next);
                    }
                    return acc;
                }
                default:
                    throw UsageError("DNF requires a quantifier-free formula");
            }
        }
    };

    if (is_true(n) || is_false(n)) return n;
    Walker w{k};
    auto conjuncts = w.run(n);
    std::vector<NodePtr<C>> ors;
    for (auto& lits : conjuncts) {
        std::vector<NodePtr<C>> dedup;
        for (auto& l : lits) {
            bool seen = false;
            for (const auto& g : dedup)
                if (node_equal(g, l)) { seen = true; break; }
            if (!seen) dedup.push_back(std::move(l));
        }
        ors.push_back(mk_and(std::move(dedup)));
    }
    return simplify(mk_or(std::move(ors)), k);
}

// ---- classification ----

std::string Alternation::to_string() const {
    if (blocks == 0) return "quantifier-free";
    return (first_exists ? "sigma " : "pi ") + std::to_string(blocks);
}

template <class C>
Alternation classify_alternation(const FormulaT<C>& f) {
    std::vector<QuantBlockVar> prefix;
    NodePtr<C> matrix;
    prenex_parts(f, prefix, matrix);
    Alternation a;
    a.blocks = prefix_blocks(prefix, 0);
    a.first_exists = prefix.empty() ? true : !prefix[0].universal;
    return a;
}

// ---- substitution ----

GroundFormula substitute_params(const Formula& f, std::span<const Int> values) {
    if (values.size() != f.arity()) throw UsageError("parameter tuple length mismatch");

    struct Walker {
        std::span<const Int> values;
        NodePtr<Int> run(const NodePtr<Poly>& n) {
            switch (n->kind) {
                case NodeKind::Atom: {
                    GTerm t;
                    t.constant = n->atom.term.constant.eval(values);
                    for (const auto& [v, c] : n->atom.term.coeffs) t.add_var(v, c.eval(values));
                    switch (n->atom.kind) {
                        case AtomKind::LessEq: return mk_leq(std::move(t));
                        case AtomKind::Equal: return mk_eq(std::move(t));
                        case AtomKind::Divides: {
                            Int m = n->atom.modulus.eval(values);
                            // 0 | e  <=>  e = 0
                            if (m == 0) return mk_eq(std::move(t));
                            return mk_div(std::move(m), std::move(t));
                        }
                    }
                    throw std::logic_error("bad atom");
                }
                case NodeKind::Not: return mk_not(run(n->kids[0]));
                case NodeKind::And:
                case NodeKind::Or: {
                    std::vector<NodePtr<Int>> kids;
                    kids.reserve(n->kids.size());
                    for (const auto& kid : n->kids) kids.push_back(run(kid));
                    return n->kind == NodeKind::And ? mk_and(std::move(kids))
                                                    : mk_or(std::move(kids));
                }
                case NodeKind::Exists:
                case NodeKind::Forall:
                    return mk_quant(n->kind == NodeKind::Forall, n->var, run(n->body));
            }
            throw std::logic_error("bad node");
        }
    };

    Walker w{values};
    return {{}, f.vars, w.run(f.root)};
}

NodePtr<Int> subst_var(const NodePtr<Int>& n, const std::string& var, const GTerm& replacement) {
    switch (n->kind) {
        case NodeKind::Atom: {
            auto it = n->atom.term.coeffs.find(var);
            if (it == n->atom.term.coeffs.end()) return n;
            Int c = it->second;
            GTerm t = n->atom.term;
            t.coeffs.erase(var);
            t = t.plus(replacement.scaled(c));
            switch (n->atom.kind) {
                case AtomKind::LessEq: return mk_leq(std::move(t));
                case AtomKind::Equal: return mk_eq(std::move(t));
                case AtomKind::Divides: return mk_div(Int(n->atom.modulus), std::move(t));
            }
            throw std::logic_error("bad atom");
        }
        case NodeKind::Not: return mk_not(subst_var(n->kids[0], var, replacement));
        case NodeKind::And:
        case NodeKind::Or: {
            std::vector<NodePtr<Int>> kids;
            kids.reserve(n->kids.size());
            for (const auto& kid : n->kids) kids.push_back(subst_var(kid, var, replacement));
            return n->kind == NodeKind::And ? mk_and(std::move(kids)) : mk_or(std::move(kids));
        }
        case NodeKind::Exists:
        case NodeKind::Forall:
            if (n->var == var) return n;
            return mk_quant(n->kind == NodeKind::Forall, n->var, subst_var(n->body, var, replacement));
    }
    throw std::logic_error("bad node");
}

// ---- rendering ----

namespace {

template <class C>
struct CoefStr;

template <>
struct CoefStr<Int> {
    static std::string atom_str(const Int& c) { return c.get_str(); }
    static bool is_one(const Int& c) { return c == 1; }
    static bool needs_parens(const Int&) { return false; }
    static std::string str(const Int& c, std::span<const std::string>) { return c.get_str(); }
};

template <>
struct CoefStr<Poly> {
    static bool is_one(const Poly& c) { return c.is_constant() && c.constant_value() == 1; }
    static bool needs_parens(const Poly& c) { return c.terms().size() > 1; }
    static std::string str(const Poly& c, std::span<const std::string> params) {
        return c.to_string(params);
    }
};

// One side of a rendered comparison: products plus a constant part.
template <class C>
struct SideItems {
    std::vector<std::pair<C, std::string>> products;  // coefficient (lead-positive), var
    std::vector<C> consts;                            // lead-positive addends
    bool empty() const { return products.empty() && consts.empty(); }
};

template <class C>
void split_sides(const TermT<C>& t, SideItems<C>& lhs, SideItems<C>& rhs);

template <>
void split_sides(const TermT<Int>& t, SideItems<Int>& lhs, SideItems<Int>& rhs) {
    for (const auto& [v, c] : t.coeffs) {
        if (c > 0) lhs.products.emplace_back(c, v);
        else rhs.products.emplace_back(-c, v);
    }
    if (t.constant > 0) lhs.consts.push_back(t.constant);
    else if (t.constant < 0) rhs.consts.push_back(-t.constant);
}

template <>
void split_sides(const TermT<Poly>& t, SideItems<Poly>& lhs, SideItems<Poly>& rhs) {
    for (const auto& [v, c] : t.coeffs) {
        if (c.leading_sign() > 0) lhs.products.emplace_back(c, v);
        else rhs.products.emplace_back(-c, v);
    }
    // Constant monomials split by sign so each side reads positively.
    Poly pos(t.constant.arity()), neg(t.constant.arity());
    for (const auto& [e, c] : t.constant.terms()) {
        if (c > 0) pos.add_term(e, c);
        else neg.add_term(e, -c);
    }
    if (!pos.is_zero()) lhs.consts.push_back(std::move(pos));
    if (!neg.is_zero()) rhs.consts.push_back(std::move(neg));
}

template <class C>
std::string side_str(const SideItems<C>& side, std::span<const std::string> params) {
    if (side.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [c, v] : side.products) {
        if (!first) out << " + ";
        first = false;
        if (CoefStr<C>::is_one(c)) {
            out << v;
        } else if (CoefStr<C>::needs_parens(c)) {
            out << "(" << CoefStr<C>::str(c, params) << ")*" << v;
        } else {
            out << CoefStr<C>::str(c, params) << "*" << v;
        }
    }
    for (const auto& c : side.consts) {
        if (!first) out << " + ";
        first = false;
        out << CoefStr<C>::str(c, params);
    }
    return out.str();
}

// Signed sum form, used on the right of '|'.
template <class C>
std::string term_str(const TermT<C>& t, std::span<const std::string> params) {
    SideItems<C> lhs, rhs;
    split_sides(t, lhs, rhs);
    if (lhs.empty() && rhs.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [c, v] : lhs.products) {
        if (!first) out << " + ";
        first = false;
        if (CoefStr<C>::is_one(c)) out << v;
        else if (CoefStr<C>::needs_parens(c)) out << "(" << CoefStr<C>::str(c, params) << ")*" << v;
        else out << CoefStr<C>::str(c, params) << "*" << v;
    }
    for (const auto& c : lhs.consts) {
        if (!first) out << " + ";
        first = false;
        out << CoefStr<C>::str(c, params);
    }
    for (const auto& [c, v] : rhs.products) {
        if (first) { out << "-"; first = false; } else out << " - ";
        if (CoefStr<C>::is_one(c)) out << v;
        else if (CoefStr<C>::needs_parens(c)) out << "(" << CoefStr<C>::str(c, params) << ")*" << v;
        else out << CoefStr<C>::str(c, params) << "*" << v;
    }
    for (const auto& c : rhs.consts) {
        if (first) { out << "-"; first = false; } else out << " - ";
        out << CoefStr<C>::str(c, params);
    }
    return out.str();
}

template <class C>
std::string atom_str(const AtomT<C>& a, std::span<const std::string> params, bool negated) {
    SideItems<C> lhs, rhs;
    split_sides(a.term, lhs, rhs);
    std::ostringstream out;
    switch (a.kind) {
        case AtomKind::LessEq:
            if (lhs.empty() && !rhs.empty())
                out << side_str(rhs, params) << " >= 0";
            else
                out << side_str(lhs, params) << " <= " << side_str(rhs, params);
            break;
        case AtomKind::Equal:
            out << side_str(lhs, params) << (negated ? " != " : " = ") << side_str(rhs, params);
            break;
        case AtomKind::Divides:
            out << CoefStr<C>::str(a.modulus, params) << " | " << term_str(a.term, params);
            break;
    }
    return out.str();
}

// Precedence: or(1) < and(2) < not(3) < atom(4). Quantifiers swallow
// everything to their right and are parenthesized except at tail position.
template <class C>
void render_node(const NodePtr<C>& n, std::span<const std::string> params, int min_level,
                 bool tail, std::ostringstream& out) {
    switch (n->kind) {
        case NodeKind::Atom:
            out << atom_str(n->atom, params, false);
            return;
        case NodeKind::Not:
            if (n->kids[0]->kind == NodeKind::Atom) {
                const AtomT<C>& a = n->kids[0]->atom;
                if (a.kind == AtomKind::Equal) {
                    out << atom_str(a, params, true);
                    return;
                }
                out << "not " << atom_str(a, params, false);
                return;
            }
            out << "not ";
            if (n->kids[0]->kind == NodeKind::Exists || n->kids[0]->kind == NodeKind::Forall) {
                out << "(";
                render_node(n->kids[0], params, 1, true, out);
                out << ")";
            } else {
                render_node(n->kids[0], params, 4, false, out);
            }
            return;
        case NodeKind::And:
        case NodeKind::Or: {
            if (n->kids.empty()) {
                out << (n->kind == NodeKind::And ? "true" : "false");
                return;
            }
            int level = n->kind == NodeKind::And ? 2 : 1;
            bool parens = level < min_level;
            if (parens) out << "(";
            const char* sep = n->kind == NodeKind::And ? " and " : " or ";
            for (size_t i = 0; i < n->kids.size(); ++i) {
                if (i) out << sep;
                bool last = i + 1 == n->kids.size();
                render_node(n->kids[i], params, level + 1, !parens && tail && last, out);
            }
            if (parens) out << ")";
            return;
        }
        case NodeKind::Exists:
        case NodeKind::Forall: {
            bool parens = !tail;
            if (parens) out << "(";
            out << (n->kind == NodeKind::Exists ? "exists " : "forall ") << n->var << " . ";
            render_node(n->body, params, 1, true, out);
            if (parens) out << ")";
            return;
        }
    }
}

}  // namespace

template <class C>
std::string render_body(const FormulaT<C>& f) {
    std::ostringstream out;
    render_node(f.root, std::span<const std::string>(f.params), 1, true, out);
    return out.str();
}

template <class C>
std::string render(const FormulaT<C>& f) {
    std::ostringstream out;
    out << "params";
    for (const auto& p : f.params) out << " " << p;
    out << "\nvars";
    for (const auto& v : f.vars) out << " " << v;
    out << "\nformula:\n" << render_body(f) << "\n";
    return out.str();
}

// ---- explicit instantiations ----

template struct TermT<Int>;
template struct TermT<Poly>;

#define PPA_INSTANTIATE(C)                                                                       \
    template NodePtr<C> mk_atom<C>(AtomT<C>);                                                    \
    template NodePtr<C> mk_leq<C>(TermT<C>);                                                     \
    template NodePtr<C> mk_eq<C>(TermT<C>);                                                      \
    template NodePtr<C> mk_and<C>(std::vector<NodePtr<C>>);                                      \
    template NodePtr<C> mk_or<C>(std::vector<NodePtr<C>>);                                       \
    template NodePtr<C> mk_not<C>(NodePtr<C>);                                                   \
    template NodePtr<C> mk_quant<C>(bool, std::string, NodePtr<C>);                              \
    template NodePtr<C> mk_implies<C>(NodePtr<C>, NodePtr<C>);                                   \
    template bool is_true<C>(const NodePtr<C>&);                                                 \
    template bool is_false<C>(const NodePtr<C>&);                                                \
    template bool node_equal<C>(const NodePtr<C>&, const NodePtr<C>&);                           \
    template bool node_has_quantifier<C>(const NodePtr<C>&);                                     \
    template void collect_free_vars<C>(const NodePtr<C>&, std::vector<std::string>&);            \
    template bool uses_var<C>(const NodePtr<C>&, const std::string&);                            \
    template void collect_bound_vars<C>(const NodePtr<C>&, std::vector<std::string>&);           \
    template NodePtr<C> simplify<C>(const NodePtr<C>&, size_t);                                  \
    template NodePtr<C> to_nnf<C>(const NodePtr<C>&, size_t);                                    \
    template void prenex_parts<C>(const FormulaT<C>&, std::vector<QuantBlockVar>&, NodePtr<C>&); \
    template FormulaT<C> to_prenex_nnf<C>(const FormulaT<C>&);                                   \
    template NodePtr<C> to_dnf<C>(const NodePtr<C>&, size_t);                                    \
    template Alternation classify_alternation<C>(const FormulaT<C>&);                            \
    template std::string render_body<C>(const FormulaT<C>&);                                     \
    template std::string render<C>(const FormulaT<C>&);

PPA_INSTANTIATE(Int)
PPA_INSTANTIATE(Poly)

template NodePtr<Int> mk_div<Int>(Int, TermT<Int>);
template NodePtr<Poly> mk_div<Poly>(Poly, TermT<Poly>);

}  // namespace ppa
