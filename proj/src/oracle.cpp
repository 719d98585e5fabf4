#include "oracle.hpp"

#include <algorithm>
#include <future>
#include <thread>

namespace ppa {

Box Box::uniform(Int lo, Int hi) {
    Box b;
    b.set_fallback(std::move(lo), std::move(hi));
    return b;
}

void Box::set(const std::string& name, Int lo, Int hi) {
    if (lo > hi) throw UsageError("empty box range for '" + name + "'");
    entries_[name] = {std::move(lo), std::move(hi)};
}

void Box::set_fallback(Int lo, Int hi) {
    if (lo > hi) throw UsageError("empty default box range");
    fallback_ = Interval{std::move(lo), std::move(hi)};
}

Interval Box::get(const std::string& name) const {
    auto it = entries_.find(name);
    if (it != entries_.end()) return it->second;
    if (fallback_) return *fallback_;
    throw UsageError("box does not cover variable '" + name + "'");
}

bool Box::covers(const std::string& name) const {
    return entries_.count(name) != 0 || fallback_.has_value();
}

namespace {

enum class Tri { False, True, Unknown };

inline Tri tri_not(Tri t) {
    if (t == Tri::Unknown) return t;
    return t == Tri::True ? Tri::False : Tri::True;
}

struct CAtom {
    AtomKind kind;
    std::vector<std::pair<int, Int>> coeffs;  // slot, coefficient
    Int constant;
    Int modulus;
};

struct CNode {
    NodeKind kind;
    int atom = -1;
    int var = -1;
    std::vector<int> kids;  // And/Or children; Not/quant body in kids[0]
};

// Compiled formula + evaluation engine. Free variables get the leading
// slots in declaration order; every quantifier occurrence gets its own slot.
class Evaluator {
  public:
    Evaluator(const GroundFormula& f, const Box& free_box, const Box& quant_box, Budget& budget)
        : budget_(budget) {
        for (const auto& v : f.vars) {
            slot_names_.push_back(v);
            slot_ranges_.push_back(free_box.get(v));
        }
        std::vector<std::pair<std::string, int>> scope;
        root_ = compile(f.root, scope, quant_box);
        env_.resize(slot_names_.size());
        bound_.assign(slot_names_.size(), false);
    }

    size_t free_count() const { return bound_.size() - quant_slots_; }

    const Interval& slot_range(int slot) const { return slot_ranges_[static_cast<size_t>(slot)]; }

    void bind(int slot, const Int& v) {
        env_[static_cast<size_t>(slot)] = v;
        bound_[static_cast<size_t>(slot)] = true;
    }
    void unbind(int slot) { bound_[static_cast<size_t>(slot)] = false; }

    // Restriction of `base` for slot `var` from necessary-condition atoms of
    // node n under polarity `want`; std::nullopt means no value can work.
    std::optional<Interval> restrict_range(int n, int var, Interval base, bool want) {
        collect_necessary(n, want, var, base);
        return base.lo <= base.hi ? std::optional<Interval>(std::move(base)) : std::nullopt;
    }

    bool decide(int ni) {
        Tri v = value(ni);
        if (v != Tri::Unknown) return v == Tri::True;
        const CNode& n = nodes_[static_cast<size_t>(ni)];
        switch (n.kind) {
            case NodeKind::Not:
                return !decide(n.kids[0]);
            case NodeKind::And:
                for (int kid : n.kids)
                    if (value(kid) == Tri::Unknown && !decide(kid)) return false;
                return true;
            case NodeKind::Or:
                for (int kid : n.kids)
                    if (value(kid) == Tri::Unknown && decide(kid)) return true;
                return false;
            case NodeKind::Exists:
            case NodeKind::Forall: {
                bool exists = n.kind == NodeKind::Exists;
                auto range = restrict_range(n.kids[0], n.var, slot_range(n.var), exists);
                if (!range) return !exists;
                for (Int v = range->lo; v <= range->hi; ++v) {
                    bind(n.var, v);
                    bool r = decide(n.kids[0]);
                    unbind(n.var);
                    if (r == exists) return exists;
                }
                return !exists;
            }
            default:
                throw std::logic_error("unreachable");
        }
    }

    int root() const { return root_; }

  private:
    int compile(const NodePtr<Int>& n, std::vector<std::pair<std::string, int>>& scope,
                const Box& quant_box) {
        CNode out;
        out.kind = n->kind;
        switch (n->kind) {
            case NodeKind::Atom: {
                CAtom a;
                a.kind = n->atom.kind;
                a.constant = n->atom.term.constant;
                a.modulus = n->atom.modulus;
                for (const auto& [v, c] : n->atom.term.coeffs)
                    a.coeffs.emplace_back(resolve(v, scope), c);
                out.atom = static_cast<int>(atoms_.size());
                atoms_.push_back(std::move(a));
                break;
            }
            case NodeKind::Not:
                out.kids.push_back(compile(n->kids[0], scope, quant_box));
                break;
            case NodeKind::And:
            case NodeKind::Or:
                for (const auto& kid : n->kids) out.kids.push_back(compile(kid, scope, quant_box));
                break;
            case NodeKind::Exists:
            case NodeKind::Forall: {
                int slot = static_cast<int>(slot_names_.size());
                slot_names_.push_back(n->var);
                slot_ranges_.push_back(quant_box.get(n->var));
                ++quant_slots_;
                scope.emplace_back(n->var, slot);
                out.var = slot;
                out.kids.push_back(compile(n->body, scope, quant_box));
                scope.pop_back();
                break;
            }
        }
        nodes_.push_back(std::move(out));
        return static_cast<int>(nodes_.size() - 1);
    }

    int resolve(const std::string& v, const std::vector<std::pair<std::string, int>>& scope) {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->first == v) return it->second;
        for (size_t i = 0; i < slot_names_.size() - quant_slots_; ++i)
            if (slot_names_[i] == v) return static_cast<int>(i);
        throw UsageError("unbound variable '" + v + "' in formula");
    }

    // Exact or interval evaluation of an atom's term.
    void term_bounds(const CAtom& a, Int& lo, Int& hi, bool& exact) {
        lo = a.constant;
        hi = a.constant;
        exact = true;
        for (const auto& [slot, c] : a.coeffs) {
            if (bound_[static_cast<size_t>(slot)]) {
                Int t = c * env_[static_cast<size_t>(slot)];
                lo += t;
                hi += t;
            } else {
                exact = false;
                const Interval& r = slot_ranges_[static_cast<size_t>(slot)];
                if (c > 0) {
                    lo += c * r.lo;
                    hi += c * r.hi;
                } else {
                    lo += c * r.hi;
                    hi += c * r.lo;
                }
            }
        }
    }

    Tri atom_value(const CAtom& a) {
        budget_.charge();
        Int lo, hi;
        bool exact;
        term_bounds(a, lo, hi, exact);
        switch (a.kind) {
            case AtomKind::LessEq:
                if (hi <= 0) return Tri::True;
                if (lo > 0) return Tri::False;
                return Tri::Unknown;
            case AtomKind::Equal:
                if (lo == 0 && hi == 0) return Tri::True;
                if (lo > 0 || hi < 0) return Tri::False;
                return exact ? Tri::False : Tri::Unknown;
            case AtomKind::Divides:
                if (exact) return divides(a.modulus, lo) ? Tri::True : Tri::False;
                return Tri::Unknown;
        }
        throw std::logic_error("unreachable");
    }

    Tri value(int ni) {
        const CNode& n = nodes_[static_cast<size_t>(ni)];
        switch (n.kind) {
            case NodeKind::Atom:
                return atom_value(atoms_[static_cast<size_t>(n.atom)]);
            case NodeKind::Not:
                return tri_not(value(n.kids[0]));
            case NodeKind::And: {
                Tri acc = Tri::True;
                for (int kid : n.kids) {
                    Tri v = value(kid);
                    if (v == Tri::False) return Tri::False;
                    if (v == Tri::Unknown) acc = Tri::Unknown;
                }
                return acc;
            }
            case NodeKind::Or: {
                Tri acc = Tri::False;
                for (int kid : n.kids) {
                    Tri v = value(kid);
                    if (v == Tri::True) return Tri::True;
                    if (v == Tri::Unknown) acc = Tri::Unknown;
                }
                return acc;
            }
            case NodeKind::Exists:
            case NodeKind::Forall:
                return Tri::Unknown;
        }
        throw std::logic_error("unreachable");
    }

    // Walks the necessary-condition skeleton of node n for outcome `want`
    // and intersects `range` with the interval each usable atom implies for
    // slot `var`. Descends through quantifiers (their boxes are nonempty).
    void collect_necessary(int ni, bool want, int var, Interval& range) {
        if (range.lo > range.hi) return;
        const CNode& n = nodes_[static_cast<size_t>(ni)];
        switch (n.kind) {
            case NodeKind::Atom:
                tighten(atoms_[static_cast<size_t>(n.atom)], want, var, range);
                return;
            case NodeKind::Not:
                collect_necessary(n.kids[0], !want, var, range);
                return;
            case NodeKind::And:
                if (want || n.kids.size() == 1)
                    for (int kid : n.kids) collect_necessary(kid, want, var, range);
                return;
            case NodeKind::Or:
                if (!want || n.kids.size() == 1)
                    for (int kid : n.kids) collect_necessary(kid, want, var, range);
                return;
            case NodeKind::Exists:
            case NodeKind::Forall:
                collect_necessary(n.kids[0], want, var, range);
                return;
        }
    }

    void tighten(const CAtom& a, bool want, int var, Interval& range) {
        Int av;
        bool found = false;
        for (const auto& [slot, c] : a.coeffs)
            if (slot == var) {
                av = c;
                found = true;
                break;
            }
        if (!found) return;
        if (a.kind == AtomKind::Divides) return;
        if (a.kind == AtomKind::Equal && !want) return;
        budget_.charge();
        // Bounds of the term minus the var contribution.
        Int lo = a.constant, hi = a.constant;
        for (const auto& [slot, c] : a.coeffs) {
            if (slot == var) continue;
            if (bound_[static_cast<size_t>(slot)]) {
                Int t = c * env_[static_cast<size_t>(slot)];
                lo += t;
                hi += t;
            } else {
                const Interval& r = slot_ranges_[static_cast<size_t>(slot)];
                if (c > 0) {
                    lo += c * r.lo;
                    hi += c * r.hi;
                } else {
                    lo += c * r.hi;
                    hi += c * r.lo;
                }
            }
        }
        // Feasible window [b1, b2] for av*var.
        Int b1, b2;
        if (a.kind == AtomKind::Equal) {
            b1 = -hi;
            b2 = -lo;
        } else if (want) {  // av*var + rest <= 0 achievable
            b1 = av > 0 ? Int(av * range.lo) : Int(av * range.hi);  // unconstrained below
            b2 = -lo;
        } else {  // av*var + rest >= 1 achievable
            b1 = 1 - hi;
            b2 = av > 0 ? Int(av * range.hi) : Int(av * range.lo);
        }
        Int vlo, vhi;
        if (av > 0) {
            vlo = ceil_div(b1, av);
            vhi = floor_div(b2, av);
        } else {
            vlo = ceil_div(b2, av);
            vhi = floor_div(b1, av);
        }
        if (vlo > range.lo) range.lo = vlo;
        if (vhi < range.hi) range.hi = vhi;
    }

    Budget& budget_;
    std::vector<CAtom> atoms_;
    std::vector<CNode> nodes_;
    std::vector<std::string> slot_names_;
    std::vector<Interval> slot_ranges_;
    std::vector<Int> env_;
    std::vector<char> bound_;
    size_t quant_slots_ = 0;
    int root_ = -1;
};

// Recursion over the free-variable slots; `sink` sees each satisfying point.
template <class Sink>
void scan_free(Evaluator& ev, size_t slot, size_t nfree, std::vector<Int>& point, Sink&& sink) {
    if (slot == nfree) {
        if (ev.decide(ev.root())) sink(point);
        return;
    }
    int s = static_cast<int>(slot);
    auto range = ev.restrict_range(ev.root(), s, ev.slot_range(s), true);
    if (!range) return;
    for (Int v = range->lo; v <= range->hi; ++v) {
        ev.bind(s, v);
        point.push_back(v);
        scan_free(ev, slot + 1, nfree, point, sink);
        point.pop_back();
        ev.unbind(s);
    }
}

}  // namespace

bool eval_qf(const GroundFormula& f, const std::map<std::string, Int>& point) {
    if (node_has_quantifier(f.root)) throw UsageError("eval_qf requires a quantifier-free formula");
    std::vector<std::string> used;
    collect_free_vars(f.root, used);
    Box b;
    b.set_fallback(0, 0);  // unused slots; every used variable must be in `point`
    GroundFormula g = f;
    for (const auto& v : used)
        if (std::find(g.vars.begin(), g.vars.end(), v) == g.vars.end()) g.vars.push_back(v);
    Budget budget(kDefaultNodeBudget);
    Evaluator ev(g, b, b, budget);
    for (size_t i = 0; i < g.vars.size(); ++i) {
        auto it = point.find(g.vars[i]);
        if (it == point.end()) {
            if (std::find(used.begin(), used.end(), g.vars[i]) != used.end())
                throw UsageError("missing assignment for variable '" + g.vars[i] + "'");
            ev.bind(static_cast<int>(i), 0);
        } else {
            ev.bind(static_cast<int>(i), it->second);
        }
    }
    return ev.decide(ev.root());
}

bool decide_bounded(const GroundFormula& f, const Box& box, const std::map<std::string, Int>& point,
                    const OracleOptions& opts) {
    Budget budget(opts.budget);
    Evaluator ev(f, box, box, budget);
    std::vector<size_t> open;
    for (size_t i = 0; i < f.vars.size(); ++i) {
        auto it = point.find(f.vars[i]);
        if (it == point.end()) open.push_back(i);
        else ev.bind(static_cast<int>(i), it->second);
    }
    if (open.empty()) return ev.decide(ev.root());

    // Remaining free variables become an existential scan.
    struct Found {};
    std::vector<Int> pt;
    try {
        // Rebind scan to only the open slots by a small recursive lambda.
        struct Rec {
            Evaluator& ev;
            const std::vector<size_t>& open;
            void run(size_t i) {
                if (i == open.size()) {
                    if (ev.decide(ev.root())) throw Found{};
                    return;
                }
                int s = static_cast<int>(open[i]);
                auto range = ev.restrict_range(ev.root(), s, ev.slot_range(s), true);
                if (!range) return;
                for (Int v = range->lo; v <= range->hi; ++v) {
                    ev.bind(s, v);
                    run(i + 1);
                    ev.unbind(s);
                }
            }
        } rec{ev, open};
        rec.run(0);
    } catch (const Found&) {
        return true;
    }
    return false;
}

namespace {

// Splits the outermost free variable's restricted range into `jobs` chunks
// evaluated concurrently; merged in range order so results are independent
// of scheduling.
template <class PerPoint>
void scan_parallel(const GroundFormula& f, const Box& free_box, const Box& quant_box,
                   const OracleOptions& opts, Budget& budget, PerPoint&& per_chunk) {
    int jobs = std::max(1, opts.jobs);
    Evaluator probe(f, free_box, quant_box, budget);
    size_t nfree = f.vars.size();
    if (jobs == 1 || nfree == 0) {
        per_chunk(0, probe, std::nullopt);
        return;
    }
    auto range = probe.restrict_range(probe.root(), 0, probe.slot_range(0), true);
    if (!range) return;
    Int total = range->hi - range->lo + 1;
    Int chunk = ceil_div(total, Int(jobs));
    std::vector<std::future<void>> futs;
    int index = 0;
    for (Int lo = range->lo; lo <= range->hi; lo += chunk, ++index) {
        Int hi = lo + chunk - 1;
        if (hi > range->hi) hi = range->hi;
        futs.push_back(std::async(std::launch::async, [&, lo, hi, index]() {
            Evaluator ev(f, free_box, quant_box, budget);
            per_chunk(index, ev, std::optional<Interval>(Interval{lo, hi}));
        }));
    }
    for (auto& fu : futs) fu.get();
}

}  // namespace

Int count_bounded(const GroundFormula& f, const Box& free_box, const Box& quant_box,
                  const OracleOptions& opts) {
    Budget budget(opts.budget);
    size_t nfree = f.vars.size();
    std::vector<Int> partial(static_cast<size_t>(std::max(1, opts.jobs)) + 1, Int(0));
    std::exception_ptr err;
    std::mutex err_mu;
    scan_parallel(f, free_box, quant_box, opts, budget,
                  [&](int index, Evaluator& ev, std::optional<Interval> outer) {
                      try {
                          Int local = 0;
                          std::vector<Int> pt;
                          if (!outer) {
                              scan_free(ev, 0, nfree, pt, [&](const std::vector<Int>&) { ++local; });
                          } else {
                              for (Int v = outer->lo; v <= outer->hi; ++v) {
                                  ev.bind(0, v);
                                  pt.push_back(v);
                                  scan_free(ev, 1, nfree, pt,
                                            [&](const std::vector<Int>&) { ++local; });
                                  pt.pop_back();
                                  ev.unbind(0);
                              }
                          }
                          partial[static_cast<size_t>(index)] = local;
                      } catch (...) {
                          std::lock_guard<std::mutex> g(err_mu);
                          if (!err) err = std::current_exception();
                      }
                  });
    if (err) std::rethrow_exception(err);
    Int total = 0;
    for (const auto& p : partial) total += p;
    return total;
}

std::vector<std::vector<Int>> enumerate_solutions(const GroundFormula& f, const Box& free_box,
                                                  const Box& quant_box, const OracleOptions& opts) {
    Budget budget(opts.budget);
    size_t nfree = f.vars.size();
    std::vector<std::vector<std::vector<Int>>> partial(
        static_cast<size_t>(std::max(1, opts.jobs)) + 1);
    std::exception_ptr err;
    std::mutex err_mu;
    scan_parallel(f, free_box, quant_box, opts, budget,
                  [&](int index, Evaluator& ev, std::optional<Interval> outer) {
                      try {
                          auto& local = partial[static_cast<size_t>(index)];
                          std::vector<Int> pt;
                          auto sink = [&](const std::vector<Int>& p) { local.push_back(p); };
                          if (!outer) {
                              scan_free(ev, 0, nfree, pt, sink);
                          } else {
                              for (Int v = outer->lo; v <= outer->hi; ++v) {
                                  ev.bind(0, v);
                                  pt.push_back(v);
                                  scan_free(ev, 1, nfree, pt, sink);
                                  pt.pop_back();
                                  ev.unbind(0);
                              }
                          }
                      } catch (...) {
                          std::lock_guard<std::mutex> g(err_mu);
                          if (!err) err = std::current_exception();
                      }
                  });
    if (err) std::rethrow_exception(err);
    std::vector<std::vector<Int>> out;
    for (auto& p : partial)
        for (auto& row : p) out.push_back(std::move(row));
    return out;
}

}  // namespace ppa
