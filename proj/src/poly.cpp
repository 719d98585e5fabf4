#include "poly.hpp"

#include <algorithm>
#include <sstream>

namespace ppa {

bool GradedLex::operator()(const Exponents& a, const Exponents& b) const {
    uint64_t da = 0, db = 0;
    for (uint32_t e : a) da += e;
    for (uint32_t e : b) db += e;
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Poly Poly::constant(size_t arity, Int c) {
    Poly p(arity);
    if (c != 0) p.terms_.emplace(Exponents(arity, 0), std::move(c));
    return p;
}

Poly Poly::param(size_t arity, size_t index) {
    if (index >= arity) throw UsageError("parameter index out of range");
    Poly p(arity);
    Exponents e(arity, 0);
    e[index] = 1;
    p.terms_.emplace(std::move(e), Int(1));
    return p;
}

bool Poly::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() > 1) return false;
    const Exponents& e = terms_.begin()->first;
    return std::all_of(e.begin(), e.end(), [](uint32_t x) { return x == 0; });
}

Int Poly::constant_value() const {
    if (!is_constant()) throw UsageError("polynomial is not constant");
    return terms_.empty() ? Int(0) : terms_.begin()->second;
}

size_t Poly::total_degree() const {
    if (terms_.empty()) return 0;
    const Exponents& e = terms_.rbegin()->first;
    size_t d = 0;
    for (uint32_t x : e) d += x;
    return d;
}

void Poly::check_same_arity(const Poly& o) const {
    if (arity_ != o.arity_) throw UsageError("polynomial arity mismatch");
}

void Poly::add_term(const Exponents& e, const Int& c) {
    if (e.size() != arity_) throw UsageError("exponent tuple length mismatch");
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Poly Poly::operator-() const {
    Poly r(arity_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    check_same_arity(o);
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    check_same_arity(o);
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    check_same_arity(o);
    Poly r(arity_);
    Exponents e(arity_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            for (size_t i = 0; i < arity_; ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

Poly Poly::pow(uint32_t e) const {
    Poly r = Poly::constant(arity_, 1);
    Poly base = *this;
    while (e != 0) {
        if (e & 1) r = r * base;
        base = (e >>= 1) != 0 ? base * base : base;
    }
    return r;
}

bool Poly::less(const Poly& o) const {
    if (arity_ != o.arity_) return arity_ < o.arity_;
    auto a = terms_.begin(), b = o.terms_.begin();
    GradedLex lt;
    for (; a != terms_.end() && b != o.terms_.end(); ++a, ++b) {
        if (lt(a->first, b->first)) return true;
        if (lt(b->first, a->first)) return false;
        if (a->second != b->second) return a->second < b->second;
    }
    return a == terms_.end() && b != o.terms_.end();
}

int Poly::leading_sign() const {
    if (terms_.empty()) return 0;
    return sign(terms_.rbegin()->second);
}

Int Poly::eval(std::span<const Int> point) const {
    if (point.size() != arity_) throw UsageError("evaluation point length mismatch");
    Int acc = 0, mono;
    for (const auto& [e, c] : terms_) {
        mono = c;
        for (size_t i = 0; i < arity_; ++i) {
            for (uint32_t k = 0; k < e[i]; ++k) mono *= point[i];
        }
        acc += mono;
    }
    return acc;
}

Poly Poly::freeze_param(size_t index, const Int& value) const {
    if (index >= arity_) throw UsageError("parameter index out of range");
    Poly r(arity_ - 1);
    Exponents e2(arity_ - 1);
    for (const auto& [e, c] : terms_) {
        Int coef = c;
        for (uint32_t k = 0; k < e[index]; ++k) coef *= value;
        size_t j = 0;
        for (size_t i = 0; i < arity_; ++i)
            if (i != index) e2[j++] = e[i];
        r.add_term(e2, coef);
    }
    return r;
}

std::string Poly::to_string(std::span<const std::string> names) const {
    if (names.size() != arity_) throw UsageError("name list length mismatch");
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    // Highest graded-lex terms first.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        Int a = abs_int(c);
        if (first) {
            if (c < 0) out << "-";
            first = false;
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        bool any_var = std::any_of(e.begin(), e.end(), [](uint32_t x) { return x != 0; });
        bool coef_shown = false;
        if (a != 1 || !any_var) {
            out << a.get_str();
            coef_shown = true;
        }
        for (size_t i = 0; i < arity_; ++i) {
            if (e[i] == 0) continue;
            if (coef_shown) out << "*";
            out << names[i];
            if (e[i] > 1) out << "^" << e[i];
            coef_shown = true;
        }
    }
    return out.str();
}

}  // namespace ppa
