#include "parse.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace ppa {

namespace {

enum class Tok {
    Ident, Number, Keyword,
    LParen, RParen, Plus, Minus, Star, Caret, Dot, Colon, Bar,
    Le, Lt, Ge, Gt, Eq, Ne,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    int line, col;
};

const std::set<std::string> kKeywords = {"params", "vars",   "formula", "exists", "forall",
                                         "and",    "or",     "not",     "true",   "false"};

struct ParseFail {
    std::string msg;
    size_t pos;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) {
        int line = 1, col = 1;
        size_t i = 0;
        auto push = [&](Tok k, std::string t, int l, int c) {
            tokens.push_back({k, std::move(t), l, c});
        };
        while (i < text.size()) {
            char c = text[i];
            int l = line, co = col;
            auto adv = [&](size_t n) {
                for (size_t j = 0; j < n; ++j) {
                    if (text[i + j] == '\n') { ++line; col = 1; } else { ++col; }
                }
                i += n;
            };
            if (c == '#') {
                while (i < text.size() && text[i] != '\n') adv(1);
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) { adv(1); continue; }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                size_t j = i;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
                push(Tok::Number, text.substr(i, j - i), l, co);
                adv(j - i);
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                size_t j = i;
                while (j < text.size() &&
                       (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                    ++j;
                std::string w = text.substr(i, j - i);
                push(kKeywords.count(w) ? Tok::Keyword : Tok::Ident, std::move(w), l, co);
                adv(j - i);
                continue;
            }
            auto two = [&](char a, char b) {
                return c == a && i + 1 < text.size() && text[i + 1] == b;
            };
            if (two('<', '=')) { push(Tok::Le, "<=", l, co); adv(2); continue; }
            if (two('>', '=')) { push(Tok::Ge, ">=", l, co); adv(2); continue; }
            if (two('!', '=')) { push(Tok::Ne, "!=", l, co); adv(2); continue; }
            switch (c) {
                case '<': push(Tok::Lt, "<", l, co); adv(1); continue;
                case '>': push(Tok::Gt, ">", l, co); adv(1); continue;
                case '=': push(Tok::Eq, "=", l, co); adv(1); continue;
                case '(': push(Tok::LParen, "(", l, co); adv(1); continue;
                case ')': push(Tok::RParen, ")", l, co); adv(1); continue;
                case '+': push(Tok::Plus, "+", l, co); adv(1); continue;
                case '-': push(Tok::Minus, "-", l, co); adv(1); continue;
                case '*': push(Tok::Star, "*", l, co); adv(1); continue;
                case '^': push(Tok::Caret, "^", l, co); adv(1); continue;
                case '.': push(Tok::Dot, ".", l, co); adv(1); continue;
                case ':': push(Tok::Colon, ":", l, co); adv(1); continue;
                case '|': push(Tok::Bar, "|", l, co); adv(1); continue;
                default: {
                    std::ostringstream err;
                    err << "unexpected character '" << c << "' at line " << l << ", column " << co;
                    throw UsageError(err.str());
                }
            }
        }
        tokens.push_back({Tok::End, "", line, col});
    }

    std::vector<Token> tokens;
};

// Linear expression over group variables with polynomial coefficients,
// tracked during parsing so variable*variable products are rejected early.
struct PExpr {
    std::map<std::string, Poly> coeffs;
    Poly cst;
};

class Parser {
  public:
    Parser(std::vector<Token> tokens, bool unordered)
        : toks_(std::move(tokens)), unordered_(unordered) {}

    Formula parse_file() {
        expect_keyword("params");
        while (at(Tok::Ident)) {
            claim_name(cur().text, "parameter");
            params_.push_back(take().text);
        }
        expect_keyword("vars");
        while (at(Tok::Ident)) {
            claim_name(cur().text, "variable");
            vars_.push_back(take().text);
        }
        expect_keyword("formula");
        expect(Tok::Colon);
        k_ = params_.size();
        NodePtr<Poly> root;
        try {
            root = parse_or();
        } catch (const ParseFail& f) {
            fail_out(f);
        }
        if (!at(Tok::End)) fail_out({furthest_msg_.empty() ? "unexpected input" : furthest_msg_,
                                     std::max(furthest_, pos_)});
        return {params_, vars_, root};
    }

    Poly parse_poly_only() {
        k_ = params_.size();
        try {
            PExpr e = parse_expr();
            if (!at(Tok::End)) throw fail("unexpected input after polynomial");
            if (!e.coeffs.empty()) throw fail("group variable in a parameters-only polynomial");
            return e.cst;
        } catch (const ParseFail& f) {
            fail_out(f);
        }
        throw std::logic_error("unreachable");
    }

    std::vector<std::string> params_, vars_;

  private:
    const Token& cur() const { return toks_[pos_]; }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_keyword(const std::string& w) const {
        return cur().kind == Tok::Keyword && cur().text == w;
    }
    Token take() { return toks_[pos_++]; }

    ParseFail fail(const std::string& msg) {
        if (pos_ >= furthest_) {
            furthest_ = pos_;
            furthest_msg_ = msg;
        }
        return ParseFail{msg, pos_};
    }

    [[noreturn]] void fail_out(const ParseFail& f) {
        size_t p = std::max(f.pos, furthest_);
        const std::string& msg = p == furthest_ && !furthest_msg_.empty() ? furthest_msg_ : f.msg;
        const Token& t = toks_[std::min(p, toks_.size() - 1)];
        std::ostringstream err;
        err << "parse error at line " << t.line << ", column " << t.col << ": " << msg;
        if (t.kind != Tok::End) err << " (near '" << t.text << "')";
        throw UsageError(err.str());
    }

    void expect(Tok k) {
        if (!at(k)) fail_out(fail("unexpected token"));
        ++pos_;
    }

    void expect_keyword(const std::string& w) {
        if (!at_keyword(w)) fail_out(fail("expected '" + w + "'"));
        ++pos_;
    }

    void claim_name(const std::string& name, const char* what) {
        if (std::find(params_.begin(), params_.end(), name) != params_.end() ||
            std::find(vars_.begin(), vars_.end(), name) != vars_.end())
            throw UsageError(std::string("duplicate ") + what + " name '" + name + "'");
    }

    // ---- formulas ----

    NodePtr<Poly> parse_or() {
        std::vector<NodePtr<Poly>> kids{parse_and()};
        while (at_keyword("or")) {
            ++pos_;
            kids.push_back(parse_and());
        }
        return kids.size() == 1 ? kids[0] : mk_or(std::move(kids));
    }

    NodePtr<Poly> parse_and() {
        std::vector<NodePtr<Poly>> kids{parse_unary()};
        while (at_keyword("and")) {
            ++pos_;
            kids.push_back(parse_unary());
        }
        return kids.size() == 1 ? kids[0] : mk_and(std::move(kids));
    }

    NodePtr<Poly> parse_unary() {
        if (at_keyword("not")) {
            ++pos_;
            return mk_not(parse_unary());
        }
        if (at_keyword("exists") || at_keyword("forall")) {
            bool universal = cur().text == "forall";
            ++pos_;
            if (!at(Tok::Ident)) throw fail("expected quantified variable name");
            std::string v = take().text;
            if (std::find(params_.begin(), params_.end(), v) != params_.end())
                throw UsageError("parameter '" + v + "' cannot be quantified");
            if (std::find(vars_.begin(), vars_.end(), v) != vars_.end())
                throw UsageError("free variable '" + v + "' cannot be quantified");
            if (std::find(bound_.begin(), bound_.end(), v) != bound_.end())
                throw UsageError("variable '" + v + "' is already bound");
            expect(Tok::Dot);
            bound_.push_back(v);
            NodePtr<Poly> body = parse_or();
            bound_.pop_back();
            return mk_quant(universal, std::move(v), std::move(body));
        }
        return parse_primary();
    }

    NodePtr<Poly> parse_primary() {
        if (at_keyword("true")) { ++pos_; return mk_true<Poly>(); }
        if (at_keyword("false")) { ++pos_; return mk_false<Poly>(); }
        if (at(Tok::LParen)) {
            // Either a parenthesized formula or a parenthesized arithmetic
            // expression opening an atom; try the formula reading first.
            size_t save = pos_;
            ++pos_;
            try {
                NodePtr<Poly> inner = parse_or();
                if (at(Tok::RParen)) {
                    ++pos_;
                    return inner;
                }
                throw fail("expected ')'");
            } catch (const ParseFail&) {
                pos_ = save;
            }
        }
        return parse_atom();
    }

    NodePtr<Poly> parse_atom() {
        PExpr lhs = parse_expr();
        Tok op = cur().kind;
        switch (op) {
            case Tok::Le: case Tok::Lt: case Tok::Ge: case Tok::Gt:
                if (unordered_) throw UsageError("order relation not allowed in unordered mode");
                [[fallthrough]];
            case Tok::Eq: case Tok::Ne: {
                ++pos_;
                PExpr rhs = parse_expr();
                return relational(lhs, op, rhs);
            }
            case Tok::Bar: {
                ++pos_;
                if (!lhs.coeffs.empty())
                    throw UsageError("divisibility modulus must not contain group variables");
                PExpr rhs = parse_expr();
                return mk_div(lhs.cst, to_term(rhs));
            }
            default:
                throw fail("expected a comparison or '|'");
        }
    }

    static Term to_term(const PExpr& e) {
        Term t;
        t.constant = e.cst;
        for (const auto& [v, c] : e.coeffs) t.coeffs.emplace(v, c);
        return t;
    }

    NodePtr<Poly> relational(const PExpr& a, Tok op, const PExpr& b) {
        PExpr d = sub(a, b);
        Term t = to_term(d);
        Poly one = Poly::constant(k_, 1);
        switch (op) {
            case Tok::Le: return mk_leq(std::move(t));
            case Tok::Lt: {
                t.constant = t.constant + one;
                return mk_leq(std::move(t));
            }
            case Tok::Ge: return mk_leq(t.neg());
            case Tok::Gt: {
                Term u = t.neg();
                u.constant = u.constant + one;
                return mk_leq(std::move(u));
            }
            case Tok::Eq: return mk_eq(std::move(t));
            case Tok::Ne: return mk_not(mk_eq(std::move(t)));
            default: throw std::logic_error("bad relop");
        }
    }

    // ---- arithmetic expressions ----

    PExpr parse_expr() {
        PExpr acc = parse_term();
        for (;;) {
            if (at(Tok::Plus)) { ++pos_; acc = add(acc, parse_term()); }
            else if (at(Tok::Minus)) { ++pos_; acc = sub(acc, parse_term()); }
            else return acc;
        }
    }

    PExpr parse_term() {
        PExpr acc = parse_factor();
        while (at(Tok::Star)) {
            ++pos_;
            acc = mul(acc, parse_factor());
        }
        return acc;
    }

    PExpr parse_factor() {
        if (at(Tok::Minus)) {
            ++pos_;
            return negate(parse_factor());
        }
        PExpr base = parse_base();
        while (at(Tok::Caret)) {
            ++pos_;
            if (!at(Tok::Number)) throw fail("expected a nonnegative integer exponent");
            Int e = parse_int(take().text);
            if (e > 1000000) throw UsageError("exponent too large");
            base = power(base, static_cast<uint32_t>(e.get_ui()));
        }
        return base;
    }

    PExpr parse_base() {
        if (at(Tok::LParen)) {
            ++pos_;
            PExpr e = parse_expr();
            if (!at(Tok::RParen)) throw fail("expected ')'");
            ++pos_;
            return e;
        }
        if (at(Tok::Number)) {
            PExpr e;
            e.cst = Poly::constant(k_, parse_int(take().text));
            return e;
        }
        if (at(Tok::Ident)) {
            const std::string& name = cur().text;
            auto p = std::find(params_.begin(), params_.end(), name);
            PExpr e;
            e.cst = Poly(k_);
            if (p != params_.end()) {
                e.cst = Poly::param(k_, static_cast<size_t>(p - params_.begin()));
            } else if (std::find(vars_.begin(), vars_.end(), name) != vars_.end() ||
                       std::find(bound_.begin(), bound_.end(), name) != bound_.end()) {
                e.coeffs.emplace(name, Poly::constant(k_, 1));
            } else {
                throw UsageError("undeclared identifier '" + name + "'");
            }
            ++pos_;
            return e;
        }
        throw fail("expected an expression");
    }

    PExpr add(const PExpr& a, const PExpr& b) {
        PExpr r = a;
        r.cst = r.cst + b.cst;
        for (const auto& [v, c] : b.coeffs) {
            auto it = r.coeffs.find(v);
            if (it == r.coeffs.end()) r.coeffs.emplace(v, c);
            else {
                it->second = it->second + c;
                if (it->second.is_zero()) r.coeffs.erase(it);
            }
        }
        return r;
    }

    PExpr negate(const PExpr& a) {
        PExpr r;
        r.cst = -a.cst;
        for (const auto& [v, c] : a.coeffs) r.coeffs.emplace(v, -c);
        return r;
    }

    PExpr sub(const PExpr& a, const PExpr& b) { return add(a, negate(b)); }

    PExpr mul(const PExpr& a, const PExpr& b) {
        if (!a.coeffs.empty() && !b.coeffs.empty())
            throw UsageError("product of two group variables is not allowed");
        const PExpr& scalar = a.coeffs.empty() ? a : b;
        const PExpr& linear = a.coeffs.empty() ? b : a;
        PExpr r;
        r.cst = linear.cst * scalar.cst;
        for (const auto& [v, c] : linear.coeffs) {
            Poly p = c * scalar.cst;
            if (!p.is_zero()) r.coeffs.emplace(v, std::move(p));
        }
        return r;
    }

    PExpr power(const PExpr& a, uint32_t e) {
        if (a.coeffs.empty()) {
            PExpr r;
            r.cst = a.cst.pow(e);
            return r;
        }
        if (e == 0) {
            PExpr r;
            r.cst = Poly::constant(k_, 1);
            return r;
        }
        if (e == 1) return a;
        throw UsageError("product of two group variables is not allowed");
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
    size_t k_ = 0;
    bool unordered_;
    std::vector<std::string> bound_;
    size_t furthest_ = 0;
    std::string furthest_msg_;
};

}  // namespace

Formula parse_formula(const std::string& text, bool unordered) {
    Lexer lex(text);
    Parser p(lex.tokens, unordered);
    return p.parse_file();
}

Poly parse_poly(const std::string& text, std::span<const std::string> params) {
    Lexer lex(text);
    Parser p(lex.tokens, false);
    p.params_.assign(params.begin(), params.end());
    return p.parse_poly_only();
}

std::vector<Int> parse_assignment(const std::string& text, std::span<const std::string> params) {
    std::vector<std::optional<Int>> vals(params.size());
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        size_t eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("bad assignment entry '" + item + "'");
        std::string name = item.substr(0, eq);
        std::string val = item.substr(eq + 1);
        auto strip = [](std::string& s) {
            size_t a = s.find_first_not_of(" \t");
            size_t b = s.find_last_not_of(" \t");
            s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
        };
        strip(name);
        strip(val);
        auto it = std::find(params.begin(), params.end(), name);
        if (it == params.end()) throw UsageError("unknown parameter '" + name + "'");
        vals[static_cast<size_t>(it - params.begin())] = parse_int(val);
    }
    std::vector<Int> out;
    for (size_t i = 0; i < params.size(); ++i) {
        if (!vals[i]) throw UsageError("parameter '" + params[i] + "' not assigned");
        out.push_back(*vals[i]);
    }
    return out;
}

namespace {

std::pair<Int, Int> parse_range(const std::string& s) {
    size_t dots = s.find("..");
    if (dots == std::string::npos) throw UsageError("bad range '" + s + "' (expected lo..hi)");
    Int lo = parse_int(s.substr(0, dots));
    Int hi = parse_int(s.substr(dots + 2));
    if (lo > hi) throw UsageError("empty range '" + s + "'");
    return {lo, hi};
}

}  // namespace

BoxSpec parse_box_spec(const std::string& text) {
    BoxSpec spec;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        size_t eq = item.find('=');
        if (eq == std::string::npos) {
            if (spec.fallback) throw UsageError("multiple default ranges in box spec");
            spec.fallback = parse_range(item);
        } else {
            spec.entries.emplace_back(item.substr(0, eq), parse_range(item.substr(eq + 1)));
        }
    }
    if (!spec.fallback && spec.entries.empty()) throw UsageError("empty box spec");
    return spec;
}

}  // namespace ppa
