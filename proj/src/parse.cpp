#include "cw/parse.hpp"
#include "cw/canon.hpp"

#include <cctype>

namespace cw {

int SymbolTable::declare_function(const std::string& name, int arity) {
    auto it = arity_.find(name);
    if (it == arity_.end()) {
        arity_[name] = arity;
        return arity;
    }
    if (it->second != arity)
        throw Error("parse", "function '" + name + "' used with arity " + std::to_string(arity) +
                                 " but declared with arity " + std::to_string(it->second));
    return arity;
}

namespace {

struct Lexer {
    const std::string& s;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n' || s[pos] == '\r'))
            ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool accept(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw SyntaxError(std::string("expected '") + c + "'", pos);
    }
    bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
    }
    std::string read_ident() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && ident_char(s[pos])) ++pos;
        return s.substr(start, pos - start);
    }
    BigInt read_integer() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw SyntaxError("expected integer", pos);
        return BigInt::from_string(s.substr(start, pos - start));
    }
};

struct Parser {
    Lexer lex;
    SymbolTable* symbols;

    Expr parse() {
        Expr e = parse_sum();
        if (!lex.eof()) throw SyntaxError("unexpected trailing input", lex.pos);
        return e;
    }

    Expr parse_sum() {
        Expr e = parse_term();
        while (true) {
            if (lex.accept('+')) {
                e = sum({e, parse_term()});
            } else if (lex.accept('-')) {
                e = sum({e, product({num(-1), parse_term()})});
            } else {
                return e;
            }
        }
    }

    Expr parse_term() {
        Expr e = parse_unary();
        while (true) {
            if (lex.accept('*')) {
                e = product({e, parse_unary()});
            } else if (lex.accept('/')) {
                e = product({e, power(parse_unary(), Rational(-1))});
            } else {
                return e;
            }
        }
    }

    Expr parse_unary() {
        if (lex.accept('-')) return product({num(-1), parse_unary()});
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (!lex.accept('^')) return base;
        Rational e = parse_exponent();
        return power(parse_power_tail(std::move(base)), std::move(e));
    }

    // right-associativity is trivial with literal exponents; the base of
    // the outer power is the already-parsed primary
    Expr parse_power_tail(Expr base) { return base; }

    Rational parse_exponent() {
        bool parens = lex.accept('(');
        bool neg = lex.accept('-');
        BigInt n = lex.read_integer();
        BigInt d(1);
        // a slash continues the exponent only inside parentheses;
        // a bare slash after the exponent is ordinary division
        if (parens && lex.accept('/')) d = lex.read_integer();
        if (parens) lex.expect(')');
        Rational r{std::move(n), std::move(d)};
        return neg ? -r : r;
    }

    Expr parse_primary() {
        char c = lex.peek();
        if (c == '(') {
            lex.expect('(');
            Expr e = parse_sum();
            lex.expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            return num(Rational(lex.read_integer()));
        }
        if (lex.ident_start(c)) {
            size_t at = lex.pos;
            std::string name = lex.read_ident();
            if (lex.peek() == '(') return parse_call(name, at);
            if (name == "pi") return pi_const();
            if (name == "I") return imag_unit();
            return var(name);
        }
        throw SyntaxError("expected expression", lex.pos);
    }

    Expr parse_call(const std::string& raw_name, size_t at) {
        // trailing apostrophes in call position are formal-derivative markers
        std::string name = raw_name;
        int order = 0;
        while (!name.empty() && name.back() == '\'') {
            name.pop_back();
            ++order;
        }
        if (name.empty()) throw SyntaxError("bad function name", at);
        lex.expect('(');
        std::vector<Expr> args;
        if (lex.peek() != ')') {
            args.push_back(parse_sum());
            while (lex.accept(',')) args.push_back(parse_sum());
        }
        lex.expect(')');

        if (name == "pi" || name == "I")
            throw SyntaxError("'" + name + "' is not a function", at);
        if (name == "sqrt") {
            if (order || args.size() != 1) throw SyntaxError("sqrt takes one argument", at);
            return sqrt_of(args[0]);
        }
        if (auto f = elem_fn_from_name(name)) {
            if (order) throw SyntaxError("derivative markers are only valid on opaque functions", at);
            if (args.size() != 1)
                throw SyntaxError("'" + name + "' takes one argument", at);
            return fn_app(*f, args[0]);
        }
        if (symbols) {
            try {
                symbols->declare_function(name, static_cast<int>(args.size()));
            } catch (const Error& err) {
                throw SyntaxError(err.what(), at);
            }
        }
        return user_app(name, order, std::move(args));
    }
};

} // namespace

Expr parse_expr(const std::string& text, SymbolTable* symbols) {
    Parser p{Lexer{text}, symbols};
    return canonicalize(p.parse());
}

} // namespace cw
