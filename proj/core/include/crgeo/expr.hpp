#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "crgeo/linalg.hpp"

namespace crgeo {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t column)
        : std::runtime_error(msg + " at column " + std::to_string(column + 1)), column_(column) {}
    std::size_t column() const { return column_; }

private:
    std::size_t column_;
};

// Compiled arithmetic expression over chart coordinates.
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := atom ('^' unary)?
//   atom   := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
// Functions: pow(a, b), exp, log, sin, cos. Names resolve to coordinates, then constants, then pi and e.
class Expr {
public:
    enum class Op { constant, var, add, sub, mul, div, neg, powc, pow, exp, log, sin, cos };
    struct Ins {
        Op op;
        double c = 0.0;
        int i = 0;
    };

    Expr() = default;
    static Expr parse(const std::string& text, const std::vector<std::string>& coordinates,
                      const std::map<std::string, double>& constants = {});
    static Expr constant(double c);

    bool is_constant() const { return code_.size() == 1 && code_[0].op == Op::constant; }
    double constant_value() const { return code_.empty() ? 0.0 : code_[0].c; }
    const std::string& text() const { return text_; }

    template <class T>
    T operator()(const Vec<T>& x) const {
        using std::cos;
        using std::exp;
        using std::log;
        using std::pow;
        using std::sin;
        T st[64];
        int sp = 0;
        for (const Ins& k : code_) {
            switch (k.op) {
                case Op::constant: st[sp++] = T(k.c); break;
                case Op::var: st[sp++] = x[k.i]; break;
                case Op::add: --sp; st[sp - 1] = st[sp - 1] + st[sp]; break;
                case Op::sub: --sp; st[sp - 1] = st[sp - 1] - st[sp]; break;
                case Op::mul: --sp; st[sp - 1] = st[sp - 1] * st[sp]; break;
                case Op::div: --sp; st[sp - 1] = st[sp - 1] / st[sp]; break;
                case Op::neg: st[sp - 1] = -st[sp - 1]; break;
                case Op::powc: st[sp - 1] = ipow(st[sp - 1], k.c); break;
                case Op::pow: --sp; st[sp - 1] = exp(st[sp] * log(st[sp - 1])); break;
                case Op::exp: st[sp - 1] = exp(st[sp - 1]); break;
                case Op::log: st[sp - 1] = log(st[sp - 1]); break;
                case Op::sin: st[sp - 1] = sin(st[sp - 1]); break;
                case Op::cos: st[sp - 1] = cos(st[sp - 1]); break;
            }
        }
        return st[0];
    }

private:
    template <class T>
    static T ipow(const T& a, double p) {
        using std::pow;
        if (p == std::floor(p) && std::abs(p) <= 16.0) {
            int k = static_cast<int>(std::abs(p));
            T r(1.0);
            for (int i = 0; i < k; ++i) r = r * a;
            return p < 0 ? T(1.0) / r : r;
        }
        return pow(a, p);
    }

    std::vector<Ins> code_;
    std::string text_;
    friend class ExprCompiler;
};

}  // namespace crgeo
