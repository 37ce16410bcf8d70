#include "crgeo/expr.hpp"

#include <cctype>
#include <charconv>
#include <memory>
#include <numbers>

namespace crgeo {

namespace {

struct Node {
    Expr::Op op;
    double c = 0.0;
    int var = 0;
    std::vector<std::unique_ptr<Node>> kids;
    bool constant = false;
};
using NodeP = std::unique_ptr<Node>;

NodeP leaf(double c) {
    auto n = std::make_unique<Node>();
    n->op = Expr::Op::constant;
    n->c = c;
    n->constant = true;
    return n;
}

double fold(Expr::Op op, double a, double b) {
    switch (op) {
        case Expr::Op::add: return a + b;
        case Expr::Op::sub: return a - b;
        case Expr::Op::mul: return a * b;
        case Expr::Op::div: return a / b;
        case Expr::Op::neg: return -a;
        case Expr::Op::pow:
        case Expr::Op::powc: return std::pow(a, b);
        case Expr::Op::exp: return std::exp(a);
        case Expr::Op::log: return std::log(a);
        case Expr::Op::sin: return std::sin(a);
        case Expr::Op::cos: return std::cos(a);
        default: return a;
    }
}

NodeP make(Expr::Op op, NodeP a, NodeP b = nullptr) {
    if (op == Expr::Op::pow && b->constant) {
        auto n = std::make_unique<Node>();
        n->op = Expr::Op::powc;
        n->c = b->c;
        n->kids.push_back(std::move(a));
        if (n->kids[0]->constant) return leaf(fold(op, n->kids[0]->c, n->c));
        return n;
    }
    bool all_const = a->constant && (!b || b->constant);
    if (all_const) return leaf(fold(op, a->c, b ? b->c : 0.0));
    auto n = std::make_unique<Node>();
    n->op = op;
    n->kids.push_back(std::move(a));
    if (b) n->kids.push_back(std::move(b));
    return n;
}

}  // namespace

class ExprCompiler {
public:
    ExprCompiler(const std::string& s, const std::vector<std::string>& coords,
                 const std::map<std::string, double>& consts)
        : s_(s), coords_(coords), consts_(consts) {}

    Expr run() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("empty expression", pos_);
        NodeP root = expr();
        skip();
        if (pos_ < s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        Expr e;
        e.text_ = s_;
        emit(*root, e.code_, 0);
        return e;
    }

private:
    static constexpr int kMaxNesting = 200;
    int depth_ = 0;

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char ch) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == ch) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char ch) {
        if (!eat(ch)) {
            if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + ch + "' before end of input", pos_);
            throw ParseError(std::string("expected '") + ch + "'", pos_);
        }
    }

    NodeP expr() {
        NodeP a = term();
        for (;;) {
            if (eat('+')) a = make(Expr::Op::add, std::move(a), term());
            else if (eat('-')) a = make(Expr::Op::sub, std::move(a), term());
            else return a;
        }
    }
    NodeP term() {
        NodeP a = unary();
        for (;;) {
            if (eat('*')) a = make(Expr::Op::mul, std::move(a), unary());
            else if (eat('/')) a = make(Expr::Op::div, std::move(a), unary());
            else return a;
        }
    }
    NodeP unary() {
        struct Guard {
            int& d;
            ~Guard() { --d; }
        } guard{++depth_};
        if (depth_ > kMaxNesting) throw ParseError("expression nests too deeply", pos_);
        if (eat('-')) return make(Expr::Op::neg, unary());
        if (eat('+')) return unary();
        return power();
    }
    NodeP power() {
        NodeP a = atom();
        if (eat('^')) return make(Expr::Op::pow, std::move(a), unary());
        return a;
    }
    NodeP atom() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        const std::size_t start = pos_;
        char ch = s_[pos_];
        if (eat('(')) {
            NodeP a = expr();
            expect(')');
            return a;
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
            if (ec != std::errc()) throw ParseError("malformed number", start);
            pos_ = static_cast<std::size_t>(ptr - s_.data());
            return leaf(v);
        }
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            skip();
            if (pos_ < s_.size() && s_[pos_] == '(') return call(name, start);
            for (std::size_t i = 0; i < coords_.size(); ++i) {
                if (coords_[i] == name) {
                    auto n = std::make_unique<Node>();
                    n->op = Expr::Op::var;
                    n->var = static_cast<int>(i);
                    return n;
                }
            }
            if (auto it = consts_.find(name); it != consts_.end()) return leaf(it->second);
            if (name == "pi") return leaf(std::numbers::pi);
            if (name == "e") return leaf(std::numbers::e);
            throw ParseError("unknown identifier '" + name + "'", start);
        }
        throw ParseError(std::string("unexpected '") + ch + "'", start);
    }
    NodeP call(const std::string& name, std::size_t at) {
        expect('(');
        NodeP a = expr();
        if (name == "pow") {
            expect(',');
            NodeP b = expr();
            expect(')');
            return make(Expr::Op::pow, std::move(a), std::move(b));
        }
        expect(')');
        if (name == "exp") return make(Expr::Op::exp, std::move(a));
        if (name == "log") return make(Expr::Op::log, std::move(a));
        if (name == "sin") return make(Expr::Op::sin, std::move(a));
        if (name == "cos") return make(Expr::Op::cos, std::move(a));
        throw ParseError("unknown function '" + name + "'", at);
    }

    int emit(const Node& n, std::vector<Expr::Ins>& code, int depth) {
        int peak = depth + 1;
        for (const NodeP& k : n.kids) {
            peak = std::max(peak, emit(*k, code, depth));
            ++depth;
        }
        if (peak > 64) throw ParseError("expression nests too deeply", 0);
        code.push_back({n.op, n.c, n.var});
        return peak;
    }

    const std::string& s_;
    const std::vector<std::string>& coords_;
    const std::map<std::string, double>& consts_;
    std::size_t pos_ = 0;
};

Expr Expr::parse(const std::string& text, const std::vector<std::string>& coordinates,
                 const std::map<std::string, double>& constants) {
    return ExprCompiler(text, coordinates, constants).run();
}

Expr Expr::constant(double c) {
    Expr e;
    e.code_.push_back({Op::constant, c, 0});
    e.text_ = std::to_string(c);
    return e;
}

}  // namespace crgeo
