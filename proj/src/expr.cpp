#include "fsl/expr.hpp"

#include <cctype>
#include <cmath>
#include <vector>

namespace fsl {

struct Expr::Node {
    enum class Op { constant, var, add, sub, mul, div, pow, neg, sqrt_fn, sin_fn, cos_fn };
    Op op;
    double value = 0.0;
    int var_index = 0;  // 0..3 = u1, u2, y1, y2
    std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

struct Parser {
    const std::string& s;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression error at position " + std::to_string(pos) + ": " + what +
                          " in '" + s + "'");
    }
    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }

    NodePtr make(Node::Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    NodePtr expr() {
        NodePtr n = term();
        while (true) {
            if (eat('+')) n = make(Node::Op::add, n, term());
            else if (eat('-')) n = make(Node::Op::sub, n, term());
            else return n;
        }
    }
    NodePtr term() {
        NodePtr n = factor();
        while (true) {
            skip();
            if (eat('*')) n = make(Node::Op::mul, n, factor());
            else if (eat('/')) n = make(Node::Op::div, n, factor());
            else return n;
        }
    }
    NodePtr factor() {
        NodePtr n = base();
        if (eat('^')) return make(Node::Op::pow, n, factor());  // right associative
        return n;
    }
    NodePtr base() {
        skip();
        if (eat('-')) return make(Node::Op::neg, base());
        if (eat('(')) {
            NodePtr n = expr();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        if (pos >= s.size()) fail("unexpected end of input");
        const char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s.substr(pos), &used);
            } catch (const std::exception&) {
                fail("bad number");
            }
            pos += used;
            auto n = std::make_shared<Node>();
            n->op = Node::Op::constant;
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t end = pos;
            while (end < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_'))
                ++end;
            const std::string name = s.substr(pos, end - pos);
            pos = end;
            static const char* vars[4] = {"u1", "u2", "y1", "y2"};
            for (int i = 0; i < 4; ++i)
                if (name == vars[i]) {
                    auto n = std::make_shared<Node>();
                    n->op = Node::Op::var;
                    n->var_index = i;
                    return n;
                }
            Node::Op fn;
            if (name == "sqrt") fn = Node::Op::sqrt_fn;
            else if (name == "sin") fn = Node::Op::sin_fn;
            else if (name == "cos") fn = Node::Op::cos_fn;
            else fail("unknown identifier '" + name + "'");
            if (!eat('(')) fail("expected '(' after " + name);
            NodePtr arg = expr();
            if (!eat(')')) fail("expected ')'");
            return make(fn, arg);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

double eval_node(const Node& n, const Vec2& u, const Vec2& y) {
    switch (n.op) {
        case Node::Op::constant: return n.value;
        case Node::Op::var: {
            const double vars[4] = {u[0], u[1], y[0], y[1]};
            return vars[n.var_index];
        }
        case Node::Op::add: return eval_node(*n.a, u, y) + eval_node(*n.b, u, y);
        case Node::Op::sub: return eval_node(*n.a, u, y) - eval_node(*n.b, u, y);
        case Node::Op::mul: return eval_node(*n.a, u, y) * eval_node(*n.b, u, y);
        case Node::Op::div: return eval_node(*n.a, u, y) / eval_node(*n.b, u, y);
        case Node::Op::pow: return std::pow(eval_node(*n.a, u, y), eval_node(*n.b, u, y));
        case Node::Op::neg: return -eval_node(*n.a, u, y);
        case Node::Op::sqrt_fn: return std::sqrt(eval_node(*n.a, u, y));
        case Node::Op::sin_fn: return std::sin(eval_node(*n.a, u, y));
        case Node::Op::cos_fn: return std::cos(eval_node(*n.a, u, y));
    }
    return 0.0;
}

}  // namespace

Expr Expr::parse(const std::string& text) {
    Parser p{text};
    Expr e;
    e.root_ = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    e.text_ = text;
    return e;
}

double Expr::eval(const Vec2& u, const Vec2& y) const { return eval_node(*root_, u, y); }

}  // namespace fsl
