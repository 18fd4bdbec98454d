#include "hardylab/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "hardylab/error.hpp"

namespace hardylab {

struct ExprNode {
    enum class Op { number, x, y, add, sub, mul, div, pow, neg, call } op;
    double value = 0.0;
    double (*fn)(double) = nullptr;
    std::shared_ptr<const ExprNode> a, b;

    double eval(double x, double y) const {
        switch (op) {
            case Op::number: return value;
            case Op::x: return x;
            case Op::y: return y;
            case Op::add: return a->eval(x, y) + b->eval(x, y);
            case Op::sub: return a->eval(x, y) - b->eval(x, y);
            case Op::mul: return a->eval(x, y) * b->eval(x, y);
            case Op::div: return a->eval(x, y) / b->eval(x, y);
            case Op::pow: return std::pow(a->eval(x, y), b->eval(x, y));
            case Op::neg: return -a->eval(x, y);
            case Op::call: return fn(a->eval(x, y));
        }
        return 0.0;
    }
};

namespace {

using Ptr = std::shared_ptr<const ExprNode>;

Ptr node(ExprNode::Op op, Ptr a = nullptr, Ptr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

double fsin(double t) { return std::sin(t); }
double fcos(double t) { return std::cos(t); }
double fexp(double t) { return std::exp(t); }
double flog(double t) { return std::log(t); }
double fsqrt(double t) { return std::sqrt(t); }
double fabs_(double t) { return std::abs(t); }

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    Ptr parse() {
        Ptr e = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw LabError(Stage::config,
                       "expression '" + s_ + "' at " + std::to_string(pos_) + ": " + msg);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Ptr sum() {
        Ptr e = product();
        for (;;) {
            if (eat('+')) e = node(ExprNode::Op::add, e, product());
            else if (eat('-')) e = node(ExprNode::Op::sub, e, product());
            else return e;
        }
    }

    Ptr product() {
        Ptr e = unary();
        for (;;) {
            if (eat('*')) e = node(ExprNode::Op::mul, e, unary());
            else if (eat('/')) e = node(ExprNode::Op::div, e, unary());
            else return e;
        }
    }

    Ptr unary() {
        if (eat('-')) return node(ExprNode::Op::neg, unary());
        if (eat('+')) return unary();
        return power();
    }

    // Right associative, binds tighter than unary minus on its left.
    Ptr power() {
        Ptr e = atom();
        if (eat('^')) return node(ExprNode::Op::pow, e, unary());
        return e;
    }

    Ptr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Ptr e = sum();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            auto n = std::make_shared<ExprNode>();
            n->op = ExprNode::Op::number;
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "x") return node(ExprNode::Op::x);
            if (name == "y") return node(ExprNode::Op::y);
            if (name == "pi") {
                auto n = std::make_shared<ExprNode>();
                n->op = ExprNode::Op::number;
                n->value = std::numbers::pi;
                return n;
            }
            double (*fn)(double) = nullptr;
            if (name == "sin") fn = fsin;
            else if (name == "cos") fn = fcos;
            else if (name == "exp") fn = fexp;
            else if (name == "log") fn = flog;
            else if (name == "sqrt") fn = fsqrt;
            else if (name == "abs") fn = fabs_;
            else fail("unknown identifier '" + name + "'");
            if (!eat('(')) fail("expected '(' after " + name);
            auto n = std::make_shared<ExprNode>();
            n->op = ExprNode::Op::call;
            n->fn = fn;
            n->a = sum();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
};

}  // namespace

Expression::Expression(const std::string& text) : text_(text), root_(Parser(text_).parse()) {}

double Expression::operator()(double x, double y) const { return root_->eval(x, y); }

}  // namespace hardylab
