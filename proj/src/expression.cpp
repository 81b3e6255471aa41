#include "degenpar/expression.hpp"

#include "degenpar/errors.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace degenpar {

enum class Op {
    Constant,
    Variable,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Call1,
    Call2,
};

using Fn1 = double (*)(double);
using Fn2 = double (*)(double, double);

struct Expression::Node {
    Op op = Op::Constant;
    double value = 0.0;
    int lhs = -1;
    int rhs = -1;
    Fn1 fn1 = nullptr;
    Fn2 fn2 = nullptr;
};

namespace {

const std::unordered_map<std::string, Fn1>& unary_functions() {
    static const std::unordered_map<std::string, Fn1> table = {
        {"sin", [](double x) { return std::sin(x); }},
        {"cos", [](double x) { return std::cos(x); }},
        {"tan", [](double x) { return std::tan(x); }},
        {"exp", [](double x) { return std::exp(x); }},
        {"log", [](double x) { return std::log(x); }},
        {"log1p", [](double x) { return std::log1p(x); }},
        {"sqrt", [](double x) { return std::sqrt(x); }},
        {"abs", [](double x) { return std::abs(x); }},
        {"sinh", [](double x) { return std::sinh(x); }},
        {"cosh", [](double x) { return std::cosh(x); }},
        {"tanh", [](double x) { return std::tanh(x); }},
    };
    return table;
}

const std::unordered_map<std::string, Fn2>& binary_functions() {
    static const std::unordered_map<std::string, Fn2> table = {
        {"pow", [](double a, double b) { return std::pow(a, b); }},
        {"min", [](double a, double b) { return std::min(a, b); }},
        {"max", [](double a, double b) { return std::max(a, b); }},
    };
    return table;
}

class Parser {
public:
    Parser(std::string_view text, std::vector<Expression::Node>& nodes)
        : text_(text), nodes_(nodes) {}

    int parse() {
        int root = expression();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return root;
    }

private:
    std::string_view text_;
    std::vector<Expression::Node>& nodes_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ValidationError("expression '" + std::string(text_) + "': " + msg +
                              " at offset " + std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    int push(Expression::Node node) {
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }

    int binary(Op op, int lhs, int rhs) {
        Expression::Node n;
        n.op = op;
        n.lhs = lhs;
        n.rhs = rhs;
        return push(n);
    }

    int expression() {
        int lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = binary(Op::Add, lhs, term());
            else if (accept('-'))
                lhs = binary(Op::Sub, lhs, term());
            else
                return lhs;
        }
    }

    int term() {
        int lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = binary(Op::Mul, lhs, unary());
            else if (accept('/'))
                lhs = binary(Op::Div, lhs, unary());
            else
                return lhs;
        }
    }

    int unary() {
        if (accept('-')) return binary(Op::Neg, unary(), -1);
        if (accept('+')) return unary();
        return power();
    }

    // '^' is right-associative and binds tighter than unary minus on its left.
    int power() {
        int base = primary();
        if (accept('^')) return binary(Op::Pow, base, unary());
        return base;
    }

    int primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            int inner = expression();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    int number() {
        const char* begin = text_.data() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        Expression::Node n;
        n.value = v;
        return push(n);
    }

    int identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        if (name == "t") {
            Expression::Node n;
            n.op = Op::Variable;
            return push(n);
        }
        if (name == "pi" || name == "e") {
            Expression::Node n;
            n.value = name == "pi" ? std::numbers::pi : std::numbers::e;
            return push(n);
        }
        if (auto it = unary_functions().find(name); it != unary_functions().end()) {
            expect('(');
            int arg = expression();
            expect(')');
            Expression::Node n;
            n.op = Op::Call1;
            n.lhs = arg;
            n.fn1 = it->second;
            return push(n);
        }
        if (auto it = binary_functions().find(name); it != binary_functions().end()) {
            expect('(');
            int a = expression();
            expect(',');
            int b = expression();
            expect(')');
            Expression::Node n;
            n.op = Op::Call2;
            n.lhs = a;
            n.rhs = b;
            n.fn2 = it->second;
            return push(n);
        }
        pos_ = start;
        fail("unknown identifier '" + name + "'");
    }
};

double evaluate(const std::vector<Expression::Node>& nodes, int i, double t) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    switch (n.op) {
        case Op::Constant: return n.value;
        case Op::Variable: return t;
        case Op::Neg: return -evaluate(nodes, n.lhs, t);
        case Op::Add: return evaluate(nodes, n.lhs, t) + evaluate(nodes, n.rhs, t);
        case Op::Sub: return evaluate(nodes, n.lhs, t) - evaluate(nodes, n.rhs, t);
        case Op::Mul: return evaluate(nodes, n.lhs, t) * evaluate(nodes, n.rhs, t);
        case Op::Div: return evaluate(nodes, n.lhs, t) / evaluate(nodes, n.rhs, t);
        case Op::Pow: return std::pow(evaluate(nodes, n.lhs, t), evaluate(nodes, n.rhs, t));
        case Op::Call1: return n.fn1(evaluate(nodes, n.lhs, t));
        case Op::Call2: return n.fn2(evaluate(nodes, n.lhs, t), evaluate(nodes, n.rhs, t));
    }
    return 0.0;
}

}  // namespace

Expression::Expression(std::string_view source) : source_(source) {
    auto nodes = std::make_shared<std::vector<Node>>();
    Parser parser(source_, *nodes);
    root_ = parser.parse();
    nodes_ = std::move(nodes);
}

double Expression::operator()(double t) const { return evaluate(*nodes_, root_, t); }

}  // namespace degenpar
