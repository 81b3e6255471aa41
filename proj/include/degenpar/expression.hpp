#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace degenpar {

/// Compiled arithmetic expression in a single variable `t`.
///
/// Supports + - * / ^, unary minus, parentheses, the constants `pi` and `e`,
/// and the functions sin, cos, tan, exp, log, sqrt, abs, sinh, cosh, tanh,
/// log1p, pow(a,b), min(a,b), max(a,b). Parsing errors throw ValidationError
/// with the character offset of the failure.
class Expression {
public:
    explicit Expression(std::string_view source);

    double operator()(double t) const;

    const std::string& source() const noexcept { return source_; }

    struct Node;

private:
    std::string source_;
    std::shared_ptr<const std::vector<Node>> nodes_;
    int root_ = -1;
};

}  // namespace degenpar
