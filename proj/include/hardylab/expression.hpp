#pragma once

#include <memory>
#include <string>

namespace hardylab {

struct ExprNode;

/// Scalar expression in x and y: numbers, pi, + - * / ^, unary minus,
/// sin cos exp log sqrt abs, parentheses.
class Expression {
public:
    explicit Expression(const std::string& text);
    double operator()(double x, double y) const;
    const std::string& text() const { return text_; }

private:
    std::string text_;
    std::shared_ptr<const ExprNode> root_;
};

}  // namespace hardylab
