#pragma once

// Small arithmetic expression grammar for config-defined 1-forms and seed
// indicatrices: + - * / ^, sqrt, sin, cos, parentheses, unary minus, and the
// variables u1, u2, y1, y2.

#include <memory>
#include <string>

#include "fsl/geometry.hpp"

namespace fsl {

class Expr {
  public:
    // throws ConfigError with a position diagnostic on parse failure
    static Expr parse(const std::string& text);

    double eval(const Vec2& u, const Vec2& y) const;
    const std::string& text() const { return text_; }

    struct Node;

  private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace fsl
