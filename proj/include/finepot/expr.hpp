#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace finepot {

/// Arithmetic expression in the coordinates x, y, z (aliases x1, x2, x3).
///
/// Grammar: numbers, + - * / ^, comparisons (< <= > >= == !=, yielding 0 or 1),
/// && and ||, unary minus and !, parentheses, constants pi, e, inf, and the functions
/// sin cos tan exp log sqrt abs floor atan2 min max pow.
class Expression {
public:
    Expression() = default;

    /// Throws Error(Config) with the offending position on malformed input.
    static Expression parse(std::string_view text);

    double operator()(std::span<const double> x) const;
    double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

    const std::string& text() const noexcept { return text_; }
    bool empty() const noexcept { return root_ == nullptr; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace finepot
