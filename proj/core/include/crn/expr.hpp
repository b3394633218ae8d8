#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crn {

/// Small arithmetic expression used for averaged intensities in reduced
/// models: numbers, identifiers, + - * / ^, unary minus, parentheses and the
/// functions sqrt, exp, log, abs, pow, min, max.
class Expr {
  public:
    /// Throws ExprError with the offending column on malformed input.
    static Expr parse(std::string_view text);

    const std::string& text() const { return text_; }

    /// Distinct identifiers in order of first appearance.
    std::vector<std::string> identifiers() const;

    /// Maps every identifier to a slot index. Throws ExprError for names the
    /// resolver does not know.
    void bind(const std::function<std::optional<std::size_t>(const std::string&)>& resolver);

    /// Evaluates with identifier values read from `slots` (requires bind()).
    double eval(const double* slots) const;

  private:
    struct Node {
        enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
        double value = 0.0;
        std::string name;
        std::size_t slot = 0;
        std::vector<std::size_t> args;
    };

    double eval_node(std::size_t i, const double* slots) const;

    std::string text_;
    std::vector<Node> nodes_;
    std::size_t root_ = 0;
    bool bound_ = false;

    friend class ExprParser;
};

}  // namespace crn
