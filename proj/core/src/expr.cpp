#include "crn/expr.hpp"

#include "crn/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace crn {

class ExprParser {
  public:
    ExprParser(std::string_view text, Expr& out) : s_(text), out_(out) {}

    void run() {
        out_.root_ = expression();
        skip();
        if (pos_ != s_.size()) {
            fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        }
    }

  private:
    using Kind = Expr::Node::Kind;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ExprError("column " + std::to_string(pos_ + 1) + ": " + msg + " in expression '" +
                        std::string(s_) + "'");
    }
    void skip() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) {
            ++pos_;
        }
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::size_t add(Expr::Node n) {
        out_.nodes_.push_back(std::move(n));
        return out_.nodes_.size() - 1;
    }
    std::size_t binary(Kind k, std::size_t a, std::size_t b) {
        Expr::Node n{k};
        n.args = {a, b};
        return add(std::move(n));
    }

    std::size_t expression() {
        std::size_t lhs = term();
        for (;;) {
            if (eat('+')) {
                lhs = binary(Kind::Add, lhs, term());
            } else if (eat('-')) {
                lhs = binary(Kind::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }
    std::size_t term() {
        std::size_t lhs = unary();
        for (;;) {
            if (eat('*')) {
                lhs = binary(Kind::Mul, lhs, unary());
            } else if (eat('/')) {
                lhs = binary(Kind::Div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }
    std::size_t unary() {
        if (++depth_ > 200) {
            fail("expression nested too deeply");
        }
        struct Leave {
            int& d;
            ~Leave() { --d; }
        } leave{depth_};
        if (eat('-')) {
            Expr::Node n{Kind::Neg};
            n.args = {unary()};
            return add(std::move(n));
        }
        if (eat('+')) {
            return unary();
        }
        return power();
    }
    // Right associative; binds tighter than unary minus on its left operand.
    std::size_t power() {
        std::size_t base = primary();
        if (eat('^')) {
            return binary(Kind::Pow, base, unary());
        }
        return base;
    }
    std::size_t primary() {
        skip();
        if (pos_ >= s_.size()) {
            fail("unexpected end of expression");
        }
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            std::size_t e = expression();
            if (!eat(')')) {
                fail("expected ')'");
            }
            return e;
        }
        if ((c >= '0' && c <= '9') || c == '.') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   ((s_[pos_] >= '0' && s_[pos_] <= '9') || s_[pos_] == '.' || s_[pos_] == 'e' ||
                    s_[pos_] == 'E' ||
                    ((s_[pos_] == '-' || s_[pos_] == '+') &&
                     (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E')))) {
                ++pos_;
            }
            double v = 0.0;
            auto [p, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
            if (ec != std::errc() || p != s_.data() + pos_) {
                pos_ = start;
                fail("invalid number");
            }
            Expr::Node n{Kind::Number};
            n.value = v;
            return add(std::move(n));
        }
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                        s_[pos_] == '_')) {
                ++pos_;
            }
            std::string name(s_.substr(start, pos_ - start));
            if (eat('(')) {
                Expr::Node n{Kind::Call};
                n.name = name;
                if (!eat(')')) {
                    do {
                        n.args.push_back(expression());
                    } while (eat(','));
                    if (!eat(')')) {
                        fail("expected ')' after arguments");
                    }
                }
                std::size_t want = (name == "pow" || name == "min" || name == "max") ? 2 : 1;
                if (name != "sqrt" && name != "exp" && name != "log" && name != "abs" &&
                    name != "pow" && name != "min" && name != "max") {
                    pos_ = start;
                    fail("unknown function '" + name + "'");
                }
                if (n.args.size() != want) {
                    pos_ = start;
                    fail("function '" + name + "' takes " + std::to_string(want) + " argument(s)");
                }
                static const char* const names[] = {"sqrt", "exp", "log", "abs", "pow", "min", "max"};
                for (int f = 0; f < 7; ++f) {
                    if (name == names[f]) {
                        n.value = f;
                    }
                }
                return add(std::move(n));
            }
            Expr::Node n{Kind::Var};
            n.name = std::move(name);
            return add(std::move(n));
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view s_;
    Expr& out_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

Expr Expr::parse(std::string_view text) {
    Expr e;
    e.text_ = std::string(text);
    ExprParser(text, e).run();
    return e;
}

std::vector<std::string> Expr::identifiers() const {
    std::vector<std::string> out;
    for (const auto& n : nodes_) {
        if (n.kind == Node::Kind::Var &&
            std::find(out.begin(), out.end(), n.name) == out.end()) {
            out.push_back(n.name);
        }
    }
    return out;
}

void Expr::bind(const std::function<std::optional<std::size_t>(const std::string&)>& resolver) {
    for (auto& n : nodes_) {
        if (n.kind == Node::Kind::Var) {
            auto slot = resolver(n.name);
            if (!slot) {
                throw ExprError("unknown identifier '" + n.name + "' in expression '" + text_ + "'");
            }
            n.slot = *slot;
        }
    }
    bound_ = true;
}

double Expr::eval(const double* slots) const {
    if (!bound_) {
        throw ExprError("expression evaluated before binding: '" + text_ + "'");
    }
    return eval_node(root_, slots);
}

double Expr::eval_node(std::size_t i, const double* slots) const {
    const Node& n = nodes_[i];
    auto arg = [&](std::size_t j) { return eval_node(n.args[j], slots); };
    switch (n.kind) {
        case Node::Kind::Number:
            return n.value;
        case Node::Kind::Var:
            return slots[n.slot];
        case Node::Kind::Neg:
            return -arg(0);
        case Node::Kind::Add:
            return arg(0) + arg(1);
        case Node::Kind::Sub:
            return arg(0) - arg(1);
        case Node::Kind::Mul:
            return arg(0) * arg(1);
        case Node::Kind::Div:
            return arg(0) / arg(1);
        case Node::Kind::Pow:
            return std::pow(arg(0), arg(1));
        case Node::Kind::Call:
            switch (static_cast<int>(n.value)) {
                case 0:
                    return std::sqrt(arg(0));
                case 1:
                    return std::exp(arg(0));
                case 2:
                    return std::log(arg(0));
                case 3:
                    return std::fabs(arg(0));
                case 4:
                    return std::pow(arg(0), arg(1));
                case 5:
                    return std::min(arg(0), arg(1));
                default:
                    return std::max(arg(0), arg(1));
            }
    }
    return 0.0;
}

}  // namespace crn
