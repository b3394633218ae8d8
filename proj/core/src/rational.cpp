#include "crn/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace crn {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

// cpp_int reads a leading 0 as an octal prefix, so strip it first.
BigInt decimal_int(std::string_view digits) {
    auto nz = digits.find_first_not_of('0');
    return nz == std::string_view::npos ? BigInt(0) : BigInt(std::string(digits.substr(nz)));
}

BigInt pow10(long long e) {
    BigInt r = 1;
    for (long long i = 0; i < e; ++i) {
        r *= 10;
    }
    return r;
}

// Decimal literal with optional fraction and exponent; sign handled by caller.
std::optional<Rational> parse_decimal(std::string_view s) {
    std::string_view mantissa = s;
    long long exponent = 0;
    if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
        mantissa = s.substr(0, epos);
        std::string_view exp_text = s.substr(epos + 1);
        bool neg = false;
        if (!exp_text.empty() && (exp_text[0] == '+' || exp_text[0] == '-')) {
            neg = exp_text[0] == '-';
            exp_text.remove_prefix(1);
        }
        if (!all_digits(exp_text) || exp_text.size() > 4) {
            return std::nullopt;
        }
        exponent = std::stoll(std::string(exp_text));
        if (neg) {
            exponent = -exponent;
        }
    }
    std::string digits;
    long long frac_len = 0;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = mantissa.substr(0, dot);
        std::string_view frac_part = mantissa.substr(dot + 1);
        if (int_part.empty() && frac_part.empty()) {
            return std::nullopt;
        }
        if ((!int_part.empty() && !all_digits(int_part)) ||
            (!frac_part.empty() && !all_digits(frac_part))) {
            return std::nullopt;
        }
        digits = std::string(int_part) + std::string(frac_part);
        frac_len = static_cast<long long>(frac_part.size());
    } else {
        if (!all_digits(mantissa)) {
            return std::nullopt;
        }
        digits = std::string(mantissa);
    }
    BigInt num = decimal_int(digits);
    long long shift = exponent - frac_len;
    if (shift >= 0) {
        return Rational(num * pow10(shift));
    }
    return Rational(num, pow10(-shift));
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    if (text.empty()) {
        return std::nullopt;
    }
    bool negative = false;
    if (text[0] == '+' || text[0] == '-') {
        negative = text[0] == '-';
        text.remove_prefix(1);
    }
    std::optional<Rational> value;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = text.substr(0, slash);
        auto den = text.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) {
            return std::nullopt;
        }
        BigInt d = decimal_int(den);
        if (d == 0) {
            return std::nullopt;
        }
        value = Rational(decimal_int(num), d);
    } else {
        value = parse_decimal(text);
    }
    if (!value) {
        return std::nullopt;
    }
    return negative ? Rational(-*value) : *value;
}

std::string to_string(const Rational& r) {
    if (denominator(r) == 1) {
        return numerator(r).str();
    }
    return numerator(r).str() + "/" + denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

double ExtRational::to_double() const {
    switch (kind_) {
        case Kind::NegInf:
            return -std::numeric_limits<double>::infinity();
        case Kind::PosInf:
            return std::numeric_limits<double>::infinity();
        case Kind::Finite:
            break;
    }
    return crn::to_double(value_);
}

std::string ExtRational::str() const {
    switch (kind_) {
        case Kind::NegInf:
            return "-inf";
        case Kind::PosInf:
            return "+inf";
        case Kind::Finite:
            break;
    }
    return to_string(value_);
}

bool operator==(const ExtRational& a, const ExtRational& b) {
    if (a.kind_ != b.kind_) {
        return false;
    }
    return !a.is_finite() || a.value_ == b.value_;
}

std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
    auto rank = [](ExtRational::Kind k) {
        switch (k) {
            case ExtRational::Kind::NegInf:
                return 0;
            case ExtRational::Kind::Finite:
                return 1;
            case ExtRational::Kind::PosInf:
                return 2;
        }
        return 1;
    };
    if (a.kind_ != b.kind_) {
        return rank(a.kind_) <=> rank(b.kind_);
    }
    if (!a.is_finite()) {
        return std::strong_ordering::equal;
    }
    if (a.value_ < b.value_) {
        return std::strong_ordering::less;
    }
    if (a.value_ > b.value_) {
        return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

ExtRational operator-(const ExtRational& a, const ExtRational& b) {
    if (a.is_finite() && b.is_finite()) {
        return ExtRational(Rational(a.value_ - b.value_));
    }
    if (a.kind_ == b.kind_) {
        throw std::domain_error("indeterminate infinite difference");
    }
    if (a.is_pos_inf() || b.is_neg_inf()) {
        return ExtRational::pos_inf();
    }
    return ExtRational::neg_inf();
}

ExtRational operator+(const ExtRational& a, const ExtRational& b) {
    if (a.is_finite() && b.is_finite()) {
        return ExtRational(Rational(a.value_ + b.value_));
    }
    if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf())) {
        throw std::domain_error("indeterminate infinite sum");
    }
    if (a.is_pos_inf() || b.is_pos_inf()) {
        return ExtRational::pos_inf();
    }
    return ExtRational::neg_inf();
}

ExtRational max(const ExtRational& a, const ExtRational& b) { return a < b ? b : a; }
ExtRational min(const ExtRational& a, const ExtRational& b) { return b < a ? b : a; }

Rational dot(const RationalVector& a, const RationalVector& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot: length mismatch");
    }
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != 0 && b[i] != 0) {
            s += a[i] * b[i];
        }
    }
    return s;
}

RationalVector primitive_integer(const RationalVector& v) {
    BigInt lcm_den = 1;
    for (const auto& x : v) {
        if (x != 0) {
            lcm_den = boost::multiprecision::lcm(lcm_den, BigInt(denominator(x)));
        }
    }
    std::vector<BigInt> ints;
    ints.reserve(v.size());
    BigInt g = 0;
    for (const auto& x : v) {
        BigInt n = numerator(x) * (lcm_den / denominator(x));
        ints.push_back(n);
        g = boost::multiprecision::gcd(g, boost::multiprecision::abs(n));
    }
    RationalVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = g == 0 ? Rational(0) : Rational(ints[i] / g);
    }
    return out;
}

}  // namespace crn
