#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crn {

/// Exact rational number used for exponents, stoichiometric algebra and cone
/// computations.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

using RationalVector = std::vector<Rational>;

/// Parses `3`, `-1/2`, `0.25`, `1e-3` style literals exactly. Returns nullopt on
/// malformed input.
std::optional<Rational> parse_rational(std::string_view text);

std::string to_string(const Rational& r);
double to_double(const Rational& r);

/// Rational extended with symbolic -inf and +inf.
///
/// Used for time-scale exponents: a max over an empty reaction set is -inf and
/// a combination whose net change is identically zero has time scale +inf.
class ExtRational {
  public:
    enum class Kind { NegInf, Finite, PosInf };

    ExtRational() : kind_(Kind::NegInf) {}
    ExtRational(Rational value) : kind_(Kind::Finite), value_(std::move(value)) {}
    ExtRational(long long value) : kind_(Kind::Finite), value_(value) {}

    static ExtRational pos_inf() { return ExtRational(Kind::PosInf); }
    static ExtRational neg_inf() { return ExtRational(Kind::NegInf); }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::Finite; }
    bool is_pos_inf() const { return kind_ == Kind::PosInf; }
    bool is_neg_inf() const { return kind_ == Kind::NegInf; }

    /// Precondition: is_finite().
    const Rational& value() const { return value_; }

    double to_double() const;
    std::string str() const;

    friend bool operator==(const ExtRational& a, const ExtRational& b);
    friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b);

    /// a - b with the conventions finite - (-inf) = +inf and finite - (+inf) = -inf.
    /// inf - inf of the same sign is rejected with std::domain_error.
    friend ExtRational operator-(const ExtRational& a, const ExtRational& b);
    friend ExtRational operator+(const ExtRational& a, const ExtRational& b);

  private:
    explicit ExtRational(Kind kind) : kind_(kind) {}

    Kind kind_;
    Rational value_;
};

ExtRational max(const ExtRational& a, const ExtRational& b);
ExtRational min(const ExtRational& a, const ExtRational& b);

/// Dot product of two rational vectors of equal length.
Rational dot(const RationalVector& a, const RationalVector& b);

/// Divides an integer-valued (after clearing denominators) vector by the gcd of
/// its entries so the result is a primitive integer vector.
RationalVector primitive_integer(const RationalVector& v);

}  // namespace crn
