#include "crn/cone.hpp"
#include "crn/errors.hpp"
#include "crn/gallery.hpp"
#include "crn/network.hpp"

#include <doctest.h>

#include <algorithm>

using namespace crn;

namespace {

bool has_law(const std::vector<ConservationLaw>& laws, const RationalVector& theta) {
    return std::any_of(laws.begin(), laws.end(), [&](const ConservationLaw& l) { return l.theta == theta; });
}

RationalVector rv(std::initializer_list<int> xs) {
    RationalVector v;
    for (int x : xs) {
        v.emplace_back(x);
    }
    return v;
}

bool mentions(const std::vector<Diagnostic>& ds, const std::string& needle) {
    return std::any_of(ds.begin(), ds.end(),
                       [&](const Diagnostic& d) { return d.message.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("intensity uses falling factorials") {
    Network bin({"A", "B", "C"}, {Reaction({1, 1, 0}, {0, 0, 1}, 2.0)});
    CHECK(intensity(bin, 0, {3, 4, 0}) == doctest::Approx(24.0));

    Network dim({"A", "B"}, {Reaction({2, 0}, {0, 1}, 2.0)});
    CHECK(intensity(dim, 0, {1, 0}) == 0.0);
    CHECK(intensity(dim, 0, {3, 0}) == doctest::Approx(12.0));

    Network birth({"S"}, {Reaction({0}, {1}, 4.30)});
    CHECK(intensity(birth, 0, {0}) == doctest::Approx(4.30));
    CHECK(intensity(birth, 0, {17}) == doctest::Approx(4.30));
}

TEST_CASE("binary intensity divides by the volume") {
    Network bin({"A", "B", "C"}, {Reaction({1, 1, 0}, {0, 0, 1}, 2.0)}, 2.0);
    CHECK(intensity(bin, 0, {3, 4, 0}) == doctest::Approx(12.0));
}

TEST_CASE("apply_reaction") {
    Network n({"S1", "S2", "S3"}, {Reaction({1, 1, 0}, {0, 0, 1}, 1.0), Reaction({0, 0, 0}, {1, 0, 0}, 1.0)});
    CHECK(apply_reaction(n, {3, 4, 0}, 0) == State{2, 3, 1});
    CHECK(apply_reaction(n, {0, 0, 0}, 1) == State{1, 0, 0});

    Network conv({"S1", "S2"}, {Reaction({1, 0}, {0, 1}, 1.0)});
    CHECK_THROWS_AS(apply_reaction(conv, {0, 1}, 0), NegativeCount);
}

TEST_CASE("conservation laws") {
    Network g = gallery::network("goutsias.crn");
    CHECK(has_law(conservation_laws(g), rv({0, 0, 0, 1, 1, 1})));

    Network mm = gallery::network("mm.crn");
    CHECK(has_law(conservation_laws(mm), rv({0, 1, 1, 0})));

    Network nio = gallery::network("inflow_exchange.crn");
    CHECK(conservation_laws(nio).empty());
}

TEST_CASE("conservation laws are conserved by every reaction") {
    Network g = gallery::network("goutsias.crn");
    for (const auto& law : conservation_laws(g)) {
        for (const auto& r : g.reactions()) {
            Rational s = 0;
            for (std::size_t i = 0; i < r.zeta().size(); ++i) {
                s += law.theta[i] * r.zeta()[i];
            }
            CHECK(s == 0);
        }
    }
}

TEST_CASE("classical ODE right-hand side") {
    Network ab({"A", "B"}, {Reaction({1, 0}, {0, 1}, 1.0)});
    auto f = classical_ode_rhs(ab, {1.0}, {2.0, 0.0});
    CHECK(f[0] == doctest::Approx(-2.0));
    CHECK(f[1] == doctest::Approx(2.0));

    auto zero = classical_ode_rhs(ab, {1.0}, {0.0, 0.0});
    CHECK(zero == std::vector<double>{0.0, 0.0});

    Network bd({"A"}, {Reaction({0}, {1}, 3.0), Reaction({1}, {0}, 1.0)});
    CHECK(classical_ode_rhs(bd, {3.0, 1.0}, {3.0})[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("validate") {
    Network tri({"S1", "S2"}, {Reaction({3, 0}, {0, 1}, 1.0)});
    CHECK(mentions(validate(tri), "order 3"));

    Network dead({"S1", "S2"}, {Reaction({1, 0}, {0, 1}, 0.0)});
    CHECK(mentions(validate(dead), "nonpositive rate constant"));

    CHECK(validate(gallery::network("goutsias.crn")).empty());
}

TEST_CASE("network constructor rejects bad input") {
    CHECK_THROWS_AS(Network({"A", "A"}, {}), std::invalid_argument);
    CHECK_THROWS_AS(Network({"A"}, {Reaction({1, 0}, {0, 1}, 1.0)}), std::invalid_argument);
    CHECK_THROWS_AS(Network({"A"}, {}, 0.0), std::invalid_argument);
}

TEST_CASE("rational parsing") {
    CHECK(parse_rational("3").value() == 3);
    CHECK(parse_rational("-1/2").value() == Rational(-1, 2));
    CHECK(parse_rational("0.25").value() == Rational(1, 4));
    CHECK(parse_rational("1e-3").value() == Rational(1, 1000));
    // Leading zeros are decimal, not octal.
    CHECK(parse_rational("0.083").value() == Rational(83, 1000));
    CHECK(parse_rational("010/3").value() == Rational(10, 3));
    CHECK_FALSE(parse_rational("1/0").has_value());
    CHECK_FALSE(parse_rational("abc").has_value());
    CHECK_FALSE(parse_rational("").has_value());
}

TEST_CASE("extended rationals") {
    ExtRational a(Rational(1, 2));
    CHECK(a < ExtRational::pos_inf());
    CHECK(ExtRational::neg_inf() < a);
    CHECK((a - ExtRational::neg_inf()).is_pos_inf());
    CHECK((a - ExtRational::pos_inf()).is_neg_inf());
    CHECK(max(a, ExtRational(2)) == ExtRational(2));
    CHECK_THROWS_AS(ExtRational::pos_inf() - ExtRational::pos_inf(), std::domain_error);
    CHECK(primitive_integer({Rational(1, 2), Rational(1, 3)}) == rv({3, 2}));
}

TEST_CASE("nonnegative kernel rays") {
    // x1 - x2 = 0 in R^3: rays (1,1,0) and (0,0,1).
    auto rays = cone::nonneg_kernel_rays({rv({1, -1, 0})}, 3);
    REQUIRE(rays.size() == 2);
    CHECK(rays[0] == rv({0, 0, 1}));
    CHECK(rays[1] == rv({1, 1, 0}));

    CHECK(cone::nonneg_kernel_rays({rv({1, 1})}, 2).empty());
}

TEST_CASE("feasibility") {
    using C = cone::Constraint;
    auto x = cone::find_feasible({C{rv({1, 1}), C::Op::Eq, 3}, C{rv({1, 0}), C::Op::Ge, 1}}, 2);
    REQUIRE(x.has_value());
    CHECK((*x)[0] + (*x)[1] == 3);
    CHECK((*x)[0] >= 1);
    CHECK_FALSE(cone::find_feasible({C{rv({1, 1}), C::Op::Le, -1}}, 2).has_value());
}
