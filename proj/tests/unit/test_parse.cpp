#include "crn/gallery.hpp"
#include "crn/limit_io.hpp"
#include "crn/parse.hpp"

#include <doctest.h>

#include <random>

using namespace crn;

namespace {

bool has_error(const std::vector<io::ParseDiagnostic>& ds) {
    for (const auto& d : ds) {
        if (d.severity == io::ParseDiagnostic::Severity::Error) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("dimerization line") {
    auto r = io::parse_network("species M, D\n2 M -> D @ 8.30e-2\n");
    REQUIRE(r.ok());
    CHECK_FALSE(r.has_errors());
    const auto& net = *r.value;
    REQUIRE(net.num_reactions() == 1);
    CHECK(net.reaction(0).nu() == std::vector<Count>{2, 0});
    CHECK(net.reaction(0).nu_prime() == std::vector<Count>{0, 1});
    CHECK(net.reaction(0).rate_const() == doctest::Approx(0.0830));
}

TEST_CASE("reversible lines expand forward first") {
    auto r = io::parse_network("species A, B\nflip: A <-> B @ 1, 2\n");
    REQUIRE(r.ok());
    const auto& net = *r.value;
    REQUIRE(net.num_reactions() == 2);
    CHECK(net.reaction(0).nu() == std::vector<Count>{1, 0});
    CHECK(net.reaction(0).rate_const() == 1.0);
    CHECK(net.reaction(1).nu() == std::vector<Count>{0, 1});
    CHECK(net.reaction(1).rate_const() == 2.0);
    CHECK(net.reaction(1).label() == "flip_rev");
}

TEST_CASE("negative rate is reported at the rate token") {
    auto r = io::parse_network("species A, B\nA -> B @ -1\n");
    REQUIRE(r.has_errors());
    CHECK(r.diagnostics[0].line == 2);
    CHECK(r.diagnostics[0].column == 10);
}

TEST_CASE("implicit species warn, and fail in strict mode") {
    auto lax = io::parse_network("A -> B @ 1\n");
    REQUIRE(lax.ok());
    CHECK_FALSE(lax.has_errors());
    CHECK_FALSE(lax.diagnostics.empty());
    io::NetworkParseOptions strict;
    strict.strict = true;
    CHECK(io::parse_network("A -> B @ 1\n", strict).has_errors());
}

TEST_CASE("binding scaling file") {
    Network net = gallery::network("goutsias.crn");
    auto r = io::parse_scaling(gallery::file("goutsias_binding.scale"), net);
    REQUIRE(r.ok());
    const auto& spec = *r.value;
    CHECK(spec.N0 == 100.0);
    CHECK(spec.alpha[0] == 1);
    CHECK(spec.alpha[1] == 1);
    CHECK(spec.alpha[2] == 0);
    CHECK(spec.kappa[8] == doctest::Approx(8.30));
    CHECK(spec.kappa[9] == doctest::Approx(0.500));
    CHECK(spec.kappa[6] == doctest::Approx(199.0));
    CHECK(spec.kappa[7] == doctest::Approx(8.77e-8));
}

TEST_CASE("zero beta is the identity scaling") {
    Network net = gallery::network("goutsias.crn");
    auto r = io::parse_scaling("N0: 50\n", net);
    REQUIRE(r.ok());
    for (std::size_t k = 0; k < net.num_reactions(); ++k) {
        CHECK(r.value->kappa[k] == doctest::Approx(net.reaction(k).rate_const()));
    }
}

TEST_CASE("scaling errors") {
    Network net = gallery::network("goutsias.crn");
    CHECK(io::parse_scaling("N0: 100\nalpha: {Q: 1}\n", net).has_errors());
    CHECK(io::parse_scaling("N0: 100\nbeta: {R99: 1}\n", net).has_errors());
    CHECK(io::parse_scaling("N0: 1\n", net).has_errors());
    auto idx = io::parse_scaling("N0: 100\nbeta: {9: 1/2}\n", net);
    REQUIRE(idx.ok());
    CHECK(idx.value->beta[8] == Rational(1, 2));
}

TEST_CASE("format_network round trip") {
    for (const char* name : {"goutsias.crn", "mm.crn", "mastny.crn", "inflow_exchange.crn", "slow_exchange.crn"}) {
        Network net = gallery::network(name);
        auto back = io::parse_network(io::format_network(net));
        REQUIRE(back.ok());
        CHECK(*back.value == net);
    }
}

TEST_CASE("format_network edge cases") {
    Network empty;
    std::string text = io::format_network(empty);
    CHECK(text.find("species") != std::string::npos);
    CHECK(text.find("->") == std::string::npos);

    Network vol({"A"}, {Reaction({0}, {1}, 1.0)}, 2.0);
    CHECK(io::format_network(vol).find("volume 2") != std::string::npos);
    CHECK(*io::parse_network(io::format_network(vol)).value == vol);
}

TEST_CASE("scaling and initial state round trip") {
    Network net = gallery::network("goutsias.crn");
    ScalingSpec spec = gallery::scaling("goutsias_binding.scale", net);
    auto back = io::parse_scaling(io::format_scaling(spec, net), net);
    REQUIRE(back.ok());
    CHECK(back.value->alpha == spec.alpha);
    CHECK(back.value->beta == spec.beta);

    State x0 = gallery::initial_state("goutsias.init", net);
    CHECK(x0 == State{2, 6, 0, 0, 2, 0});
    CHECK(*io::parse_initial_state(io::format_initial_state(x0, net), net).value == x0);
    CHECK(io::parse_initial_state("M: -1\n", net).has_errors());
}

TEST_CASE("format_double is round-trip exact") {
    for (double v : {0.1, 8.77e-8, 1.0 / 3.0, 199.0, -2.5e300}) {
        CHECK(std::stod(io::format_double(v)) == v);
    }
}

TEST_CASE("limit model text round trip") {
    auto model = gallery::limit_model("goutsias_g2.limit");
    std::string text = io::format_limit_model(model);
    CHECK(io::is_limit_model(text));
    CHECK_FALSE(io::is_limit_model(gallery::file("goutsias.crn")));
    auto back = io::parse_limit_model(text);
    REQUIRE(back.ok());
    CHECK(io::format_limit_model(*back.value) == text);
    CHECK(back.value->closed == model.closed);
    CHECK(back.value->channels.size() == model.channels.size());
}

TEST_CASE("parser survives arbitrary input") {
    std::mt19937 gen(7);
    const std::string alphabet = "AB12 ->+<@:,.#e\n\t{}";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(0, 80);
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        for (std::size_t n = len(gen); n > 0; --n) {
            s += alphabet[pick(gen)];
        }
        auto r = io::parse_network(s);
        // Either a network or at least one error, never both missing.
        CHECK((r.ok() || has_error(r.diagnostics)));
        if (r.ok()) {
            auto again = io::parse_network(io::format_network(*r.value));
            CHECK((again.ok() && *again.value == *r.value));
        }
    }
}
