#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ratdense/density.hpp"
#include "ratdense/error.hpp"
#include "ratdense/sequential.hpp"

using namespace ratdense;

TEST_SUITE("sequential") {

TEST_CASE("sequence text") {
    auto s = make_sequence("bernoulli p_n = 1.0*n^-1 over a,b");
    CHECK(s.kind() == SequenceKind::bernoulli_formula);
    CHECK(s.alphabet() == "ab");
    CHECK(*s.first_letter_probability(4) == doctest::Approx(0.25));
    CHECK(*s.first_letter_probability(0) == 1.0);
    CHECK(s(10).prob('b') == doctest::Approx(0.9));
    auto half = make_sequence("bernoulli p_n = 2*n^-0.5 over a, b, c");
    CHECK(half(16).prob('a') == doctest::Approx(0.5));
    CHECK(half(16).prob('c') == doctest::Approx(0.25));
    CHECK(half(1).prob('a') == 1.0); // clamped
    auto cst = make_sequence("constant bernoulli a=0.5 b=0.5");
    CHECK(cst.at(3) == cst.at(700));
    auto f1 = make_sequence("maxent family1 gap=n");
    CHECK(f1.kind() == SequenceKind::maxent_family);
    CHECK(f1.at(5) == f1.at(5));
    CHECK(f1.at(5) != f1.at(6));
    auto f2 = make_sequence("maxent family2");
    CHECK_THROWS_AS(f2.at(17), CapExceededError);
    auto list = make_sequence("list bernoulli a=0.1 b=0.9 | bernoulli a=0.5 b=0.5");
    CHECK(list(0).prob('a') == doctest::Approx(0.1));
    CHECK(list(9).prob('a') == doctest::Approx(0.5));
    auto ev = make_sequence("eventually n0=3 bernoulli a=0.1 b=0.9 | bernoulli a=0.5 b=0.5");
    CHECK(ev(2).prob('a') == doctest::Approx(0.1));
    CHECK(ev(3).prob('a') == doctest::Approx(0.5));
    CHECK_THROWS_AS(make_sequence("bernoulli p_n = -1*n^-1 over a,b"), InvalidArgumentError);
    CHECK_THROWS_AS(make_sequence("bernoulli p_n = 1*n^-1 over a"), InvalidArgumentError);
    CHECK_THROWS_AS(make_sequence("bernoulli q = 3"), InvalidArgumentError);
    CHECK_THROWS_AS(make_sequence("maxent family9"), InvalidArgumentError);
    CHECK_THROWS_AS(make_sequence("poisson"), InvalidArgumentError);
}

TEST_CASE("terms") {
    Dfa contains = parse_regex("(a|b)*a(a|b)*", "ab");
    auto s = MeasureSequence::bernoulli_formula("ab", 1.0, 1.0);
    CHECK(std::abs(sequential_term(s, contains, 100) - 0.6339676587267709) <= 1e-12);
    CHECK(sequential_term(s, contains, 0) == 0.0);
    Dfa even = parse_regex("((a|b)(a|b))*", "ab");
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(sequential_term(s, even, i) == doctest::Approx(i % 2 == 0 ? 1.0 : 0.0));
    }
}

TEST_CASE("power-law bernoulli sequences") {
    Dfa contains = parse_regex("(a|b)*a(a|b)*", "ab");
    auto one = sequential_density(MeasureSequence::bernoulli_formula("ab", 1.0, 1.0), contains, 100000);
    CHECK(std::abs(one.estimate - (1 - std::exp(-1.0))) <= 2e-3);
    CHECK(one.converged);
    REQUIRE(one.closed_form_deviation.has_value());
    CHECK(*one.closed_form_deviation <= 1e-10);
    CHECK(*one.limit_density == 0.0);
    auto fast = sequential_density(MeasureSequence::bernoulli_formula("ab", 1.0, 2.0), contains, 100000);
    CHECK(fast.estimate <= 1e-2);
    auto slow = sequential_density(MeasureSequence::bernoulli_formula("ab", 1.0, 0.5), contains, 100000);
    CHECK(slow.estimate >= 0.99);
}

TEST_CASE("trace bookkeeping") {
    Dfa d = parse_regex("(a|b)*ab", "ab");
    SequentialOptions o;
    o.checkpoints = {1, 10, 50, 1000};
    auto r = sequential_density(MeasureSequence::bernoulli_formula("ab", 0.7, 0.3), d, 200, o);
    REQUIRE(r.terms.size() == 200);
    REQUIRE(r.checkpoints.size() == 4);
    CHECK(r.checkpoints.back().first == 200);
    for (const auto& [k, u] : r.checkpoints) {
        CHECK(cesaro_partial(r.terms, k) == u); // bit for bit
    }
    CHECK(cesaro_partial(r.terms, 200) == r.estimate);
    CHECK(r.window == 50);
    CHECK_THROWS_AS(sequential_density(MeasureSequence::bernoulli_formula("ab", 1, 1), d, 0), InvalidArgumentError);
}

TEST_CASE("constant sequences reproduce the ordinary density") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const std::string rx = oracle::random_regex(rng, "ab", 4);
        Dfa d = parse_regex(rx, "ab");
        Measure m = Measure::bernoulli("ab", oracle::random_distribution(rng, 2));
        DensityResult exact = density(d, m);
        auto seq = MeasureSequence::constant(m);
        auto r = sequential_density(seq, d, 4000);
        CAPTURE(rx);
        if (exact.mode == DensityMode::strong) {
            CHECK(std::abs(r.terms.back() - exact.value) <= 1e-9);
        }
        CHECK(*r.limit_density == exact.value);
        // the streamed terms are the chain slices
        for (std::size_t n : {0u, 1u, 7u, 100u, 3999u}) {
            CHECK(std::abs(r.terms[n] - std::clamp(slice_mass(lift_chain(d, m), n), 0.0, 1.0)) <= 1e-12);
        }
        CHECK(std::abs(r.estimate - exact.value) <= 1e-2);
    }
}

TEST_CASE("eventually constant sequences") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 5; ++trial) {
        Dfa d = parse_regex(oracle::random_regex(rng, "ab", 4), "ab");
        Measure before = Measure::bernoulli("ab", oracle::random_distribution(rng, 2));
        Measure after = Measure::bernoulli("ab", oracle::random_distribution(rng, 2));
        auto seq = MeasureSequence::eventually_constant(before, after, 100);
        auto r = sequential_density(seq, d, 10000);
        const double exact = density(d, after).value;
        CHECK(std::abs(r.estimate - exact) <= 1e-2);
        CHECK(*r.limit_density == exact);
        CHECK(r.terms[50] == doctest::Approx(slice_mass(lift_chain(d, before), 50)).epsilon(1e-12));
    }
}

TEST_CASE("gap family marginals approach the limit measure") {
    auto seq = MeasureSequence::maxent_family(1);
    auto m = seq(200).letter_marginals();
    CHECK(m[0] < 1e-2);
    CHECK(std::abs(m[1] - 0.5) < 1e-2);
    CHECK(std::abs(m[2] - 0.5) < 1e-2);
    CHECK(seq(200).is_invariant());
}

TEST_CASE("window family measure at n = 2") {
    auto seq = MeasureSequence::maxent_family(2);
    const Measure& m = seq(2);
    Measure vertex = max_entropy(sft_from_adjacency("abc", {{1, 0, 1}, {1, 1, 1}, {1, 1, 1}}));
    for (std::size_t n = 0; n <= 5; ++n) {
        for (const auto& w : oracle::words("abc", n)) {
            CHECK(std::abs(word_mass(m, w) - word_mass(vertex, w)) <= 1e-12);
        }
    }
}

TEST_CASE("window family regimes") {
    Dfa ends = intersect(parse_regex("a(a|b|c)*", "abc"), parse_regex("(a|b|c)*a", "abc"));
    auto seq = MeasureSequence::maxent_family(2);
    for (std::size_t n = 4; n <= 7; ++n) {
        CHECK(sequential_term(seq, ends, n) == 0.0); // a A^(n-2) a forbidden
    }
    for (std::size_t n = 8; n <= 15; ++n) {
        CHECK(sequential_term(seq, ends, n) > 0.05);
    }
}

}
