#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ratdense/density.hpp"
#include "ratdense/error.hpp"

using namespace ratdense;

namespace {

Measure random_markov(std::mt19937_64& rng, const std::string& alphabet) {
    std::vector<std::vector<double>> P;
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        P.push_back(oracle::random_distribution(rng, alphabet.size()));
    }
    std::vector<std::size_t> letters(alphabet.size());
    for (std::size_t i = 0; i < letters.size(); ++i) {
        letters[i] = i;
    }
    return Measure::markov(alphabet, oracle::stationary(P), P, letters);
}

} // namespace

TEST_SUITE("density") {

TEST_CASE("chain of contains-a") {
    Dfa d = parse_regex("(a|b)*a(a|b)*", "ab");
    const double p = 0.3, q = 0.7;
    Chain c = lift_chain(d, Measure::bernoulli("ab", {p, q}));
    REQUIRE(c.num_states() == 2);
    // state 0 = no a yet
    CHECK(c.transition.coeff(0, 0) == doctest::Approx(q));
    CHECK(c.transition.coeff(0, 1) == doctest::Approx(p));
    CHECK(c.transition.coeff(1, 0) == 0.0);
    CHECK(c.transition.coeff(1, 1) == doctest::Approx(1.0));
    for (std::size_t n = 0; n <= 50; ++n) {
        CHECK(std::abs(slice_mass(c, n) - (1 - std::pow(q, static_cast<double>(n)))) <= 1e-14);
    }
    Chain half = lift_chain(d, Measure::bernoulli("ab", {0.5, 0.5}));
    CHECK(slice_mass(half, 3) == 0.875);
}

TEST_CASE("dirac measure on b") {
    Measure dirac = Measure::bernoulli("ab", {0.0, 1.0});
    for (const char* rx : {"b*", "(bb)*", "a(a|b)*", "(a|b)*abb"}) {
        Dfa d = parse_regex(rx, "ab");
        for (std::size_t n = 0; n <= 10; ++n) {
            CHECK(slice_mass(lift_chain(d, dirac), n) == (accepts(d, std::string(n, 'b')) ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("even length alternates") {
    Dfa d = parse_regex("((a|b)(a|b))*", "ab");
    Chain c = lift_chain(d, Measure::bernoulli("ab", {0.4, 0.6}));
    for (std::size_t n = 0; n <= 20; ++n) {
        CHECK(slice_mass(c, n) == doctest::Approx(n % 2 == 0 ? 1.0 : 0.0));
    }
    DensityResult r = cesaro_limit(c);
    CHECK(std::abs(r.value - 0.5) <= 1e-12);
    CHECK(r.mode == DensityMode::cesaro);
    CHECK(r.tail_oscillation > 0.5);
}

TEST_CASE("contains-a, empty set and full language") {
    Measure m = Measure::bernoulli("ab", {0.2, 0.8});
    DensityResult r = density(parse_regex("(a|b)*a(a|b)*", "ab"), m);
    CHECK(r.value == 1.0);
    CHECK(r.mode == DensityMode::strong);
    CHECK(r.aperiodic_language == true);
    DensityResult none = density(parse_regex("%0", "ab"), m);
    CHECK(none.value == 0.0);
    CHECK(none.mode == DensityMode::strong);
    CHECK(density(universal_dfa("ab"), m).value == 1.0);
    CHECK(density(parse_regex("((a|b)(a|b))*", "ab"), m).aperiodic_language == false);
}

TEST_CASE("binary exponentiation matches iteration") {
    Dfa d = parse_regex("(a|b)*a(a|b)(a|b)(a|b)", "ab");
    Chain c = lift_chain(d, Measure::bernoulli("ab", {0.35, 0.65}));
    auto sweep = slice_masses(c, 400);
    for (std::size_t n : {0u, 1u, 5u, 17u, 64u, 255u, 399u}) {
        CHECK(std::abs(slice_mass(c, n) - sweep[n]) <= 1e-13);
    }
}

TEST_CASE("markov lift") {
    Measure m = Measure::markov("ab", {0.5, 0.5}, std::vector<std::vector<double>>{{0.3, 0.7}, {0.7, 0.3}}, {0, 1});
    Dfa d = parse_regex("(a|b)*a(a|b)*", "ab");
    Chain c = lift_chain(d, m);
    CHECK(c.offset == 1);
    CHECK(slice_mass(c, 0) == 0.0);
    CHECK(slice_mass(c, 1) == doctest::Approx(0.5));
    CHECK(slice_mass(c, 2) == doctest::Approx(0.85));
    Chain eps = lift_chain(parse_regex("b*", "ab"), m);
    CHECK(slice_mass(eps, 0) == 1.0);
    CHECK_THROWS_AS(lift_chain(parse_regex("a*", "abc"), m), AlphabetMismatchError);
}

TEST_CASE("slices equal brute force on random pairs") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const std::string alphabet = trial % 2 ? "ab" : "abc";
        const std::string rx = oracle::random_regex(rng, alphabet, 4);
        Dfa d = parse_regex(rx, alphabet);
        Measure b = Measure::bernoulli(alphabet, oracle::random_distribution(rng, alphabet.size()));
        Measure mk = random_markov(rng, alphabet);
        Chain cb = lift_chain(d, b), cm = lift_chain(d, mk);
        const std::size_t max_n = alphabet.size() == 2 ? 12 : 8;
        for (std::size_t n = 0; n <= max_n; ++n) {
            // independent oracle: regex matcher + product masses
            double ob = 0.0;
            for (const auto& w : oracle::words(alphabet, n)) {
                if (oracle::matches(rx, w)) {
                    ob += oracle::bernoulli_mass(alphabet, b.prob(), w);
                }
            }
            CHECK(std::abs(slice_mass(cb, n) - ob) <= 1e-10);
            CHECK(std::abs(brute_force_slice(d, b, n) - ob) <= 1e-10);
            CHECK(std::abs(slice_mass(cm, n) - brute_force_slice(d, mk, n)) <= 1e-10);
        }
    }
    CHECK_THROWS_AS(brute_force_slice(universal_dfa("ab"), Measure::bernoulli("ab", {0.5, 0.5}), 15),
                    CapExceededError);
    CHECK(brute_force_slice(universal_dfa("abc"), Measure::bernoulli("abc", {0.2, 0.3, 0.5}), 7) ==
          doctest::Approx(1.0));
}

TEST_CASE("additivity, monotonicity and bounds") {
    std::mt19937_64 rng(23);
    const std::string alphabet = "ab";
    for (int trial = 0; trial < 25; ++trial) {
        Dfa l1 = parse_regex(oracle::random_regex(rng, alphabet, 4), alphabet);
        Dfa l2 = parse_regex(oracle::random_regex(rng, alphabet, 4), alphabet);
        Measure m = trial % 2 ? Measure::bernoulli(alphabet, oracle::random_distribution(rng, 2))
                              : random_markov(rng, alphabet);
        Dfa disjoint = intersect(l2, complement(l1));
        REQUIRE(is_empty(intersect(l1, disjoint)));
        const double d1 = density(l1, m).value;
        const double dd = density(disjoint, m).value;
        const double du = density(unite(l1, disjoint), m).value;
        CHECK(std::abs(du - (d1 + dd)) <= 1e-9);
        CHECK(d1 >= 0.0);
        CHECK(d1 <= 1.0);
        const double sub = density(intersect(l1, l2), m).value;
        CHECK(sub <= d1 + 1e-12);
        CHECK(d1 <= density(unite(l1, l2), m).value + 1e-12);
        CHECK(density(universal_dfa(alphabet), m).value == 1.0);
    }
}

TEST_CASE("strong mode agrees with aperiodicity under positive bernoulli") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        Dfa d = parse_regex(oracle::random_regex(rng, "ab", 4), "ab");
        DensityResult r = density(d, Measure::bernoulli("ab", oracle::random_distribution(rng, 2)));
        REQUIRE(r.aperiodic_language.has_value());
        if (*r.aperiodic_language) {
            CHECK(r.mode == DensityMode::strong);
        }
    }
}

TEST_CASE("iterative fallback matches the structural value") {
    std::mt19937_64 rng(31);
    CesaroOptions iterative;
    iterative.dense_limit = 0;
    for (int trial = 0; trial < 15; ++trial) {
        Dfa d = parse_regex(oracle::random_regex(rng, "ab", 4), "ab");
        Chain c = lift_chain(d, Measure::bernoulli("ab", oracle::random_distribution(rng, 2)));
        DensityResult a = cesaro_limit(c);
        DensityResult b = cesaro_limit(c, iterative);
        CHECK(a.method == "structural");
        CHECK(b.method == "iterative");
        CHECK(std::abs(a.value - b.value) <= 1e-9);
        CHECK(a.mode == b.mode);
    }
    Chain even = lift_chain(parse_regex("(aaa)*", "a"), Measure::bernoulli("a", {1.0}));
    DensityResult r = cesaro_limit(even, iterative);
    CHECK(std::abs(r.value - 1.0 / 3) <= 1e-12);
    CHECK(r.mode == DensityMode::cesaro);
}

TEST_CASE("element densities and the ideal identities") {
    Monoid contains = transition_monoid(parse_regex("(a|b)*a(a|b)*", "ab"));
    auto nu = element_densities(contains, Measure::bernoulli("ab", {0.5, 0.5}));
    CHECK(nu[contains.element_of("a")] == doctest::Approx(1.0));
    CHECK(nu[contains.identity()] == 0.0);
    CorollaryReport rep = check_corollary(contains, nu);
    CHECK(rep.ok());
    CHECK(rep.rows[contains.element_of("a")].d == 1);

    Monoid parity = transition_monoid(parse_regex("(aa)*", "a"));
    nu = element_densities(parity, Measure::bernoulli("a", {1.0}));
    CHECK(nu[0] == doctest::Approx(0.5));
    CHECK(nu[1] == doctest::Approx(0.5));
    rep = check_corollary(parity, nu);
    CHECK(rep.ok());
    CHECK(rep.rows[0].d == 2);
    CHECK(rep.rows[0].predicted == doctest::Approx(0.5));

    Monoid trivial = transition_monoid(universal_dfa("ab"));
    nu = element_densities(trivial, Measure::bernoulli("ab", {0.5, 0.5}));
    CHECK(nu == std::vector<double>{1.0});
    CHECK(check_corollary(trivial, nu).ok());

    // a wrong density vector is reported
    rep = check_corollary(contains, {0.5, 0.5});
    CHECK_FALSE(rep.ok());
}

TEST_CASE("element densities sum to one on random monoids") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        Dfa d = parse_regex(oracle::random_regex(rng, "ab", 4), "ab");
        Monoid mon = transition_monoid(d);
        auto nu = element_densities(mon, Measure::bernoulli("ab", oracle::random_distribution(rng, 2)));
        CorollaryReport rep = check_corollary(mon, nu);
        CAPTURE(rep.violations.size());
        CHECK(rep.ok());
        CHECK(std::abs(rep.total - 1.0) <= 1e-9);
    }
}

TEST_CASE("language density from element densities") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        Dfa d = parse_regex(oracle::random_regex(rng, "ab", 3), "ab");
        Measure m = Measure::bernoulli("ab", oracle::random_distribution(rng, 2));
        Monoid mon = transition_monoid(d);
        auto nu = element_densities(mon, m);
        double sum = 0.0;
        for (std::size_t e = 0; e < mon.size(); ++e) {
            if (d.is_terminal(mon.transformation(e)[d.initial()])) {
                sum += nu[e];
            }
        }
        CHECK(std::abs(sum - density(d, m).value) <= 1e-9);
    }
}

}
