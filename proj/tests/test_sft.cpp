#include <doctest.h>

#include "oracles.hpp"
#include "ratdense/error.hpp"
#include "ratdense/sequential.hpp"
#include "ratdense/sft.hpp"

using namespace ratdense;

namespace {

std::size_t brute_count(const std::string& alphabet, const std::vector<std::string>& blocks, std::size_t n,
                        std::size_t pad) {
    // words of length n that extend by `pad` letters on both sides without a forbidden block
    std::size_t count = 0;
    for (const auto& w : oracle::words(alphabet, n)) {
        bool ok = false;
        for (const auto& l : oracle::words(alphabet, pad)) {
            for (const auto& r : oracle::words(alphabet, pad)) {
                if (oracle::avoids(l + w + r, blocks)) {
                    ok = true;
                    break;
                }
            }
            if (ok) {
                break;
            }
        }
        count += ok ? 1 : 0;
    }
    return count;
}

} // namespace

TEST_SUITE("sft") {

TEST_CASE("full shift") {
    Sft s = sft_from_forbidden_blocks("abc", {});
    CHECK(s.memory() == 0);
    CHECK(s.num_vertices() == 1);
    CHECK(s.adjacency(0, 0) == 3);
    CHECK(count_words(s, 4) == 81);
    CHECK(count_words(s, 0) == 1);
    CHECK(is_irreducible(s));
    CHECK(language_dfa(s).num_states() == 1);
}

TEST_CASE("golden mean shift") {
    Sft s = sft_from_forbidden_blocks("ab", {"aa"});
    CHECK(s.num_vertices() == 2);
    Dfa d = language_dfa(s);
    CHECK(d.num_states() == 3);
    BigInt a = 1, b = 2;
    CHECK(count_words(s, 0) == 1);
    for (std::size_t n = 1; n <= 12; ++n) {
        CHECK(count_words(s, n) == b);
        CHECK(count_words(s, n) == brute_count("ab", {"aa"}, n, 1));
        BigInt c = a + b;
        a = b;
        b = c;
    }
}

TEST_CASE("window family at n = 2 is the three-letter graph") {
    Sft x2 = counterexample_family(2, 2);
    CHECK(is_irreducible(x2));
    // ab forbidden, everything else allowed
    Dfa d = language_dfa(x2);
    for (std::size_t n = 0; n <= 6; ++n) {
        for (const auto& w : oracle::words("abc", n)) {
            CHECK(accepts(d, w) == oracle::avoids(w, {"ab"}));
        }
    }
    Sft normal = sft_from_forbidden_blocks("abc", {"ab"});
    CHECK(normal.num_vertices() == 3);
    auto adj = normal.adjacency_matrix();
    CHECK(adj == std::vector<std::vector<std::uint64_t>>{{1, 0, 1}, {1, 1, 1}, {1, 1, 1}});
    for (std::size_t n = 0; n <= 8; ++n) {
        CHECK(count_words(normal, n) == count_words(x2, n));
    }
}

TEST_CASE("window family irreducible and counts match blocks") {
    for (std::size_t n = 2; n <= 12; ++n) {
        Sft s = counterexample_family(2, n);
        CHECK(is_irreducible(s));
    }
    for (std::size_t n = 2; n <= 5; ++n) {
        std::size_t log2n = 0;
        while ((std::size_t{2} << log2n) <= n) {
            ++log2n;
        }
        std::vector<std::string> blocks;
        for (const auto& mid : oracle::words("abc", n - 2)) {
            blocks.push_back("a" + mid + (log2n % 2 == 0 ? "a" : "b"));
        }
        Sft s = counterexample_family(2, n);
        Sft normal = sft_from_forbidden_blocks("abc", blocks);
        for (std::size_t k = 0; k <= 7; ++k) {
            CHECK(count_words(s, k) == count_words(normal, k));
        }
    }
    CHECK_THROWS_AS(counterexample_family(2, 17), CapExceededError);
    CHECK_THROWS_AS(counterexample_family(2, 1), InvalidArgumentError);
    CHECK_THROWS_AS(counterexample_family(3, 4), InvalidArgumentError);
}

TEST_CASE("gap family agrees with its forbidden blocks") {
    for (std::size_t n = 1; n <= 3; ++n) {
        Sft s = counterexample_family(1, n);
        CHECK(s.num_vertices() == n + 2);
        CHECK(is_irreducible(s));
        std::vector<std::string> blocks;
        for (std::size_t i = 0; i <= n; ++i) {
            for (const auto& mid : oracle::words("abc", i)) {
                blocks.push_back("a" + mid + "a");
            }
        }
        Dfa d = language_dfa(s);
        for (std::size_t k = 0; k <= 7; ++k) {
            for (const auto& w : oracle::words("abc", k)) {
                REQUIRE(accepts(d, w) == oracle::avoids(w, blocks));
            }
        }
    }
    // n = 2: no two a's within distance 3
    Dfa d = language_dfa(counterexample_family(1, 2));
    CHECK(accepts(d, "abbba"));
    CHECK_FALSE(accepts(d, "abba"));
}

TEST_CASE("k-block presentations preserve word counts") {
    Sft full = sft_from_forbidden_blocks("ab", {});
    Sft b2 = k_block_presentation(full, 2);
    CHECK(b2.num_vertices() == 4);
    CHECK(b2.edges().size() == 8);
    CHECK(b2.alphabet().size() == 4);

    Sft x = counterexample_family(1, 2);
    for (std::size_t k = 1; k <= 3; ++k) {
        Sft b = k_block_presentation(x, k);
        CHECK(is_irreducible(b));
        for (std::size_t n = 1; n <= 10; ++n) {
            CHECK(count_words(b, n) == count_words(x, n + k - 1));
        }
    }
    Sft one = k_block_presentation(x, 1);
    for (std::size_t n = 0; n <= 8; ++n) {
        CHECK(count_words(one, n) == count_words(x, n));
    }
}

TEST_CASE("irreducibility and empty shifts") {
    Sft loops = sft_from_adjacency("ab", {{1, 0}, {0, 1}});
    CHECK_FALSE(is_irreducible(loops));
    CHECK_THROWS_AS(sft_from_forbidden_blocks("ab", {"a", "b"}), EmptyShiftError);
    // a transient vertex is trimmed away
    Sft trimmed = sft_from_adjacency("ab", {{0, 1}, {0, 1}});
    CHECK(trimmed.num_vertices() == 1);
}

TEST_CASE("counts agree with enumeration on assorted shifts") {
    const std::vector<std::pair<std::string, std::vector<std::string>>> cases = {
        {"ab", {"aa"}}, {"ab", {"ab", "ba"}}, {"ab", {"aba"}}, {"abc", {"aa", "bcb"}}, {"abc", {"abc", "cc"}}};
    for (const auto& [abc, blocks] : cases) {
        Sft s = sft_from_forbidden_blocks(abc, blocks);
        Dfa d = language_dfa(s);
        const std::size_t max_n = abc.size() == 2 ? 10 : 7;
        for (std::size_t n = 0; n <= max_n; ++n) {
            CAPTURE(n);
            const std::size_t brute = brute_count(abc, blocks, n, 3);
            CHECK(count_words(s, n) == brute);
            CHECK(factors(s, n).size() == brute);
            std::size_t accepted = 0;
            for (const auto& w : oracle::words(abc, n)) {
                accepted += accepts(d, w) ? 1 : 0;
            }
            CHECK(accepted == brute);
        }
    }
}

TEST_CASE("shift spec text") {
    Sft s = parse_shift_spec("# golden mean\nalphabet ab\naa\n");
    CHECK(count_words(s, 5) == 13);
    Sft v = parse_shift_spec("alphabet abc\nadjacency\n1 0 1\n1 1 1\n1 1 1\n");
    CHECK(v.num_vertices() == 3);
    CHECK(count_words(v, 2) == 8);
    CHECK_THROWS(parse_shift_spec("aa\n"));
    CHECK_THROWS(parse_shift_spec("alphabet ab\nac\n"));
}

}
