#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "evobank/core.hpp"
#include "fixtures.hpp"
#include "test_support.hpp"

using namespace evobank;
using fixtures::point;

TEST_CASE("validate_pool accepts a well-formed pool", "[core]") {
    auto pool = validate_pool({point("a", {1, 2, 3, 4}, 1.0), point("b", {0, 0, 0, 1}, 2.0),
                               point("c", {5, 5, 5, 5}, 3.0)});
    REQUIRE(pool.size() == 3);
    REQUIRE(pool.dimension() == 4);
    REQUIRE(pool.find("b") == 1);
    REQUIRE_FALSE(pool.find("zz").has_value());
}

TEST_CASE("validate_pool rejects malformed input", "[core]") {
    CHECK(kind_of([] { validate_pool({point("a", {1, 2}), point("a", {3, 4})}); }) == ErrorKind::DuplicateId);
    CHECK(kind_of([] { validate_pool({point("a", {1, std::nan("")})}); }) == ErrorKind::NonFiniteValue);
    CHECK(kind_of([] {
              validate_pool({point("a", {1, std::numeric_limits<double>::infinity()})});
          }) == ErrorKind::NonFiniteValue);
    CHECK(kind_of([] { validate_pool({point("a", {1, 2}), point("b", {1, 2, 3})}); }) ==
          ErrorKind::DimensionMismatch);
    CHECK(kind_of([] { validate_pool({point("a", {1, 2}, std::nan(""))}); }) == ErrorKind::NonFiniteValue);
    CHECK(kind_of([] { validate_pool({}); }) == ErrorKind::EmptyPool);
    CHECK(kind_of([] { validate_pool({point("a", {1, 2})}, 3); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("default configuration mirrors the published hyperparameters", "[core]") {
    EvolutionConfig c;
    CHECK(c.alpha0 == 0.3);
    CHECK(c.lambda == 0.9);
    CHECK(c.beta == 0.5);
    CHECK(c.gamma == 1.0);
    CHECK(c.bank_size == 6000);
    CHECK(c.batch_size == 27000);
    CHECK(c.r_l == 0.3);
    CHECK(c.r_h == 0.95);
    CHECK(c.preference == 0.0);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("configuration validation", "[core]") {
    auto bad = [](auto mutate) {
        EvolutionConfig c;
        mutate(c);
        return kind_of([&] { c.validate(); });
    };
    CHECK(bad([](EvolutionConfig& c) { c.r_l = 0.95; }) == ErrorKind::InvalidConfig);
    CHECK(bad([](EvolutionConfig& c) { c.r_l = c.r_h; }) == ErrorKind::InvalidConfig);
    CHECK(bad([](EvolutionConfig& c) { c.bank_size = 0; }) == ErrorKind::InvalidConfig);
    CHECK(bad([](EvolutionConfig& c) { c.alpha0 = 1.5; }) == ErrorKind::InvalidConfig);
    CHECK(bad([](EvolutionConfig& c) { c.lambda = 0.0; }) == ErrorKind::InvalidConfig);
    CHECK(bad([](EvolutionConfig& c) { c.gamma = -1.0; }) == ErrorKind::InvalidConfig);
    CHECK(bad([](EvolutionConfig& c) { c.batch_size = c.bank_size; }) == ErrorKind::InvalidConfig);
}

TEST_CASE("combination names parse both ways", "[core]") {
    for (auto c : {Combination::additive, Combination::multiplicative, Combination::nonlinear}) {
        CHECK(parse_combination(to_string(c)) == c);
    }
    CHECK(kind_of([] { parse_combination("bogus"); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("rank permutation check", "[core]") {
    std::vector<BankEntry> entries(3);
    entries[0].point.id = "a";
    entries[0].overall = 3;
    entries[0].rank = 1;
    entries[1].point.id = "b";
    entries[1].overall = 2;
    entries[1].rank = 2;
    entries[2].point.id = "c";
    entries[2].overall = 2;
    entries[2].rank = 3;
    CHECK_NOTHROW(check_rank_permutation(entries));

    std::swap(entries[1].point.id, entries[2].point.id);  // tie broken against id order
    CHECK(kind_of([&] { check_rank_permutation(entries); }) == ErrorKind::IndexOutOfRange);
}
