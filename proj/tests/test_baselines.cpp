#include <catch_amalgamated.hpp>

#include <algorithm>
#include <limits>
#include <random>
#include <set>

#include "evobank/baselines.hpp"
#include "evobank/geometry.hpp"
#include "fixtures.hpp"
#include "test_support.hpp"

using namespace evobank;
using fixtures::point;
using Catch::Matchers::WithinAbs;

namespace {

Pool line(std::initializer_list<double> xs, std::initializer_list<double> qs = {}) {
    std::vector<CandidatePoint> pts;
    auto q = qs.begin();
    std::size_t i = 0;
    for (double x : xs) {
        pts.push_back(point(std::string(1, static_cast<char>('a' + i++)), {x}, q != qs.end() ? *q++ : 1.0));
    }
    return validate_pool(std::move(pts));
}

// Covering radius: max over all points of the distance to the nearest center.
double radius(const Pool& pool, const std::vector<std::size_t>& centers) {
    double r = 0.0;
    for (const auto& p : pool) {
        double best = std::numeric_limits<double>::infinity();
        for (auto c : centers) best = std::min(best, euclidean_distance(p.embedding, pool[c].embedding));
        r = std::max(r, best);
    }
    return r;
}

double brute_force_radius(const Pool& pool, std::size_t m) {
    const std::size_t n = pool.size();
    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> mask(n, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(m), true);
    do {
        std::vector<std::size_t> c;
        for (std::size_t i = 0; i < n; ++i)
            if (mask[i]) c.push_back(i);
        best = std::min(best, radius(pool, c));
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return best;
}

std::vector<std::size_t> indices(const Pool& pool, const SelectionResult& r) {
    std::vector<std::size_t> out;
    for (const auto& id : r.ids) out.push_back(*pool.find(id));
    return out;
}

}  // namespace

TEST_CASE("random selection", "[baselines]") {
    auto pool = validate_pool(fixtures::uniform_pool(1, 100, 2));
    auto a = random_select(pool, 10, 42);
    auto b = random_select(pool, 10, 42);
    auto c = random_select(pool, 10, 43);
    CHECK(a.ids == b.ids);
    CHECK(a.ids != c.ids);
    CHECK(std::set<std::string>(a.ids.begin(), a.ids.end()).size() == 10);
    CHECK(random_select(pool, 100, 1).ids.size() == 100);
    CHECK(kind_of([&] { random_select(pool, 101, 1); }) == ErrorKind::BudgetExceedsPool);
}

TEST_CASE("nearest-neighbour scores", "[baselines]") {
    CHECK(knn1_scores(line({0, 3})) == std::vector<double>{3, 3});
    CHECK(knn1_scores(line({0, 1, 10})) == std::vector<double>{1, 1, 9});
    CHECK(knn1_scores(line({2, 2, 5}))[0] == 0.0);
}

TEST_CASE("nearest-neighbour selection", "[baselines]") {
    auto pool = line({0, 1, 10, 30}, {4, 1, 2, 3});
    // kNN1 = {1, 1, 9, 20} -> {0, 0, 8/19, 1}; q' = {1, 0, 1/3, 2/3}
    // combined: {2, 1, (27/19)(4/3), 2 * 5/3} -> d, a, c, b
    auto r = knn1_select(pool, 2, 1.0);
    CHECK(r.ids == std::vector<std::string>{"d", "a"});
    CHECK_THAT(r.scores[0], WithinAbs(10.0 / 3.0, 1e-12));

    CHECK(knn1_select(pool, 2, 0.0).ids == std::vector<std::string>{"d", "c"});
    auto flat = line({0, 1, 10, 30});
    CHECK(knn1_select(flat, 3, 1.0).ids == std::vector<std::string>{"d", "c", "a"});
}

TEST_CASE("k-center greedy", "[baselines]") {
    auto pool = line({0, 10, 4});
    auto r = kcenter_greedy(pool, 2, "a");
    CHECK(r.ids == std::vector<std::string>{"a", "b"});
    CHECK(r.scores[1] == 10.0);
    CHECK(kcenter_greedy(pool, 1).ids == std::vector<std::string>{"a"});
    CHECK(kcenter_greedy(pool, 1, "c").ids == std::vector<std::string>{"c"});
    CHECK(kind_of([&] { kcenter_greedy(pool, 4); }) == ErrorKind::BudgetExceedsPool);
}

TEST_CASE("k-center greedy is a 2-approximation", "[baselines][oracle]") {
    std::mt19937_64 rng(99);
    for (std::size_t n = 2; n <= 12; ++n) {
        for (std::size_t m = 1; m <= std::min<std::size_t>(4, n); ++m) {
            for (int trial = 0; trial < 3; ++trial) {
                auto pool = validate_pool(fixtures::uniform_pool(rng(), n, 1 + rng() % 4, 5.0));
                auto greedy = kcenter_greedy(pool, m);
                CHECK(radius(pool, indices(pool, greedy)) <= 2.0 * brute_force_radius(pool, m) + 1e-12);
            }
        }
    }
}

TEST_CASE("k-center separation shrinks as the budget grows", "[baselines][property]") {
    auto pool = validate_pool(fixtures::uniform_pool(3, 40, 3, 2.0));
    auto full = kcenter_greedy(pool, 40);
    for (std::size_t i = 2; i < full.scores.size(); ++i) CHECK(full.scores[i] <= full.scores[i - 1]);
}

TEST_CASE("DEITA threshold filter", "[baselines]") {
    auto ortho = validate_pool({point("a", {1, 0, 0}, 1), point("b", {0, 1, 0}, 3), point("c", {0, 0, 1}, 2)});
    CHECK(deita_select(ortho, 2).ids == std::vector<std::string>{"b", "c"});

    auto dup = validate_pool({point("a", {1, 1}, 5), point("b", {1, 1}, 4), point("c", {1, -1}, 3)});
    auto r = deita_select(dup, 2);
    CHECK(r.ids == std::vector<std::string>{"a", "c"});
    CHECK_FALSE(r.shortfall);
    auto short_r = deita_select(dup, 3);
    CHECK(short_r.ids.size() == 2);
    CHECK(short_r.shortfall);
}

TEST_CASE("DEITA selections respect the cosine threshold", "[baselines][property]") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        auto pool = validate_pool(fixtures::uniform_pool(rng(), 60, 2 + rng() % 4, 1.0));
        auto r = deita_select(pool, 20);
        auto idx = indices(pool, r);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = i + 1; j < idx.size(); ++j)
                CHECK(cosine_similarity(pool[idx[i]].embedding, pool[idx[j]].embedding) < 0.9);
    }
}

TEST_CASE("diversity and quality greedy", "[baselines]") {
    auto pool = line({0, 1, 2}, {5, 3, 4});
    CHECK(quality_greedy(pool, 2).ids == std::vector<std::string>{"a", "c"});
    const std::vector<double> rep{0.1, 0.9, 0.5};
    CHECK(diversity_greedy(pool, rep, 2).ids == std::vector<std::string>{"b", "c"});
    CHECK(top_by_score(pool, std::vector<double>{1, 1, 1}, 2) == std::vector<std::size_t>{0, 1});
    CHECK(kind_of([&] { quality_greedy(pool, 4); }) == ErrorKind::BudgetExceedsPool);
}
