#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "relwalk/relwalk.hpp"

using namespace relwalk;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

template <typename F>
ErrorKind kind_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::InvalidArgument;
}

std::shared_ptr<const FiniteRelation> shared(FiniteRelation r)
{
    return std::make_shared<const FiniteRelation>(std::move(r));
}

double max_row_defect(const RandomWalk& w)
{
    double worst = 0.0;
    for (const auto& row : w.rows()) {
        double s = 0.0;
        for (const auto& t : row)
            s += t.p;
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

}  // namespace

TEST_CASE("regular walk on a d-regular graphing with uniform masses is uniform", "[walks]")
{
    const auto w = complete_walk(5);
    for (std::size_t x = 0; x < 5; ++x)
        for (const auto& t : w.row(static_cast<int>(x)))
            CHECK_THAT(t.p, WithinAbs(0.25, 1e-15));
    CHECK(w.base_kind() == BaseKind::tilde);
    CHECK_THAT(w.eta(), WithinAbs(0.25, 1e-15));
}

TEST_CASE("regular walk on a single edge is deterministic for any masses", "[walks]")
{
    const auto rel = shared(single_class_relation(std::vector<double>{0.2, 0.8}));
    const auto w = regular_walk(rel, Graphing{{{0, 1}}, std::nullopt});
    CHECK(w.probability(0, 1) == 1.0);
    CHECK(w.probability(1, 0) == 1.0);
}

TEST_CASE("regular walk on a weighted 3-cycle matches the closed form", "[walks]")
{
    const std::vector<double> mu{1.0 / 6, 1.0 / 3, 1.0 / 2};
    const auto w = regular_walk(shared(single_class_relation(mu)), cycle_graphing(3));
    // nu(x->y) = sqrt(mu(y)) / sum_{y' ~ x} sqrt(mu(y')); tilde(x) nu(x->y) proportional to sqrt(mu(x) mu(y)).
    for (int x = 0; x < 3; ++x) {
        double total = 0.0;
        for (int y = 0; y < 3; ++y)
            if (y != x)
                total += std::sqrt(mu[static_cast<std::size_t>(y)]);
        for (int y = 0; y < 3; ++y) {
            if (y == x)
                continue;
            CHECK_THAT(w.probability(x, y), WithinRel(std::sqrt(mu[static_cast<std::size_t>(y)]) / total, 1e-14));
            const double flow = w.base(x) * w.probability(x, y) * w.base_normalization();
            CHECK_THAT(flow, WithinRel(std::sqrt(mu[static_cast<std::size_t>(x)] * mu[static_cast<std::size_t>(y)]), 1e-13));
        }
    }
    CHECK(detailed_balance_violation(w) <= 1e-12);
    double total = 0.0;
    for (double b : w.base_mass())
        total += b;
    CHECK_THAT(total, WithinAbs(1.0, 1e-15));
}

TEST_CASE("regular walk rejects isolated points", "[walks]")
{
    const auto rel = shared(uniform_relation(3));
    CHECK(kind_of([&] { regular_walk(rel, Graphing{{{0, 1}}, std::nullopt}); }) == ErrorKind::IsolatedPoint);
}

TEST_CASE("custom walk validation errors", "[walks]")
{
    const auto rel = shared(uniform_relation(3));
    CHECK(kind_of([&] { custom_walk(rel, {{0, 1, 0.9}, {1, 0, 1.0}, {2, 2, 1.0}}); }) == ErrorKind::RowSumError);
    CHECK(kind_of([&] { custom_walk(rel, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}}); }) == ErrorKind::AsymmetricSupport);
    CHECK(kind_of([&] { custom_walk(rel, {{0, 1, -0.5}, {0, 0, 1.5}, {1, 1, 1.0}, {2, 2, 1.0}}); }) ==
          ErrorKind::InvalidProbability);
    const auto split = shared(build_relation(std::vector<double>(3, 1.0 / 3), std::vector<int>{0, 0, 1}));
    CHECK(kind_of([&] { custom_walk(split, {{0, 2, 1.0}, {2, 0, 1.0}, {1, 1, 1.0}}); }) == ErrorKind::NotEquivalent);
    const auto skew = shared(single_class_relation(std::vector<double>{0.25, 0.75}));
    try {
        custom_walk(skew, {{0, 1, 1.0}, {1, 0, 1.0}});
        FAIL("expected DetailedBalanceViolation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DetailedBalanceViolation);
        CHECK_THAT(e.value(), WithinAbs(0.5, 1e-15));
    }
}

TEST_CASE("identity walk is valid with zero balance residual", "[walks]")
{
    const auto w = identity_walk(shared(uniform_relation(4)));
    CHECK(detailed_balance_violation(w) == 0.0);
    CHECK(w.support_edges().empty());
}

TEST_CASE("perturbed kernel shows a detailed-balance residual", "[walks]")
{
    const auto w = cycle_walk(5);
    KernelRows rows = w.rows();
    rows[0][0].p += 1e-3;
    const double s = rows[0][0].p + rows[0][1].p;
    rows[0][0].p /= s;
    rows[0][1].p /= s;
    WalkOptions lax;
    lax.check_balance = false;
    const auto perturbed = RandomWalk::from_rows(w.relation_ptr(), rows, w.base_mass(), BaseKind::tilde, 1.0, lax);
    CHECK(detailed_balance_violation(perturbed) >= 5e-5);
    CHECK(kind_of([&] { RandomWalk::from_rows(w.relation_ptr(), rows, w.base_mass(), BaseKind::tilde); }) ==
          ErrorKind::DetailedBalanceViolation);
}

TEST_CASE("convolution examples", "[walks]")
{
    const auto c4 = cycle_walk(4);
    const auto two = convolve(c4, c4);
    for (int x = 0; x < 4; ++x) {
        CHECK_THAT(two.probability(x, x), WithinAbs(0.5, 1e-15));
        CHECK_THAT(two.probability(x, (x + 2) % 4), WithinAbs(0.5, 1e-15));
        CHECK(two.probability(x, (x + 1) % 4) == 0.0);
    }

    const auto pair = regular_walk(shared(single_class_relation(std::vector<double>{0.3, 0.7})), Graphing{{{0, 1}}, std::nullopt});
    const auto back = convolve(pair, pair);
    CHECK_THAT(back.probability(0, 0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(back.probability(1, 1), WithinAbs(1.0, 1e-15));

    const auto c6 = cycle_walk(6);
    const auto id = RandomWalk::from_rows(c6.relation_ptr(), identity_walk(c6.relation_ptr()).rows(), c6.base_mass(),
                                          BaseKind::tilde);
    const auto same = convolve(c6, id);
    for (int x = 0; x < 6; ++x)
        for (int y = 0; y < 6; ++y)
            CHECK_THAT(same.probability(x, y), WithinAbs(c6.probability(x, y), 1e-15));

    const auto weighted = regular_walk(shared(single_class_relation(std::vector<double>{1.0 / 6, 1.0 / 3, 1.0 / 2})),
                                       cycle_graphing(3));
    CHECK(kind_of([&] { convolve(weighted, identity_walk(weighted.relation_ptr())); }) ==
          ErrorKind::BaseMeasureMismatch);
}

TEST_CASE("convolution matches path enumeration and is associative", "[walks][property]")
{
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const auto w = gen::reversible_walk(rng, 15);
        const auto two = convolve(w, w);
        for (std::size_t x = 0; x < w.size(); ++x)
            for (std::size_t z = 0; z < w.size(); ++z)
                CHECK_THAT(two.probability(static_cast<int>(x), static_cast<int>(z)),
                           WithinAbs(oracle::two_step(w, static_cast<int>(x), static_cast<int>(z)), 1e-15));
        const auto left = convolve(convolve(w, w), w);
        const auto right = convolve(w, convolve(w, w));
        for (std::size_t x = 0; x < w.size(); ++x)
            for (std::size_t z = 0; z < w.size(); ++z)
                CHECK_THAT(left.probability(static_cast<int>(x), static_cast<int>(z)),
                           WithinAbs(right.probability(static_cast<int>(x), static_cast<int>(z)), 1e-12));
        const auto p6 = power(w, 6, 3);
        CHECK(max_row_defect(p6) <= 6e-12);
        CHECK(max_row_defect(w) <= 1e-12);
    }
}

TEST_CASE("convolution does not depend on the thread count", "[walks][property]")
{
    Rng rng(22);
    const auto w = gen::reversible_walk(rng, 40);
    const auto a = power(w, 5, 1);
    const auto b = power(w, 5, 4);
    for (std::size_t x = 0; x < w.size(); ++x) {
        REQUIRE(a.row(static_cast<int>(x)).size() == b.row(static_cast<int>(x)).size());
        for (std::size_t k = 0; k < a.row(static_cast<int>(x)).size(); ++k)
            CHECK(a.row(static_cast<int>(x))[k].p == b.row(static_cast<int>(x))[k].p);
    }
}

TEST_CASE("walk support generates the graphing's components", "[walks][property]")
{
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const auto w = gen::reversible_walk(rng, 25);
        const auto support = connected_components(w.size(), w.support_edges());
        // The generator joins each class by a path, so support components are the classes.
        for (std::size_t x = 0; x < w.size(); ++x)
            for (std::size_t y = 0; y < w.size(); ++y)
                CHECK((support[x] == support[y]) == w.relation().equivalent(static_cast<int>(x), static_cast<int>(y)));
    }
    const auto g = cycle_graphing(7);
    const auto w = regular_walk(std::make_shared<const FiniteRelation>(uniform_relation(7)), g);
    CHECK(w.support_edges() == g.normalized());
}

TEST_CASE("Cayley action walks", "[walks]")
{
    const auto c5 = cayley_action_walk(5, {shift_permutation(5, 1), shift_permutation(5, -1)}, {0.5, 0.5});
    const auto ref = cycle_walk(5);
    for (int x = 0; x < 5; ++x)
        for (int y = 0; y < 5; ++y)
            CHECK_THAT(c5.walk.probability(x, y), WithinAbs(ref.probability(x, y), 1e-15));
    CHECK(c5.relation->class_count() == 1);

    const auto id = cayley_action_walk(4, {shift_permutation(4, 0)}, {1.0});
    CHECK(id.relation->class_count() == 4);
    for (int x = 0; x < 4; ++x)
        CHECK(id.walk.probability(x, x) == 1.0);

    CHECK(kind_of([] { cayley_action_walk(5, {shift_permutation(5, 1), shift_permutation(5, -1)}, {0.5, 0.4}); }) ==
          ErrorKind::ProbSumError);
    CHECK(kind_of([] { cayley_action_walk(5, {shift_permutation(5, 1), shift_permutation(5, -1)}, {0.7, 0.3}); }) ==
          ErrorKind::AsymmetricGeneratorSet);
    CHECK(kind_of([] { cayley_action_walk(3, {{0, 0, 1}}, {1.0}); }) == ErrorKind::InvalidPermutation);
    // An involution may appear alone.
    CHECK_NOTHROW(cayley_action_walk(4, {{1, 0, 3, 2}}, {1.0}));
}

TEST_CASE("seeded Schreier walk is 4-regular with a gap", "[walks]")
{
    const auto a = schreier_walk(200, 2, 7);
    CHECK(detailed_balance_violation(a.walk) <= 1e-15);
    for (std::size_t x = 0; x < 200; ++x) {
        double s = 0.0;
        for (const auto& t : a.walk.row(static_cast<int>(x)))
            s += t.p;
        CHECK_THAT(s, WithinAbs(1.0, 1e-12));
    }
    const auto ev = oracle::jacobi_eigenvalues(oracle::symmetrized_kernel(a.walk));
    CHECK(oracle::kappa(ev) < 1.0 - 1e-3);
}
