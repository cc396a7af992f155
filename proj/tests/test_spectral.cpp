#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "relwalk/relwalk.hpp"

using namespace relwalk;
using Catch::Matchers::WithinAbs;

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

Eigen::MatrixXcd phase(double t)
{
    return Eigen::MatrixXcd::Constant(1, 1, std::polar(1.0, t));
}

}  // namespace

TEST_CASE("trivial representation diffusion is the scalar kernel", "[spectral]")
{
    const auto w = cycle_walk(5);
    const auto d = simple_diffusion(w);
    const Eigen::MatrixXcd m = Eigen::MatrixXcd(d.matrix());
    for (int x = 0; x < 5; ++x)
        for (int y = 0; y < 5; ++y)
            CHECK(m(x, y) == Complex(w.probability(x, y), 0.0));
    CHECK(d.self_adjoint_residual() <= 1e-15);
}

TEST_CASE("trivial representation fixes exactly the class-constant fields", "[spectral]")
{
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const auto w = gen::reversible_walk(rng, 20);
        const auto s = spectrum(simple_diffusion(w));
        CHECK(s.fixed_dim == w.relation().class_count());
        REQUIRE(s.rank_deficiency);
        CHECK(*s.rank_deficiency == s.fixed_dim);
        CHECK(s.warnings.empty());
    }
}

TEST_CASE("regular representation", "[spectral]")
{
    const auto rel = build_relation(std::vector<double>{0.25, 0.25, 0.5}, std::vector<int>{0, 0, 1});
    const auto rep = regular_representation(rel);
    CHECK(rep.dim() == 2);
    CHECK(rep.block(0, 1).isApprox(Eigen::MatrixXcd::Identity(2, 2)));
    const auto single = regular_representation(uniform_relation(1));
    CHECK(single.dim() == 1);

    Rng rng(32);
    const auto w = gen::reversible_walk(rng, 15);
    const auto s = spectrum(DiffusionOperator(w, regular_representation(w.relation())));
    CHECK(s.fixed_dim >= w.relation().class_count());
}

TEST_CASE("gauge and raw representations", "[spectral]")
{
    const auto rel = uniform_relation(4);
    std::vector<Eigen::MatrixXcd> u{phase(0.1), phase(0.7), phase(-1.3), phase(2.0)};
    const auto g = gauge_representation(rel, 1, u);
    CHECK(std::abs(g.block(1, 2)(0, 0) - std::polar(1.0, 0.7 + 1.3)) <= 1e-15);

    const auto k = cycle_graphing(4);
    const auto raw = raw_representation(rel, k, edge_blocks_from_gauge(g, k));
    CHECK(raw.cycle_residual() <= 1e-12);
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y)
            CHECK((raw.block(x, y) - g.block(x, y)).norm() <= 1e-12);

    auto blocks = edge_blocks_from_gauge(g, k);
    blocks[{2, 3}] *= std::polar(1.0, 0.1);
    try {
        raw_representation(rel, k, blocks);
        FAIL("expected CycleInconsistency");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CycleInconsistency);
        CHECK_THAT(e.value(), WithinAbs(std::abs(std::polar(1.0, 0.1) - 1.0), 1e-12));
    }

    u[2] = Eigen::MatrixXcd::Constant(1, 1, Complex(1.1, 0.0));
    CHECK(kind_of([&] { gauge_representation(rel, 1, u); }) == ErrorKind::NotUnitary);
    CHECK(kind_of([&] { raw_representation(rel, Graphing{{{0, 1}, {1, 2}}, std::nullopt}, {{{0, 1}, phase(0.2)}}); }) ==
          ErrorKind::MissingEdgeBlock);
}

TEST_CASE("random unitaries are unitary", "[spectral][property]")
{
    Rng rng(33);
    for (int d = 1; d <= 6; ++d)
        for (int k = 0; k < 10; ++k)
            CHECK(unitarity_defect(random_unitary(d, rng)) <= 1e-12);
}

TEST_CASE("diffusion examples", "[spectral]")
{
    const auto id = identity_walk(shared(uniform_relation(3)));
    Rng rng(34);
    const auto d = DiffusionOperator(id, random_gauge_representation(id.relation(), 2, rng));
    CHECK(Eigen::MatrixXcd(d.matrix()).isApprox(Eigen::MatrixXcd::Identity(6, 6)));

    const auto swap = regular_walk(shared(single_class_relation(std::vector<double>{0.3, 0.7})), Graphing{{{0, 1}}, std::nullopt});
    const auto s = spectrum(simple_diffusion(swap));
    REQUIRE(s.eigenvalues.size() == 2);
    CHECK_THAT(s.eigenvalues[0], WithinAbs(-1.0, 1e-12));
    CHECK_THAT(s.eigenvalues[1], WithinAbs(1.0, 1e-12));

    const auto c3 = spectrum(simple_diffusion(cycle_walk(3)));
    CHECK_THAT(c3.eigenvalues[0], WithinAbs(-0.5, 1e-12));
    CHECK_THAT(c3.eigenvalues[1], WithinAbs(-0.5, 1e-12));
    CHECK_THAT(c3.eigenvalues[2], WithinAbs(1.0, 1e-12));

    CHECK(kind_of([&] { DiffusionOperator(cycle_walk(4), trivial_representation(uniform_relation(3))); }) ==
          ErrorKind::DimensionMismatch);
}

TEST_CASE("complete graph and cycle spectra against closed forms", "[spectral]")
{
    for (std::size_t m = 2; m <= 9; ++m) {
        const auto s = spectrum(simple_diffusion(complete_walk(m)));
        CHECK(s.fixed_dim == 1);
        REQUIRE(s.kappa);
        CHECK_THAT(*s.kappa, WithinAbs(-1.0 / static_cast<double>(m - 1), 1e-12));
    }
    for (std::size_t n = 3; n <= 20; ++n) {
        const auto s = spectrum(simple_diffusion(cycle_walk(n)));
        const auto expected = oracle::cycle_spectrum(n);
        for (std::size_t k = 0; k < n; ++k)
            CHECK_THAT(s.eigenvalues[k], WithinAbs(expected[k], 1e-12));
    }
}

TEST_CASE("degenerate spectrum has no kappa", "[spectral]")
{
    const auto s = spectrum(simple_diffusion(identity_walk(shared(uniform_relation(5)))));
    CHECK(s.degenerate);
    CHECK_FALSE(s.kappa);
    CHECK_FALSE(s.lambda);
    CHECK(s.fixed_dim == 5);
    CHECK(kind_of([&] { poincare_report(s, 2); }) == ErrorKind::DegenerateSpectrum);
}

TEST_CASE("spectrum agrees with the Jacobi oracle on random Hermitian operators", "[spectral][property]")
{
    Rng rng(35);
    for (int trial = 0; trial < 15; ++trial) {
        const auto w = gen::reversible_walk(rng, 12);
        const int dim = 1 + trial % 3;
        const DiffusionOperator d(w, random_gauge_representation(w.relation(), dim, rng));
        const auto s = spectrum(d);
        const Eigen::MatrixXcd sym = Eigen::MatrixXcd(d.symmetrized());
        std::vector<std::vector<Complex>> h(static_cast<std::size_t>(sym.rows()),
                                            std::vector<Complex>(static_cast<std::size_t>(sym.cols())));
        for (Eigen::Index i = 0; i < sym.rows(); ++i)
            for (Eigen::Index j = 0; j < sym.cols(); ++j)
                h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = sym(i, j);
        const auto ev = oracle::hermitian_eigenvalues(h);
        REQUIRE(ev.size() == s.eigenvalues.size());
        for (std::size_t k = 0; k < ev.size(); ++k)
            CHECK_THAT(s.eigenvalues[k], WithinAbs(ev[k], 1e-10));
        for (double t : s.eigenvalues) {
            CHECK(t >= -1.0 - 1e-9);
            CHECK(t <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("Lanczos path resolves kappa and the fixed space", "[spectral][lanczos]")
{
    SpectrumOptions iterative;
    iterative.eigen.force_iterative = true;

    const auto c = cycle_walk(300);
    const auto s = spectrum(simple_diffusion(c), iterative);
    CHECK(s.method == "lanczos");
    CHECK(s.fixed_dim == 1);
    REQUIRE(s.kappa);
    CHECK_THAT(*s.kappa, WithinAbs(oracle::cycle_kappa(300), 1e-9));

    // Three components: a fixed space of dimension 3 found by locking.
    Rng rng(36);
    const auto w = gen::reversible_walk(rng, 40);
    const auto dense = spectrum(simple_diffusion(w));
    const auto lan = spectrum(simple_diffusion(w), iterative);
    CHECK(lan.fixed_dim == dense.fixed_dim);
    REQUIRE(lan.kappa);
    CHECK_THAT(*lan.kappa, WithinAbs(*dense.kappa, 1e-9));
    CHECK_THAT(lan.eigenvalues.front(), WithinAbs(dense.eigenvalues.front(), 1e-9));

    const auto a = schreier_walk(200, 2, 7);
    SpectrumOptions seeded = iterative;
    seeded.eigen.seed = 99;
    const auto x = spectrum(simple_diffusion(a.walk), iterative);
    const auto y = spectrum(simple_diffusion(a.walk), seeded);
    const auto z = spectrum(simple_diffusion(a.walk));
    CHECK_THAT(*x.kappa, WithinAbs(*z.kappa, 1e-9));
    CHECK_THAT(*y.kappa, WithinAbs(*z.kappa, 1e-9));
}

TEST_CASE("energy identities", "[spectral]")
{
    const auto c4 = cycle_walk(4);
    const auto d = simple_diffusion(c4);
    const auto trivial = trivial_representation(c4.relation());
    const auto constant = Field::constant(4, Eigen::VectorXcd::Constant(1, Complex(2.0, -1.0)));
    CHECK(std::abs(energy(d, constant)) <= 1e-15);
    CHECK(gradient_energy(c4, trivial, constant) == 0.0);

    Rng rng(37);
    const auto two = convolve(c4, c4);
    for (int k = 0; k < 20; ++k) {
        const auto xi = Field::random(4, 1, rng);
        const double scale = d.norm2(xi.values);
        CHECK(std::abs(energy(d, xi) - gradient_energy(c4, trivial, xi)) <= 1e-12 * scale);
        CHECK(std::abs(energy_n(d, xi, 1) - energy(d, xi)) <= 1e-14 * scale);
        CHECK(std::abs(energy_n(d, xi, 2) - gradient_energy(two, trivial, xi)) <= 1e-12 * scale);
    }

    // A fixed field of a gauge representation: xi_x = U_x v.
    const auto rep = random_gauge_representation(c4.relation(), 3, rng);
    const DiffusionOperator dg(c4, rep);
    Field fixed = Field::zeros(4, 3);
    const Eigen::VectorXcd v = random_complex_vector(3, rng);
    for (int x = 0; x < 4; ++x)
        fixed.at(x) = rep.gauge(x) * v;
    CHECK(std::abs(energy(dg, fixed)) <= 1e-12);
    CHECK(gradient_energy(c4, rep, fixed) <= 1e-12);

    const auto id = identity_walk(c4.relation_ptr());
    const auto did = simple_diffusion(id);
    const auto xi = Field::random(4, 1, rng);
    for (int n = 0; n < 4; ++n)
        CHECK(std::abs(energy_n(did, xi, n)) <= 1e-14);
}

TEST_CASE("fixed eigenvectors are invariant fields", "[spectral][property]")
{
    Rng rng(38);
    for (int trial = 0; trial < 10; ++trial) {
        const auto w = gen::reversible_walk(rng, 15);
        const auto rep = random_gauge_representation(w.relation(), 2, rng);
        const DiffusionOperator d(w, rep);
        const auto dec = decompose(d);
        for (auto col : dec.fixed_columns()) {
            const Field xi{2, dec.from_symmetric(dec.vectors.col(col))};
            const double norm = std::sqrt(d.norm2(xi.values));
            for (auto [x, y] : w.support_edges())
                CHECK((rep.block(x, y) * xi.at(y) - xi.at(x)).norm() <= 1e-8 * norm);
        }
    }
}

TEST_CASE("Poincare constants", "[spectral]")
{
    const auto k3 = poincare_report(simple_diffusion(complete_walk(3)), 4);
    CHECK(k3.c_n_measured >= k3.c_n_formula - 1e-15);

    // Star-like spectrum {1, 0, ...}: the lazy walk with all mass on the uniform average.
    std::vector<KernelEntry> entries;
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y)
            entries.push_back({x, y, 0.25});
    const auto avg = custom_walk(shared(uniform_relation(4)), entries);
    const auto star = poincare_report(simple_diffusion(avg), 5);
    CHECK_THAT(star.c_n_measured, WithinAbs(1.0, 1e-12));
    CHECK_THAT(star.c_n_formula, WithinAbs(1.0, 1e-12));

    const auto c6 = poincare_report(simple_diffusion(cycle_walk(6)), 3);
    double expected = -1e300;
    for (int k = 0; k < 6; ++k) {
        const double t = std::cos(M_PI * k / 3.0);
        if (t < 1.0 - 1e-9)
            expected = std::max(expected, 1.0 + t + t * t);
    }
    CHECK_THAT(c6.c_n_measured, WithinAbs(expected, 1e-12));
    CHECK_THAT(c6.c_n_formula, WithinAbs(1.75, 1e-12));
    CHECK(kind_of([] { poincare_report(simple_diffusion(cycle_walk(5)), 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("kappa below 1 iff c2 below 2", "[spectral][property]")
{
    Rng rng(39);
    for (int trial = 0; trial < 20; ++trial) {
        const auto w = gen::reversible_walk(rng, 20);
        const auto s = spectrum(simple_diffusion(w));
        REQUIRE(s.kappa);
        const auto p = poincare_report(s, 2);
        CHECK((*s.kappa < 1.0) == (p.c_n_measured < 2.0));
        CHECK(p.c_n_measured == 1.0 + *s.kappa);
        CHECK_THAT(*s.c_inf, WithinAbs(1.0 / *s.lambda, 1e-15));
    }
}

TEST_CASE("Dirichlet inequality", "[spectral]")
{
    const auto c5 = simple_diffusion(cycle_walk(5));
    const auto r = dirichlet_report(c5, 100, 4);
    CHECK(r.max_violation <= 1e-10);
    CHECK_THAT(r.c_inf, WithinAbs(1.0 / (1.0 - std::cos(2 * M_PI / 5)), 1e-12));

    const auto c6 = dirichlet_report(simple_diffusion(cycle_walk(6)));
    CHECK_THAT(c6.c_inf, WithinAbs(2.0, 1e-12));

    const auto dec = decompose(c5);
    const auto fixed = Field::constant(5, Eigen::VectorXcd::Constant(1, Complex(1.5, 0.0)));
    CHECK(std::abs(dirichlet_gap(c5, dec, fixed, r.c_inf)) <= 1e-14);

    CHECK(kind_of([] { dirichlet_report(simple_diffusion(identity_walk(shared(uniform_relation(3))))); }) ==
          ErrorKind::DegenerateSpectrum);
}

TEST_CASE("c2 criterion over a representation family", "[spectral]")
{
    const auto expander = schreier_walk(200, 2, 7);
    RepresentationFamily family;
    family.random_gauge = 4;
    family.max_dim = 2;
    const auto r = c2_criterion(expander.walk, family, 4);
    REQUIRE(r.c2);
    CHECK(*r.c2 < 2.0);
    CHECK(r.property_T_certified);
    CHECK(r.finite_model_evidence);
    // The regular representation of a 200-point class exceeds the dense limit and is skipped.
    CHECK(r.members[1].name == "regular");
    CHECK(r.members[1].skipped);

    const auto c200 = c2_criterion(cycle_walk(200), family);
    REQUIRE(c200.c2);
    CHECK(*c200.c2 >= 2.0 - 1e-3);

    const auto id = c2_criterion(identity_walk(shared(uniform_relation(4))));
    CHECK(id.degenerate);
    CHECK_FALSE(id.property_T_certified);

    const auto one = c2_criterion(expander.walk, family, 1);
    for (std::size_t i = 0; i < one.members.size(); ++i)
        CHECK(one.members[i].kappa == r.members[i].kappa);
}
