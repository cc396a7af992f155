// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "relwalk/cli.hpp"
#include "relwalk/relwalk.hpp"

#ifndef RELWALK_DATA_DIR
#error "RELWALK_DATA_DIR must point at the sample documents"
#endif

using namespace relwalk;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Outcome cycle_spectra()
{
    double worst = 0.0, worst_oracle = 0.0;
    for (std::size_t n = 3; n <= 64; ++n) {
        const auto walk = cycle_walk(n);
        const auto s = spectrum(simple_diffusion(walk));
        if (!s.kappa)
            return {false, "no kappa for n = " + std::to_string(n)};
        worst = std::max(worst, std::abs(*s.kappa - oracle::cycle_kappa(n)));
        const double jacobi = oracle::kappa(oracle::jacobi_eigenvalues(oracle::symmetrized_kernel(walk)));
        worst_oracle = std::max(worst_oracle, std::abs(*s.kappa - jacobi));
    }
    return {worst <= 1e-9 && worst_oracle <= 1e-9,
            fmt("max |kappa - cos(2pi/n)| = %.3g, max |kappa - jacobi| = %.3g over n = 3..64", worst, worst_oracle)};
}

std::vector<RandomWalk> criterion_two_walks()
{
    std::vector<RandomWalk> walks;
    Rng rng(20261018);
    while (walks.size() < 50)
        walks.push_back(gen::reversible_walk(rng, 40));
    return walks;
}

Outcome poincare_optimality(const std::vector<RandomWalk>& walks)
{
    double worst_c2 = 0.0, worst_violation = -1.0;
    Rng rng(2);
    for (const auto& w : walks) {
        const auto d = simple_diffusion(w);
        const auto p = poincare_report(d, 2);
        const double k = oracle::kappa(oracle::jacobi_eigenvalues(oracle::symmetrized_kernel(w)));
        worst_c2 = std::max(worst_c2, std::abs(p.c_n_measured - (1.0 + k)));
        for (int i = 0; i < 100; ++i) {
            const auto xi = gen::unit_field(w.size(), 1, d, rng);
            worst_violation = std::max(worst_violation, energy_n(d, xi, 2) - p.c_n_measured * energy(d, xi));
        }
    }
    return {worst_c2 <= 1e-8 && worst_violation <= 1e-10,
            fmt("max |c2 - (1 + kappa_oracle)| = %.3g, max E2 - c2 E = %.3g (50 walks x 100 fields)", worst_c2,
                worst_violation)};
}

Outcome energy_identity()
{
    Rng rng(3);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto w = gen::reversible_walk(rng, 30);
        const int dim = 1 + trial % 4;
        Representation rep = random_gauge_representation(w.relation(), dim, rng);
        if (trial % 3 == 0)
            rep = raw_representation(w.relation(), w.support_graphing(),
                                     edge_blocks_from_gauge(rep, w.support_graphing()));
        const DiffusionOperator d(w, rep);
        const auto xi = Field::random(w.size(), dim, rng);
        const double gap = std::abs(energy(d, xi) - gradient_energy(w, rep, xi)) / d.norm2(xi.values);
        worst = std::max(worst, gap);
    }
    return {worst <= 1e-12, fmt("max |<(I-D)xi,xi> - 1/2||d xi||^2| / ||xi||^2 = %.3g over 200 triples", worst)};
}

Outcome dirichlet(const std::vector<RandomWalk>& walks)
{
    double worst = -1.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < walks.size(); ++i) {
        const auto d = simple_diffusion(walks[i]);
        const auto s = spectrum(d);
        if (!s.kappa || *s.kappa >= 1.0 - s.tolerance)
            continue;
        const auto r = dirichlet_report(d, 100, 40 + i);
        worst = std::max(worst, r.max_violation);
        ++used;
    }
    return {used > 0 && worst <= kDirichletSlack,
            fmt("max ||xi - xi_bar||^2 - E/lambda = %.3g on %g walks", worst, static_cast<double>(used))};
}

Outcome zuk_verdicts()
{
    const auto uniform = zuk_report(build_complex(std::vector<double>(4, 0.25), tetrahedron_triangles()));
    const auto torus = zuk_report(build_complex(std::vector<double>(16, 1.0 / 16), torus_triangles(4, 4)));
    const auto weighted = zuk_report(build_complex(std::vector<double>{0.1, 0.2, 0.3, 0.4}, tetrahedron_triangles()));
    const bool a = uniform.min_lambda1 && std::abs(*uniform.min_lambda1 - 1.5) <= 1e-9 &&
                   uniform.verdict == ZukVerdict::certified;
    const bool b = torus.min_lambda1 && std::abs(*torus.min_lambda1 - 0.5) <= 1e-9 &&
                   torus.verdict == ZukVerdict::refuted_strict;
    const bool c = std::abs(weighted.delta_mu - 4.0) <= 1e-12 && std::abs(weighted.threshold - 32.0) <= 1e-9 &&
                   weighted.verdict != ZukVerdict::certified;
    return {a && b && c, "tetrahedron min lambda1 " + std::to_string(uniform.min_lambda1.value_or(-1)) + " " +
                             std::string(to_string(uniform.verdict)) + "; torus " +
                             std::to_string(torus.min_lambda1.value_or(-1)) + " " +
                             std::string(to_string(torus.verdict)) + "; weighted delta_mu " +
                             std::to_string(weighted.delta_mu) + " " + std::string(to_string(weighted.verdict))};
}

Outcome step_two_domination()
{
    Rng rng(6);
    double worst = -1.0, worst_uniform = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto c = gen::random_complex(rng, 1.5);
        const auto r = step2_domination(c);
        worst = std::max(worst, r.residual);

        std::vector<double> flat(c.vertex_count(), 1.0);
        const auto u = build_complex(flat, c.triangles());
        const auto walks = triangle_walks(u);
        for (std::size_t y = 0; y < u.vertex_count(); ++y)
            for (std::size_t z = 0; z < u.vertex_count(); ++z)
                worst_uniform = std::max(worst_uniform,
                                         std::abs(oracle::two_step(walks.nu, static_cast<int>(y), static_cast<int>(z)) -
                                                  walks.nu_lower.probability(static_cast<int>(y), static_cast<int>(z))));
    }
    return {worst <= 1e-12 && worst_uniform <= 1e-12,
            fmt("max nu^2/nu_lower - delta^3 = %.3g; uniform max |nu^2 - nu_lower| = %.3g (100 complexes)", worst,
                worst_uniform)};
}

Outcome kesten_contrast()
{
    const auto cyc = spectrum(simple_diffusion(cycle_walk(200)));
    const auto expander = schreier_walk(200, 2, 7);
    const auto s = spectrum(simple_diffusion(expander.walk));
    const double oracle_lambda = 1.0 - oracle::kappa(oracle::jacobi_eigenvalues(oracle::symmetrized_kernel(expander.walk)));
    const bool ok = cyc.lambda && *cyc.lambda <= 1e-3 && s.lambda && *s.lambda >= 0.05 &&
                    std::abs(*s.lambda - oracle_lambda) <= 1e-9;
    return {ok, fmt("C200 lambda = %.6g; Schreier(200, 4-regular) lambda = %.6g (jacobi %.6g)", cyc.lambda.value_or(-1),
                    s.lambda.value_or(-1), oracle_lambda)};
}

Outcome folner_extraction()
{
    const auto c100 = cycle_walk(100);
    const auto found = folner_search(c100, 0.1, 0.25);
    const double best = oracle::best_cycle_arc_ratio(100, 0.25);
    const bool a = found.found && found.ratio <= 2.0 * best && found.mass <= 0.25;

    const auto expander = schreier_walk(200, 2, 7);
    const auto s = spectrum(simple_diffusion(expander.walk));
    const double lambda = s.lambda.value_or(0.0);
    bool b = true;
    double least = std::numeric_limits<double>::infinity();
    try {
        const auto r = folner_search(expander.walk, lambda / 2.0 - 1e-3, 0.3);
        b = !r.found;
        for (const auto& set : r.swept)
            if (set.mass <= 0.3 && set.energy_ratio) {
                least = std::min(least, *set.energy_ratio);
                b = b && *set.energy_ratio >= lambda - 1e-10;
            }
    } catch (const Error& e) {
        return {false, std::string("expander sweep failed: ") + e.what()};
    }
    return {a && b, fmt("C100 ratio %.4g vs best arc %.4g; expander min swept E/||.||^2 = %.4g", found.ratio, best, least) +
                        fmt(" (lambda %.4g)", lambda)};
}

Outcome gauge_invariance()
{
    Rng walk_rng(9);
    const auto w = gen::reversible_walk(walk_rng, 25);
    const auto base = spectrum(simple_diffusion(w)).eigenvalues;
    Rng rng(90);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int dim = 1 + i % 3;
        const auto s = spectrum(DiffusionOperator(w, random_gauge_representation(w.relation(), dim, rng))).eigenvalues;
        std::vector<double> expected;
        for (double t : base)
            for (int k = 0; k < dim; ++k)
                expected.push_back(t);
        std::sort(expected.begin(), expected.end());
        if (expected.size() != s.size())
            return {false, "spectrum size mismatch"};
        for (std::size_t k = 0; k < s.size(); ++k)
            worst = std::max(worst, std::abs(s[k] - expected[k]));
    }
    return {worst <= 1e-9, fmt("max elementwise deviation from trivial spectrum x I_d = %.3g (20 gauges)", worst)};
}

Outcome schmidt_bound()
{
    Rng rng(10);
    double worst_bound = -1.0, worst_norm = 0.0;
    int pairs = 0;
    while (pairs < 100) {
        const auto w = gen::reversible_walk(rng, 30);
        std::bernoulli_distribution pick(0.2);
        std::vector<int> a;
        for (std::size_t x = 0; x < w.size(); ++x)
            if (pick(rng))
                a.push_back(static_cast<int>(x));
        if (a.empty())
            continue;
        AlmostFixedReport r;
        try {
            r = almost_fixed_from_set(w, a);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::DegenerateSet)
                continue;
            return {false, e.what()};
        }
        // Recompute <Df, f> and ||f||^2 from the kernel rows.
        double form = 0.0, norm = 0.0;
        for (std::size_t x = 0; x < w.size(); ++x) {
            const double fx = r.field.values(static_cast<Eigen::Index>(x)).real();
            double df = 0.0;
            for (const auto& t : w.row(static_cast<int>(x)))
                df += t.p * r.field.values(t.to).real();
            form += w.base(static_cast<int>(x)) * df * fx;
            norm += w.base(static_cast<int>(x)) * fx * fx;
        }
        worst_bound = std::max(worst_bound, r.lower_bound - form);
        worst_norm = std::max(worst_norm, std::abs(norm - (r.closure_mass - r.closure_mass * r.closure_mass)));
        ++pairs;
    }
    return {worst_bound <= 1e-12 && worst_norm <= 1e-12,
            fmt("max (mu(A) - mu(Abar)^2) - <Df,f> = %.3g, max | ||f||^2 - (mu(Abar) - mu(Abar)^2) | = %.3g", worst_bound,
                worst_norm)};
}

Outcome concentration_witness()
{
    const std::size_t n = 40;
    const auto rel = uniform_relation(n);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t x = 0; x < n; ++x)
        v(static_cast<Eigen::Index>(x)) = (x < n / 2 ? 1.0 : 0.0) - 0.5;
    const auto r = concentration_report({Field::scalar(v)}, rel, 0.1, 16, 0);
    const auto& along_e = r.fields.front().observables.front();
    return {along_e.mass == 0.0 && r.minimum == 0.0,
            fmt("mass along e = %.3g, minimum = %.3g, first moment = %.3g", along_e.mass, r.minimum,
                r.fields.front().first_moment)};
}

std::string data(const char* name)
{
    return std::string(RELWALK_DATA_DIR) + "/" + name;
}

std::vector<CommandConfig> cli_suite(unsigned threads)
{
    std::vector<CommandConfig> suite;
    auto add = [&](std::string cmd, std::vector<std::string> inputs, auto&& tweak) {
        CommandConfig c;
        c.subcommand = std::move(cmd);
        c.inputs = std::move(inputs);
        c.seed = 17;
        c.threads = threads;
        tweak(c);
        suite.push_back(c);
    };
    auto none = [](CommandConfig&) {};
    add("validate", {data("two_class_relation.json"), data("c6_walk.json"), data("tetrahedron.json")}, none);
    add("validate", {data("asymmetric_walk.json")}, none);
    add("spectrum", {data("c6_walk.json")}, [&](CommandConfig& c) { c.representation = data("c6_gauge_rep.json"); });
    add("gap", {data("c6_graphing_walk.json")}, [&](CommandConfig& c) { c.representation = data("c6_raw_rep.json"); });
    add("poincare", {data("c6_walk.json")}, [](CommandConfig& c) { c.n = 3; });
    add("dirichlet", {data("c6_walk.json")}, none);
    add("energy", {data("c6_walk.json")}, [&](CommandConfig& c) { c.field = data("c6_field.json"); });
    add("zuk", {data("torus_4x4.json")}, none);
    add("zuk", {data("tetrahedron_weighted.json")}, none);
    add("folner", {data("c6_walk.json")}, [](CommandConfig& c) { c.details = true; c.cap = 0.5; });
    add("kesten", {}, [](CommandConfig& c) {
        c.random_points = 120;
        c.family = 4;
    });
    add("kesten", {}, [&](CommandConfig& c) { c.perms = data("c12_perms.json"); });
    add("concentrate", {data("c6_field.json"), data("half_field.json")}, [](CommandConfig& c) { c.details = true; });
    return suite;
}

std::string run_suite(unsigned threads)
{
    std::ostringstream all, err;
    for (const auto& c : cli_suite(threads)) {
        const int status = run(c, all, err);
        all << "exit " << status << '\n';
    }
    return all.str();
}

Outcome determinism()
{
    const auto one = run_suite(1);
    const auto four = run_suite(4);
    const auto again = run_suite(4);
    return {one == four && four == again,
            "CLI suite of " + std::to_string(cli_suite(1).size()) + " commands, " + std::to_string(one.size()) +
                " bytes; threads 1 vs 4 " + (one == four ? "identical" : "DIFFER") + ", rerun " +
                (four == again ? "identical" : "DIFFER")};
}

}  // namespace

int main()
{
    const auto walks = criterion_two_walks();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"cycle spectra", cycle_spectra},
        {"Poincare optimality at n = 2", [&] { return poincare_optimality(walks); }},
        {"energy identity", energy_identity},
        {"Dirichlet inequality", [&] { return dirichlet(walks); }},
        {"local-to-global verdicts", zuk_verdicts},
        {"step-2 domination", step_two_domination},
        {"Kesten contrast", kesten_contrast},
        {"Folner extraction", folner_extraction},
        {"gauge invariance", gauge_invariance},
        {"Schmidt bound", schmidt_bound},
        {"concentration witness", concentration_witness},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass)
            ++failures;
        std::printf("criterion %2zu %-30s %s  [%.2fs] %s\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                    secs, o.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
