#ifndef RELWALK_CLI_HPP
#define RELWALK_CLI_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "diffusion.hpp"
#include "ergodic.hpp"
#include "error.hpp"
#include "garland.hpp"
#include "io.hpp"
#include "models.hpp"
#include "parallel.hpp"
#include "spectrum.hpp"
#include "walk.hpp"

namespace relwalk {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct CommandConfig {
    std::string subcommand;
    std::vector<std::string> inputs;
    std::optional<std::string> representation;  ///< --rep
    std::optional<std::string> field;           ///< --field
    std::optional<std::string> relation;        ///< --relation
    std::optional<std::string> walk;            ///< --walk (for validating representations)
    std::optional<std::string> perms;           ///< --perms
    std::optional<std::size_t> random_points;   ///< --random
    int generators = 2;                         ///< --k, random permutations (plus inverses)
    std::optional<double> tolerance;            ///< --tol, eigenvalue-1 clustering
    std::uint64_t seed = 0;
    int n = 2;
    double eps = 0.1;
    double cap = 0.25;
    int family = 8;             ///< random gauge representations in the c2 family
    std::size_t samples = 100;
    bool details = false;
    unsigned threads = 1;
};

namespace detail {

inline SpectrumOptions spectrum_options(const CommandConfig& c)
{
    SpectrumOptions o;
    if (c.tolerance) {
        if (!(*c.tolerance > 0.0))
            throw Error(ErrorKind::InvalidArgument, "--tol must be positive", *c.tolerance);
        o.tolerance = *c.tolerance;
    }
    o.eigen.seed = c.seed;
    return o;
}

inline Json tolerances_json(const CommandConfig& c)
{
    const auto o = spectrum_options(c);
    WalkOptions w;
    Json t;
    t["eigenvalue_one"] = o.tolerance;
    t["dense_limit"] = o.eigen.dense_limit;
    t["lanczos_residual"] = o.eigen.convergence_tolerance;
    t["row_sum"] = w.row_tolerance;
    t["detailed_balance_relative"] = w.balance_tolerance;
    t["mass_sum"] = kMassSumTolerance;
    t["unitarity"] = kUnitaryTolerance;
    t["dirichlet_slack"] = kDirichletSlack;
    t["schmidt_slack"] = kSchmidtSlack;
    t["cheeger_slack"] = kCheegerSlack;
    t["domination_slack"] = kDominationSlack;
    t["criterion_margin"] = ZukOptions{}.margin;
    return t;
}

inline const std::string& first_input(const CommandConfig& c)
{
    if (c.inputs.empty())
        throw Error(ErrorKind::InvalidArgument, "subcommand " + c.subcommand + " needs an input file");
    return c.inputs.front();
}

inline RandomWalk load_walk(const std::string& path)
{
    return walk_from_json(load_json(path));
}

inline Representation load_representation(const CommandConfig& c, const RandomWalk& walk)
{
    if (!c.representation)
        return trivial_representation(walk.relation());
    return representation_from_json(load_json(*c.representation)).build(walk.relation(), walk.support_graphing());
}

inline Json validate_document(const CommandConfig& c, const std::string& path, int& status)
{
    const Json doc = load_json(path);
    const auto kind = document_kind(doc);
    Json r;
    r["document"] = std::string(to_string(kind));
    switch (kind) {
    case DocumentKind::relation: {
        const auto rel = relation_from_json(doc);
        r["relation"] = to_json(rel);
        if (doc.contains("edges")) {
            const auto report = validate_graphing(rel, graphing_from_json(doc));
            r["graphing"] = to_json(report);
            if (!report.ok()) {
                status = kExitValidation;
                r["error"] = "InvalidGraphing";
            }
        }
        break;
    }
    case DocumentKind::walk:
        r["walk"] = to_json(walk_from_json(doc));
        break;
    case DocumentKind::representation: {
        if (!c.walk)
            throw Error(ErrorKind::InvalidArgument, "validating a representation needs --walk");
        const auto walk = load_walk(*c.walk);
        const auto rep = representation_from_json(doc).build(walk.relation(), walk.support_graphing());
        r["dim"] = rep.dim();
        r["mode"] = rep.mode() == Representation::Mode::gauge ? "gauge" : "raw";
        r["cycle_residual"] = rep.cycle_residual();
        r["real"] = rep.is_real();
        break;
    }
    case DocumentKind::field: {
        const auto f = field_from_json(doc);
        r["points"] = f.points();
        r["dim"] = f.dim;
        if (!f.values.allFinite())
            throw Error(ErrorKind::InvalidArgument, "field has non-finite values");
        break;
    }
    case DocumentKind::complex: {
        const auto cx = complex_from_json(doc);
        r["vertices"] = cx.vertex_count();
        r["edges"] = cx.edges().size();
        r["triangles"] = cx.triangles().size();
        r["max_degree"] = cx.max_degree();
        r["components"] = cx.relation().class_count();
        break;
    }
    case DocumentKind::permutations: {
        const auto a = action_walk_from_json(doc);
        r["walk"] = to_json(a.walk);
        break;
    }
    }
    r["valid"] = status == kExitOk;
    return r;
}

inline ActionWalk kesten_walk(const CommandConfig& c)
{
    if (c.perms)
        return action_walk_from_json(load_json(*c.perms));
    if (c.random_points) {
        if (*c.random_points < 2 || c.generators < 1)
            throw Error(ErrorKind::InvalidArgument, "--random needs at least 2 points and --k >= 1");
        return schreier_walk(*c.random_points, c.generators, c.seed);
    }
    throw Error(ErrorKind::InvalidArgument, "kesten needs --perms FILE or --random N");
}

inline Json dispatch(const CommandConfig& c, int& status)
{
    const auto opt = spectrum_options(c);
    const auto& cmd = c.subcommand;
    if (cmd == "validate") {
        Json all = Json::array();
        for (const auto& path : c.inputs) {
            int s = kExitOk;
            Json one = validate_document(c, path, s);
            one["path"] = path;
            all.push_back(one);
            if (s != kExitOk)
                status = s;
        }
        if (c.inputs.empty())
            throw Error(ErrorKind::InvalidArgument, "validate needs at least one file");
        return all.size() == 1 ? all.front() : all;
    }
    if (cmd == "spectrum" || cmd == "gap") {
        const auto walk = load_walk(first_input(c));
        const DiffusionOperator d(walk, load_representation(c, walk));
        const auto s = spectrum(d, opt);
        Json r;
        r["walk"] = to_json(walk);
        r["dim"] = d.dim();
        r["spectrum"] = to_json(s, cmd == "spectrum");
        return r;
    }
    if (cmd == "poincare") {
        const auto walk = load_walk(first_input(c));
        const DiffusionOperator d(walk, load_representation(c, walk));
        return to_json(poincare_report(d, c.n, opt));
    }
    if (cmd == "dirichlet") {
        const auto walk = load_walk(first_input(c));
        const DiffusionOperator d(walk, load_representation(c, walk));
        return to_json(dirichlet_report(d, c.samples, c.seed, opt));
    }
    if (cmd == "energy") {
        if (!c.field)
            throw Error(ErrorKind::InvalidArgument, "energy needs --field FILE");
        const auto walk = load_walk(first_input(c));
        const auto rep = load_representation(c, walk);
        const DiffusionOperator d(walk, rep);
        const auto xi = field_from_json(load_json(*c.field));
        const double e = energy(d, xi);
        const double g = gradient_energy(walk, rep, xi);
        Json r;
        r["energy"] = e;
        r["gradient_energy"] = g;
        r["identity_residual"] = std::abs(e - g);
        r["norm2"] = d.norm2(xi.values);
        r["n"] = c.n;
        r["energy_n"] = energy_n(d, xi, c.n);
        return r;
    }
    if (cmd == "zuk") {
        const auto cx = complex_from_json(load_json(first_input(c)));
        ZukOptions z;
        z.seed = c.seed;
        z.threads = c.threads;
        return to_json(zuk_report(cx, z));
    }
    if (cmd == "folner") {
        const auto walk = load_walk(first_input(c));
        FolnerSearchOptions f;
        f.spectrum = opt;
        return to_json(folner_search(walk, c.eps, c.cap, f), c.details);
    }
    if (cmd == "kesten") {
        const auto action = kesten_walk(c);
        const auto s = spectrum(simple_diffusion(action.walk), opt);
        RepresentationFamily family;
        family.random_gauge = c.family;
        family.seed = c.seed;
        Json r;
        r["walk"] = to_json(action.walk);
        r["spectrum"] = to_json(s, c.details);
        r["c2"] = to_json(c2_criterion(action.walk, family, c.threads, opt));
        return r;
    }
    if (cmd == "concentrate") {
        if (c.inputs.empty())
            throw Error(ErrorKind::InvalidArgument, "concentrate needs at least one field file");
        std::vector<Field> fields;
        for (const auto& path : c.inputs)
            fields.push_back(field_from_json(load_json(path)));
        const FiniteRelation rel =
            c.relation ? relation_from_json(load_json(*c.relation)) : uniform_relation(fields.front().points());
        return to_json(concentration_report(fields, rel, c.eps, c.samples, c.seed, c.threads), c.details);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown subcommand \"" + cmd + "\"");
}

}  // namespace detail

/**
 * Runs one subcommand and writes a JSON report to `out`. Returns 0 on
 * success, 2 on validation failure (including malformed input), 3 on
 * numerical failure. The report does not depend on the thread count.
 */
inline int run(const CommandConfig& config, std::ostream& out, std::ostream& err)
{
    Json report;
    report["command"] = config.subcommand;
    report["format_version"] = kFormatVersion;
    report["seed"] = config.seed;
    int status = kExitOk;
    try {
        report["tolerances"] = detail::tolerances_json(config);
        report["result"] = detail::dispatch(config, status);
    } catch (const Error& e) {
        status = e.category() == ErrorCategory::validation ? kExitValidation : kExitNumerical;
        report.erase("result");
        report["failure"] = error_json(e);
        err << "relwalk: " << e.what() << '\n';
    } catch (const std::exception& e) {
        status = kExitNumerical;
        report.erase("result");
        report["failure"] = Json{{"error", "Internal"}, {"message", e.what()}};
        err << "relwalk: " << e.what() << '\n';
    }
    report["status"] = status;
    out << report.dump(2) << '\n';
    return status;
}

/// Registers subcommands and flags on `app`, filling `config`.
inline void configure_app(CLI::App& app, CommandConfig& config)
{
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.add_option("--seed", config.seed, "seed for every random choice");
    app.add_option("--tol", config.tolerance, "eigenvalue-1 clustering tolerance");
    app.add_option("--threads", config.threads, "worker threads (default from RELWALK_THREADS, else 1)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--details", config.details, "include per-sweep / per-observable data");

    auto add = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->callback([&config, name] { config.subcommand = name; });
        return sub;
    };
    auto inputs = [&](CLI::App* sub, bool required = true) {
        auto* o = sub->add_option("inputs", config.inputs, "input document(s)");
        if (required)
            o->required();
    };
    auto rep = [&](CLI::App* sub) { sub->add_option("--rep", config.representation, "representation document"); };

    auto* validate = add("validate", "check relation, graphing, walk, representation, field, or complex documents");
    inputs(validate);
    validate->add_option("--walk", config.walk, "walk used to validate a representation");

    for (const char* name : {"spectrum", "gap"}) {
        auto* sub = add(name, name == std::string("gap") ? "kappa, lambda and Poincare constants"
                                                        : "full diffusion spectrum");
        inputs(sub);
        rep(sub);
    }
    auto* poincare = add("poincare", "Poincare constant c_n");
    inputs(poincare);
    rep(poincare);
    poincare->add_option("--n", config.n, "walk power n >= 2")->check(CLI::Range(2, 1 << 20));

    auto* dirichlet = add("dirichlet", "Dirichlet inequality on random fields");
    inputs(dirichlet);
    rep(dirichlet);
    dirichlet->add_option("--samples", config.samples, "random fields");

    auto* en = add("energy", "energy of a field and the local-energy identity");
    inputs(en);
    rep(en);
    en->add_option("--field", config.field, "field document")->required();
    en->add_option("--n", config.n, "power for E_n")->check(CLI::NonNegativeNumber);

    auto* zuk = add("zuk", "link spectra and the local-to-global criterion on a 2-complex");
    inputs(zuk);

    auto* folner = add("folner", "Folner set search via eigenvector sweeps");
    inputs(folner);
    folner->add_option("--eps", config.eps, "target boundary ratio")->check(CLI::PositiveNumber);
    folner->add_option("--cap", config.cap, "mass cap for admissible sets")->check(CLI::PositiveNumber);

    auto* kesten = add("kesten", "gap and c2 criterion for a permutation action");
    kesten->add_option("--perms", config.perms, "permutation document");
    kesten->add_option("--random", config.random_points, "seeded random Schreier action on N points");
    kesten->add_option("--k", config.generators, "random permutations (each with its inverse)")
        ->check(CLI::PositiveNumber);
    kesten->add_option("--family", config.family, "random gauge representations in the c2 family")
        ->check(CLI::NonNegativeNumber);

    auto* conc = add("concentrate", "concentration of fields along 1-Lipschitz observables");
    inputs(conc);
    conc->add_option("--relation", config.relation, "relation document (default: uniform)");
    conc->add_option("--eps", config.eps, "concentration radius")->check(CLI::PositiveNumber);
    conc->add_option("--samples", config.samples, "random directions and centers");
}

/// Parses argv and runs; CLI usage errors exit with 2.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CommandConfig config;
    config.threads = default_thread_count();
    CLI::App app{"relwalk: random walks, diffusion spectra and isoperimetry on finite measured relations"};
    app.name("relwalk");
    configure_app(app, config);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "relwalk: " << e.what() << '\n';
        return kExitValidation;
    }
    return run(config, out, err);
}

}  // namespace relwalk

#endif
