#ifndef RELWALK_IO_HPP
#define RELWALK_IO_HPP

// JSON documents in, JSON reports out. Schemas are described in docs/formats.md.

#include <charconv>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "diffusion.hpp"
#include "ergodic.hpp"
#include "error.hpp"
#include "garland.hpp"
#include "relation.hpp"
#include "representation.hpp"
#include "spectrum.hpp"
#include "walk.hpp"

namespace relwalk {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

namespace detail {

[[noreturn]] inline void parse_fail(const Json::json_pointer& at, const std::string& what)
{
    const std::string where = at.empty() ? std::string("/") : at.to_string();
    throw Error(ErrorKind::ParseError, where + ": " + what);
}

inline const Json& member(const Json& obj, const Json::json_pointer& at, const char* key)
{
    if (!obj.is_object())
        parse_fail(at, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        parse_fail(at, std::string("missing field \"") + key + "\"");
    return *it;
}

inline const Json& array_at(const Json& j, const Json::json_pointer& at)
{
    if (!j.is_array())
        parse_fail(at, "expected an array");
    return j;
}

inline double number_at(const Json& j, const Json::json_pointer& at)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        double v = 0.0;
        auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || end != s.data() + s.size())
            parse_fail(at, "\"" + s + "\" is not a decimal number");
        return v;
    }
    parse_fail(at, "expected a number");
}

inline int index_at(const Json& j, const Json::json_pointer& at)
{
    if (!j.is_number_integer())
        parse_fail(at, "expected an integer point index");
    const auto v = j.get<long long>();
    if (v < 0 || v > std::numeric_limits<int>::max())
        parse_fail(at, "point index out of range");
    return static_cast<int>(v);
}

inline Complex complex_at(const Json& j, const Json::json_pointer& at)
{
    if (j.is_array()) {
        if (j.size() != 2)
            parse_fail(at, "complex number must be [re, im]");
        return {number_at(j[0], at / 0), number_at(j[1], at / 1)};
    }
    return {number_at(j, at), 0.0};
}

inline std::vector<double> numbers_at(const Json& j, const Json::json_pointer& at)
{
    array_at(j, at);
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(number_at(j[i], at / i));
    return out;
}

/// A d x d matrix given as d rows of d entries, each [re, im] or a real number.
inline Eigen::MatrixXcd matrix_at(const Json& j, const Json::json_pointer& at, int dim)
{
    array_at(j, at);
    if (j.size() != static_cast<std::size_t>(dim))
        parse_fail(at, "matrix has " + std::to_string(j.size()) + " rows, expected " + std::to_string(dim));
    Eigen::MatrixXcd m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        const auto row_at = at / static_cast<std::size_t>(r);
        const Json& row = array_at(j[static_cast<std::size_t>(r)], row_at);
        if (row.size() != static_cast<std::size_t>(dim))
            parse_fail(row_at, "row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(dim));
        for (int c = 0; c < dim; ++c)
            m(r, c) = complex_at(row[static_cast<std::size_t>(c)], row_at / static_cast<std::size_t>(c));
    }
    return m;
}

inline std::string label_of(const Json& j)
{
    return j.is_string() ? j.get<std::string>() : j.dump();
}

}  // namespace detail

/// Parses JSON text; syntax errors become ParseError with line and column.
inline Json parse_json(std::string_view text, std::string_view source = "<input>")
{
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, column = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw Error(ErrorKind::ParseError, std::string(source) + ":" + std::to_string(line) + ":" +
                                               std::to_string(column) + ": malformed JSON (" + e.what() + ")",
                    static_cast<double>(e.byte));
    }
}

inline std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::ParseError, path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Json load_json(const std::string& path)
{
    return parse_json(read_text(path), path);
}

// ---------------------------------------------------------------------------
// Documents

/// {"masses": [...], "classes": [...]}; classes may be omitted for a single class.
inline FiniteRelation relation_from_json(const Json& j, const Json::json_pointer& at = Json::json_pointer())
{
    const auto masses = detail::numbers_at(detail::member(j, at, "masses"), at / "masses");
    if (!j.contains("classes"))
        return single_class_relation(masses);
    const auto& classes = detail::array_at(j["classes"], at / "classes");
    if (classes.size() != masses.size())
        detail::parse_fail(at / "classes", "has " + std::to_string(classes.size()) + " labels for " +
                                               std::to_string(masses.size()) + " masses");
    std::vector<std::string> labels;
    labels.reserve(classes.size());
    for (const auto& c : classes)
        labels.push_back(detail::label_of(c));
    return build_relation(masses, labels);
}

inline std::vector<Edge> edges_from_json(const Json& j, const Json::json_pointer& at)
{
    detail::array_at(j, at);
    std::vector<Edge> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto e_at = at / i;
        const Json& e = detail::array_at(j[i], e_at);
        if (e.size() != 2)
            detail::parse_fail(e_at, "edge must be [x, y]");
        out.emplace_back(detail::index_at(e[0], e_at / 0), detail::index_at(e[1], e_at / 1));
    }
    return out;
}

/// {"edges": [[x, y], ...], "degree_bound": k?}
inline Graphing graphing_from_json(const Json& j, const Json::json_pointer& at = Json::json_pointer())
{
    Graphing g;
    g.edges = edges_from_json(detail::member(j, at, "edges"), at / "edges");
    if (j.contains("degree_bound")) {
        const int k = detail::index_at(j["degree_bound"], at / "degree_bound");
        g.degree_bound = static_cast<std::size_t>(k);
    }
    return g;
}

namespace detail {

/// Relation embedded in a walk document: "relation" object, top-level masses, or uniform single class on n points.
inline std::shared_ptr<const FiniteRelation> embedded_relation(const Json& j, const Json::json_pointer& at,
                                                               std::size_t inferred_n)
{
    if (j.contains("relation"))
        return std::make_shared<const FiniteRelation>(relation_from_json(j["relation"], at / "relation"));
    if (j.contains("masses"))
        return std::make_shared<const FiniteRelation>(relation_from_json(j, at));
    std::size_t n = inferred_n;
    if (j.contains("n"))
        n = static_cast<std::size_t>(index_at(j["n"], at / "n"));
    if (n == 0)
        parse_fail(at, "cannot infer the number of points");
    return std::make_shared<const FiniteRelation>(uniform_relation(n));
}

}  // namespace detail

/**
 * Walk document, one of
 *   {"relation"?, "entries": [[x, y, p], ...], "base": "mu" | "tilde"}
 *   {"relation"?, "graphing": {"edges": ...}}   (regular walk, base tilde)
 * Without a relation the points are uniform and form one class.
 */
inline RandomWalk walk_from_json(const Json& j, const Json::json_pointer& at = Json::json_pointer())
{
    if (!j.is_object())
        detail::parse_fail(at, "expected an object");
    if (j.contains("graphing")) {
        const auto g = graphing_from_json(j["graphing"], at / "graphing");
        int top = -1;
        for (auto [x, y] : g.edges)
            top = std::max({top, x, y});
        auto rel = detail::embedded_relation(j, at, static_cast<std::size_t>(top + 1));
        return regular_walk(std::move(rel), g);
    }
    const auto& entries = detail::array_at(detail::member(j, at, "entries"), at / "entries");
    std::vector<KernelEntry> kernel;
    int top = -1;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto e_at = at / "entries" / i;
        const Json& e = detail::array_at(entries[i], e_at);
        if (e.size() != 3)
            detail::parse_fail(e_at, "entry must be [x, y, p]");
        KernelEntry k{detail::index_at(e[0], e_at / 0), detail::index_at(e[1], e_at / 1), detail::number_at(e[2], e_at / 2)};
        top = std::max({top, k.x, k.y});
        kernel.push_back(k);
    }
    BaseKind kind = BaseKind::mu;
    if (j.contains("base")) {
        const auto& b = j["base"];
        if (b == "mu")
            kind = BaseKind::mu;
        else if (b == "tilde")
            kind = BaseKind::tilde;
        else
            detail::parse_fail(at / "base", "base must be \"mu\" or \"tilde\"");
    }
    auto rel = detail::embedded_relation(j, at, static_cast<std::size_t>(top + 1));
    return custom_walk(std::move(rel), kernel, kind);
}

/// Parsed representation blocks; turned into a Representation once the relation and graphing are known.
struct RepresentationDocument {
    int dim = 1;
    Representation::Mode mode = Representation::Mode::gauge;
    std::map<int, Eigen::MatrixXcd> point_blocks;
    std::map<Edge, Eigen::MatrixXcd> edge_blocks;
    double tolerance = 1e-9;

    /// Gauge mode: points without a block get U_x = I. Raw mode: blocks must cover the graphing.
    Representation build(const FiniteRelation& rel, const Graphing& graphing) const
    {
        if (mode == Representation::Mode::gauge) {
            std::vector<Eigen::MatrixXcd> u(rel.size(), Eigen::MatrixXcd::Identity(dim, dim));
            for (const auto& [x, m] : point_blocks) {
                if (!rel.contains(x))
                    throw Error(ErrorKind::InvalidPoint, "gauge block for missing point " + std::to_string(x));
                u[static_cast<std::size_t>(x)] = m;
            }
            return gauge_representation(rel, dim, std::move(u));
        }
        return raw_representation(rel, graphing, edge_blocks, tolerance);
    }
};

/// {"dim": d, "mode": "gauge" | "raw", "blocks": [[x or [x, y], matrix], ...], "tol"?}
inline RepresentationDocument representation_from_json(const Json& j, const Json::json_pointer& at = Json::json_pointer())
{
    RepresentationDocument doc;
    doc.dim = detail::index_at(detail::member(j, at, "dim"), at / "dim");
    if (doc.dim < 1)
        detail::parse_fail(at / "dim", "dimension must be positive");
    if (j.contains("mode")) {
        if (j["mode"] == "gauge")
            doc.mode = Representation::Mode::gauge;
        else if (j["mode"] == "raw")
            doc.mode = Representation::Mode::raw;
        else
            detail::parse_fail(at / "mode", "mode must be \"gauge\" or \"raw\"");
    }
    if (j.contains("tol"))
        doc.tolerance = detail::number_at(j["tol"], at / "tol");
    const auto& blocks = detail::array_at(detail::member(j, at, "blocks"), at / "blocks");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto b_at = at / "blocks" / i;
        const Json& b = detail::array_at(blocks[i], b_at);
        if (b.size() != 2)
            detail::parse_fail(b_at, "block must be [point-or-edge, matrix]");
        const auto m = detail::matrix_at(b[1], b_at / 1, doc.dim);
        if (doc.mode == Representation::Mode::gauge) {
            doc.point_blocks[detail::index_at(b[0], b_at / 0)] = m;
        } else {
            const Json& e = detail::array_at(b[0], b_at / 0);
            if (e.size() != 2)
                detail::parse_fail(b_at / 0, "raw block needs an edge [x, y]");
            doc.edge_blocks[{detail::index_at(e[0], b_at / 0 / 0), detail::index_at(e[1], b_at / 0 / 1)}] = m;
        }
    }
    return doc;
}

/// {"dim": d, "values": [[v_1, ..., v_d] per point]}, each v real or [re, im].
inline Field field_from_json(const Json& j, const Json::json_pointer& at = Json::json_pointer())
{
    const int dim = detail::index_at(detail::member(j, at, "dim"), at / "dim");
    if (dim < 1)
        detail::parse_fail(at / "dim", "dimension must be positive");
    const auto& values = detail::array_at(detail::member(j, at, "values"), at / "values");
    Field f = Field::zeros(values.size(), dim);
    for (std::size_t x = 0; x < values.size(); ++x) {
        const auto v_at = at / "values" / x;
        const Json& v = detail::array_at(values[x], v_at);
        if (v.size() != static_cast<std::size_t>(dim))
            detail::parse_fail(v_at, "point value has " + std::to_string(v.size()) + " components, expected " +
                                         std::to_string(dim));
        for (int i = 0; i < dim; ++i)
            f.values(static_cast<Eigen::Index>(x) * dim + i) = detail::complex_at(v[static_cast<std::size_t>(i)], v_at / static_cast<std::size_t>(i));
    }
    return f;
}

/// {"masses": [...], "triangles": [[i, j, k], ...], "degree_bound"?}
inline Complex2 complex_from_json(const Json& j, const Json::json_pointer& at = Json::json_pointer())
{
    const auto masses = detail::numbers_at(detail::member(j, at, "masses"), at / "masses");
    const auto& tris = detail::array_at(detail::member(j, at, "triangles"), at / "triangles");
    std::vector<Triangle> triangles;
    for (std::size_t i = 0; i < tris.size(); ++i) {
        const auto t_at = at / "triangles" / i;
        const Json& t = detail::array_at(tris[i], t_at);
        if (t.size() != 3)
            detail::parse_fail(t_at, "triangle must have three vertices");
        triangles.push_back({detail::index_at(t[0], t_at / 0), detail::index_at(t[1], t_at / 1),
                             detail::index_at(t[2], t_at / 2)});
    }
    std::optional<std::size_t> bound;
    if (j.contains("degree_bound"))
        bound = static_cast<std::size_t>(detail::index_at(j["degree_bound"], at / "degree_bound"));
    return build_complex(masses, std::move(triangles), bound);
}

/// {"n": n, "generators": [[s(0), ..., s(n-1)], ...], "probs"?: [...]}; probs default to uniform.
inline ActionWalk action_walk_from_json(const Json& j, const Json::json_pointer& at = Json::json_pointer())
{
    const int n = detail::index_at(detail::member(j, at, "n"), at / "n");
    const auto& gens = detail::array_at(detail::member(j, at, "generators"), at / "generators");
    std::vector<Permutation> generators;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const auto g_at = at / "generators" / i;
        const Json& g = detail::array_at(gens[i], g_at);
        Permutation s;
        for (std::size_t k = 0; k < g.size(); ++k)
            s.push_back(detail::index_at(g[k], g_at / k));
        generators.push_back(std::move(s));
    }
    std::vector<double> probs;
    if (j.contains("probs"))
        probs = detail::numbers_at(j["probs"], at / "probs");
    else
        probs.assign(generators.size(), generators.empty() ? 0.0 : 1.0 / static_cast<double>(generators.size()));
    return cayley_action_walk(static_cast<std::size_t>(n), generators, probs);
}

enum class DocumentKind { relation, walk, representation, field, complex, permutations };

inline std::string_view to_string(DocumentKind k)
{
    switch (k) {
    case DocumentKind::relation: return "relation";
    case DocumentKind::walk: return "walk";
    case DocumentKind::representation: return "representation";
    case DocumentKind::field: return "field";
    case DocumentKind::complex: return "complex";
    case DocumentKind::permutations: return "permutations";
    }
    return "unknown";
}

/// Infers the document kind from its fields.
inline DocumentKind document_kind(const Json& j)
{
    if (!j.is_object())
        detail::parse_fail(Json::json_pointer(), "document must be a JSON object");
    if (j.contains("triangles"))
        return DocumentKind::complex;
    if (j.contains("generators"))
        return DocumentKind::permutations;
    if (j.contains("entries") || j.contains("graphing"))
        return DocumentKind::walk;
    if (j.contains("blocks"))
        return DocumentKind::representation;
    if (j.contains("values"))
        return DocumentKind::field;
    if (j.contains("masses"))
        return DocumentKind::relation;
    detail::parse_fail(Json::json_pointer(), "cannot tell the document kind from its fields");
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const std::vector<int>& v)
{
    Json a = Json::array();
    for (int x : v)
        a.push_back(x);
    return a;
}

inline Json to_json(const std::vector<double>& v)
{
    Json a = Json::array();
    for (double x : v)
        a.push_back(x);
    return a;
}

template <typename T>
Json optional_json(const std::optional<T>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

inline Json error_json(const Error& e)
{
    Json j;
    j["error"] = std::string(to_string(e.kind()));
    j["category"] = e.category() == ErrorCategory::validation ? "validation" : "numerical";
    j["message"] = e.what();
    if (!std::isnan(e.value()))
        j["value"] = e.value();
    return j;
}

/// Relation document readable by relation_from_json; numbers round-trip bit-exactly.
inline Json to_document(const FiniteRelation& rel)
{
    Json j;
    j["masses"] = to_json(rel.masses());
    j["classes"] = to_json(rel.class_ids());
    return j;
}

/// Walk document readable by walk_from_json (base mu or tilde).
inline Json to_document(const RandomWalk& w)
{
    if (w.base_kind() == BaseKind::triangle)
        throw Error(ErrorKind::InvalidArgument, "walks with a triangle base measure have no document form");
    Json j;
    j["relation"] = to_document(w.relation());
    Json entries = Json::array();
    for (std::size_t x = 0; x < w.size(); ++x)
        for (const auto& t : w.row(static_cast<int>(x)))
            entries.push_back(Json::array({static_cast<int>(x), t.to, t.p}));
    j["entries"] = entries;
    j["base"] = std::string(to_string(w.base_kind()));
    return j;
}

inline Json to_json(const FiniteRelation& rel)
{
    Json j;
    j["points"] = rel.size();
    j["classes"] = rel.class_count();
    Json sizes = Json::array();
    for (const auto& c : rel.classes())
        sizes.push_back(c.size());
    j["class_sizes"] = sizes;
    return j;
}

inline Json to_json(const GraphingReport& r)
{
    Json j;
    j["ok"] = r.ok();
    j["max_degree"] = r.max_degree;
    j["degree_bound"] = optional_json(r.degree_bound);
    Json conn = Json::array();
    for (bool b : r.class_connected)
        conn.push_back(b);
    j["class_connected"] = conn;
    Json v = Json::array();
    for (const auto& x : r.violations)
        v.push_back(Json{{"kind", std::string(to_string(x.kind))}, {"x", x.x}, {"y", x.y}});
    j["violations"] = v;
    return j;
}

inline Json to_json(const RandomWalk& w)
{
    Json j;
    j["points"] = w.size();
    j["transitions"] = w.nonzeros();
    j["base"] = std::string(to_string(w.base_kind()));
    j["base_normalization"] = w.base_normalization();
    j["eta"] = w.eta();
    j["detailed_balance_residual"] = detailed_balance_violation(w);
    j["classes"] = w.relation().class_count();
    return j;
}

inline Json to_json(const SpectrumReport& s, bool with_eigenvalues = true)
{
    Json j;
    j["dimension"] = s.dimension;
    j["method"] = s.method;
    j["partial"] = s.partial;
    j["fixed_dim"] = s.fixed_dim;
    j["kappa"] = optional_json(s.kappa);
    j["lambda"] = optional_json(s.lambda);
    j["c_inf"] = optional_json(s.c_inf);
    j["degenerate"] = s.degenerate;
    Json cn = Json::array();
    for (auto [n, c] : s.c_n)
        cn.push_back(Json{{"n", n}, {"c_n", c}});
    j["c_n"] = cn;
    j["spectral_radius"] = s.spectral_radius;
    j["self_adjoint_residual"] = s.self_adjoint_residual;
    j["rank_deficiency"] = optional_json(s.rank_deficiency);
    if (with_eigenvalues)
        j["eigenvalues"] = to_json(s.eigenvalues);
    j["warnings"] = s.warnings;
    return j;
}

inline Json to_json(const PoincareReport& p)
{
    return Json{{"n", p.n},
                {"c_n_measured", p.c_n_measured},
                {"c_n_formula", p.c_n_formula},
                {"satisfied", p.satisfied},
                {"partial", p.partial}};
}

inline Json to_json(const DirichletReport& d)
{
    return Json{{"c_inf", d.c_inf}, {"max_violation", d.max_violation}, {"samples", d.samples}, {"satisfied", d.satisfied}};
}

inline Json to_json(const C2Report& r)
{
    Json j;
    j["c2"] = optional_json(r.c2);
    j["property_T_certified"] = r.property_T_certified;
    j["finite_model_evidence"] = r.finite_model_evidence;
    j["degenerate"] = r.degenerate;
    Json m = Json::array();
    for (const auto& x : r.members)
        m.push_back(Json{{"name", x.name},
                         {"dim", x.dim},
                         {"skipped", x.skipped},
                         {"kappa", optional_json(x.kappa)},
                         {"c2", optional_json(x.c2)}});
    j["members"] = m;
    return j;
}

inline Json to_json(const DominationReport& d)
{
    return Json{{"max_ratio", d.max_ratio}, {"bound", d.bound}, {"residual", d.residual}};
}

inline Json to_json(const ZukReport& r)
{
    Json j;
    j["verdict"] = std::string(to_string(r.verdict));
    j["statement"] = r.statement;
    j["min_lambda1"] = optional_json(r.min_lambda1);
    j["delta_mu"] = r.delta_mu;
    j["threshold"] = r.threshold;
    j["margin"] = r.margin;
    j["connectivity_failures"] = to_json(r.connectivity_failures);
    j["kappa"] = optional_json(r.kappa);
    j["c2_bound"] = optional_json(r.c2_bound);
    j["domination"] = r.domination ? to_json(*r.domination) : Json(nullptr);
    j["poincare_worst_slack"] = optional_json(r.poincare_worst_slack);
    j["poincare_fields"] = r.poincare_fields;
    j["seed"] = r.seed;
    Json links = Json::array();
    for (const auto& l : r.links)
        links.push_back(Json{{"vertex", l.vertex},
                             {"status", std::string(to_string(l.status))},
                             {"lambda1", optional_json(l.lambda1)},
                             {"link_vertices", l.link_vertices},
                             {"link_edges", l.link_edges}});
    j["links"] = links;
    return j;
}

inline Json to_json(const FolnerReport& r, bool with_sweep = false)
{
    Json j;
    j["found"] = r.found;
    j["epsilon"] = r.epsilon;
    j["mass_cap"] = r.mass_cap;
    j["set"] = to_json(r.set);
    j["mass"] = r.mass;
    j["boundary"] = to_json(r.boundary);
    j["boundary_mass"] = r.boundary_mass;
    j["ratio"] = r.ratio;
    j["source"] = r.source;
    j["gap"] = optional_json(r.gap);
    j["cfw_variation"] = r.cfw_variation;
    j["cfw_budget"] = r.cfw_budget;
    j["cfw_premise"] = r.cfw_premise;
    if (with_sweep) {
        Json s = Json::array();
        for (const auto& x : r.swept)
            s.push_back(Json{{"threshold", x.threshold},
                             {"size", x.size},
                             {"mass", x.mass},
                             {"boundary_mass", x.boundary_mass},
                             {"ratio", x.ratio},
                             {"energy_ratio", optional_json(x.energy_ratio)}});
        j["swept"] = s;
    }
    return j;
}

inline Json to_json(const AlmostFixedReport& r)
{
    return Json{{"closure", to_json(r.closure)},  {"mass", r.mass},
                {"closure_mass", r.closure_mass}, {"diffusion_form", r.diffusion_form},
                {"lower_bound", r.lower_bound},   {"norm2", r.norm2},
                {"rayleigh", r.rayleigh},         {"energy", r.energy}};
}

inline Json to_json(const ConcentrationReport& r, bool with_observables = false)
{
    Json j;
    j["epsilon"] = r.epsilon;
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    j["minimum"] = r.minimum;
    j["upper_bound_note"] = "minimum over sampled 1-Lipschitz observables; an upper bound on the infimum over all of them";
    Json fields = Json::array();
    for (const auto& f : r.fields) {
        Json fj;
        fj["minimum"] = f.minimum;
        fj["first_moment"] = f.first_moment;
        fj["observables"] = f.observables.size();
        if (with_observables) {
            Json obs = Json::array();
            for (const auto& o : f.observables)
                obs.push_back(Json{{"observable", o.observable},
                                   {"mean", o.mean},
                                   {"mass", o.mass},
                                   {"variance", o.variance},
                                   {"chebyshev", o.chebyshev}});
            fj["per_observable"] = obs;
        }
        fields.push_back(fj);
    }
    j["fields"] = fields;
    return j;
}

}  // namespace relwalk

#endif
