#pragma once

// Experiment specs (strict JSON schema), dispatch, and result records in JSON and CSV.

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ust/errors.hpp"
#include "ust/experiments.hpp"
#include "ust/graph.hpp"
#include "ust/kirchhoff.hpp"
#include "ust/lattice.hpp"
#include "ust/rational.hpp"
#include "ust/stats.hpp"

namespace ust {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Malformed or out-of-range spec; the message starts with the offending field path.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Small graph given inline: explicit edges, a grid footprint, or a named family.
struct GraphSpec {
    std::string family;  // "edges", "grid", "path", "cycle", "complete"
    std::size_t vertices = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::vector<int> shape;

    MultiGraph build() const {
        if (family == "grid") return build_grid(shape);
        if (family == "path") return make_path(vertices);
        if (family == "cycle") return make_cycle(vertices);
        if (family == "complete") return make_complete(vertices);
        std::vector<Endpoints> e;
        for (const auto& [u, v] : edges) e.push_back({vid(u), vid(v)});
        return MultiGraph(vertices, e);
    }

    friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

struct ExperimentSpec {
    std::string kind;
    std::optional<int> d;
    std::vector<int> n;
    std::vector<int> r;
    std::vector<int> L;
    std::vector<std::uint64_t> M;
    std::optional<std::uint64_t> reps;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> horizon;
    std::optional<std::uint64_t> pairs;
    std::optional<int> m;
    std::vector<CoordEdge> A;
    std::optional<GraphSpec> graph;
    std::optional<std::uint32_t> v;
    std::optional<std::uint32_t> w;
    std::optional<std::uint32_t> edge;
    std::vector<std::uint32_t> edges;
    std::vector<std::uint32_t> enumeration;
    ExperimentBudget budgets;

    friend bool operator==(const ExperimentSpec& a, const ExperimentSpec& b) {
        return a.kind == b.kind && a.d == b.d && a.n == b.n && a.r == b.r && a.L == b.L && a.M == b.M &&
               a.reps == b.reps && a.seed == b.seed && a.horizon == b.horizon && a.pairs == b.pairs && a.m == b.m &&
               a.A == b.A && a.graph == b.graph && a.v == b.v && a.w == b.w && a.edge == b.edge &&
               a.edges == b.edges && a.enumeration == b.enumeration &&
               a.budgets.max_vertices == b.budgets.max_vertices && a.budgets.max_steps == b.budgets.max_steps &&
               a.budgets.max_replicates == b.budgets.max_replicates;
    }
};

inline const std::set<std::string>& exact_kinds() {
    static const std::set<std::string> k{"tree_count", "cylinder", "current_fraction", "lerw_law", "mu3_law",
                                         "free_wired_gap"};
    return k;
}

inline const std::set<std::string>& stochastic_kinds() {
    static const std::set<std::string> k{"intersection", "moments", "connection", "component_density", "separator",
                                         "green"};
    return k;
}

namespace detail {

using json = nlohmann::ordered_json;

[[noreturn]] inline void schema_fail(const std::string& path, const std::string& what) {
    throw SchemaError(path + ": " + what);
}

inline std::int64_t get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) schema_fail(path, "expected an integer");
    return j.get<std::int64_t>();
}

inline std::uint64_t get_uint(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    const auto v = get_int(j, path);
    if (v < 0) schema_fail(path, "must be nonnegative");
    return static_cast<std::uint64_t>(v);
}

inline int get_small(const json& j, const std::string& path) {
    const auto v = get_int(j, path);
    if (v < -1'000'000'000 || v > 1'000'000'000) schema_fail(path, "out of range");
    return static_cast<int>(v);
}

template <class F>
auto get_list(const json& j, const std::string& path, F&& one) {
    std::vector<decltype(one(j, path))> out;
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(one(j[i], path + "[" + std::to_string(i) + "]"));
    } else {
        out.push_back(one(j, path));
    }
    return out;
}

inline LatticeCoord get_coord(const json& j, const std::string& path) {
    if (!j.is_array()) schema_fail(path, "expected a coordinate list");
    LatticeCoord c;
    for (std::size_t i = 0; i < j.size(); ++i) c.push_back(get_small(j[i], path + "[" + std::to_string(i) + "]"));
    return c;
}

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& path) {
    for (const auto& item : j.items())
        if (!allowed.contains(item.key())) schema_fail(path + "." + item.key(), "unknown field");
}

inline GraphSpec parse_graph(const json& j) {
    const std::string path = "spec.graph";
    if (!j.is_object()) schema_fail(path, "expected an object");
    reject_unknown(j, {"vertices", "edges", "grid", "path", "cycle", "complete"}, path);
    GraphSpec g;
    int forms = 0;
    for (const char* fam : {"grid", "path", "cycle", "complete"}) {
        if (!j.contains(fam)) continue;
        ++forms;
        g.family = fam;
        if (g.family == "grid") {
            g.shape = get_list(j[fam], path + ".grid", get_small);
            if (g.shape.empty()) schema_fail(path + ".grid", "needs at least one side");
            for (const int s : g.shape)
                if (s < 1 || s > 64) schema_fail(path + ".grid", "sides must lie in 1..64");
        } else {
            g.vertices = get_uint(j[fam], path + "." + fam);
            if (g.vertices < 1 || g.vertices > 4096) schema_fail(path + "." + fam, "size must lie in 1..4096");
        }
    }
    if (j.contains("edges")) {
        ++forms;
        g.family = "edges";
        if (!j.contains("vertices")) schema_fail(path + ".vertices", "required with edges");
        g.vertices = get_uint(j["vertices"], path + ".vertices");
        const auto& e = j["edges"];
        if (!e.is_array()) schema_fail(path + ".edges", "expected a list of pairs");
        for (std::size_t i = 0; i < e.size(); ++i) {
            const auto p = path + ".edges[" + std::to_string(i) + "]";
            if (!e[i].is_array() || e[i].size() != 2) schema_fail(p, "expected [u, v]");
            const auto u = get_uint(e[i][0], p + "[0]"), v = get_uint(e[i][1], p + "[1]");
            if (u >= g.vertices || v >= g.vertices) schema_fail(p, "endpoint out of range");
            g.edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
        }
    } else if (j.contains("vertices")) {
        schema_fail(path + ".vertices", "only valid together with edges");
    }
    if (forms != 1) schema_fail(path, "give exactly one of edges, grid, path, cycle, complete");
    return g;
}

inline json graph_to_json(const GraphSpec& g) {
    json j = json::object();
    if (g.family == "grid") {
        j["grid"] = g.shape;
    } else if (g.family == "edges") {
        j["vertices"] = g.vertices;
        json e = json::array();
        for (const auto& [u, v] : g.edges) e.push_back({u, v});
        j["edges"] = e;
    } else {
        j[g.family] = g.vertices;
    }
    return j;
}

inline void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) schema_fail(path, what);
}

inline void budget_fail(const std::string& what) { throw ResourceLimitError("budget: " + what); }

}  // namespace detail

/// Parses and validates a spec. Unknown fields are rejected; reps defaults to 1000 for
/// stochastic kinds and budgets default to the library limits.
inline ExperimentSpec parse_spec(const std::string& text) {
    using detail::json;
    using detail::require;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("spec: malformed JSON: ") + e.what());
    }
    require(j.is_object(), "spec", "expected a JSON object");
    detail::reject_unknown(j,
                           {"kind", "d", "n", "r", "L", "M", "reps", "seed", "horizon", "pairs", "m", "A", "graph",
                            "v", "w", "edge", "edges", "enumeration", "budgets"},
                           "spec");
    ExperimentSpec s;
    require(j.contains("kind") && j["kind"].is_string(), "spec.kind", "required string");
    s.kind = j["kind"].get<std::string>();
    const bool exact = exact_kinds().contains(s.kind);
    const bool stochastic = stochastic_kinds().contains(s.kind);
    require(exact || stochastic, "spec.kind", "unknown kind '" + s.kind + "'");

    if (j.contains("d")) s.d = detail::get_small(j["d"], "spec.d");
    if (j.contains("n")) s.n = detail::get_list(j["n"], "spec.n", detail::get_small);
    if (j.contains("r")) s.r = detail::get_list(j["r"], "spec.r", detail::get_small);
    if (j.contains("L")) s.L = detail::get_list(j["L"], "spec.L", detail::get_small);
    if (j.contains("M")) s.M = detail::get_list(j["M"], "spec.M", detail::get_uint);
    if (j.contains("reps")) s.reps = detail::get_uint(j["reps"], "spec.reps");
    if (j.contains("seed")) s.seed = detail::get_uint(j["seed"], "spec.seed");
    if (j.contains("horizon")) s.horizon = detail::get_uint(j["horizon"], "spec.horizon");
    if (j.contains("pairs")) s.pairs = detail::get_uint(j["pairs"], "spec.pairs");
    if (j.contains("m")) s.m = detail::get_small(j["m"], "spec.m");
    if (j.contains("v")) s.v = static_cast<std::uint32_t>(detail::get_uint(j["v"], "spec.v"));
    if (j.contains("w")) s.w = static_cast<std::uint32_t>(detail::get_uint(j["w"], "spec.w"));
    if (j.contains("edge")) s.edge = static_cast<std::uint32_t>(detail::get_uint(j["edge"], "spec.edge"));
    auto u32 = [](const detail::json& x, const std::string& p) {
        return static_cast<std::uint32_t>(detail::get_uint(x, p));
    };
    if (j.contains("edges")) s.edges = detail::get_list(j["edges"], "spec.edges", u32);
    if (j.contains("enumeration")) s.enumeration = detail::get_list(j["enumeration"], "spec.enumeration", u32);
    if (j.contains("graph")) s.graph = detail::parse_graph(j["graph"]);
    if (j.contains("A")) {
        const auto& a = j["A"];
        require(a.is_array(), "spec.A", "expected a list of [x, y] coordinate pairs");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const auto p = "spec.A[" + std::to_string(i) + "]";
            require(a[i].is_array() && a[i].size() == 2, p, "expected [x, y]");
            s.A.emplace_back(detail::get_coord(a[i][0], p + "[0]"), detail::get_coord(a[i][1], p + "[1]"));
        }
    }
    if (j.contains("budgets")) {
        const auto& b = j["budgets"];
        require(b.is_object(), "spec.budgets", "expected an object");
        detail::reject_unknown(b, {"max_vertices", "max_steps", "max_replicates"}, "spec.budgets");
        if (b.contains("max_vertices")) s.budgets.max_vertices = detail::get_uint(b["max_vertices"], "spec.budgets.max_vertices");
        if (b.contains("max_steps")) s.budgets.max_steps = detail::get_uint(b["max_steps"], "spec.budgets.max_steps");
        if (b.contains("max_replicates"))
            s.budgets.max_replicates = detail::get_uint(b["max_replicates"], "spec.budgets.max_replicates");
    }

    // Per-kind requirements.
    auto need_graph = [&] { require(s.graph.has_value(), "spec.graph", "required for kind " + s.kind); };
    auto need_d = [&](int lo) {
        require(s.d.has_value(), "spec.d", "required for kind " + s.kind);
        require(*s.d >= 1 && *s.d <= kMaxDim, "spec.d", "must lie in 1..8");
        require(*s.d >= lo, "spec.d", "must be >= " + std::to_string(lo) + " for kind " + s.kind);
    };
    auto need_list = [&](const auto& v, const char* field) {
        require(!v.empty(), std::string("spec.") + field, "required for kind " + s.kind);
    };
    auto positive = [&](const std::vector<int>& v, const char* field) {
        for (std::size_t i = 0; i < v.size(); ++i)
            require(v[i] >= 1, std::string("spec.") + field + "[" + std::to_string(i) + "]", "must be positive");
    };
    if (stochastic) {
        require(s.seed.has_value(), "spec.seed", "required: seeds are mandatory for reproducibility");
        if (!s.reps) s.reps = 1000;
        require(*s.reps >= 1, "spec.reps", "must be positive");
        if (*s.reps > s.budgets.max_replicates)
            detail::budget_fail("spec.reps = " + std::to_string(*s.reps) + " exceeds max_replicates = " +
                                std::to_string(s.budgets.max_replicates));
    }
    if (s.kind == "tree_count" || s.kind == "mu3_law") {
        need_graph();
    } else if (s.kind == "cylinder") {
        need_graph();
        need_list(s.edges, "edges");
    } else if (s.kind == "current_fraction") {
        need_graph();
        require(s.edge.has_value(), "spec.edge", "required for kind current_fraction");
    } else if (s.kind == "lerw_law") {
        need_graph();
        require(s.v.has_value(), "spec.v", "required for kind lerw_law");
        require(s.w.has_value(), "spec.w", "required for kind lerw_law");
    } else if (s.kind == "free_wired_gap") {
        need_d(1);
        need_list(s.n, "n");
        positive(s.n, "n");
        for (const int n : s.n)
            if (BoxShape(*s.d, n).vertex_count() > s.budgets.max_vertices)
                detail::budget_fail("box n = " + std::to_string(n) + " exceeds max_vertices");
    } else if (s.kind == "intersection" || s.kind == "moments") {
        require(s.d.has_value(), "spec.d", "required for kind " + s.kind);
        require(*s.d >= 3, "spec.d", "d must be ≥ 3 for infinite-context LERW");
        need_d(s.kind == "moments" ? 5 : 3);
        need_list(s.r, "r");
        for (std::size_t i = 0; i < s.r.size(); ++i)
            require(s.r[i] >= 0, "spec.r[" + std::to_string(i) + "]", "must be nonnegative");
        need_list(s.M, "M");
        if (s.kind == "moments") require(s.M.size() == 1, "spec.M", "moments take a single cutoff");
        const auto top = *std::max_element(s.M.begin(), s.M.end());
        if (std::max(top, s.horizon.value_or(0)) > s.budgets.max_steps)
            detail::budget_fail("walk length exceeds max_steps = " + std::to_string(s.budgets.max_steps));
    } else if (s.kind == "connection") {
        need_d(1);
        need_list(s.r, "r");
        need_list(s.n, "n");
        need_list(s.M, "M");
        require(s.n.size() == 1 || s.n.size() == s.r.size(), "spec.n", "give one radius or one per separation");
        for (std::size_t i = 0; i < s.r.size(); ++i) {
            const int n = s.n.size() == 1 ? s.n[0] : s.n[i];
            require(s.r[i] >= 0 && 4 * s.r[i] <= n, "spec.r[" + std::to_string(i) + "]", "must satisfy 0 <= r <= n/4");
            if (BoxShape(*s.d, n).vertex_count() > s.budgets.max_vertices)
                detail::budget_fail("box n = " + std::to_string(n) + " exceeds max_vertices = " +
                                    std::to_string(s.budgets.max_vertices));
        }
    } else if (s.kind == "component_density") {
        need_d(1);
        need_list(s.n, "n");
        positive(s.n, "n");
        require(s.M.size() == 1, "spec.M", "a single cutoff is required");
        if (s.pairs) require(*s.pairs >= 1, "spec.pairs", "must be positive");
        for (const int n : s.n)
            if (BoxShape(*s.d, n).vertex_count() > s.budgets.max_vertices)
                detail::budget_fail("box n = " + std::to_string(n) + " exceeds max_vertices");
    } else if (s.kind == "separator") {
        need_d(1);
        need_list(s.L, "L");
        positive(s.L, "L");
        require(s.n.empty() || s.n.size() == 1 || s.n.size() == s.L.size(), "spec.n",
                "omit, or give one radius or one per spacing");
        for (std::size_t i = 0; i < s.L.size(); ++i) {
            if (s.n.empty()) continue;
            const int n = s.n.size() == 1 ? s.n[0] : s.n[i];
            require(2 * s.L[i] <= n, "spec.n", "placement must lie within B_{n/2}");
            if (BoxShape(*s.d, n).vertex_count() > s.budgets.max_vertices)
                detail::budget_fail("box n = " + std::to_string(n) + " exceeds max_vertices");
        }
    } else if (s.kind == "green") {
        need_d(3);
        need_list(s.r, "r");
        positive(s.r, "r");
        require(s.n.size() == 1, "spec.n", "a single box radius is required");
        for (std::size_t i = 0; i < s.r.size(); ++i)
            require(4 * s.r[i] <= s.n[0], "spec.r[" + std::to_string(i) + "]", "must satisfy r <= n/4");
    }
    return s;
}

inline std::string spec_to_json(const ExperimentSpec& s, int indent = -1) {
    detail::json j;
    j["kind"] = s.kind;
    if (s.d) j["d"] = *s.d;
    if (!s.n.empty()) j["n"] = s.n;
    if (!s.r.empty()) j["r"] = s.r;
    if (!s.L.empty()) j["L"] = s.L;
    if (!s.M.empty()) j["M"] = s.M;
    if (s.reps) j["reps"] = *s.reps;
    if (s.seed) j["seed"] = *s.seed;
    if (s.horizon) j["horizon"] = *s.horizon;
    if (s.pairs) j["pairs"] = *s.pairs;
    if (s.m) j["m"] = *s.m;
    if (!s.A.empty()) {
        detail::json a = detail::json::array();
        for (const auto& [x, y] : s.A) a.push_back({x, y});
        j["A"] = a;
    }
    if (s.graph) j["graph"] = detail::graph_to_json(*s.graph);
    if (s.v) j["v"] = *s.v;
    if (s.w) j["w"] = *s.w;
    if (s.edge) j["edge"] = *s.edge;
    if (!s.edges.empty()) j["edges"] = s.edges;
    if (!s.enumeration.empty()) j["enumeration"] = s.enumeration;
    j["budgets"] = {{"max_vertices", s.budgets.max_vertices},
                    {"max_steps", s.budgets.max_steps},
                    {"max_replicates", s.budgets.max_replicates}};
    return j.dump(indent);
}

/// Exact rational output.
struct ExactValue {
    mpq_class value;
    friend bool operator==(const ExactValue& a, const ExactValue& b) { return a.value == b.value; }
};

/// Exact integer output (tree counts).
struct CountValue {
    mpz_class value;
    friend bool operator==(const CountValue& a, const CountValue& b) { return a.value == b.value; }
};

struct FitValue {
    SlopeFit fit;
    friend bool operator==(const FitValue& a, const FitValue& b) {
        return a.fit.slope == b.fit.slope && a.fit.intercept == b.fit.intercept && a.fit.residual == b.fit.residual &&
               a.fit.slope_error == b.fit.slope_error && a.fit.points == b.fit.points && a.fit.weighted == b.fit.weighted;
    }
};

struct LabeledOutput {
    std::string label;
    std::variant<EstimateResult, ExactValue, CountValue, FitValue> value;
    friend bool operator==(const LabeledOutput&, const LabeledOutput&) = default;

    /// Fits summarize several points and are not points themselves.
    bool is_point() const { return !std::holds_alternative<FitValue>(value); }
};

struct ResultRecord {
    ExperimentSpec spec;
    std::vector<LabeledOutput> outputs;
    std::string artifact_version = kArtifactVersion;
    int schema_version = kSchemaVersion;
    double seconds = 0;

    friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

namespace detail {

inline std::string lbl(std::initializer_list<std::pair<const char*, std::string>> parts) {
    std::string out;
    for (const auto& [k, v] : parts) {
        if (!out.empty()) out += ' ';
        out += std::string(k) + "=" + v;
    }
    return out;
}

inline std::string s(std::uint64_t x) { return std::to_string(x); }
inline std::string s(int x) { return std::to_string(x); }

inline std::string path_string(const PathSeq<VertexId>& p) {
    std::string out;
    for (const auto v : p.vertices()) out += (out.empty() ? "" : "-") + std::to_string(to_index(v));
    return out;
}

inline void check_edge(const MultiGraph& g, std::uint32_t e, const std::string& path) {
    if (e >= g.edge_count()) schema_fail(path, "edge id out of range");
}

inline void all_censored(const EstimateResult& e, const std::string& label) {
    if (e.replicates == 0 && e.censored_count > 0)
        throw StepBudgetExceeded("every replicate of '" + label + "' exhausted its walk budget");
}

}  // namespace detail

/// Runs a validated spec. Deterministic apart from `seconds`.
inline ResultRecord run(const ExperimentSpec& spec, std::size_t workers = 0) {
    using detail::lbl;
    using detail::s;
    const auto start = std::chrono::steady_clock::now();
    ResultRecord rec;
    rec.spec = spec;
    RunConfig cfg{spec.budgets, workers};
    ExactLimits limits;
    auto push_est = [&](std::string label, const EstimateResult& e) {
        detail::all_censored(e, label);
        rec.outputs.push_back({std::move(label), e});
    };
    try {
        const std::string& k = spec.kind;
        if (exact_kinds().contains(k) && k != "free_wired_gap") {
            const MultiGraph g = spec.graph->build();
            if (k == "tree_count") {
                rec.outputs.push_back({"count", CountValue{spanning_tree_count(g, limits)}});
            } else if (k == "cylinder") {
                std::vector<EdgeId> a;
                for (std::size_t i = 0; i < spec.edges.size(); ++i) {
                    detail::check_edge(g, spec.edges[i], "spec.edges[" + std::to_string(i) + "]");
                    a.push_back(eid(spec.edges[i]));
                }
                rec.outputs.push_back({"probability", ExactValue{cylinder_probability(g, a, limits).value()}});
            } else if (k == "current_fraction") {
                detail::check_edge(g, *spec.edge, "spec.edge");
                rec.outputs.push_back({"fraction", ExactValue{edge_current_fraction(g, eid(*spec.edge), limits).value()}});
            } else if (k == "lerw_law") {
                if (*spec.v >= g.vertex_count()) detail::schema_fail("spec.v", "vertex out of range");
                if (*spec.w >= g.vertex_count()) detail::schema_fail("spec.w", "vertex out of range");
                const auto law = exact_lerw_law(g, vid(*spec.v), vid(*spec.w), limits);
                for (const auto& [path, p] : law.support)
                    rec.outputs.push_back({"path=" + detail::path_string(PathSeq<VertexId>(path)), ExactValue{p.value()}});
            } else if (k == "mu3_law") {
                std::vector<EdgeId> order;
                if (spec.enumeration.empty()) {
                    for (std::size_t i = 0; i < g.edge_count(); ++i) order.push_back(eid(i));
                } else {
                    for (const auto e : spec.enumeration) order.push_back(eid(e));
                }
                const auto law = mu3_exact_law(g, order, limits);
                for (const auto& [tree, p] : law) {
                    std::string label = "tree=";
                    for (std::size_t i = 0; i < tree.size(); ++i) label += (i ? "," : "") + std::to_string(to_index(tree[i]));
                    rec.outputs.push_back({label, ExactValue{p.value()}});
                }
            }
        } else if (k == "free_wired_gap") {
            const auto a = spec.A.empty() ? central_edge(*spec.d) : spec.A;
            const auto rows = free_wired_gap(*spec.d, a, spec.m, spec.n, limits);
            for (const auto& row : rows) {
                rec.outputs.push_back({lbl({{"n", s(row.n)}, {"boundary", "free"}}), ExactValue{row.free.value()}});
                if (row.wired) {
                    rec.outputs.push_back(
                        {lbl({{"n", s(row.n)}, {"boundary", "wired"}, {"m", s(*row.m)}}), ExactValue{row.wired->value()}});
                    rec.outputs.push_back({lbl({{"n", s(row.n)}, {"gap", "free-wired"}}), ExactValue{*row.gap()}});
                }
            }
        } else if (k == "intersection") {
            const int d = *spec.d;
            std::vector<PowerPoint> pts;
            for (const int r : spec.r) {
                const auto res = intersection_sweep(d, r, spec.M, *spec.reps, *spec.seed,
                                                    IntersectionOptions{spec.horizon.value_or(0)}, cfg);
                for (std::size_t i = 0; i < res.size(); ++i) {
                    push_est(lbl({{"d", s(d)}, {"r", s(r)}, {"M", s(spec.M[i])}}), res[i]);
                    if (spec.M.size() == 1) pts.push_back({static_cast<double>(r), res[i].mean, res[i].std_error});
                }
            }
            if (pts.size() >= 3) {
                bool positive = true;
                for (const auto& p : pts) positive = positive && p.r > 0 && p.value > 0;
                if (positive) rec.outputs.push_back({"slope", FitValue{fit_power_law(pts)}});
            }
        } else if (k == "moments") {
            const int d = *spec.d;
            for (const int r : spec.r) {
                const auto res = intersection_moments(d, r, spec.M[0], *spec.reps, *spec.seed,
                                                      IntersectionOptions{spec.horizon.value_or(0)}, cfg);
                push_est(lbl({{"d", s(d)}, {"r", s(r)}, {"moment", "EX"}}), res.ex);
                push_est(lbl({{"d", s(d)}, {"r", s(r)}, {"moment", "EX2"}}), res.ex2);
                push_est(lbl({{"d", s(d)}, {"r", s(r)}, {"moment", "P(X>0)"}}), res.positive);
                EstimateResult margin = res.positive;
                margin.mean = res.pz_margin;
                margin.std_error = res.pz_error;
                push_est(lbl({{"d", s(d)}, {"r", s(r)}, {"moment", "P(X>0)-(EX)^2/EX2"}}), margin);
            }
        } else if (k == "connection") {
            const int d = *spec.d;
            std::vector<PowerPoint> pts;
            for (std::size_t i = 0; i < spec.r.size(); ++i) {
                const int n = spec.n.size() == 1 ? spec.n[0] : spec.n[i];
                const auto res = connection_sweep(d, n, spec.r[i], spec.M, *spec.reps, *spec.seed, cfg);
                for (std::size_t j = 0; j < res.size(); ++j)
                    push_est(lbl({{"d", s(d)}, {"n", s(n)}, {"r", s(spec.r[i])}, {"M", s(spec.M[j])}}), res[j]);
                if (spec.M.size() == 1 && spec.r[i] > 0 && res[0].mean > 0)
                    pts.push_back({static_cast<double>(spec.r[i]), res[0].mean, res[0].std_error});
            }
            if (pts.size() >= 3 && pts.size() == spec.r.size()) rec.outputs.push_back({"slope", FitValue{fit_power_law(pts)}});
        } else if (k == "component_density") {
            const int d = *spec.d;
            for (const int n : spec.n) {
                const auto res = component_density_check(d, n, spec.M[0], *spec.reps, *spec.seed, spec.pairs.value_or(4096), cfg);
                push_est(lbl({{"d", s(d)}, {"n", s(n)}, {"M", s(spec.M[0])}, {"quantity", "pair_sum"}}), res.pair_sum);
                EstimateResult ratio = res.pair_sum;
                ratio.mean = res.ratio;
                ratio.std_error = res.ratio_error;
                push_est(lbl({{"d", s(d)}, {"n", s(n)}, {"M", s(spec.M[0])}, {"quantity", "ratio"}}), ratio);
            }
        } else if (k == "separator") {
            const int d = *spec.d;
            for (std::size_t i = 0; i < spec.L.size(); ++i) {
                const int L = spec.L[i];
                const int n = spec.n.empty() ? separator_box_radius(d, L, spec.budgets.max_vertices)
                                             : (spec.n.size() == 1 ? spec.n[0] : spec.n[i]);
                const auto res = separator_probability(d, n, collinear_placement(d, L), *spec.reps, *spec.seed, cfg);
                push_est(lbl({{"d", s(d)}, {"n", s(n)}, {"L", s(L)}}), res);
            }
        } else if (k == "green") {
            const int d = *spec.d;
            const auto res = green_function_scaling(d, spec.r, spec.n[0], *spec.reps, *spec.seed, {}, cfg);
            for (const auto& p : res.points) {
                const auto label = lbl({{"d", s(d)}, {"n", s(spec.n[0])}, {"r", s(p.r)}});
                if (p.exact)
                    rec.outputs.push_back({label, ExactValue{*p.exact}});
                else
                    push_est(label, p.estimate);
            }
            if (res.points.size() >= 3) rec.outputs.push_back({"slope", FitValue{res.fit}});
        }
    } catch (const PreconditionError& e) {
        throw SchemaError(std::string("spec (kind ") + spec.kind + "): " + e.what());
    } catch (const RangeError& e) {
        throw SchemaError(std::string("spec (kind ") + spec.kind + "): " + e.what());
    } catch (const UnknownEdgeError& e) {
        throw SchemaError(std::string("spec (kind ") + spec.kind + "): " + e.what());
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

namespace detail {

inline json output_to_json(const LabeledOutput& o) {
    json j;
    j["label"] = o.label;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, EstimateResult>) {
                j["type"] = "estimate";
                j["mean"] = v.mean;
                j["stderr"] = v.std_error;
                j["replicates"] = v.replicates;
                j["censored_count"] = v.censored_count;
                j["censored"] = v.censored();
                j["seed"] = v.seed;
                j["streams"] = v.streams;
            } else if constexpr (std::is_same_v<T, ExactValue>) {
                j["type"] = "exact";
                j["fraction"] = ExactProb(v.value).fraction();
                j["decimal"] = ExactProb::to_decimal(v.value, 40);
            } else if constexpr (std::is_same_v<T, CountValue>) {
                j["type"] = "count";
                j["count"] = v.value.get_str();
            } else {
                j["type"] = "fit";
                j["slope"] = v.fit.slope;
                j["intercept"] = v.fit.intercept;
                j["residual"] = v.fit.residual;
                j["slope_error"] = v.fit.slope_error;
                j["weighted"] = v.fit.weighted;
                json pts = json::array();
                for (const auto& [x, y] : v.fit.points) pts.push_back({x, y});
                j["points"] = pts;
            }
        },
        o.value);
    return j;
}

inline LabeledOutput output_from_json(const json& j) {
    LabeledOutput o;
    o.label = j.at("label").get<std::string>();
    const auto type = j.at("type").get<std::string>();
    if (type == "estimate") {
        EstimateResult e;
        e.mean = j.at("mean").get<double>();
        e.std_error = j.at("stderr").get<double>();
        e.replicates = j.at("replicates").get<std::uint64_t>();
        e.censored_count = j.at("censored_count").get<std::uint64_t>();
        e.seed = j.at("seed").get<std::uint64_t>();
        e.streams = j.at("streams").get<std::string>();
        o.value = e;
    } else if (type == "exact") {
        mpq_class q(j.at("fraction").get<std::string>());
        q.canonicalize();
        o.value = ExactValue{q};
    } else if (type == "count") {
        o.value = CountValue{mpz_class(j.at("count").get<std::string>())};
    } else if (type == "fit") {
        SlopeFit f;
        f.slope = j.at("slope").get<double>();
        f.intercept = j.at("intercept").get<double>();
        f.residual = j.at("residual").get<double>();
        f.slope_error = j.at("slope_error").get<double>();
        f.weighted = j.at("weighted").get<bool>();
        for (const auto& p : j.at("points")) f.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        o.value = FitValue{f};
    } else {
        throw SchemaError("record.outputs: unknown output type '" + type + "'");
    }
    return o;
}

}  // namespace detail

inline std::string record_to_json(const ResultRecord& r, int indent = 2) {
    detail::json j;
    j["spec"] = detail::json::parse(spec_to_json(r.spec));
    detail::json outs = detail::json::array();
    for (const auto& o : r.outputs) outs.push_back(detail::output_to_json(o));
    j["outputs"] = outs;
    j["versions"] = {{"artifact", r.artifact_version}, {"schema", r.schema_version}};
    j["timing"] = {{"seconds", r.seconds}};
    return j.dump(indent) + "\n";
}

inline ResultRecord record_from_json(const std::string& text) {
    const auto j = detail::json::parse(text);
    ResultRecord r;
    r.spec = parse_spec(j.at("spec").dump());
    for (const auto& o : j.at("outputs")) r.outputs.push_back(detail::output_from_json(o));
    r.artifact_version = j.at("versions").at("artifact").get<std::string>();
    r.schema_version = j.at("versions").at("schema").get<int>();
    r.seconds = j.at("timing").at("seconds").get<double>();
    return r;
}

/// One row per point: label, value, stderr, replicates, censored, seed, exact. Exact values
/// put a 40-digit decimal in `value` and the fraction in `exact`.
inline std::string record_to_csv(const ResultRecord& r) {
    std::ostringstream out;
    out.precision(17);
    out << "label,value,stderr,replicates,censored,seed,exact\n";
    for (const auto& o : r.outputs) {
        if (!o.is_point()) continue;
        out << '"' << o.label << "\",";
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, EstimateResult>) {
                    out << v.mean << ',' << v.std_error << ',' << v.replicates << ',' << v.censored() << ',' << v.seed
                        << ",";
                } else if constexpr (std::is_same_v<T, ExactValue>) {
                    out << ExactProb::to_decimal(v.value, 40) << ",0,,0,," << ExactProb(v.value).fraction();
                } else if constexpr (std::is_same_v<T, CountValue>) {
                    out << v.value.get_str() << ",0,,0,," << v.value.get_str();
                }
            },
            o.value);
        out << '\n';
    }
    return out.str();
}

enum class OutputFormat { json, csv };

/// Writes the record; an empty path means standard output.
inline void write_results(const ResultRecord& r, OutputFormat format, const std::string& path, std::ostream& fallback) {
    const std::string text = format == OutputFormat::json ? record_to_json(r) : record_to_csv(r);
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed for output file " + path);
}

}  // namespace ust
