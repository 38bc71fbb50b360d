// ustlab: exact computations, single samples, and batch experiments.
//
//   ustlab exact      KIND | --spec FILE   [inline flags] [--out F] [--format json|csv]
//   ustlab experiment KIND | --spec FILE   [inline flags] [--out F] [--format json|csv]
//   ustlab sample     tree|walk|lerw --dim D [--box N] --seed S [--cutoff M] [--out F]
//
// Exit codes: 0 ok, 2 schema error, 3 budget error, 4 walk budget exhausted at run time.
// UST_WORKERS sets the number of worker threads.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ust/ust.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

struct Inline {
    std::string kind;
    std::string spec_file;
    std::optional<int> dim;
    std::vector<int> box;
    std::vector<int> sep;
    std::vector<int> spacing;
    std::vector<std::uint64_t> cutoff;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> reps;
    std::optional<std::uint64_t> horizon;
    std::optional<std::uint64_t> pairs;
    std::optional<int> inner;
    std::vector<int> grid;
    std::optional<std::size_t> cycle, path, complete;
    std::optional<std::uint32_t> edge, from, to;
    std::vector<std::uint32_t> edges;
    std::string out;
    std::string format = "json";
};

void add_inline(CLI::App* app, Inline& o, bool stochastic) {
    app->add_option("kind", o.kind, "Kind of computation");
    app->add_option("--spec", o.spec_file, "JSON spec file (replaces inline flags)");
    app->add_option("--dim", o.dim, "Lattice dimension d");
    app->add_option("--box", o.box, "Box radius n (list allowed)")->delimiter(',');
    app->add_option("--seed", o.seed, "64-bit seed");
    app->add_option("--reps", o.reps, "Replicates per point");
    app->add_option("--cutoff", o.cutoff, "Path-length cutoff M (list allowed)")->delimiter(',');
    app->add_option("--out", o.out, "Output file (default: stdout)");
    app->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--inner", o.inner, "Inner radius m of the wired boundary");
    if (stochastic) {
        app->add_option("--sep", o.sep, "Separations r (list)")->delimiter(',');
        app->add_option("--spacing", o.spacing, "Separator spacings L (list)")->delimiter(',');
        app->add_option("--horizon", o.horizon, "Steps of the walk that is loop-erased");
        app->add_option("--pairs", o.pairs, "Vertex pairs per tree");
    } else {
        app->add_option("--grid", o.grid, "Grid graph footprint, e.g. 2,3")->delimiter(',');
        app->add_option("--cycle", o.cycle, "Cycle graph on k vertices");
        app->add_option("--path", o.path, "Path graph on k vertices");
        app->add_option("--complete", o.complete, "Complete graph on k vertices");
        app->add_option("--edge", o.edge, "Edge id");
        app->add_option("--edges", o.edges, "Edge ids (list)")->delimiter(',');
        app->add_option("--from", o.from, "Source vertex");
        app->add_option("--to", o.to, "Target vertex");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ust::SchemaError("--spec: cannot read " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string inline_spec(const Inline& o) {
    ordered_json j;
    if (o.kind.empty()) throw ust::SchemaError("spec.kind: give a kind or --spec");
    j["kind"] = o.kind;
    if (o.dim) j["d"] = *o.dim;
    if (!o.box.empty()) j["n"] = o.box;
    if (!o.sep.empty()) j["r"] = o.sep;
    if (!o.spacing.empty()) j["L"] = o.spacing;
    if (!o.cutoff.empty()) j["M"] = o.cutoff;
    if (o.seed) j["seed"] = *o.seed;
    if (o.reps) j["reps"] = *o.reps;
    if (o.horizon) j["horizon"] = *o.horizon;
    if (o.pairs) j["pairs"] = *o.pairs;
    if (o.inner) j["m"] = *o.inner;
    if (!o.grid.empty()) j["graph"] = {{"grid", o.grid}};
    if (o.cycle) j["graph"] = {{"cycle", *o.cycle}};
    if (o.path) j["graph"] = {{"path", *o.path}};
    if (o.complete) j["graph"] = {{"complete", *o.complete}};
    if (o.edge) j["edge"] = *o.edge;
    if (!o.edges.empty()) j["edges"] = o.edges;
    if (o.from) j["v"] = *o.from;
    if (o.to) j["w"] = *o.to;
    return j.dump();
}

int run_spec(const Inline& o, bool stochastic) {
    const std::string text = o.spec_file.empty() ? inline_spec(o) : read_file(o.spec_file);
    const auto spec = ust::parse_spec(text);
    if (stochastic != ust::stochastic_kinds().contains(spec.kind)) {
        throw ust::SchemaError("spec.kind: '" + spec.kind + "' belongs to the " +
                               (stochastic ? "exact" : "experiment") + " subcommand");
    }
    const auto record = ust::run(spec);
    ust::write_results(record, o.format == "csv" ? ust::OutputFormat::csv : ust::OutputFormat::json, o.out, std::cout);
    return 0;
}

struct SampleOpts {
    std::string what;
    int dim = 2;
    std::optional<int> box;
    std::optional<std::uint64_t> seed;
    std::uint64_t cutoff = 1000;
    std::string out;
};

std::string coord_string(const ust::LatticeCoord& c) {
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? " " : "") + std::to_string(c[i]);
    return s;
}

int run_sample(const SampleOpts& o) {
    if (!o.seed) throw ust::SchemaError("--seed: required: seeds are mandatory for reproducibility");
    if (o.dim < 1 || o.dim > ust::kMaxDim) throw ust::SchemaError("--dim: must lie in 1..8");
    ust::RngStream rng(*o.seed, 0);
    const ust::LatticeCoord origin(static_cast<std::size_t>(o.dim), 0);
    std::vector<std::string> lines;
    if (o.what == "tree") {
        if (!o.box || *o.box < 0) throw ust::SchemaError("--box: required for tree samples");
        const auto box = ust::build_box(o.dim, *o.box);
        const auto t = ust::aldous_broder_tree(box.graph(), box.vertex(origin), rng);
        for (const auto e : t.edges()) {
            auto a = box.coord(box.graph().endpoints(e).u), b = box.coord(box.graph().endpoints(e).v);
            if (b < a) std::swap(a, b);
            lines.push_back(coord_string(a) + " | " + coord_string(b));
        }
        std::sort(lines.begin(), lines.end());
    } else if (o.what == "walk") {
        if (o.box) {
            const ust::BoxShape shape(o.dim, *o.box);
            const auto p = ust::srw_path(shape, origin, ust::StopAfter{o.cutoff}, rng);
            for (const auto v : p.vertices()) lines.push_back(coord_string(shape.coord(ust::to_index(v))));
        } else {
            const ust::IntegerLattice zd(o.dim);
            const auto p = ust::srw_path(zd, origin, ust::StopAfter{o.cutoff}, rng);
            for (const auto k : p.vertices()) lines.push_back(coord_string(zd.decode(k)));
        }
    } else if (o.what == "lerw") {
        if (o.box) {
            const auto box = ust::build_box(o.dim, *o.box);
            const auto p = ust::lerw_sample(box.graph(), box.vertex(origin), box.boundary(), rng);
            for (const auto v : p.vertices()) lines.push_back(coord_string(box.coord(v)));
        } else {
            if (o.dim < 3) throw ust::SchemaError("--dim: d must be ≥ 3 for infinite-context LERW");
            const ust::IntegerLattice zd(o.dim);
            const auto p = ust::lerw_sample(zd, origin, o.cutoff, rng);
            lines.push_back("# horizon=" + std::to_string(p.horizon) + " checkpoint=" + std::to_string(p.checkpoint) +
                            " stable_steps=" + std::to_string(p.stable_steps));
            for (const auto k : p.path.vertices()) lines.push_back(coord_string(zd.decode(k)));
        }
    } else {
        throw ust::SchemaError("sample: kind must be tree, walk or lerw");
    }
    std::ostringstream text;
    for (const auto& l : lines) text << l << '\n';
    if (o.out.empty()) {
        std::cout << text.str();
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file " + o.out);
        f << text.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Uniform spanning tree laboratory"};
    app.require_subcommand(1);
    Inline exact_opts, exp_opts;
    SampleOpts sample_opts;
    auto* exact = app.add_subcommand("exact", "Exact rational computations on small graphs");
    add_inline(exact, exact_opts, false);
    auto* experiment = app.add_subcommand("experiment", "Monte Carlo experiments");
    add_inline(experiment, exp_opts, true);
    auto* sample = app.add_subcommand("sample", "Dump one tree, walk or loop-erased walk");
    sample->add_option("kind", sample_opts.what, "tree, walk or lerw")->required();
    sample->add_option("--dim", sample_opts.dim, "Lattice dimension d");
    sample->add_option("--box", sample_opts.box, "Box radius n (omit for Z^d walks)");
    sample->add_option("--seed", sample_opts.seed, "64-bit seed");
    sample->add_option("--cutoff", sample_opts.cutoff, "Walk length");
    sample->add_option("--out", sample_opts.out, "Output file (default: stdout)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (*exact) return run_spec(exact_opts, false);
        if (*experiment) return run_spec(exp_opts, true);
        return run_sample(sample_opts);
    } catch (const ust::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return 2;
    } catch (const ust::PreconditionError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return 2;
    } catch (const ust::RangeError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return 2;
    } catch (const ust::UnknownEdgeError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return 2;
    } catch (const ust::ResourceLimitError& e) {
        std::cerr << "budget error: " << e.what() << '\n';
        return 3;
    } catch (const ust::StepBudgetExceeded& e) {
        std::cerr << "runtime budget exhausted: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
