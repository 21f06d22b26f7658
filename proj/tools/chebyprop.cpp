// Command-line front end: single queries (JSON), ground-truth cache
// management, and the time-vs-error benchmark sweep (CSV).

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "chebyprop/bidirectional.hpp"
#include "chebyprop/error.hpp"
#include "chebyprop/eval.hpp"
#include "chebyprop/graph.hpp"
#include "chebyprop/kernels.hpp"
#include "chebyprop/solvers.hpp"

namespace {

using namespace chebyprop;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_double(const std::string& s, const char* what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParameterError(std::string("bad ") + what + " value \"" + s + "\"");
    return v;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string default_cache_dir() {
    if (const char* env = std::getenv("CHEBYPROP_CACHE_DIR")) return env;
    return "chebyprop-cache";
}

std::string dataset_name(const std::string& graph_path) {
    return std::filesystem::path(graph_path).stem().string();
}

// "uniform:10" / "topdeg:10" -> selected node list.
std::vector<NodeId> resolve_sources(const Graph& g, const std::string& spec,
                                    std::uint64_t seed) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw ParameterError("bad sources spec \"" + spec + "\" (want strategy:count)");
    const SourceStrategy strategy = parse_source_strategy(spec.substr(0, colon));
    const auto count = static_cast<std::size_t>(
        std::stoull(spec.substr(colon + 1)));
    return select_sources(g, strategy, count, seed);
}

struct QueryOptions {
    std::string graph_path;
    std::string kernel_spec;
    std::string algo_name;
    std::int64_t source = 0;
    std::string eps = "1e-5";
    std::string eps_a;
    std::string eps_r = "0.5";
    std::string delta;
    std::uint64_t walk_seed = 1;
    std::string out_path;
};

Estimate run_query(const Graph& g, const Kernel& kernel, Algorithm algo,
                   NodeId source, const QueryOptions& opt) {
    switch (algo) {
    case Algorithm::PwMethod: {
        const auto plan = plan_truncation(kernel, parse_double(opt.eps, "--eps"));
        return power_method(g, kernel, source, plan.taylor_steps);
    }
    case Algorithm::Push: {
        const double eps_a =
            opt.eps_a.empty() ? parse_double(opt.eps, "--eps") : parse_double(opt.eps_a, "--eps-a");
        const auto plan = plan_truncation(kernel, eps_a / 2.0);
        return push(g, kernel, source, plan.taylor_steps,
                    taylor_push_thresholds(kernel, plan.taylor_steps, eps_a / 2.0));
    }
    case Algorithm::ChebyPower: {
        const auto plan = plan_truncation(kernel, parse_double(opt.eps, "--eps"));
        return cheby_power(g, kernel, source, plan.cheby_steps);
    }
    case Algorithm::ChebyPush: {
        const double eps_a =
            opt.eps_a.empty() ? 1e-7 : parse_double(opt.eps_a, "--eps-a");
        const double trunc_eps =
            eps_a > 0.0 ? eps_a / 2.0 : parse_double(opt.eps, "--eps");
        const auto plan = plan_truncation(kernel, trunc_eps);
        return cheby_push(g, kernel, source, plan.cheby_steps, eps_a);
    }
    case Algorithm::ChebyPushRw: {
        if (kernel.family() != KernelFamily::Ppr)
            throw ParameterError("chebypush-rw computes SSPPR; use a ppr kernel");
        const double eps_r = parse_double(opt.eps_r, "--eps-r");
        const double delta = opt.delta.empty()
                                 ? 1.0 / static_cast<double>(g.node_count())
                                 : parse_double(opt.delta, "--delta");
        const auto cfg = RandomWalkConfig::plan(g.node_count(), kernel.alpha(),
                                                eps_r, delta, opt.walk_seed);
        const auto plan = plan_truncation(kernel, cfg.r_max);
        return cheby_push_rw(g, kernel.alpha(), source, cfg, plan.cheby_steps);
    }
    }
    throw ParameterError("unsupported algorithm");
}

int cmd_query(const QueryOptions& opt) {
    Algorithm algo;
    Kernel kernel = Kernel::ppr(0.2);
    try {
        algo = parse_algorithm(opt.algo_name);
        kernel = parse_kernel_spec(opt.kernel_spec);
    } catch (const ParameterError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    const Graph g = load_edge_list_file(opt.graph_path);
    if (opt.source < 0 || static_cast<std::uint64_t>(opt.source) >= g.node_count())
        throw ParameterError("source node out of range");
    const Estimate est = run_query(g, kernel, algo, static_cast<NodeId>(opt.source), opt);

    std::vector<NodeId> order(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u) order[u] = u;
    const std::size_t top_n = std::min<std::size_t>(50, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top_n),
                      order.end(), [&](NodeId a, NodeId b) {
                          if (est.values[a] != est.values[b])
                              return est.values[a] > est.values[b];
                          return a < b;
                      });

    nlohmann::json j;
    j["dataset"] = dataset_name(opt.graph_path);
    j["kernel"] = opt.kernel_spec;
    j["source"] = opt.source;
    j["stats"] = {{"algorithm", est.stats.algorithm},
                  {"params", est.stats.params},
                  {"iterations", est.stats.iterations},
                  {"push_work", est.stats.push_work},
                  {"walks", est.stats.walks},
                  {"wall_seconds", est.stats.wall_seconds}};
    auto& top = j["top"] = nlohmann::json::array();
    for (std::size_t i = 0; i < top_n; ++i) {
        const NodeId u = order[i];
        top.push_back({{"node", u}, {"value", est.values[u]}});
    }

    if (opt.out_path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::ofstream out(opt.out_path);
        if (!out) throw IoError("cannot open output file: " + opt.out_path);
        out << j.dump(2) << '\n';
    }
    return kExitOk;
}

struct TruthOptions {
    std::string graph_path;
    std::string kernel_spec;
    std::int64_t source = -1;
    std::string sources_spec;
    std::uint64_t seed = 1;
    std::string cache_dir = default_cache_dir();
};

int cmd_truth(const TruthOptions& opt) {
    Kernel kernel = Kernel::ppr(0.2);
    try {
        kernel = parse_kernel_spec(opt.kernel_spec);
    } catch (const ParameterError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    const Graph g = load_edge_list_file(opt.graph_path);

    std::vector<NodeId> sources;
    if (opt.source >= 0) {
        sources.push_back(static_cast<NodeId>(opt.source));
    } else if (!opt.sources_spec.empty()) {
        sources = resolve_sources(g, opt.sources_spec, opt.seed);
    } else {
        std::cerr << "usage error: truth needs --source or --sources\n";
        return kExitUsage;
    }

    for (NodeId s : sources) {
        bool cached = false;
        load_or_compute_truth(g, kernel, s, opt.cache_dir, &cached);
        std::cout << truth_cache_filename(g, kernel, s) << ' '
                  << (cached ? "cached" : "computed") << '\n';
    }
    return kExitOk;
}

struct BenchOptions {
    std::string graph_path;
    std::string kernel_spec;
    std::string sources_spec = "uniform:10";
    std::string eps_grid = "1e-3,1e-5,1e-7";
    std::string trunc_eps; // optional fixed truncation tolerance
    std::string algos = "pw,push,chebypower,chebypush";
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string cache_dir = default_cache_dir();
    std::string out_path;
};

struct BenchCell {
    Algorithm algo;
    NodeId source;
    std::string param_token;
    double param = 0.0;
};

Estimate run_bench_cell(const Graph& g, const Kernel& kernel, const BenchCell& cell,
                        const std::string& trunc_eps_token) {
    // pw / chebypower read the grid value as a truncation tolerance; push /
    // chebypush read it as eps_a, deriving the truncation from eps_a/2
    // unless --trunc-eps pins it.
    const bool fixed_trunc = !trunc_eps_token.empty();
    const double trunc_eps =
        fixed_trunc ? parse_double(trunc_eps_token, "--trunc-eps") : cell.param;
    switch (cell.algo) {
    case Algorithm::PwMethod:
        return power_method(g, kernel, cell.source,
                            plan_truncation(kernel, trunc_eps).taylor_steps);
    case Algorithm::ChebyPower:
        return cheby_power(g, kernel, cell.source,
                           plan_truncation(kernel, trunc_eps).cheby_steps);
    case Algorithm::Push: {
        const double budget = fixed_trunc ? trunc_eps : cell.param / 2.0;
        const std::size_t n_steps = plan_truncation(kernel, budget).taylor_steps;
        return push(g, kernel, cell.source, n_steps,
                    taylor_push_thresholds(kernel, n_steps, cell.param / 2.0));
    }
    case Algorithm::ChebyPush: {
        const double budget = fixed_trunc ? trunc_eps
                              : cell.param > 0.0 ? cell.param / 2.0
                                                 : 1e-5;
        const std::size_t steps = plan_truncation(kernel, budget).cheby_steps;
        return cheby_push(g, kernel, cell.source, steps, cell.param);
    }
    default:
        throw ParameterError("bench covers pw, push, chebypower, chebypush");
    }
}

int cmd_bench(const BenchOptions& opt) {
    Kernel kernel = Kernel::ppr(0.2);
    std::vector<Algorithm> algos;
    try {
        kernel = parse_kernel_spec(opt.kernel_spec);
        for (const auto& name : split_csv(opt.algos)) algos.push_back(parse_algorithm(name));
    } catch (const ParameterError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    const auto grid = split_csv(opt.eps_grid);
    if (grid.empty()) {
        std::cerr << "usage error: empty parameter grid\n";
        return kExitUsage;
    }

    const Graph g = load_edge_list_file(opt.graph_path);
    const auto sources = resolve_sources(g, opt.sources_spec, opt.seed);

    // Ground truths first, so benchmark cells only time the solver.
    std::vector<NodeVector> truths(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i)
        truths[i] = load_or_compute_truth(g, kernel, sources[i], opt.cache_dir).values;

    std::vector<BenchCell> cells;
    for (Algorithm a : algos)
        for (std::size_t si = 0; si < sources.size(); ++si)
            for (const auto& token : grid)
                cells.push_back({a, sources[si], token, parse_double(token, "grid value")});

    std::vector<std::string> rows(cells.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= cells.size()) return;
            const BenchCell& cell = cells[i];
            const auto ti = static_cast<std::size_t>(
                std::find(sources.begin(), sources.end(), cell.source) - sources.begin());
            const Estimate est = run_bench_cell(g, kernel, cell, opt.trunc_eps);
            const ErrorReport err = measure(truths[ti], est.values, g);
            std::ostringstream row;
            row << dataset_name(opt.graph_path) << ',' << algorithm_name(cell.algo) << ','
                << opt.kernel_spec << ',' << cell.source << ',' << cell.param_token << ','
                << format_double(err.l1) << ',' << format_double(err.l2) << ','
                << format_double(err.deg_norm_inf) << ','
                << format_double(est.stats.wall_seconds) << ',' << est.stats.iterations
                << ',' << est.stats.push_work;
            rows[i] = row.str();
        }
    };

    const unsigned n_threads = std::max(1u, opt.threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!opt.out_path.empty()) {
        file.open(opt.out_path);
        if (!file) throw IoError("cannot open output file: " + opt.out_path);
        out = &file;
    }
    *out << "dataset,algorithm,kernel,source,param,l1,l2,deg_norm_inf,"
            "wall_seconds,iterations,push_work\n";
    for (const auto& row : rows) *out << row << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-propagation vector computation (PPR, HKPR, custom kernels)"};
    app.require_subcommand(1);

    QueryOptions q;
    auto* query = app.add_subcommand("query", "Run one solver query and emit JSON");
    query->add_option("--graph", q.graph_path, "edge-list file")->required();
    query->add_option("--kernel", q.kernel_spec, "kernel spec, e.g. ppr:alpha=0.2")->required();
    query->add_option("--algo", q.algo_name,
                      "pw | push | chebypower | chebypush | chebypush-rw")->required();
    query->add_option("--source", q.source, "source node id")->required();
    query->add_option("--eps", q.eps, "truncation tolerance (pw/chebypower)");
    query->add_option("--eps-a", q.eps_a, "push threshold (push/chebypush)");
    query->add_option("--eps-r", q.eps_r, "relative error target (chebypush-rw)");
    query->add_option("--delta", q.delta, "significance threshold (default 1/n)");
    query->add_option("--alpha-walks-seed", q.walk_seed, "walk RNG seed");
    query->add_option("--out", q.out_path, "output path (default stdout)");

    TruthOptions t;
    auto* truth = app.add_subcommand("truth", "Generate ground-truth cache files");
    truth->add_option("--graph", t.graph_path, "edge-list file")->required();
    truth->add_option("--kernel", t.kernel_spec, "kernel spec")->required();
    truth->add_option("--source", t.source, "single source node");
    truth->add_option("--sources", t.sources_spec, "uniform:k | topdeg:k");
    truth->add_option("--seed", t.seed, "source selection seed");
    truth->add_option("--cache-dir", t.cache_dir, "cache directory");

    BenchOptions b;
    auto* bench = app.add_subcommand("bench", "Sweep the benchmark grid and emit CSV");
    bench->add_option("--graph", b.graph_path, "edge-list file")->required();
    bench->add_option("--kernel", b.kernel_spec, "kernel spec")->required();
    bench->add_option("--sources", b.sources_spec, "uniform:k | topdeg:k");
    bench->add_option("--eps", b.eps_grid, "comma-separated parameter grid");
    bench->add_option("--trunc-eps", b.trunc_eps,
                      "fixed truncation tolerance for all algorithms");
    bench->add_option("--algos", b.algos, "comma-separated algorithm list");
    bench->add_option("--seed", b.seed, "source selection seed");
    bench->add_option("--threads", b.threads, "worker threads");
    bench->add_option("--cache-dir", b.cache_dir, "truth cache directory");
    bench->add_option("--out", b.out_path, "output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
        if (query->parsed()) return cmd_query(q);
        if (truth->parsed()) return cmd_truth(t);
        if (bench->parsed()) return cmd_bench(b);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    } catch (const ParameterError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}
