// Command-line front end: summarize, query, evaluate, distsim, generate, stats.
// Exit codes: 0 ok, 2 input/parse error, 3 infeasible budget, 4 invalid params.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pegasus/distributed.hpp"
#include "pegasus/engine.hpp"
#include "pegasus/graph.hpp"
#include "pegasus/metrics.hpp"
#include "pegasus/query.hpp"
#include "pegasus/summary.hpp"
#include "pegasus/weights.hpp"

using json = nlohmann::json;
using namespace pegasus;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitBudget = 3;
constexpr int kExitParams = 4;

std::uint64_t env_or(const char* name, std::uint64_t fallback) {
    if (const char* v = std::getenv(name)) return std::strtoull(v, nullptr, 10);
    return fallback;
}

struct GlobalOpts {
    std::uint64_t seed = env_or("PEGASUS_SEED", 0);
    std::uint64_t threads = env_or("PEGASUS_THREADS", 1);
};

struct TargetOpts {
    std::string file;
    bool all = false;
    std::uint64_t sample = 0;

    void attach(CLI::App* cmd) {
        auto* f = cmd->add_option("--targets", file, "target node file, one id per line");
        auto* a = cmd->add_flag("--targets-all", all, "use every node as a target");
        auto* s = cmd->add_option("--targets-sample", sample, "sample N targets uniformly");
        f->excludes(a)->excludes(s);
        a->excludes(s);
    }

    TargetSet resolve(const Graph& g, std::uint64_t seed) const {
        if (!file.empty()) return TargetSet::from_file(file, g.node_count());
        if (sample > 0) return TargetSet::sample(g.node_count(), static_cast<node_t>(sample), seed);
        if (all) return TargetSet::all(g.node_count());
        throw parameter_error("no target set given (--targets / --targets-all / --targets-sample)");
    }

    std::string describe() const {
        if (!file.empty()) return "file:" + file;
        if (sample > 0) return "sample:" + std::to_string(sample);
        return "all";
    }
};

struct BudgetOpts {
    double ratio = 0.0;
    double bits = 0.0;

    void attach(CLI::App* cmd) {
        auto* r = cmd->add_option("--budget-ratio", ratio, "budget as a fraction of the input size");
        auto* b = cmd->add_option("--budget-bits", bits, "budget in bits");
        r->excludes(b);
    }

    double resolve(const Graph& g) const {
        if (bits > 0.0) return bits;
        if (ratio > 0.0) return ratio * graph_size_bits(g);
        throw parameter_error("no budget given (--budget-ratio or --budget-bits)");
    }
};

Graph load_graph(const std::string& path, bool preprocess = true) {
    return load_edge_list(path, preprocess).graph;
}

void write_text(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write output: " + path);
    out << body;
}

json config_json(const GlobalOpts& global, const EngineConfig& cfg) {
    return json{{"seed", global.seed},    {"threads", global.threads},
                {"alpha", cfg.alpha},     {"beta", cfg.beta},
                {"iters", cfg.max_iterations}, {"budget_bits", cfg.budget_bits},
                {"group_cap", cfg.group_cap},  {"shingle_rounds", cfg.shingle_rounds},
                {"theta_init", cfg.theta_init}};
}

std::string answer_tsv(const AnswerVector& ans, std::size_t top) {
    std::ostringstream out;
    out.precision(12);
    if (top == 0) {
        for (node_t v = 0; v < ans.values.size(); ++v)
            out << v << '\t' << ans.values[v] << '\n';
    } else {
        std::vector<node_t> order(ans.values.size());
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(), [&](node_t a, node_t b) {
            return ans.values[a] > ans.values[b];
        });
        for (std::size_t i = 0; i < std::min(top, order.size()); ++i)
            out << order[i] << '\t' << ans.values[order[i]] << '\n';
    }
    return out.str();
}

std::vector<QueryKind> parse_kinds(const std::vector<std::string>& names) {
    std::vector<QueryKind> kinds;
    for (const auto& n : names) kinds.push_back(parse_query_kind(n));
    return kinds;
}

// --------------------------------------------------------------------------

int cmd_generate(const GlobalOpts& global, const std::string& model, std::uint64_t n,
                 std::uint64_t m, std::uint64_t k, double p, const std::string& out) {
    Graph g;
    if (model == "ba")
        g = generate_ba(static_cast<node_t>(n), static_cast<node_t>(m), global.seed);
    else if (model == "ws")
        g = generate_ws(static_cast<node_t>(n), static_cast<node_t>(k), p, global.seed);
    else
        throw parameter_error("unknown model: " + model + " (expected ba or ws)");
    std::ostringstream body;
    body << "# model=" << model << " n=" << n << (model == "ba" ? " m=" : " k=")
         << (model == "ba" ? m : k);
    if (model == "ws") body << " p=" << p;
    body << " seed=" << global.seed << '\n';
    for (auto [u, v] : g.edges()) body << u << ' ' << v << '\n';
    write_text(out, body.str());
    return kExitOk;
}

int cmd_stats(const GlobalOpts& global, const std::string& input, bool raw) {
    auto g = load_graph(input, !raw);
    json out{{"nodes", g.node_count()},
             {"edges", g.edge_count()},
             {"size_bits", graph_size_bits(g)},
             {"config", {{"input", input}, {"preprocess", !raw}, {"seed", global.seed}}}};
    if (g.connected()) out["effective_diameter_90"] = effective_diameter(g, 0.9, global.seed);
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

int cmd_summarize(const GlobalOpts& global, const std::string& input, const TargetOpts& targets,
                  const BudgetOpts& budget, EngineConfig cfg, bool audit, const std::string& out,
                  const std::string& report_path) {
    auto g = load_graph(input);
    cfg.seed = global.seed;
    cfg.audit = audit;
    cfg.budget_bits = budget.resolve(g);
    auto t = targets.resolve(g, global.seed);
    auto res = summarize(g, t, cfg);
    if (!out.empty()) save_pgs(res.summary, out);

    json report{{"config", config_json(global, cfg)},
                {"input", input},
                {"targets", targets.describe()},
                {"output", out},
                {"iterations_used", res.report.iterations_used},
                {"final_size_bits", res.report.final_size_bits},
                {"budget_bits", res.report.budget_bits},
                {"merges", res.report.merges},
                {"sparsified_superedges", res.report.sparsified_superedges},
                {"theta_trace", res.report.theta_trace},
                {"compression_rate", compression_rate(res.summary, g)},
                {"personalized_error", res.re_total},
                {"wall_ms", res.report.wall_ms}};
    if (audit) {
        json log = json::array();
        for (const auto& rec : res.report.merge_log)
            log.push_back({{"a", rec.a}, {"b", rec.b}, {"rel_delta", rec.rel_delta},
                           {"theta", rec.theta_in_force}});
        report["merge_log"] = std::move(log);
        report["rejected_list_sizes"] = res.report.rejected_list_sizes;
    }
    write_text(report_path, report.dump(2) + "\n");
    return kExitOk;
}

int cmd_query(const std::string& input, const std::string& summary_path, bool exact,
              const std::string& type, std::uint64_t node, std::uint64_t top,
              const std::string& out) {
    QueryKind kind = parse_query_kind(type);
    AnswerVector ans;
    if (exact || summary_path.empty()) {
        auto g = load_graph(input);
        ans = run_query_on_blocks(detail::make_blocks(g), kind, static_cast<node_t>(node));
    } else {
        auto s = load_pgs(summary_path);
        ans = run_query_on_blocks(detail::make_blocks(s), kind, static_cast<node_t>(node));
    }
    if (!ans.converged) std::cerr << "warning: iteration cap reached before convergence\n";
    write_text(out, answer_tsv(ans, top));
    return kExitOk;
}

int cmd_evaluate(const GlobalOpts& global, const std::string& input,
                 const std::vector<std::string>& summary_paths, std::uint64_t query_sample,
                 const std::string& query_file, const std::vector<std::string>& kind_names,
                 double alpha, double beta, double budget_ratio, const std::string& out) {
    auto g = load_graph(input);
    std::vector<node_t> query_nodes;
    if (!query_file.empty())
        query_nodes = TargetSet::from_file(query_file, g.node_count()).nodes;
    else if (query_sample > 0)
        query_nodes =
            TargetSet::sample(g.node_count(), static_cast<node_t>(query_sample), global.seed).nodes;

    std::vector<SummaryGraph> loaded;
    loaded.reserve(summary_paths.size());
    std::vector<std::pair<std::string, const SummaryGraph*>> summaries;
    for (const auto& p : summary_paths) loaded.push_back(load_pgs(p));
    for (std::size_t i = 0; i < loaded.size(); ++i) summaries.emplace_back(summary_paths[i], &loaded[i]);

    auto t0 = std::chrono::steady_clock::now();
    auto table = run_query_accuracy_experiment(g, summaries, query_nodes, parse_kinds(kind_names));
    double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    std::ostringstream body;
    for (const auto& row : table) {
        json line{{"dataset", input},
                  {"summary", row.summary_label},
                  {"seed", global.seed},
                  {"alpha", alpha},
                  {"beta", beta},
                  {"budget_ratio", budget_ratio},
                  {"kind", to_string(row.kind)},
                  {"smape_sum", row.smape_sum},
                  {"smape_mean", row.smape_mean},
                  {"spearman", row.spearman},
                  {"compression_rate", row.compression_rate},
                  {"query_count", row.query_count},
                  {"failed_queries", row.failed_queries},
                  {"wall_ms", wall_ms}};
        body << line.dump() << '\n';
    }
    write_text(out, body.str());
    return kExitOk;
}

int cmd_distsim(const GlobalOpts& global, const std::string& scenario_path,
                const std::string& out, const std::string& outdir) {
    std::ifstream in(scenario_path);
    if (!in) throw parse_error("cannot open scenario: " + scenario_path);
    json sc;
    try {
        sc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw parse_error(scenario_path + ": " + e.what());
    }

    auto g = load_graph(sc.at("graph").get<std::string>());
    std::size_t m = sc.at("machines").get<std::size_t>();
    std::uint64_t seed = sc.value("seed", global.seed);
    auto method = parse_partition_method(sc.value("method", std::string("label_propagation")));
    double k = sc.contains("budget_bits") ? sc["budget_bits"].get<double>()
                                          : sc.at("budget_ratio").get<double>() * graph_size_bits(g);

    EngineConfig cfg;
    cfg.seed = seed;
    cfg.alpha = sc.value("alpha", cfg.alpha);
    cfg.beta = sc.value("beta", cfg.beta);
    cfg.max_iterations = sc.value("iters", cfg.max_iterations);

    auto parts = partition(g, m, method, seed);

    std::vector<node_t> query_nodes;
    if (sc.contains("queries") && sc["queries"].contains("nodes"))
        for (auto& q : sc["queries"]["nodes"]) query_nodes.push_back(q.get<node_t>());
    else
        query_nodes = TargetSet::sample(
                          g.node_count(),
                          static_cast<node_t>(sc.value("/queries/sample"_json_pointer, 20)), seed)
                          .nodes;
    auto kinds = parse_kinds(sc.value("kinds", std::vector<std::string>{"rwr"}));
    std::vector<std::string> wanted =
        sc.value("deployments", std::vector<std::string>{"summary", "subgraph"});

    std::ostringstream body;
    json manifest{{"m", m}, {"k_bits", k}, {"method", method == PartitionMethod::louvain
                                                           ? "louvain"
                                                           : "label_propagation"},
                  {"seed", seed},  {"config", config_json(global, cfg)}};

    for (const auto& flavor : wanted) {
        Deployment dep = flavor == "summary" ? build_deployment_summaries(g, parts, k, cfg)
                         : flavor == "subgraph"
                             ? build_deployment_subgraphs(g, parts, k)
                             : throw parameter_error("unknown deployment kind: " + flavor);

        if (!outdir.empty()) {
            std::filesystem::create_directories(outdir);
            json files = json::array();
            for (std::size_t i = 0; i < dep.payloads.size(); ++i) {
                std::string name = flavor + "_m" + std::to_string(i) +
                                   (dep.payloads[i].summary ? ".pgs" : ".tsv");
                std::string path = (std::filesystem::path(outdir) / name).string();
                if (dep.payloads[i].summary)
                    save_pgs(*dep.payloads[i].summary, path);
                else
                    save_edge_list(*dep.payloads[i].subgraph, path);
                files.push_back(name);
            }
            manifest["payloads_" + flavor] = files;
        }

        std::vector<std::pair<node_t, QueryKind>> qs;
        for (QueryKind kind : kinds)
            for (node_t q : query_nodes) qs.emplace_back(q, kind);
        auto t0 = std::chrono::steady_clock::now();
        auto results = answer_multi(dep, qs);
        double wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();

        for (QueryKind kind : kinds) {
            double smape_sum = 0.0, smape_mean = 0.0, spear = 0.0;
            std::size_t answered = 0, unanswerable = 0, spear_ok = 0;
            for (const auto& r : results) {
                if (r.kind != kind) continue;
                auto truth = run_query_on_blocks(detail::make_blocks(g), kind, r.query_node);
                if (!r.answered) {
                    ++unanswerable;
                    smape_mean += 1.0;  // worst case, not dropped
                    smape_sum += static_cast<double>(g.node_count());
                    continue;
                }
                auto sm = smape(truth.values, r.answer.values);
                smape_sum += sm.sum;
                smape_mean += sm.mean;
                try {
                    spear += spearman(truth.values, r.answer.values);
                    ++spear_ok;
                } catch (const parameter_error&) {
                }
                ++answered;
            }
            double qn = static_cast<double>(answered + unanswerable);
            json line{{"dataset", sc.at("graph").get<std::string>()},
                      {"deployment", flavor},
                      {"machines", m},
                      {"k_bits", k},
                      {"seed", seed},
                      {"alpha", cfg.alpha},
                      {"beta", cfg.beta},
                      {"kind", to_string(kind)},
                      {"smape_sum", qn > 0 ? smape_sum / qn : 0.0},
                      {"smape_mean", qn > 0 ? smape_mean / qn : 0.0},
                      {"spearman", spear_ok > 0 ? spear / static_cast<double>(spear_ok) : 0.0},
                      {"query_count", answered + unanswerable},
                      {"unanswerable", unanswerable},
                      {"wall_ms", wall_ms}};
            body << line.dump() << '\n';
        }
    }

    if (!outdir.empty()) {
        std::ostringstream routing;
        std::vector<std::size_t> route(g.node_count(), 0);
        for (std::size_t i = 0; i < parts.size(); ++i)
            for (node_t u : parts[i]) route[u] = i;
        for (node_t u = 0; u < g.node_count(); ++u) routing << u << '\t' << route[u] << '\n';
        write_text((std::filesystem::path(outdir) / "routing.tsv").string(), routing.str());
        manifest["routing"] = "routing.tsv";
        write_text((std::filesystem::path(outdir) / "manifest.json").string(),
                   manifest.dump(2) + "\n");
    }
    write_text(out, body.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"personalized graph summarization toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // let --seed / --threads appear after the subcommand
    GlobalOpts global;
    app.add_option("--seed", global.seed, "root seed for all randomness");
    app.add_option("--threads", global.threads, "worker threads for experiment fan-out");

    // generate
    auto* gen = app.add_subcommand("generate", "emit a synthetic edge list");
    std::string gen_model = "ba", gen_out = "-";
    std::uint64_t gen_n = 1000, gen_m = 5, gen_k = 10;
    double gen_p = 0.1;
    gen->add_option("--model", gen_model, "ba or ws");
    gen->add_option("--n", gen_n, "node count");
    gen->add_option("--m", gen_m, "edges per new node (ba)");
    gen->add_option("--k", gen_k, "ring degree (ws)");
    gen->add_option("--p", gen_p, "rewiring probability (ws)");
    gen->add_option("-o,--output", gen_out, "output path (default stdout)");

    // stats
    auto* stats = app.add_subcommand("stats", "print graph statistics");
    std::string stats_in;
    bool stats_raw = false;
    stats->add_option("-i,--input", stats_in, "edge-list path")->required();
    stats->add_flag("--raw", stats_raw, "skip preprocessing");

    // summarize
    auto* sum = app.add_subcommand("summarize", "build a personalized summary");
    std::string sum_in, sum_out, sum_report = "-";
    TargetOpts sum_targets;
    BudgetOpts sum_budget;
    EngineConfig sum_cfg;
    bool sum_audit = false;
    sum->add_option("-i,--input", sum_in, "edge-list path")->required();
    sum->add_option("-o,--output", sum_out, "summary output path (PGS v1)");
    sum->add_option("--report", sum_report, "run-report path (default stdout)");
    sum_targets.attach(sum);
    sum_budget.attach(sum);
    sum->add_option("--alpha", sum_cfg.alpha, "personalization degree (>= 1)");
    sum->add_option("--beta", sum_cfg.beta, "threshold adaptation quantile in (0,1)");
    sum->add_option("--iters", sum_cfg.max_iterations, "maximum merge iterations");
    sum->add_flag("--audit", sum_audit, "embed the merge/threshold audit log");

    // query
    auto* qry = app.add_subcommand("query", "answer a node-similarity query");
    std::string qry_in, qry_summary, qry_type = "rwr", qry_out = "-";
    std::uint64_t qry_node = 0, qry_top = 0;
    bool qry_exact = false;
    qry->add_option("-i,--input", qry_in, "edge-list path (oracle / fallback)");
    qry->add_option("-s,--summary", qry_summary, "summary path (PGS v1)");
    qry->add_option("--type", qry_type, "rwr, hop, or php");
    qry->add_option("--node", qry_node, "query node id")->required();
    qry->add_option("--top", qry_top, "emit only the K best-scoring nodes");
    qry->add_flag("--exact", qry_exact, "force the raw-graph oracle path");
    qry->add_option("-o,--output", qry_out, "output path (default stdout)");

    // evaluate
    auto* eva = app.add_subcommand("evaluate", "score summaries against the input graph");
    std::string eva_in, eva_qfile, eva_out = "-";
    std::vector<std::string> eva_summaries, eva_kinds{"rwr", "hop", "php"};
    std::uint64_t eva_qsample = 0;
    double eva_alpha = 1.25, eva_beta = 0.1, eva_ratio = 0.0;
    eva->add_option("-i,--input", eva_in, "edge-list path")->required();
    eva->add_option("--summary", eva_summaries, "summary paths to score")->required();
    eva->add_option("--queries", eva_qfile, "query node file");
    eva->add_option("--queries-sample", eva_qsample, "sample N query nodes");
    eva->add_option("--kinds", eva_kinds, "query kinds to run");
    eva->add_option("--alpha", eva_alpha, "tag: alpha the summaries were built with");
    eva->add_option("--beta", eva_beta, "tag: beta the summaries were built with");
    eva->add_option("--budget-ratio", eva_ratio, "tag: budget ratio of the summaries");
    eva->add_option("-o,--output", eva_out, "JSON-lines output (default stdout)");

    // distsim
    auto* dis = app.add_subcommand("distsim", "simulate a multi-machine deployment");
    std::string dis_scenario, dis_out = "-", dis_outdir;
    dis->add_option("--scenario", dis_scenario, "scenario JSON")->required();
    dis->add_option("-o,--output", dis_out, "JSON-lines output (default stdout)");
    dis->add_option("--outdir", dis_outdir, "directory for payload files and the manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    try {
        if (gen->parsed())
            return cmd_generate(global, gen_model, gen_n, gen_m, gen_k, gen_p, gen_out);
        if (stats->parsed()) return cmd_stats(global, stats_in, stats_raw);
        if (sum->parsed())
            return cmd_summarize(global, sum_in, sum_targets, sum_budget, sum_cfg, sum_audit,
                                 sum_out, sum_report);
        if (qry->parsed())
            return cmd_query(qry_in, qry_summary, qry_exact, qry_type, qry_node, qry_top, qry_out);
        if (eva->parsed())
            return cmd_evaluate(global, eva_in, eva_summaries, eva_qsample, eva_qfile, eva_kinds,
                                eva_alpha, eva_beta, eva_ratio, eva_out);
        if (dis->parsed()) return cmd_distsim(global, dis_scenario, dis_out, dis_outdir);
    } catch (const budget_infeasible_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBudget;
    } catch (const parameter_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParams;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const empty_graph_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const disconnected_graph_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}
