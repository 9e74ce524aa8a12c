// gpbench: generate stimuli, query models, score and report.
// Exit codes: 0 ok, 1 user error, 2 upstream model failure.

#include "gpbench/pipeline.hpp"
#include "gpbench/prompts.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace gpbench;

namespace {

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

RunConfig resolve(const Globals& g) {
    if (g.config.empty()) throw UserError("--config is required");
    RunConfig cfg = load_config(g.config);
    if (g.seed) cfg.master_seed = *g.seed;
    if (g.out) cfg.output_dir = *g.out;
    return cfg;
}

int eval_exit(const EvalSummary& s) {
    if (s.failures.empty()) return 0;
    std::cerr << s.failures.size() << " queries failed; rerun eval to retry them\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graphical-perception benchmark harness"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "run config (JSON)");
    app.add_option("--seed", g.seed, "override master_seed");
    app.add_option("--out", g.out, "override output_dir");

    auto* gen = app.add_subcommand("gen", "generate datasets and manifests");
    auto* eval = app.add_subcommand("eval", "query every model on every test split");
    auto* bal = app.add_subcommand("balance", "parse, score and balance responses");
    auto* analyze = app.add_subcommand("analyze", "MLAE summaries, ANOVA and Tukey HSD");
    auto* report = app.add_subcommand("report", "SVG figures and markdown summary");
    auto* invalid = app.add_subcommand("invalid-report", "invalid responses by model and reason");
    auto* all = app.add_subcommand("run", "gen, eval, balance, analyze and report in order");
    auto* prompts = app.add_subcommand("prompts", "prompt registry");
    prompts->require_subcommand(1);
    auto* pexport = prompts->add_subcommand("export", "write every prompt template as JSON");
    std::string pexport_out;
    pexport->add_option("-o,--output", pexport_out, "file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (pexport->parsed()) {
            const std::string text = export_prompts().dump(2) + "\n";
            if (pexport_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream f(pexport_out);
                f << text;
                if (!f) throw UserError("cannot write " + pexport_out);
            }
            return 0;
        }
        const RunConfig cfg = resolve(g);
        std::cerr << "run directory " << cfg.run_dir().string() << "\n";
        if (gen->parsed()) cmd_gen(cfg, std::cerr);
        if (eval->parsed()) return eval_exit(cmd_eval(cfg, std::cerr));
        if (bal->parsed()) cmd_balance(cfg, std::cerr);
        if (analyze->parsed()) cmd_analyze(cfg, std::cerr);
        if (report->parsed()) cmd_report(cfg, std::cerr);
        if (invalid->parsed()) std::cout << invalid_report(cfg);
        if (all->parsed()) {
            cmd_gen(cfg, std::cerr);
            if (const int rc = eval_exit(cmd_eval(cfg, std::cerr)); rc != 0) return rc;
            cmd_balance(cfg, std::cerr);
            cmd_analyze(cfg, std::cerr);
            cmd_report(cfg, std::cerr);
        }
        return 0;
    } catch (const UserError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const EmptyBalanceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
