#include "doctest.h"

#include "gpbench/baselines.hpp"
#include "gpbench/pipeline.hpp"
#include "gpbench/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <unistd.h>

using namespace gpbench;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("gpbench_pl_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

json oracle(const std::string& id, json mode, std::uint64_t seed = 1) {
    return {{"id", id}, {"kind", "oracle"}, {"oracle", std::move(mode)}, {"oracle_seed", seed}};
}

json base_config(const fs::path& out, json models, json tasks) {
    return {{"models", std::move(models)},
            {"tasks", std::move(tasks)},
            {"master_seed", 12345},
            {"output_dir", out.string()},
            {"bootstrap_resamples", 2000},
            {"split_sizes", {{"train", 10}, {"val", 5}, {"test", 55}}}};
}

json five_models() {
    return json::array({oracle("perfect", {{"mode", "perfect"}}),
                        oracle("noisy1", {{"mode", "noisy"}, {"sigma", 1.0}}),
                        oracle("noisy5", {{"mode", "noisy"}, {"sigma", 5.0}}),
                        oracle("random", {{"mode", "random"}}),
                        oracle("flaky", {{"mode", "invalid"}, {"rate", 0.5}})});
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<json> jsonl(const fs::path& p) {
    std::vector<json> out;
    std::ifstream in(p);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(json::parse(line));
    return out;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

void run_all(const RunConfig& cfg, std::ostream& log) {
    cmd_gen(cfg, log);
    const auto ev = cmd_eval(cfg, log);
    REQUIRE(ev.failures.empty());
    cmd_balance(cfg, log);
    cmd_analyze(cfg, log);
    cmd_report(cfg, log);
}

const TukeyPair* find_pair(const TukeyResult& t, const std::string& a, const std::string& b) {
    for (const auto& p : t.pairs)
        if ((p.group_a == a && p.group_b == b) || (p.group_a == b && p.group_b == a)) return &p;
    return nullptr;
}

MetricSummary summary(const std::string& model, TaskId t, double mlae, double lo, double hi) {
    MetricSummary s;
    s.model_id = model;
    s.task = t;
    s.n = 165;
    s.mlae = mlae;
    s.ci_low = lo;
    s.ci_high = hi;
    return s;
}

}  // namespace

TEST_SUITE("orchestrator-cli") {

TEST_CASE("config parsing and hashing") {
    const json j = base_config("outA", json::array({oracle("p", "perfect")}), json::array({"E1/length", "E1/angle"}));
    const auto a = config_from_json(j);
    CHECK(a.models.size() == 1);
    CHECK(a.tasks.size() == 2);
    CHECK(a.runs_per_stimulus == 3);
    CHECK(a.concurrency == 4);
    CHECK(a.split_sizes.test == 55);
    CHECK(a.split_sizes.train == 10);
    CHECK(a.hash().size() == 16);
    CHECK(a.run_dir() == fs::path("outA") / a.hash());

    json moved = j;
    moved["output_dir"] = "elsewhere";
    moved["concurrency"] = 9;
    CHECK(config_from_json(moved).hash() == a.hash());
    json reseeded = j;
    reseeded["master_seed"] = 1;
    CHECK(config_from_json(reseeded).hash() != a.hash());
    json reordered = j;
    reordered["tasks"] = json::array({"E1/angle", "E1/length", "E1/angle"});
    CHECK(config_from_json(reordered).hash() == a.hash());

    json all = j;
    all.erase("tasks");
    CHECK(config_from_json(all).tasks.size() == 21);
    all["tasks"] = "all";
    CHECK(config_from_json(all).tasks.size() == 21);

    json bad = j;
    bad["tasks"] = json::array({"E9/nothing"});
    CHECK_THROWS_AS(config_from_json(bad), UserError);
    bad = j;
    bad["models"] = json::array({oracle("p", "perfect"), oracle("p", "random")});
    CHECK_THROWS_AS(config_from_json(bad), UserError);
    bad = j;
    bad["models"][0]["api_key"] = "sk-live";
    CHECK_THROWS_AS(config_from_json(bad), UserError);
    bad = j;
    bad["aggregate"] = "median";
    CHECK_THROWS_AS(config_from_json(bad), UserError);
    bad = j;
    bad["runs_per_stimulus"] = 0;
    CHECK_THROWS_AS(config_from_json(bad), UserError);
    bad = j;
    bad["models"] = json::array();
    CHECK_THROWS_AS(config_from_json(bad), UserError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), UserError);
}

TEST_CASE("five oracles on one task end to end") {
    TempDir dir("e2e");
    const auto cfg = config_from_json(base_config(dir.path, five_models(), json::array({"E1/length"})));
    std::ostringstream log;

    const auto g = cmd_gen(cfg, log);
    CHECK(g.generated == 1);
    const fs::path ds = cfg.run_dir() / "datasets" / "E1" / "length";
    CHECK(std::distance(fs::directory_iterator(ds / "test"), fs::directory_iterator{}) == 55);
    CHECK(std::distance(fs::directory_iterator(ds / "train"), fs::directory_iterator{}) == 10);
    CHECK(fs::exists(ds / "manifest.json"));

    const auto ev = cmd_eval(cfg, log);
    CHECK(ev.responses == 825);
    CHECK(ev.failures.empty());
    CHECK(jsonl(cfg.run_dir() / "responses.jsonl").size() == 825);
    CHECK(jsonl(cfg.run_dir() / "journal.jsonl").size() == 825);

    cmd_balance(cfg, log);
    std::map<std::string, int> invalid, total;
    for (const auto& t : jsonl(cfg.run_dir() / "trials.jsonl")) {
        ++total[t.at("model_id")];
        invalid[t.at("model_id")] += !t.at("valid").get<bool>();
    }
    for (const auto& [m, n] : total) CHECK(n == 165);
    CHECK(invalid["perfect"] == 0);
    CHECK(invalid["random"] == 0);
    CHECK(invalid["noisy5"] == 0);
    // Binomial(165, 0.5): mean 82.5, sd 6.42.
    CHECK(std::abs(invalid["flaky"] - 82.5) <= 3 * std::sqrt(165 * 0.25));
    std::map<std::string, int> balanced;
    for (const auto& t : jsonl(cfg.run_dir() / "balanced.jsonl")) ++balanced[t.at("model_id")];
    CHECK(balanced.size() == 5);
    for (const auto& [m, n] : balanced) CHECK(n == 165 - invalid["flaky"]);

    const auto an = cmd_analyze(cfg, log);
    REQUIRE(an.summaries.size() == 5);
    for (const auto& s : an.summaries) {
        CHECK(s.ci_low <= s.mlae);
        CHECK(s.mlae <= s.ci_high);
        if (s.model_id == "perfect" || s.model_id == "flaky") {
            CHECK(s.mlae == -3.0);
            CHECK(s.ci_low == -3.0);
            CHECK(s.ci_high == -3.0);
        }
    }
    const std::string csv = slurp(cfg.run_dir() / "summary.csv");
    CHECK(count_lines(csv) == 1 + 5);
    CHECK(csv.rfind("model,task,n,mlae,mlae_sd,mae,mse,ci_low,ci_high,bootstrap_resamples,seed\n", 0) == 0);

    REQUIRE(an.experiments.size() == 1);
    const auto& e1 = an.experiments[0];
    REQUIRE(e1.anova);
    REQUIRE(e1.tukey);
    CHECK(e1.anova->p_value < 0.01);
    CHECK(e1.tukey->pairs.size() == 10);
    const auto* pr = find_pair(*e1.tukey, "perfect", "random");
    REQUIRE(pr);
    CHECK(pr->significant);
    const auto* pf = find_pair(*e1.tukey, "perfect", "flaky");
    REQUIRE(pf);
    CHECK_FALSE(pf->significant);
    CHECK(slurp(cfg.run_dir() / "tukey.csv").find("perfect,random") != std::string::npos);

    cmd_report(cfg, log);
    const std::string svg = slurp(cfg.run_dir() / "figures" / "E1.svg");
    CHECK(svg.find("data-task=\"E1/length\"") != std::string::npos);
    CHECK(!fs::exists(cfg.run_dir() / "figures" / "E2.svg"));
    CHECK(fs::exists(cfg.run_dir() / "report.md"));

    const std::string inv = invalid_report(cfg);
    CHECK(inv.find("flaky") != std::string::npos);
    CHECK(inv.find("no_numeric") != std::string::npos);

    const auto back = read_summary_json(cfg.run_dir() / "summary.json");
    REQUIRE(back.size() == an.summaries.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].model_id == an.summaries[i].model_id);
        CHECK(back[i].mlae == an.summaries[i].mlae);
        CHECK(back[i].ci_high == an.summaries[i].ci_high);
    }

    SUBCASE("a second eval is served from the cache") {
        std::ostringstream quiet;
        const auto again = cmd_eval(cfg, quiet);
        CHECK(again.responses == 825);
        CHECK(again.cache_hits == 825);
        CHECK(jsonl(cfg.run_dir() / "journal.jsonl").size() == 825);
    }
    SUBCASE("an identical run elsewhere is byte-identical") {
        TempDir other("e2e_twin");
        json j = base_config(other.path, five_models(), json::array({"E1/length"}));
        j["concurrency"] = 1;
        const auto twin = config_from_json(j);
        CHECK(twin.hash() == cfg.hash());
        std::ostringstream quiet;
        run_all(twin, quiet);
        for (std::string f : {"summary.csv", "summary.json", "anova.csv", "tukey.csv", "report.md", "figures/E1.svg"})
            CHECK_MESSAGE(slurp(twin.run_dir() / f) == slurp(cfg.run_dir() / f), f);
        // trial files carry measured latency; everything else must match
        for (std::string f : {"trials.jsonl", "balanced.jsonl"}) {
            auto a = jsonl(twin.run_dir() / f), b = jsonl(cfg.run_dir() / f);
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                a[i]["raw"].erase("latency_ms");
                b[i]["raw"].erase("latency_ms");
                CHECK_MESSAGE(a[i] == b[i], f);
            }
        }
    }
}

TEST_CASE("identical oracle configurations are not told apart") {
    TempDir dir("twins");
    json models = json::array({oracle("twinA", {{"mode", "noisy"}, {"sigma", 2.0}}, 7),
                               oracle("twinB", {{"mode", "noisy"}, {"sigma", 2.0}}, 7)});
    const auto cfg = config_from_json(base_config(dir.path, models, json::array({"E1/angle"})));
    std::ostringstream log;
    run_all(cfg, log);
    const auto an = cmd_analyze(cfg, log);
    REQUIRE(an.experiments.size() == 1);
    REQUIRE(an.experiments[0].tukey);
    REQUIRE(an.experiments[0].tukey->pairs.size() == 1);
    CHECK_FALSE(an.experiments[0].tukey->pairs[0].significant);
}

TEST_CASE("csv rows = models x tasks") {
    TempDir dir("grid");
    json models = json::array({oracle("a", "perfect"), oracle("b", {{"mode", "noisy"}, {"sigma", 0.5}}),
                               oracle("c", "random")});
    json j = base_config(dir.path, models, json::array({"E2/pie", "E4/framed", "E5/base100"}));
    j["runs_per_stimulus"] = 1;
    const auto cfg = config_from_json(j);
    std::ostringstream log;
    run_all(cfg, log);
    CHECK(count_lines(slurp(cfg.run_dir() / "summary.csv")) == 1 + 9);
    CHECK(count_lines(slurp(cfg.run_dir() / "anova.csv")) == 1 + 3);
    for (const char* e : {"E2", "E4", "E5"}) CHECK(fs::exists(cfg.run_dir() / "figures" / (std::string(e) + ".svg")));
    const std::string e4 = slurp(cfg.run_dir() / "figures" / "E4.svg");
    CHECK(e4.find("class=\"human\" data-mlae=\"3.371\"") != std::string::npos);
    CHECK(e4.find("class=\"human\" data-mlae=\"3.961\"") == std::string::npos);  // unframed not run
}

TEST_CASE("gen is idempotent") {
    TempDir dir("idem");
    const auto cfg = config_from_json(base_config(dir.path, json::array({oracle("p", "perfect")}),
                                                  json::array({"E1/shading", "E3/type2"})));
    std::ostringstream log;
    const auto first = cmd_gen(cfg, log);
    CHECK(first.generated == 2);
    const auto stamp = fs::last_write_time(cfg.run_dir() / "datasets" / "E1" / "shading" / "manifest.json");
    const auto second = cmd_gen(cfg, log);
    CHECK(second.generated == 0);
    CHECK(second.skipped == 2);
    CHECK(fs::last_write_time(cfg.run_dir() / "datasets" / "E1" / "shading" / "manifest.json") == stamp);

    fs::remove(cfg.run_dir() / "datasets" / "E3" / "type2" / "manifest.json");
    const auto third = cmd_gen(cfg, log);
    CHECK(third.generated == 1);
    CHECK(third.skipped == 1);
}

TEST_CASE("stages run in order") {
    TempDir dir("order");
    const auto cfg = config_from_json(base_config(dir.path, json::array({oracle("p", "perfect"), oracle("r", "random")}),
                                                  json::array({"E1/length"})));
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_eval(cfg, log), UserError);
    CHECK_THROWS_AS(cmd_balance(cfg, log), UserError);
    CHECK_THROWS_AS(cmd_report(cfg, log), UserError);
    cmd_gen(cfg, log);
    CHECK_THROWS_AS(cmd_analyze(cfg, log), UserError);
    cmd_eval(cfg, log);
    cmd_balance(cfg, log);
    cmd_analyze(cfg, log);
    cmd_report(cfg, log);
    const json run = json::parse(slurp(cfg.run_dir() / "run.json"));
    CHECK(run.at("config_hash") == cfg.hash());
    for (const char* s : {"gen", "eval", "balance", "analyze", "report"}) CHECK(run.at("stages").at(s).at("completed").is_string());
    // Regenerating invalidates everything downstream.
    fs::remove(cfg.run_dir() / "datasets" / "E1" / "length" / "manifest.json");
    cmd_gen(cfg, log);
    CHECK_THROWS_AS(cmd_balance(cfg, log), UserError);
}

TEST_CASE("a model with no valid answers fails balancing") {
    TempDir dir("empty");
    const auto cfg = config_from_json(base_config(
        dir.path, json::array({oracle("p", "perfect"), oracle("mute", {{"mode", "invalid"}, {"rate", 1.0}})}),
        json::array({"E1/angle"})));
    std::ostringstream log;
    cmd_gen(cfg, log);
    cmd_eval(cfg, log);
    CHECK_THROWS_AS(cmd_balance(cfg, log), EmptyBalanceError);
}

TEST_CASE("svg rendering") {
    const std::vector<MetricSummary> rows{summary("perfect", TaskId::Framed, -3.0, -3.0, -3.0),
                                          summary("guess", TaskId::Framed, 2.5, 2.25, 2.75),
                                          summary("guess", TaskId::Unframed, 3.0, 2.5, 3.5)};
    const std::string a = render_experiment_svg(Experiment::E4, rows);
    CHECK(a == render_experiment_svg(Experiment::E4, rows));
    CHECK(a.find("class=\"human\" data-mlae=\"3.371\" data-low=\"2.630\" data-high=\"4.112\"") != std::string::npos);
    CHECK(a.find("class=\"human\" data-mlae=\"3.961\"") != std::string::npos);
    CHECK(a.find("#e6e6e6") != std::string::npos);

    // The perfect row's CI line has x1 == x2.
    const std::regex row(
        R"re(<g class="model" data-mlae="-3.000" data-low="-3.000" data-high="-3.000">.*?<line x1="([0-9.]+)" y1="[0-9.]+" x2="([0-9.]+)")re");
    std::smatch m;
    REQUIRE(std::regex_search(a, m, row));
    CHECK(m[1].str() == m[2].str());
    const std::regex wide(
        R"re(<g class="model" data-mlae="2.500" data-low="2.250" data-high="2.750">.*?<line x1="([0-9.]+)" y1="[0-9.]+" x2="([0-9.]+)")re");
    REQUIRE(std::regex_search(a, m, wide));
    CHECK(std::stod(m[2].str()) > std::stod(m[1].str()));

    CHECK(render_experiment_svg(Experiment::E1, rows).find("class=\"panel\"") == std::string::npos);
    const std::string md = render_markdown(rows);
    CHECK(md.find("| E4/framed | perfect | 165 | -3.000 |") != std::string::npos);
    CHECK(md.find("| E4/unframed | study-a | 3.961 | 0.454 |") != std::string::npos);
}

TEST_CASE("human baseline table") {
    struct Pin {
        TaskId t;
        double mlae, sd;
    };
    const std::vector<Pin> pins{{TaskId::Angle, 3.22, 0.54},     {TaskId::Area, 3.64, 0.38},
                                {TaskId::Volume, 5.18, 0.40},    {TaskId::Bar, 1.035, 0.115},
                                {TaskId::Pie, 2.05, 0.125},      {TaskId::Framed, 3.371, 0.741},
                                {TaskId::Unframed, 3.961, 0.454}, {TaskId::Base10, 4.0149, 0.5338},
                                {TaskId::Base100, 5.3891, 0.1945}, {TaskId::Base1000, 5.4612, 0.2509}};
    for (const auto& p : pins) {
        INFO(task_name(p.t));
        const auto b = baselines_for(p.t);
        REQUIRE(b.size() == 1);
        CHECK(b[0].mlae == p.mlae);
        CHECK(b[0].sd == p.sd);
    }
    // E3: the quoted range endpoints, two sources.
    std::set<double> e3;
    for (TaskId t : tasks_of(Experiment::E3))
        for (const auto& b : baselines_for(t)) e3.insert(b.mlae);
    CHECK(e3 == std::set<double>{1.4, 2.72, 1.25, 2.24});
    CHECK(baselines_for(TaskId::Length).empty());
    CHECK(baselines_for(TaskId::Type3).empty());
}

}  // TEST_SUITE
