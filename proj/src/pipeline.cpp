#include "gpbench/pipeline.hpp"

#include "gpbench/hashing.hpp"
#include "gpbench/image_codec.hpp"
#include "gpbench/numfmt.hpp"
#include "gpbench/prompts.hpp"
#include "gpbench/report.hpp"

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace gpbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<const char*, 5> kStages{"gen", "eval", "balance", "analyze", "report"};

std::string now_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_text(const fs::path& file, const std::string& text) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    auto tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out) throw std::runtime_error("cannot write " + file.string());
    }
    fs::rename(tmp, file);
}

void write_bytes(const fs::path& file, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cannot write " + file.string());
}

json read_json(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw UserError("missing " + file.string());
    return json::parse(in);
}

std::vector<json> read_jsonl(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw UserError("missing " + file.string());
    std::vector<json> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(json::parse(line));
    return out;
}

fs::path dataset_dir(const RunConfig& cfg, TaskId t) { return cfg.run_dir() / "datasets" / task_name(t); }

// run.json: config, per-stage completion markers, artifact paths.
class RunManifest {
public:
    explicit RunManifest(const RunConfig& cfg) : file_(cfg.run_dir() / "run.json") {
        if (fs::exists(file_)) {
            j_ = read_json(file_);
        } else {
            j_ = {{"config_hash", cfg.hash()}, {"config", cfg.canonical_json()}, {"created", now_utc()},
                  {"stages", json::object()}};
        }
    }

    bool done(const std::string& stage) const {
        return j_["stages"].contains(stage) && j_["stages"][stage].contains("completed");
    }

    void require(const std::string& stage) const {
        const auto it = std::find(kStages.begin(), kStages.end(), stage);
        if (it == kStages.begin()) return;
        const std::string prev = *(it - 1);
        if (!done(prev)) throw UserError("stage '" + stage + "' needs '" + prev + "' to complete first");
    }

    json& stage(const std::string& name) {
        if (!j_["stages"].contains(name)) j_["stages"][name] = json::object();
        return j_["stages"][name];
    }

    // Marks `name` complete and drops markers of every later stage.
    void complete(const std::string& name, json artifacts) {
        auto it = std::find(kStages.begin(), kStages.end(), name);
        for (++it; it != kStages.end(); ++it) j_["stages"].erase(*it);
        json& s = stage(name);
        s["completed"] = now_utc();
        s["artifacts"] = std::move(artifacts);
        save();
    }

    void save() const { write_text(file_, j_.dump(2) + "\n"); }

private:
    fs::path file_;
    json j_;
};

DatasetManifest load_manifest(const RunConfig& cfg, TaskId t) {
    return DatasetManifest::from_json(read_json(dataset_dir(cfg, t) / "manifest.json"));
}

std::string task_of(const json& j) { return j.at("task").get<std::string>(); }

TaskId require_task(const std::string& name) {
    const auto t = parse_task(name);
    if (!t) throw UserError("unknown task '" + name + "'");
    return *t;
}

json summary_to_json(const MetricSummary& s) {
    return {{"model", s.model_id},
            {"task", task_name(s.task)},
            {"n", s.n},
            {"mlae", s.mlae},
            {"mlae_sd", s.mlae_sd},
            {"mae", s.mae},
            {"mse", s.mse},
            {"ci_low", s.ci_low},
            {"ci_high", s.ci_high},
            {"bootstrap_resamples", s.bootstrap_resamples},
            {"seed", s.seed}};
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

void RunConfig::validate() const {
    if (models.empty()) throw UserError("config lists no models");
    if (tasks.empty()) throw UserError("config lists no tasks");
    if (runs_per_stimulus < 1) throw UserError("runs_per_stimulus must be >= 1");
    if (concurrency < 1) throw UserError("concurrency must be >= 1");
    if (bootstrap_resamples < 1) throw UserError("bootstrap_resamples must be >= 1");
    if (split_sizes.train < 0 || split_sizes.val < 0 || split_sizes.test < 1)
        throw UserError("split sizes must be non-negative with a non-empty test split");
    std::set<std::string> ids;
    for (const auto& m : models) {
        if (!ids.insert(m.id).second) throw UserError("duplicate model id '" + m.id + "'");
        if (m.id.find_first_of("/\\\n,") != std::string::npos)
            throw UserError("model id '" + m.id + "' has a reserved character");
    }
}

json RunConfig::canonical_json() const {
    json j;
    j["models"] = json::array();
    for (const auto& m : models) j["models"].push_back(to_json(m));
    j["tasks"] = json::array();
    for (TaskId t : tasks) j["tasks"].push_back(task_name(t));
    j["runs_per_stimulus"] = runs_per_stimulus;
    j["master_seed"] = master_seed;
    j["bootstrap_resamples"] = bootstrap_resamples;
    j["aggregate"] = aggregate == Aggregate::Mean ? "mean" : "midmean";
    j["score_marker"] = score.score_marker;
    j["circular_direction"] = score.circular_direction;
    j["split_sizes"] = {{"train", split_sizes.train}, {"val", split_sizes.val}, {"test", split_sizes.test}};
    return j;
}

std::string RunConfig::hash() const { return sha256_hex(canonical_json().dump()).substr(0, 16); }

RunConfig config_from_json(const json& j) {
    RunConfig c;
    try {
        for (const auto& m : j.at("models")) c.models.push_back(model_from_json(m));
        const json& tasks = j.value("tasks", json("all"));
        if (tasks.is_string() && tasks.get<std::string>() == "all") {
            c.tasks = list_tasks();
        } else {
            std::set<TaskId> seen;
            for (const auto& t : tasks) seen.insert(require_task(t.get<std::string>()));
            c.tasks.assign(seen.begin(), seen.end());
        }
        c.runs_per_stimulus = j.value("runs_per_stimulus", 3);
        c.master_seed = j.value("master_seed", std::uint64_t{0});
        c.output_dir = j.value("output_dir", std::string("out"));
        c.concurrency = j.value("concurrency", 4);
        c.bootstrap_resamples = j.value("bootstrap_resamples", 10000);
        const std::string agg = j.value("aggregate", std::string("mean"));
        if (agg != "mean" && agg != "midmean") throw UserError("aggregate must be 'mean' or 'midmean'");
        c.aggregate = agg == "mean" ? Aggregate::Mean : Aggregate::Midmean;
        c.score.score_marker = j.value("score_marker", false);
        c.score.circular_direction = j.value("circular_direction", false);
        if (j.contains("split_sizes")) {
            const json& s = j.at("split_sizes");
            c.split_sizes = {s.value("train", 5000), s.value("val", 1000), s.value("test", 55)};
        }
    } catch (const json::exception& e) {
        throw UserError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw UserError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig load_config(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw UserError("cannot open config " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw UserError("config " + file.string() + ": " + e.what());
    }
    return config_from_json(j);
}

GenSummary cmd_gen(const RunConfig& cfg, std::ostream& log) {
    RunManifest run(cfg);
    GenSummary out;
    json& recorded = run.stage("gen")["tasks"];
    if (recorded.is_null()) recorded = json::object();
    json artifacts = json::object();
    for (TaskId t : cfg.tasks) {
        const fs::path dir = dataset_dir(cfg, t);
        const fs::path manifest_file = dir / "manifest.json";
        const std::string name = task_name(t);
        artifacts[name] = manifest_file.string();
        if (recorded.contains(name) && fs::exists(manifest_file)) {
            const auto existing = DatasetManifest::from_json(read_json(manifest_file));
            if (existing.hash() == recorded[name].get<std::string>()) {
                ++out.skipped;
                log << "gen " << name << ": up to date\n";
                continue;
            }
        }
        for (Split s : kSplits) fs::create_directories(dir / split_name(s));
        const auto sink = [&](Split s, const Stimulus& stim) {
            write_bytes(dir / split_name(s) / (stim.id + ".png"), encode_image(stim.canvas, ImageFormat::Png));
        };
        const DatasetManifest m = gen_dataset(t, cfg.master_seed, sink, cfg.split_sizes);
        write_text(manifest_file, m.to_json().dump() + "\n");
        recorded[name] = m.hash();
        run.save();
        ++out.generated;
        log << "gen " << name << ": " << cfg.split_sizes.total() << " images\n";
    }
    run.complete("gen", artifacts);
    return out;
}

EvalSummary cmd_eval(const RunConfig& cfg, std::ostream& log, const GatewayEnv& env) {
    RunManifest run(cfg);
    run.require("eval");
    const fs::path dir = cfg.run_dir();
    ResponseCache cache(dir / "cache");
    ResponseJournal journal(dir / "journal.jsonl");

    std::vector<std::pair<TaskId, std::vector<Stimulus>>> test_sets;
    for (TaskId t : cfg.tasks) {
        std::vector<Stimulus> stimuli;
        const DatasetManifest m = load_manifest(cfg, t);
        for (const auto& e : m.split(Split::Test)) stimuli.push_back(regenerate(t, e));
        test_sets.emplace_back(t, std::move(stimuli));
    }

    EvalSummary out;
    std::string lines;
    for (const auto& spec : cfg.models) {
        ModelGateway gw(spec, &cache, env);
        for (const auto& [t, stimuli] : test_sets) {
            BatchResult b = gw.run_batch(stimuli, get_prompt(t), cfg.runs_per_stimulus, cfg.concurrency, &journal);
            std::size_t hits = 0;
            for (const auto& r : b.responses) {
                hits += r.from_cache;
                lines += json(r).dump() + "\n";
            }
            out.responses += b.responses.size();
            out.cache_hits += hits;
            log << "eval " << spec.id << " " << task_name(t) << ": " << b.responses.size() << " responses (" << hits
                << " cached), " << b.failures.size() << " failures\n";
            for (auto& f : b.failures) {
                log << "  failed " << f.stimulus_id << " run " << f.run_index << ": " << error_kind_name(f.kind)
                    << ": " << f.message << "\n";
                out.failures.push_back(std::move(f));
            }
        }
    }
    write_text(dir / "responses.jsonl", lines);
    std::string failed;
    for (const auto& f : out.failures)
        failed += json{{"stimulus_id", f.stimulus_id},
                       {"run_index", f.run_index},
                       {"kind", error_kind_name(f.kind)},
                       {"message", f.message}}
                      .dump() +
                  "\n";
    write_text(dir / "failures.jsonl", failed);
    run.complete("eval", {{"responses", (dir / "responses.jsonl").string()},
                          {"journal", (dir / "journal.jsonl").string()},
                          {"failures", (dir / "failures.jsonl").string()},
                          {"failure_count", out.failures.size()}});
    return out;
}

void cmd_balance(const RunConfig& cfg, std::ostream& log) {
    RunManifest run(cfg);
    run.require("balance");
    const fs::path dir = cfg.run_dir();

    std::unordered_map<std::string, GroundTruth> truth;
    for (TaskId t : cfg.tasks) {
        const DatasetManifest m = load_manifest(cfg, t);
        for (const auto& e : m.split(Split::Test)) truth.emplace(e.id, e.ground_truth);
    }

    std::map<TaskId, RecordsByModel> valid;
    for (TaskId t : cfg.tasks)
        for (const auto& m : cfg.models) valid[t][m.id];

    std::string trials;
    for (const json& j : read_jsonl(dir / "responses.jsonl")) {
        const RawResponse raw = j.get<RawResponse>();
        const TaskId t = require_task(raw.task);
        const auto gt = truth.find(raw.stimulus_id);
        if (gt == truth.end()) throw UserError("response for unknown stimulus " + raw.stimulus_id);
        const ParsedResponse p = parse(raw, get_prompt(t).schema);
        TrialRecord rec = p.valid() ? score(p, gt->second, t, cfg.score) : invalid_record(p, t);
        trials += to_json(rec).dump() + "\n";
        if (rec.valid() && valid.contains(t) && valid[t].contains(rec.model_id))
            valid[t][rec.model_id].push_back(std::move(rec));
    }
    write_text(dir / "trials.jsonl", trials);

    std::string balanced;
    for (const auto& [t, by_model] : valid) {
        const RecordsByModel kept = balance(by_model, derive_seed(cfg.master_seed, label_hash(task_name(t))));
        std::size_t n = 0;
        for (const auto& m : cfg.models) {
            const auto& recs = kept.at(m.id);
            n = recs.size();
            for (const auto& r : recs) balanced += to_json(r).dump() + "\n";
        }
        log << "balance " << task_name(t) << ": " << n << " records per model\n";
    }
    write_text(dir / "balanced.jsonl", balanced);
    run.complete("balance", {{"trials", (dir / "trials.jsonl").string()}, {"balanced", (dir / "balanced.jsonl").string()}});
}

AnalysisSummary cmd_analyze(const RunConfig& cfg, std::ostream& log) {
    RunManifest run(cfg);
    run.require("analyze");
    const fs::path dir = cfg.run_dir();

    std::map<std::pair<TaskId, std::string>, std::vector<TrialRecord>> records;
    for (const json& j : read_jsonl(dir / "balanced.jsonl")) {
        TrialRecord r = trial_from_json(j);
        records[{r.task, r.model_id}].push_back(std::move(r));
    }

    AnalysisSummary out;
    std::string csv = "model,task,n,mlae,mlae_sd,mae,mse,ci_low,ci_high,bootstrap_resamples,seed\n";
    json sj = json::array();
    for (TaskId t : cfg.tasks) {
        for (const auto& m : cfg.models) {
            const auto& recs = records[{t, m.id}];
            const std::uint64_t seed = derive_seed(cfg.master_seed, label_hash(m.id + "|" + task_name(t)));
            const MetricSummary s = summarize(recs, seed, cfg.bootstrap_resamples, cfg.aggregate);
            csv += csv_field(s.model_id) + "," + task_name(s.task) + "," + std::to_string(s.n) + "," +
                   format_number(s.mlae) + "," + format_number(s.mlae_sd) + "," + format_number(s.mae) + "," +
                   format_number(s.mse) + "," + format_number(s.ci_low) + "," + format_number(s.ci_high) + "," +
                   std::to_string(s.bootstrap_resamples) + "," + std::to_string(s.seed) + "\n";
            sj.push_back(summary_to_json(s));
            out.summaries.push_back(s);
        }
    }
    write_text(dir / "summary.csv", csv);
    write_text(dir / "summary.json", sj.dump(1) + "\n");

    std::string anova_csv = "experiment,models,f_stat,df_between,df_within,p_value,note\n";
    std::string tukey_csv = "experiment,model_a,model_b,mean_diff,q_stat,p_value,significant\n";
    std::ostringstream text;
    for (Experiment e : {Experiment::E1, Experiment::E2, Experiment::E3, Experiment::E4, Experiment::E5}) {
        const auto tasks = tasks_of(e);
        const bool present =
            std::any_of(tasks.begin(), tasks.end(), [&](TaskId t) {
                return std::find(cfg.tasks.begin(), cfg.tasks.end(), t) != cfg.tasks.end();
            });
        if (!present) continue;
        ExperimentAnalysis ea{e, {}, std::nullopt, std::nullopt, {}};
        Groups groups;
        for (const auto& m : cfg.models) {
            std::vector<double> pooled;
            for (TaskId t : tasks) {
                const auto it = records.find({t, m.id});
                if (it == records.end()) continue;
                for (const auto& r : it->second) pooled.insert(pooled.end(), r.per_item_lae.begin(), r.per_item_lae.end());
            }
            ea.models.push_back(m.id);
            groups.push_back(std::move(pooled));
        }
        if (groups.size() < 2) {
            ea.note = "needs at least two models";
        } else {
            try {
                ea.anova = anova_oneway(groups);
                if (std::isfinite(ea.anova->f_stat))
                    ea.tukey = tukey_hsd(groups, ea.models, 0.01);
                else
                    ea.note = "zero within-group variance; Tukey skipped";
            } catch (const DegenerateDataError& err) {
                ea.note = std::string("degenerate: ") + err.what();
            }
        }

        std::string model_list;
        for (const auto& m : ea.models) model_list += (model_list.empty() ? "" : ";") + m;
        const std::string name(experiment_name(e));
        text << name << "\n";
        if (ea.anova) {
            const auto& a = *ea.anova;
            anova_csv += name + "," + csv_field(model_list) + "," + format_number(a.f_stat) + "," +
                         std::to_string(a.df_between) + "," + std::to_string(a.df_within) + "," +
                         format_number(a.p_value) + "," + csv_field(ea.note) + "\n";
            text << "  ANOVA F(" << a.df_between << ", " << a.df_within << ") = " << format_fixed(a.f_stat, 4)
                 << ", p = " << format_number(a.p_value) << "\n";
        } else {
            anova_csv += name + "," + csv_field(model_list) + ",,,,," + csv_field(ea.note) + "\n";
        }
        if (!ea.note.empty()) text << "  " << ea.note << "\n";
        if (ea.tukey) {
            for (const auto& p : ea.tukey->pairs) {
                tukey_csv += name + "," + csv_field(p.group_a) + "," + csv_field(p.group_b) + "," +
                             format_number(p.mean_diff) + "," + format_number(p.q_stat) + "," +
                             format_number(p.p_value) + "," + (p.significant ? "true" : "false") + "\n";
                text << "  Tukey " << p.group_a << " vs " << p.group_b << ": diff " << format_fixed(p.mean_diff, 4)
                     << ", q " << format_fixed(p.q_stat, 4) << ", p " << format_number(p.p_value)
                     << (p.significant ? " *" : "") << "\n";
            }
        }
        out.experiments.push_back(std::move(ea));
    }
    write_text(dir / "anova.csv", anova_csv);
    write_text(dir / "tukey.csv", tukey_csv);
    write_text(dir / "analysis.txt", text.str());
    log << "analyze: " << out.summaries.size() << " summary rows\n";
    run.complete("analyze", {{"summary_csv", (dir / "summary.csv").string()},
                             {"summary_json", (dir / "summary.json").string()},
                             {"anova", (dir / "anova.csv").string()},
                             {"tukey", (dir / "tukey.csv").string()},
                             {"text", (dir / "analysis.txt").string()}});
    return out;
}

std::vector<MetricSummary> read_summary_json(const fs::path& file) {
    std::vector<MetricSummary> out;
    for (const json& j : read_json(file)) {
        MetricSummary s;
        s.model_id = j.at("model").get<std::string>();
        s.task = require_task(task_of(j));
        s.n = j.at("n").get<std::size_t>();
        s.mlae = j.at("mlae").get<double>();
        s.mlae_sd = j.at("mlae_sd").get<double>();
        s.mae = j.at("mae").get<double>();
        s.mse = j.at("mse").get<double>();
        s.ci_low = j.at("ci_low").get<double>();
        s.ci_high = j.at("ci_high").get<double>();
        s.bootstrap_resamples = j.at("bootstrap_resamples").get<int>();
        s.seed = j.at("seed").get<std::uint64_t>();
        out.push_back(std::move(s));
    }
    return out;
}

void cmd_report(const RunConfig& cfg, std::ostream& log) {
    RunManifest run(cfg);
    run.require("report");
    const fs::path dir = cfg.run_dir();
    const auto summaries = read_summary_json(dir / "summary.json");
    json artifacts = json::object();
    for (Experiment e : {Experiment::E1, Experiment::E2, Experiment::E3, Experiment::E4, Experiment::E5}) {
        const bool any = std::any_of(summaries.begin(), summaries.end(),
                                     [&](const MetricSummary& s) { return experiment_of(s.task) == e; });
        if (!any) continue;
        const fs::path svg = dir / "figures" / (std::string(experiment_name(e)) + ".svg");
        write_text(svg, render_experiment_svg(e, summaries));
        artifacts[std::string(experiment_name(e))] = svg.string();
        log << "report " << svg.string() << "\n";
    }
    write_text(dir / "report.md", render_markdown(summaries));
    artifacts["markdown"] = (dir / "report.md").string();
    run.complete("report", artifacts);
}

std::string invalid_report(const RunConfig& cfg) {
    std::map<std::string, std::map<std::string, std::size_t>> counts;
    std::map<std::string, std::size_t> totals;
    for (const auto& m : cfg.models) totals[m.id];
    for (const json& j : read_jsonl(cfg.run_dir() / "trials.jsonl")) {
        const TrialRecord r = trial_from_json(j);
        ++totals[r.model_id];
        if (!r.valid()) ++counts[r.model_id][std::string(reason_name(*r.parsed.invalid))];
    }
    std::ostringstream os;
    os << std::left << std::setw(24) << "model" << std::setw(18) << "reason" << std::right << std::setw(8) << "count"
       << "\n";
    for (const auto& [model, total] : totals) {
        std::size_t invalid = 0;
        for (const auto& [reason, n] : counts[model]) {
            os << std::left << std::setw(24) << model << std::setw(18) << reason << std::right << std::setw(8) << n
               << "\n";
            invalid += n;
        }
        os << std::left << std::setw(24) << model << std::setw(18) << "(invalid/total)" << std::right << std::setw(8)
           << (std::to_string(invalid) + "/" + std::to_string(total)) << "\n";
    }
    return os.str();
}

}  // namespace gpbench
