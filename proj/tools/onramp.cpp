// onramp: command-line front end for the merge-scenario pipeline.
//
//   onramp synth    --out DIR [--seed N] [--n-merging N] ...
//   onramp extract  --trajectories CSV --lanes JSON --out DIR
//   onramp evaluate --trajectories CSV --lanes JSON [--labels JSON] --out DIR
//   onramp report   --records JSONL --out DIR
//
// Exit codes: 0 success, 1 input error, 2 internal error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "onramp/behavior.hpp"
#include "onramp/categorization.hpp"
#include "onramp/errors.hpp"
#include "onramp/extraction.hpp"
#include "onramp/hmm.hpp"
#include "onramp/ingest.hpp"
#include "onramp/pipeline.hpp"
#include "onramp/synth.hpp"

namespace {

using namespace onramp;

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };
Level g_level = Level::Warn;

void log(Level level, const std::string& msg) {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (level <= g_level) std::cerr << "onramp: " << names[static_cast<int>(level)] << ": " << msg << '\n';
}

struct RunOptions {
    std::string trajectories;
    std::string lanes;
    std::string hmm_params;
    std::string patterns;
    std::string out = ".";
    std::string labels;
    std::string records;
    std::string config;
    PipelineConfig pipeline;
    bool all_classes = false;
    SynthConfig synth;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << content;
}

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw InputError(std::string("missing --") + what);
    if (!std::filesystem::is_regular_file(path)) throw InputError(std::string(what) + " file '" + path + "' not found");
}

/// Keys of the JSON config file map onto long flag names; config values
/// take precedence over flags given on the command line.
void apply_config(RunOptions& o) {
    if (o.config.empty()) return;
    require_file(o.config, "config");
    std::ifstream in(o.config);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("config: " + std::string(e.what()));
    }
    if (!j.is_object()) throw InputError("config: expected a JSON object");
    using Setter = std::function<void(const nlohmann::json&)>;
    const std::map<std::string, Setter> setters = {
        {"trajectories", [&](const auto& v) { o.trajectories = v.template get<std::string>(); }},
        {"lanes", [&](const auto& v) { o.lanes = v.template get<std::string>(); }},
        {"hmm-params", [&](const auto& v) { o.hmm_params = v.template get<std::string>(); }},
        {"patterns", [&](const auto& v) { o.patterns = v.template get<std::string>(); }},
        {"labels", [&](const auto& v) { o.labels = v.template get<std::string>(); }},
        {"records", [&](const auto& v) { o.records = v.template get<std::string>(); }},
        {"out", [&](const auto& v) { o.out = v.template get<std::string>(); }},
        {"xi", [&](const auto& v) { o.pipeline.extraction.xi = v.template get<int>(); }},
        {"min-duration-s", [&](const auto& v) { o.pipeline.extraction.min_candidate_duration = v.template get<double>(); }},
        {"settle-band", [&](const auto& v) { o.pipeline.extraction.tracking.settle_band = v.template get<double>(); }},
        {"settle-time-s", [&](const auto& v) { o.pipeline.extraction.tracking.settle_time = v.template get<double>(); }},
        {"vicinity-m", [&](const auto& v) { o.pipeline.vicinity_m = v.template get<double>(); }},
        {"critical-s", [&](const auto& v) { o.pipeline.critical_s = v.template get<double>(); }},
        {"workers", [&](const auto& v) { o.pipeline.workers = v.template get<unsigned>(); }},
        {"no-clip-filter", [&](const auto& v) { o.pipeline.filter_clipped = !v.template get<bool>(); }},
        {"seed", [&](const auto& v) { o.synth.seed = v.template get<std::uint64_t>(); }},
        {"n-mainline", [&](const auto& v) { o.synth.n_mainline = v.template get<int>(); }},
        {"n-merging", [&](const auto& v) { o.synth.n_merging = v.template get<int>(); }},
        {"n-aborting", [&](const auto& v) { o.synth.n_aborting = v.template get<int>(); }},
        {"n-late-merges", [&](const auto& v) { o.synth.n_late_merges = v.template get<int>(); }},
        {"noise-std", [&](const auto& v) { o.synth.noise_std = v.template get<double>(); }},
        {"rate-hz", [&](const auto& v) { o.synth.rate_hz = v.template get<double>(); }},
    };
    for (const auto& [key, value] : j.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw InputError("config: unknown key '" + key + "'");
        try {
            it->second(value);
        } catch (const nlohmann::json::exception& e) {
            throw InputError("config: bad value for '" + key + "': " + e.what());
        }
    }
}

void validate_pipeline(const PipelineConfig& p) {
    if (p.extraction.xi < 0 || p.extraction.xi > 3) throw InputError("--xi must be in [0, 3]");
    if (!(p.vicinity_m > 0.0)) throw InputError("--vicinity-m must be > 0");
    if (!(p.critical_s >= 0.0)) throw InputError("--critical-s must be >= 0");
    if (!(p.extraction.min_candidate_duration >= 0.0)) throw InputError("--min-duration-s must be >= 0");
}

struct Inputs {
    Dataset data;
    HmmParams params;
    std::vector<Pattern> patterns;
};

Inputs load_inputs(const RunOptions& o) {
    require_file(o.trajectories, "trajectories");
    require_file(o.lanes, "lanes");
    Inputs in{load_dataset(o.trajectories, o.lanes), default_params(), default_patterns()};
    if (!o.hmm_params.empty()) in.params = load_hmm_params(o.hmm_params);
    if (!o.patterns.empty()) in.patterns = load_patterns(o.patterns);
    log(Level::Info, "loaded " + std::to_string(in.data.trajectories.size()) + " trajectories");
    return in;
}

std::vector<ScenarioRecord> run(const RunOptions& o, const Inputs& in) {
    validate_pipeline(o.pipeline);
    const auto t0 = std::chrono::steady_clock::now();
    auto records = run_pipeline(in.data.trajectories, in.data.lanes, in.params, in.patterns, o.pipeline);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log(Level::Info, std::to_string(records.size()) + " records in " + std::to_string(secs) + " s");
    return records;
}

std::string records_text(const std::vector<ScenarioRecord>& records) {
    std::ostringstream out;
    write_records_jsonl(out, records);
    return out.str();
}

int cmd_extract(const RunOptions& o) {
    const Inputs in = load_inputs(o);
    const auto records = run(o, in);
    std::filesystem::create_directories(o.out);
    write_file(std::filesystem::path(o.out) / "scenarios.jsonl", records_text(records));
    write_file(std::filesystem::path(o.out) / "summary.json", summary_to_json(records, in.data.trajectories.size()));
    return 0;
}

int cmd_evaluate(const RunOptions& o) {
    const Inputs in = load_inputs(o);
    std::vector<ScenarioRecord> records;
    if (!o.records.empty()) {
        require_file(o.records, "records");
        std::ifstream f(o.records);
        records = read_records_jsonl(f, o.records);
    } else {
        records = run(o, in);
    }
    Evaluation ev;
    if (!o.labels.empty()) {
        require_file(o.labels, "labels");
        ev = evaluate(records, in.data.trajectories, load_labels(o.labels));
    } else {
        log(Level::Warn, "no --labels; ground truth from road association");
        ev = evaluate(records, in.data.trajectories);
    }
    std::filesystem::create_directories(o.out);
    write_file(std::filesystem::path(o.out) / "evaluation.json", evaluation_to_json(ev));
    std::cout << format_summary(ev) << '\n';
    return 0;
}

int cmd_synth(const RunOptions& o) {
    write_dataset(generate(o.synth), o.out);
    return 0;
}

int cmd_report(const RunOptions& o) {
    std::vector<ScenarioRecord> records;
    if (!o.records.empty()) {
        require_file(o.records, "records");
        std::ifstream f(o.records);
        records = read_records_jsonl(f, o.records);
    } else {
        records = run(o, load_inputs(o));
    }
    if (!o.all_classes) std::erase_if(records, [](const ScenarioRecord& r) { return !r.merge_family; });
    std::filesystem::create_directories(o.out);
    const std::filesystem::path dir(o.out);
    write_file(dir / "report.json", report_to_json(behavior_report(records)));
    std::ostringstream ecdf;
    write_ecdf_csv(ecdf, records);
    write_file(dir / "ecdf.csv", ecdf.str());
    std::ostringstream hist;
    write_pet_histogram_csv(hist, records);
    write_file(dir / "pet_hist.csv", hist.str());
    return 0;
}

void add_input_flags(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--trajectories", o.trajectories, "trajectory CSV");
    cmd->add_option("--lanes", o.lanes, "lane model JSON");
    cmd->add_option("--hmm-params", o.hmm_params, "HMM parameter JSON (default: built-in table)");
    cmd->add_option("--patterns", o.patterns, "pattern library JSON (default: built-in)");
}

void add_pipeline_flags(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--xi", o.pipeline.extraction.xi, "minimum primitive index of a candidate frame")->capture_default_str();
    cmd->add_option("--min-duration-s", o.pipeline.extraction.min_candidate_duration, "minimum candidate core duration")
        ->capture_default_str();
    cmd->add_option("--settle-band", o.pipeline.extraction.tracking.settle_band,
                    "reference-lane settle band (lane widths)")
        ->capture_default_str();
    cmd->add_option("--settle-time-s", o.pipeline.extraction.tracking.settle_time, "reference-lane settle time")
        ->capture_default_str();
    cmd->add_option("--vicinity-m", o.pipeline.vicinity_m, "challenger search distance")->capture_default_str();
    cmd->add_option("--critical-s", o.pipeline.critical_s, "critical |PET| threshold")->capture_default_str();
    cmd->add_option("--workers", o.pipeline.workers, "worker threads")->capture_default_str();
    cmd->add_flag("--no-clip-filter", [&o](std::int64_t) { o.pipeline.filter_clipped = false; },
                  "keep egos with short (clipped) tracks");
}

}  // namespace

int main(int argc, char** argv) {
    RunOptions o;
    CLI::App app{"On-ramp merge scenario extraction"};
    app.require_subcommand(1);
    std::string level = "warn";
    app.add_option("--log-level", level, "error, warn, info or debug")
        ->check(CLI::IsMember({"error", "warn", "info", "debug"}))
        ->capture_default_str();
    app.add_option("--config", o.config, "JSON file whose keys override the flags");

    auto* extract = app.add_subcommand("extract", "extract scenario records");
    add_input_flags(extract, o);
    add_pipeline_flags(extract, o);
    extract->add_option("--out", o.out, "output directory")->capture_default_str();

    auto* eval = app.add_subcommand("evaluate", "compare extracted merges with ground truth");
    add_input_flags(eval, o);
    add_pipeline_flags(eval, o);
    eval->add_option("--labels", o.labels, "ground-truth labels JSON");
    eval->add_option("--records", o.records, "use existing records instead of running extraction");
    eval->add_option("--out", o.out, "output directory")->capture_default_str();

    auto* synth = app.add_subcommand("synth", "write a synthetic labeled dataset");
    synth->add_option("--out", o.out, "output directory")->capture_default_str();
    synth->add_option("--seed", o.synth.seed, "random seed")->capture_default_str();
    synth->add_option("--n-mainline", o.synth.n_mainline)->capture_default_str();
    synth->add_option("--n-merging", o.synth.n_merging)->capture_default_str();
    synth->add_option("--n-aborting", o.synth.n_aborting)->capture_default_str();
    synth->add_option("--n-late-merges", o.synth.n_late_merges)->capture_default_str();
    synth->add_option("--noise-std", o.synth.noise_std, "position noise std (m)")->capture_default_str();
    synth->add_option("--rate-hz", o.synth.rate_hz, "sampling rate")->capture_default_str();

    auto* report = app.add_subcommand("report", "behavior statistics over records");
    report->add_option("--records", o.records, "scenario JSONL (otherwise extraction is run)");
    add_input_flags(report, o);
    add_pipeline_flags(report, o);
    report->add_flag("--all-classes", o.all_classes, "include non-merge records");
    report->add_option("--out", o.out, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        g_level = level == "error" ? Level::Error : level == "info" ? Level::Info : level == "debug" ? Level::Debug : Level::Warn;
        apply_config(o);
        if (extract->parsed()) return cmd_extract(o);
        if (eval->parsed()) return cmd_evaluate(o);
        if (synth->parsed()) return cmd_synth(o);
        if (report->parsed()) return cmd_report(o);
    } catch (const InputError& e) {
        log(Level::Error, e.what());
        return 1;
    } catch (const std::exception& e) {
        log(Level::Error, std::string("internal: ") + e.what());
        return 2;
    }
    return 2;
}
