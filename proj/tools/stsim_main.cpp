#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stsim/adjacency.hpp"
#include "stsim/backend.hpp"
#include "stsim/errors.hpp"
#include "stsim/manifest.hpp"
#include "stsim/params.hpp"
#include "stsim/pipeline.hpp"
#include "stsim/qa.hpp"
#include "stsim/reward.hpp"
#include "stsim/scenario.hpp"
#include "stsim/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

std::string join_command(int argc, char** argv) {
    std::ostringstream out;
    for (int i = 0; i < argc; ++i) out << (i ? " " : "") << argv[i];
    return out.str();
}

struct LoadedInputs {
    stsim::StructuredScenario scenario;
    stsim::SdeParameters params;
    stsim::ModulationDocument modulation;
    stsim::BaseAdjacency base;
};

LoadedInputs load_inputs(const std::string& scenario_path, const std::string& params_path,
                         const std::string& modulation_path) {
    LoadedInputs in;
    in.scenario = stsim::parse_scenario_text(stsim::read_file(scenario_path));
    if (!params_path.empty()) {
        in.params = stsim::parse_params_text(stsim::read_file(params_path));
    }
    if (!modulation_path.empty()) {
        in.modulation = stsim::parse_modulation_text(stsim::read_file(modulation_path));
    }
    in.base = in.modulation.base_adjacency ? *in.modulation.base_adjacency
                                           : stsim::default_base_adjacency(in.scenario);
    return in;
}

void print_warnings(const stsim::ValidationReport& report) {
    for (const auto& w : report.warnings) {
        std::cerr << "warning: [" << w.rule_id << "] " << w.location << ": " << w.detail
                  << "\n";
    }
}

int cmd_validate(const std::string& scenario_path, const std::string& params_path,
                 const std::string& modulation_path) {
    stsim::ValidationReport report;
    try {
        const auto scenario =
            stsim::parse_scenario_text(stsim::read_file(scenario_path));
        report.merge(stsim::validate_scenario(scenario));
        if (!params_path.empty()) {
            const auto params = stsim::parse_params_text(stsim::read_file(params_path));
            report.merge(stsim::validate_params(params, scenario));
        }
        if (!modulation_path.empty()) {
            const auto doc =
                stsim::parse_modulation_text(stsim::read_file(modulation_path));
            report.merge(stsim::validate_modulation(doc.modulation, scenario));
            const auto base = doc.base_adjacency
                                  ? *doc.base_adjacency
                                  : stsim::default_base_adjacency(scenario);
            report.merge(stsim::validate_base_adjacency(base, scenario));
        }
    } catch (const stsim::ParseError& e) {
        report.add(e.rule(), e.where(), e.what(), "fix the document shape");
    }
    print_warnings(report);
    std::cout << report.to_json().dump(2) << "\n";
    return report.approved() ? kExitOk : kExitValidation;
}

stsim::SimulationConfig make_sim_config(std::uint64_t seed, int substeps, bool no_clamp,
                                        const std::vector<std::string>& initial) {
    stsim::SimulationConfig cfg;
    cfg.seed = seed;
    cfg.substeps = substeps;
    cfg.clamp_nonnegative = !no_clamp;
    for (const auto& entry : initial) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw stsim::ValidationError("--initial expects id=value, got '" + entry + "'");
        }
        cfg.initial_values[std::stoi(entry.substr(0, eq))] =
            std::stod(entry.substr(eq + 1));
    }
    return cfg;
}

int cmd_simulate(const std::string& scenario_path, const std::string& params_path,
                 const std::string& modulation_path, const std::string& out_dir,
                 const stsim::SimulationConfig& cfg, const std::string& command) {
    Timer timer;
    const LoadedInputs in = load_inputs(scenario_path, params_path, modulation_path);
    const auto params_report = stsim::validate_params(in.params, in.scenario);
    print_warnings(params_report);
    for (const auto& v : params_report.violations) {
        std::cerr << "warning: parameter rule [" << v.rule_id << "] " << v.location
                  << ": " << v.detail << "\n";
    }
    const auto traj =
        stsim::simulate(in.scenario, in.params, in.base, in.modulation.modulation, cfg);

    fs::create_directories(out_dir);
    const fs::path csv_path = fs::path(out_dir) / "trajectories.csv";
    const fs::path json_path = fs::path(out_dir) / "trajectories.json";
    stsim::write_file_atomic(csv_path, stsim::trajectories_to_csv(traj));
    stsim::write_file_atomic(json_path, stsim::trajectories_to_json(traj).dump(2) + "\n");

    stsim::RunManifest manifest;
    manifest.command = command;
    manifest.seed = cfg.seed;
    manifest.config = {{"substeps", cfg.substeps},
                       {"clamp_nonnegative", cfg.clamp_nonnegative}};
    manifest.add_input(scenario_path);
    manifest.add_input(params_path);
    if (!modulation_path.empty()) manifest.add_input(modulation_path);
    manifest.add_output(csv_path);
    manifest.add_output(json_path);
    manifest.wall_time_ms = timer.elapsed_ms();
    stsim::write_file_atomic(fs::path(out_dir) / "manifest.json",
                             manifest.to_json().dump(2) + "\n");
    std::cout << "wrote " << csv_path.string() << "\n";
    return kExitOk;
}

int cmd_gen_align(const std::string& scenario_path, const std::string& params_path,
                  const std::string& modulation_path, const std::string& out_dir,
                  const std::string& command) {
    Timer timer;
    const LoadedInputs in = load_inputs(scenario_path, params_path, modulation_path);
    std::vector<stsim::AlignQuestion> questions = stsim::gen_temporal_qa(in.params, in.scenario);
    const auto spatial = stsim::gen_spatial_qa(in.scenario);
    questions.insert(questions.end(), spatial.begin(), spatial.end());
    const auto st = stsim::gen_spatiotemporal_qa(in.scenario, in.params, in.base,
                                                 in.modulation.modulation);
    questions.insert(questions.end(), st.begin(), st.end());

    std::ostringstream lines;
    for (const auto& q : questions) {
        lines << stsim::qa_record(q, in.scenario.scenario_id).dump() << "\n";
    }
    fs::create_directories(out_dir);
    const fs::path qa_path = fs::path(out_dir) / "qa.jsonl";
    stsim::write_file_atomic(qa_path, lines.str());

    stsim::RunManifest manifest;
    manifest.command = command;
    manifest.config = {{"questions", questions.size()}};
    manifest.add_input(scenario_path);
    manifest.add_input(params_path);
    if (!modulation_path.empty()) manifest.add_input(modulation_path);
    manifest.add_output(qa_path);
    manifest.wall_time_ms = timer.elapsed_ms();
    stsim::write_file_atomic(fs::path(out_dir) / "manifest.json",
                             manifest.to_json().dump(2) + "\n");
    std::cout << "wrote " << questions.size() << " questions to " << qa_path.string()
              << "\n";
    return kExitOk;
}

int cmd_synthesize(const std::string& backend_spec, int nodes, std::uint64_t seed,
                   int substeps, int scenario_rounds, int parameter_rounds,
                   bool qa_prompts, const std::string& out_dir,
                   const std::string& command) {
    Timer timer;
    std::unique_ptr<stsim::ChatBackend> backend;
    bool live = false;
    if (backend_spec.rfind("scripted:", 0) == 0) {
        backend = std::make_unique<stsim::ScriptedBackend>(backend_spec.substr(9));
    } else if (backend_spec == "live") {
        backend = std::make_unique<stsim::HttpChatBackend>(
            stsim::HttpChatBackend::config_from_env());
        live = true;
    } else {
        throw stsim::ValidationError("--backend must be live or scripted:PATH");
    }

    stsim::PipelineOptions options;
    options.num_nodes = nodes;
    options.scenario_rounds = scenario_rounds;
    options.parameter_rounds = parameter_rounds;
    options.sim.seed = seed;
    options.sim.substeps = substeps;
    options.send_qa_prompts = live || qa_prompts;
    const stsim::SynthesisResult result = stsim::run_pipeline(*backend, options);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    std::ostringstream transcripts;
    for (const auto& entry : result.transcripts) {
        transcripts << json{{"agent_id", entry.agent_id},
                            {"prompt", entry.prompt},
                            {"response", entry.response}}
                           .dump()
                    << "\n";
    }
    stsim::write_file_atomic(dir / "scenario_text.txt", result.scenario_text);
    stsim::write_file_atomic(dir / "scenario.json",
                             stsim::serialize_scenario(result.scenario).dump(2) + "\n");
    stsim::write_file_atomic(dir / "params.json",
                             stsim::serialize_params(result.params).dump(2) + "\n");
    stsim::write_file_atomic(dir / "modulation.json",
                             stsim::serialize_modulation(result.modulation).dump(2) + "\n");
    stsim::write_file_atomic(dir / "trajectories.csv",
                             stsim::trajectories_to_csv(result.trajectories));
    stsim::write_file_atomic(dir / "trajectories.json",
                             stsim::trajectories_to_json(result.trajectories).dump(2) + "\n");
    stsim::write_file_atomic(dir / "transcripts.jsonl", transcripts.str());
    stsim::write_file_atomic(dir / "rounds.json",
                             json{{"scenario_loop", result.rounds.scenario_loop},
                                  {"parameter_loop", result.rounds.parameter_loop}}
                                     .dump(2) +
                                 "\n");

    stsim::RunManifest manifest;
    manifest.command = command;
    manifest.seed = seed;
    manifest.config = {{"nodes", nodes},
                       {"backend", backend_spec},
                       {"substeps", substeps},
                       {"scenario_rounds", scenario_rounds},
                       {"parameter_rounds", parameter_rounds}};
    for (const char* name : {"scenario_text.txt", "scenario.json", "params.json",
                             "modulation.json", "trajectories.csv", "trajectories.json",
                             "transcripts.jsonl", "rounds.json"}) {
        manifest.add_output(dir / name);
    }
    manifest.wall_time_ms = timer.elapsed_ms();
    stsim::write_file_atomic(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
    std::cout << "synthesis complete: rounds {" << result.rounds.scenario_loop << ", "
              << result.rounds.parameter_loop << "}, " << result.transcripts.size()
              << " backend calls, outputs in " << out_dir << "\n";
    return kExitOk;
}

stsim::Gold parse_gold(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number()) return std::vector<double>{value.get<double>()};
    if (value.is_array()) return value.get<std::vector<double>>();
    throw stsim::ValidationError("gold must be a label or a number array");
}

int cmd_score(const std::string& input_path, const std::string& out_dir,
              const stsim::RewardConfig& cfg, const std::string& pairing_name,
              const std::string& command) {
    Timer timer;
    std::istringstream in(stsim::read_file(input_path));
    const auto pairing = pairing_name == "group-mean" ? stsim::SgrpoPairing::group_mean
                                                      : stsim::SgrpoPairing::by_index;

    struct Row {
        std::string question_id;
        std::string spatial;  // "with", "without", or empty
        double reward = 0.0;
        json record;
    };
    std::vector<Row> rows;
    std::vector<stsim::ScoreRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw stsim::ParseError("records:" + std::to_string(line_no), "JSON", e.what());
        }
        Row row;
        row.question_id = rec.value("question_id", std::string{});
        row.spatial = rec.value("spatial", std::string{});
        const std::string response = rec.at("response").get<std::string>();
        const stsim::Gold gold = parse_gold(rec.at("gold"));
        row.reward = stsim::combined_reward(response, gold, cfg);
        const auto parsed = stsim::extract_answer(response);
        records.push_back({parsed.answer, gold});
        row.record = {{"question_id", row.question_id},
                      {"reward", row.reward},
                      {"format_reward", stsim::format_reward(response)},
                      {"answer", parsed.answer}};
        if (!row.spatial.empty()) row.record["spatial"] = row.spatial;
        rows.push_back(std::move(row));
    }
    const stsim::Metrics metrics = stsim::score_metrics(records);

    // S-GRPO groups for questions carrying both spatial variants.
    json sgrpo = json::array();
    std::vector<std::string> question_order;
    std::map<std::string, stsim::GroupRollout> groups;
    for (const auto& row : rows) {
        if (row.spatial.empty() || row.question_id.empty()) continue;
        if (!groups.count(row.question_id)) {
            question_order.push_back(row.question_id);
            groups[row.question_id].question_id = row.question_id;
        }
        auto& group = groups[row.question_id];
        if (row.spatial == "with") {
            group.with_spatial.push_back({"", row.reward});
        } else if (row.spatial == "without") {
            group.without_spatial.push_back({"", row.reward});
        }
    }
    for (const auto& qid : question_order) {
        const auto& group = groups[qid];
        if (group.with_spatial.empty() ||
            group.with_spatial.size() != group.without_spatial.size()) {
            continue;
        }
        const auto rewards = stsim::sgrpo_rewards(group, cfg, pairing);
        sgrpo.push_back({{"question_id", qid},
                         {"rewards", rewards},
                         {"advantages", stsim::group_advantages(rewards)}});
    }

    json summary = {{"records", rows.size()},
                    {"accuracy", metrics.accuracy},
                    {"mae", metrics.mae},
                    {"choice_count", metrics.choice_count},
                    {"forecast_count", metrics.forecast_count},
                    {"sgrpo_groups", sgrpo.size()}};
    std::cout << summary.dump(2) << "\n";

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ostringstream reward_lines;
        for (const auto& row : rows) reward_lines << row.record.dump() << "\n";
        const fs::path rewards_path = fs::path(out_dir) / "rewards.jsonl";
        const fs::path metrics_path = fs::path(out_dir) / "metrics.json";
        stsim::write_file_atomic(rewards_path, reward_lines.str());
        json metrics_doc = summary;
        metrics_doc["sgrpo"] = sgrpo;
        stsim::write_file_atomic(metrics_path, metrics_doc.dump(2) + "\n");

        stsim::RunManifest manifest;
        manifest.command = command;
        manifest.config = {{"lambda", cfg.lambda},
                           {"epsilon", cfg.epsilon},
                           {"alpha", cfg.alpha},
                           {"beta", cfg.beta},
                           {"pairing", pairing_name}};
        manifest.add_input(input_path);
        manifest.add_output(rewards_path);
        manifest.add_output(metrics_path);
        manifest.wall_time_ms = timer.elapsed_ms();
        stsim::write_file_atomic(fs::path(out_dir) / "manifest.json",
                                 manifest.to_json().dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_plot_data(const std::string& trajectories_path, const std::string& out_dir,
                  const std::string& command) {
    Timer timer;
    const auto traj = stsim::trajectories_from_json(
        json::parse(stsim::read_file(trajectories_path)));
    fs::create_directories(out_dir);

    stsim::RunManifest manifest;
    manifest.command = command;
    manifest.add_input(trajectories_path);
    char buf[64];
    for (std::size_t i = 0; i < traj.node_ids.size(); ++i) {
        std::ostringstream series;
        series << "t\tvalue\n";
        for (std::int64_t t = 0; t < traj.seq_len; ++t) {
            std::snprintf(buf, sizeof(buf), "%.6g", traj.values[i][t]);
            series << t << "\t" << buf << "\n";
        }
        const fs::path path =
            fs::path(out_dir) / ("node_" + std::to_string(traj.node_ids[i]) + ".tsv");
        stsim::write_file_atomic(path, series.str());
        manifest.add_output(path);
    }
    manifest.wall_time_ms = timer.elapsed_ms();
    stsim::write_file_atomic(fs::path(out_dir) / "manifest.json",
                             manifest.to_json().dump(2) + "\n");
    std::cout << "wrote " << traj.node_ids.size() << " series to " << out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Network SDE simulation and dataset synthesis toolkit"};
    app.require_subcommand(1);
    const std::string command = join_command(argc, argv);

    std::string scenario_path, params_path, modulation_path, out_dir;
    std::uint64_t seed = 0;
    int substeps = 10;
    bool no_clamp = false;
    std::vector<std::string> initial;

    auto* validate = app.add_subcommand("validate", "Run deterministic rule checks");
    validate->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    validate->add_option("--params", params_path, "Parameter JSON");
    validate->add_option("--modulation", modulation_path, "Modulation JSON");

    auto* simulate = app.add_subcommand("simulate", "Integrate the network dynamics");
    simulate->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    simulate->add_option("--params", params_path, "Parameter JSON")->required();
    simulate->add_option("--modulation", modulation_path, "Modulation JSON");
    simulate->add_option("--out", out_dir, "Output directory")->required();
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--substeps", substeps, "Sub-steps per sampling interval");
    simulate->add_flag("--no-clamp", no_clamp, "Allow negative states");
    simulate->add_option("--initial", initial, "Initial value override id=value");

    auto* gen_align = app.add_subcommand("gen-align", "Generate alignment QA records");
    gen_align->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    gen_align->add_option("--params", params_path, "Parameter JSON")->required();
    gen_align->add_option("--modulation", modulation_path, "Modulation JSON");
    gen_align->add_option("--out", out_dir, "Output directory")->required();

    std::string backend_spec = "live";
    int nodes = 3, scenario_rounds = 3, parameter_rounds = 3;
    bool qa_prompts = false;
    auto* synthesize = app.add_subcommand("synthesize", "Run the multi-agent pipeline");
    synthesize->add_option("--nodes", nodes, "Node count the scenario must have");
    synthesize->add_option("--backend", backend_spec, "live or scripted:PATH")->required();
    synthesize->add_option("--seed", seed, "RNG seed");
    synthesize->add_option("--substeps", substeps, "Sub-steps per sampling interval");
    synthesize->add_option("--scenario-rounds", scenario_rounds, "Judge-1 round limit");
    synthesize->add_option("--parameter-rounds", parameter_rounds, "Judge-2 round limit");
    synthesize->add_flag("--qa-prompts", qa_prompts,
                         "Send the QA-generation prompts too (always on for live)");
    synthesize->add_option("--out", out_dir, "Output directory")->required();

    std::string input_path, pairing = "index";
    stsim::RewardConfig reward_cfg;
    auto* score = app.add_subcommand("score", "Score response transcripts");
    score->add_option("--input", input_path, "Records JSONL")->required();
    score->add_option("--out", out_dir, "Output directory");
    score->add_option("--lambda", reward_cfg.lambda, "Format weight");
    score->add_option("--epsilon", reward_cfg.epsilon, "Relative-error epsilon");
    score->add_option("--alpha", reward_cfg.alpha, "Spatial bonus");
    score->add_option("--beta", reward_cfg.beta, "Spatial tolerance");
    score->add_option("--pairing", pairing, "index or group-mean")
        ->check(CLI::IsMember({"index", "group-mean"}));

    std::string trajectories_path;
    auto* plot_data = app.add_subcommand("plot-data", "Emit per-node (t, value) series");
    plot_data->add_option("--trajectories", trajectories_path, "Trajectories JSON")
        ->required();
    plot_data->add_option("--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (validate->parsed()) {
            return cmd_validate(scenario_path, params_path, modulation_path);
        }
        if (simulate->parsed()) {
            return cmd_simulate(scenario_path, params_path, modulation_path, out_dir,
                                make_sim_config(seed, substeps, no_clamp, initial),
                                command);
        }
        if (gen_align->parsed()) {
            return cmd_gen_align(scenario_path, params_path, modulation_path, out_dir,
                                 command);
        }
        if (synthesize->parsed()) {
            return cmd_synthesize(backend_spec, nodes, seed, substeps, scenario_rounds,
                                  parameter_rounds, qa_prompts, out_dir, command);
        }
        if (score->parsed()) {
            return cmd_score(input_path, out_dir, reward_cfg, pairing, command);
        }
        if (plot_data->parsed()) {
            return cmd_plot_data(trajectories_path, out_dir, command);
        }
    } catch (const stsim::ParseError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const stsim::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
