#include "stsim/pipeline.hpp"

#include <sstream>

#include "stsim/duration.hpp"
#include "stsim/errors.hpp"
#include "stsim/prompts.hpp"

namespace stsim {
namespace {

using nlohmann::json;

std::string error_source_name(ErrorSource s) {
    switch (s) {
        case ErrorSource::agent1: return "agent1";
        case ErrorSource::agent2: return "agent2";
        case ErrorSource::none: return "none";
    }
    return "none";
}

// First balanced top-level {...} block, string-aware.
std::optional<std::string> balanced_block(const std::string& text) {
    const auto open = text.find('{');
    if (open == std::string::npos) return std::nullopt;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return text.substr(open, i - open + 1);
        }
    }
    return std::nullopt;
}

// "TIME SPAN: 1 day" -> "1 day"; tolerates brackets and trailing notes.
std::optional<std::string> scrape_line_value(const std::string& text,
                                             const std::string& label) {
    const auto pos = text.find(label);
    if (pos == std::string::npos) return std::nullopt;
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string value = text.substr(pos + label.size(), end - pos - label.size());
    for (char strip : {'[', ']', '"', '*'}) {
        value.erase(std::remove(value.begin(), value.end(), strip), value.end());
    }
    const auto begin = value.find_first_not_of(" \t:");
    if (begin == std::string::npos) return std::nullopt;
    const auto last = value.find_last_not_of(" \t\r");
    return value.substr(begin, last - begin + 1);
}

struct LocalCheck {
    bool ok = true;
    JudgeVerdict verdict;
};

JudgeVerdict local_rejection(JudgeKind kind, ErrorSource source,
                             const std::string& comment, const json& issues) {
    JudgeVerdict v;
    v.kind = kind;
    v.approved = false;
    v.error_source = source;
    v.issues = issues;
    v.overall_comment = comment;
    v.raw = {{"approved", false},
             {"error_source", kind == JudgeKind::judge1
                                  ? json(error_source_name(source))
                                  : json(nullptr)},
             {"issues", issues},
             {"overall_comment", comment},
             {"local", true}};
    return v;
}

}  // namespace

Routing judge_route(const JudgeVerdict& v) {
    if (v.approved) {
        if (!v.issues.empty()) {
            throw SynthesisError("judge approved but reported issues");
        }
        return Routing::accept;
    }
    if (v.kind == JudgeKind::judge2) return Routing::retry_parameters;
    switch (v.error_source) {
        case ErrorSource::agent1: return Routing::retry_agent1;
        case ErrorSource::agent2: return Routing::retry_agent2;
        case ErrorSource::none: break;
    }
    // A rejection without a named source is treated as a parsing problem.
    return Routing::retry_agent2;
}

JudgeVerdict parse_judge1_verdict(const json& doc) {
    JudgeVerdict v;
    v.kind = JudgeKind::judge1;
    v.approved = doc.value("approved", false);
    v.raw = doc;
    const auto source = doc.value("error_source", json(nullptr));
    if (source.is_string()) {
        const std::string name = source.get<std::string>();
        v.error_source = name == "agent1"   ? ErrorSource::agent1
                         : name == "agent2" ? ErrorSource::agent2
                                            : ErrorSource::none;
    }
    if (doc.contains("issues") && doc["issues"].is_array()) v.issues = doc["issues"];
    v.overall_comment = doc.value("overall_comment", std::string{});
    return v;
}

JudgeVerdict parse_judge2_verdict(const json& doc) {
    JudgeVerdict v;
    v.kind = JudgeKind::judge2;
    v.approved = doc.value("approved", false);
    v.raw = doc;
    v.issues = json::array();
    for (const char* key : {"parameter_issues", "adjacency_issues"}) {
        if (doc.contains(key) && doc[key].is_array()) {
            for (const auto& issue : doc[key]) v.issues.push_back(issue);
        }
    }
    v.overall_comment = doc.value("overall_comment", std::string{});
    return v;
}

json extract_json_payload(const std::string& response) {
    try {
        return json::parse(response);
    } catch (const json::exception&) {
    }
    std::string stripped = response;
    // Drop markdown fences so the brace scan sees only payload text.
    for (auto pos = stripped.find("```"); pos != std::string::npos;
         pos = stripped.find("```")) {
        auto line_end = stripped.find('\n', pos);
        if (line_end == std::string::npos) line_end = stripped.size();
        stripped.erase(pos, line_end - pos + 1);
    }
    if (const auto block = balanced_block(stripped)) {
        try {
            return json::parse(*block);
        } catch (const json::exception&) {
        }
    }
    throw ExtractionError(response);
}

namespace {

class PipelineRun {
public:
    PipelineRun(ChatBackend& backend, const PipelineOptions& options)
        : backend_(backend), options_(options) {}

    SynthesisResult execute() {
        scenario_stage();
        parameter_stage();
        // Final simulation from the approved documents.
        result_.trajectories = simulate(result_.scenario, result_.params,
                                        result_.base, result_.modulation.modulation,
                                        options_.sim);
        if (options_.send_qa_prompts) qa_generation_stage();
        result_.transcripts = std::move(transcripts_);
        return std::move(result_);
    }

private:
    std::string call(const std::string& agent_id, const std::string& prompt) {
        const std::string response = backend_.send(prompt);
        transcripts_.push_back({agent_id, prompt, response});
        return response;
    }

    void scenario_stage() {
        result_.scenario_text =
            call("agent1", render_prompt(TemplateId::agent1,
                                         {{"num_nodes", std::to_string(options_.num_nodes)},
                                          {"max_seq_len", std::to_string(options_.max_seq_len)}}));
        scrape_expected_seq_len();

        JudgeVerdict last;
        for (int round = 1; round <= options_.scenario_rounds; ++round) {
            result_.rounds.scenario_loop = round;
            const std::string parsed_text = call(
                "agent2", render_prompt(TemplateId::agent2,
                                        {{"scenario", result_.scenario_text}}));

            LocalCheck check = check_scenario(parsed_text);
            JudgeVerdict verdict;
            if (!check.ok) {
                verdict = check.verdict;  // deterministic short-circuit
            } else {
                const std::string prompt =
                    render_prompt(TemplateId::judge1,
                                  {{"expected_num_nodes", std::to_string(options_.num_nodes)},
                                   {"scenario", result_.scenario_text},
                                   {"parsed_json", scenario_json_.dump(2)}}) +
                    "\n\nLocal validation report:\n" + local_report_.to_json().dump(2);
                verdict = parse_judge1_verdict(extract_json_payload(call("judge1", prompt)));
            }
            last = verdict;
            switch (judge_route(verdict)) {
                case Routing::accept:
                    return;
                case Routing::retry_agent1:
                    regenerate_scenario_text(verdict);
                    break;
                case Routing::retry_agent2:
                    break;  // the loop re-parses
                case Routing::retry_parameters:
                    throw SynthesisError("judge-2 verdict inside the scenario loop");
            }
        }
        throw SynthesisError("scenario loop exhausted after " +
                             std::to_string(options_.scenario_rounds) +
                             " rounds; last verdict: " + last.raw.dump());
    }

    void scrape_expected_seq_len() {
        const auto span = scrape_line_value(result_.scenario_text, "TIME SPAN:");
        const auto freq = scrape_line_value(result_.scenario_text, "SAMPLING FREQUENCY:");
        expected_seq_len_.reset();
        if (span && freq) {
            try {
                expected_seq_len_ = infer_seq_len(*span, *freq);
            } catch (const ParseError&) {
            }
        }
    }

    LocalCheck check_scenario(const std::string& parsed_text) {
        LocalCheck check;
        try {
            scenario_json_ = extract_json_payload(parsed_text);
            result_.scenario = parse_scenario(scenario_json_);
        } catch (const std::exception& e) {
            check.ok = false;
            check.verdict = local_rejection(
                JudgeKind::judge1, ErrorSource::agent2,
                "structured output failed deterministic parsing",
                json::array({{{"type", "Parsing Fidelity"},
                              {"field", "document"},
                              {"problem", e.what()},
                              {"suggestion", "emit schema-conforming JSON"}}}));
            return check;
        }
        if (static_cast<int>(result_.scenario.nodes.size()) != options_.num_nodes) {
            check.ok = false;
            check.verdict = local_rejection(
                JudgeKind::judge1, ErrorSource::agent2,
                "node count mismatch",
                json::array({{{"type", "Parsing Fidelity"},
                              {"field", "nodes"},
                              {"problem", "expected " + std::to_string(options_.num_nodes) +
                                              " nodes, found " +
                                              std::to_string(result_.scenario.nodes.size())},
                              {"suggestion", "emit one entry per scenario node"}}}));
            return check;
        }
        if (expected_seq_len_ && *expected_seq_len_ != result_.scenario.seq_len) {
            check.ok = false;
            check.verdict = local_rejection(
                JudgeKind::judge1, ErrorSource::agent2,
                "seq_len diverges from the scenario text",
                json::array({{{"type", "Parsing Fidelity"},
                              {"field", "seq_len"},
                              {"problem", "scenario text implies " +
                                              std::to_string(*expected_seq_len_) +
                                              " steps, JSON says " +
                                              std::to_string(result_.scenario.seq_len)},
                              {"suggestion", "recompute seq_len from the text"}}}));
            return check;
        }
        local_report_ = validate_scenario(result_.scenario);
        if (!local_report_.approved()) {
            check.ok = false;
            check.verdict = local_rejection(JudgeKind::judge1, ErrorSource::agent1,
                                            "scenario failed deterministic rules",
                                            local_report_.to_json()["issues"]);
        }
        return check;
    }

    void regenerate_scenario_text(const JudgeVerdict& verdict) {
        const std::string prompt =
            render_prompt(TemplateId::agent1,
                          {{"num_nodes", std::to_string(options_.num_nodes)},
                           {"max_seq_len", std::to_string(options_.max_seq_len)}}) +
            "\n\nPrevious scenario:\n" + result_.scenario_text +
            "\n\nJudge feedback:\n" + verdict.raw.dump(2);
        result_.scenario_text = call("agent1", prompt);
        scrape_expected_seq_len();
    }

    void parameter_stage() {
        const std::string scenario_dump = scenario_json_.dump(2);
        std::string params_text = call(
            "agent3", render_prompt(TemplateId::agent3,
                                    {{"structured_scenario", scenario_dump}}));
        std::string modulation_text = call(
            "agent4", render_prompt(TemplateId::agent4,
                                    {{"structured_scenario", scenario_dump}}));

        JudgeVerdict last;
        for (int round = 1; round <= options_.parameter_rounds; ++round) {
            result_.rounds.parameter_loop = round;
            LocalCheck check = check_parameters(params_text, modulation_text);
            JudgeVerdict verdict;
            if (!check.ok) {
                verdict = check.verdict;
            } else {
                std::string previous_section;
                if (!last.raw.is_null() && !last.raw.empty()) {
                    previous_section = "\nPrevious Assessment:\n" + last.raw.dump(2) + "\n";
                }
                const std::string prompt =
                    render_prompt(TemplateId::judge2,
                                  {{"structured_scenario", scenario_dump},
                                   {"sde_parameters", serialize_params(result_.params).dump(2)},
                                   {"time_varying_adjacency",
                                    serialize_modulation(result_.modulation).dump(2)},
                                   {"previous_assessment_section", previous_section}}) +
                    "\n\nLocal validation report:\n" + param_report_.to_json().dump(2) +
                    "\n\nTime series summary (text fallback):\n" +
                    summarize_trajectories(result_.trajectories);
                verdict = parse_judge2_verdict(extract_json_payload(call("judge2", prompt)));
            }
            last = verdict;
            if (judge_route(verdict) == Routing::accept) return;
            if (round < options_.parameter_rounds) {
                const std::string feedback = "\n\nJudge feedback on the previous attempt:\n" +
                                             verdict.raw.dump(2);
                params_text = call(
                    "agent3", render_prompt(TemplateId::agent3,
                                            {{"structured_scenario", scenario_dump}}) +
                                  "\n\nPrevious parameters:\n" + params_text + feedback);
                modulation_text = call(
                    "agent4", render_prompt(TemplateId::agent4,
                                            {{"structured_scenario", scenario_dump}}) +
                                  "\n\nPrevious modulation:\n" + modulation_text + feedback);
            }
        }
        throw SynthesisError("parameter loop exhausted after " +
                             std::to_string(options_.parameter_rounds) +
                             " rounds; last verdict: " + last.raw.dump());
    }

    LocalCheck check_parameters(const std::string& params_text,
                                const std::string& modulation_text) {
        LocalCheck check;
        auto reject = [&](const std::string& field, const std::string& problem) {
            check.ok = false;
            check.verdict = local_rejection(
                JudgeKind::judge2, ErrorSource::none,
                "parameters failed deterministic checks",
                json::array({{{"parameter", field}, {"problem", problem}}}));
        };
        try {
            result_.params = parse_params(extract_json_payload(params_text));
            result_.modulation = parse_modulation(extract_json_payload(modulation_text));
        } catch (const std::exception& e) {
            reject("document", e.what());
            return check;
        }
        result_.base = result_.modulation.base_adjacency
                           ? *result_.modulation.base_adjacency
                           : default_base_adjacency(result_.scenario);
        param_report_ = validate_params(result_.params, result_.scenario);
        param_report_.merge(
            validate_modulation(result_.modulation.modulation, result_.scenario));
        param_report_.merge(validate_base_adjacency(result_.base, result_.scenario));
        if (!param_report_.approved()) {
            check.ok = false;
            check.verdict = local_rejection(JudgeKind::judge2, ErrorSource::none,
                                            "parameters failed deterministic rules",
                                            param_report_.to_json()["issues"]);
            return check;
        }
        try {
            result_.trajectories = simulate(result_.scenario, result_.params,
                                            result_.base, result_.modulation.modulation,
                                            options_.sim);
        } catch (const std::exception& e) {
            reject("simulation", e.what());
        }
        return check;
    }

    // Renders and sends the reasoning-QA generation prompts; responses are
    // stored verbatim in the transcript and not validated locally.
    void qa_generation_stage() {
        call("qa_etiological",
             render_prompt(TemplateId::qa_etiological,
                           {{"scenario", result_.scenario_text}}));
        for (const auto& node : result_.scenario.nodes) {
            call("qa_entity",
                 render_prompt(TemplateId::qa_entity,
                               {{"node_id", std::to_string(node.id)},
                                {"node_name", node.name},
                                {"node_description", node.description}}));
        }
        for (const auto& pattern : result_.modulation.modulation.patterns) {
            for (const auto& [key, em] : pattern.edge_modulations) {
                const auto arrow = key.find("->");
                const int src = std::stoi(key.substr(0, arrow));
                const int tgt = std::stoi(key.substr(arrow + 2));
                const NodeSpec* src_node = result_.scenario.find_node(src);
                const NodeSpec* tgt_node = result_.scenario.find_node(tgt);
                if (!src_node || !tgt_node) continue;
                call("qa_correlation_direct",
                     render_prompt(
                         TemplateId::qa_correlation_direct,
                         {{"source_node_name", src_node->name},
                          {"source_node_id", std::to_string(src)},
                          {"target_node_name", tgt_node->name},
                          {"target_node_id", std::to_string(tgt)},
                          {"time_period", std::to_string(pattern.time_range.start) +
                                              "-" +
                                              std::to_string(pattern.time_range.end_raw)},
                          {"sampling_frequency", result_.scenario.sampling_frequency},
                          {"correct_description", em.description}}));
            }
        }
        call("qa_correlation_multihop",
             render_prompt(TemplateId::qa_correlation_multihop,
                           {{"adjacency_modulations",
                             serialize_modulation(result_.modulation).dump(2)},
                            {"sampling_frequency", result_.scenario.sampling_frequency}}));
        // One forecast item per demand source over the final quarter.
        const std::int64_t horizon = result_.scenario.seq_len;
        const std::int64_t split = horizon - std::max<std::int64_t>(horizon / 8, 1);
        for (const auto& node : result_.scenario.nodes) {
            if (node.node_type != NodeType::demand_source) continue;
            call("qa_forecast",
                 render_prompt(
                     TemplateId::qa_forecast,
                     {{"target_node_name", node.name},
                      {"target_node_id", std::to_string(node.id)},
                      {"target_node_variable", result_.scenario.variable},
                      {"history_window", "0-" + std::to_string(split - 1)},
                      {"prediction_window", std::to_string(split) + "-" +
                                                std::to_string(horizon - 1)},
                      {"events", result_.modulation.modulation.patterns.empty()
                                     ? std::string("steady operation")
                                     : result_.modulation.modulation.patterns.front()
                                           .description},
                      {"referenced_stats", summarize_trajectories(result_.trajectories)},
                      {"prediction_length", std::to_string(horizon - split)}}));
        }
    }

    ChatBackend& backend_;
    PipelineOptions options_;
    SynthesisResult result_;
    std::vector<TranscriptEntry> transcripts_;
    json scenario_json_;
    ValidationReport local_report_;
    ValidationReport param_report_;
    std::optional<std::int64_t> expected_seq_len_;
};

}  // namespace

SynthesisResult run_pipeline(ChatBackend& backend, const PipelineOptions& options) {
    if (options.scenario_rounds < 1 || options.parameter_rounds < 1) {
        throw SynthesisError("round limits must be >= 1");
    }
    PipelineRun run(backend, options);
    return run.execute();
}

json synthesis_result_to_json(const SynthesisResult& result) {
    json transcripts = json::array();
    for (const auto& entry : result.transcripts) {
        transcripts.push_back({{"agent_id", entry.agent_id},
                               {"prompt", entry.prompt},
                               {"response", entry.response}});
    }
    return {{"scenario_text", result.scenario_text},
            {"scenario", serialize_scenario(result.scenario)},
            {"params", serialize_params(result.params)},
            {"modulation", serialize_modulation(result.modulation)},
            {"trajectories", trajectories_to_json(result.trajectories)},
            {"rounds",
             {{"scenario_loop", result.rounds.scenario_loop},
              {"parameter_loop", result.rounds.parameter_loop}}},
            {"transcripts", transcripts}};
}

}  // namespace stsim
