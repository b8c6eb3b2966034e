#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stsim/adjacency.hpp"
#include "stsim/backend.hpp"
#include "stsim/params.hpp"
#include "stsim/scenario.hpp"
#include "stsim/simulator.hpp"
#include "stsim/validation.hpp"

namespace stsim {

enum class JudgeKind { judge1, judge2 };
enum class ErrorSource { agent1, agent2, none };

struct JudgeVerdict {
    JudgeKind kind = JudgeKind::judge1;
    bool approved = false;
    ErrorSource error_source = ErrorSource::none;
    nlohmann::json issues = nlohmann::json::array();
    std::string overall_comment;
    nlohmann::json raw;  // the full verdict document
};

enum class Routing { accept, retry_agent1, retry_agent2, retry_parameters };

/// approved -> accept; Judge-1 errors route to the responsible agent;
/// a Judge-2 rejection reruns the parameter agents. Throws on the
/// contract breach approved-with-issues.
Routing judge_route(const JudgeVerdict& v);

JudgeVerdict parse_judge1_verdict(const nlohmann::json& doc);
JudgeVerdict parse_judge2_verdict(const nlohmann::json& doc);

/// Parses the response as JSON; failing that, strips code fences and
/// extracts the first balanced top-level {...} block. Throws
/// ExtractionError carrying the raw response when nothing parses.
nlohmann::json extract_json_payload(const std::string& response);

struct TranscriptEntry {
    std::string agent_id;
    std::string prompt;
    std::string response;
};

struct PipelineRounds {
    int scenario_loop = 0;
    int parameter_loop = 0;
};

struct SynthesisResult {
    std::string scenario_text;
    StructuredScenario scenario;
    SdeParameters params;
    ModulationDocument modulation;
    BaseAdjacency base;  // document matrix, or the system default
    Trajectories trajectories;
    PipelineRounds rounds;
    std::vector<TranscriptEntry> transcripts;
};

struct PipelineOptions {
    int num_nodes = 3;
    int max_seq_len = 512;
    int scenario_rounds = 3;   // L
    int parameter_rounds = 3;  // K
    SimulationConfig sim;
    // Also send the QA-generation prompts after synthesis and store the
    // responses verbatim (meant for live backends; distractor quality is
    // not validated locally).
    bool send_qa_prompts = false;
};

/// Runs the six-agent synthesis loop: scenario generation and parsing under
/// Judge 1, parameter and adjacency generation under Judge 2, then the
/// final simulation. Local deterministic validation runs before every judge
/// call; a hard local failure retries the responsible agent without
/// spending a backend call. Throws SynthesisError when a round limit is
/// exhausted.
SynthesisResult run_pipeline(ChatBackend& backend, const PipelineOptions& options);

/// Stable serialization of a result (documents, trajectories, rounds,
/// transcripts); byte-identical for identical runs.
nlohmann::json synthesis_result_to_json(const SynthesisResult& result);

}  // namespace stsim
