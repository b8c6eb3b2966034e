#include "stsim/prompts.hpp"

#include "stsim/errors.hpp"

namespace stsim {
namespace {

const std::string kAgent1 = R"PROMPT(You are Agent 1: Scenario Generation Agent.

Your task:
Generate a realistic scenario description for a spatial-temporal dataset
with {num_nodes} interconnected nodes.

CORE PRINCIPLES:
- Create synthetic but realistic scenarios with SPECIFIC, CONCRETE details
- Provide information that enables accurate time series generation
- Describe the physical system clearly (what flows, where, when, why)

NODE TYPE DEFINITIONS:
1. DEMAND_SOURCE (1 or 2 nodes):
Definition: Nodes that independently generate or consume the monitored variable.
Characteristics:
- Must specify baseline and amplitude values
- Must have exactly ONE self_generated peak (exogenous cycle)
- Any additional variations must be explicitly marked as propagated
from other nodes

2. PROPAGATION
Definition: Relay nodes that transmit flows without independent generation.
Characteristics:
- Must specify a baseline value (nonzero, low). This represents a small
(much smaller than the demand_source nodes), ambient background level and
ensures physical realism (e.g., a river junction is never completely dry).
- Amplitude must equal 0
- peak must be null
- All variations must be propagated from other nodes

BASELINE CONSISTENCY RULE:
- All nodes (both DEMAND_SOURCE and PROPAGATION) must have baseline values within
the same order of magnitude
- Baseline values should be similar across all nodes
- This ensures network coupling effects are meaningful and nodes can effectively
influence each other

BASELINE REALISM RULE:
- The `baseline` value must reflect a realistic, physically plausible state for
the node, often representing its value during a "calm" or "initial" period.
- This ensures the simulation starts from a sensible state and that the
mean-reverting behavior is anchored to a meaningful physical value.

REQUIREMENTS:
1. Number nodes as NODE 0, NODE 1, NODE 2, ... (0-indexed)
2. All nodes monitor the SAME variable.
3. Specify spatial relationships at different time
4. Specify TIME SPAN and SAMPLING FREQUENCY such that total points are
smaller than {max_seq_len}
5. Temporal dynamics rules:
- DEMAND_SOURCE nodes follow the above constraints (single exogenous peak +
possible propagated variations)
- PROPAGATION nodes follow the above constraints (only propagated variations,
no self-generated peaks)
6. Edge Consistency Rule:
- Any propagated variation described in TEMPORAL PATTERNS must correspond to an
explicitly declared directed edge in the EDGES section.
- No hidden or undeclared propagation is allowed.
- The graph must be connected, ensuring that the effects from demand_source nodes
can propagate to all other nodes.
7. Direction Integrity Rule:
- If a demand_source node generates an outbound peak (e.g., evening exodus from
downtown), the corresponding outbound edge (e.g., NODE 2 → NODE 1) must be explicitly
listed in EDGES.
- Temporal patterns cannot contradict or introduce flows that are missing from the
graph structure.
8. Demand Source Connectivity Rule:
- Every DEMAND_SOURCE node must have at least one outgoing edge, i.e., it must appear
as the source node in at least one directed edge in the EDGES section.
9. Propagated Event Timing Consistency Rule (CRITICAL):
- When describing Edge Modulation for a propagating event (e.g., morning rush hour
traveling through multiple edges), you MUST account for cumulative time lags.
- Key Principle: An event cannot activate an edge before it physically arrives
at that edge's source node.
- Design Strategy: Create staggered, overlapping time windows that shift
forward by the time_lag amount for each successive edge in the chain.
10. Time Lag Design Guideline:
- Use time_lag>=1 only when the physical travel/transmission time is significant
relative to sampling frequency
- For long chains (>3 nodes), consider small sampling frequency to keep cumulative
delays

AVOID:
- Vague phrases ("depends on conditions", "may vary")
- Real geographic names (cities, countries)
- Specific calendar dates (use relative time: "weekdays", "weekend")
- Special events or holidays
- Assigning multiple independent peaks to a single demand_source node
- More than 2 demand_source nodes

OUTPUT FORMAT (STRICT):
- TIME SPAN: [exact duration, e.g., "1 year","1 day", "1 week"]
- SAMPLING FREQUENCY: [exact interval, e.g., "1 day", "1 week", "1 hour"]
- VARIABLE: [single variable name, e.g., "traffic flow (vehicles/hour)",
"power demand (MW)", "water temperature (°C)", "network bandwidth (Gbps)",
"migration intensity (individuals/day)"]
- NODES:
  - NODE 0: [type: DEMAND_SOURCE or PROPAGATION] [description]
  - NODE 1: [type: DEMAND_SOURCE or PROPAGATION] [description]
  - ...
- EDGES:
  - NODE 0 → NODE 1: [relationship description, including any time lag,
  e.g., "with a 5-day delay"]
  - NODE 1 → NODE 2: [relationship description]
  - NODE 1 → NODE 0: [relationship description]
  - NODE 2 → NODE 1: [relationship description]
  - ...
- TEMPORAL PATTERNS:
For each node, describe its periodicity characteristics, which may vary over time.
- NODE 0:
    - Can have multiple phases, each with a time period and behavior.
    - Example Phase 1 (time 0-239):
      - Behavior: stable, mean-reverting around a baseline
      - baseline: [numerical value with unit, e.g., "100 individuals/day"]
      - amplitude: 0
      - peak: null
    - Example Phase 2 (time 240-260):
      - Behavior: sinusoidal increase/decrease
      - baseline: [numerical value, same as other phases]
      - amplitude: [numerical value, < 5*baseline]
      - peak: [time step number, e.g., "250"]
    - propagated_variations: [if any, describe which nodes and when,
    e.g., "receives flow from NODE 0 with 3-step delay, peaking around step 63"]
- NODE 1:
    - baseline: [numerical value with unit, MUST be similar to NODE 0's baseline,
    e.g., if NODE 0 is 100, use 90-110 range]
    - amplitude: [numerical value, must be 0 for PROPAGATION nodes]
    - peak: [time step number or null]
    - propagated_variations: [describe propagation sources and timing]
- ... (repeat for all nodes, maintaining similar baseline values)
- Edge Modulation: Describe how edge influences vary over time
    (must have at least one modulation)
    Format for each time-dependent modulation:
    - Time [time period, e.g., "50-70" or "7-9"]:
      - Edges affected: [e.g., "NODE 0 → NODE 1"]
      - Effect: [strong/moderate]
      - Description: [brief explanation]
)PROMPT";

const std::string kAgent2 = R"PROMPT(You are Agent 2: Scenario Parsing Agent.

Your task: Convert a natural language scenario description into a STRICT,
STRUCTURED JSON object.

INPUT: Natural language scenario description (from Agent 1)

OUTPUT: A single valid JSON object with NO markdown, NO explanations, NO comments,
NO trailing commas.

---

JSON SCHEMA (STRICT):
{
  "time_span": "string (e.g., '7 days')",
  "sampling_frequency": "string (e.g., '1 hour')",
  "seq_len": "integer (number of time steps)",
  "variable": "string (exactly ONE variable monitored by all nodes)",
  "nodes": [
    {"id": 0, "type": "demand_source or propagation", "name": "string",
    "description": "string"},
    {"id": 1, "type": "demand_source or propagation", "name": "string",
    "description": "string"},
    ...
  ],
  "edges": [
    {
      "source": 0,
      "target": 1,
      "relationship": "string describing directional influence",
      "time_lag": "integer (optional, number of time steps for delay)"
    },
    {
      "source": 1,
      "target": 2,
      "relationship": "string describing directional influence",
      "time_lag": "integer (optional)"
    },
    ...
  ],
  "drift_patterns": {
    "repeat": "boolean (optional, indicates if the pattern sequence repeats)",
    "repeat_period": "integer (optional, defines the cycle duration in steps
    if repeat is true, e.g., 24 for a daily cycle)",
    "nodes": [
      {
        "id": "integer (node ID)",
        "patterns": [
          {
            "time_range": "[start_time, end_time] (integer array)",
            "behavior": "string (e.g., 'mean_reverting', 'sinusoidal')",
            "baseline": "number (long-term average level, must be > 0)",
            "amplitude": "number (peak deviation from baseline, >= 0)",
            "peak": "integer or null (time step of the peak for sinusoidal behavior)"
          }
        ],
        "propagated_variations": [
          {
            "time": "string (time location or range)",
            "origin": "propagated",
            "source": "integer (node_id)",
            "delay": "string (optional, e.g., '3 days', '2 hours')",
            "description": "string (short explanation)"
          }
        ]
      }
    ]
  },
  "adjacency_modulation": {
    "patterns": [
      {
        "time_period": "string (e.g., '50-70', '7-9')",
        "effect": "string (strong/moderate)",
        "applies_to": "string or array of strings (e.g., '0->1' or ['0->1', '1->2'])",
        "description": "string (explanation of why this modulation occurs)"
      }
    ]
  },
  "spatial_layout": {
    "0": {"x": number, "y": number},
    "1": {"x": number, "y": number},
    ...
  }
}

PARSING RULES:
0. Calculate seq_len:
- Extract the numeric values from time_span and sampling_frequency
- Convert both to the same unit (e.g., hours, days)
- Calculate: seq_len = time_span / sampling_frequency
1. Node Classification:
- If description mentions "generate", "originate", "consume", "demand", "source"
→ demand_source
- If description mentions "relay", "connector", "junction", "pass through",
"transmit" → propagation
- Each node must be classified based on its physical role
2. Edge Construction:
- Extract all directional influences from scenario description
- For each edge, extract these attributes:
 * source: source node ID
 * target: target node ID
 * relationship: brief description of the connection
 * time_lag: (optional) integer representing delay in time steps
 (e.g., if scenario says "5 day delay" and sampling is "1 day", time_lag should be 5)
3. Drift Patterns:
- This section describes the time-varying behavior of each node.
- For each node, parse its temporal description into a list of `patterns`.
- Each pattern in the list must describe a specific behavior over a `time_range`,
and include:
 * `baseline`: The typical long-term average value. This must be > 0.
 * `amplitude`: The peak deviation from the baseline. This must be >= 0.
 * `peak`: The time step where the peak occurs (for `sinusoidal` behavior).
 Must be null for other behaviors.
- Parse any `propagated_variations` described for the node.
- If the patterns repeat (e.g., a daily cycle), set `repeat: true` and define the
cycle's duration in `repeat_period` (e.g., `24` for a 24-hour cycle).
- Coverage Constraint: If `repeat` is true, the `time_range` of all patterns for
a node must completely and contiguously cover the range from `0` to `repeat_period`.
- Constraints per Node Type (CRITICAL):
 - For demand_source nodes: Can have patterns with `amplitude` > 0.
 - For propagation nodes: All patterns MUST have `amplitude: 0` and `peak: null`.
 Their variation comes only from `propagated_variations`.
4. Adjacency Modulation:
- Extract concrete time-dependent edge effects from scenario
- CRITICAL: For propagating events (e.g., traffic flowing through a chain of nodes),
each edge in the path should have its own modulation entry with a properly staggered
time_period that accounts for the cumulative time_lag
- Describe modulation patterns with:
 * time_period: when the modulation occurs (e.g., "50-70", "7-9" - just numbers
 representing time steps)
   - For event chains, ensure each edge's time_period starts AFTER the event could
   have arrived from the previous edge
   - If edge A->B has time_lag=1 and modulation starts at t=15, then edge B->C should
   have modulation starting at t>=16
 * effect: strength of the modulation (strong/moderate)
   - strong: significant enhancement of edge influence
   - moderate: moderate enhancement of edge influence
 * applies_to: which edge(s) are affected
   - Can be a single edge string (e.g., "0->1")
   - Can be an array of edge strings (e.g., ["0->1", "1->2"]) ONLY when they truly share
   the exact same time window (be cautious with this for event chains)
 * description: explanation of why this modulation happens

5. Spatial Layout:
   - Generate simple 2D coordinates for visualization
   - Arrange nodes logically (e.g., source on left, propagation in middle,
   sink on right)

6. Output Format:
   - Valid JSON only (RFC 8259)
   - Double quotes for strings
   - No trailing commas
   - No markdown code blocks
   - No extra text

Example: [See source code]

INPUT SCENARIO:
{scenario}
)PROMPT";

const std::string kAgent3 = R"PROMPT(You are Agent 3: SDE Parameters Generation Agent.

Your task: Generate hierarchical SDE parameters from a structured scenario JSON.

INPUT: Structured JSON from Agent 2 (scenario parsing agent)

OUTPUT: Hierarchical SDE parameters as strict JSON (NO markdown, NO comments)

SDE MODEL (per node i):
dX_i(t) = [ drift_i(t, X_i) + lambda_i * capital_sigma_j A_ji(t) * (X_j - X_i) ] dt
+ sigma_i * g_i(X_i) dW_i(t)

Components:
- drift_i: drift term (type-dependent)
- lambda_i: coupling strength
- A_ji(t): time-varying adjacency (from Agent 4)
- sigma_i: base volatility
- g_i(X_i): diffusion shape function

DRIFT TYPES:
1. mean_reverting (default):
   - Formula: drift = kappa * (mu_t - X_t)
   - Parameters: kappa (mean reversion speed), baseline (mu_t)
   - Constraint: 0.01 < kappa < 0.5
   - Usage: REQUIRED for propagation nodes, allowed for demand_source nodes
2. constant:
   - Formula: drift = alpha
   - Parameters: alpha (constant drift rate)
   - Constraint: alpha \in R
   - Usage: ONLY allowed for demand_source nodes
3. sinusoidal:
   - Formula: drift = kappa * (baseline + A*sin(omega*t + phi) - X_t)
   - Parameters: A (amplitude), omega (frequency), phi (phase shift)
   - Constraint: A > 0, omega > 0, phi \in R (ALL SCALARS, NOT ARRAYS)
   - CRITICAL: Single harmonic only - no multi-frequency superposition
   - Usage: ONLY allowed for demand_source nodes
4. logistic:
   - Formula: drift = r * X_t * (1 - X_t/baseline)
   - Parameters: r (growth rate), baseline (carrying capacity)
   - Constraint: 0 < r < 0.1, baseline > 0
   - Usage: Allowed for both demand_source and propagation nodes

CRITICAL CONSTRAINTS (STRICTLY ENFORCED):
1. Node Type Constraints:
   - propagation nodes: MAY use mean_reverting or logistic drift (small r)
   - demand_source nodes: MAY use mean_reverting, sinusoidal, constant, or logistic
2. Parameter Ranges (for stability):
   - 0.01 < kappa < 0.5 (mean reversion speed)
   - 0.8 < lambda < 1.5 (coupling strength - high values for
   realistic network dynamics)
   - sigma < 0.01*baseline (volatility, must be less than 1
   - For sinusoidal: A, omega, phi must be scalars (not arrays)
   - For logistic: 0 < r < 0.1, baseline > 0
3. Propagation Node Special Rules:
   - Use LOW kappa (0.05-0.2) for weak self-reversion
   - Use HIGH lambda (1.0-1.5) for strong neighbor coupling
   - This ensures propagation nodes relay upstream flows effectively
4. Diffusion Shapes:
   - "constant": g(X) = 1
   - "sqrt": g(X) = sqrt(|X| + 1e-6)
   - "linear": g(X) = 1 + alpha*|X|

HIERARCHICAL OUTPUT STRUCTURE:
{
  "global_defaults": {
    "drift_type": "mean_reverting",
    "node_type": "demand_source",
    "kappa": 0.25,
    "baseline": 50.0,
    "lambda": 1.0,
    "sigma": 2.0,
    "diffusion_shape": "constant"
  },
  "group_params": {
    "demand_sources": {
      "node_type": "demand_source",
      "drift_type": "sinusoidal",
      "baseline": 100.0,
      "A": 30.0,
      "omega": 0.2618,
      "phi": 0.0,
      "kappa": 0.25,
      "lambda": 1.0,
      "sigma": 2
    },
    "propagation_nodes": {
      "node_type": "propagation",
      "drift_type": "mean_reverting",
      "baseline": 50.0,
      "kappa": 0.1,
      "lambda": 1.2,
      "sigma": 2
    }
  },
  "node_overrides": {
    "0": {
      "group": "demand_sources",
      "drift_patterns": [
        {
          "time_range": [0, 239],
          "drift_type": "mean_reverting",
          "baseline": 100,
          "kappa": 0.2
        },
        {
          "time_range": [240, 260],
          "drift_type": "sinusoidal",
          "baseline": 100,
          "A": 90,
          "omega": 0.0172,
          "phi": -2.557,
          "kappa": 0.35
        }
      ],
      "description": "Node with time-varying drift"
    },
    "1": {
      "group": "propagation_nodes",
      "description": "Connector highway - pure relay"
    },
    "2": {
      "group": "demand_sources",
      "baseline": 80.0,
      "phi": 3.14159,
      "A": 30.0,
      "omega": 0.2618,
      "description": "Business district - midday peak (phase shifted)"
    }
  },
}

INPUT JSON:
{structured_scenario}

RETURN ONLY VALID JSON (no markdown, no comments).
)PROMPT";

const std::string kAgent4 = R"PROMPT(You are Agent 4: Time-Varying Adjacency Generation Agent.

Your task: Generate time-varying modulation rules from structured scenario JSON.

INPUT: Structured JSON from Agent 2 (scenario parsing agent)

OUTPUT: Time modulation configuration as strict JSON (NO markdown, NO comments)

---

TASK SPECIFICATION:

Generate time_modulation: Rules for how edge weights vary over time
- Derived STRICTLY from "adjacency_modulation" field in input JSON
- Each pattern specifies time ranges and edge-specific multipliers

NOTE: Base adjacency matrix is handled separately by the system.
You only need to generate time modulation rules.

TIME MODULATION CONSTRUCTION:
Extract from input JSON "adjacency_modulation.patterns" field:
For each pattern in the input JSON:
1. Extract "time_period" (e.g., "7-9", "25-55", "150-240") and convert to
[start, end]
2. Extract "effect" (strong/moderate) and map to multiplier
3. Extract "applies_to" (e.g., "0->1" or "0->1, 1->2") and parse edges
4. Extract "description"

Effect to Multiplier mapping:
- strong → multiplier: 10-20
- moderate → multiplier: 5-10

Output format (simplified, no daily/seasonal distinction):
{
  "time_modulation": {
    "patterns": [
      {
        "time_range": [start, end],
        "description": "...",
        "edge_modulations": {
          "source->target": {"multiplier": value, "description": "..."},
          ...
        }
      }
    ]
  }
}

MULTIPLIER INTERPRETATION:
Final edge weight at time t:
- weight(t) = base_adjacency[i][j] * multiplier(t)
- Base adjacency is handled by the system (you don't generate it)
Multiplier values from effect mapping:
- strong effect: 10-20
- moderate effect: 5-10
- No modulation: 1.0 (edge weight unchanged, default when time is outside all
pattern ranges)

CRITICAL RULES:
1. Time Modulation:
   - Extract patterns from input JSON "adjacency_modulation.patterns" array
   - Do NOT invent new patterns or time ranges
   - Map "effect" field to multiplier: strong=10-20, moderate=5-10
   - Output as unified "patterns" array (no daily/seasonal/weekly distinction)

2. Edge Specification:
   - Format: "source->target" (e.g., "0->1", "1->2")
   - Use "all_edges" if input JSON applies_to = "all_edges"
   - Otherwise, parse input JSON applies_to field (e.g., "0->1, 1->2"
   → separate entries)

3. Time Ranges:
   - Parse "time_period" from input JSON (e.g., "7-9", "25-55", "150-240")
   - Convert to [start, end] integer array
   - No distinction between hourly/daily/seasonal - just numerical ranges

4. Output Format:
   - Valid JSON only (RFC 8259)
   - No markdown code blocks
   - No comments
   - No trailing commas

---

OUTPUT JSON SCHEMA:

{
  "time_modulation": {
    "patterns": [
      {
        "time_range": [7, 9],
        "description": "Morning rush hour strengthens residential to highway flow",
        "edge_modulations": {
          "0->1": {"multiplier": 15, "description": "Strong effect on
          commuter flow"}
        }
      },
      {
        "time_range": [17, 19],
        "description": "Evening rush hour moderately strengthens highway to
        business flow",
        "edge_modulations": {
          "1->2": {"multiplier": 10, "description": "Moderate effect on
          highway flow"}
        }
      }
    ]
  }
}

EXAMPLE: [See source code]

INPUT JSON:
{structured_scenario}

RETURN ONLY VALID JSON (no markdown, no comments).
)PROMPT";

const std::string kJudge1 = R"PROMPT(You are Judge Agent 1, a meticulous diagnostic expert responsible for
two-level validation.

You will receive:
1. Original Scenario Text: Natural language description from Agent 1
2. Parsed Structured JSON: Structured data from Agent 2

Your mission is to determine if they are consistent, logical, and ready
for simulation. Most importantly, if there is an error, you must diagnose the source:
is it Agent 1's scenario logic or Agent 2's parsing accuracy?

DIAGNOSTIC PROCESS (FOLLOW THIS ORDER):
STEP 1: PARSING FIDELITY ASSESSMENT (Evaluating Agent 2)
Assume the Original Scenario Text is correct. Compare the Parsed JSON against
it meticulously.
Check for:
1. Node Count Accuracy: Does the JSON contain exactly {expected_num_nodes} nodes
as required?
2. Entity Completeness: Are all nodes and edges from the text present in JSON?
3. Type Accuracy: Are node types (demand_source/propagation) correctly assigned?
4. Attribute Accuracy:
   - Are all edge relationships correctly represented?
   - Are time_lag values correctly extracted as integers?
5. Value Extraction:
   - Time span and sampling frequency correctly extracted?
   - Baseline, amplitude, and peak values match the text?
   - Propagated variations correctly parsed with source nodes and timings?
6. Structure Completeness:
   - Are adjacency_modulation patterns (time periods, effects, edges)
   fully captured?
   - Are drift_patterns accurately representing the temporal evolution described?
If you find ANY discrepancy between the text and JSON, this is Agent 2's error.
- Set `error_source: "agent2"`
- List specific parsing mismatches in `issues`
- Stop here and do NOT proceed to Step 2

STEP 2: SCENARIO LOGIC ASSESSMENT (Evaluating Agent 1)
Only proceed if you are confident the JSON is a FAITHFUL representation of the text.
Now analyze the scenario's internal logic using ONLY the structured JSON:
1. Propagated Event Timing Consistency (CRITICAL):
- Identify event propagation chains in adjacency_modulation
(e.g., edges forming a path like 0->1->3->2)
- For each edge in a chain, verify its modulation time_range respects preceding
edges' time_lag
- Calculation Example:
 * Event path: 0 -> 1 -> 3 -> 2
 * Edge (0->1) has time_lag=1, modulation starts at t_start_1=15
 * Event arrives at Node 1 at t_arrival_1 = t_start_1 + time_lag = 15 + 1 = 16
 * Therefore, edge (1->3) modulation MUST start at t >= 16
 * If edge (1->3) modulation starts at t=15, this is IMPOSSIBLE
- This error indicates Agent 1 failed to account for propagation delays
2. Graph-Temporal Consistency:
- Does every propagated_variation have a corresponding incoming edge?
- Does every demand_source node have at least one outgoing edge?
- Are propagated_variation timings consistent with edge time_lags?
- Is the graph connected to ensure that the effects from demand_source nodes can
propagate to all other nodes?
3. Physical Realism:
- Are all baseline values within similar order of magnitude?
- Do demand_source nodes have amplitude > 0 and exactly one self-generated peak?
- Do propagation nodes have amplitude = 0 and peak = null?
4. Cumulative Delay vs Event Duration:
- Calculate total time lag along critical paths
- Compare to the duration of edge_modulation events describing that path
- If cumulative lag >> event duration, the scenario is unrealistic
If you find logical inconsistencies in the scenario design, this is Agent 1's error.
- Set `error_source: "agent1"`
- Provide specific, actionable suggestions for scenario redesign

OUTPUT FORMAT (STRICT JSON):
You MUST respond with a single JSON object. No markdown blocks, no extra text.
{
  "approved": boolean,
  "error_source": "agent1" | "agent2" | null,
  "feedback": "Brief one-sentence summary for control loop routing",
  "issues": [
    {
      "type": "Parsing Fidelity" | "Scenario Logic",
      "field": "specific field or path (e.g., 'edges[2].time_lag',
      'adjacency_modulation.path_0->1->3')",
      "problem": "Detailed description of the issue",
      "suggestion": "Clear, actionable fix for the responsible agent"
    }
  ],
  "overall_comment": "Comprehensive assessment explaining the decision"
}
Rules:
- If approved=true, set error_source=null and issues=[]
- If approved=false, error_source MUST be either "agent1" or "agent2"
- Step 1 errors always result in error_source="agent2"
- Step 2 errors always result in error_source="agent1"

Original Scenario Description:
{scenario}

Parsed Structured JSON:
{parsed_json}

Begin your two-step diagnostic analysis now.
)PROMPT";

const std::string kJudge2 = R"PROMPT(You are a validation agent responsible for checking if the SDE parameters and
generated time series are reasonable and consistent with the scenario.

Scenario Description (from Agent 2):
{structured_scenario}

SDE Parameters Generated:
{sde_parameters}

Time-Varying Adjacency:
{time_varying_adjacency}
{previous_assessment_section}
Your Task:
Analyze the attached time series visualization and assess:
1. Verification of Fixes: If a previous assessment is provided, first verify if the
suggested changes have been implemented and if the previous issues are resolved.
2. Time Series Patterns: Do the visualized curves match the scenario's
`drift_patterns`? Check for correct transitions between behaviors
(e.g., stable `mean_reverting` or `logistic` trends vs. dynamic `sinusoidal` peaks).
3. Parameter Plausibility: Within each `drift_pattern`, are the SDE parameter
values (kappa, lambda, sigma) reasonable?
4. Baseline Consistency: Is the baseline value consistent across different patterns
for the same node, as described in the scenario?
5. Drift Type Correctness: Does the sequence of assigned drift types in the
parameters match the intended behaviors in the scenario?
6. Coupling Effects: Are the time-varying coupling strengths (edge weights) from
the adjacency matrix correctly reflected in the simulation? For example, during a
'strong' modulation period, is there a visible and significant influence between
the connected nodes?
7. Dependency Flow: Do propagation nodes show clear dependency on the demand source
nodes they are connected to?
8. Simulation Stability: Are there any unrealistic behaviors like explosive growth,
flatlining, or excessive, non-physical oscillations?
9. Noise Level (Sigma): Is the level of noise (random fluctuations) appropriate for
the scenario? If the noise is so large that it completely hides the underlying trend
(e.g., the sinusoidal peak), suggest reducing `sigma`. If the curve looks too smooth
and artificial, suggest increasing `sigma`.

CRITICAL CONSTRAINTS FOR ADJACENCY ISSUES:
- You can give suggestions to increase or decrease the multiplier within the range of
10-20 for 'strong' and 5-10 for 'moderate'.
- If a propagated peak or pattern is not obvious, suggest INCREASING the `multiplier`
for the relevant edge. If a curve is excessively unstable or over-reacts to another
node, suggest DECREASING the `multiplier`.

Response Format:
Provide your assessment in the following JSON format. Focus ONLY on suggesting
specific parameter changes, do not give implementation advice.
```json
{
  "approved": true/false,
  "parameter_issues": [
    {
      "node_id": "node identifier",
      "parameter": "parameter name (e.g., 'kappa', 'baseline', 'drift_type')",
      "current_value": "current value",
      "problem": "description of the problem",
      "suggested_value": "suggested new value or range"
    }
  ],
  "adjacency_issues": [
    {
      "edge": "edge identifier (e.g., '0->1')",
      "problem": "description of the problem",
      "suggestion": "how to fix it"
    }
  ],
  "visual_assessment": "analysis of the time series patterns and their consistency
  with the scenario",
  "overall_comment": "overall assessment and guidance for revision"
}
```

If everything looks good, set "approved": true and keep issue lists empty.
If there are problems, set "approved": false and provide detailed suggestions.
)PROMPT";

const std::string kQaEtiological = R"PROMPT(You are given spatio-temporal context. Produce a multiple-choice item where the
correct option is a concise macro summary of the Scenario Context.

Scenario: {scenario}

Requirements:
1) "observation": A concise macro summary of the Scenario in 12-20 words.
   - It must describe the system at a high level (e.g., an interconnected hydroponics
   circulation system, a wastewater treatment facility, etc.). Facility names are not
   important; do not invent new names.
   - It must explicitly mention the key node variables provided.
2) "options": list of exactly four scenario summaries (each <20 words) without
labels.
   - The FIRST entry must be identical to "observation" (verbatim match).
   - The other three must be fluent but incorrect (they must contradict the Scenario
   or mention entities/processes not present in the Scenario/Involved Nodes).

Output JSON format:
{
    "observation": "observed phenomena",
    "options": ["Correct summary", "Distractor 1", "Distractor 2", "Distractor 3"]
}

Strictly based on given context, do not introduce external knowledge. Return only a
valid JSON object, without any explanations outside JSON.
)PROMPT";

const std::string kQaEntity = R"PROMPT(You are given a node ID and its correct name and description from a spatio-temporal
network simulation.
Your task is to generate a multiple-choice question to identify which
(name, description) pair corresponds to the target node.

Target Node:
- ID: {node_id}
- Correct Name: {node_name}
- Correct Description: {node_description}

Requirements:
1) "options": list of exactly four strings containing (name, description) pairs.
Do NOT prefix with labels.
   - The FIRST entry must be the correct pair (verbatim match to the given name
   and description).
   - The remaining three must be fluent but !!!incorrect!!!.
       - They should describe plausible but different node roles or locations.
       - Maintain the same style and variable domain (e.g., "traffic flow",
       "industrial output", "water pressure").
       - Avoid contradictions or unrealistic content.

Output JSON format:
{
    "question": "Which (name, description) pair should Node {node_id}
    correspond to?",
    "options": ["Correct pair", "Distractor 1", "Distractor 2", "Distractor 3"]
}

Strictly return only a valid JSON object. Do not add explanations outside JSON.
)PROMPT";

const std::string kQaCorrelationDirect = R"PROMPT(You are a question designer for a spatio-temporal reasoning test.
Your task is to create a multiple-choice question based on a given piece of
true evidence of a causal influence.

True Evidence:
- Source Node: {source_node_name} (ID: {source_node_id})
- Target Node: {target_node_name} (ID: {target_node_id})
- Time Steps: {time_period} (1 time step = {sampling_frequency})
- Correct Description of Event: "{correct_description}"

Your Task:
1.  Create a "question" that asks which statement best describes the influence on
Node {target_node_id} during the specified time steps.
    - Explicitly use the phrase "time steps {time_period}" in the question text and
    append "(1 time step = {sampling_frequency})".
2.  Create an "options" list containing exactly four strings. The FIRST entry MUST
be the Correct Description provided above, verbatim.
3.  The remaining three entries must be plausible but incorrect distractors
describing different sources or incorrect effects.

Output Format:
Return ONLY a valid JSON object.
{
    "question": "Your generated question.",
    "options": ["The correct description verbatim", "Distractor 1", "Distractor 2"
    , "Distractor 3"]
}
)PROMPT";

const std::string kQaCorrelationMultihop = R"PROMPT(You are an expert in spatio-temporal network analysis. Your task is to analyze a set
of direct causal events and identify a multi-hop propagation path to create a
multiple-choice question.

Given Direct Causal Events (Adjacency Modulations):
{adjacency_modulations}

Time Step Note: 1 time step = {sampling_frequency}

Your Task:
1.  Analyze the events: Find a sequence of events that form a logical multi-hop path.
The time periods of the events should be overlapping or consecutive.
2.  Synthesize a description: Create a concise, high-level description for the
entire multi-hop event. This will be your correct answer.
3.  Identify Nodes and Time: State the start node, end node, and the overall time
window for the multi-hop event in terms of time steps.
4.  Generate a Question: Create a "question" asking for the most appropriate
description of the relationship between the start and end nodes during those
time steps.
    - Explicitly reference the interval as "time steps X-Y" and append
    "(1 time step = {sampling_frequency})" in the question text.
5.  Generate Options: Create an "options" list with exactly four strings.
The FIRST entry must be your synthesized description. The other three should be
plausible but incorrect distractors.

Output Format:
Return ONLY a valid JSON object.
{
    "question": "Your generated question about the multi-hop relationship.",
    "options": ["Your synthesized correct description", "Distractor 1",
        "Distractor 2", "Distractor 3"]
}
)PROMPT";

const std::string kQaForecast = R"PROMPT(Analyze the provided context and generate a detailed forecast description.

Scenario Details:
- Target Node: {target_node_name} (ID: {target_node_id})
- Variable: {target_node_variable}
- Observation Window: Steps {history_window}
- Prediction Window: Steps {prediction_window}
- Key Event: {events}
- Statistical Hints: {referenced_stats}

Task:
Based *only* on the information above, provide a JSON object describing the forecast.

Output Format:
```json
{
  "observation_window": "{history_window}",
  "prediction_window": "{prediction_window}",
  "prediction_length": {prediction_length},
  "target_node_id": {target_node_id},
  "context_description": "{events}",
  "summary": "text describing the expected behaviour during the prediction window",
  "confidence": "low/medium/high"
}
```
)PROMPT";

const std::string kSpatialEffect = R"PROMPT(Does this response correctly reason with spatial/graph structure?

YES requires BOTH:
1. References graph structure (edges, connections, node relationships)
2. Uses it to reason about the answer (e.g., "A influences B because of edge A→B",
"propagation follows the graph", "connected nodes show similar patterns")

NO if:
- Only describes the graph without reasoning with it
- Only analyzes nodes independently
- Mentions structure but reasoning is incorrect or irrelevant

Question: {question}
Response: {response}

Label: yes or no
)PROMPT";

struct TemplateInfo {
    const std::string* text;
    std::vector<std::string> placeholders;
};

const std::map<TemplateId, TemplateInfo>& registry() {
    static const std::map<TemplateId, TemplateInfo> table = {
        {TemplateId::agent1, {&kAgent1, {"num_nodes", "max_seq_len"}}},
        {TemplateId::agent2, {&kAgent2, {"scenario"}}},
        {TemplateId::agent3, {&kAgent3, {"structured_scenario"}}},
        {TemplateId::agent4, {&kAgent4, {"structured_scenario"}}},
        {TemplateId::judge1, {&kJudge1, {"expected_num_nodes", "scenario", "parsed_json"}}},
        {TemplateId::judge2,
         {&kJudge2,
          {"structured_scenario", "sde_parameters", "time_varying_adjacency",
           "previous_assessment_section"}}},
        {TemplateId::qa_etiological, {&kQaEtiological, {"scenario"}}},
        {TemplateId::qa_entity,
         {&kQaEntity, {"node_id", "node_name", "node_description"}}},
        {TemplateId::qa_correlation_direct,
         {&kQaCorrelationDirect,
          {"source_node_name", "source_node_id", "target_node_name", "target_node_id",
           "time_period", "sampling_frequency", "correct_description"}}},
        {TemplateId::qa_correlation_multihop,
         {&kQaCorrelationMultihop, {"adjacency_modulations", "sampling_frequency"}}},
        {TemplateId::qa_forecast,
         {&kQaForecast,
          {"target_node_name", "target_node_id", "target_node_variable",
           "history_window", "prediction_window", "events", "referenced_stats",
           "prediction_length"}}},
        {TemplateId::spatial_effect, {&kSpatialEffect, {"question", "response"}}},
    };
    return table;
}

}  // namespace

std::string to_string(TemplateId id) {
    switch (id) {
        case TemplateId::agent1: return "agent1";
        case TemplateId::agent2: return "agent2";
        case TemplateId::agent3: return "agent3";
        case TemplateId::agent4: return "agent4";
        case TemplateId::judge1: return "judge1";
        case TemplateId::judge2: return "judge2";
        case TemplateId::qa_etiological: return "qa_etiological";
        case TemplateId::qa_entity: return "qa_entity";
        case TemplateId::qa_correlation_direct: return "qa_correlation_direct";
        case TemplateId::qa_correlation_multihop: return "qa_correlation_multihop";
        case TemplateId::qa_forecast: return "qa_forecast";
        case TemplateId::spatial_effect: return "spatial_effect";
    }
    return "agent1";
}

TemplateId template_from_name(const std::string& name) {
    for (const auto& [id, info] : registry()) {
        if (to_string(id) == name) return id;
    }
    throw TemplateError("unknown template id '" + name + "'");
}

const std::string& template_text(TemplateId id) { return *registry().at(id).text; }

const std::vector<std::string>& required_placeholders(TemplateId id) {
    return registry().at(id).placeholders;
}

std::string render_prompt(TemplateId id,
                          const std::map<std::string, std::string>& context) {
    const TemplateInfo& info = registry().at(id);
    std::string out = *info.text;
    for (const auto& name : info.placeholders) {
        auto it = context.find(name);
        if (it == context.end()) {
            throw TemplateError("template '" + to_string(id) +
                                "' is missing placeholder '" + name + "'");
        }
        const std::string token = "{" + name + "}";
        for (auto pos = out.find(token); pos != std::string::npos;
             pos = out.find(token, pos + it->second.size())) {
            out.replace(pos, token.size(), it->second);
        }
    }
    return out;
}

}  // namespace stsim
