#pragma once

#include <map>
#include <string>
#include <vector>

namespace stsim {

enum class TemplateId {
    agent1,
    agent2,
    agent3,
    agent4,
    judge1,
    judge2,
    qa_etiological,
    qa_entity,
    qa_correlation_direct,
    qa_correlation_multihop,
    qa_forecast,
    spatial_effect,
};

std::string to_string(TemplateId id);
TemplateId template_from_name(const std::string& name);

/// Raw template text with {placeholder} tokens.
const std::string& template_text(TemplateId id);

/// Placeholders the template requires, in order of first appearance.
const std::vector<std::string>& required_placeholders(TemplateId id);

/// Verbatim template with every required placeholder substituted; throws
/// TemplateError naming the first placeholder missing from the context.
std::string render_prompt(TemplateId id,
                          const std::map<std::string, std::string>& context);

}  // namespace stsim
