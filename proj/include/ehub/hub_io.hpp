#pragma once

#include <string>

#include "ehub/hub_model.hpp"

namespace ehub {

/// Hub description as JSON. Sections: `energies`, `grid`, `converters`,
/// `storages`, optional `defaults`. Unknown keys are rejected.
HubSpec parse_hub_spec(const std::string& text, const std::string& origin = "<hub>");
HubSpec load_hub_spec(const std::string& path);
std::string hub_spec_to_json(const HubSpec& spec);

/// Reads a whole file, throwing DataError if it cannot be opened.
std::string read_text_file(const std::string& path);

/// Converts a byte offset into 1-based line and column.
void locate_offset(const std::string& text, std::size_t offset, int& line, int& column);

}  // namespace ehub
