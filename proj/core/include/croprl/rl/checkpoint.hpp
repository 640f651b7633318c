#pragma once

#include <filesystem>
#include <iosfwd>

#include "croprl/rl/policy.hpp"

namespace croprl::rl {

/// Versioned text checkpoint: layout, action map, every network parameter
/// and the observation statistics, with doubles written as hex floats so a
/// save/load round trip is bit-exact.
void write_checkpoint(std::ostream& out, const Agent& agent);
Agent read_checkpoint(std::istream& in, const std::string& source = "<stream>");

/// Written to a temporary file first and renamed into place.
void save_checkpoint(const std::filesystem::path& path, const Agent& agent);
Agent load_checkpoint(const std::filesystem::path& path);

}  // namespace croprl::rl
