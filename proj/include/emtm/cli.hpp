#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace emtm {

// Exit codes: 0 success, 2 validation error, 3 computation error.
int run_cli(int argc, char** argv);

// Runs one config document and writes CSV tables plus meta.json into out_dir.
// Throws ValidationError / ComputationError.
void run_config(const nlohmann::json& config, const std::string& out_dir, const std::string& base_dir = ".");

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace emtm
