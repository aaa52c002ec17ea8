#pragma once
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "rayforge/json_io.hpp"

namespace rayforge {

enum ExitCode { kOk = 0, kUsage = 2, kNumeric = 3, kRejected = 4 };

struct RunConfig {
    std::string command;
    std::uint64_t seed = 1;
    double tol = 1e-10;
    double cap = kDefaultCap;
    int max_depth = 200;
    int max_iter = 50;
    std::string format = "json";
    int verbosity = 0;
    json args = json::object();  // command specific inputs, echoed back
};

json run_config_to_json(const RunConfig& c);

// argv[0] is the program name; the thread count never reaches the output
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace rayforge
