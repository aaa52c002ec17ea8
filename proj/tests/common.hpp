#pragma once
#include <string>

#include "rayforge/json_io.hpp"

#ifndef RAYFORGE_DATA
#define RAYFORGE_DATA "data"
#endif

inline std::string data_path(const std::string& rel) { return std::string(RAYFORGE_DATA) + "/" + rel; }

inline rayforge::PolyExpMap load_map(const std::string& rel) {
    return rayforge::map_from_json(rayforge::read_json_file(data_path(rel)));
}
inline rayforge::Address load_address(const std::string& rel) {
    return rayforge::address_from_json(rayforge::read_json_file(data_path(rel)));
}
inline rayforge::TargetSpec load_spec(const std::string& rel) {
    return rayforge::spec_from_json(rayforge::read_json_file(data_path(rel)));
}

inline const char* kShippedAddresses[] = {"zero",        "one",       "minus_one",   "pre_7_m3_per_2",
                                          "alt_1_m1",    "alt_0_1",   "pre_2_per_0", "per_3_m2_0"};

inline bool rel_close(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b));
}
