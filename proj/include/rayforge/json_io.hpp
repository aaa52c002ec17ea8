#pragma once
#include <string>

#include <json.hpp>

#include "rayforge/thurston.hpp"

namespace rayforge {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "rayforge/1";

json cplx_to_json(cplx z);
// accepts {"re":..,"im":..} or [re, im] or a bare real
cplx cplx_from_json(const json& j);

json map_to_json(const PolyExpMap& f);
PolyExpMap map_from_json(const json& j);

json address_to_json(const Address& a);
Address address_from_json(const json& j);

json spec_to_json(const TargetSpec& s);
TargetSpec spec_from_json(const json& j);

json grid_to_json(const MarkedGrid& g);
// grid of a run: the straight grid of the spec plus the stored offsets
MarkedGrid grid_from_json(const TargetSpec& spec, const json& delta);

json certificate_to_json(const Certificate& c);
json tract_config_to_json(const TractConfig& c);
json disk_report_to_json(const DiskBoundReport& r);
json invariant_row_to_json(const InvariantRow& r);

json word_to_json(const Word& w);

json read_json_file(const std::string& path);  // throws DomainError on I/O or parse errors

// %.17g, the CSV convention
std::string fmt_double(double x);

}  // namespace rayforge
