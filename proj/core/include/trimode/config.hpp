#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "trimode/params.hpp"
#include "trimode/probe.hpp"

namespace trimode {

// flat key = value text, UTF-8, '#' comments, blank lines ignored;
// duplicate keys are an error
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::string& path);

// Builds SystemParams from a config map. Keys match the field names; any
// frequency field also accepts a "<name>_hz" variant converted by 2*pi
// (giving both spellings of one field is an error). Unknown keys throw
// unless listed in `consumed` (callers pass the keys they handled
// themselves, e.g. sweep-axis or probe keys).
SystemParams params_from_config(const ConfigMap& cfg,
                                const std::vector<std::string>& consumed = {});

// probe overrides on top of default_probe_for(sys): kappa_p, zeta_p, eta_p,
// delta_p_tilde, tau_m (plus _hz variants of the two rates in rad/s)
ProbeParams probe_params_from_config(const ConfigMap& cfg, const SystemParams& sys);

// keys the params/probe builders understand (used for strict-mode checks)
const std::vector<std::string>& known_param_keys();

// field access by name (rad/s and SI values, no _hz conversion); used by the
// sweep engine; unknown names throw
void set_param_field(SystemParams& p, const std::string& name, double value);
double get_param_field(const SystemParams& p, const std::string& name);
const std::vector<std::string>& param_field_names();

// stable canonical form: sorted keys, numeric values reprinted at 17
// significant digits; basis of the sweep cache key
std::string canonicalize(const ConfigMap& cfg);

std::uint64_t fnv1a64(std::string_view bytes);

} // namespace trimode
