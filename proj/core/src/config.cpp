#include "trimode/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "trimode/constants.hpp"

namespace trimode {

namespace {

std::string trim(std::string_view s) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& key, const std::string& value) {
    double v = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw std::invalid_argument("config value for '" + key + "' is not a number: '" + value + "'");
    }
    return v;
}

// one field that may be given directly (rad/s or plain units) or as a _hz
// variant scaled by 2*pi; giving both is ambiguous and refused
bool read_field(const ConfigMap& cfg, const std::string& key, bool has_hz_variant,
                double& out) {
    const auto direct = cfg.find(key);
    const auto hz = has_hz_variant ? cfg.find(key + "_hz") : cfg.end();
    if (direct != cfg.end() && hz != cfg.end()) {
        throw std::invalid_argument("config gives both '" + key + "' and '" + key + "_hz'");
    }
    if (direct != cfg.end()) {
        out = parse_double(key, direct->second);
        return true;
    }
    if (hz != cfg.end()) {
        out = two_pi * parse_double(key + "_hz", hz->second);
        return true;
    }
    return false;
}

struct FieldSpec {
    const char* name;
    bool has_hz;
    double SystemParams::* member;
};

constexpr FieldSpec system_fields[] = {
    {"omega_m", true, &SystemParams::omega_m},
    {"Omega", true, &SystemParams::Omega},
    {"mass", false, &SystemParams::mass},
    {"quality", false, &SystemParams::quality},
    {"finesse", false, &SystemParams::finesse},
    {"cavity_length", false, &SystemParams::cavity_length},
    {"pump_power", false, &SystemParams::pump_power},
    {"laser_wavelength", false, &SystemParams::laser_wavelength},
    {"detuning", true, &SystemParams::detuning},
    {"chi", false, &SystemParams::chi},
    {"zeta", false, &SystemParams::zeta},
    {"temperature", false, &SystemParams::temperature},
};

struct ProbeFieldSpec {
    const char* name;
    bool has_hz;
    double ProbeParams::* member;
};

constexpr ProbeFieldSpec probe_fields[] = {
    {"kappa_p", true, &ProbeParams::kappa_p},
    {"zeta_p", false, &ProbeParams::zeta_p},
    {"eta_p", false, &ProbeParams::eta_p},
    {"delta_p_tilde", true, &ProbeParams::delta_p_tilde},
    {"tau_m", false, &ProbeParams::tau_m},
};

} // namespace

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap cfg;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        }
        std::string key = trim(std::string_view(stripped).substr(0, eq));
        std::string value = trim(std::string_view(stripped).substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
        }
        if (!cfg.emplace(key, value).second) {
            throw std::invalid_argument("config duplicates key '" + key + "'");
        }
    }
    return cfg;
}

ConfigMap load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::invalid_argument("cannot open config file: " + path);
    }
    std::ostringstream os;
    os << f.rdbuf();
    return parse_config_text(os.str());
}

SystemParams params_from_config(const ConfigMap& cfg, const std::vector<std::string>& consumed) {
    SystemParams p;
    for (const FieldSpec& f : system_fields) {
        double v = 0.0;
        if (read_field(cfg, f.name, f.has_hz, v)) {
            p.*(f.member) = v;
        }
    }
    // reject typos: every key must be a parameter, a _hz variant, or one the
    // caller already handled
    const auto& known = known_param_keys();
    for (const auto& [key, value] : cfg) {
        if (std::find(known.begin(), known.end(), key) != known.end()) continue;
        if (std::find(consumed.begin(), consumed.end(), key) != consumed.end()) continue;
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
    validate(p);
    return p;
}

ProbeParams probe_params_from_config(const ConfigMap& cfg, const SystemParams& sys) {
    ProbeParams p = default_probe_for(sys);
    for (const ProbeFieldSpec& f : probe_fields) {
        double v = 0.0;
        if (read_field(cfg, f.name, f.has_hz, v)) {
            p.*(f.member) = v;
        }
    }
    return p;
}

void set_param_field(SystemParams& p, const std::string& name, double value) {
    for (const FieldSpec& f : system_fields) {
        if (name == f.name) {
            p.*(f.member) = value;
            return;
        }
    }
    throw std::invalid_argument("unknown parameter field '" + name + "'");
}

double get_param_field(const SystemParams& p, const std::string& name) {
    for (const FieldSpec& f : system_fields) {
        if (name == f.name) return p.*(f.member);
    }
    throw std::invalid_argument("unknown parameter field '" + name + "'");
}

const std::vector<std::string>& param_field_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const FieldSpec& f : system_fields) n.push_back(f.name);
        return n;
    }();
    return names;
}

const std::vector<std::string>& known_param_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const FieldSpec& f : system_fields) {
            k.push_back(f.name);
            if (f.has_hz) k.push_back(std::string(f.name) + "_hz");
        }
        for (const ProbeFieldSpec& f : probe_fields) {
            k.push_back(f.name);
            if (f.has_hz) k.push_back(std::string(f.name) + "_hz");
        }
        return k;
    }();
    return keys;
}

std::string canonicalize(const ConfigMap& cfg) {
    // ConfigMap is an ordered map, so iteration is already sorted by key;
    // numeric values are reprinted so "1e2" and "100" hash identically
    std::ostringstream os;
    char buf[64];
    for (const auto& [key, value] : cfg) {
        double v = 0.0;
        const char* first = value.data();
        const char* last = value.data() + value.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec == std::errc() && ptr == last) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << key << "=" << buf << "\n";
        } else {
            os << key << "=" << value << "\n";
        }
    }
    return os.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace trimode
