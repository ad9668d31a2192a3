#include "trimode/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "trimode/lyapunov.hpp"

namespace trimode {

namespace {

std::atomic<std::uint64_t> g_point_count{0};

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const std::vector<std::string>& all_report_fields() {
    static const std::vector<std::string> fields = {
        "e_ac", "e_mc", "e_am", "e_a_mc", "e_m_ac", "e_c_am",
        "g_tri_proxy", "tripartite_class", "stability_margin",
    };
    return fields;
}

double report_field(const EntanglementReport& r, const std::string& name) {
    if (name == "e_ac") return r.e_ac;
    if (name == "e_mc") return r.e_mc;
    if (name == "e_am") return r.e_am;
    if (name == "e_a_mc") return r.e_a_mc;
    if (name == "e_m_ac") return r.e_m_ac;
    if (name == "e_c_am") return r.e_c_am;
    if (name == "g_tri_proxy") return r.g_tri_proxy;
    if (name == "stability_margin") return r.stability_margin;
    throw std::invalid_argument("unknown report field '" + name + "'");
}

void validate_spec(const SweepSpec& spec) {
    if (spec.axes.empty() || spec.axes.size() > 2) {
        throw std::invalid_argument("sweep needs 1 or 2 axes");
    }
    const auto& names = param_field_names();
    for (const AxisSpec& a : spec.axes) {
        if (a.count < 1) {
            throw std::invalid_argument("axis '" + a.name + "' needs a positive point count");
        }
        if (a.log && (!(a.min > 0.0) || !(a.max > 0.0))) {
            throw std::invalid_argument("log axis '" + a.name + "' needs positive bounds");
        }
        if (a.name != "coupling_ratio" &&
            std::find(names.begin(), names.end(), a.name) == names.end()) {
            throw std::invalid_argument("axis '" + a.name + "' is not a parameter field");
        }
    }
    for (const std::string& f : spec.fields) {
        const auto& all = all_report_fields();
        if (std::find(all.begin(), all.end(), f) == all.end()) {
            throw std::invalid_argument("unknown report field '" + f + "' in sweep spec");
        }
    }
    for (const auto& [key, value] : spec.overrides) {
        if (std::find(names.begin(), names.end(), key) == names.end()) {
            throw std::invalid_argument("override '" + key + "' is not a parameter field");
        }
    }
}

SystemParams point_params(const SystemParams& base, const SweepSpec& spec,
                          const std::vector<double>& axis_values) {
    SystemParams p = base;
    for (const auto& [key, value] : spec.overrides) {
        set_param_field(p, key, value);
    }
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
        const std::string& name = spec.axes[a].name;
        const double v = axis_values[a];
        if (name == "coupling_ratio") {
            // zeta/chi = v at fixed product chi*zeta = chi0^2
            const double chi0 = p.chi;
            p.chi = chi0 / std::sqrt(v);
            p.zeta = chi0 * std::sqrt(v);
        } else {
            set_param_field(p, name, v);
        }
    }
    if (spec.tie_zeta_to_chi) {
        p.zeta = p.chi;
    }
    return p;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::filesystem::path cache_dir() {
    const char* dir = std::getenv("TRIMODE_CACHE_DIR");
    if (dir == nullptr || *dir == '\0') return {};
    return std::filesystem::path(dir);
}

} // namespace

std::vector<double> AxisSpec::values() const {
    if (count < 1) {
        throw std::invalid_argument("axis '" + name + "' needs a positive point count");
    }
    std::vector<double> vs(static_cast<std::size_t>(count));
    if (count == 1) {
        vs[0] = min;
        return vs;
    }
    if (log) {
        const double l0 = std::log10(min);
        const double l1 = std::log10(max);
        for (int i = 0; i < count; ++i) {
            vs[static_cast<std::size_t>(i)] =
                std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / (count - 1));
        }
        vs.back() = max;
    } else {
        for (int i = 0; i < count; ++i) {
            vs[static_cast<std::size_t>(i)] =
                min + (max - min) * static_cast<double>(i) / (count - 1);
        }
        vs.back() = max;
    }
    return vs;
}

FigurePreset figure_preset(const std::string& name) {
    FigurePreset fp;
    fp.name = name;
    fp.base = SystemParams{};  // the standard working point
    fp.spec.name = name;
    const double wm = fp.base.omega_m;

    if (name == "fig2a" || name == "fig2b") {
        // entanglement over the (detuning, chi) plane, zeta tied to chi;
        // detuning starts one grid step above zero, chi includes zero
        fp.spec.axes = {
            {"detuning", 3.0 * wm / 60.0, 3.0 * wm, 60, false},
            {"chi", 0.0, 300.0, 60, false},
        };
        fp.spec.tie_zeta_to_chi = true;
        fp.spec.fields = {name == "fig2a" ? "e_ac" : "e_mc", "stability_margin"};
    } else if (name == "fig2c") {
        fp.spec.axes = {{"temperature", 1e-6, 1e-3, 25, true}};
        fp.spec.fields = {"e_ac", "e_mc"};
    } else if (name == "fig3a") {
        // coupling-ratio sweep at fixed product chi*zeta = (100/s)^2
        fp.spec.axes = {{"coupling_ratio", 0.5, 2.0, 31, false}};
        fp.spec.fields = {"e_ac", "e_mc"};
    } else if (name == "fig3b") {
        fp.base.temperature = 1e-6;
        fp.base.finesse = 4e4;
        fp.spec.axes = {{"Omega", 0.5 * wm, 3.0 * wm, 51, false}};
        fp.spec.fields = {"e_ac"};
    } else if (name == "fig4") {
        fp.spec.axes = {{"temperature", 2e-5, 1e-2, 21, true}};
        fp.spec.fields = {"e_a_mc", "e_m_ac", "e_c_am", "e_ac", "e_mc",
                          "g_tri_proxy", "tripartite_class"};
    } else {
        throw std::invalid_argument("unknown preset '" + name + "' (have: fig2a fig2b fig2c fig3a fig3b fig4)");
    }
    return fp;
}

std::vector<std::string> preset_names() {
    return {"fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4"};
}

EntanglementReport run_point(const SystemParams& p) {
    g_point_count.fetch_add(1, std::memory_order_relaxed);
    validate(p);
    const Matrix6 K = drift_matrix(p);
    const StabilityReport st = stability(K);
    if (!st.stable) {
        EntanglementReport rep;
        rep.e_ac = rep.e_mc = rep.e_am = nan_value;
        rep.e_a_mc = rep.e_m_ac = rep.e_c_am = nan_value;
        rep.g_tri_proxy = nan_value;
        rep.tripartite_class.clear();
        rep.stability_margin = st.margin;
        rep.stable = false;
        return rep;
    }
    const Matrix6 V = solve_lyapunov(K, diffusion_matrix(p));
    return analyze(V, st.margin);
}

std::uint64_t point_count() { return g_point_count.load(); }
void reset_point_count() { g_point_count.store(0); }

SweepSpec sweep_spec_from_config(const ConfigMap& cfg, const std::string& name) {
    SweepSpec spec;
    spec.name = name;

    auto parse_axis = [](const std::string& text, const std::string& key) {
        // "<field> <min> <max> <count> <lin|log>"
        std::istringstream is(text);
        AxisSpec a;
        std::string scale;
        if (!(is >> a.name >> a.min >> a.max >> a.count >> scale) ||
            (scale != "lin" && scale != "log")) {
            throw std::invalid_argument("bad " + key + ": expected '<field> <min> <max> <count> <lin|log>'");
        }
        std::string extra;
        if (is >> extra) {
            throw std::invalid_argument("trailing tokens in " + key);
        }
        a.log = scale == "log";
        return a;
    };

    std::vector<std::string> consumed;
    if (const auto it = cfg.find("axis"); it != cfg.end()) {
        spec.axes.push_back(parse_axis(it->second, "axis"));
        consumed.push_back("axis");
    } else {
        throw std::invalid_argument("sweep spec needs an 'axis' key");
    }
    if (const auto it = cfg.find("axis2"); it != cfg.end()) {
        spec.axes.push_back(parse_axis(it->second, "axis2"));
        consumed.push_back("axis2");
    }
    if (const auto it = cfg.find("fields"); it != cfg.end()) {
        std::istringstream is(it->second);
        std::string field;
        while (std::getline(is, field, ',')) {
            if (const auto b = field.find_first_not_of(" \t"); b != std::string::npos) {
                const auto e = field.find_last_not_of(" \t");
                spec.fields.push_back(field.substr(b, e - b + 1));
            }
        }
        consumed.push_back("fields");
    }
    if (const auto it = cfg.find("tie_zeta_to_chi"); it != cfg.end()) {
        spec.tie_zeta_to_chi = it->second == "1" || it->second == "true";
        consumed.push_back("tie_zeta_to_chi");
    }

    // every remaining key is a fixed parameter override; reuse the params
    // builder for _hz handling and typo rejection, then read the fields back
    ConfigMap rest;
    for (const auto& [key, value] : cfg) {
        if (std::find(consumed.begin(), consumed.end(), key) == consumed.end()) {
            rest.emplace(key, value);
        }
    }
    const SystemParams defaults;
    const SystemParams overridden = params_from_config(rest);
    for (const std::string& field : param_field_names()) {
        const double was = get_param_field(defaults, field);
        const double now = get_param_field(overridden, field);
        if (was != now) {
            spec.overrides[field] = now;
        }
    }
    validate_spec(spec);
    return spec;
}

SweepTable run_sweep(const SystemParams& base, const SweepSpec& spec, int n_threads) {
    validate_spec(spec);

    std::vector<std::vector<double>> grids;
    grids.reserve(spec.axes.size());
    for (const AxisSpec& a : spec.axes) {
        grids.push_back(a.values());
    }
    std::size_t total = 1;
    for (const auto& g : grids) total *= g.size();

    SweepTable table;
    table.name = spec.name;
    for (const AxisSpec& a : spec.axes) table.axis_names.push_back(a.name);
    table.fields = spec.fields.empty() ? all_report_fields() : spec.fields;
    table.rows.resize(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= total) break;
            SweepRow& row = table.rows[idx];
            // axis-major order: the first axis is the outermost loop
            std::vector<double> values(spec.axes.size());
            std::size_t rem = idx;
            for (std::size_t a = spec.axes.size(); a-- > 0;) {
                values[a] = grids[a][rem % grids[a].size()];
                rem /= grids[a].size();
            }
            row.axis_values = values;
            try {
                row.report = run_point(point_params(base, spec, values));
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    unsigned workers = n_threads > 0 ? static_cast<unsigned>(n_threads) : hw;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(total));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return table;
}

std::string sweep_to_csv(const SweepTable& t) {
    std::ostringstream os;
    for (std::size_t a = 0; a < t.axis_names.size(); ++a) {
        os << csv_escape(t.axis_names[a]) << ",";
    }
    for (std::size_t f = 0; f < t.fields.size(); ++f) {
        os << csv_escape(t.fields[f]) << ",";
    }
    os << "stable,error\r\n";

    for (const SweepRow& row : t.rows) {
        for (double v : row.axis_values) {
            os << format_double(v) << ",";
        }
        for (const std::string& field : t.fields) {
            if (row.error.empty()) {
                if (field == "tripartite_class") {
                    os << csv_escape(row.report.tripartite_class);
                } else {
                    const double v = report_field(row.report, field);
                    if (!std::isnan(v)) os << format_double(v);
                }
            }
            os << ",";
        }
        if (row.error.empty()) {
            os << (row.report.stable ? "true" : "false") << ",";
        } else {
            os << ",";
        }
        os << csv_escape(row.error) << "\r\n";
    }
    return os.str();
}

std::string sweep_to_json(const SweepTable& t) {
    nlohmann::json j;
    j["name"] = t.name;
    j["axes"] = t.axis_names;
    j["fields"] = t.fields;
    nlohmann::json rows = nlohmann::json::array();
    for (const SweepRow& row : t.rows) {
        nlohmann::json r;
        for (std::size_t a = 0; a < t.axis_names.size(); ++a) {
            r[t.axis_names[a]] = row.axis_values[a];
        }
        if (!row.error.empty()) {
            r["error"] = row.error;
        } else {
            for (const std::string& field : t.fields) {
                if (field == "tripartite_class") {
                    if (row.report.tripartite_class.empty()) {
                        r[field] = nullptr;
                    } else {
                        r[field] = row.report.tripartite_class;
                    }
                } else {
                    const double v = report_field(row.report, field);
                    if (std::isnan(v)) {
                        r[field] = nullptr;
                    } else {
                        r[field] = v;
                    }
                }
            }
            r["stable"] = row.report.stable;
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2);
}

std::string sweep_cache_key(const SystemParams& base, const SweepSpec& spec) {
    // everything that can change the output bytes goes into the key
    ConfigMap canon;
    canon.emplace("code_version", std::string(version_string));
    canon.emplace("sweep_name", spec.name);
    canon.emplace("tie_zeta_to_chi", spec.tie_zeta_to_chi ? "1" : "0");
    for (const std::string& field : param_field_names()) {
        canon.emplace("base." + field, format_double(get_param_field(base, field)));
    }
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
        const AxisSpec& ax = spec.axes[a];
        canon.emplace("axis" + std::to_string(a),
                      ax.name + " " + format_double(ax.min) + " " + format_double(ax.max) +
                          " " + std::to_string(ax.count) + " " + (ax.log ? "log" : "lin"));
    }
    for (const auto& [key, value] : spec.overrides) {
        canon.emplace("override." + key, format_double(value));
    }
    std::string fields;
    for (const std::string& f : spec.fields) fields += f + ",";
    canon.emplace("fields", fields);

    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonicalize(canon))));
    return buf;
}

std::optional<std::string> cache_lookup(const std::string& key, const std::string& kind) {
    const std::filesystem::path dir = cache_dir();
    if (dir.empty()) return std::nullopt;
    const std::filesystem::path file = dir / (key + "." + kind);
    std::ifstream f(file, std::ios::binary);
    if (!f) return std::nullopt;
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void cache_store(const std::string& key, const std::string& kind, const std::string& bytes) {
    const std::filesystem::path dir = cache_dir();
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    const std::filesystem::path file = dir / (key + "." + kind);
    const std::filesystem::path tmp = dir / (key + "." + kind + ".tmp");
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!f) {
            throw std::runtime_error("cache write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, file);
}

SweepOutputs run_sweep_cached(const SystemParams& base, const SweepSpec& spec, int n_threads) {
    const std::string key = sweep_cache_key(base, spec);
    SweepOutputs out;
    auto csv = cache_lookup(key, "csv");
    auto json = cache_lookup(key, "json");
    if (csv && json) {
        out.csv = std::move(*csv);
        out.json = std::move(*json);
        out.cache_hit = true;
        return out;
    }
    const SweepTable table = run_sweep(base, spec, n_threads);
    out.csv = sweep_to_csv(table);
    out.json = sweep_to_json(table);
    cache_store(key, "csv", out.csv);
    cache_store(key, "json", out.json);
    return out;
}

} // namespace trimode
