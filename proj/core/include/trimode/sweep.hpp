#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trimode/config.hpp"
#include "trimode/entanglement.hpp"
#include "trimode/params.hpp"

namespace trimode {

// one sweep axis; `name` is a SystemParams field, or the preset-only derived
// axis "coupling_ratio" r, which ties zeta/chi = r at fixed product
// chi*zeta = chi0^2 (chi = chi0/sqrt(r), zeta = chi0*sqrt(r))
struct AxisSpec {
    std::string name;
    double min = 0;
    double max = 0;
    int count = 0;
    bool log = false;

    std::vector<double> values() const;
};

struct SweepSpec {
    std::string name;                        // preset name or spec-file stem
    std::vector<AxisSpec> axes;              // 1 or 2 axes
    std::map<std::string, double> overrides; // fixed parameter overrides on the base
    std::vector<std::string> fields;         // report columns; empty = all
    bool tie_zeta_to_chi = false;            // set zeta = chi after axis application
};

struct FigurePreset {
    std::string name;
    SystemParams base;
    SweepSpec spec;
};

// fig2a, fig2b: entanglement over the (detuning, chi) plane at T = 10 uK
// fig2c:        temperature sweep of the two pair negativities
// fig3a:        coupling-ratio sweep at fixed product
// fig3b:        atomic-frequency sweep at T = 1 uK, finesse 4e4
// fig4:         temperature sweep of the one-vs-two cuts and the residual
FigurePreset figure_preset(const std::string& name);
std::vector<std::string> preset_names();

// full pipeline at one parameter point: rates -> steady state -> drift ->
// stability -> covariance -> entanglement report. Unstable points come back
// with stable = false and NaN measures (serialized as nulls), never a throw.
EntanglementReport run_point(const SystemParams& p);

// instrumentation: run_point invocations since last reset (sweeps must issue
// exactly one per grid point)
std::uint64_t point_count();
void reset_point_count();

struct SweepRow {
    std::vector<double> axis_values;  // one per axis, same order as spec.axes
    EntanglementReport report;
    std::string error;  // non-empty when this point failed to evaluate
};

struct SweepTable {
    std::string name;
    std::vector<std::string> axis_names;
    std::vector<std::string> fields;
    std::vector<SweepRow> rows;  // axis-major order: first axis outermost
};

// spec-file form: axis = <name> <min> <max> <count> <lin|log>  (axis2 = ... for
// a second axis), fields = comma list; remaining keys are parameter overrides
SweepSpec sweep_spec_from_config(const ConfigMap& cfg, const std::string& name);

SweepTable run_sweep(const SystemParams& base, const SweepSpec& spec, int n_threads = 0);

// RFC-4180-style CSV (quote when needed, doubled quotes), floats at 17
// significant digits; unstable/failed measures are empty fields
std::string sweep_to_csv(const SweepTable& t);
std::string sweep_to_json(const SweepTable& t);

// Cache keyed by fnv1a64 of (version, canonical config); directory from the
// TRIMODE_CACHE_DIR environment variable - caching is off when it is unset.
// Hits return the stored bytes verbatim.
std::string sweep_cache_key(const SystemParams& base, const SweepSpec& spec);
std::optional<std::string> cache_lookup(const std::string& key, const std::string& kind);
void cache_store(const std::string& key, const std::string& kind, const std::string& bytes);

// sweep + serialization with the cache wired in; on a hit the stored bytes
// come back verbatim and no points are recomputed
struct SweepOutputs {
    std::string csv;
    std::string json;
    bool cache_hit = false;
};

SweepOutputs run_sweep_cached(const SystemParams& base, const SweepSpec& spec, int n_threads = 0);

} // namespace trimode
