#pragma once

// Scenario documents (TOML), sweep orchestration and CSV output.
//
//   name = "starlink-single"
//   constellation = "starlink"          # or a [constellation] table
//   rician_K = 10.0
//   jitter_variance_m2 = 1.0            # 0: fully aligned
//   pt_over_n0_dB = 850.0               # fixed when not swept
//   [antenna]                           # defaults: 350 GHz, 30 dBi
//   [topology]
//   kind = "single"                     # single | simultaneous | consecutive
//   ris_elements = 1024
//   [sweep]
//   variable = "pt_over_n0_dB"
//   start = 800.0
//   stop = 900.0
//   step = 1.0
//   [mc]
//   trials = 100000
//   seed = 1

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <toml.hpp>

#include "ris_isl/geometry.hpp"
#include "ris_isl/monte_carlo.hpp"
#include "ris_isl/rate.hpp"

namespace ris_isl {

inline constexpr std::string_view tool_version = "0.1.0";

enum class TopologyKind { Single, Simultaneous, Consecutive };

inline std::string_view to_string(TopologyKind k) {
    switch (k) {
        case TopologyKind::Single: return "single";
        case TopologyKind::Simultaneous: return "simultaneous";
        case TopologyKind::Consecutive: return "consecutive";
    }
    return "single";
}

struct BranchDistances {
    double d_SR_km = 0.0;
    double d_RD_km = 0.0;
    bool operator==(const BranchDistances&) const = default;
};

struct TopologySpec {
    TopologyKind kind = TopologyKind::Single;
    int ris_elements = 1024;
    double ris_efficiency = 1.0;
    std::optional<double> d_SR_km;  ///< single; default d_intra
    std::optional<double> d_RD_km;
    int count = 2;                          ///< simultaneous, when branches is empty
    std::vector<BranchDistances> branches;  ///< simultaneous
    int hops = 2;                           ///< consecutive

    bool operator==(const TopologySpec&) const = default;
};

enum class SweepVariable { PtOverN0, RisElements, JitterVariance, RicianK, DistanceGrid };

inline std::string_view unit_of(SweepVariable v) {
    switch (v) {
        case SweepVariable::PtOverN0: return "dB";
        case SweepVariable::RisElements: return "elements";
        case SweepVariable::JitterVariance: return "m2";
        case SweepVariable::RicianK: return "linear";
        case SweepVariable::DistanceGrid: return "km";
    }
    return "dB";
}

inline std::string_view to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::PtOverN0: return "pt_over_n0_dB";
        case SweepVariable::RisElements: return "ris_elements";
        case SweepVariable::JitterVariance: return "jitter_variance_m2";
        case SweepVariable::RicianK: return "rician_K";
        case SweepVariable::DistanceGrid: return "distance_grid";
    }
    return "pt_over_n0_dB";
}

struct SweepAxis {
    SweepVariable variable = SweepVariable::PtOverN0;
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;  ///< unused for ris_elements (doubling) and distance_grid
    int points = 11;    ///< distance_grid only
    std::optional<std::string> unit;

    bool operator==(const SweepAxis&) const = default;

    /// Axis values in increasing order. ris_elements doubles from start.
    std::vector<double> values() const {
        std::vector<double> out;
        switch (variable) {
            case SweepVariable::RisElements:
                for (double n = start; n <= stop * (1.0 + 1e-12); n *= 2.0) out.push_back(n);
                break;
            case SweepVariable::DistanceGrid:
                break;
            default: {
                const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
                for (std::int64_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
            }
        }
        return out;
    }
};

struct Scenario {
    std::string name = "scenario";
    std::optional<std::string> preset;
    ConstellationSpec constellation;
    AntennaConfig antenna;
    std::optional<double> footprint_radius_m;  ///< fixed footprint instead of beam spreading
    std::optional<double> misalignment_reference_km;  ///< default: d_intra
    double rician_K = 10.0;
    std::optional<double> jitter_variance_m2;
    std::optional<double> pt_over_n0_dB;
    RateMode rate_mode = RateMode::MeanSnr;
    TopologySpec topology;
    std::optional<SweepAxis> sweep;
    std::optional<McConfig> mc;

    bool operator==(const Scenario& o) const {
        auto mc_eq = [](const std::optional<McConfig>& a, const std::optional<McConfig>& b) {
            if (a.has_value() != b.has_value()) return false;
            if (!a) return true;
            return a->trials == b->trials && a->seed == b->seed && a->batch_size == b->batch_size;
        };
        return name == o.name && preset == o.preset && constellation == o.constellation &&
               antenna == o.antenna && footprint_radius_m == o.footprint_radius_m &&
               misalignment_reference_km == o.misalignment_reference_km &&
               rician_K == o.rician_K && jitter_variance_m2 == o.jitter_variance_m2 &&
               pt_over_n0_dB == o.pt_over_n0_dB && rate_mode == o.rate_mode &&
               topology == o.topology && sweep == o.sweep && mc_eq(mc, o.mc);
    }
};

inline std::optional<ConstellationSpec> constellation_preset(std::string_view name) {
    if (name == "starlink") return presets::starlink();
    if (name == "iridium") return presets::iridium();
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class TomlReader {
public:
    explicit TomlReader(const toml::table& root) : root_(root) {}

    static std::string join(std::string_view prefix, std::string_view key) {
        return prefix.empty() ? std::string(key) : std::string(prefix) + "." + std::string(key);
    }

    [[noreturn]] static void fail(std::string_view path, std::string_view message) {
        throw config_error(std::string(path) + ": " + std::string(message));
    }

    static void reject_unknown(const toml::table& t, std::string_view prefix,
                               const std::set<std::string, std::less<>>& allowed) {
        for (const auto& [key, node] : t) {
            if (!allowed.contains(key.str())) fail(join(prefix, key.str()), "unknown key");
        }
    }

    static std::optional<double> number(const toml::table& t, std::string_view prefix,
                                        std::string_view key) {
        const toml::node* n = t.get(key);
        if (!n) return std::nullopt;
        if (auto v = n->value_exact<double>()) return *v;
        if (auto v = n->value_exact<std::int64_t>()) return static_cast<double>(*v);
        fail(join(prefix, key), "expected a number");
    }

    static std::optional<std::int64_t> integer(const toml::table& t, std::string_view prefix,
                                               std::string_view key) {
        const toml::node* n = t.get(key);
        if (!n) return std::nullopt;
        if (auto v = n->value_exact<std::int64_t>()) return *v;
        fail(join(prefix, key), "expected an integer");
    }

    static std::optional<std::string> string(const toml::table& t, std::string_view prefix,
                                             std::string_view key) {
        const toml::node* n = t.get(key);
        if (!n) return std::nullopt;
        if (auto v = n->value_exact<std::string>()) return *v;
        fail(join(prefix, key), "expected a string");
    }

    static const toml::table* table(const toml::table& t, std::string_view prefix,
                                    std::string_view key) {
        const toml::node* n = t.get(key);
        if (!n) return nullptr;
        if (const auto* tbl = n->as_table()) return tbl;
        fail(join(prefix, key), "expected a table");
    }

    const toml::table& root() const { return root_; }

private:
    const toml::table& root_;
};

inline void require_positive(std::optional<double> v, std::string_view path) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) TomlReader::fail(path, "must be positive");
}

inline void require_non_negative(std::optional<double> v, std::string_view path) {
    if (v && !(*v >= 0.0 && std::isfinite(*v))) TomlReader::fail(path, "must be non-negative");
}

inline int to_int(std::int64_t v, std::string_view path, std::int64_t min) {
    if (v < min || v > std::numeric_limits<int>::max()) {
        TomlReader::fail(path, "must be an integer >= " + std::to_string(min));
    }
    return static_cast<int>(v);
}

inline ConstellationSpec parse_constellation_table(const toml::table& t) {
    using R = TomlReader;
    R::reject_unknown(t, "constellation", {"altitude_km", "sats_per_orbit", "orbit_count", "earth_radius_km"});
    ConstellationSpec spec;
    auto alt = R::number(t, "constellation", "altitude_km");
    auto sats = R::integer(t, "constellation", "sats_per_orbit");
    auto orbits = R::integer(t, "constellation", "orbit_count");
    if (!alt) R::fail("constellation.altitude_km", "required");
    if (!sats) R::fail("constellation.sats_per_orbit", "required");
    if (!orbits) R::fail("constellation.orbit_count", "required");
    require_positive(alt, "constellation.altitude_km");
    spec.altitude_km = *alt;
    spec.sats_per_orbit = to_int(*sats, "constellation.sats_per_orbit", 2);
    spec.orbit_count = to_int(*orbits, "constellation.orbit_count", 2);
    if (auto re = R::number(t, "constellation", "earth_radius_km")) {
        require_positive(re, "constellation.earth_radius_km");
        spec.earth_radius_km = *re;
    }
    return spec;
}

inline TopologySpec parse_topology(const toml::table& t) {
    using R = TomlReader;
    const std::string_view p = "topology";
    R::reject_unknown(t, p, {"kind", "ris_elements", "ris_efficiency", "d_SR_km", "d_RD_km",
                             "count", "branches", "hops"});
    TopologySpec spec;
    const std::string kind = R::string(t, p, "kind").value_or("single");
    if (kind == "single") {
        spec.kind = TopologyKind::Single;
    } else if (kind == "simultaneous") {
        spec.kind = TopologyKind::Simultaneous;
    } else if (kind == "consecutive") {
        spec.kind = TopologyKind::Consecutive;
    } else {
        R::fail("topology.kind", "expected single, simultaneous or consecutive, got '" + kind + "'");
    }
    if (auto n = R::integer(t, p, "ris_elements")) spec.ris_elements = to_int(*n, "topology.ris_elements", 1);
    if (auto e = R::number(t, p, "ris_efficiency")) {
        if (!(*e > 0.0 && *e <= 1.0)) R::fail("topology.ris_efficiency", "must lie in (0, 1]");
        spec.ris_efficiency = *e;
    }
    spec.d_SR_km = R::number(t, p, "d_SR_km");
    spec.d_RD_km = R::number(t, p, "d_RD_km");
    require_positive(spec.d_SR_km, "topology.d_SR_km");
    require_positive(spec.d_RD_km, "topology.d_RD_km");
    if (auto c = R::integer(t, p, "count")) spec.count = to_int(*c, "topology.count", 1);
    if (auto h = R::integer(t, p, "hops")) spec.hops = to_int(*h, "topology.hops", 1);
    if (const toml::node* b = t.get("branches")) {
        const auto* arr = b->as_array();
        if (!arr) R::fail("topology.branches", "expected an array of tables");
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const std::string path = "topology.branches[" + std::to_string(i) + "]";
            const auto* bt = arr->get(i)->as_table();
            if (!bt) R::fail(path, "expected a table");
            R::reject_unknown(*bt, path, {"d_SR_km", "d_RD_km"});
            auto sr = R::number(*bt, path, "d_SR_km");
            auto rd = R::number(*bt, path, "d_RD_km");
            if (!sr) R::fail(path + ".d_SR_km", "required");
            if (!rd) R::fail(path + ".d_RD_km", "required");
            require_positive(sr, path + ".d_SR_km");
            require_positive(rd, path + ".d_RD_km");
            spec.branches.push_back({*sr, *rd});
        }
        if (spec.branches.empty()) R::fail("topology.branches", "must not be empty");
    }
    return spec;
}

inline SweepAxis parse_sweep(const toml::table& t) {
    using R = TomlReader;
    const std::string_view p = "sweep";
    R::reject_unknown(t, p, {"variable", "start", "stop", "step", "points", "unit"});
    SweepAxis axis;
    const auto var = R::string(t, p, "variable");
    if (!var) R::fail("sweep.variable", "required");
    static const std::map<std::string, SweepVariable, std::less<>> names = {
        {"pt_over_n0_dB", SweepVariable::PtOverN0},
        {"ris_elements", SweepVariable::RisElements},
        {"jitter_variance_m2", SweepVariable::JitterVariance},
        {"rician_K", SweepVariable::RicianK},
        {"distance_grid", SweepVariable::DistanceGrid}};
    auto it = names.find(*var);
    if (it == names.end()) R::fail("sweep.variable", "unsupported sweep variable '" + *var + "'");
    axis.variable = it->second;
    axis.unit = R::string(t, p, "unit");
    if (axis.unit && *axis.unit != unit_of(axis.variable)) {
        R::fail("sweep.unit", "expected '" + std::string(unit_of(axis.variable)) + "' for " + *var);
    }

    if (axis.variable == SweepVariable::DistanceGrid) {
        for (auto key : {"start", "stop", "step"}) {
            if (t.contains(key)) R::fail(R::join(p, key), "not used by distance_grid");
        }
        if (auto n = R::integer(t, p, "points")) axis.points = to_int(*n, "sweep.points", 1);
        return axis;
    }
    if (t.contains("points")) R::fail("sweep.points", "only used by distance_grid");
    auto start = R::number(t, p, "start");
    auto stop = R::number(t, p, "stop");
    if (!start) R::fail("sweep.start", "required");
    if (!stop) R::fail("sweep.stop", "required");
    axis.start = *start;
    axis.stop = *stop;
    if (axis.stop < axis.start) R::fail("sweep.stop", "must be >= sweep.start");
    if (axis.variable == SweepVariable::RisElements) {
        if (t.contains("step")) R::fail("sweep.step", "ris_elements sweeps double from start");
        if (axis.start < 1.0 || axis.start != std::floor(axis.start)) {
            R::fail("sweep.start", "must be a positive integer element count");
        }
        axis.step = 2.0;
    } else {
        auto step = R::number(t, p, "step");
        if (!step) R::fail("sweep.step", "required");
        if (!(*step > 0.0)) R::fail("sweep.step", "must be positive");
        axis.step = *step;
        if ((axis.stop - axis.start) / axis.step > 1e6) R::fail("sweep.step", "too many sweep points");
    }
    if (axis.variable == SweepVariable::JitterVariance && axis.start < 0.0) {
        R::fail("sweep.start", "jitter variance must be non-negative");
    }
    if (axis.variable == SweepVariable::RicianK && axis.start < 0.0) {
        R::fail("sweep.start", "rician_K must be non-negative");
    }
    return axis;
}

inline McConfig parse_mc(const toml::table& t) {
    using R = TomlReader;
    R::reject_unknown(t, "mc", {"trials", "seed", "batch_size"});
    McConfig mc;
    if (auto n = R::integer(t, "mc", "trials")) {
        if (*n < 1) R::fail("mc.trials", "must be >= 1");
        mc.trials = *n;
    }
    if (auto s = R::integer(t, "mc", "seed")) {
        if (*s < 0) R::fail("mc.seed", "must be non-negative");
        mc.seed = static_cast<std::uint64_t>(*s);
    }
    if (auto b = R::integer(t, "mc", "batch_size")) {
        if (*b < 1) R::fail("mc.batch_size", "must be >= 1");
        mc.batch_size = *b;
    }
    return mc;
}

}  // namespace detail

/// Parses and validates a scenario document; defaults are applied for every
/// optional key. Errors carry the dotted key path.
inline Scenario parse_scenario(std::string_view text) {
    using R = detail::TomlReader;
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "line " << e.source().begin.line << ", column " << e.source().begin.column << ": "
            << e.description();
        throw config_error(msg.str());
    }
    R::reject_unknown(root, "", {"name", "constellation", "antenna", "rician_K", "jitter_variance_m2",
                                 "pt_over_n0_dB", "rate_mode", "misalignment_reference_km",
                                 "topology", "sweep", "mc"});
    Scenario s;
    if (auto name = R::string(root, "", "name")) s.name = *name;

    const toml::node* c = root.get("constellation");
    if (!c) R::fail("constellation", "required (preset name or table)");
    if (auto preset = c->value_exact<std::string>()) {
        auto spec = constellation_preset(*preset);
        if (!spec) R::fail("constellation", "unknown preset '" + *preset + "' (starlink, iridium)");
        s.preset = *preset;
        s.constellation = *spec;
    } else if (const auto* tbl = c->as_table()) {
        s.constellation = detail::parse_constellation_table(*tbl);
    } else {
        R::fail("constellation", "expected a preset name or a table");
    }

    if (const auto* ant = R::table(root, "", "antenna")) {
        R::reject_unknown(*ant, "antenna", {"carrier_frequency_Hz", "gain_dBi", "footprint_radius_m"});
        if (auto f = R::number(*ant, "antenna", "carrier_frequency_Hz")) {
            detail::require_positive(f, "antenna.carrier_frequency_Hz");
            s.antenna.carrier_frequency_Hz = *f;
        }
        if (auto g = R::number(*ant, "antenna", "gain_dBi")) {
            if (!std::isfinite(*g)) R::fail("antenna.gain_dBi", "must be finite");
            s.antenna.gain_dBi = *g;
        }
        s.footprint_radius_m = R::number(*ant, "antenna", "footprint_radius_m");
        detail::require_positive(s.footprint_radius_m, "antenna.footprint_radius_m");
    }

    if (auto k = R::number(root, "", "rician_K")) {
        detail::require_non_negative(k, "rician_K");
        s.rician_K = *k;
    }
    s.jitter_variance_m2 = R::number(root, "", "jitter_variance_m2");
    detail::require_non_negative(s.jitter_variance_m2, "jitter_variance_m2");
    s.pt_over_n0_dB = R::number(root, "", "pt_over_n0_dB");
    if (s.pt_over_n0_dB && !std::isfinite(*s.pt_over_n0_dB)) R::fail("pt_over_n0_dB", "must be finite");
    s.misalignment_reference_km = R::number(root, "", "misalignment_reference_km");
    detail::require_positive(s.misalignment_reference_km, "misalignment_reference_km");
    if (auto mode = R::string(root, "", "rate_mode")) {
        if (*mode == "mean_snr") {
            s.rate_mode = RateMode::MeanSnr;
        } else if (*mode == "ergodic") {
            s.rate_mode = RateMode::Ergodic;
        } else {
            R::fail("rate_mode", "expected mean_snr or ergodic");
        }
    }
    if (const auto* t = R::table(root, "", "topology")) s.topology = detail::parse_topology(*t);
    if (const auto* t = R::table(root, "", "sweep")) s.sweep = detail::parse_sweep(*t);
    if (const auto* t = R::table(root, "", "mc")) s.mc = detail::parse_mc(*t);

    if (s.sweep) {
        const SweepVariable v = s.sweep->variable;
        // Consecutive relays are modelled fully aligned; jitter is not used there.
        if (v != SweepVariable::JitterVariance && !s.jitter_variance_m2 &&
            s.topology.kind != TopologyKind::Consecutive) {
            R::fail("jitter_variance_m2", "required unless it is the sweep variable");
        }
        if (v != SweepVariable::PtOverN0 && !s.pt_over_n0_dB) {
            R::fail("pt_over_n0_dB", "required unless it is the sweep variable");
        }
        if (v == SweepVariable::JitterVariance && s.jitter_variance_m2) {
            R::fail("jitter_variance_m2", "conflicts with the jitter_variance_m2 sweep");
        }
        if (v == SweepVariable::PtOverN0 && s.pt_over_n0_dB) {
            R::fail("pt_over_n0_dB", "conflicts with the pt_over_n0_dB sweep");
        }
    }
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

/// Canonical TOML form; parse_scenario(to_toml(s)) == s.
inline std::string to_toml(const Scenario& s) {
    toml::table root;
    root.insert("name", s.name);
    if (s.preset) {
        root.insert("constellation", *s.preset);
    } else {
        root.insert("constellation",
                    toml::table{{"altitude_km", s.constellation.altitude_km},
                                {"sats_per_orbit", s.constellation.sats_per_orbit},
                                {"orbit_count", s.constellation.orbit_count},
                                {"earth_radius_km", s.constellation.earth_radius_km}});
    }
    toml::table ant{{"carrier_frequency_Hz", s.antenna.carrier_frequency_Hz},
                    {"gain_dBi", s.antenna.gain_dBi}};
    if (s.footprint_radius_m) ant.insert("footprint_radius_m", *s.footprint_radius_m);
    root.insert("antenna", std::move(ant));
    root.insert("rician_K", s.rician_K);
    if (s.jitter_variance_m2) root.insert("jitter_variance_m2", *s.jitter_variance_m2);
    if (s.pt_over_n0_dB) root.insert("pt_over_n0_dB", *s.pt_over_n0_dB);
    if (s.misalignment_reference_km) root.insert("misalignment_reference_km", *s.misalignment_reference_km);
    root.insert("rate_mode", s.rate_mode == RateMode::MeanSnr ? "mean_snr" : "ergodic");

    toml::table topo{{"kind", std::string(to_string(s.topology.kind))},
                     {"ris_elements", s.topology.ris_elements},
                     {"ris_efficiency", s.topology.ris_efficiency},
                     {"count", s.topology.count},
                     {"hops", s.topology.hops}};
    if (s.topology.d_SR_km) topo.insert("d_SR_km", *s.topology.d_SR_km);
    if (s.topology.d_RD_km) topo.insert("d_RD_km", *s.topology.d_RD_km);
    if (!s.topology.branches.empty()) {
        toml::array arr;
        for (const auto& b : s.topology.branches) {
            arr.push_back(toml::table{{"d_SR_km", b.d_SR_km}, {"d_RD_km", b.d_RD_km}});
        }
        topo.insert("branches", std::move(arr));
    }
    root.insert("topology", std::move(topo));

    if (s.sweep) {
        toml::table sw{{"variable", std::string(to_string(s.sweep->variable))}};
        if (s.sweep->unit) sw.insert("unit", *s.sweep->unit);
        if (s.sweep->variable == SweepVariable::DistanceGrid) {
            sw.insert("points", s.sweep->points);
        } else {
            sw.insert("start", s.sweep->start);
            sw.insert("stop", s.sweep->stop);
            if (s.sweep->variable != SweepVariable::RisElements) sw.insert("step", s.sweep->step);
        }
        root.insert("sweep", std::move(sw));
    }
    if (s.mc) {
        root.insert("mc", toml::table{{"trials", s.mc->trials},
                                      {"seed", static_cast<std::int64_t>(s.mc->seed)},
                                      {"batch_size", s.mc->batch_size}});
    }
    std::ostringstream out;
    out << toml::toml_formatter(root, toml::toml_formatter::default_flags &
                                          ~toml::format_flags::allow_literal_strings);
    out << '\n';
    return out.str();
}

/// FNV-1a over the canonical serialisation.
inline std::uint64_t scenario_hash(const Scenario& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_toml(s)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Model assembly

/// Parameters a single sweep row evaluates at.
struct OperatingPoint {
    double pt_over_n0_dB = 0.0;
    int ris_elements = 1024;
    double jitter_variance_m2 = 0.0;
    double rician_K = 10.0;
};

inline OperatingPoint base_operating_point(const Scenario& s) {
    return {s.pt_over_n0_dB.value_or(0.0), s.topology.ris_elements,
            s.jitter_variance_m2.value_or(0.0), s.rician_K};
}

inline OperatingPoint operating_point_at(const Scenario& s, double sweep_value) {
    OperatingPoint op = base_operating_point(s);
    if (!s.sweep) return op;
    switch (s.sweep->variable) {
        case SweepVariable::PtOverN0: op.pt_over_n0_dB = sweep_value; break;
        case SweepVariable::RisElements: op.ris_elements = static_cast<int>(std::lround(sweep_value)); break;
        case SweepVariable::JitterVariance: op.jitter_variance_m2 = sweep_value; break;
        case SweepVariable::RicianK: op.rician_K = sweep_value; break;
        case SweepVariable::DistanceGrid: break;
    }
    return op;
}

/// Misalignment parameters shared by every hop of the scenario, evaluated at
/// the reference distance (default: intra-plane distance).
inline MisalignmentParams scenario_misalignment(const Scenario& s, double jitter_variance_m2) {
    const DistanceSet d = distance_set(s.constellation);
    const double ref_m = s.misalignment_reference_km.value_or(d.d_intra_km) * 1e3;
    if (s.footprint_radius_m) {
        return misalignment_params_for_footprint(effective_aperture_radius(s.antenna),
                                                 *s.footprint_radius_m, jitter_variance_m2);
    }
    return misalignment_params(s.antenna, ref_m, jitter_variance_m2);
}

inline Topology build_topology(const Scenario& s, const OperatingPoint& op) {
    const DistanceSet d = distance_set(s.constellation);
    const MisalignmentParams mis = scenario_misalignment(s, op.jitter_variance_m2);
    const RicianConfig ric{op.rician_K};
    const TopologySpec& t = s.topology;
    switch (t.kind) {
        case TopologyKind::Single: {
            LinkBudget lb{s.antenna, t.d_SR_km.value_or(d.d_intra_km) * 1e3,
                          t.d_RD_km.value_or(d.d_intra_km) * 1e3, t.ris_efficiency, op.ris_elements};
            return SingleTopology{lb, mis, ric};
        }
        case TopologyKind::Simultaneous: {
            std::vector<BranchDistances> dist = t.branches;
            if (dist.empty()) dist.assign(static_cast<std::size_t>(t.count), {d.d_intra_km, d.d_intra_km});
            SimultaneousTopology topo{{}, ric};
            for (const auto& b : dist) {
                topo.branches.push_back({LinkBudget{s.antenna, b.d_SR_km * 1e3, b.d_RD_km * 1e3,
                                                    t.ris_efficiency, op.ris_elements},
                                         mis, mis});
            }
            return topo;
        }
        case TopologyKind::Consecutive: {
            // Equal hops along one orbit; the end-to-end loss is the two-hop
            // far-field loss at the intra-plane spacing.
            const LinkBudget hop{s.antenna, d.d_intra_km * 1e3, d.d_intra_km * 1e3,
                                 t.ris_efficiency, op.ris_elements};
            return ConsecutiveTopology{t.hops, op.ris_elements, free_space_path_loss(hop), ric};
        }
    }
    throw invalid_argument_error("unknown topology kind");
}

// ---------------------------------------------------------------------------
// Sweeps

struct RunOptions {
    bool analytic_ber = true;
    bool monte_carlo = false;
    bool rate = false;
    unsigned workers = 0;
};

struct SweepRow {
    double sweep_value = 0.0;
    std::optional<double> second_value;  ///< d_R2D_km on distance grids
    std::optional<double> analytic_ber;
    std::optional<double> mc_ber;
    std::optional<double> mc_stderr;
    std::optional<double> rate;
    std::optional<std::string> error;
};

enum class CsvLayout {
    Sweep,       ///< <variable>,analytic_ber,mc_ber,mc_stderr,rate_bits_per_s_per_Hz (present columns)
    McReport,    ///< scenario_id,pt_over_n0_dB,mc_ber,mc_stderr,analytic_ber
    RateSurface  ///< d_SR2_km,d_R2D_km,rate_bits_per_s_per_Hz
};

struct SweepResult {
    std::string scenario_id;
    std::string variable = "pt_over_n0_dB";
    std::uint64_t scenario_hash = 0;
    std::uint64_t seed = 0;
    std::string version = std::string(tool_version);
    bool has_analytic = false;
    bool has_mc = false;
    bool has_rate = false;
    CsvLayout layout = CsvLayout::Sweep;
    std::vector<SweepRow> rows;
};

namespace detail {

inline void fill_error(SweepRow& row, const std::exception& e) {
    row.error = e.what();
    row.analytic_ber.reset();
    row.mc_ber.reset();
    row.mc_stderr.reset();
    row.rate.reset();
}

inline std::vector<SweepRow> run_distance_grid(const Scenario& s, const RunOptions& opt) {
    const DistanceSet d = distance_set(s.constellation);
    const RateGrid grid = make_rate_grid(d, static_cast<std::size_t>(s.sweep->points));
    const OperatingPoint op = base_operating_point(s);
    RateBaseTopology base{s.antenna, op.ris_elements, s.topology.ris_efficiency,
                          scenario_misalignment(s, op.jitter_variance_m2), RicianConfig{op.rician_K}};
    std::vector<SweepRow> rows(grid.d_SR2_km.size() * grid.d_R2D_km.size());
    parallel_for(rows.size(), opt.workers, [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.sweep_value = grid.d_SR2_km[i / grid.d_R2D_km.size()];
        row.second_value = grid.d_R2D_km[i % grid.d_R2D_km.size()];
        try {
            const auto stats = amplitude_stats_simultaneous(
                two_branch_topology(base, grid.d_intra_km, row.sweep_value, *row.second_value));
            row.rate = achievable_rate(stats, {op.pt_over_n0_dB}, s.rate_mode);
            if (opt.analytic_ber) row.analytic_ber = bpsk_ber(stats, {op.pt_over_n0_dB});
        } catch (const error& e) {
            fill_error(row, e);
        }
    });
    return rows;
}

}  // namespace detail

/// Evaluates every point of the scenario's sweep axis. Failing rows carry an
/// error message instead of aborting the sweep.
inline SweepResult run_sweep(const Scenario& s, const RunOptions& opt) {
    if (!s.sweep) throw config_error("sweep: required for this command");
    SweepResult result;
    result.scenario_id = s.name;
    result.variable = std::string(to_string(s.sweep->variable));
    result.scenario_hash = scenario_hash(s);
    McConfig mc = s.mc.value_or(McConfig{});
    mc.workers = opt.workers;
    result.seed = mc.seed;

    if (s.sweep->variable == SweepVariable::DistanceGrid) {
        if (s.topology.kind != TopologyKind::Simultaneous) {
            throw config_error("sweep.variable: distance_grid requires topology.kind = \"simultaneous\"");
        }
        if (opt.monte_carlo) throw config_error("sweep.variable: distance_grid has no Monte Carlo mode");
        result.layout = CsvLayout::RateSurface;
        result.has_rate = true;
        result.rows = detail::run_distance_grid(s, {false, false, true, opt.workers});
        return result;
    }

    const std::vector<double> xs = s.sweep->values();
    result.has_analytic = opt.analytic_ber;
    result.has_mc = opt.monte_carlo;
    result.has_rate = opt.rate;
    result.rows.resize(xs.size());

    std::vector<std::optional<Topology>> topologies(xs.size());
    parallel_for(xs.size(), opt.workers, [&](std::size_t i) {
        SweepRow& row = result.rows[i];
        row.sweep_value = xs[i];
        try {
            const OperatingPoint op = operating_point_at(s, xs[i]);
            topologies[i] = build_topology(s, op);
            const AmplitudeStats stats = analytic_amplitude_stats(*topologies[i]);
            if (opt.analytic_ber) row.analytic_ber = bpsk_ber(stats, {op.pt_over_n0_dB});
            if (opt.rate) row.rate = achievable_rate(stats, {op.pt_over_n0_dB}, s.rate_mode);
        } catch (const error& e) {
            detail::fill_error(row, e);
        }
    });

    if (opt.monte_carlo) {
        if (s.sweep->variable == SweepVariable::PtOverN0) {
            // One set of channel draws serves every Pt/N0.
            if (topologies.front()) {
                try {
                    const auto est = semi_analytic_ber_sweep(*topologies.front(), xs, mc);
                    for (std::size_t i = 0; i < xs.size(); ++i) {
                        if (result.rows[i].error) continue;
                        result.rows[i].mc_ber = est[i].value;
                        result.rows[i].mc_stderr = est[i].std_error;
                    }
                } catch (const error& e) {
                    for (auto& row : result.rows) detail::fill_error(row, e);
                }
            }
        } else {
            for (std::size_t i = 0; i < xs.size(); ++i) {
                SweepRow& row = result.rows[i];
                if (row.error || !topologies[i]) continue;
                try {
                    const auto est = semi_analytic_ber(*topologies[i],
                                                       {operating_point_at(s, xs[i]).pt_over_n0_dB}, mc);
                    row.mc_ber = est.value;
                    row.mc_stderr = est.std_error;
                } catch (const error& e) {
                    detail::fill_error(row, e);
                }
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest round-trip decimal form.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

/// Scientific notation with six decimals and an unpadded exponent:
/// 1.23e-5 -> "1.230000e-5".
inline std::string format_probability(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    std::string s(buf);
    const auto e = s.find('e');
    if (e == std::string::npos) return s;
    std::string mantissa = s.substr(0, e);
    const char sign = s[e + 1];
    std::string digits = s.substr(e + 2);
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    return mantissa + "e" + (sign == '-' ? "-" : "") + digits;
}

inline void write_csv(const SweepResult& r, std::ostream& out) {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.scenario_hash));
    out << "# scenario: " << r.scenario_id << '\n';
    out << "# scenario_hash: " << hash << '\n';
    out << "# seed: " << r.seed << '\n';
    out << "# tool_version: " << r.version << '\n';
    for (const auto& row : r.rows) {
        if (row.error) out << "# row_error: " << format_number(row.sweep_value) << ": " << *row.error << '\n';
    }
    auto opt_prob = [](const std::optional<double>& v) { return v ? format_probability(*v) : "NaN"; };
    auto opt_num = [](const std::optional<double>& v) { return v ? format_number(*v) : "NaN"; };

    switch (r.layout) {
        case CsvLayout::RateSurface:
            out << "d_SR2_km,d_R2D_km,rate_bits_per_s_per_Hz\n";
            for (const auto& row : r.rows) {
                out << format_number(row.sweep_value) << ',' << opt_num(row.second_value) << ','
                    << opt_num(row.rate) << '\n';
            }
            break;
        case CsvLayout::McReport:
            out << "scenario_id," << r.variable << ",mc_ber,mc_stderr,analytic_ber\n";
            for (const auto& row : r.rows) {
                out << r.scenario_id << ',' << format_number(row.sweep_value) << ','
                    << opt_prob(row.mc_ber) << ',' << opt_prob(row.mc_stderr) << ','
                    << opt_prob(row.analytic_ber) << '\n';
            }
            break;
        case CsvLayout::Sweep: {
            out << r.variable;
            if (r.has_analytic) out << ",analytic_ber";
            if (r.has_mc) out << ",mc_ber,mc_stderr";
            if (r.has_rate) out << ",rate_bits_per_s_per_Hz";
            out << '\n';
            for (const auto& row : r.rows) {
                out << format_number(row.sweep_value);
                if (r.has_analytic) out << ',' << opt_prob(row.analytic_ber);
                if (r.has_mc) out << ',' << opt_prob(row.mc_ber) << ',' << opt_prob(row.mc_stderr);
                if (r.has_rate) out << ',' << opt_num(row.rate);
                out << '\n';
            }
            break;
        }
    }
}

inline void emit_csv(const SweepResult& r, const std::string& destination) {
    std::ofstream out(destination, std::ios::binary);
    if (!out) throw io_error("cannot open '" + destination + "' for writing");
    write_csv(r, out);
    out.flush();
    if (!out) throw io_error("failed writing '" + destination + "'");
}

}  // namespace ris_isl
