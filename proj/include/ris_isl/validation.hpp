#pragma once

// Analytic-vs-Monte-Carlo agreement suite: both presets, N in {256, 1024},
// jitter variance in {1, 10} m^2, K = 10, single RIS at the intra-plane
// distance. Each curve is sampled on a 1 dB grid spanning P_e from 0.4 down
// to 5e-6 of the analytic curve.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "ris_isl/monte_carlo.hpp"
#include "ris_isl/scenario.hpp"

namespace ris_isl {

struct AgreementCase {
    std::string id;
    SingleTopology topology;
};

struct AgreementRow {
    std::string case_id;
    double pt_over_n0_dB = 0.0;
    double mc_ber = 0.0;
    double mc_stderr = 0.0;
    double analytic_ber = 0.0;
    bool checked = false;  ///< analytic P_e within [1e-5, 0.5]
    bool pass = true;
    double ratio() const { return mc_ber / analytic_ber; }
};

struct AgreementReport {
    std::uint64_t seed = 0;
    std::int64_t trials = 0;
    std::vector<AgreementRow> rows;
    bool all_pass() const {
        for (const auto& r : rows) {
            if (!r.pass) return false;
        }
        return true;
    }
};

inline constexpr double agreement_ratio_limit = 2.0;
inline constexpr double agreement_window_low = 1e-5;
inline constexpr double agreement_window_high = 0.5;

inline std::vector<AgreementCase> agreement_cases() {
    std::vector<AgreementCase> cases;
    const AntennaConfig antenna{};
    const RicianConfig rician{10.0};
    for (const char* name : {"starlink", "iridium"}) {
        const DistanceSet d = distance_set(*constellation_preset(name));
        for (int n : {256, 1024}) {
            for (double jitter : {1.0, 10.0}) {
                const LinkBudget lb{antenna, d.d_intra_km * 1e3, d.d_intra_km * 1e3, 1.0, n};
                char id[64];
                std::snprintf(id, sizeof id, "%s_N%d_jitter%g", name, n, jitter);
                cases.push_back({id, {lb, misalignment_params(antenna, d.d_intra_km * 1e3, jitter), rician}});
            }
        }
    }
    return cases;
}

inline std::vector<double> agreement_grid(const AmplitudeStats& stats) {
    const double lo = std::floor(required_pt_over_n0_dB(stats, 0.4));
    const double hi = std::ceil(required_pt_over_n0_dB(stats, 5e-6));
    std::vector<double> xs;
    for (double x = lo; x <= hi + 1e-9; x += 1.0) xs.push_back(x);
    return xs;
}

inline AgreementReport run_agreement_suite(const McConfig& mc) {
    validate(mc);
    AgreementReport report{mc.seed, mc.trials, {}};
    for (const auto& c : agreement_cases()) {
        const AmplitudeStats stats = amplitude_stats_single(c.topology.link, c.topology.misalignment,
                                                            c.topology.rician);
        const std::vector<double> xs = agreement_grid(stats);
        const std::vector<McEstimate> est = semi_analytic_ber_sweep(c.topology, xs, mc);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            AgreementRow row{c.id, xs[i], est[i].value, est[i].std_error, bpsk_ber(stats, {xs[i]})};
            row.checked = row.analytic_ber >= agreement_window_low && row.analytic_ber <= agreement_window_high;
            if (row.checked) {
                const double r = row.ratio();
                row.pass = r >= 1.0 / agreement_ratio_limit && r <= agreement_ratio_limit;
            }
            report.rows.push_back(row);
        }
    }
    return report;
}

inline void write_agreement_csv(const AgreementReport& r, std::ostream& out) {
    out << "# suite: analytic_vs_mc\n";
    out << "# seed: " << r.seed << '\n';
    out << "# trials: " << r.trials << '\n';
    out << "# tool_version: " << tool_version << '\n';
    out << "scenario_id,pt_over_n0_dB,mc_ber,mc_stderr,analytic_ber,ratio,status\n";
    for (const auto& row : r.rows) {
        out << row.case_id << ',' << format_number(row.pt_over_n0_dB) << ','
            << format_probability(row.mc_ber) << ',' << format_probability(row.mc_stderr) << ','
            << format_probability(row.analytic_ber) << ',' << format_number(row.ratio()) << ','
            << (!row.checked ? "skip" : row.pass ? "pass" : "fail") << '\n';
    }
}

/// One line per case: checked points, worst ratio, verdict.
inline void write_agreement_table(const AgreementReport& r, std::ostream& out) {
    std::string current;
    auto flush = [&](const std::string& id) {
        int checked = 0;
        double worst = 1.0;
        bool ok = true;
        for (const auto& row : r.rows) {
            if (row.case_id != id || !row.checked) continue;
            ++checked;
            const double dev = std::max(row.ratio(), 1.0 / row.ratio());
            worst = std::max(worst, dev);
            ok = ok && row.pass;
        }
        char line[160];
        std::snprintf(line, sizeof line, "%-26s points=%-3d worst_ratio=%-8.4f %s\n", id.c_str(), checked,
                      worst, ok ? "PASS" : "FAIL");
        out << line;
    };
    for (const auto& row : r.rows) {
        if (row.case_id != current) {
            current = row.case_id;
            flush(current);
        }
    }
}

}  // namespace ris_isl
