// ris-isl: command-line front end for the RIS-assisted inter-satellite link models.
//
//   ris-isl geometry --preset starlink
//   ris-isl ber --config scenarios/single_aligned.toml --out ber.csv
//   ris-isl mc --config scenarios/single_jitter1.toml --trials 200000 --seed 7
//   ris-isl rate --config scenarios/rate_surface_starlink.toml
//   ris-isl validate --out agreement.csv
//
// Exit codes: 0 ok, 1 validation failure, 2 parse/config error,
// 3 numeric failure, 4 I/O failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ris_isl/ris_isl.hpp"

namespace {

enum ExitCode : int { ok = 0, validation_failed = 1, config_failure = 2, numeric_failure = 3, io_failure = 4 };

struct Options {
    std::string config;
    std::string out;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> trials;
    unsigned threads = 0;
};

ris_isl::Scenario load(const Options& o) {
    if (o.config.empty()) throw ris_isl::config_error("--config: a scenario file is required");
    ris_isl::Scenario s = ris_isl::load_scenario(o.config);
    if (!o.preset.empty()) {
        s.preset = o.preset;
        s.constellation = *ris_isl::constellation_preset(o.preset);
    }
    if (o.seed || o.trials) {
        ris_isl::McConfig mc = s.mc.value_or(ris_isl::McConfig{});
        if (o.seed) mc.seed = *o.seed;
        if (o.trials) mc.trials = *o.trials;
        s.mc = mc;
    }
    return s;
}

template <class Writer>
void write_output(const Options& o, Writer&& write) {
    if (o.out.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw ris_isl::io_error("cannot open '" + o.out + "' for writing");
    write(out);
    out.flush();
    if (!out) throw ris_isl::io_error("failed writing '" + o.out + "'");
}

void emit(const Options& o, const ris_isl::SweepResult& r) {
    if (o.out.empty()) {
        ris_isl::write_csv(r, std::cout);
    } else {
        ris_isl::emit_csv(r, o.out);
    }
}

int run_geometry(const Options& o) {
    ris_isl::ConstellationSpec spec;
    if (!o.config.empty()) {
        spec = load(o).constellation;
    } else if (!o.preset.empty()) {
        spec = *ris_isl::constellation_preset(o.preset);
    } else {
        throw ris_isl::config_error("geometry: pass --preset or --config");
    }
    const ris_isl::DistanceSet d = ris_isl::distance_set(spec);
    write_output(o, [&](std::ostream& out) {
        out << "d_intra_km,d_nearest_km,d_farthest_km\n"
            << ris_isl::format_number(d.d_intra_km) << ',' << ris_isl::format_number(d.d_nearest_km) << ','
            << ris_isl::format_number(d.d_farthest_km) << '\n';
    });
    return ok;
}

int run_ber(const Options& o) {
    const ris_isl::Scenario s = load(o);
    ris_isl::RunOptions run;
    run.monte_carlo = s.mc.has_value();
    run.workers = o.threads;
    emit(o, ris_isl::run_sweep(s, run));
    return ok;
}

int run_mc(const Options& o) {
    ris_isl::Scenario s = load(o);
    if (!s.mc) s.mc = ris_isl::McConfig{};
    ris_isl::RunOptions run;
    run.monte_carlo = true;
    run.workers = o.threads;
    ris_isl::SweepResult r = ris_isl::run_sweep(s, run);
    r.layout = ris_isl::CsvLayout::McReport;
    emit(o, r);
    return ok;
}

int run_rate(const Options& o) {
    const ris_isl::Scenario s = load(o);
    ris_isl::RunOptions run;
    run.analytic_ber = false;
    run.rate = true;
    run.workers = o.threads;
    emit(o, ris_isl::run_sweep(s, run));
    return ok;
}

int run_validate(const Options& o) {
    ris_isl::McConfig mc;
    mc.trials = o.trials.value_or(1'000'000);
    mc.seed = o.seed.value_or(1);
    mc.workers = o.threads;
    const ris_isl::AgreementReport report = ris_isl::run_agreement_suite(mc);
    ris_isl::write_agreement_table(report, std::cerr);
    write_output(o, [&](std::ostream& out) { ris_isl::write_agreement_csv(report, out); });
    return report.all_pass() ? ok : validation_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-assisted inter-satellite link analysis"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool needs_config) {
        auto* cfg = sub->add_option("--config", o.config, "Scenario file (TOML)");
        if (needs_config) cfg->required();
        sub->add_option("--out", o.out, "Output CSV path (default: stdout)");
        sub->add_option("--preset", o.preset, "Constellation preset")
            ->check(CLI::IsMember({"starlink", "iridium"}));
        sub->add_option("--threads", o.threads, "Worker threads (0: hardware concurrency)");
    };
    auto mc_flags = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "Monte Carlo seed");
        sub->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    };

    auto* geometry = app.add_subcommand("geometry", "Inter-satellite distances");
    common(geometry, false);
    auto* ber = app.add_subcommand("ber", "Analytic BER sweep (plus Monte Carlo when [mc] is present)");
    common(ber, true);
    mc_flags(ber);
    auto* rate = app.add_subcommand("rate", "Achievable rate sweep or distance-grid surface");
    common(rate, true);
    auto* mc = app.add_subcommand("mc", "Semi-analytic Monte Carlo BER sweep");
    common(mc, true);
    mc_flags(mc);
    auto* validate = app.add_subcommand("validate", "Analytic-vs-Monte-Carlo agreement suite");
    validate->add_option("--out", o.out, "Output CSV path (default: stdout)");
    validate->add_option("--threads", o.threads, "Worker threads (0: hardware concurrency)");
    mc_flags(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_failure;
    }

    try {
        if (*geometry) return run_geometry(o);
        if (*ber) return run_ber(o);
        if (*rate) return run_rate(o);
        if (*mc) return run_mc(o);
        if (*validate) return run_validate(o);
    } catch (const ris_isl::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_failure;
    } catch (const ris_isl::invalid_argument_error& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return config_failure;
    } catch (const ris_isl::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return numeric_failure;
    } catch (const ris_isl::io_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return io_failure;
    }
    return ok;
}
