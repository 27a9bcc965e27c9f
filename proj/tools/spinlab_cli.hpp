#pragma once

// Command-line front end. Kept header-only so the tests can drive it in
// process; tools/spinlab.cpp is the thin main().

#include <spinlab/spinlab.hpp>

#include <CLI11.hpp>

#include <array>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace spinlab::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumeric = 2 };

struct ModelFlags {
    std::array<std::optional<std::string>, kModelKeys.size()> values;
    std::optional<std::string> config;
};

struct OutputFlags {
    std::string format = "csv";
    std::string output = "-";
    std::optional<int> precision;
};

inline void add_model_flags(CLI::App* app, ModelFlags& flags) {
    static constexpr std::array<const char*, kModelKeys.size()> names = {
        "--kind", "--j", "--delta", "--d", "--h", "--n", "--boundary", "--delta-sign,--delta_sign"};
    static constexpr std::array<const char*, kModelKeys.size()> help = {
        "Model kind: xxz-dm (default), ising-dm, ising-dm-field",
        "Exchange coupling J (default 1; negative = ferromagnetic)",
        "Anisotropy Delta, xxz-dm only (default 0)",
        "DM strength D (default 0)",
        "Field h, ising-dm-field only (default 0)",
        "Number of qubits, 2..12 (default 3)",
        "Chain boundary: open (default) or periodic",
        "Sign of the Delta zz term: plus (default, +Delta) or minus (-Delta); see README 'Conventions'"};
    for (std::size_t k = 0; k < names.size(); ++k)
        app->add_option(names[k], flags.values[k], help[k]);
    app->add_option("--config", flags.config, "File of key=value lines (# comments); flags override it");
}

inline void add_output_flags(CLI::App* app, OutputFlags& flags) {
    app->add_option("--format", flags.format, "Output format: csv (default) or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--output,-o", flags.output, "Output file, '-' for stdout (default)");
    app->add_option("--precision", flags.precision,
                    "Fixed number of decimals (default: shortest round-trip representation)")
        ->check(CLI::Range(0, 30));
}

inline ModelSpec resolve_model(const ModelFlags& flags) {
    ModelSpec spec;
    if (flags.config) {
        std::ifstream in(*flags.config);
        if (!in)
            throw ContractError("cannot read config file '" + *flags.config + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        for (const auto& [k, v] : parse_key_values(buf.str())) {
            if (!is_model_key(k))
                throw ContractError("config: unknown key '" + k + "'");
            set_model_field(spec, k, v);
        }
    }
    for (std::size_t k = 0; k < kModelKeys.size(); ++k)
        if (flags.values[k])
            set_model_field(spec, kModelKeys[k], *flags.values[k]);
    spec.validate();
    return spec;
}

inline std::string describe(const ModelSpec& s) {
    std::string out = "kind=" + std::string(to_string(s.kind)) + ", j=" + format_double(s.j);
    if (s.kind == ModelKind::XxzDm)
        out += ", delta=" + format_double(s.delta);
    out += ", d=" + format_double(s.d);
    if (s.kind == ModelKind::IsingDmField)
        out += ", h=" + format_double(s.h);
    out += ", n=" + std::to_string(s.n);
    return out;
}

inline std::pair<int, int> parse_pair(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw ContractError("--pair expects i,j");
    return {parse_int(trim(s.substr(0, comma)), "pair"), parse_int(trim(s.substr(comma + 1)), "pair")};
}

inline std::vector<double> parse_list(const std::string& s, std::string_view what) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        out.push_back(parse_double(trim(item), what));
    if (out.empty())
        throw ContractError(std::string(what) + ": empty list");
    return out;
}

/// name:min:max:points or name=v1,v2,...
inline SweepAxis parse_axis(const std::string& s) {
    if (const auto eq = s.find('='); eq != std::string::npos) {
        std::string name = trim(s.substr(0, eq));
        return SweepAxis::list(name, parse_list(s.substr(eq + 1), name));
    }
    std::vector<std::string> parts;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ':'))
        parts.push_back(trim(item));
    if (parts.size() != 4)
        throw ContractError("--axis expects name:min:max:points or name=v1,v2,...");
    const int points = parse_int(parts[3], "axis points");
    if (points < 1)
        throw ContractError("axis points must be >= 1");
    return SweepAxis::range(parts[0], parse_double(parts[1], "axis min"), parse_double(parts[2], "axis max"),
                            static_cast<std::size_t>(points));
}

inline std::string render(const SweepTable& table, const OutputFlags& o) {
    return o.format == "json" ? table.to_json(o.precision) : table.to_csv(o.precision);
}

inline void emit(const std::string& text, const OutputFlags& o, std::ostream& out) {
    if (o.output == "-") {
        out << text;
        return;
    }
    std::ofstream f(o.output, std::ios::binary);
    if (!f)
        throw ContractError("cannot write output file '" + o.output + "'");
    f << text;
}

/// Runs one command. argv[0] is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, unsigned threads = 1) {
    CLI::App app{"spinlab: exact diagonalization and pairwise concurrence of small spin chains "
                 "with Dzyaloshinskii-Moriya interaction",
                 "spinlab"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    ModelFlags model;
    OutputFlags output;

    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of the Hamiltonian");
    add_model_flags(spectrum, model);
    add_output_flags(spectrum, output);

    double t = 0.0;
    std::string pair_text = "1,2";
    auto* conc = app.add_subcommand("concurrence", "Concurrence of one qubit pair at temperature t");
    add_model_flags(conc, model);
    add_output_flags(conc, output);
    conc->add_option("--t", t, "Temperature in units of J/k_B (default 0 = ground-manifold mixture)");
    conc->add_option("--pair", pair_text, "Qubit pair i,j, 1-based (default 1,2)");

    std::vector<std::string> axes_text;
    std::string observables_text = "c12";
    auto* sweep = app.add_subcommand("sweep", "Observables on a 1- or 2-axis parameter grid");
    add_model_flags(sweep, model);
    add_output_flags(sweep, output);
    sweep->add_option("--axis", axes_text, "name:min:max:points or name=v1,v2,... (name in delta, d, t, h); "
                                           "give once or twice, first varies slowest")
        ->required();
    sweep->add_option("--t", t, "Temperature when t is not an axis (default 0)");
    sweep->add_option("--observables", observables_text,
                      "Comma list of c12, c13, energy_gap, purity, ground_degeneracy (default c12)");

    double t_hi = 5.0;
    auto* crit = app.add_subcommand("critical-temp", "Temperature above which the pair concurrence vanishes");
    add_model_flags(crit, model);
    add_output_flags(crit, output);
    crit->add_option("--pair", pair_text, "Qubit pair i,j, 1-based (default 1,2)");
    crit->add_option("--t-hi", t_hi, "Upper end of the temperature scan (default 5; widened if still entangled)");

    std::string free_param;
    std::string range_text;
    double tol = 1e-10;
    std::string edge_text = "auto";
    auto* phase = app.add_subcommand("phase-line", "Level crossings along one free parameter");
    add_model_flags(phase, model);
    add_output_flags(phase, output);
    phase->add_option("--free", free_param, "Free parameter: delta, d or h")->required();
    phase->add_option("--range", range_text, "lo,hi (use --range=lo,hi when lo is negative)")->required();
    phase->add_option("--tol", tol, "Bisection tolerance on the parameter (default 1e-10)");
    phase->add_option("--edge", edge_text, "Spectral edge: auto (default; ground, or top if the ground manifold never changes), ground or top");

    std::string figure_id;
    int points = 101;
    std::string temps_text;
    auto* figure = app.add_subcommand("figure", "Data for a reference concurrence plot");
    add_output_flags(figure, output);
    figure->add_option("--id", figure_id, "fig1..fig8, fig8a, fig8b, fig8c")->required();
    figure->add_option("--points", points, "Points on the parameter axis (default 101)")->check(CLI::Range(1, 1000000));
    figure->add_option("--temps", temps_text, "Comma list overriding the temperature family 0,0.1,0.5,1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help / --help-all: CLI11 prints the help of the subcommand that asked
            app.exit(e, out, err);
            return kOk;
        }
        err << "spinlab: " << e.what() << "\n";
        return kUsage;
    }

    std::string context;
    try {
        if (*spectrum) {
            const ModelSpec spec = resolve_model(model);
            context = describe(spec);
            const auto s = hermitian_eig(build_hamiltonian(spec));
            SweepTable table{{"index", "energy"}, {}};
            for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
                table.rows.push_back({static_cast<double>(k), s.eigenvalues[k]});
            emit(render(table, output), output, out);
        } else if (*conc) {
            const ModelSpec spec = resolve_model(model);
            const auto [i, j] = parse_pair(pair_text);
            context = describe(spec) + ", t=" + format_double(t);
            if (!(t >= 0.0))
                throw ContractError("--t must be >= 0");
            const auto r = pairwise_concurrence(thermal_state(build_hamiltonian(spec), t), i, j);
            SweepTable table{{"i", "j", "t", "value", "lambda1", "lambda2", "lambda3", "lambda4"}, {}};
            table.rows.push_back({static_cast<double>(i), static_cast<double>(j), t, r.value, r.lambdas[0],
                                  r.lambdas[1], r.lambdas[2], r.lambdas[3]});
            emit(render(table, output), output, out);
        } else if (*sweep) {
            SweepGrid grid;
            grid.fixed.model = resolve_model(model);
            grid.fixed.t = t;
            for (const auto& a : axes_text)
                grid.axes.push_back(parse_axis(a));
            grid.observables.clear();
            std::stringstream in(observables_text);
            std::string item;
            while (std::getline(in, item, ','))
                grid.observables.push_back(parse_observable(trim(item)));
            emit(render(run_sweep(grid, threads), output), output, out);
        } else if (*crit) {
            const ModelSpec spec = resolve_model(model);
            const auto [i, j] = parse_pair(pair_text);
            context = describe(spec);
            const auto tc = critical_temperature(spec, {i, j}, t_hi);
            std::string text;
            if (output.format == "json") {
                nlohmann::ordered_json obj{{"i", i}, {"j", j}};
                obj["t_c"] = tc ? nlohmann::ordered_json(output.precision
                                                             ? parse_double(format_value(*tc, output.precision), "t_c")
                                                             : *tc)
                                : nlohmann::ordered_json(nullptr);
                text = obj.dump(2) + "\n";
            } else {
                text = "i,j,t_c\n" + std::to_string(i) + "," + std::to_string(j) + "," +
                       (tc ? format_value(*tc, output.precision) : std::string("none")) + "\n";
            }
            emit(text, output, out);
        } else if (*phase) {
            const ModelSpec spec = resolve_model(model);
            context = describe(spec);
            const auto range = parse_list(range_text, "range");
            if (range.size() != 2)
                throw ContractError("--range expects lo,hi");
            const auto crossings =
                level_crossings(spec, free_param, range[0], range[1], tol, parse_spectral_edge(edge_text));
            SweepTable table{{free_param, "degeneracy_below", "degeneracy_at", "degeneracy_above"}, {}};
            for (const auto& c : crossings)
                table.rows.push_back({c.value, static_cast<double>(c.degeneracy_below),
                                      static_cast<double>(c.degeneracy_at), static_cast<double>(c.degeneracy_above)});
            emit(render(table, output), output, out);
        } else if (*figure) {
            SweepGrid grid = temps_text.empty()
                                 ? figure_preset(figure_id, static_cast<std::size_t>(points))
                                 : figure_preset(figure_id, static_cast<std::size_t>(points),
                                                 parse_list(temps_text, "temps"));
            emit(render(run_sweep(grid, threads), output), output, out);
        }
    } catch (const ContractError& e) {
        err << "spinlab: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericError& e) {
        err << "spinlab: numeric failure" << (context.empty() ? "" : " at " + context) << ": " << e.what() << "\n";
        return kNumeric;
    }
    return kOk;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, unsigned threads = 1) {
    std::vector<const char*> argv{"spinlab"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err, threads);
}

} // namespace spinlab::cli
