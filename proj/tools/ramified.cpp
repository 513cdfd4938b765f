#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ramified/io.hpp"
#include "ramified/optimize.hpp"
#include "ramified/svg.hpp"
#include "ramified/transform.hpp"

namespace {

using namespace ramified;

std::string fmt12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12f", x);
    return buf;
}

std::string fmt_point(const Point& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ", ";
        s += fmt12(p[i]);
    }
    return s + ")";
}

std::size_t atom_cap_from_env() {
    if (const char* env = std::getenv("RAMIFIED_MAX_ATOMS")) {
        const long long v = std::atoll(env);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return kDefaultAtomCap;
}

void check_atom_cap(const AtomicMeasure& m, const std::string& which) {
    if (m.size() > atom_cap_from_env())
        fail(Errc::ResourceLimit, which + " exceeds RAMIFIED_MAX_ATOMS");
}

struct ManifestWriter {
    Json manifest;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    ManifestWriter(int argc, char** argv) {
        std::string cmd;
        for (int i = 0; i < argc; ++i) {
            if (i) cmd += ' ';
            cmd += argv[i];
        }
        manifest["command"] = cmd;
        manifest["config"] = Json::object();
        manifest["inputs"] = Json::object();
        manifest["outputs"] = Json::object();
    }

    void add_input(const std::string& path) { manifest["inputs"][path] = file_digest(path); }
    void add_output(const std::string& path) { manifest["outputs"][path] = file_digest(path); }

    void write(const std::string& next_to) {
        manifest["wall_time"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        save_json_file(next_to + ".manifest.json", manifest);
    }
};

void print_measure(const char* label, const AtomicMeasure& m) {
    std::cout << label << ":\n";
    for (const Atom& a : m.atoms())
        std::cout << "  " << fmt_point(a.p) << "  mass " << fmt12(a.mass) << "\n";
}

int run_eval(const std::string& path, double alpha) {
    const FlowField flow = flow_from_json(load_json_file(path));
    std::cout << "E_alpha = " << fmt12(gilbert_energy(flow, alpha)) << "\n";
    const SignedAtomic div = divergence(flow);
    print_measure("divergence positive part", div.positive());
    print_measure("divergence negative part", div.negative());
    std::cout << "cycles = " << cancel_cycles(flow).cycles_removed << "\n";
    return 0;
}

int run_eval_plan(const std::string& path, double alpha) {
    const IrrigationPlan plan = plan_from_json(load_json_file(path));
    const CostReport report = evaluate_plan(plan, alpha);
    std::cout << "I_alpha     = " << fmt12(report.irrigation_cost) << "\n";
    std::cout << "E_alpha     = " << fmt12(report.gilbert_energy) << "\n";
    std::cout << "Ebar_alpha  = " << fmt12(report.full_energy) << "\n";
    std::cout << "M_alpha     = " << fmt12(report.alpha_mass) << "\n";
    std::cout << "L           = " << fmt12(report.total_length) << "\n";
    std::cout << "T           = " << fmt12(report.stopping_time) << "\n";
    const SimplicityReport simplicity = is_simple(plan);
    std::cout << "simple      = " << (simplicity.all_simple ? "true" : "false") << "\n";
    std::cout << "ess_simple  = " << (simplicity.all_essentially_simple ? "true" : "false") << "\n";
    const auto [mu, nu] = marginals(plan);
    print_measure("mu", mu);
    print_measure("nu", nu);
    std::cout << "edges (u, v, |e|, theta, m, flow, intensity):\n";
    for (const auto& row : report.edges)
        std::cout << "  " << row.u << " " << row.v << "  " << fmt12(row.length) << "  "
                  << fmt12(row.theta) << "  " << fmt12(row.m) << "  " << fmt12(row.flow) << "  "
                  << fmt12(row.intensity) << "\n";
    return 0;
}

int run_solve(int argc, char** argv, const std::string& mu_path, const std::string& nu_path,
              const std::string& out_path, const SolveConfig& cfg) {
    ManifestWriter manifest(argc, argv);
    const AtomicMeasure mu = measure_from_json(load_json_file(mu_path), true);
    const AtomicMeasure nu = measure_from_json(load_json_file(nu_path), true);
    check_atom_cap(mu, "mu");
    check_atom_cap(nu, "nu");

    const SolveResult result = solve_discrete(mu, nu, cfg);
    save_json_file(out_path, flow_to_json(result.flow));

    manifest.manifest["config"] = {
        {"alpha", cfg.alpha},
        {"mode", cfg.mode == SolveMode::Exhaustive ? "exhaustive" : "local"},
        {"max_steiner", cfg.max_steiner},
        {"relax_tol", cfg.relax_tol},
        {"relax_max_iters", cfg.relax_max_iters},
        {"moves_budget", cfg.moves_budget},
        {"rng_seed", cfg.rng_seed},
    };
    manifest.add_input(mu_path);
    manifest.add_input(nu_path);
    manifest.add_output(out_path);
    manifest.write(out_path);

    std::cout << "cost = " << fmt12(result.cost) << "\n";
    for (const TraceEntry& t : result.trace)
        std::cout << "  " << t.event << "  " << fmt12(t.cost) << "\n";
    return 0;
}

int run_convert(int argc, char** argv, const std::string& to, const std::string& input,
                const std::string& mu_path, const std::string& nu_path,
                const std::string& out_path) {
    ManifestWriter manifest(argc, argv);
    manifest.manifest["config"] = {{"to", to}};
    manifest.add_input(input);

    if (to == "plan") {
        if (mu_path.empty() || nu_path.empty())
            fail(Errc::ParseError, "convert --to plan needs --mu and --nu");
        manifest.add_input(mu_path);
        manifest.add_input(nu_path);
        const FlowField flow = flow_from_json(load_json_file(input));
        const AtomicMeasure mu = measure_from_json(load_json_file(mu_path), true);
        const AtomicMeasure nu = measure_from_json(load_json_file(nu_path), true);
        check_atom_cap(mu, "mu");
        check_atom_cap(nu, "nu");
        const Decomposition dec = flow_to_plan(flow, mu, nu);
        Json out = plan_to_json(dec.plan);
        out["residual"] = flow_to_json(dec.cycle_residual);
        save_json_file(out_path, out);
    } else if (to == "flow") {
        const IrrigationPlan plan = plan_from_json(load_json_file(input));
        const PlanFlow pf = plan_to_flow(plan);
        Json out = flow_to_json(pf.flow);
        out["intensity"] = pf.intensity;
        save_json_file(out_path, out);
    } else {
        fail(Errc::ParseError, "--to must be plan or flow");
    }
    manifest.add_output(out_path);
    manifest.write(out_path);
    return 0;
}

int run_verify(const std::string& path, double alpha) {
    const IrrigationPlan plan = plan_from_json(load_json_file(path));
    const PlanFlow pf = plan_to_flow(plan);
    const EquivalenceReport report = verify_equivalence(plan, pf.flow, alpha);
    std::cout << "I_alpha    = " << fmt12(report.irrigation_cost) << "\n";
    std::cout << "E_alpha    = " << fmt12(report.gilbert_energy_plan) << "\n";
    std::cout << "Ebar_alpha = " << fmt12(report.full_energy) << "\n";
    std::cout << "M_alpha    = " << fmt12(report.alpha_mass) << "\n";
    std::cout << "max(intensity - |flow|) = " << fmt12(report.max_intensity_flow_gap) << "\n";
    std::cout << "costs_equal = " << (report.costs_equal ? "true" : "false") << "\n";
    std::cout << "intensity_equals_flow = " << (report.intensity_equals_flow ? "true" : "false")
              << "\n";
    return 0;
}

int run_dyadic(int dim, double alpha, int levels) {
    const DyadicReport report = dyadic_tree_cost(dim, alpha, levels, atom_cap_from_env());
    std::cout << "total = " << fmt12(report.total) << "\n";
    std::cout << "level  cost             ratio\n";
    for (std::size_t l = 0; l < report.level_costs.size(); ++l) {
        std::cout << "  " << (l + 1) << "    " << fmt12(report.level_costs[l]);
        if (l > 0) std::cout << "  " << fmt12(report.ratios[l - 1]);
        std::cout << "\n";
    }
    return 0;
}

int run_export_svg(const std::string& input, const std::string& out_path, double alpha) {
    const FlowField flow = flow_from_json(load_json_file(input));
    std::ofstream out(out_path);
    if (!out) fail(Errc::ParseError, "cannot write " + out_path);
    out << render_svg(flow, alpha);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ramified: branched-transport toolkit"};
    app.require_subcommand(1);

    double alpha = 0.5;
    std::string input, mu_path, nu_path, out_path, to, mode;
    int dim = 2, levels = 4, max_steiner = 1, relax_iters = 10000, moves_budget = 1000;
    double relax_tol = 1e-10;
    std::uint64_t seed = 0;

    auto* eval = app.add_subcommand("eval", "evaluate E_alpha of a flow");
    eval->add_option("--alpha", alpha, "cost exponent in [0,1]")->required();
    eval->add_option("flow", input, "flow JSON file")->required();

    auto* eval_plan = app.add_subcommand("eval-plan", "evaluate a plan's cost functionals");
    eval_plan->add_option("--alpha", alpha)->required();
    eval_plan->add_option("plan", input, "plan JSON file")->required();

    auto* solve = app.add_subcommand("solve", "solve the discrete irrigation problem");
    solve->add_option("--alpha", alpha)->required();
    solve->add_option("--mode", mode, "exhaustive|local")->default_val("exhaustive");
    solve->add_option("--max-steiner", max_steiner);
    solve->add_option("--seed", seed);
    solve->add_option("--relax-tol", relax_tol);
    solve->add_option("--relax-iters", relax_iters);
    solve->add_option("--moves-budget", moves_budget);
    solve->add_option("mu", mu_path)->required();
    solve->add_option("nu", nu_path)->required();
    solve->add_option("-o,--output", out_path)->required();

    auto* convert = app.add_subcommand("convert", "convert between plan and flow");
    convert->add_option("--to", to, "plan|flow")->required();
    convert->add_option("input", input)->required();
    convert->add_option("--mu", mu_path);
    convert->add_option("--nu", nu_path);
    convert->add_option("-o,--output", out_path)->required();

    auto* verify = app.add_subcommand("verify", "Lagrangian/Eulerian equivalence report");
    verify->add_option("--alpha", alpha)->required();
    verify->add_option("plan", input)->required();

    auto* dyadic = app.add_subcommand("dyadic", "dyadic-cube irrigation experiment");
    dyadic->add_option("--dim", dim)->required();
    dyadic->add_option("--alpha", alpha)->required();
    dyadic->add_option("--levels", levels)->required();

    auto* export_svg = app.add_subcommand("export-svg", "draw a 2-D flow as SVG");
    export_svg->add_option("--alpha", alpha)->default_val(0.5);
    export_svg->add_option("input", input)->required();
    export_svg->add_option("-o,--output", out_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*eval) return run_eval(input, alpha);
        if (*eval_plan) return run_eval_plan(input, alpha);
        if (*solve) {
            SolveConfig cfg;
            cfg.alpha = alpha;
            if (mode == "exhaustive")
                cfg.mode = SolveMode::Exhaustive;
            else if (mode == "local")
                cfg.mode = SolveMode::LocalSearch;
            else
                fail(Errc::ParseError, "--mode must be exhaustive or local");
            cfg.max_steiner = max_steiner;
            cfg.relax_tol = relax_tol;
            cfg.relax_max_iters = relax_iters;
            cfg.moves_budget = moves_budget;
            cfg.rng_seed = seed;
            return run_solve(argc, argv, mu_path, nu_path, out_path, cfg);
        }
        if (*convert) return run_convert(argc, argv, to, input, mu_path, nu_path, out_path);
        if (*verify) return run_verify(input, alpha);
        if (*dyadic) return run_dyadic(dim, alpha, levels);
        if (*export_svg) return run_export_svg(input, out_path, alpha);
    } catch (const ramified::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
