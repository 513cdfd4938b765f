// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. argv[1] = path to the ramified CLI, argv[2] = scratch directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "generators.hpp"
#include "ramified/io.hpp"
#include "ramified/optimize.hpp"
#include "ramified/transform.hpp"

using namespace ramified;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %d. %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

bool json_roundtrip_ok(const FlowField& f) {
    const FlowField back = flow_from_json(Json::parse(flow_to_json(f).dump()));
    return back.network() == f.network() && back.weights() == f.weights();
}

bool json_roundtrip_ok(const IrrigationPlan& p) {
    return plan_from_json(Json::parse(plan_to_json(p).dump())) == p;
}

// --- criterion 1: energy formula EF' --------------------------------------

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    testgen::Rng rng(101);
    double worst = 0.0;
    int count = 0;
    bool roundtrips = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const EmbeddedNetwork net =
            testgen::random_network(rng, rng.int_range(4, 26), rng.int_range(0, 24));
        const IrrigationPlan plan = testgen::random_plan(
            rng, net, rng.int_range(1, 20), rng.int_range(1, 12), trial % 2 == 0);
        const double alpha = rng.range(0.0, 1.0);
        const double irr = irrigation_cost(plan, alpha);
        const double full = full_energy(plan, alpha);
        worst = std::max(worst, std::abs(irr - full) / std::max(1.0, std::abs(full)));
        if (trial % 25 == 0) roundtrips = roundtrips && json_roundtrip_ok(plan);
        ++count;
    }
    const double elapsed = seconds_since(t0);
    report(1, "energy formula EF' (I_alpha == Ebar_alpha on every plan)",
           worst <= 1e-12 && count >= 1000 && elapsed < 10.0 && roundtrips,
           std::to_string(count) + " plans, max rel err " + fmt(worst) + ", " + fmt(elapsed) +
               " s");
}

// --- criterion 2: energy formula EF ---------------------------------------

void criterion_2() {
    testgen::Rng rng(202);
    double worst = 0.0;
    int simple_count = 0;
    bool strict_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const EmbeddedNetwork net =
            testgen::random_network(rng, rng.int_range(4, 16), rng.int_range(2, 14));
        const IrrigationPlan plan =
            testgen::random_plan(rng, net, rng.int_range(1, 12), 10, false);
        if (!is_simple(plan).all_essentially_simple) continue;
        const double alpha = rng.range(0.0, 1.0);
        const double irr = irrigation_cost(plan, alpha);
        const double gilbert = gilbert_energy_plan(plan, alpha);
        worst = std::max(worst, std::abs(irr - gilbert) / std::max(1.0, std::abs(gilbert)));
        ++simple_count;
    }
    for (int trial = 0; trial < 300; ++trial) {
        const EmbeddedNetwork net =
            testgen::random_network(rng, rng.int_range(4, 12), rng.int_range(2, 10));
        const IrrigationPlan plan =
            testgen::random_looping_plan(rng, net, rng.int_range(1, 8), 8);
        const double alpha = rng.range(0.0, 1.0);
        if (!(irrigation_cost(plan, alpha) > gilbert_energy_plan(plan, alpha)))
            strict_ok = false;
    }
    report(2, "energy formula EF (essentially simple: I == E; repeated edge: I > E)",
           worst <= 1e-12 && simple_count >= 1000 && strict_ok,
           std::to_string(simple_count) + " simple plans, max rel err " + fmt(worst) +
               ", 300 strict");
}

// --- criterion 3: equivalence at desk scale --------------------------------

void criterion_3() {
    testgen::Rng rng(303);
    double worst_gap = 0.0;
    int instances = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int nmu = rng.int_range(1, 2);
        const int nnu = rng.int_range(1, 2);
        std::vector<Atom> mu_atoms, nu_atoms;
        for (int i = 0; i < nmu; ++i)
            mu_atoms.push_back({{rng.range(0.0, 1.0), rng.range(0.0, 1.0)}, 1.0 / nmu});
        for (int i = 0; i < nnu; ++i)
            nu_atoms.push_back({{rng.range(1.5, 2.5), rng.range(0.0, 1.0)}, 1.0 / nnu});
        const AtomicMeasure mu = AtomicMeasure::make(2, mu_atoms, true);
        const AtomicMeasure nu = AtomicMeasure::make(2, nu_atoms, true);
        const int max_steiner = rng.int_range(0, 2);

        for (double alpha : {0.6, 0.8, 0.95}) {
            double min_mass = std::numeric_limits<double>::infinity();
            double min_irr = std::numeric_limits<double>::infinity();
            const RelaxOptions opts{1e-10, 600};
            enumerate_topologies(
                net_terminals(mu, nu), max_steiner,
                [&](const Topology& topo) {
                    const TreeWeights tw = tree_weights(topo);
                    const RelaxResult rr = relax_geometry(topo, alpha, opts);
                    const FlowField flow = topology_flow(topo, tw, rr.positions);
                    min_mass = std::min(min_mass, gilbert_energy(flow, alpha));
                    const Decomposition dec = flow_to_plan(flow, mu, nu);
                    min_irr = std::min(min_irr, irrigation_cost(dec.plan, alpha));
                },
                EnumerationCaps{});
            worst_gap = std::max(worst_gap, std::abs(min_mass - min_irr));
        }
        ++instances;
    }
    report(3, "Lagrangian/Eulerian equivalence at desk scale",
           worst_gap <= 1e-6 && instances >= 50,
           std::to_string(instances) + " instances x {0.6,0.8,0.95}, max |min I - min M| " +
               fmt(worst_gap));
}

// --- criterion 4: Smirnov decomposition invariants -------------------------

void criterion_4() {
    testgen::Rng rng(404);
    double worst_recon = 0.0;
    double worst_bound = 0.0;  // max of intensity - |v| per pair (should be <= 0)
    bool div_empty = true;
    bool strict_ok = true;
    bool roundtrips = true;
    int with_cycles = 0;
    int count = 0;
    while (count < 500) {
        const auto rf = testgen::random_kirchhoff_flow(rng, rng.int_range(4, 12), 6,
                                                       rng.int_range(1, 4), rng.int_range(1, 3));
        if (rf.cycles_injected == 0) continue;
        ++count;
        const Decomposition dec = flow_to_plan(rf.flow, rf.mu, rf.nu);

        worst_recon =
            std::max(worst_recon, testgen::reconstruction_error(rf.flow, dec.plan, dec.cycle_residual));
        div_empty = div_empty && divergence(dec.cycle_residual).empty();

        const PlanFlow pf = plan_to_flow(dec.plan);
        for (int f = 0; f < pf.flow.network().edge_count(); ++f) {
            const Edge& pe = pf.flow.network().edge(f);
            double input_weight = 0.0;
            for (int e = 0; e < rf.flow.network().edge_count(); ++e) {
                const Edge& ie = rf.flow.network().edge(e);
                if ((ie.tail == pe.tail && ie.head == pe.head) ||
                    (ie.tail == pe.head && ie.head == pe.tail))
                    input_weight += rf.flow.weight(e);
            }
            worst_bound = std::max(worst_bound,
                                   (pf.intensity[static_cast<std::size_t>(f)] - input_weight) /
                                       std::max(1.0, input_weight));
        }

        // An injected circulation can cancel against reverse path edges and
        // legitimately vanish; w != 0 means residual mass above the weight
        // floor, not subtraction dust.
        double residual_total = 0.0;
        for (double w : dec.cycle_residual.weights()) residual_total += w;
        if (residual_total > 1e-12) {
            ++with_cycles;
            if (!(gilbert_energy(pf.flow, 0.5) < gilbert_energy(rf.flow, 0.5))) strict_ok = false;
        }
        if (count % 20 == 0)
            roundtrips = roundtrips && json_roundtrip_ok(rf.flow) && json_roundtrip_ok(dec.plan);
    }
    // The intensity bound is structural; the comparison allows 4 ulps because
    // the two sides are independently ordered floating-point sums.
    report(4, "Smirnov decomposition (v = v_eta + w, div w = 0, i <= |v|, strict drop)",
           worst_recon <= 1e-9 && div_empty && worst_bound <= 4 * 2.220446049250313e-16 &&
               strict_ok && with_cycles > 0 && roundtrips,
           std::to_string(count) + " flows (" + std::to_string(with_cycles) +
               " residuals), recon " + fmt(worst_recon) + ", bound gap " + fmt(worst_bound));
}

// --- criterion 5: simple replacement ---------------------------------------

void criterion_5() {
    testgen::Rng rng(505);
    bool all_simple = true, marginals_ok = true, theta_ok = true, cost_ok = true;
    int count = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const EmbeddedNetwork net =
            testgen::random_network(rng, rng.int_range(4, 10), rng.int_range(2, 8));
        const IrrigationPlan plan =
            testgen::random_looping_plan(rng, net, rng.int_range(1, 8), 9);
        const IrrigationPlan replaced = simple_replacement(plan);
        ++count;

        all_simple = all_simple && is_simple(replaced).all_simple;
        marginals_ok = marginals_ok && marginals(replaced) == marginals(plan);

        const MultiplicityField before = multiplicities(plan);
        const MultiplicityField after = multiplicities(replaced);
        for (const auto& e : after.entries) {
            const auto* b = before.find(e.u, e.v);
            if (!b || e.theta > b->theta + 1e-15) theta_ok = false;
        }
        for (double alpha : {0.0, 0.5, 1.0})
            if (irrigation_cost(replaced, alpha) >
                irrigation_cost(plan, alpha) * (1 + 1e-12) + 1e-15)
                cost_ok = false;
    }
    report(5, "simple replacement (simple output, marginals, theta and I_alpha monotone)",
           all_simple && marginals_ok && theta_ok && cost_ok && count >= 500,
           std::to_string(count) + " looping plans");
}

// --- criterion 6: Y-branch geometry ----------------------------------------

void criterion_6() {
    const auto oracle = testgen::y_branch_grid_search(0.5);
    const Topology y = Topology::make(
        {{{0.0, 0.0}, 1.0}, {{1.0, 1.0}, -0.5}, {{1.0, -1.0}, -0.5}}, 1,
        {{0, 3}, {1, 3}, {2, 3}});
    const RelaxResult r = relax_geometry(y, 0.5);

    const Point& b = r.positions[3];
    const double va[2] = {1.0 - b[0], 1.0 - b[1]};
    const double vb[2] = {1.0 - b[0], -1.0 - b[1]};
    const double dot = va[0] * vb[0] + va[1] * vb[1];
    const double angle =
        std::acos(std::max(-1.0, std::min(1.0, dot / (std::hypot(va[0], va[1]) *
                                                      std::hypot(vb[0], vb[1]))))) *
        180.0 / M_PI;

    const double cost_gap = std::abs(r.cost - oracle.cost);
    report(6, "Y-branch geometry vs nested grid-search oracle",
           std::abs(angle - 90.0) <= 0.01 && cost_gap <= 1e-6,
           "angle " + fmt(angle) + " deg, cost gap " + fmt(cost_gap) + ", oracle x* " +
               fmt(oracle.x));
}

// --- criterion 7: irrigability threshold ------------------------------------

void criterion_7() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    bool threshold_ok = true;
    for (int d : {1, 2, 3}) {
        for (double alpha : {0.3, 0.5, 0.7}) {
            const DyadicReport rep = dyadic_tree_cost(d, alpha, 5);
            const double expected = std::pow(2.0, d * (1.0 - alpha) - 1.0);
            for (double r : rep.ratios) {
                worst = std::max(worst, std::abs(r - expected) / expected);
                if ((r < 1.0) != (alpha > 1.0 - 1.0 / d)) threshold_ok = false;
            }
        }
    }
    const double elapsed = seconds_since(t0);
    report(7, "irrigability threshold (ratio 2^{d(1-alpha)-1}, < 1 iff alpha > 1 - 1/d)",
           worst <= 1e-12 && threshold_ok && elapsed < 5.0,
           "max rel err " + fmt(worst) + ", " + fmt(elapsed) + " s");
}

// --- criterion 8: optimizer soundness ---------------------------------------

void criterion_8() {
    testgen::Rng rng(808);
    bool kirchhoff_ok = true, acyclic_ok = true, bound_ok = true;
    int instances = 0;
    for (int trial = 0; trial < 15; ++trial) {
        const int nmu = rng.int_range(1, 2);
        const int nnu = rng.int_range(1, 3);
        if (nmu + nnu > 5) continue;
        std::vector<Atom> mu_atoms, nu_atoms;
        for (int i = 0; i < nmu; ++i)
            mu_atoms.push_back({{rng.range(0.0, 1.0), rng.range(0.0, 1.0)}, 1.0 / nmu});
        for (int i = 0; i < nnu; ++i)
            nu_atoms.push_back({{rng.range(1.0, 2.0), rng.range(0.0, 1.0)}, 1.0 / nnu});
        const AtomicMeasure mu = AtomicMeasure::make(2, mu_atoms, true);
        const AtomicMeasure nu = AtomicMeasure::make(2, nu_atoms, true);

        SolveConfig cfg;
        cfg.alpha = rng.range(0.2, 0.95);
        cfg.max_steiner = trial < 12 ? rng.int_range(0, 2) : 3;
        cfg.relax_max_iters = 800;
        cfg.rng_seed = static_cast<std::uint64_t>(trial);

        const SolveResult ex = solve_discrete(mu, nu, cfg);
        cfg.mode = SolveMode::LocalSearch;
        const SolveResult loc = solve_discrete(mu, nu, cfg);

        for (const SolveResult* r : {&ex, &loc}) {
            kirchhoff_ok = kirchhoff_ok && check_kirchhoff(r->flow, mu, nu, 1e-9).ok;
            acyclic_ok = acyclic_ok && !find_cycle(r->flow).has_value();
        }
        bound_ok = bound_ok && loc.cost >= ex.cost - 1e-6;
        ++instances;
    }
    report(8, "optimizer soundness (Kirchhoff, acyclic, local >= exhaustive - 1e-6)",
           kirchhoff_ok && acyclic_ok && bound_ok && instances >= 10,
           std::to_string(instances) + " instances, both modes");
}

// --- criterion 9: determinism and round-trip --------------------------------

int run_cli(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_9(const std::string& cli, const fs::path& scratch) {
    fs::create_directories(scratch);
    const fs::path mu_path = scratch / "mu.json";
    const fs::path nu_path = scratch / "nu.json";
    save_json_file(mu_path.string(),
                   measure_to_json(AtomicMeasure::make(
                       2, {{{0.0, 0.0}, 0.5}, {{0.0, 1.0}, 0.5}}, true)));
    save_json_file(nu_path.string(),
                   measure_to_json(AtomicMeasure::make(
                       2, {{{2.0, 0.2}, 0.25}, {{2.0, 0.8}, 0.75}}, true)));

    bool determinism = true;
    for (const std::string mode : {"exhaustive", "local"}) {
        const fs::path out1 = scratch / ("run1_" + mode + ".json");
        const fs::path out2 = scratch / ("run2_" + mode + ".json");
        const std::string base = cli + " solve --alpha 0.7 --mode " + mode +
                                 " --max-steiner 2 --seed 42 " + mu_path.string() + " " +
                                 nu_path.string() + " -o ";
        if (run_cli(base + out1.string() + " > /dev/null") != 0) determinism = false;
        if (run_cli(base + out2.string() + " > /dev/null") != 0) determinism = false;
        if (slurp(out1).empty() || slurp(out1) != slurp(out2)) determinism = false;
    }

    // Library-level repeatability with a fixed seed.
    SolveConfig cfg;
    cfg.alpha = 0.55;
    cfg.mode = SolveMode::LocalSearch;
    cfg.max_steiner = 2;
    cfg.rng_seed = 7;
    const AtomicMeasure mu = measure_from_json(load_json_file(mu_path.string()), true);
    const AtomicMeasure nu = measure_from_json(load_json_file(nu_path.string()), true);
    const std::string dump1 = flow_to_json(solve_discrete(mu, nu, cfg).flow).dump(2);
    const std::string dump2 = flow_to_json(solve_discrete(mu, nu, cfg).flow).dump(2);
    determinism = determinism && dump1 == dump2;

    // Round-trips over a randomized corpus.
    bool roundtrips = true;
    testgen::Rng rng(909);
    for (int trial = 0; trial < 200; ++trial) {
        const auto rf = testgen::random_kirchhoff_flow(rng, rng.int_range(3, 10), 5,
                                                       rng.int_range(1, 4), rng.int_range(0, 3));
        roundtrips = roundtrips && json_roundtrip_ok(rf.flow);
        const AtomicMeasure m2 = measure_from_json(Json::parse(measure_to_json(rf.mu).dump()));
        roundtrips = roundtrips && m2 == rf.mu;
        const EmbeddedNetwork net = testgen::random_network(rng, rng.int_range(3, 8), 4);
        roundtrips =
            roundtrips && json_roundtrip_ok(testgen::random_plan(rng, net, rng.int_range(1, 5), 6, true));
    }

    // CLI exit-code contract: 2 on usage errors, 1 on domain errors.
    bool exit_codes = true;
    exit_codes = exit_codes && run_cli(cli + " eval > /dev/null 2>&1") == 2;
    exit_codes = exit_codes && run_cli(cli + " nosuchcommand > /dev/null 2>&1") == 2;
    const fs::path bad_alpha = scratch / "flow_for_err.json";
    {
        const EmbeddedNetwork net =
            EmbeddedNetwork::make(2, {{0.0, 0.0}, {1.0, 0.0}}, {{0, 1}});
        save_json_file(bad_alpha.string(), flow_to_json(FlowField::make(net, {1.0})));
    }
    exit_codes =
        exit_codes && run_cli(cli + " eval --alpha 1.5 " + bad_alpha.string() + " > /dev/null 2>&1") == 1;

    report(9, "determinism and lossless round-trips",
           determinism && roundtrips && exit_codes,
           std::string("byte-identical solves, 200-instance corpus, exit codes ") +
               (exit_codes ? "ok" : "wrong"));
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const fs::path scratch = argc > 2 ? fs::path(argv[2]) : fs::path("acceptance_scratch");

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (!cli.empty()) {
        criterion_9(cli, scratch);
    } else {
        report(9, "determinism and lossless round-trips", false, "CLI path not provided");
    }

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 9 criteria passed\n");
    return 0;
}
