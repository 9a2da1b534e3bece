// Copyright (c) oscilab contributors
// SPDX-License-Identifier: Apache-2.0

#include "oscilab/scenario.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "oscilab/dispersion.hpp"
#include "oscilab/fdsolver.hpp"
#include "oscilab/weakform.hpp"

namespace oscilab::scenario {

using nlohmann::json;

namespace {

materials::ScalarC1 base_profile(const Scenario& sc) {
    if (sc.law_base == "linear" || sc.law_base == "raw_linear")
        return materials::ScalarC1::linear(sc.law_value);
    if (sc.law_base == "constant") return materials::ScalarC1::constant(sc.law_value);
    throw std::invalid_argument("scenario: unknown law_base '" + sc.law_base + "'");
}

// "raw_linear" wires the base profile straight through (no window transport),
// producing a monotone law that violates the two-phase identity: the standard
// negative control.
materials::MaterialLaw scenario_law(const Scenario& sc, materials::LawKind kind) {
    materials::PhasePair pair{sc.a, sc.b};
    if (sc.law_base == "raw_linear") {
        double lo = (kind == materials::LawKind::pressure) ? 0.25 / (2.0 * sc.b) : 0.5 * sc.a;
        double hi = (kind == materials::LawKind::pressure) ? 2.0 / sc.a : 3.0 * sc.b;
        return materials::law_from_callable(kind, pair, lo, hi, base_profile(sc), sc.exponent);
    }
    switch (kind) {
        case materials::LawKind::sigma: return materials::build_sigma(pair, base_profile(sc));
        case materials::LawKind::phi:
            return materials::build_phi(pair, sc.exponent, base_profile(sc));
        case materials::LawKind::pressure:
            return materials::build_pressure(pair, base_profile(sc));
        case materials::LawKind::tau:
            return materials::law_from_callable(materials::LawKind::tau, pair, 0.5 * sc.a,
                                                2.0 * sc.a,
                                                materials::ScalarC1::constant(sc.tau_const));
    }
    throw std::logic_error("scenario_law: unreachable");
}

json rh_to_json(const weakform::RHReport& rh) {
    json j;
    for (std::size_t i = 0; i < rh.condition_names.size(); ++i)
        j[rh.condition_names[i]] = rh.max_residuals[i];
    j["max"] = rh.max_residual;
    return j;
}

json certification_to_json(const weakform::Certification& c) {
    json j;
    j["rh"] = rh_to_json(c.rh);
    j["weak_max"] = c.weak_max;
    j["interior_max"] = c.interior_max;
    j["tolerances"] = {{"rh", c.tol.rh}, {"weak", c.tol.weak}, {"interior", c.tol.interior}};
    j["rh_pass"] = c.rh_pass;
    j["weak_pass"] = c.weak_pass;
    j["interior_pass"] = c.interior_pass;
    j["pass"] = c.pass();
    return j;
}

std::string fields_csv(const constructors::PiecewisePeriodicSolution& sol) {
    std::ostringstream os;
    os.precision(17);
    os << "t,x_or_y,phase_id,u_or_rho,v_or_u,theta\n";
    for (double t : {1.0, 1.25, 1.5, 1.75, 2.0})
        for (int i = 0; i <= 100; ++i) {
            double z = -1.0 + 2.0 * i / 100.0;
            auto s = sol.eval(t, z);
            os << t << "," << z << "," << s.phase << "," << s.u << "," << s.v << "," << s.theta
               << "\n";
        }
    return os.str();
}

json young_measure_json(const constructors::WeakLimits& wl) {
    json atoms = json::array();
    for (const auto& atom : wl.strain_measure.atoms) {
        json a;
        a["weight"] = atom.weight;
        a["support_at_t1"] = atom.support(1.0);
        a["support_at_t2"] = atom.support(2.0);
        atoms.push_back(a);
    }
    return atoms;
}

json report_header(const Scenario& sc) {
    json j;
    j["schema"] = "oscilab-report/1";
    j["scenario"] = sc.name;
    j["system"] = sc.system;
    j["seed"] = sc.seed;
    return j;
}

}  // namespace

Scenario Scenario::from_json_text(const std::string& text) {
    json j = json::parse(text);
    Scenario sc;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("name", sc.name);
    get("system", sc.system);
    if (j.contains("pair")) {
        sc.a = j["pair"].value("a", sc.a);
        sc.b = j["pair"].value("b", sc.b);
    }
    get("fraction", sc.fraction);
    get("mu", sc.mu);
    get("mode", sc.mode);
    get("exponent", sc.exponent);
    get("phiA", sc.phiA);
    get("phiB", sc.phiB);
    if (j.contains("law")) {
        sc.law_base = j["law"].value("base", sc.law_base);
        sc.law_value = j["law"].value("value", sc.law_value);
    }
    get("tau_const", sc.tau_const);
    get("n_list", sc.n_list);
    get("test_count", sc.test_count);
    get("seed", sc.seed);
    get("output_dir", sc.output_dir);
    if (j.contains("fd")) {
        sc.fd_N = j["fd"].value("N", sc.fd_N);
        sc.fd_dt = j["fd"].value("dt", sc.fd_dt);
        sc.fd_mode = j["fd"].value("mode", sc.fd_mode);
        sc.fd_refine = j["fd"].value("refine", sc.fd_refine);
    }
    return sc;
}

Scenario Scenario::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("scenario: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

void Scenario::validate() const {
    if (system != "bar" && system != "viscoplastic" && system != "gas" && system != "euler" &&
        system != "twinning")
        throw std::invalid_argument("scenario: unknown system '" + system + "'");
    if (!(a > 0.0) || !(2.0 * a < b))
        throw std::invalid_argument("scenario: pair must satisfy 0 < a, 2a < b");
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("scenario: fraction must lie in (0,1)");
    if (!(mu > 0.0)) throw std::invalid_argument("scenario: mu must be > 0");
    if (mode < 1) throw std::invalid_argument("scenario: mode must be >= 1");
    if (test_count < 1) throw std::invalid_argument("scenario: test_count must be >= 1");
}

Outcome run_construct(const Scenario& sc) {
    sc.validate();
    Outcome out;
    json rep = report_header(sc);
    auto quad = weakform::QuadratureSpec{};
    auto tol = weakform::Tolerances{};

    if (sc.system == "twinning") {
        Vec xi(1.0, 0.0), nu(0.0, 1.0);
        materials::TwinningPair pair{Mat::identity(2), sc.a * xi, sc.b * xi, nu};
        auto W = materials::make_condition_C_energy(pair, base_profile(sc));
        auto sol =
            constructors::twinning_dynamic(pair.F0, pair.a_vec, pair.b_vec, nu, W, sc.fraction);
        auto tests = weakform::make_random_tests_nd(2, sc.test_count, sc.seed);
        auto cert = weakform::certify(sol, tests, quad, tol);
        rep["certification"] = certification_to_json(cert);
        out.pass = cert.pass();
        out.report_json = rep.dump(2);
        return out;
    }

    constructors::PhasePair pair{sc.a, sc.b};

    // constitutive pre-check: a law violating its two-phase identity fails
    // certification (reported residual), it is not a usage error
    if (sc.system == "bar" || sc.system == "viscoplastic" || sc.system == "euler") {
        materials::LawKind kind = (sc.system == "bar")      ? materials::LawKind::sigma
                                  : (sc.system == "euler") ? materials::LawKind::pressure
                                                           : materials::LawKind::phi;
        auto law = scenario_law(sc, kind);
        double residual = law.constraint_residual();
        rep["law_constraint_residual"] = residual;
        if (residual >= 1e-10) {
            rep["certification"] = {{"pass", false}, {"reason", "constitutive identity violated"}};
            rep["pass"] = false;
            out.pass = false;
            out.report_json = rep.dump(2);
            return out;
        }
    }

    constructors::PiecewisePeriodicSolution sol;
    if (sc.system == "bar") {
        sol = constructors::bar_solution(pair, sc.fraction,
                                         scenario_law(sc, materials::LawKind::sigma), sc.mu);
    } else if (sc.system == "viscoplastic") {
        sol = constructors::viscoplastic_solution(
            pair, sc.fraction, scenario_law(sc, materials::LawKind::phi), sc.exponent);
    } else if (sc.system == "gas") {
        auto tau_base = scenario_law(sc, materials::LawKind::tau);
        auto iface =
            constructors::gas_interface_construct(sc.a, sc.b, sc.phiA, sc.phiB, tau_base, sc.mu);
        rep["gas_interface"] = {{"identity_residual", iface.identity_residual},
                                {"theta_hat_min", iface.theta_hat_min}};
        sol = constructors::gas_oscillatory(sc.a, sc.b, sc.fraction, iface, sc.mu);
    } else {  // euler
        sol = constructors::ns_oscillatory(pair, sc.fraction,
                                           scenario_law(sc, materials::LawKind::pressure), sc.mu,
                                           sc.mode);
    }
    if (sc.mode > 1 && sc.system != "euler") sol = constructors::rescale(sol, sc.mode);

    auto tests = weakform::make_random_tests(sc.test_count, sc.seed);
    auto cert = weakform::certify(sol, tests, quad, tol);
    rep["certification"] = certification_to_json(cert);

    auto wl = constructors::weak_limits(sol);
    rep["young_measure"] = young_measure_json(wl);
    rep["weak_limits"] = {{"u_at_t1", wl.u_limit(1.0)},
                          {"u_at_t2", wl.u_limit(2.0)},
                          {"vx", wl.vx_limit}};
    rep["pass"] = cert.pass();
    if (sol.has_temperature())
        rep["weak_limits"]["theta_at_t2"] = wl.theta_limit ? wl.theta_limit(2.0) : 0.0;
    if (sc.system == "gas") {
        auto ent = weakform::entropy_production(sol);
        rep["entropy"] = {{"identity_residual", ent.max_identity_residual},
                          {"min_production", ent.min_production}};
    }

    out.pass = cert.pass();
    out.report_json = rep.dump(2);
    out.csv = fields_csv(sol);
    return out;
}

Outcome run_rates(const Scenario& sc) {
    sc.validate();
    if (sc.n_list.size() < 3)
        throw std::invalid_argument("rates: need at least 3 entries in n_list");
    Outcome out;
    json rep = report_header(sc);

    constructors::PhasePair pair{sc.a, sc.b};
    constructors::PiecewisePeriodicSolution base;
    if (sc.system == "bar") {
        base = constructors::bar_solution(pair, sc.fraction,
                                          scenario_law(sc, materials::LawKind::sigma), sc.mu);
    } else if (sc.system == "gas") {
        auto iface = constructors::gas_interface_construct(
            sc.a, sc.b, sc.phiA, sc.phiB, scenario_law(sc, materials::LawKind::tau), sc.mu);
        base = constructors::gas_oscillatory(sc.a, sc.b, sc.fraction, iface, sc.mu);
    } else if (sc.system == "euler") {
        base = constructors::ns_oscillatory(
            pair, sc.fraction, scenario_law(sc, materials::LawKind::pressure), sc.mu, 1);
    } else {
        throw std::invalid_argument("rates: system must be bar, gas or euler");
    }

    auto tests = weakform::make_random_tests(sc.test_count, sc.seed);
    auto rates = weakform::weak_convergence_rate(base, sc.n_list, tests);

    const double threshold = -0.9;
    bool pass = true;
    json slopes;
    for (const auto& [q, s] : rates.slopes) {
        slopes[q] = s;
        if (!(s <= threshold)) pass = false;
    }
    if (!rates.v_l2_errors.empty()) {
        slopes["v_l2"] = rates.v_l2_slope;
        if (!(rates.v_l2_slope <= threshold)) pass = false;
    }
    rep["slopes"] = slopes;
    rep["threshold"] = threshold;

    std::ostringstream csv;
    csv.precision(17);
    csv << "n";
    for (const auto& [q, g] : rates.gaps) csv << ",gap_" << q;
    if (!rates.v_l2_errors.empty()) csv << ",v_l2";
    csv << "\n";
    for (std::size_t i = 0; i < rates.n_list.size(); ++i) {
        csv << rates.n_list[i];
        for (const auto& [q, g] : rates.gaps) csv << "," << g[i];
        if (!rates.v_l2_errors.empty()) csv << "," << rates.v_l2_errors[i];
        csv << "\n";
    }
    out.csv = csv.str();

    if (sc.system == "bar") {
        auto gap = weakform::sigma_composition_gap(base);
        rep["sigma_composition"] = {{"sup_gap", gap.sup_gap}, {"weak_gap", gap.weak_gap}};
        if (!(gap.sup_gap >= 0.1)) pass = false;
    }
    rep["pass"] = pass;
    out.pass = pass;
    out.report_json = rep.dump(2);
    return out;
}

Outcome run_simulate(const Scenario& sc) {
    sc.validate();
    Outcome out;
    json rep = report_header(sc);

    constructors::PhasePair pair{sc.a, sc.b};
    auto sigma = scenario_law(sc, materials::LawKind::sigma);
    auto bar = constructors::bar_solution(pair, sc.fraction, sigma, sc.mu);
    auto sol = constructors::rescale(bar, sc.fd_mode);

    json runs = json::array();
    bool pass = true;
    int N = sc.fd_N;
    std::ostringstream csv;
    csv.precision(17);
    csv << "t,x,u,v,S\n";
    for (int level = 0; level <= sc.fd_refine; ++level, N *= 2) {
        fdsolver::Grid1D grid;
        grid.N = N;
        grid.dt = sc.fd_dt;
        grid.validate(sc.fd_mode);
        std::vector<double> u0, v0;
        fdsolver::sample_initial(sol, grid, u0, v0);
        const double c = sol.v0();
        auto run = fdsolver::solve_bar(sigma, sc.mu, u0, v0, grid, {1.5},
                                       fdsolver::BoundaryKind::periodic, nullptr, c);

        std::vector<double> ifpos = sol.interface_positions(1.0, 0.0, 1.0);
        const auto& last = run.snapshots.back();
        auto met = fdsolver::oscillation_metric(last, sc.a, sc.b);
        auto stats = fdsolver::total_stress_stats(last, sigma, sc.mu, grid, ifpos, 3, c);
        fdsolver::ExactFields exact{
            [&sol](double t, double x) { return sol.eval(t, x).u; },
            [&sol, c](double t, double x) { return sol.eval(t, x).v - c * x; }};
        double l1 = fdsolver::l1_error_excluding_collar(last, exact, grid, ifpos, 3);

        json jr;
        jr["N"] = grid.N;
        jr["steps"] = run.steps;
        jr["dt"] = run.actual_dt;
        jr["mass_drift_per_step"] = run.mass_drift_per_step;
        jr["histogram"] = {{"weight_a", met.weight_a}, {"weight_b", met.weight_b}};
        jr["tv_per_unit_length"] = met.tv_per_unit_length;
        jr["stress_stddev"] = stats.stddev;
        jr["l1_error_collar_excluded"] = l1;
        bool level_pass = std::fabs(met.weight_a - sc.fraction) <= 0.1 && stats.stddev < 5e-2;
        jr["pass"] = level_pass;
        pass = pass && level_pass;
        runs.push_back(jr);

        if (level == 0)
            for (const auto& snap : run.snapshots)
                for (int i = 0; i < grid.N; i += std::max(1, grid.N / 128)) {
                    double x = (i + 0.5) * grid.dx();
                    int ip = (i + 1) % grid.N, im = (i - 1 + grid.N) % grid.N;
                    double vx = c + (snap.v[static_cast<std::size_t>(ip)] -
                                     snap.v[static_cast<std::size_t>(im)]) /
                                        (2.0 * grid.dx());
                    double ui = snap.u[static_cast<std::size_t>(i)];
                    csv << snap.t << "," << x << "," << ui << ","
                        << c * x + snap.v[static_cast<std::size_t>(i)] << ","
                        << sigma.value(ui) + (sc.mu / ui) * vx << "\n";
                }
    }
    rep["runs"] = runs;
    rep["pass"] = pass;
    out.pass = pass;
    out.report_json = rep.dump(2);
    out.csv = csv.str();
    return out;
}

Outcome run_dispersion(const DispersionRequest& rq) {
    Outcome out;
    json rep;
    rep["schema"] = "oscilab-report/1";
    rep["kind"] = "dispersion";
    rep["params"] = {{"lambda", rq.lambda}, {"m", rq.m}, {"mu", rq.mu}, {"kappa", rq.kappa}};
    rep["order"] = rq.order;

    std::vector<int> ns;
    if (rq.dyadic)
        for (int n = rq.n_from; n <= rq.n_to; n *= 2) ns.push_back(n);
    else
        for (int n = rq.n_from; n <= rq.n_to; ++n) ns.push_back(n);
    if (ns.empty()) throw std::invalid_argument("dispersion: empty n range");

    std::ostringstream csv;
    csv.precision(17);
    csv << "n,rho1_re,rho1_im,rho2_re,rho2_im,rho3_re,rho3_im,"
           "asym1,asym2,asym3,err1,err2,err3,vieta1,vieta2,vieta3\n";
    json rows = json::array();
    for (int n : ns) {
        dispersion::LinearTVParams p{rq.lambda, rq.m, rq.mu, rq.kappa, n};
        auto cubic = dispersion::characteristic_cubic(p);
        auto roots = dispersion::solve_cubic(cubic);
        auto vieta = dispersion::vieta_residual(roots, cubic);
        std::array<double, 3> asym{0.0, 0.0, 0.0};
        bool have_asym = rq.mu != rq.kappa;
        if (have_asym) asym = dispersion::asymptotic_roots(p, rq.order);
        csv << n;
        json row;
        row["n"] = n;
        for (int i = 0; i < 3; ++i)
            csv << "," << roots.roots[static_cast<std::size_t>(i)].real() << ","
                << roots.roots[static_cast<std::size_t>(i)].imag();
        for (int i = 0; i < 3; ++i) csv << "," << (have_asym ? asym[static_cast<std::size_t>(i)] : 0.0);
        for (int i = 0; i < 3; ++i) {
            double err = have_asym ? std::fabs(roots.roots[static_cast<std::size_t>(i)].real() -
                                               asym[static_cast<std::size_t>(i)])
                                   : 0.0;
            csv << "," << err;
            row["err" + std::to_string(i + 1)] = err;
        }
        for (double v : vieta) csv << "," << v;
        csv << "\n";
        row["vieta_max"] = std::max({vieta[0], vieta[1], vieta[2]});
        rows.push_back(row);
    }
    rep["rows"] = rows;
    out.pass = true;
    out.report_json = rep.dump(2);
    out.csv = csv.str();
    return out;
}

}  // namespace oscilab::scenario
