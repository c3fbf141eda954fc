// phaseq: batch front end for the coherent-state quantization laboratory.
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "phaseq/canonical.hpp"
#include "phaseq/classical.hpp"
#include "phaseq/pathint.hpp"
#include "phaseq/quantize.hpp"
#include "phaseq/serialize.hpp"

using nlohmann::json;
using namespace phaseq;

namespace {

struct RunConfig {
    double hbar = 1.0;
    int dim = 60;
    std::uint64_t seed = 12345;
    int workers = 0;
    // command-scoped knobs (0/empty means "derive a default")
    double grid_L = 0.0;
    int grid_n = 0;
    double nu = 50.0;
    int steps = 0;
    std::size_t samples = 200000;

    json to_json() const {
        return {{"hbar", hbar},   {"dim", dim},       {"seed", seed},
                {"workers", workers}, {"grid_L", grid_L}, {"grid_n", grid_n},
                {"nu", nu},       {"steps", steps},   {"samples", samples}};
    }
};

void apply_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ContractError("config file not found: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string key, eq, value;
        std::istringstream ls(line);
        if (!(ls >> key)) continue;
        if (!(ls >> eq) || eq != "=" || !(ls >> value))
            throw ContractError("config line " + std::to_string(lineno) +
                                ": expected 'key = value'");
        if (key == "hbar") cfg.hbar = std::stod(value);
        else if (key == "dim") cfg.dim = std::stoi(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "workers") cfg.workers = std::stoi(value);
        else if (key == "grid_L") cfg.grid_L = std::stod(value);
        else if (key == "grid_n") cfg.grid_n = std::stoi(value);
        else if (key == "nu") cfg.nu = std::stod(value);
        else if (key == "steps") cfg.steps = std::stoi(value);
        else if (key == "samples") cfg.samples = std::stoull(value);
        else throw ContractError("config line " + std::to_string(lineno) +
                                 ": unknown key '" + key + "'");
    }
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ContractError("cannot open output file: " + path);
    out << content;
}

void emit_json(const std::string& path, const json& j) {
    if (!path.empty()) write_output(path, j.dump(2) + "\n");
}

StateVector parse_fiducial(const std::string& spec, int dim) {
    if (spec == "ground") return StateVector::ground(dim);
    if (spec.rfind("number:", 0) == 0)
        return StateVector::number(dim, std::stoi(spec.substr(7)));
    if (spec.rfind("file:", 0) == 0) {
        std::ifstream in(spec.substr(5));
        if (!in) throw ContractError("fiducial file not found: " + spec.substr(5));
        json j;
        in >> j;
        StateVector v = state_vector_from_json(j);
        const double n = v.norm();
        if (std::abs(n - 1.0) > 1e-9)
            throw ContractError("fiducial file: vector is not normalized");
        v.entries /= n;
        return v;
    }
    throw ContractError("unknown fiducial spec: " + spec +
                        " (expected ground | number:n | file:path)");
}

CanonicalMap parse_map(const std::string& spec) {
    if (spec == "identity") return make_scaling(1.0);
    if (spec.rfind("scaling:", 0) == 0) return make_scaling(std::stod(spec.substr(8)));
    if (spec.rfind("cubic:", 0) == 0) {
        const std::string rest = spec.substr(6);
        const auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw ContractError("cubic map spec needs 'cubic:coeff,qmax'");
        const double c = std::stod(rest.substr(0, comma));
        const double qmax = std::stod(rest.substr(comma + 1));
        return make_cubic(c, -qmax, qmax);
    }
    throw ContractError("unknown map spec: " + spec +
                        " (expected identity | scaling:l | cubic:c,qmax)");
}

PhasePoint parse_point(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw ContractError("phase point must be 'p,q': " + s);
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

int cmd_spectrum(const RunConfig& cfg, const std::string& text, int k,
                 const std::string& json_path, const std::string& csv_path) {
    PolySymbol h = parse_symbol(text);
    if (!h.is_real()) throw ContractError("spectrum: non-Hermitian symbol rejected");
    const int dim = cfg.dim, half = std::max(8, dim / 2);
    auto lowest = [&](int d) {
        FockOperator op = antinormal_quantize_rule(h, d, cfg.hbar);
        return eigh_block(op);
    };
    auto full = lowest(dim), coarse = lowest(half);
    k = std::min<int>({k, static_cast<int>(full.eigenvalues.size()),
                       static_cast<int>(coarse.eigenvalues.size())});

    std::cout << "# spectrum of the anti-normal quantization of " << h.to_string()
              << "  (dim " << dim << ", trusted block " << trust_dim(dim) << ")\n";
    std::cout << "n  lambda(dim)          lambda(dim/2)        |delta|\n";
    json rows = json::array();
    std::ostringstream csv;
    csv << "n,lambda,lambda_half,delta\n";
    for (int n = 0; n < k; ++n) {
        const double a = full.eigenvalues(n), b = coarse.eigenvalues(n);
        std::cout << n << "  " << std::setw(20) << fmt(a) << " " << std::setw(20)
                  << fmt(b) << " " << fmt(std::abs(a - b)) << "\n";
        rows.push_back({{"n", n}, {"lambda", a}, {"lambda_half", b}});
        csv << n << ',' << fmt(a) << ',' << fmt(b) << ',' << fmt(std::abs(a - b)) << '\n';
    }
    emit_json(json_path, {{"command", "spectrum"},
                          {"symbol", text},
                          {"config", cfg.to_json()},
                          {"eigenvalues", rows}});
    if (!csv_path.empty()) write_output(csv_path, csv.str());
    return 0;
}

int cmd_metric(const RunConfig& cfg, const std::string& fiducial,
               const std::string& json_path) {
    CoherentFamily fam(parse_fiducial(fiducial, cfg.dim), cfg.hbar);
    MetricReport m = fubini_study_metric(fam);
    std::cout << "# Fubini-Study metric, fiducial " << fiducial << ", hbar " << cfg.hbar
              << "\n";
    std::cout << "gpp " << fmt(m.gpp) << "\ngpq " << fmt(m.gpq) << "\ngqq "
              << fmt(m.gqq) << "\n";
    std::cout << "moments: <Q> " << fmt(m.mean_q) << "  <P> " << fmt(m.mean_p)
              << "  var Q " << fmt(m.var_q) << "  var P " << fmt(m.var_p)
              << "  sym cov " << fmt(m.cov_sym) << "\n";
    std::cout << "flatness residual (moment formula is position independent): 0\n";
    std::cout << "physical-fiducial ratio (varQ+varP)/hbar: " << fmt(m.physical_ratio)
              << "\n";
    emit_json(json_path, {{"command", "metric"},
                          {"fiducial", fiducial},
                          {"config", cfg.to_json()},
                          {"metric", to_json(m)}});
    return 0;
}

int cmd_resolution(const RunConfig& cfg, const std::string& fiducial, int states,
                   double tol, const std::string& json_path) {
    CoherentFamily fam(parse_fiducial(fiducial, cfg.dim), cfg.hbar);
    const double L = cfg.grid_L > 0 ? cfg.grid_L : 8.0 * std::sqrt(cfg.hbar);
    const int n = cfg.grid_n > 0 ? cfg.grid_n : 160;
    ResolutionResult r = resolution_check(fam, L, n, states, cfg.workers);
    const bool pass = r.deviation <= tol;
    std::cout << "# resolution of identity, fiducial " << fiducial << "\n";
    std::cout << "L " << L << "  n_grid " << n << "  states " << r.states_checked
              << "\n";
    std::cout << "deviation " << fmt(r.deviation) << "  tol " << fmt(tol) << "  "
              << (pass ? "PASS" : "FAIL") << "\n";
    emit_json(json_path, {{"command", "resolution-check"},
                          {"fiducial", fiducial},
                          {"config", cfg.to_json()},
                          {"L", L},
                          {"n_grid", n},
                          {"states", r.states_checked},
                          {"deviation", r.deviation},
                          {"tol", tol},
                          {"pass", pass}});
    return pass ? 0 : 1;
}

int cmd_transform_check(const RunConfig& cfg, const std::string& text,
                        const std::string& map_spec, double tol,
                        const std::string& json_path) {
    PolySymbol h = parse_symbol(text);
    CanonicalMap map = parse_map(map_spec);
    const double L =
        cfg.grid_L > 0 ? cfg.grid_L : default_quadrature_halfwidth(h, cfg.hbar);
    const int n = cfg.grid_n > 0 ? cfg.grid_n : 160;
    if (tol <= 0) tol = (map.kind == "point" || map.kind == "cubic") ? 1e-4 : 1e-5;

    auto orig = quantize_reference_for_map(h, map, cfg.dim, cfg.hbar, L, n, cfg.workers);
    auto trans =
        quantize_in_transformed_coords(h, map, cfg.dim, cfg.hbar, L, n, cfg.workers);
    const int states = trust_dim(cfg.dim) / 2;
    const double dev = (orig.op.entries - trans.op.entries)
                           .topLeftCorner(std::min(states, 10), std::min(states, 10))
                           .cwiseAbs()
                           .maxCoeff();
    const bool pass = dev <= tol;
    std::cout << "# operator invariance under " << map_spec << " for h = "
              << h.to_string() << "\n";
    std::cout << "deviation " << fmt(dev) << "  tol " << fmt(tol) << "  "
              << (pass ? "PASS" : "FAIL") << "\n";
    emit_json(json_path, {{"command", "transform-check"},
                          {"symbol", text},
                          {"map", map_spec},
                          {"config", cfg.to_json()},
                          {"L", L},
                          {"n_grid", n},
                          {"deviation", dev},
                          {"tol", tol},
                          {"pass", pass}});
    return pass ? 0 : 1;
}

int cmd_classical(const RunConfig& cfg, const std::string& text,
                  const std::string& start, double T, double dt, int order,
                  const std::string& csv_path) {
    PolySymbol h = parse_symbol(text);
    PhasePoint z0 = parse_point(start);
    Trajectory traj = integrate_hamilton(h, z0, T, dt, order);
    std::ostringstream csv;
    traj.write_csv(csv);
    if (!csv_path.empty()) {
        write_output(csv_path, csv.str());
        const double e0 = traj.energy.front();
        double drift = 0;
        for (double e : traj.energy) drift = std::max(drift, std::abs(e - e0));
        std::cout << "# classical trajectory: " << traj.times.size() << " nodes, "
                  << "energy drift " << fmt(drift) << "\n";
    } else {
        std::cout << csv.str();
    }
    return 0;
}

int cmd_propagate(const RunConfig& cfg, const std::string& text,
                  const std::string& from, const std::string& to, double T,
                  const std::string& method, const std::string& nu_study, double tol,
                  const std::string& json_path, const std::string& csv_path) {
    PolySymbol h = parse_symbol(text);
    PhasePoint a = parse_point(from), b = parse_point(to);
    json rec = {{"command", "propagate"}, {"symbol", text},
                {"from", {a.p, a.q}},     {"to", {b.p, b.q}},
                {"T", T},                 {"method", method},
                {"config", cfg.to_json()}};

    auto oracle = [&] {
        return exact_coherent_propagator(h, a, b, T, cfg.dim, cfg.hbar);
    };

    if (method == "exact") {
        Complex k = oracle();
        std::cout << "K = " << fmt(k.real()) << " + " << fmt(k.imag()) << " i\n";
        rec["value"] = {k.real(), k.imag()};
        emit_json(json_path, rec);
        return 0;
    }

    if (method == "wiener-mc") {
        Complex ex = oracle();
        rec["oracle"] = {ex.real(), ex.imag()};
        auto run_one = [&](double nu) {
            const int N = cfg.steps > 0 ? cfg.steps : default_bridge_steps(T, nu);
            return std::pair<int, MCEstimate>(
                N, wiener_mc_propagator(h, a, b, T, nu, N, cfg.samples, cfg.seed,
                                        cfg.hbar, cfg.workers));
        };
        if (!nu_study.empty()) {
            std::ostringstream csv;
            csv << "nu,N,n_samples,re,im,std_err_re,std_err_im,oracle_re,oracle_im\n";
            std::stringstream nus(nu_study);
            std::string tok;
            while (std::getline(nus, tok, ',')) {
                const double nu = std::stod(tok);
                auto [N, est] = run_one(nu);
                csv << fmt(nu) << ',' << N << ',' << est.n_samples << ','
                    << fmt(est.value.real()) << ',' << fmt(est.value.imag()) << ','
                    << fmt(est.std_err_re) << ',' << fmt(est.std_err_im) << ','
                    << fmt(ex.real()) << ',' << fmt(ex.imag()) << '\n';
            }
            write_output(csv_path.empty() ? std::string("-") : csv_path, csv.str());
            emit_json(json_path, rec);
            return 0;
        }
        auto [N, est] = run_one(cfg.nu);
        const double err = std::hypot(est.std_err_re, est.std_err_im);
        std::cout << "K_mc = " << fmt(est.value.real()) << " + "
                  << fmt(est.value.imag()) << " i   (std err " << fmt(est.std_err_re)
                  << ", " << fmt(est.std_err_im) << ", N " << N << ", samples "
                  << est.n_samples << ")\n";
        if (est.low_precision)
            std::cout << "warning: low precision, relative std error above 0.5\n";
        std::cout << "K_exact = " << fmt(ex.real()) << " + " << fmt(ex.imag())
                  << " i   |K_mc - K_exact| = " << fmt(std::abs(est.value - ex)) << "\n";
        rec["estimate"] = to_json(est);
        emit_json(json_path, rec);
        if (tol > 0) return std::abs(est.value - ex) <= tol * std::abs(ex) ? 0 : 1;
        return 0;
    }

    if (method == "wiener-lattice") {
        Complex ex = oracle();
        const double margin = 4.0 * std::sqrt(cfg.nu * T);
        const double extent = std::max(std::max(std::abs(a.p), std::abs(a.q)),
                                       std::max(std::abs(b.p), std::abs(b.q)));
        const int N = cfg.steps > 0 ? cfg.steps : 40;
        const double L = cfg.grid_L > 0 ? cfg.grid_L : extent + margin + 0.5;
        int n = cfg.grid_n;
        if (n <= 0) {
            const double sg = std::sqrt(cfg.nu * T / (N + 1));
            const double dxmax =
                std::min(sg, 2.0 * cfg.hbar * std::sqrt(24.0 / (N + 1)) / L);
            n = static_cast<int>(std::ceil(2.0 * L / dxmax));
        }
        Complex k = wiener_lattice_propagator(h, a, b, T, cfg.nu, N, L, n, cfg.hbar,
                                              cfg.workers);
        std::cout << "K_lattice = " << fmt(k.real()) << " + " << fmt(k.imag())
                  << " i   (N " << N << ", L " << L << ", n " << n << ")\n";
        std::cout << "K_exact = " << fmt(ex.real()) << " + " << fmt(ex.imag())
                  << " i   |K_lattice - K_exact| = " << fmt(std::abs(k - ex)) << "\n";
        rec["value"] = {k.real(), k.imag()};
        rec["oracle"] = {ex.real(), ex.imag()};
        emit_json(json_path, rec);
        if (tol > 0) return std::abs(k - ex) <= tol * std::abs(ex) ? 0 : 1;
        return 0;
    }

    if (method == "feynman-lattice") {
        const int N = cfg.steps > 0 ? cfg.steps : 100;
        FeynmanGrid g{cfg.grid_L, cfg.grid_n};
        if (g.L <= 0 || g.n_x <= 0) {
            double mass = 1.0;
            auto it = h.terms().find({2, 0});
            if (it != h.terms().end() && it->second.real() > 0)
                mass = 1.0 / (2.0 * it->second.real());
            g = feynman_grid_defaults(a.q, b.q, T, N, mass, cfg.hbar);
        }
        Complex k = lattice_feynman_propagator(h, a.q, b.q, T, N, g.L, g.n_x);
        std::cout << "K_lattice(q " << a.q << " -> " << b.q << ") = " << fmt(k.real())
                  << " + " << fmt(k.imag()) << " i   (N " << N << ", L " << g.L
                  << ", n_x " << g.n_x << ")\n";
        rec["value"] = {k.real(), k.imag()};
        emit_json(json_path, rec);
        return 0;
    }

    throw ContractError("unknown method: " + method);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"phaseq: coherent-state quantization laboratory"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand

    RunConfig cfg;
    std::string config_file, json_path, csv_path;
    app.add_option("--hbar", cfg.hbar, "Planck constant (dimensionless units)");
    app.add_option("--dim", cfg.dim, "truncated basis dimension");
    app.add_option("--seed", cfg.seed, "random seed for Monte Carlo commands");
    app.add_option("--workers", cfg.workers, "worker threads (0 = auto)");
    app.add_option("--config", config_file, "key = value configuration file");
    app.add_option("--json", json_path, "write a JSON record here ('-' for stdout)");
    app.add_option("--csv", csv_path, "write CSV output here ('-' for stdout)");

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of a quantized symbol");
    std::string sym_text;
    int spec_k = 5;
    spectrum->add_option("symbol", sym_text)->required();
    spectrum->add_option("-k,--levels", spec_k, "number of eigenvalues");

    auto* metric = app.add_subcommand("metric", "Fubini-Study metric of a fiducial");
    std::string fiducial = "ground";
    metric->add_option("--fiducial", fiducial, "ground | number:n | file:path");

    auto* resolution =
        app.add_subcommand("resolution-check", "resolution-of-identity quadrature");
    std::string res_fiducial = "ground";
    int res_states = 0;
    double res_tol = 1e-5;
    resolution->add_option("--fiducial", res_fiducial);
    resolution->add_option("--states", res_states, "basis states to check");
    resolution->add_option("--tol", res_tol);

    auto* transform =
        app.add_subcommand("transform-check", "operator invariance under a map");
    std::string tc_text, tc_map;
    double tc_tol = 0;
    transform->add_option("symbol", tc_text)->required();
    transform->add_option("--map", tc_map)->required();
    transform->add_option("--tol", tc_tol);

    auto* classical = app.add_subcommand("classical", "integrate Hamilton's equations");
    std::string cl_text, cl_start = "0,1";
    double cl_T = 10.0, cl_dt = 1e-3;
    int cl_order = 2;
    classical->add_option("symbol", cl_text)->required();
    classical->add_option("--start", cl_start, "initial point p,q");
    classical->add_option("-T,--time", cl_T);
    classical->add_option("--dt", cl_dt);
    classical->add_option("--order", cl_order, "integrator order (2 or 4)");

    auto* propagate = app.add_subcommand("propagate", "propagator evaluation");
    std::string pr_text, pr_from = "0,0", pr_to = "0,0", pr_method = "exact", pr_study;
    double pr_T = 0.25, pr_tol = 0;
    propagate->add_option("symbol", pr_text)->required();
    propagate->add_option("--from", pr_from);
    propagate->add_option("--to", pr_to);
    propagate->add_option("-T,--time", pr_T);
    propagate->add_option("--method", pr_method,
                          "exact | wiener-mc | wiener-lattice | feynman-lattice");
    propagate->add_option("--study", pr_study, "comma list of nu values (CSV output)");
    propagate->add_option("--tol", pr_tol, "relative check tolerance vs the oracle");
    propagate->add_option("--nu", cfg.nu, "diffusion constant");
    propagate->add_option("--steps", cfg.steps, "time slices N");
    propagate->add_option("--samples", cfg.samples, "Monte Carlo samples");
    propagate->add_option("--grid-L", cfg.grid_L, "grid half width");
    propagate->add_option("--grid-n", cfg.grid_n, "grid points per axis");
    resolution->add_option("--grid-L", cfg.grid_L, "grid half width");
    resolution->add_option("--grid-n", cfg.grid_n, "grid points per axis");
    transform->add_option("--grid-L", cfg.grid_L, "grid half width");
    transform->add_option("--grid-n", cfg.grid_n, "grid points per axis");

    for (auto* sub : {spectrum, metric, resolution, transform, classical, propagate})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
        if (!config_file.empty()) {
            RunConfig file_cfg;
            apply_config_file(config_file, file_cfg);
            // command line wins over the file for options the user passed
            RunConfig merged = file_cfg;
            if (app.count("--hbar")) merged.hbar = cfg.hbar;
            if (app.count("--dim")) merged.dim = cfg.dim;
            if (app.count("--seed")) merged.seed = cfg.seed;
            if (app.count("--workers")) merged.workers = cfg.workers;
            if (propagate->count("--nu")) merged.nu = cfg.nu;
            if (propagate->count("--steps")) merged.steps = cfg.steps;
            if (propagate->count("--samples")) merged.samples = cfg.samples;
            const bool gl = propagate->count("--grid-L") || resolution->count("--grid-L") ||
                            transform->count("--grid-L");
            const bool gn = propagate->count("--grid-n") || resolution->count("--grid-n") ||
                            transform->count("--grid-n");
            if (gl) merged.grid_L = cfg.grid_L;
            if (gn) merged.grid_n = cfg.grid_n;
            cfg = merged;
        }
        if (spectrum->parsed())
            return cmd_spectrum(cfg, sym_text, spec_k, json_path, csv_path);
        if (metric->parsed()) return cmd_metric(cfg, fiducial, json_path);
        if (resolution->parsed())
            return cmd_resolution(cfg, res_fiducial, res_states, res_tol, json_path);
        if (transform->parsed())
            return cmd_transform_check(cfg, tc_text, tc_map, tc_tol, json_path);
        if (classical->parsed())
            return cmd_classical(cfg, cl_text, cl_start, cl_T, cl_dt, cl_order, csv_path);
        if (propagate->parsed())
            return cmd_propagate(cfg, pr_text, pr_from, pr_to, pr_T, pr_method, pr_study,
                                 pr_tol, json_path, csv_path);
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ParseError& e) {
        std::cerr << "symbol error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
