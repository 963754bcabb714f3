#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "loadshare/loadshare.hpp"

namespace {

using namespace loadshare;

struct Output {
    std::ofstream file;
    bool to_file = false;
    std::string path;

    std::ostream& stream() { return to_file ? file : std::cout; }

    void finish() {
        stream().flush();
        if (to_file ? !file : !std::cout)
            throw IoError("failed writing output to '" + (to_file ? path : "stdout") + "'");
    }
};

Output open_output(const std::string& path) {
    Output o;
    if (!path.empty() && path != "-") {
        o.file.open(path);
        if (!o.file) throw IoError("cannot open '" + path + "' for writing");
        o.to_file = true;
        o.path = path;
    }
    return o;
}

// The manifest goes to stderr on every run; with --out it is also dropped
// next to the data file. Timing is deliberately absent: runs on identical
// inputs must be byte-identical.
void write_manifest(const std::string& subcommand, const std::vector<std::string>& inputs,
                    const json& params, const std::string& out_path) {
    json m;
    m["tool"] = "loadshare";
    m["version"] = version_string;
    m["subcommand"] = subcommand;
    m["inputs"] = inputs;
    m["parameters"] = params;
    emit_event(std::cerr, "info", "manifest", m);
    if (!out_path.empty() && out_path != "-") {
        std::ofstream mf(out_path + ".manifest.json");
        if (mf) mf << m.dump(2) << '\n';
        else emit_event(std::cerr, "warning", "manifest_sidecar_failed", {{"path", out_path}});
    }
}

struct NumericFlags {
    double tol = 1e-10;
    int n_max = 64;
    int grid = 257;
    int force_n = 0;
};

void add_numeric_flags(CLI::App* cmd, NumericFlags& f) {
    cmd->add_option("--tol", f.tol, "Koenigs stop tolerance (relative sup-norm)");
    cmd->add_option("--n-max", f.n_max, "iteration cap for the Koenigs build");
    cmd->add_option("--grid", f.grid, "sigma grid size");
    cmd->add_option("--force-n", f.force_n,
                    "build at exactly this iteration depth (diagnostics; overrides --tol)");
}

KoenigsOptions to_options(const NumericFlags& f) {
    KoenigsOptions o;
    o.grid_size = f.grid;
    o.tol = f.tol;
    o.n_max = f.n_max;
    o.n_min = std::min(KoenigsOptions{}.n_min, o.n_max);
    if (f.force_n > 0) {
        o.n_min = o.n_max = f.force_n;
        o.tol = std::numeric_limits<double>::infinity();
    }
    return o;
}

json numeric_params(const NumericFlags& f) {
    json j;
    j["tol"] = f.tol;
    j["n_max"] = f.n_max;
    j["grid"] = f.grid;
    if (f.force_n > 0) j["force_n"] = f.force_n;
    return j;
}

void cmd_fit(const std::string& samples_path, const std::string& model_path, double domain_max) {
    ExperimentTable table = read_samples(samples_path, &std::cerr);
    MonotoneMap h = MonotoneMap::make_tabulated(table.rows, domain_max);
    if (model_path.empty() || model_path == "-") {
        std::cout << map_to_json(h).dump(2) << '\n';
        std::cout.flush();
        if (!std::cout) throw IoError("failed writing model to stdout");
    } else {
        save_model(h, model_path);
    }
    json params;
    params["domain_max"] = h.domain_max();
    params["rows"] = table.rows.size();
    params["duplicates_merged"] = table.duplicates_merged;
    params["origin_injected"] = table.origin_injected;
    params["slope_at_zero"] = h.derivative_at_zero();
    write_manifest("fit", {samples_path}, params, model_path);
}

void cmd_koenigs(const std::string& model_path, const std::string& out, const NumericFlags& f) {
    MonotoneMap h = load_model(model_path);
    KoenigsFunction K = koenigs_build(h, to_options(f));
    Output o = open_output(out);
    json hdr;
    hdr["multiplier"] = K.multiplier();
    hdr["n_used"] = K.n_used();
    hdr["sup_residual"] = K.sup_residual();
    o.stream() << "# " << hdr.dump() << "\nx,sigma\n";
    const auto& gx = K.grid_x();
    const auto& gs = K.grid_sigma();
    for (size_t i = 0; i < gx.size(); ++i)
        o.stream() << format_double(gx[i]) << ',' << format_double(gs[i]) << '\n';
    o.finish();
    write_manifest("koenigs", {model_path}, numeric_params(f), out);
}

void cmd_objective(const std::string& model_path, double rj, double rk, double ref,
                   const std::string& out, const NumericFlags& f) {
    MonotoneMap h = load_model(model_path);
    KoenigsFunction K = koenigs_build(h, to_options(f));
    ObjectiveModel obj = build_objective(K, rj, rk, ref);
    Output o = open_output(out);
    json hdr;
    hdr["p"] = obj.p();
    hdr["c"] = obj.c();
    hdr["ref_force"] = obj.ref_force();
    hdr["n_used"] = K.n_used();
    hdr["sup_residual"] = K.sup_residual();
    hdr["r_ratio"] = obj.r_ratio();
    hdr["multiplier"] = K.multiplier();
    o.stream() << "# " << hdr.dump() << "\nx,j_prime,j\n";
    const auto& gx = obj.j_grid_x();
    const auto& gs = obj.koenigs().grid_sigma();
    const auto& jv = obj.j_grid_value();
    for (size_t i = 0; i < gx.size(); ++i) {
        double jp = (i == 0) ? 0.0 : obj.c() * std::pow(gs[i], obj.p());
        o.stream() << format_double(gx[i]) << ',' << format_double(jp) << ','
                   << format_double(jv[i]) << '\n';
    }
    o.finish();
    json params = numeric_params(f);
    params["r_j"] = rj;
    params["r_k"] = rk;
    params["ref_force"] = ref;
    write_manifest("objective", {model_path}, params, out);
}

void cmd_solve(const std::string& config_path, const std::string& model_path,
               const std::string& out, int force_n) {
    ProblemConfig cfg = read_config(config_path);
    MonotoneMap h = load_model(model_path);
    NumericFlags f;
    f.tol = cfg.numeric.tol;
    f.n_max = cfg.numeric.n_max;
    f.grid = cfg.numeric.grid_size;
    f.force_n = force_n;
    KoenigsFunction K = koenigs_build(h, to_options(f));
    double r_j = cfg.arm_values[cfg.index_of(cfg.pair_j)];
    double r_k = cfg.arm_values[cfg.index_of(cfg.pair_k)];
    ObjectiveModel obj = build_objective(K, r_j, r_k, cfg.numeric.ref_force);

    std::vector<double> moments(cfg.sweep.count);
    for (int i = 0; i < cfg.sweep.count; ++i)
        moments[i] = cfg.sweep.m_min +
                     (cfg.sweep.m_max - cfg.sweep.m_min) * i / double(cfg.sweep.count - 1);
    auto rows = solve_sweep(obj, cfg.arm_values, moments);

    Output o = open_output(out);
    json hdr;
    hdr["p"] = obj.p();
    hdr["pair"] = {cfg.pair_j, cfg.pair_k};
    hdr["multiplier"] = K.multiplier();
    hdr["n_used"] = K.n_used();
    o.stream() << "# " << hdr.dump() << "\nM,lambda";
    for (const auto& name : cfg.arm_names) o.stream() << ",F_" << name;
    o.stream() << ",objective,status\n";
    for (const auto& row : rows) {
        o.stream() << format_double(row.moment) << ',';
        if (row.ok) {
            o.stream() << format_double(row.solution.lambda);
            for (double F : row.solution.forces) o.stream() << ',' << format_double(F);
            o.stream() << ',' << format_double(row.solution.objective_value) << ",ok\n";
        } else {
            // lambda, one force per muscle, and objective stay empty
            for (size_t i = 0; i < cfg.arm_names.size() + 2; ++i) o.stream() << ',';
            o.stream() << row.error_kind << '\n';
            emit_event(std::cerr, "warning", "solve_point_failed",
                       {{"moment", row.moment},
                        {"class", row.error_kind},
                        {"message", row.error_message}});
        }
    }
    o.finish();
    json params;
    params["pair"] = {cfg.pair_j, cfg.pair_k};
    params["sweep"] = {{"m_min", cfg.sweep.m_min}, {"m_max", cfg.sweep.m_max},
                       {"count", cfg.sweep.count}};
    params["numeric"] = {{"tol", cfg.numeric.tol},
                         {"n_max", cfg.numeric.n_max},
                         {"grid_size", cfg.numeric.grid_size},
                         {"ref_force", cfg.numeric.ref_force}};
    if (force_n > 0) params["force_n"] = force_n;
    write_manifest("solve", {config_path, model_path}, params, out);
}

void cmd_share(const std::string& model_path, double rm, double rj, double rk, int points,
               const std::string& out, const NumericFlags& f) {
    if (points < 2) throw ValidationError("--points must be >= 2");
    MonotoneMap h = load_model(model_path);
    KoenigsFunction K = koenigs_build(h, to_options(f));
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = h.domain_max() * i / double(points - 1);
    PairPrediction pred = predict_pair_sharing(K, rm, rj, rk, grid);

    Output o = open_output(out);
    json hdr;
    hdr["t"] = pred.t;
    hdr["r_m"] = rm;
    hdr["r_j"] = rj;
    hdr["r_k"] = rk;
    hdr["multiplier"] = K.multiplier();
    hdr["n_used"] = K.n_used();
    o.stream() << "# " << hdr.dump() << "\nf_k,f_predicted,status\n";
    for (const auto& pt : pred.points) {
        if (pt.ok) {
            o.stream() << format_double(pt.f_k) << ',' << format_double(pt.f_m) << ",ok\n";
        } else {
            o.stream() << format_double(pt.f_k) << ",," << pt.error_kind << '\n';
            emit_event(std::cerr, "warning", "share_point_failed",
                       {{"f_k", pt.f_k}, {"class", pt.error_kind}});
        }
    }
    o.finish();
    json params = numeric_params(f);
    params["r_m"] = rm;
    params["r_j"] = rj;
    params["r_k"] = rk;
    params["points"] = points;
    write_manifest("share", {model_path}, params, out);
}

void cmd_verify(const std::string& model_path, double rj, double rk, double ref, int res_grid,
                const std::string& out, const NumericFlags& f) {
    MonotoneMap h = load_model(model_path);
    KoenigsFunction K = koenigs_build(h, to_options(f));
    ObjectiveModel obj = build_objective(K, rj, rk, ref);
    SchroderReport rep = obj.schroder_residual(res_grid);

    Output o = open_output(out);
    json hdr;
    hdr["p"] = obj.p();
    hdr["sup_abs"] = rep.sup_abs;
    hdr["sup_normalized"] = rep.sup_normalized;
    hdr["multiplier"] = K.multiplier();
    hdr["n_used"] = K.n_used();
    o.stream() << "# " << hdr.dump() << "\nx,residual,normalized\n";
    for (const auto& pt : rep.points)
        o.stream() << format_double(pt.x) << ',' << format_double(pt.residual) << ','
                   << format_double(pt.normalized) << '\n';
    o.finish();
    json params = numeric_params(f);
    params["r_j"] = rj;
    params["r_k"] = rk;
    params["ref_force"] = ref;
    params["residual_grid"] = res_grid;
    write_manifest("verify", {model_path}, params, out);
}

}

int main(int argc, char** argv) {
    CLI::App app{"loadshare: recover the additive cost a load-sharing pattern minimizes"};
    app.require_subcommand(1);

    std::string samples_path, config_path, model_path, out_path;
    double domain_max = 0.0, rj = 0.0, rk = 0.0, rm = 0.0, ref_force = 1.0;
    int points = 33, res_grid = 64, force_n = 0;
    NumericFlags numeric;

    auto* fit = app.add_subcommand("fit", "fit a tabulated force-force relation from CSV samples");
    fit->add_option("samples", samples_path, "CSV of (F_k, F_j) samples")->required();
    fit->add_option("model", model_path, "output model JSON ('-' for stdout)")->required();
    fit->add_option("--domain-max", domain_max, "restrict the domain (default: last sample)");
    fit->callback([&] { cmd_fit(samples_path, model_path, domain_max); });

    auto* koe = app.add_subcommand("koenigs", "build the Koenigs linearization and dump its grid");
    koe->add_option("model", model_path, "model JSON")->required();
    koe->add_option("--out", out_path, "output CSV (default stdout)");
    add_numeric_flags(koe, numeric);
    koe->callback([&] { cmd_koenigs(model_path, out_path, numeric); });

    auto* obj = app.add_subcommand("objective", "reconstruct J' and J for a muscle pair");
    obj->add_option("model", model_path, "model JSON")->required();
    obj->add_option("--rj", rj, "moment arm of the response muscle j")->required();
    obj->add_option("--rk", rk, "moment arm of the reference muscle k")->required();
    obj->add_option("--ref-force", ref_force, "gauge point: J'(ref_force) = 1");
    obj->add_option("--out", out_path, "output CSV (default stdout)");
    add_numeric_flags(obj, numeric);
    obj->callback([&] { cmd_objective(model_path, rj, rk, ref_force, out_path, numeric); });

    auto* sol = app.add_subcommand("solve", "sweep the constrained minimizer over moments");
    sol->add_option("config", config_path, "problem config JSON")->required();
    sol->add_option("model", model_path, "model JSON for the configured pair")->required();
    sol->add_option("--out", out_path, "output CSV (default stdout)");
    sol->add_option("--force-n", force_n, "build at exactly this iteration depth");
    sol->callback([&] { cmd_solve(config_path, model_path, out_path, force_n); });

    auto* sha = app.add_subcommand("share", "predict sharing for another muscle via fractional iterates");
    sha->add_option("model", model_path, "model JSON")->required();
    sha->add_option("--rm", rm, "moment arm of the predicted muscle m")->required();
    sha->add_option("--rj", rj, "moment arm of the observed response muscle j")->required();
    sha->add_option("--rk", rk, "moment arm of the reference muscle k")->required();
    sha->add_option("--points", points, "number of F_k grid points");
    sha->add_option("--out", out_path, "output CSV (default stdout)");
    add_numeric_flags(sha, numeric);
    sha->callback([&] { cmd_share(model_path, rm, rj, rk, points, out_path, numeric); });

    auto* ver = app.add_subcommand("verify", "report the Schroder equation residual");
    ver->add_option("model", model_path, "model JSON")->required();
    ver->add_option("--rj", rj, "moment arm of the response muscle j")->required();
    ver->add_option("--rk", rk, "moment arm of the reference muscle k")->required();
    ver->add_option("--ref-force", ref_force, "gauge point: J'(ref_force) = 1");
    ver->add_option("--residual-grid", res_grid, "residual report grid size");
    ver->add_option("--out", out_path, "output CSV (default stdout)");
    add_numeric_flags(ver, numeric);
    ver->callback([&] { cmd_verify(model_path, rj, rk, ref_force, res_grid, out_path, numeric); });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const loadshare::Error& e) {
        emit_event(std::cerr, "error", "failed", {{"class", e.kind()}, {"message", e.what()}});
        return e.exit_code();
    } catch (const std::exception& e) {
        emit_event(std::cerr, "error", "failed", {{"class", "InternalError"}, {"message", e.what()}});
        return 1;
    }
}
