// Command-line front end for the stepped-string scattering library.
//
// Subcommands:
//   forward    problem.json -> scattering.json + plots.csv
//   inverse    problem.json (geometry/boundary) + scattering.json -> q_rec.csv + report.json
//   roundtrip  problem.json -> forward, then inverse, with error report
//   verify     problem.json [+ scattering.json] -> verification.json, exit 1 on failure
//
// Exit codes: 0 success, 1 invariant failure, 2 input validation, 3 numerics.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "stepscat/stepscat.hpp"

namespace fs = std::filesystem;
using namespace stepscat;

namespace {

struct CliOptions {
    std::string input, scattering, out_dir = ".";
    int workers = 0;
    double hx = 0.0, lambda_max = 0.0, ymax = 0.0;
    int n_lambda = 0;
    bool degenerate = false, dump_kernel = false;
};

void apply_overrides(Problem& prob, const CliOptions& opt) {
    if (opt.hx > 0.0) prob.numerics.h_x = opt.hx;
    if (opt.lambda_max > 0.0) prob.numerics.lambda_max = opt.lambda_max;
    if (opt.n_lambda > 0) prob.numerics.n_lambda = opt.n_lambda;
    if (opt.ymax > 0.0) prob.numerics.y_max = opt.ymax;
    if (opt.degenerate) prob.numerics.degenerate_ok = true;
}

int effective_workers(const CliOptions& opt) {
    int w = opt.workers;
    if (w <= 0) {
        if (const char* env = std::getenv("STEPSCAT_WORKERS")) w = std::atoi(env);
    }
    if (w < 1) w = 1;
    return std::min(w, 1);  // serial build: one writer, one worker
}

fs::path ensure_out_dir(const CliOptions& opt) {
    fs::path dir(opt.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("FileNotWritable", opt.out_dir + ": " + ec.message());
    return dir;
}

void dump_kernel_files(const fs::path& dir, const Problem& prob, const ScatteringData& sd) {
    const NumericsConfig cfg = resolved(prob.profile, prob.numerics, sd.bound_states);
    const TransitionTable tt = f0s_transform(sd, prob.profile, prob.boundary, cfg);
    const KernelTable kt = solve_kernel_family(tt, prob.profile, cfg);
    write_text_file((dir / "f0s.csv").string(), transition_csv(tt));
    write_text_file((dir / "kernel.csv").string(), kernel_csv(kt));
}

void write_cond_csv(const fs::path& dir, const Problem& prob, const ScatteringData& sd,
                    const ReconstructionReport& rep) {
    const NumericsConfig cfg = resolved(prob.profile, prob.numerics, sd.bound_states);
    std::ostringstream os;
    os << "x,cond\n";
    for (std::size_t i = 0; i < rep.condition_numbers.size(); ++i)
        os << io_detail::fmt17(cfg.h_x * static_cast<double>(i)) << ','
           << io_detail::fmt17(rep.condition_numbers[i]) << '\n';
    write_text_file((dir / "cond.csv").string(), os.str());
}

int cmd_forward(const CliOptions& opt) {
    Problem prob = load_problem(opt.input);
    apply_overrides(prob, opt);
    (void)effective_workers(opt);
    const ScatteringData sd =
        forward_scattering(prob.profile, prob.potential, prob.boundary, prob.numerics);
    const fs::path dir = ensure_out_dir(opt);
    save_json((dir / "scattering.json").string(), scattering_to_json(sd));
    write_text_file((dir / "plots.csv").string(), scattering_csv(sd, prob.profile, prob.boundary));
    std::cout << "forward: " << sd.lambda_grid.size() << " reflection samples, "
              << sd.bound_states.size() << " bound state(s)\n";
    return 0;
}

int cmd_inverse(const CliOptions& opt) {
    Problem prob = load_problem(opt.input);
    apply_overrides(prob, opt);
    (void)effective_workers(opt);
    const ScatteringData sd = load_scattering(opt.scattering);
    const ReconstructionReport rep =
        inverse_reconstruct(sd, prob.profile, prob.boundary, prob.numerics);
    const fs::path dir = ensure_out_dir(opt);
    {
        std::ostringstream os;
        os << "x,q_rec\n";
        for (std::size_t i = 0; i < rep.q_rec.grid.size(); ++i)
            os << io_detail::fmt17(rep.q_rec.grid[i]) << ','
               << io_detail::fmt17(rep.q_rec.values[i]) << '\n';
        write_text_file((dir / "q_rec.csv").string(), os.str());
    }
    write_cond_csv(dir, prob, sd, rep);
    nlohmann::json j = report_to_json(rep);
    j.erase("sup_rel_error");  // no reference potential in a pure inverse run
    j.erase("l1_rel_error");
    save_json((dir / "report.json").string(), j);
    if (opt.dump_kernel) dump_kernel_files(dir, prob, sd);
    std::cout << "inverse: " << rep.q_rec.grid.size() << " potential nodes, jump residual "
              << rep.jump_residual << "\n";
    return 0;
}

// Same as the library roundtrip, but reusing already-computed scattering data.
ReconstructionReport inverse_reconstruct_with_reference(const ScatteringData& sd,
                                                        const Problem& prob) {
    ReconstructionReport rep =
        inverse_reconstruct(sd, prob.profile, prob.boundary, prob.numerics);
    double qmax = 0.0, l1den = 0.0, sup = 0.0, l1num = 0.0;
    for (std::size_t i = 0; i < rep.q_rec.grid.size(); ++i) {
        const double qt = prob.potential(rep.q_rec.grid[i]);
        qmax = std::max(qmax, std::abs(qt));
        l1den += std::abs(qt);
        sup = std::max(sup, std::abs(rep.q_rec.values[i] - qt));
        l1num += std::abs(rep.q_rec.values[i] - qt);
    }
    rep.sup_rel_error = sup / (qmax > 1e-12 ? qmax : 1.0);
    rep.l1_rel_error = l1num / (l1den > 1e-12 ? l1den : 1.0);
    return rep;
}

int cmd_roundtrip(const CliOptions& opt) {
    Problem prob = load_problem(opt.input);
    apply_overrides(prob, opt);
    (void)effective_workers(opt);
    const ScatteringData sd =
        forward_scattering(prob.profile, prob.potential, prob.boundary, prob.numerics);
    const ReconstructionReport rep =
        inverse_reconstruct_with_reference(sd, prob);
    const fs::path dir = ensure_out_dir(opt);
    save_json((dir / "scattering.json").string(), scattering_to_json(sd));
    write_text_file((dir / "plots.csv").string(), scattering_csv(sd, prob.profile, prob.boundary));
    {
        std::ostringstream os;
        os << "x,q,q_rec\n";
        for (std::size_t i = 0; i < rep.q_rec.grid.size(); ++i)
            os << io_detail::fmt17(rep.q_rec.grid[i]) << ','
               << io_detail::fmt17(prob.potential(rep.q_rec.grid[i])) << ','
               << io_detail::fmt17(rep.q_rec.values[i]) << '\n';
        write_text_file((dir / "q_rec.csv").string(), os.str());
    }
    write_cond_csv(dir, prob, sd, rep);
    nlohmann::json j = report_to_json(rep);
    const double tol_sup = 0.05, tol_l1 = 0.03, tol_cond = 1e6, tol_refine = 1e-4;
    double cmax = 0.0;
    for (double cv : rep.condition_numbers) cmax = std::max(cmax, cv);
    j["tolerances"] = {{"sup_rel_error", tol_sup},
                       {"l1_rel_error", tol_l1},
                       {"condition_max", tol_cond},
                       {"refinement_delta", tol_refine}};
    nlohmann::json pass;
    pass["sup_rel_error"] = rep.sup_rel_error < tol_sup;
    pass["l1_rel_error"] = rep.l1_rel_error < tol_l1;
    pass["condition_max"] = cmax < tol_cond;
    pass["refinement_delta"] = rep.refinement_delta < tol_refine;
    bool all = true;
    for (const auto& kv : pass.items()) all = all && kv.value().get<bool>();
    pass["all"] = all;
    j["pass"] = pass;
    save_json((dir / "report.json").string(), j);
    if (opt.dump_kernel) dump_kernel_files(dir, prob, sd);
    std::cout << "roundtrip: sup " << rep.sup_rel_error << ", l1 " << rep.l1_rel_error
              << ", jump residual " << rep.jump_residual << ", refinement "
              << rep.refinement_delta << (all ? " [pass]" : " [fail]") << "\n";
    return 0;
}

int cmd_verify(const CliOptions& opt) {
    Problem prob = load_problem(opt.input);
    apply_overrides(prob, opt);
    (void)effective_workers(opt);
    std::vector<CheckResult> checks = verify_problem(prob);
    if (!opt.scattering.empty()) {
        const ScatteringData sd = load_scattering(opt.scattering);
        const std::vector<CheckResult> more = verify_scattering_data(prob, sd);
        checks.insert(checks.end(), more.begin(), more.end());
    }
    const fs::path dir = ensure_out_dir(opt);
    nlohmann::json arr = nlohmann::json::array();
    bool all = true;
    for (const CheckResult& ck : checks) {
        arr.push_back({{"name", ck.name}, {"pass", ck.pass}, {"detail", ck.detail}});
        all = all && ck.pass;
        std::cout << (ck.pass ? "[PASS] " : "[FAIL] ") << ck.name << ": " << ck.detail << "\n";
    }
    nlohmann::json j;
    j["checks"] = arr;
    j["all_pass"] = all;
    save_json((dir / "verification.json").string(), j);
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scattering and inverse scattering for a stepped string with a "
                 "frequency-dependent boundary condition"};
    app.require_subcommand(1);
    CliOptions opt;

    auto add_common = [&](CLI::App* sc, bool needs_scattering, bool scattering_optional) {
        sc->add_option("--input", opt.input, "problem description JSON")->required();
        sc->add_option("--out-dir", opt.out_dir, "output directory (created if missing)");
        sc->add_option("--workers", opt.workers, "worker count (serial build clamps to 1)");
        sc->add_option("--hx", opt.hx, "kernel grid step override");
        sc->add_option("--lambda-max", opt.lambda_max, "frequency band half-width override");
        sc->add_option("--n-lambda", opt.n_lambda, "frequency sample count override");
        sc->add_option("--ymax", opt.ymax, "kernel table depth override");
        sc->add_flag("--degenerate-alpha-ok", opt.degenerate,
                     "accept a density with no interface jump (alpha = 1)");
        sc->add_flag("--dump-kernel", opt.dump_kernel, "also write kernel.csv and f0s.csv");
        if (needs_scattering) {
            auto* so = sc->add_option("--scattering", opt.scattering, "scattering data JSON");
            if (!scattering_optional) so->required();
        }
    };

    CLI::App* fwd = app.add_subcommand("forward", "compute scattering data from a problem file");
    CLI::App* inv = app.add_subcommand("inverse", "reconstruct the potential from scattering data");
    CLI::App* rt = app.add_subcommand("roundtrip", "forward map followed by reconstruction");
    CLI::App* ver = app.add_subcommand("verify", "run the invariant suite");
    add_common(fwd, false, false);
    add_common(inv, true, false);
    add_common(rt, false, false);
    add_common(ver, true, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (fwd->parsed()) return cmd_forward(opt);
        if (inv->parsed()) return cmd_inverse(opt);
        if (rt->parsed()) return cmd_roundtrip(opt);
        if (ver->parsed()) return cmd_verify(opt);
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "Unexpected: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
