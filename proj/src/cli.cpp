#include "tsvar/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsvar/serialize.hpp"
#include "tsvar/variational.hpp"

namespace tsvar::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("TSVAR_OUT_DIR"); env && *env) return env;
    return ".";
}

std::string default_base(const fs::path& input) { return input.stem().string(); }

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write " + path.string());
    out << text;
}

json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw config_error(path.string() + " is not valid JSON: " + std::string(e.what()));
    }
    return j;
}

// What `verify` operates on, from either a config or a bundle file.
struct VerifyInput {
    GridPtr grid;
    GridSpec spec;
    ProblemOptions options;
    std::optional<LagrangianForm> form; // synthesized path
    std::optional<Expr> raw_lagrangian; // hand-written path
    ExtremalSpec extremal;
};

VerifyInput load_verify_input(const fs::path& path) {
    VerifyInput in;
    const json j = load_json_file(path);
    if (is_bundle_json(j)) {
        LoadedBundle lb = bundle_from_json(j);
        in.grid = lb.form.grid();
        in.spec = lb.spec;
        in.options = lb.options;
        in.extremal = lb.form.extremal();
        in.form = std::move(lb.form);
        return in;
    }
    ProblemConfig cfg = config_from_json(j);
    in.spec = cfg.timescale;
    in.grid = cfg.timescale.build();
    in.options = cfg.options;
    in.extremal = cfg.extremal;
    if (cfg.ingredients)
        in.form = assemble_lagrangian(in.grid, *cfg.ingredients, cfg.extremal);
    else
        in.raw_lagrangian = cfg.lagrangian;
    return in;
}

void print_report_text(std::ostream& out, const VerificationReport& report,
                       const ProblemOptions& opts, const GridPtr& grid) {
    out << "EL constant c          = " << format_full(report.el->mean) << "\n";
    out << "EL constancy           = " << format_full(report.el->constancy)
        << "  (tolerance " << format_full(opts.tolerance_el) << ")\n";
    out << "Legendre min           = " << format_full(report.legendre->min)
        << "  (strictly positive: " << (report.legendre->strictly_positive ? "yes" : "no")
        << ")\n";
    if (report.grad_norm)
        out << "stationarity sup-norm  = " << format_full(*report.grad_norm) << "\n";
    if (report.perturbation_min_delta)
        out << "perturbation min dL    = " << format_full(*report.perturbation_min_delta)
            << "\n";
    out << "\nindex,t,el_residual,legendre_lhs\n";
    for (std::size_t i = 0; i < report.el->g.size(); ++i) {
        out << i << ',' << format_full(grid->point(i)) << ','
            << format_full(report.el->g[i]) << ',';
        if (i < report.legendre->lhs.size()) out << format_full(report.legendre->lhs[i]);
        out << '\n';
    }
}

int cmd_build(const fs::path& config_path, const std::string& out_dir_flag,
              const std::string& base_flag, bool literal_flag, std::ostream& out) {
    ProblemConfig cfg = load_config(config_path);
    if (literal_flag) cfg.options.literal_general = true;
    if (!cfg.ingredients)
        throw config_error("build requires an \"ingredients\" section (a raw Lagrangian "
                           "cannot be synthesized)");
    GridPtr grid = cfg.timescale.build();
    LagrangianForm form = assemble_lagrangian(grid, *cfg.ingredients, cfg.extremal);

    const fs::path out_dir = resolve_out_dir(out_dir_flag);
    fs::create_directories(out_dir);
    const std::string base = base_flag.empty() ? default_base(config_path) : base_flag;
    const fs::path bundle_path = out_dir / (base + ".bundle.json");
    const fs::path csv_path = out_dir / (base + ".bundle.csv");

    write_text_file(bundle_path, bundle_to_json(form, cfg.timescale, cfg.options).dump(2) + "\n");
    std::ostringstream csv;
    write_bundle_csv(csv, form);
    write_text_file(csv_path, csv.str());

    out << "wrote " << bundle_path.string() << "\n";
    out << "wrote " << csv_path.string() << "\n";
    return exit_ok;
}

int cmd_verify(const fs::path& input_path, const std::string& out_dir_flag, bool literal_flag,
               std::ostream& out) {
    VerifyInput in = load_verify_input(input_path);
    if (literal_flag) in.options.literal_general = true;

    const GridFunction y = in.extremal.sample(in.grid);
    VariationalProblem prob;
    if (in.form)
        prob = make_problem(*in.form);
    else
        prob = make_problem(in.grid, *in.raw_lagrangian, y.values.front(), y.values.back());

    VerifyOptions vo;
    vo.perturbations = in.options.perturbations;
    vo.radius = in.options.radius;
    vo.seed = in.options.seed;
    const VerificationReport report = run_verification(prob, y, vo);
    print_report_text(out, report, in.options, in.grid);

    json report_json = report_to_json(report, in.options);

    // Reproduction check against the requested p(t) when available.
    if (in.form) {
        const Expr& p = in.form->ingredients().p;
        double max_dev = 0.0, max_p = 0.0;
        for (std::size_t i = 0; i < report.legendre->lhs.size(); ++i) {
            const double pi = p.eval_t(in.grid->point(i));
            max_p = std::max(max_p, std::abs(pi));
            max_dev = std::max(max_dev, std::abs(report.legendre->lhs[i] - pi));
        }
        const bool matches = max_dev <= in.options.tolerance_legendre * std::max(1.0, max_p);
        out << "\nmax |legendre_lhs - p| = " << format_full(max_dev)
            << "  (matches p: " << (matches ? "yes" : "no") << ")\n";
        report_json["legendre_vs_p_max"] = max_dev;
        report_json["legendre_matches_p"] = matches;
    }

    // Side-by-side residual of the literal general form, when asked.
    if (in.options.literal_general && in.form) {
        LagrangianForm literal =
            literal_general_form(in.grid, in.form->ingredients(), in.extremal);
        const ElResidual lit = el_residual(make_problem(literal), y);
        out << "\nliteral-form EL constancy = " << format_full(lit.constancy)
            << " (shift-composed: " << format_full(report.el->constancy) << ")\n";
        out << "index,t,el_residual_shift,el_residual_literal\n";
        for (std::size_t i = 0; i < lit.g.size(); ++i)
            out << i << ',' << format_full(in.grid->point(i)) << ','
                << format_full(report.el->g[i]) << ',' << format_full(lit.g[i]) << '\n';
        report_json["literal_el"] = {{"constant", lit.mean},
                                     {"constancy", lit.constancy},
                                     {"residual", lit.g.values}};
    }

    const fs::path out_dir = resolve_out_dir(out_dir_flag);
    fs::create_directories(out_dir);
    const fs::path report_path = out_dir / (default_base(input_path) + ".report.json");
    write_text_file(report_path, report_json.dump(2) + "\n");
    out << "\nwrote " << report_path.string() << "\n";

    const bool ok = report.el->constancy <= in.options.tolerance_el &&
                    report.legendre->strictly_positive;
    out << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? exit_ok : exit_verification;
}

int cmd_eval(const fs::path& bundle_path, const fs::path& traj_path, std::ostream& out) {
    const json j = load_json_file(bundle_path);
    if (!is_bundle_json(j))
        throw config_error(bundle_path.string() + " is not a Lagrangian bundle");
    LoadedBundle lb = bundle_from_json(j);

    std::ifstream traj(traj_path);
    if (!traj) throw config_error("cannot open " + traj_path.string());
    const GridFunction y = read_trajectory_csv(traj, lb.form.grid());

    const double value = evaluate_functional(make_problem(lb.form), y);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", value);
    out << buf << "\n";
    return exit_ok;
}

int cmd_table(const fs::path& config_path, std::ostream& out) {
    ProblemConfig cfg = load_config(config_path);
    GridPtr grid = cfg.timescale.build();
    write_grid_table_csv(out, grid, cfg.ingredients ? &*cfg.ingredients : nullptr);
    return exit_ok;
}

} // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"synthesis and verification of variational Lagrangians on isolated time "
                 "scales"};
    app.require_subcommand(1);

    std::string config_path, input_path, bundle_path, traj_path;
    std::string out_dir, base;
    bool literal_build = false, literal_verify = false;

    CLI::App* build = app.add_subcommand("build", "synthesize a Lagrangian bundle + CSV");
    build->add_option("config", config_path, "problem config (JSON)")->required();
    build->add_option("--out-dir", out_dir, "output directory (default $TSVAR_OUT_DIR or .)");
    build->add_option("-o,--output", base, "basename for the output files");
    build->add_flag("--literal-general", literal_build,
                    "record the literal general-form option in the bundle");

    CLI::App* verify = app.add_subcommand("verify", "check EL + Legendre at the extremal");
    verify->add_option("input", input_path, "config or bundle (JSON)")->required();
    verify->add_option("--out-dir", out_dir, "output directory (default $TSVAR_OUT_DIR or .)");
    verify->add_flag("--literal-general", literal_verify,
                     "also report the literal general-form residual");

    CLI::App* eval = app.add_subcommand("eval", "evaluate the functional at a trajectory");
    eval->add_option("bundle", bundle_path, "Lagrangian bundle (JSON)")->required();
    eval->add_option("trajectory", traj_path, "CSV with columns t,y")->required();

    CLI::App* table = app.add_subcommand("table", "dump grid columns (and r, s, e_r) as CSV");
    table->add_option("config", config_path, "problem config (JSON)")->required();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_input;
    }

    try {
        if (build->parsed()) return cmd_build(config_path, out_dir, base, literal_build, out);
        if (verify->parsed()) return cmd_verify(input_path, out_dir, literal_verify, out);
        if (eval->parsed()) return cmd_eval(bundle_path, traj_path, out);
        if (table->parsed()) return cmd_table(config_path, out);
    } catch (const parse_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const config_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const domain_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const validation_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const eval_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const verification_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_verification;
    }
    err << "error: no command\n";
    return exit_input;
}

} // namespace tsvar::cli
