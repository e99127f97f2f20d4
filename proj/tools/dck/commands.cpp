#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "csv.hpp"
#include "dck/error.hpp"
#include "dck/estimator.hpp"
#include "dck/kernelmat.hpp"
#include "dck/maxent.hpp"
#include "dck/mercer.hpp"
#include "dck/rkhs.hpp"
#include "verify.hpp"

namespace dck::cli {

namespace {

using nlohmann::json;

constexpr double kGammaFloor = 1e-10;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::ostream& log_of(const CommandContext& ctx) { return *ctx.log; }

void emit(const CommandContext& ctx, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(ctx.out_dir);
    write_atomic(ctx.out_dir / name, content);
    if (ctx.verbose) log_of(ctx) << "wrote " << (ctx.out_dir / name).string() << "\n";
}

void emit_json(const CommandContext& ctx, const std::string& name, const json& doc) {
    emit(ctx, name, doc.dump(2) + "\n");
}

CsvTable table(const CommandContext& ctx, const std::vector<std::string>& columns) {
    return CsvTable(columns, ctx.config.hash);
}

void require_dc_family(const KernelSpec& spec, const char* command) {
    if (!spec.is_dc_family()) {
        throw InputError(std::string(command) + " needs a DC or TC kernel, got " + spec.describe());
    }
}

// Dense matrix with one CSV row per matrix row.
std::string dense_csv(const CommandContext& ctx, const Eigen::MatrixXd& m) {
    std::vector<std::string> cols;
    for (Eigen::Index j = 0; j < m.cols(); ++j) cols.push_back("col_" + std::to_string(j));
    auto t = table(ctx, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) t.cell(m(i, j));
        t.end_row();
    }
    return t.text();
}

// --- estimate --------------------------------------------------------------

Dataset load_dataset(const CommandContext& ctx) {
    if (!ctx.data) throw InputError("estimate needs --data PATH");
    const auto& est = ctx.config.estimation;
    const auto tab = read_numeric_csv(*ctx.data);
    for (const auto& c : tab.columns) {
        if (c != "time" && c != "y" && c != "u") throw InputError("data file: unexpected column '" + c + "'");
    }
    const auto time_col = tab.column("time");
    const auto y_col = tab.column("y");
    const auto u_col = tab.column("u");
    if (!time_col || !y_col) throw InputError("data file: columns 'time' and 'y' are required");
    if (est.input == "zoh" && !u_col) throw InputError("data file: column 'u' is required for zoh input");
    if (est.input != "zoh" && u_col) {
        log_of(ctx) << "warning: input is declared " << est.input << "; the 'u' column is ignored\n";
    }
    const std::string where = ctx.data->filename().string() + " line ";
    Dataset data;
    data.outputs.resize(static_cast<Eigen::Index>(tab.rows.size()));
    std::vector<double> u;
    for (std::size_t r = 0; r < tab.rows.size(); ++r) {
        const double t = tab.rows[r][*time_col];
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw InputError(where + std::to_string(tab.line_numbers[r]) + ": time must be finite and >= 0");
        }
        if (r > 0 && !(t > data.output_times.back())) {
            throw InputError(where + std::to_string(tab.line_numbers[r]) + ": times must be strictly increasing");
        }
        data.output_times.push_back(t);
        data.outputs(static_cast<Eigen::Index>(r)) = tab.rows[r][*y_col];
        if (u_col) u.push_back(tab.rows[r][*u_col]);
    }
    if (est.input == "zoh") {
        data.input = SampledZOH{data.output_times, u};
    } else if (est.input == "impulse") {
        data.input = ImpulseInput{};
    } else if (est.input == "step") {
        data.input = StepInput{};
    } else {
        data.input = ExpSumInput{est.input_terms};
    }
    data.noise_variance = est.noise_variance;
    data.validate();
    return data;
}

}  // namespace

int cmd_estimate(const CommandContext& ctx) {
    const auto& cfg = ctx.config;
    const Dataset data = load_dataset(ctx);
    const auto eval_times = cfg.estimation.eval_times.resolve();
    for (double t : eval_times) {
        if (!(t >= 0.0)) throw InputError("config: estimation.eval_times must be >= 0");
    }
    const auto ok = output_kernel(cfg.kernel, data, cfg.quadrature);

    json report;
    report["config_hash"] = cfg.hash;
    report["config"] = cfg.effective;
    json warnings = json::array();
    double gamma = 0.0;
    std::string source;
    if (!cfg.estimation.gamma_grid.empty()) {
        const auto search = grid_search_gamma(ok, cfg.estimation.gamma_grid);
        gamma = search.best;
        source = "grid_search";
        json gs;
        gs["gammas"] = search.gammas;
        gs["holdout_losses"] = search.losses;
        gs["holdout_count"] = search.holdout;
        const auto best = std::find(search.gammas.begin(), search.gammas.end(), search.best) - search.gammas.begin();
        gs["best_holdout_loss"] = search.losses[static_cast<std::size_t>(best)];
        report["grid_search"] = gs;
    } else if (cfg.estimation.gamma) {
        gamma = *cfg.estimation.gamma;
        source = "config";
    } else if (data.noise_variance > 0.0) {
        gamma = data.noise_variance;
        source = "noise_variance";
    } else {
        gamma = kGammaFloor;
        source = "floor";
        const std::string msg = "noise variance is 0 and no gamma was given; using gamma = 1e-10";
        log_of(ctx) << "warning: " << msg << "\n";
        warnings.push_back(msg);
    }
    const auto result = estimate(ok, gamma);
    const Eigen::VectorXd fitted = result.gram * result.coefficients;
    const Eigen::VectorXd residuals = data.outputs - fitted;

    auto g_hat = table(ctx, {"time_s", "impulse_response"});
    for (double t : eval_times) g_hat.cell(t).cell(reconstruct(result, t)).end_row();
    emit(ctx, "estimate.csv", g_hat.text());

    auto samples = table(ctx, {"index", "time_s", "y", "y_fitted", "residual", "coefficient"});
    for (std::size_t j = 0; j < data.output_times.size(); ++j) {
        const auto i = static_cast<Eigen::Index>(j);
        samples.cell(j).cell(data.output_times[j]).cell(data.outputs(i)).cell(fitted(i)).cell(residuals(i));
        samples.cell(result.coefficients(i)).end_row();
    }
    emit(ctx, "samples.csv", samples.text());

    report["kernel"] = kernel_to_json(cfg.kernel);
    report["gamma"] = gamma;
    report["gamma_source"] = source;
    report["samples"] = data.output_times.size();
    report["fit_percent"] = normalized_fit(data.outputs, fitted);
    report["residual_rms"] = std::sqrt(residuals.squaredNorm() / static_cast<double>(residuals.size()));
    report["linear_system_residual"] = result.residual;
    report["warnings"] = warnings;
    emit_json(ctx, "report.json", report);
    if (ctx.verbose) {
        log_of(ctx) << "gamma=" << gamma << " (" << source << ") fit=" << report["fit_percent"].get<double>()
                    << "%\n";
    }
    return kSuccess;
}

int cmd_verify(const CommandContext& ctx) {
    const auto& cfg = ctx.config;
    const auto start = std::chrono::steady_clock::now();
    const auto report = run_verify(cfg, log_of(ctx));
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;

    auto csv = table(ctx, {"section", "check", "measured", "relation", "threshold", "pass"});
    json checks = json::array();
    for (const auto& r : report.rows) {
        csv.cell(r.section).cell(r.name).cell(r.measured).cell(r.relation).cell(r.threshold);
        csv.cell(std::string(r.pass ? "true" : "false")).end_row();
        checks.push_back({{"section", r.section},
                          {"check", r.name},
                          {"measured", std::isfinite(r.measured) ? json(r.measured) : json(nullptr)},
                          {"relation", r.relation},
                          {"threshold", r.threshold},
                          {"pass", r.pass}});
    }
    emit(ctx, "verify.csv", csv.text());

    json sections = json::object();
    for (const auto& name : report.sections()) {
        std::size_t total = 0;
        std::size_t failed = 0;
        for (const auto& r : report.rows) {
            if (r.section != name) continue;
            ++total;
            failed += !r.pass;
        }
        sections[name] = {{"checks", total}, {"failures", failed}, {"pass", failed == 0}};
    }
    json doc;
    doc["config_hash"] = cfg.hash;
    doc["config"] = cfg.effective;
    doc["pass"] = report.all_pass();
    doc["failures"] = report.failures();
    doc["sections"] = sections;
    doc["checks"] = checks;
    emit_json(ctx, "report.json", doc);

    log_of(ctx) << (report.all_pass() ? "verify: all " + std::to_string(report.rows.size()) + " checks passed"
                                      : "verify: " + std::to_string(report.failures()) + " of " +
                                            std::to_string(report.rows.size()) + " checks failed")
                << " (" << took.count() << " s)\n";
    return report.all_pass() ? kSuccess : kCheckFailure;
}

int cmd_sample(const CommandContext& ctx) {
    const auto& cfg = ctx.config;
    const auto& smp = cfg.sampling;
    const auto points = smp.grid.resolve();
    SampleBatch batch{TimeGrid::half_line({0.0}), {}};
    Eigen::MatrixXd exact;
    std::string time_col = "time_s";
    if (smp.process == "genspline") {
        if (cfg.kernel.kind() != KernelKind::Spline1 && cfg.kernel.kind() != KernelKind::GenSpline1) {
            throw InputError("genspline sampling needs a Spline1 or GenSpline1 kernel, got " + cfg.kernel.describe());
        }
        const auto grid = TimeGrid::unit(points);
        batch = sample_genspline_process(grid, cfg.kernel.rho(), smp.seed, smp.count);
        exact = genspline_exact_covariance(grid, cfg.kernel.rho());
        time_col = "tau";
    } else {
        require_dc_family(cfg.kernel, "sample");
        const auto grid = TimeGrid::half_line(points);
        batch = smp.process == "dc" ? sample_dc_process(grid, cfg.kernel, smp.seed, smp.count)
                                    : sample_dc_markov(grid, cfg.kernel, smp.seed, smp.count);
        exact = dc_process_exact_covariance(grid, cfg.kernel);
    }

    auto paths = table(ctx, {"sample", time_col, "value"});
    for (const auto& s : batch.samples) {
        for (std::size_t k = 0; k < s.values.size(); ++k) paths.cell(s.index).cell(points[k]).cell(s.values[k]).end_row();
    }
    emit(ctx, "samples.csv", paths.text());

    auto cov = table(ctx, {"row", "col", "empirical", "standard_error", "exact"});
    if (batch.samples.size() >= 2) {
        const auto m = empirical_moments(batch);
        for (Eigen::Index i = 0; i < exact.rows(); ++i) {
            for (Eigen::Index j = 0; j < exact.cols(); ++j) {
                cov.cell(static_cast<std::size_t>(i)).cell(static_cast<std::size_t>(j));
                cov.cell(m.covariance(i, j)).cell(m.covariance_se(i, j)).cell(exact(i, j)).end_row();
            }
        }
    }
    emit(ctx, "covariance.csv", cov.text());
    return kSuccess;
}

int cmd_expand(const CommandContext& ctx) {
    const auto& cfg = ctx.config;
    const EigenSystem sys(cfg.kernel, cfg.expand.truncation);
    const auto points = cfg.expand.grid.resolve();
    const auto approx = truncated_expansion_matrix(sys, points);
    const bool unit = cfg.kernel.on_unit_square();
    auto pairs = table(ctx, {unit ? "tau_i" : "t_i_s", unit ? "tau_j" : "t_j_s", "kernel", "expansion", "abs_error"});
    double sup = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < points.size(); ++j) {
            const double k = eval_kernel(cfg.kernel, points[i], points[j]);
            const double a = approx(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            sup = std::max(sup, std::abs(a - k));
            pairs.cell(points[i]).cell(points[j]).cell(k).cell(a).cell(std::abs(a - k)).end_row();
        }
    }
    emit(ctx, "expand.csv", pairs.text());
    auto summary = table(ctx, {"truncation", "points", "sup_error", "spline1_tail_bound"});
    summary.cell(cfg.expand.truncation).cell(points.size()).cell(sup).cell(spline1_tail_bound(cfg.expand.truncation));
    summary.end_row();
    emit(ctx, "expand_summary.csv", summary.text());
    if (ctx.verbose) log_of(ctx) << "sup error " << sup << "\n";
    return kSuccess;
}

int cmd_norm(const CommandContext& ctx) {
    const auto& cfg = ctx.config;
    require_dc_family(cfg.kernel, "norm");
    const auto& spec = cfg.kernel;
    const auto& terms = cfg.norm.terms;
    for (const auto& [c, rate] : terms) {
        if (!(rate > 0.0)) throw InputError("config: norm.terms rates must be > 0");
    }
    const auto g = FunctionHandle::exp_sum(terms);
    auto out = table(ctx, {"method", "norm_sq", "status"});

    const auto integral = spec.kind() == KernelKind::TC ? tc_norm_integral(g, spec, cfg.quadrature)
                                                        : dc_norm_integral(g, spec, cfg.quadrature);
    out.cell(std::string("integral"));
    out.cell(integral.converged() ? integral.value : kNaN);
    out.cell(std::string(integral.converged() ? "converged" : "diverged")).end_row();
    if (!integral.converged()) log_of(ctx) << "integral: " << integral.diagnostic << "\n";

    const auto series = dc_norm_series(g, EigenSystem(spec), cfg.norm.truncation, cfg.quadrature);
    out.cell(std::string("series_M" + std::to_string(cfg.norm.truncation))).cell(series.norm_sq);
    out.cell(std::string("truncated")).end_row();

    // <e^{-a t}, e^{-b t}> = 2 beta (rho - a / 2beta)(rho - b / 2beta) / (a + b - (4 rho + 2) beta)
    const double beta = spec.beta();
    const double rho = spec.rho();
    bool in_space = true;
    for (const auto& term : terms) in_space = in_space && membership_necessary_check(term.second, spec) == Membership::PassesNecessary;
    double closed = kNaN;
    if (in_space) {
        closed = 0.0;
        for (const auto& [ca, a] : terms) {
            for (const auto& [cb, b] : terms) {
                closed += ca * cb * 2.0 * beta * (rho - a / (2.0 * beta)) * (rho - b / (2.0 * beta)) /
                          (a + b - (4.0 * rho + 2.0) * beta);
            }
        }
    }
    out.cell(std::string("closed_form")).cell(closed).cell(std::string(in_space ? "exact" : "not_in_space")).end_row();
    emit(ctx, "norm.csv", out.text());
    return kSuccess;
}

int cmd_tridiag(const CommandContext& ctx) {
    const auto& cfg = ctx.config;
    require_dc_family(cfg.kernel, "tridiag");
    const auto points = cfg.tridiag.grid.resolve();
    const auto km = assemble(cfg.kernel, TimeGrid::half_line(points));
    const Eigen::MatrixXd inv = tridiagonal_inverse(km).to_dense();
    const bool dense_ok = points.size() <= kDenseLimit;
    const Eigen::MatrixXd dense = dense_ok ? dense_inverse(km.entries) : inv;
    const auto psd = psd_check(km);

    auto grid = table(ctx, {"index", "time_s"});
    for (std::size_t i = 0; i < points.size(); ++i) grid.cell(i).cell(points[i]).end_row();
    emit(ctx, "grid.csv", grid.text());
    emit(ctx, "K.csv", dense_csv(ctx, km.entries));
    emit(ctx, "Kinv.csv", dense_csv(ctx, inv));

    auto summary = table(ctx, {"n", "off_band_ratio_dense_inverse", "off_band_ratio_constructive_inverse",
                               "identity_deviation", "lambda_min", "lambda_max"});
    summary.cell(points.size()).cell(dense_ok ? off_band_ratio(dense) : kNaN).cell(off_band_ratio(inv));
    summary.cell(identity_deviation(km.entries * inv)).cell(psd.lambda_min).cell(psd.lambda_max).end_row();
    emit(ctx, "tridiag.csv", summary.text());

    if (cfg.tridiag.heatmap) {
        auto heat = table(ctx, {"row", "col", "abs_value"});
        for (Eigen::Index i = 0; i < dense.rows(); ++i) {
            for (Eigen::Index j = 0; j < dense.cols(); ++j) {
                heat.cell(static_cast<std::size_t>(i)).cell(static_cast<std::size_t>(j)).cell(std::abs(dense(i, j)));
                heat.end_row();
            }
        }
        emit(ctx, "heatmap.csv", heat.text());
    }
    return kSuccess;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stable DC kernel toolkit: estimation, sampling and invariant checks", "dck"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::optional<std::string> config_path;
    std::optional<std::string> data_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    bool verbose = false;
    app.add_option("--config", config_path, "JSON run configuration (defaults apply when omitted)");
    app.add_option("--out", out_dir, "output directory (overrides io.out_dir)");
    app.add_option("--seed", seed, "overrides every seed in the configuration");
    app.add_flag("--verbose", verbose, "report progress and written files on stderr");

    auto* estimate_cmd = app.add_subcommand("estimate", "fit an impulse response to measured data");
    estimate_cmd->add_option("--data", data_path, "CSV with columns time, y[, u]")->required();
    app.add_subcommand("verify", "run the invariant suite; exit 1 on any failed check");
    app.add_subcommand("sample", "draw process realizations and empirical covariances");
    app.add_subcommand("expand", "compare a kernel with its truncated eigen-expansion");
    app.add_subcommand("norm", "squared RKHS norm of an exponential sum");
    app.add_subcommand("tridiag", "kernel matrix, its inverse and off-band statistics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputFailure;
    }

    try {
        CommandContext ctx;
        ctx.config = config_path ? load_config(*config_path) : parse_config(json::object());
        if (seed) apply_seed(ctx.config, *seed);
        ctx.out_dir = out_dir ? std::filesystem::path(*out_dir) : ctx.config.out_dir;
        if (data_path) ctx.data = *data_path;
        ctx.verbose = verbose;
        ctx.log = &err;
        if (verbose) err << "config hash " << ctx.config.hash << "\n";

        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "estimate") return cmd_estimate(ctx);
        if (name == "verify") return cmd_verify(ctx);
        if (name == "sample") return cmd_sample(ctx);
        if (name == "expand") return cmd_expand(ctx);
        if (name == "norm") return cmd_norm(ctx);
        return cmd_tridiag(ctx);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputFailure;
    }
}

}  // namespace dck::cli
