// Command-line driver for parameter-plane sweeps, fixed-lambda_y slices, energy scans and
// finite-size oracle comparisons.
//
// Exit codes: 0 success, 2 configuration error, 3 some grid points failed.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "dicke/dicke_model.hpp"
#include "dicke/sweep.hpp"
#include "dicke/sweep_io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

struct CommonOptions {
    double omega = 1.0;
    double omega0 = 1.0;
    std::string format = "csv";
    std::string out;  // empty: stdout
};

struct GridOptions {
    std::string x = "0:2:101";
    std::string y = "0:2:101";
    std::vector<double> slices;
    std::vector<std::string> quantities{"all"};
    double goldstoneEpsilon = dicke::model::kLimitEpsilon;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--omega", o.omega, "cavity frequency")->capture_default_str();
    cmd->add_option("--omega0", o.omega0, "atomic splitting")->capture_default_str();
    cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    cmd->add_option("--out", o.out, "output file (default stdout)");
}

void add_grid(CLI::App* cmd, GridOptions& g, bool slice) {
    cmd->add_option("--x", g.x, "lambda_x range min:max:count in units of lambda_c")->capture_default_str();
    if (slice) {
        cmd->add_option("--y", g.slices, "fixed lambda_y values in units of lambda_c")->required()->delimiter(',');
    } else {
        cmd->add_option("--y", g.y, "lambda_y range min:max:count in units of lambda_c")->capture_default_str();
    }
    cmd->add_option("--quantities", g.quantities, "gaps, mi, eof, tripartite, energy, all")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--goldstone-epsilon", g.goldstoneEpsilon, "offset applied near lambda_x = lambda_y > lambda_c")
        ->capture_default_str();
    cmd->add_option("--threads", g.threads, "worker threads (0: hardware concurrency)")->capture_default_str();
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw dicke::Error(dicke::ErrorCode::ConfigInvalid, "cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

int run_grid(const CommonOptions& c, const GridOptions& g, bool slice) {
    dicke::sweep::SweepConfig cfg;
    cfg.omega = c.omega;
    cfg.omega0 = c.omega0;
    cfg.xRange = dicke::sweep::AxisRange::parse(g.x);
    if (slice) {
        cfg.slices = g.slices;
    } else {
        cfg.yRange = dicke::sweep::AxisRange::parse(g.y);
    }
    cfg.quantities = dicke::sweep::parse_quantities(g.quantities);
    cfg.outputFormat = c.format == "json" ? dicke::sweep::OutputFormat::Json : dicke::sweep::OutputFormat::Csv;
    cfg.goldstoneEpsilon = g.goldstoneEpsilon;
    cfg.threads = g.threads;
    cfg.validate();

    Output out(c.out);
    const auto rows = dicke::sweep::run_sweep(cfg);
    if (cfg.outputFormat == dicke::sweep::OutputFormat::Json) {
        out.stream() << dicke::io::sweep_json(cfg, rows).dump(2) << '\n';
    } else {
        dicke::io::write_sweep_csv(out.stream(), cfg, rows);
    }
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.failed() ? 1 : 0;
    if (failed > 0) {
        std::cerr << failed << " of " << rows.size() << " grid points failed\n";
        return kExitPartial;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-mode Dicke model: excitation gaps and Gaussian correlations across the coupling plane"};
    app.set_config("--config", "", "TOML/INI file; keys mirror long option names, one [section] per subcommand");
    app.require_subcommand(1);

    CommonOptions common;
    GridOptions grid;
    auto* sweepCmd = app.add_subcommand("sweep", "evaluate a lambda_x by lambda_y grid");
    add_common(sweepCmd, common);
    add_grid(sweepCmd, grid, false);

    auto* sliceCmd = app.add_subcommand("slice", "evaluate lambda_x ranges at fixed lambda_y values");
    add_common(sliceCmd, common);
    add_grid(sliceCmd, grid, true);

    double lambdaX = 0.5;
    double lambdaY = 0.3;
    std::vector<double> sizes{5, 10, 20};
    int nMax = 20;
    std::size_t budget = dicke::oracle::kDefaultBudget;
    auto* oracleCmd = app.add_subcommand("oracle-compare", "finite-j exact diagonalization against the analytic limit");
    add_common(oracleCmd, common);
    oracleCmd->add_option("--lambda-x", lambdaX, "units of lambda_c")->capture_default_str();
    oracleCmd->add_option("--lambda-y", lambdaY, "units of lambda_c")->capture_default_str();
    oracleCmd->add_option("--j", sizes, "spin sizes")->delimiter(',')->capture_default_str();
    oracleCmd->add_option("--nmax", nMax, "Fock cutoff per mode")->capture_default_str();
    oracleCmd->add_option("--budget", budget, "maximum Hilbert dimension")->capture_default_str();

    std::string scanAxis = "x";
    double scanFixed = 0.3;
    std::string scanRange = "0:2:201";
    auto* scanCmd = app.add_subcommand("energy-scan", "ground-state energy derivatives along one coupling");
    add_common(scanCmd, common);
    scanCmd->add_option("--axis", scanAxis, "scanned coupling")->check(CLI::IsMember({"x", "y"}))->capture_default_str();
    scanCmd->add_option("--fixed", scanFixed, "other coupling, units of lambda_c")->capture_default_str();
    scanCmd->add_option("--range", scanRange, "min:max:count in units of lambda_c")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*sweepCmd) return run_grid(common, grid, false);
        if (*sliceCmd) return run_grid(common, grid, true);

        dicke::model::ModelParams p;
        p.omega = common.omega;
        p.omega0 = common.omega0;
        p.validate();
        const double lc = p.lambdaC();
        Output out(common.out);
        if (*oracleCmd) {
            p.lambdaX = lambdaX * lc;
            p.lambdaY = lambdaY * lc;
            const auto rows = dicke::sweep::run_oracle_compare(p, sizes, nMax, budget);
            if (common.format == "json") {
                out.stream() << dicke::io::oracle_json(p, rows).dump(2) << '\n';
            } else {
                dicke::io::write_oracle_csv(out.stream(), rows);
            }
            return 0;
        }
        if (*scanCmd) {
            const auto range = dicke::sweep::AxisRange::parse(scanRange);
            std::vector<double> couplings = range.values();
            for (double& v : couplings) v *= lc;
            const auto axis = scanAxis == "x" ? dicke::model::ScanAxis::LambdaX : dicke::model::ScanAxis::LambdaY;
            (axis == dicke::model::ScanAxis::LambdaX ? p.lambdaY : p.lambdaX) = scanFixed * lc;
            const auto rows = dicke::model::gs_energy_derivative_scan(p, axis, couplings);
            if (common.format == "json") {
                nlohmann::json j = nlohmann::json::array();
                for (const auto& r : rows) {
                    j.push_back({{"coupling", r.coupling / lc}, {"e_gs", r.eGS}, {"dE", r.dE}, {"d2E", r.d2E},
                                 {"dE_jump", r.dEJump}, {"d2E_jump", r.d2EJump}});
                }
                out.stream() << j.dump(2) << '\n';
            } else {
                out.stream() << "coupling,e_gs,dE,d2E,dE_jump,d2E_jump\n";
                for (const auto& r : rows) {
                    out.stream() << dicke::io::format_number(r.coupling / lc) << ',' << dicke::io::format_number(r.eGS)
                                 << ',' << dicke::io::format_number(r.dE) << ',' << dicke::io::format_number(r.d2E)
                                 << ',' << (r.dEJump ? 1 : 0) << ',' << (r.d2EJump ? 1 : 0) << '\n';
                }
            }
            return 0;
        }
    } catch (const dicke::Error& e) {
        std::cerr << e.what() << '\n';
        return e.code() == dicke::ErrorCode::ConfigInvalid || e.code() == dicke::ErrorCode::InvalidArgument ||
                       e.code() == dicke::ErrorCode::BudgetExceeded
                   ? kExitConfig
                   : 1;
    }
    return 0;
}
