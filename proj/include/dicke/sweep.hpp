#pragma once

// Parameter-plane sweeps over (lambda_x, lambda_y) and finite-size oracle comparison tables.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dicke/dicke_model.hpp"
#include "dicke/errors.hpp"
#include "dicke/gaussian_info.hpp"
#include "dicke/oracle_ed.hpp"

namespace dicke::sweep {

/// Uniform grid min:max:count, in units of lambda_c.
struct AxisRange {
    double min = 0.0;
    double max = 2.0;
    int count = 101;

    std::vector<double> values() const {
        std::vector<double> v(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            // Endpoint-exact linear spacing.
            const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
            v[static_cast<std::size_t>(i)] = i == count - 1 ? max : min + t * (max - min);
        }
        return v;
    }

    /// Parses "min:max:count".
    static AxisRange parse(std::string_view text) {
        const auto fail = [&] { return Error(ErrorCode::ConfigInvalid, "range must be min:max:count, got '" + std::string(text) + "'"); };
        const auto c1 = text.find(':');
        const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
        if (c2 == std::string_view::npos) throw fail();
        AxisRange r;
        const auto num = [&](std::string_view s, auto& out) {
            const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw fail();
        };
        num(text.substr(0, c1), r.min);
        num(text.substr(c1 + 1, c2 - c1 - 1), r.max);
        num(text.substr(c2 + 1), r.count);
        return r;
    }
};

enum class Quantity { Gaps, Mi, Eof, Tripartite, Energy };
enum class OutputFormat { Csv, Json };

inline std::string to_string(Quantity q) {
    switch (q) {
        case Quantity::Gaps: return "gaps";
        case Quantity::Mi: return "mi";
        case Quantity::Eof: return "eof";
        case Quantity::Tripartite: return "tripartite";
        case Quantity::Energy: return "energy";
    }
    return "?";
}

inline const std::set<Quantity>& all_quantities() {
    static const std::set<Quantity> all{Quantity::Gaps, Quantity::Mi, Quantity::Eof, Quantity::Tripartite,
                                        Quantity::Energy};
    return all;
}

/// Parses names from {gaps, mi, eof, tripartite, energy, all}.
inline std::set<Quantity> parse_quantities(const std::vector<std::string>& names) {
    std::set<Quantity> out;
    for (const auto& n : names) {
        if (n == "all") {
            out = all_quantities();
            continue;
        }
        bool found = false;
        for (Quantity q : all_quantities()) {
            if (to_string(q) == n) {
                out.insert(q);
                found = true;
            }
        }
        if (!found) throw Error(ErrorCode::ConfigInvalid, "unknown quantity '" + n + "'");
    }
    if (out.empty()) throw Error(ErrorCode::ConfigInvalid, "no quantities selected");
    return out;
}

struct SweepConfig {
    double omega = 1.0;
    double omega0 = 1.0;
    AxisRange xRange{};
    AxisRange yRange{};
    std::set<Quantity> quantities = all_quantities();
    std::vector<double> slices;  ///< fixed lambda_y values; when set, they replace yRange
    OutputFormat outputFormat = OutputFormat::Csv;
    double goldstoneEpsilon = model::kLimitEpsilon;
    unsigned threads = 0;  ///< 0 selects hardware concurrency

    bool wants(Quantity q) const { return quantities.contains(q); }

    void validate() const {
        const auto bad = [](const std::string& m) { return Error(ErrorCode::ConfigInvalid, m); };
        if (!(omega > 0.0) || !(omega0 > 0.0)) throw bad("omega and omega0 must be positive");
        for (const auto* r : {&xRange, &yRange}) {
            if (r->count < 2) throw bad("each axis needs count >= 2");
            if (!(r->min >= 0.0) || !(r->max >= r->min)) throw bad("ranges must be nonnegative and increasing");
        }
        for (double s : slices) {
            if (!(s >= 0.0)) throw bad("slice values must be nonnegative");
        }
        if (!(goldstoneEpsilon > 0.0) || goldstoneEpsilon >= 0.1) throw bad("goldstone epsilon must be in (0, 0.1)");
        if (quantities.empty()) throw bad("no quantities selected");
    }

    std::vector<double> y_values() const { return slices.empty() ? yRange.values() : slices; }
};

struct SweepRow {
    double lambdaX = 0.0;  ///< requested grid coordinate, units of lambda_c
    double lambdaY = 0.0;
    bool goldstoneOffset = false;  ///< evaluated at lambda_y = lambda_x (1 - epsilon)
    bool diverged = false;         ///< a gap closes here; correlation values are omitted
    std::string status = "ok";     ///< "ok", "diverged", or the error code of a failed point
    std::optional<model::ExcitationSpectrum> gaps;
    std::optional<double> eGS;
    std::optional<info::CorrelationReport> report;

    bool failed() const { return status != "ok" && status != "diverged"; }
};

/// Evaluates one grid point. Never throws for model errors; they land in status.
inline SweepRow evaluate_point(const SweepConfig& cfg, double x, double y) {
    SweepRow row;
    row.lambdaX = x;
    row.lambdaY = y;
    try {
        model::ModelParams p;
        p.omega = cfg.omega;
        p.omega0 = cfg.omega0;
        const double lc = p.lambdaC();
        p.lambdaX = x * lc;
        p.lambdaY = y * lc;
        const auto off = model::offset_from_goldstone_line(p, cfg.goldstoneEpsilon);
        row.goldstoneOffset = off.applied;
        p = off.params;

        if (cfg.wants(Quantity::Gaps)) row.gaps = model::excitation_gaps(p);
        if (cfg.wants(Quantity::Energy)) row.eGS = model::ground_state_energy(p);
        if (cfg.wants(Quantity::Mi) || cfg.wants(Quantity::Eof) || cfg.wants(Quantity::Tripartite)) {
            try {
                row.report = info::correlation_report(model::ground_state_cm(p));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NearSingular) throw;
                row.diverged = true;
                row.status = "diverged";
            }
        }
    } catch (const Error& e) {
        row.status = std::string(to_string(e.code()));
        row.report.reset();
    } catch (const std::exception&) {
        row.status = to_string(ErrorCode::NumericalFailure);
        row.report.reset();
    }
    return row;
}

/// Evaluates the grid on a worker pool. Rows come back in row-major order (lambda_x outer,
/// lambda_y inner) regardless of thread count; each point is computed independently, so output is
/// identical for any number of workers.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const auto xs = cfg.xRange.values();
    const auto ys = cfg.y_values();
    const std::size_t total = xs.size() * ys.size();
    std::vector<SweepRow> rows(total);

    unsigned workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(total, 1)));

    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            rows[i] = evaluate_point(cfg, xs[i / ys.size()], ys[i % ys.size()]);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return rows;
}

struct OracleCompareRow {
    double j = 0.0;
    double e0PerSpin = 0.0;
    double eGS = 0.0;
    double deltaE = 0.0;          ///< |E0/j - eGS|
    double maxCmDeviation = 0.0;  ///< max-abs entry of oracle CM minus analytic CM
    bool convergedCutoff = false;
    bool fieldIndependent = true;
    std::size_t dimension = 0;
};

/// Runs the finite-size oracle at each j and compares against the thermodynamic-limit results.
inline std::vector<OracleCompareRow> run_oracle_compare(const model::ModelParams& p, const std::vector<double>& sizes,
                                                        int nMax = 20, std::size_t budget = oracle::kDefaultBudget) {
    p.validate();
    const double eGS = model::ground_state_energy(p);
    const auto analytic = model::ground_state_cm(p).entries();
    std::vector<OracleCompareRow> rows;
    rows.reserve(sizes.size());
    for (double j : sizes) {
        oracle::TruncationSpec t;
        t.j = j;
        t.nMax = nMax;
        t.budget = budget;
        const auto r = oracle::exact_ground_state(p, t);
        OracleCompareRow row;
        row.j = j;
        row.e0PerSpin = r.groundEnergyPerSpin;
        row.eGS = eGS;
        row.deltaE = std::abs(r.groundEnergyPerSpin - eGS);
        row.maxCmDeviation = (r.quadratureCM - analytic).cwiseAbs().maxCoeff();
        row.convergedCutoff = r.convergedCutoff;
        row.fieldIndependent = r.fieldIndependent;
        row.dimension = r.dimension;
        rows.push_back(row);
    }
    return rows;
}

} // namespace dicke::sweep
