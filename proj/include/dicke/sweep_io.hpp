#pragma once

// CSV and JSON serialization of sweep rows, oracle comparisons and single-point results.

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dicke/gaussian_info.hpp"
#include "dicke/oracle_ed.hpp"
#include "dicke/sweep.hpp"

namespace dicke::io {

/// Magnitudes above this are written as the token "inf" (with sign).
inline constexpr double kInfinityThreshold = 1e6;

/// 17 significant digits, "." decimal separator regardless of locale.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::abs(v) > kInfinityThreshold) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

/// Stable column order. Absent values (quantity not requested, diverged or failed point) are empty.
inline const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> cols{
        "lambda_x", "lambda_y", "goldstone_offset", "diverged", "status",   "nu1",    "nu2",    "nu3",
        "e_gs",     "S_x",      "S_y",              "S_j",      "S_xy",     "S_xj",   "S_yj",   "I_xy_j",
        "I_xj_y",   "I_yj_x",   "I_x_y",            "I_x_j",    "I_y_j",    "E_x_j",  "E_y_j",  "E_x_y",
        "E3_x_y_j", "E3_j_y_x"};
    return cols;
}

namespace detail {

using Cell = std::optional<double>;

// Numeric cells for columns nu1 onward, in sweep_columns() order.
inline std::vector<Cell> numeric_cells(const sweep::SweepConfig& cfg, const sweep::SweepRow& r) {
    using sweep::Quantity;
    std::vector<Cell> c(21);
    if (r.gaps) {
        c[0] = r.gaps->nu[0];
        c[1] = r.gaps->nu[1];
        c[2] = r.gaps->nu[2];
    }
    c[3] = r.eGS;
    if (r.report) {
        const auto& q = *r.report;
        if (cfg.wants(Quantity::Mi)) {
            const std::array<double, 12> mi{q.sX,    q.sY,    q.sJ,    q.sXY,  q.sXJ,  q.sYJ,
                                            q.iXY_J, q.iXJ_Y, q.iYJ_X, q.iX_Y, q.iX_J, q.iY_J};
            for (std::size_t i = 0; i < mi.size(); ++i) c[4 + i] = mi[i];
        }
        if (cfg.wants(Quantity::Eof)) {
            c[16] = q.eX_J;
            c[17] = q.eY_J;
            c[18] = q.eX_Y;
        }
        if (cfg.wants(Quantity::Tripartite)) {
            c[19] = q.tripartiteXYJ;
            c[20] = q.tripartiteJYX;
        }
    }
    return c;
}

} // namespace detail

inline void write_sweep_csv(std::ostream& os, const sweep::SweepConfig& cfg, const std::vector<sweep::SweepRow>& rows) {
    const auto& cols = sweep_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : rows) {
        os << format_number(r.lambdaX) << ',' << format_number(r.lambdaY) << ',' << (r.goldstoneOffset ? 1 : 0) << ','
           << (r.diverged ? 1 : 0) << ',' << r.status;
        for (const auto& cell : detail::numeric_cells(cfg, r)) {
            os << ',';
            if (cell) os << format_number(*cell);
        }
        os << '\n';
    }
}

/// JSON value for a number, applying the same "inf" rule as the CSV writer.
inline nlohmann::json number_json(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::abs(v) > kInfinityThreshold) return v > 0 ? "inf" : "-inf";
    return v;
}

inline nlohmann::json config_json(const sweep::SweepConfig& cfg) {
    nlohmann::json q = nlohmann::json::array();
    for (auto v : cfg.quantities) q.push_back(sweep::to_string(v));
    const auto range = [](const sweep::AxisRange& r) {
        return nlohmann::json{{"min", r.min}, {"max", r.max}, {"count", r.count}};
    };
    return {{"omega", cfg.omega},
            {"omega0", cfg.omega0},
            {"x", range(cfg.xRange)},
            {"y", range(cfg.yRange)},
            {"slices", cfg.slices},
            {"quantities", q},
            {"format", cfg.outputFormat == sweep::OutputFormat::Csv ? "csv" : "json"},
            {"goldstone_epsilon", cfg.goldstoneEpsilon},
            {"threads", cfg.threads}};
}

inline nlohmann::json sweep_json(const sweep::SweepConfig& cfg, const std::vector<sweep::SweepRow>& rows) {
    const auto& cols = sweep_columns();
    nlohmann::json out;
    out["config"] = config_json(cfg);
    out["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row{{"lambda_x", r.lambdaX},
                           {"lambda_y", r.lambdaY},
                           {"goldstone_offset", r.goldstoneOffset},
                           {"diverged", r.diverged},
                           {"status", r.status}};
        const auto cells = detail::numeric_cells(cfg, r);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            row[cols[5 + i]] = cells[i] ? number_json(*cells[i]) : nlohmann::json(nullptr);
        }
        out["rows"].push_back(std::move(row));
    }
    return out;
}

inline void write_oracle_csv(std::ostream& os, const std::vector<sweep::OracleCompareRow>& rows) {
    os << "j,e0_per_spin,e_gs,delta_e,max_cm_deviation,converged_cutoff,field_independent,dimension\n";
    for (const auto& r : rows) {
        os << format_number(r.j) << ',' << format_number(r.e0PerSpin) << ',' << format_number(r.eGS) << ','
           << format_number(r.deltaE) << ',' << format_number(r.maxCmDeviation) << ',' << (r.convergedCutoff ? 1 : 0)
           << ',' << (r.fieldIndependent ? 1 : 0) << ',' << r.dimension << '\n';
    }
}

inline nlohmann::json oracle_json(const model::ModelParams& p, const std::vector<sweep::OracleCompareRow>& rows) {
    nlohmann::json out;
    out["params"] = {{"omega", p.omega}, {"omega0", p.omega0}, {"lambda_x", p.lambdaX}, {"lambda_y", p.lambdaY}};
    out["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        out["rows"].push_back({{"j", r.j},
                               {"e0_per_spin", r.e0PerSpin},
                               {"e_gs", r.eGS},
                               {"delta_e", r.deltaE},
                               {"max_cm_deviation", r.maxCmDeviation},
                               {"converged_cutoff", r.convergedCutoff},
                               {"field_independent", r.fieldIndependent},
                               {"dimension", r.dimension}});
    }
    return out;
}

/// Correlation fields under the same keys as a sweep row.
inline nlohmann::json report_json(const info::CorrelationReport& q) {
    const auto opt = [](const std::optional<double>& v) { return v ? number_json(*v) : nlohmann::json(nullptr); };
    return {{"S_x", number_json(q.sX)},       {"S_y", number_json(q.sY)},       {"S_j", number_json(q.sJ)},
            {"S_xy", number_json(q.sXY)},     {"S_xj", number_json(q.sXJ)},     {"S_yj", number_json(q.sYJ)},
            {"I_xy_j", number_json(q.iXY_J)}, {"I_xj_y", number_json(q.iXJ_Y)}, {"I_yj_x", number_json(q.iYJ_X)},
            {"I_x_y", number_json(q.iX_Y)},   {"I_x_j", number_json(q.iX_J)},   {"I_y_j", number_json(q.iY_J)},
            {"E_x_j", opt(q.eX_J)},           {"E_y_j", opt(q.eY_J)},           {"E_x_y", opt(q.eX_Y)},
            {"E3_x_y_j", opt(q.tripartiteXYJ)}, {"E3_j_y_x", opt(q.tripartiteJYX)}, {"diverged", q.diverged}};
}

/// Finite-size result with its correlation report, keyed like a sweep row for side-by-side use.
inline nlohmann::json finite_size_json(const oracle::FiniteSizeResult& r) {
    // Same keys either way; a finite-j spin block can dip just below the uncertainty bound, in which
    // case the correlation fields are null and status carries the reason.
    nlohmann::json out = report_json({});
    for (auto& [key, value] : out.items()) {
        if (key != "diverged") value = nullptr;
    }
    out["status"] = "ok";
    try {
        const auto report = report_json(info::correlation_report(
            info::CovarianceMatrix({info::Mode::x, info::Mode::y, info::Mode::j}, r.quadratureCM)));
        out.update(report);
    } catch (const Error& e) {
        out["status"] = std::string(to_string(e.code()));
    }
    nlohmann::json cm = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.quadratureCM.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index k = 0; k < r.quadratureCM.cols(); ++k) row.push_back(r.quadratureCM(i, k));
        cm.push_back(row);
    }
    out["e0_per_spin"] = r.groundEnergyPerSpin;
    out["quadrature_cm"] = cm;
    out["converged_cutoff"] = r.convergedCutoff;
    out["field_independent"] = r.fieldIndependent;
    out["dimension"] = r.dimension;
    return out;
}

} // namespace dicke::io
