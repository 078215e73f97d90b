#pragma once

// Command-line front end. Every subcommand builds one report envelope
//
//   {"schema_version", "command", "parameters", "results", "warnings"}
//
// and writes it as a single line of JSON (or a CSV projection of its scalar
// fields). Doubles are written with 17 significant digits and non-finite values
// as null, so identical arguments give byte-identical output.
//
// Exit codes: 0 success, 2 invalid parameters (message on the error stream,
// nothing on the output stream), 3 overflow or convergence failure.

#include "qdho/qdho.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace qdho::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "qdho.report.v1";

// ---------------------------------------------------------------------------
// Serialization

inline std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    if (v == 0.0) return "0";  // folds -0 into 0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_json(const Json& j, std::string& out) {
    switch (j.type()) {
        case Json::value_t::object: {
            out += '{';
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ',';
                first = false;
                out += Json(key).dump();
                out += ':';
                write_json(value, out);
            }
            out += '}';
            return;
        }
        case Json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                write_json(j[i], out);
            }
            out += ']';
            return;
        }
        case Json::value_t::number_float: out += format_double(j.get<double>()); return;
        default: out += j.dump(); return;
    }
}

inline std::string to_json_line(const Json& j) {
    std::string s;
    write_json(j, s);
    return s;
}

/// Scalar leaves of nested objects as (dotted.key, rendered value); arrays are skipped.
inline void flatten_scalars(const Json& j, const std::string& prefix,
                            std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items())
            flatten_scalars(value, prefix.empty() ? key : prefix + "." + key, out);
        return;
    }
    if (j.is_array()) return;
    std::string v;
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) {
            v = s;
        } else {
            v = "\"";
            for (char c : s) v += (c == '"') ? std::string("\"\"") : std::string(1, c);
            v += '"';
        }
    } else if (j.is_null()) {
        v = "";
    } else {
        write_json(j, v);
    }
    out.emplace_back(prefix, v);
}

inline std::vector<std::pair<std::string, std::string>> csv_fields(const Json& envelope) {
    std::vector<std::pair<std::string, std::string>> f;
    f.emplace_back("command", envelope["command"].get<std::string>());
    flatten_scalars(envelope["parameters"], "parameters", f);
    flatten_scalars(envelope["results"], "results", f);
    f.emplace_back("warnings", std::to_string(envelope["warnings"].size()));
    return f;
}

inline std::string csv_line(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
    }
    return s;
}

// ---------------------------------------------------------------------------
// Options

struct Options {
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> q;
    std::optional<int> dim;
    int levels = 10;
    int degree = 5;
    std::string format = "json";
    std::vector<std::string> grids;
    std::vector<std::string> params;
    double probe_re = 0.0;
    double probe_im = 1.0;
    int terms = 200;
    std::string family = "P";
    double x = 0.5;
    std::string kind = "normal";
    int l = 1;
    int r = 1;
    int n = 2;
    std::optional<int> m;
    double j = 1.0;
    int points = 401;
    int refinements = 3;
    double half_width = 10.0;
    int threads = 0;
    std::string command;
};

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"frame", "spectrum", "operators", "selfadjoint", "polys",
                                                "matelem", "su2", "xrep", "sweep"};
    return names;
}

/// Options that a sweep may vary.
inline double* real_parameter(Options& o, const std::string& name) {
    if (name == "x") return &o.x;
    if (name == "probe-re") return &o.probe_re;
    if (name == "probe-im") return &o.probe_im;
    if (name == "j") return &o.j;
    if (name == "half-width") return &o.half_width;
    return nullptr;
}

inline int* integer_parameter(Options& o, const std::string& name) {
    if (name == "levels") return &o.levels;
    if (name == "degree") return &o.degree;
    if (name == "terms") return &o.terms;
    if (name == "l") return &o.l;
    if (name == "r") return &o.r;
    if (name == "n") return &o.n;
    if (name == "points") return &o.points;
    if (name == "refinements") return &o.refinements;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Helpers shared by the subcommands

struct Report {
    Json parameters = Json::object();
    Json results = Json::object();
    std::vector<std::string> warnings;
};

inline Json complex_json(std::complex<double> z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json vector_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

inline Json matrix_json(const TruncatedOperator& op) {
    Json re = Json::array();
    Json im = Json::array();
    for (int i = 0; i < op.dim(); ++i) {
        Json rr = Json::array();
        Json ri = Json::array();
        for (int k = 0; k < op.dim(); ++k) {
            rr.push_back(op(i, k).real());
            ri.push_back(op(i, k).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    return Json{{"label", std::string(to_string(op.label()))}, {"dim", op.dim()}, {"re", re}, {"im", im}};
}

inline bool has_frame(const Options& o) { return o.alpha.has_value() || o.beta.has_value(); }

inline DeformedFrame require_frame(const Options& o, Report& rep) {
    if (o.q) throw DomainError("this command needs --alpha and --beta, not --q");
    if (!o.alpha || !o.beta) throw DomainError("--alpha and --beta are both required");
    rep.parameters["alpha"] = *o.alpha;
    rep.parameters["beta"] = *o.beta;
    return derive_frame(*o.alpha, *o.beta);
}

/// q from --q, or from --alpha/--beta (in which case the frame is returned too).
inline std::pair<QContext, std::optional<DeformedFrame>> require_q(const Options& o, Report& rep) {
    if (o.q) {
        if (has_frame(o)) throw DomainError("--q excludes --alpha and --beta");
        rep.parameters["q"] = *o.q;
        return {QContext(*o.q), std::nullopt};
    }
    const auto f = require_frame(o, rep);
    return {QContext(f), f};
}

inline int require_positive(int v, const char* name, int minimum = 1) {
    if (v < minimum)
        throw DomainError(std::string("--") + name + " must be >= " + std::to_string(minimum));
    return v;
}

// ---------------------------------------------------------------------------
// Subcommands

inline void cmd_frame(const Options& o, Report& rep) {
    if (o.q) {
        if (has_frame(o)) throw DomainError("--q excludes --alpha and --beta");
        const QContext ctx(*o.q);
        rep.parameters["q"] = *o.q;
        rep.results["q"] = ctx.q();
        rep.results["s"] = (ctx.q() - 1.0) / (ctx.q() + 1.0);
        rep.results["undeformed"] = ctx.undeformed();
        rep.warnings.push_back("m_alpha and m_beta need --alpha and --beta");
        return;
    }
    const auto f = require_frame(o, rep);
    rep.results["alpha"] = f.alpha;
    rep.results["beta"] = f.beta;
    rep.results["s"] = std::sqrt(f.alpha * f.beta);
    rep.results["q"] = f.q;
    rep.results["m_alpha"] = f.m_alpha;
    rep.results["m_beta"] = f.m_beta;
    rep.results["m_alpha_m_beta"] = f.m_alpha * f.m_beta;
    rep.results["undeformed"] = QContext(f).undeformed();
}

inline void cmd_spectrum(const Options& o, Report& rep) {
    const auto [ctx, frame] = require_q(o, rep);
    const int levels = require_positive(o.levels, "levels", 0);
    const int dim = o.dim.value_or(std::max(2 * (levels + 1), levels + 16));
    require_positive(dim, "dim", levels + 2);
    rep.parameters["levels"] = levels;
    rep.parameters["dim"] = dim;

    const auto h = build_hamiltonian(ctx, dim);
    std::optional<std::vector<double>> quadratic;
    if (frame) {
        const auto x = build_position(*frame, dim).entries();
        const auto p = build_momentum(*frame, dim).entries();
        const Eigen::MatrixXcd k = 0.5 * (frame->m_alpha * frame->m_alpha * (x * x) +
                                          frame->m_beta * frame->m_beta * (p * p));
        quadratic = dense_hermitian_eigenvalues(TruncatedOperator(OperatorLabel::hamiltonian, k));
    }

    Json table = Json::array();
    double worst_ratio_gap = 0.0;
    for (int n = 0; n <= levels; ++n) {
        const double e = energy_level(n, ctx);
        Json row{{"n", n}, {"E", e}, {"hamiltonian_half_diagonal_delta", 0.5 * h(n, n).real() - e}};
        if (quadratic) {
            row["quadratic_eigenvalue"] = (*quadratic)[n];
            row["quadratic_eigenvalue_delta"] = (*quadratic)[n] - e;
            worst_ratio_gap = std::max(worst_ratio_gap, std::abs((*quadratic)[n] / e - 2.0));
        }
        table.push_back(std::move(row));
    }
    rep.results["levels"] = table;
    rep.results["E_max_level"] = energy_level(levels, ctx);
    rep.results["undeformed_delta_max_level"] = energy_level(levels, ctx) - (levels + 0.5);
    if (quadratic) {
        rep.results["quadratic_over_E_minus_two_max"] = worst_ratio_gap;
        rep.warnings.push_back("eigenvalues of (m_alpha^2 X^2 + m_beta^2 P^2)/2 equal [n]_q + [n+1]_q = 2 E_n");
    }
}

inline void cmd_operators(const Options& o, Report& rep) {
    const auto [ctx, frame] = require_q(o, rep);
    const int dim = require_positive(o.dim.value_or(6), "dim", 2);
    rep.parameters["dim"] = dim;

    Json ops = Json::array();
    const auto [b, bt] = build_ladder(dim, ctx);
    ops.push_back(matrix_json(b));
    ops.push_back(matrix_json(bt));
    if (frame) {
        ops.push_back(matrix_json(build_position(*frame, dim)));
        ops.push_back(matrix_json(build_momentum(*frame, dim)));
    }
    ops.push_back(matrix_json(build_hamiltonian(ctx, dim)));
    if (frame) ops.push_back(matrix_json(build_theta(*frame, dim)));
    rep.results["operators"] = ops;

    const auto comm = commutator_residual(ctx, dim);
    rep.results["commutator_interior_max"] = interior_max_abs(comm, dim - 2);
    rep.results["commutator_corner"] = comm(dim - 1, dim - 1).real();
    rep.results["commutator_corner_expected"] = -ctx.q() * q_number(dim - 1, ctx) - 1.0;
    if (frame) {
        rep.results["theta_identity_interior_max"] = interior_max_abs(theta_identity_residual(*frame, dim), dim - 2);
    } else {
        rep.warnings.push_back("position, momentum and theta need --alpha and --beta");
    }
}

inline void cmd_selfadjoint(const Options& o, Report& rep) {
    const auto frame = require_frame(o, rep);
    const int terms = require_positive(o.terms, "terms", 10);
    rep.parameters["terms"] = terms;
    rep.parameters["probe_re"] = o.probe_re;
    rep.parameters["probe_im"] = o.probe_im;
    const auto d = deficiency_diagnostics(frame, terms, {o.probe_re, o.probe_im});
    rep.results["q"] = frame.q;
    rep.results["ratio_limit_target"] = d.ratio_limit_target;
    rep.results["ratio_last"] = d.ratio_estimates.back();
    rep.results["ratio_last_delta"] = d.ratio_estimates.back() - d.ratio_limit_target;
    rep.results["partial_sum_last"] = d.partial_sums.back();
    rep.results["log_concavity_ok"] = d.log_concavity_ok;
    rep.results["log_concavity_checked"] = d.log_concavity_checked;
    rep.results["min_log_concavity_gap"] = d.min_log_concavity_gap;
    rep.results["deficiency_norm_last"] = d.deficiency_vector_norms.back();
    rep.results["increment_pair_rate"] = d.increment_pair_rate;
    rep.results["increment_pair_rate_target"] = 1.0 / frame.q;
    rep.results["partial_sums"] = vector_json(d.partial_sums);
    rep.results["ratio_estimates"] = vector_json(d.ratio_estimates);
    rep.results["deficiency_vector_norms"] = vector_json(d.deficiency_vector_norms);
}

inline PolynomialFamily parse_family(const std::string& s) {
    if (s == "P") return PolynomialFamily::deficiency;
    if (s == "hermite-x") return PolynomialFamily::hermite_x;
    if (s == "hermite-p") return PolynomialFamily::hermite_p;
    throw DomainError("--family must be one of P, hermite-x, hermite-p");
}

inline void cmd_polys(const Options& o, Report& rep) {
    const auto family = parse_family(o.family);
    const auto [ctx, frame] = require_q(o, rep);
    const int degree = require_positive(o.degree, "degree", 0);
    rep.parameters["family"] = o.family;
    rep.parameters["degree"] = degree;
    rep.parameters["x"] = o.x;

    const RecurrencePolynomial poly{family, ctx, frame};
    rep.results["value"] = complex_json(poly.evaluate(degree, o.x));
    rep.results["coefficients"] = vector_json(poly.coefficients(degree));
    if (family == PolynomialFamily::deficiency) {
        const auto z = zeros(degree, ctx);
        rep.results["zeros"] = vector_json(z);
        double worst = 0.0;
        for (double v : z) worst = std::max(worst, std::abs(eval_P(degree, v, ctx)));
        rep.results["max_abs_value_at_zeros"] = worst;
        if (frame) {
            const auto bridge = relate_P_to_H(degree, o.x, *frame);
            rep.results["bridge"] = Json{{"lhs", complex_json(bridge.lhs)},
                                         {"rhs", complex_json(bridge.rhs)},
                                         {"gamma", complex_json(bridge.gamma)},
                                         {"abs_delta", std::abs(bridge.lhs - bridge.rhs)}};
        }
    } else {
        rep.results["zeros"] = nullptr;
        rep.warnings.push_back("zeros are reported for the P family only");
    }
}

inline ElementKind parse_kind(const std::string& s) {
    if (s == "normal") return ElementKind::normal_word;
    if (s == "antinormal") return ElementKind::antinormal_word;
    if (s == "xp") return ElementKind::normal_ordered_xp;
    throw DomainError("--kind must be one of normal, antinormal, xp");
}

inline void cmd_matelem(const Options& o, Report& rep) {
    const MatrixElementQuery query{parse_kind(o.kind), o.l, o.r, o.m.value_or(selected_row(o.l, o.r, o.n)), o.n};
    const auto [ctx, frame] = require_q(o, rep);
    rep.parameters["kind"] = o.kind;
    rep.parameters["l"] = query.l;
    rep.parameters["r"] = query.r;
    rep.parameters["m"] = query.m;
    rep.parameters["n"] = query.n;
    if (query.m < 0) throw DomainError("matrix elements require m >= 0");

    const auto closed = frame ? evaluate(query, *frame) : evaluate(query, ctx);
    std::complex<double> brute;
    if (frame) {
        brute = oracle::evaluate(query, *frame).value;
    } else {
        brute = oracle::ladder_word_by_matrices(query.kind, query.l, query.r, query.m, query.n, ctx);
    }
    rep.results["value"] = complex_json(closed.value);
    rep.results["provenance"] = to_string(closed.provenance);
    rep.results["selected_row"] = selected_row(query.l, query.r, query.n);
    rep.results["oracle_value"] = complex_json(brute);
    rep.results["oracle_abs_delta"] = std::abs(closed.value - brute);
    const double scale = std::max(std::abs(brute), std::abs(closed.value));
    rep.results["oracle_rel_delta"] = scale > 0.0 ? std::abs(closed.value - brute) / scale : 0.0;
}

inline void cmd_su2(const Options& o, Report& rep) {
    if (o.q || o.beta) throw DomainError("su2 takes --j and --alpha (grid step) only");
    if (!o.alpha) throw DomainError("--alpha (grid step) is required");
    rep.parameters["j"] = o.j;
    rep.parameters["alpha"] = *o.alpha;
    const auto rep2 = build_representation(o.j, *o.alpha);
    const auto& m = rep2.frame.m_values;
    Json residuals = Json::object();
    for (const auto& [k, v] : rep2.residuals) residuals[k] = v;
    rep.results["dim"] = static_cast<int>(m.size());
    rep.results["residuals"] = residuals;
    double worst = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k)
        worst = std::max(worst, std::abs(rep2.commutator_diagonal[k] - 2.0 * *o.alpha * m[k]));
    rep.results["commutator_diagonal_vs_2_alpha_m_max"] = worst;
    Json table = Json::array();
    for (std::size_t k = 0; k < m.size(); ++k) {
        const auto e = hamiltonian_eigenvalue_formula(o.j, m[k], *o.alpha);
        Json row{{"m", m[k]},
                 {"commutator_diagonal", rep2.commutator_diagonal[k]},
                 {"energy_formula", e.formula},
                 {"energy_representation", e.representation_route}};
        try {
            row["j2_formula"] = j2_eigenvalue_formula(o.j, m[k], *o.alpha);
        } catch (const DomainError&) {
            row["j2_formula"] = nullptr;
        }
        table.push_back(std::move(row));
    }
    rep.results["grid"] = table;
    if (rep2.residuals.at("R3") > 1e-12)
        rep.warnings.push_back("[J+, J-] differs from 2 alpha^-2 theta on this grid; see residuals.R3");
}

inline void cmd_xrep(const Options& o, Report& rep) {
    if (o.q) throw DomainError("xrep takes --alpha, not --q");
    if (!o.alpha) throw DomainError("--alpha is required");
    const double alpha = *o.alpha;
    const int refinements = require_positive(o.refinements, "refinements", 0);
    const int points = require_positive(o.points, "points", 8);
    if (!(o.half_width > 0.0)) throw DomainError("--half-width must be > 0");
    rep.parameters["alpha"] = alpha;
    rep.parameters["points"] = points;
    rep.parameters["refinements"] = refinements;
    rep.parameters["half_width"] = o.half_width;
    if (o.beta && *o.beta != 0.0) rep.warnings.push_back("xrep realizes beta = 0; --beta is ignored");

    const auto f = [](double x) { return std::complex<double>(std::exp(-0.5 * x * x), 0.0); };
    const auto g = [](double x) { return std::complex<double>(std::exp(-0.5 * (x - 0.5) * (x - 0.5)), 0.0); };
    Json table = Json::array();
    double previous = std::numeric_limits<double>::quiet_NaN();
    int n_points = points;
    for (int level = 0; level <= refinements; ++level) {
        const auto grid = symmetric_grid(o.half_width, n_points);
        const auto op = build_momentum_xrep(grid, alpha);
        const auto res = weighted_hermiticity_residual(op, sample(grid, f), sample(grid, g));
        table.push_back(Json{{"points", n_points},
                             {"h", grid.h},
                             {"residual", res.residual},
                             {"left", complex_json(res.left)},
                             {"right", complex_json(res.right)},
                             {"ratio_to_previous", previous / res.residual},
                             {"boundary_warning", res.boundary_warning}});
        if (res.boundary_warning) rep.warnings.push_back("test functions do not decay at the grid ends");
        previous = res.residual;
        n_points = 2 * n_points - 1;
    }
    rep.results["hermiticity"] = table;

    Json kernel = Json::array();
    double previous_error = std::numeric_limits<double>::quiet_NaN();
    for (double a : {1e-2, 1e-3, 1e-4}) {
        double worst = 0.0;
        for (int ix = -20; ix <= 20; ++ix)
            for (int ip = -20; ip <= 20; ++ip) {
                const double x = 0.1 * ix;
                const double p = 0.1 * ip;
                worst = std::max(worst, std::abs(kernel_phase(x, p, a) - p * x));
            }
        kernel.push_back(Json{{"alpha", a},
                              {"max_phase_error", worst},
                              {"ratio_to_previous", previous_error / worst}});
        previous_error = worst;
    }
    rep.results["kernel_limit"] = kernel;
}

// ---------------------------------------------------------------------------
// Dispatch

inline Json envelope(const std::string& command, Report&& rep, bool failed = false) {
    Json env = Json::object();
    env["schema_version"] = schema_version;
    env["command"] = command;
    env["parameters"] = std::move(rep.parameters);
    env["results"] = failed ? Json(nullptr) : std::move(rep.results);
    env["warnings"] = rep.warnings;
    return env;
}

inline void dispatch(const std::string& command, const Options& o, Report& rep) {
    if (command == "frame") return cmd_frame(o, rep);
    if (command == "spectrum") return cmd_spectrum(o, rep);
    if (command == "operators") return cmd_operators(o, rep);
    if (command == "selfadjoint") return cmd_selfadjoint(o, rep);
    if (command == "polys") return cmd_polys(o, rep);
    if (command == "matelem") return cmd_matelem(o, rep);
    if (command == "su2") return cmd_su2(o, rep);
    if (command == "xrep") return cmd_xrep(o, rep);
    throw DomainError("unknown command '" + command + "'");
}

struct GridAxis {
    std::string name;
    std::vector<double> values;
};

inline GridAxis parse_axis(const std::string& name, const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw DomainError("--grid must be min:max:points");
    double lo = 0, hi = 0;
    int count = 0;
    try {
        std::size_t used = 0;
        lo = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
        hi = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
        count = std::stoi(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    } catch (const std::logic_error&) {
        throw DomainError("--grid '" + text + "' is not min:max:points");
    }
    if (count < 1 || count > 100000) throw DomainError("--grid needs 1..100000 points");
    if (!(hi >= lo)) throw DomainError("--grid needs max >= min");
    GridAxis axis{name, {}};
    for (int i = 0; i < count; ++i)
        axis.values.push_back(count == 1 ? lo : (i + 1 == count ? hi : lo + (hi - lo) * i / (count - 1)));
    return axis;
}

inline void set_parameter(Options& o, const std::string& name, double v) {
    if (name == "alpha") {
        o.alpha = v;
    } else if (name == "beta") {
        o.beta = v;
    } else if (name == "q") {
        o.q = v;
    } else if (name == "dim") {
        o.dim = static_cast<int>(std::lround(v));
    } else if (name == "m") {
        o.m = static_cast<int>(std::lround(v));
    } else if (double* d = real_parameter(o, name)) {
        *d = v;
    } else if (int* i = integer_parameter(o, name)) {
        *i = static_cast<int>(std::lround(v));
    } else {
        throw DomainError("--param '" + name + "' cannot be swept");
    }
}

/// One envelope per grid point of the cartesian product, first axis outermost.
inline std::vector<Json> run_sweep(const Options& o) {
    if (o.command.empty() || o.command == "sweep") throw DomainError("sweep needs --command <subcommand>");
    if (std::find(subcommands().begin(), subcommands().end(), o.command) == subcommands().end())
        throw DomainError("unknown --command '" + o.command + "'");
    if (o.params.empty() || o.params.size() != o.grids.size())
        throw DomainError("sweep needs matching --param NAME --grid min:max:points pairs");

    std::vector<GridAxis> axes;
    std::size_t total = 1;
    for (std::size_t a = 0; a < o.params.size(); ++a) {
        axes.push_back(parse_axis(o.params[a], o.grids[a]));
        total *= axes.back().values.size();
        if (total > 1000000) throw DomainError("sweep grid larger than 10^6 points");
        Options probe = o;
        set_parameter(probe, o.params[a], axes.back().values.front());
    }
    for (std::size_t a = 0; a < axes.size(); ++a)
        for (std::size_t b = a + 1; b < axes.size(); ++b)
            if (axes[a].name == axes[b].name) throw DomainError("--param '" + axes[a].name + "' given twice");

    std::vector<Json> out(total);
    const auto work = [&](std::size_t index) {
        Options point = o;
        std::size_t rest = index;
        std::vector<double> coords(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            coords[a] = axes[a].values[rest % axes[a].values.size()];
            rest /= axes[a].values.size();
        }
        Report rep;
        for (std::size_t a = 0; a < axes.size(); ++a) set_parameter(point, axes[a].name, coords[a]);
        bool failed = false;
        try {
            dispatch(o.command, point, rep);
        } catch (const DomainError& e) {
            failed = true;
            rep.warnings.push_back(std::string("domain error: ") + e.what());
        } catch (const std::overflow_error& e) {
            failed = true;
            rep.warnings.push_back(std::string("overflow: ") + e.what());
        } catch (const ConvergenceError& e) {
            failed = true;
            rep.warnings.push_back(std::string("convergence failure: ") + e.what());
        }
        Json sweep = Json::object();
        for (std::size_t a = 0; a < axes.size(); ++a) sweep[axes[a].name] = coords[a];
        Json params = Json::object();
        params["sweep"] = std::move(sweep);
        for (auto& [k, v] : rep.parameters.items()) params[k] = v;
        rep.parameters = std::move(params);
        out[index] = envelope(o.command, std::move(rep), failed);
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_threads =
        std::min<std::size_t>(total, o.threads > 0 ? static_cast<std::size_t>(o.threads) : hw);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < total; i = next++) work(i);
        });
    for (auto& th : pool) th.join();
    return out;
}

inline void emit(const std::vector<Json>& envelopes, const std::string& format, std::ostream& out) {
    if (format == "json") {
        for (const auto& e : envelopes) out << to_json_line(e) << '\n';
        return;
    }
    // CSV: union of scalar columns in first-seen order, one row per envelope.
    std::vector<std::string> columns;
    std::vector<std::map<std::string, std::string>> rows;
    for (const auto& e : envelopes) {
        std::map<std::string, std::string> row;
        for (auto& [k, v] : csv_fields(e)) {
            if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
            row[k] = v;
        }
        rows.push_back(std::move(row));
    }
    out << csv_line(columns) << '\n';
    for (const auto& row : rows) {
        std::vector<std::string> cells;
        for (const auto& c : columns) {
            const auto it = row.find(c);
            cells.push_back(it == row.end() ? std::string() : it->second);
        }
        out << csv_line(cells) << '\n';
    }
}

inline void add_options(CLI::App& app, Options& o) {
    auto* alpha = app.add_option("--alpha", o.alpha, "position deformation alpha (su2: grid step)");
    auto* beta = app.add_option("--beta", o.beta, "momentum deformation beta");
    app.add_option("--q", o.q, "deformation q >= 1 (q-only commands)")->excludes(alpha)->excludes(beta);
    app.add_option("--dim", o.dim, "Fock truncation N");
    app.add_option("--levels", o.levels, "highest energy level");
    app.add_option("--degree", o.degree, "polynomial degree");
    app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--grid", o.grids, "sweep axis min:max:points (paired with --param)");
    app.add_option("--param", o.params, "swept parameter name");
    app.add_option("--probe-re", o.probe_re, "real part of the deficiency probe z");
    app.add_option("--probe-im", o.probe_im, "imaginary part of the deficiency probe z");
    app.add_option("--terms", o.terms, "number of deficiency terms");
    app.add_option("--family", o.family, "polynomial family: P, hermite-x, hermite-p");
    app.add_option("--x", o.x, "evaluation point");
    app.add_option("--kind", o.kind, "matrix element kind: normal, antinormal, xp");
    app.add_option("--l", o.l, "creator power / x power");
    app.add_option("--r", o.r, "annihilator power / p power");
    app.add_option("--n", o.n, "ket index");
    app.add_option("--m", o.m, "bra index (default: the selected row)");
    app.add_option("--j", o.j, "su2 spin j");
    app.add_option("--points", o.points, "xrep coarsest grid size");
    app.add_option("--refinements", o.refinements, "xrep grid halvings");
    app.add_option("--half-width", o.half_width, "xrep grid half width");
    app.add_option("--threads", o.threads, "sweep worker threads (0: hardware)");
    app.add_option("--command", o.command, "subcommand mapped by sweep");
}

/// Runs one invocation; args exclude the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"q-deformed oscillator reports", "qdho"};
    app.require_subcommand(1);
    app.fallthrough();
    add_options(app, o);
    for (const auto& name : subcommands()) app.add_subcommand(name);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        std::vector<Json> envelopes;
        if (command == "sweep") {
            envelopes = run_sweep(o);
        } else {
            if (!o.params.empty() || !o.grids.empty()) throw DomainError("--param/--grid belong to sweep");
            Report rep;
            dispatch(command, o, rep);
            envelopes.push_back(envelope(command, std::move(rep)));
        }
        std::ostringstream buffer;
        emit(envelopes, o.format, buffer);
        out << buffer.str();
        return 0;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::overflow_error& e) {
        err << "overflow: " << e.what() << '\n';
        return 3;
    } catch (const ConvergenceError& e) {
        err << "convergence failure: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace qdho::cli
