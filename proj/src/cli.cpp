#include "stripemb/cli.hpp"

#include "stripemb/domain.hpp"
#include "stripemb/eigensolve.hpp"
#include "stripemb/errors.hpp"
#include "stripemb/extremal.hpp"
#include "stripemb/noncompact.hpp"
#include "stripemb/ptrig.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace stripemb::cli {

using nlohmann::ordered_json;

namespace {

struct Failure {
    ExitCode code;
    std::string message;
};

std::string fmt(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

std::string fmt_fixed(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 3);
    return {buf, res.ptr};
}

ordered_json intervals_json(const std::vector<Interval>& iv) {
    ordered_json a = ordered_json::array();
    for (const Interval& i : iv) {
        a.push_back({i.lo, i.hi});
    }
    return a;
}

// Rejects non-finite numbers before they reach the JSON writer, which
// would otherwise print null.
void require_finite(const ordered_json& j, const std::string& where = "") {
    if (j.is_number_float() && !std::isfinite(j.get<double>())) {
        throw ConvergenceError("non-finite value in output field " + where, 0.0);
    }
    if (j.is_structured()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            require_finite(*it, j.is_object() ? it.key() : where);
        }
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw DomainError("cannot open " + path + " for writing");
    }
    f << text;
    if (!f) {
        throw DomainError("failed writing " + path);
    }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    std::string text;
    for (std::size_t c = 0; c < header.size(); ++c) {
        text += (c ? "," : "") + header[c];
    }
    text += '\n';
    for (std::size_t r = 0; r < columns.front().size(); ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            text += (c ? "," : "") + fmt(columns[c][r]);
        }
        text += '\n';
    }
    write_file(path, text);
}

// One polyline with a bounding frame and the data range as labels.
void write_svg(const std::string& path, const std::string& title, const std::vector<double>& xs,
               const std::vector<double>& ys) {
    constexpr double width = 640, height = 400, margin = 40;
    const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
    const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
    const double x0 = *xmin_it;
    const double xspan = std::max(*xmax_it - x0, 1e-300);
    const double y0 = *ymin_it;
    const double yspan = std::max(*ymax_it - y0, 1e-300);
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    s += "<rect x=\"40\" y=\"40\" width=\"560\" height=\"320\" fill=\"none\" stroke=\"#888\"/>\n";
    s += "<text x=\"40\" y=\"28\" font-family=\"sans-serif\" font-size=\"14\">" + title + "</text>\n";
    s += "<text x=\"40\" y=\"378\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(x0) + "</text>\n";
    s += "<text x=\"600\" y=\"378\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
         fmt(*xmax_it) + "</text>\n";
    s += "<text x=\"36\" y=\"360\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + fmt(y0) +
         "</text>\n";
    s += "<text x=\"36\" y=\"44\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
         fmt(*ymax_it) + "</text>\n";
    s += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double px = margin + (xs[i] - x0) / xspan * (width - 2 * margin);
        const double py = height - margin - (ys[i] - y0) / yspan * (height - 2 * margin);
        s += (i ? " " : "") + fmt_fixed(px) + "," + fmt_fixed(py);
    }
    s += "\"/>\n</svg>\n";
    write_file(path, s);
}

StripDomain strip_domain(const RunConfig& c) {
    if (c.free_axes == 0 && c.intervals.empty()) {
        throw DomainError("domain needs --free k and/or at least one --interval a:b");
    }
    return StripDomain(c.free_axes, c.intervals);
}

double require_l(const RunConfig& c) {
    if (!c.l) {
        throw DomainError("--l is required for a domain with free axes");
    }
    return *c.l;
}

void reject_plots(const RunConfig& c) {
    if (!c.csv.empty() || !c.svg.empty()) {
        throw DomainError("--csv and --svg are only available for sinp-table and eigen");
    }
}

ordered_json domain_input(const RunConfig& c) {
    return {{"free", c.free_axes}, {"intervals", intervals_json(c.intervals)}};
}

struct Output {
    ordered_json input = ordered_json::object();
    ordered_json result = ordered_json::object();
    ordered_json error_estimates = ordered_json::object();
    ExitCode code = ExitCode::ok;
    std::string message;
};

Output cmd_pi(const RunConfig& c) {
    Output o;
    const PExponent p = PExponent::checked(c.p);
    const double quad = pi_p_quadrature(c.p);
    o.result["pi_p"] = p.pi_p();
    o.result["pi_p_quadrature"] = quad;
    o.error_estimates["quadrature_closed_diff"] = std::abs(quad - p.pi_p());
    return o;
}

Output cmd_sinp_table(const RunConfig& c) {
    Output o;
    if (c.points < 2) {
        throw DomainError("--points must be at least 2");
    }
    const PExponent p = PExponent::checked(c.p);
    o.input["points"] = c.points;
    std::vector<double> xs(c.points), ss(c.points), cs(c.points);
    double identity = 0.0;
    for (std::size_t i = 0; i < c.points; ++i) {
        xs[i] = 2.0 * p.pi_p() * static_cast<double>(i) / static_cast<double>(c.points - 1);
        const SinCosP sc = sincos_p(p, xs[i]);
        ss[i] = sc.sin;
        cs[i] = sc.cos;
        identity = std::max(identity, std::abs(std::pow(std::abs(sc.sin), c.p) + std::pow(std::abs(sc.cos), c.p) - 1.0));
    }
    o.result["pi_p"] = p.pi_p();
    o.result["x"] = xs;
    o.result["sin_p"] = ss;
    o.result["cos_p"] = cs;
    o.error_estimates["max_identity_residual"] = identity;
    if (!c.csv.empty()) {
        write_csv(c.csv, {"x", "sin_p", "cos_p"}, {xs, ss, cs});
    }
    if (!c.svg.empty()) {
        write_svg(c.svg, "sin_p, p = " + fmt(c.p), xs, ss);
    }
    return o;
}

Output cmd_norm(const RunConfig& c) {
    reject_plots(c);
    Output o;
    const PExponent p = PExponent::checked(c.p);
    const StripDomain d = strip_domain(c);
    o.input["domain"] = domain_input(c);
    const EmbeddingConstants e = embedding_norm(p, d);
    o.result["lambda"] = e.lambda;
    o.result["norm"] = e.norm;
    o.result["pi_p"] = p.pi_p();
    o.error_estimates["pi_p_quadrature_diff"] = std::abs(pi_p_quadrature(c.p) - p.pi_p());
    return o;
}

Output cmd_rayleigh(const RunConfig& c) {
    reject_plots(c);
    Output o;
    const PExponent p = PExponent::checked(c.p);
    const StripDomain d = strip_domain(c);
    const int res = c.resolution.value_or(32);
    o.input["domain"] = domain_input(c);
    o.input["resolution"] = res;
    const double lambda = lambda_closed_form(p, d);
    RayleighReport r;
    double closed_gap = 0.0;
    if (d.free_axes() == 0) {
        r = rayleigh(rectangle_maximizer(p, d.bounded()), d.bounded(), p, res);
    } else {
        const double l = require_l(c);
        o.input["l"] = l;
        r = rayleigh(strip_trial(p, d, l), strip_box(d, l), p, res);
        closed_gap = std::pow(p.pi_p(), c.p) * (c.p - 1.0) * static_cast<double>(d.free_axes()) / std::pow(l, c.p);
    }
    o.result["quotient"] = r.quotient;
    o.result["grad_norm_p"] = r.grad_norm_p;
    o.result["func_norm_p"] = r.func_norm_p;
    o.result["lambda"] = lambda;
    o.result["gap"] = r.quotient - lambda;
    o.result["closed_gap"] = closed_gap;
    o.error_estimates["quad_error"] = r.quad_error;
    o.error_estimates["gap_diff"] = std::abs(r.quotient - lambda - closed_gap);
    return o;
}

Output cmd_verify_ul(const RunConfig& c) {
    reject_plots(c);
    Output o;
    const PExponent p = PExponent::checked(c.p);
    const StripDomain d = strip_domain(c);
    const double l = require_l(c);
    const int res = c.resolution.value_or(32);
    const double tol = c.tol.value_or(1e-7);
    o.input["domain"] = domain_input(c);
    o.input["l"] = l;
    o.input["resolution"] = res;
    o.input["tol"] = tol;
    const UlNormReport r = verify_ul_norms(p, d, l, res);
    const double func_rel = r.func_diff / r.closed_form.func_norm_p;
    const double grad_rel = r.grad_diff / r.closed_form.grad_norm_p;
    const bool passed = func_rel <= tol && grad_rel <= tol;
    o.result["func_norm_p"] = r.quadrature.func_norm_p;
    o.result["grad_norm_p"] = r.quadrature.grad_norm_p;
    o.result["func_norm_p_closed"] = r.closed_form.func_norm_p;
    o.result["grad_norm_p_closed"] = r.closed_form.grad_norm_p;
    o.result["quotient"] = r.quotient;
    o.result["quotient_closed"] = r.closed_quotient;
    o.result["passed"] = passed;
    o.error_estimates["func_rel_diff"] = func_rel;
    o.error_estimates["grad_rel_diff"] = grad_rel;
    o.error_estimates["quad_error"] = r.quad_error;
    if (!passed) {
        o.code = ExitCode::certification;
        o.message = "closed-form norms not matched within tolerance";
    }
    return o;
}

Output cmd_eigen(const RunConfig& c) {
    Output o;
    const PExponent p = PExponent::checked(c.p);
    if (c.rect.empty()) {
        throw DomainError("eigen needs at least one --rect a:b");
    }
    std::vector<std::size_t> shape = c.grid;
    if (shape.empty()) {
        shape.assign(c.rect.size(), 63);
    } else if (shape.size() == 1) {
        shape.assign(c.rect.size(), c.grid.front());
    } else if (shape.size() != c.rect.size()) {
        throw DomainError("--grid must be given once or once per --rect axis");
    }
    EigenOptions opt;
    opt.tol = c.tol.value_or(1e-10);
    opt.max_iter = c.max_iter;
    o.input["rect"] = intervals_json(c.rect);
    o.input["grid"] = shape;
    o.input["tol"] = opt.tol;
    o.input["max_iter"] = opt.max_iter;
    const Rectangle box(c.rect);
    const EigenResult r = first_eigenpair(p, box, shape, opt);
    const double closed = lambda_closed_form(p, StripDomain(0, c.rect));
    o.result["lambda_h"] = r.lambda_h;
    o.result["lambda_closed"] = closed;
    o.result["abs_diff"] = std::abs(r.lambda_h - closed);
    o.result["rel_diff"] = std::abs(r.lambda_h - closed) / closed;
    o.result["iterations"] = r.iterations;
    o.error_estimates["residual"] = r.residual;
    o.error_estimates["eigenfunction_error"] = eigenfunction_error(r, p);
    std::vector<double> it(r.trace.size());
    for (std::size_t i = 0; i < it.size(); ++i) {
        it[i] = static_cast<double>(i);
    }
    if (!c.csv.empty()) {
        write_csv(c.csv, {"iteration", "quotient"}, {it, r.trace});
    }
    if (!c.svg.empty()) {
        std::vector<double> gap(r.trace.size());
        for (std::size_t i = 0; i < gap.size(); ++i) {
            gap[i] = std::log10(std::max(r.trace[i] - r.lambda_h, 1e-300) / r.lambda_h + 1e-16);
        }
        write_svg(c.svg, "log10 relative quotient gap", it, gap);
    }
    return o;
}

Output cmd_certify(const RunConfig& c) {
    reject_plots(c);
    Output o;
    const PExponent p = PExponent::checked(c.p);
    const StripDomain d = strip_domain(c);
    const double l = require_l(c);
    const int res = c.resolution.value_or(8);
    const double tol = c.tol.value_or(1e-6);
    o.input["domain"] = domain_input(c);
    o.input["l"] = l;
    o.input["m"] = c.m;
    o.input["resolution"] = res;
    o.input["trials"] = c.trials;
    o.input["tol"] = tol;
    o.input["seed"] = c.seed;
    const TranslateSystem ts = build_translates(p, d, l, c.m, res);
    const OperatorCertificate cert = certify_isomorphism_bound(ts, c.trials, tol, c.seed);
    const double norm = embedding_norm(p, d).norm;
    o.result["lower_bound"] = cert.lower_bound;
    o.result["norm"] = norm;
    o.result["gap"] = norm - cert.lower_bound;
    o.result["raw_w_norm"] = ts.raw_w_norm;
    o.error_estimates["b_isometry_dev"] = cert.b_isometry_dev;
    o.error_estimates["a_bound_dev"] = cert.a_bound_dev;
    o.error_estimates["aib_identity_dev"] = cert.aib_identity_dev;
    return o;
}

Output cmd_refute(const RunConfig& c) {
    reject_plots(c);
    Output o;
    const PExponent p = PExponent::checked(c.p);
    const StripDomain d = strip_domain(c);
    const double l = require_l(c);
    const int res = c.resolution.value_or(8);
    o.input["domain"] = domain_input(c);
    o.input["l"] = l;
    o.input["radius"] = c.radius;
    o.input["rtilde"] = c.rtilde;
    o.input["centers"] = c.centers;
    o.input["extent"] = c.extent;
    o.input["resolution"] = res;
    o.input["seed"] = c.seed;
    if (!(c.extent > 0.0)) {
        throw DomainError("--extent must be positive");
    }
    const NetCandidate net = random_bump_net(d, c.centers, c.extent, c.radius, c.seed);
    const Refutation r = refute_net(p, d, l, net, c.rtilde, res);
    o.result["refutes"] = r.refutes;
    o.result["translation"] = r.translation;
    o.result["witness_lp_norm"] = r.witness_lp_norm;
    o.result["margins"] = r.margins;
    o.result["margins_fine"] = r.margins_fine;
    o.result["min_margin"] = r.min_margin;
    double spread = 0.0;
    for (std::size_t i = 0; i < r.margins.size(); ++i) {
        spread = std::max(spread, std::abs(r.margins[i] - r.margins_fine[i]));
    }
    o.error_estimates["margin_resolution_diff"] = spread;
    if (!r.refutes) {
        o.code = ExitCode::certification;
        o.message = "net not refuted: some margin is at most the radius";
    }
    return o;
}

Output dispatch(const RunConfig& c) {
    if (c.command == "pi") return cmd_pi(c);
    if (c.command == "sinp-table") return cmd_sinp_table(c);
    if (c.command == "norm") return cmd_norm(c);
    if (c.command == "rayleigh") return cmd_rayleigh(c);
    if (c.command == "verify-ul") return cmd_verify_ul(c);
    if (c.command == "eigen") return cmd_eigen(c);
    if (c.command == "certify") return cmd_certify(c);
    if (c.command == "refute") return cmd_refute(c);
    throw DomainError("unknown command '" + c.command + "'");
}

}  // namespace

Interval parse_interval(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw DomainError("interval '" + text + "' must have the form a:b");
    }
    auto parse = [&](std::string_view part) {
        double v = 0.0;
        const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
        if (res.ec != std::errc() || res.ptr != part.data() + part.size() || !std::isfinite(v)) {
            throw DomainError("interval '" + text + "' has a malformed endpoint");
        }
        return v;
    };
    const std::string_view sv(text);
    const Interval iv{parse(sv.substr(0, colon)), parse(sv.substr(colon + 1))};
    if (!(iv.lo < iv.hi)) {
        throw DomainError("interval '" + text + "' must satisfy a < b");
    }
    return iv;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        Output o = dispatch(config);
        ordered_json input = {{"command", config.command}, {"p", config.p}};
        input.update(o.input);
        ordered_json doc = {
            {"input", input},
            {"result", o.result},
            {"error_estimates", o.error_estimates},
            {"meta",
             {{"program", "stripemb"},
              {"version", kVersion},
              {"schema_version", kSchemaVersion},
              {"json_library",
               std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                   "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"exit_code", static_cast<int>(o.code)}}},
        };
        require_finite(doc);
        const std::string text = doc.dump(2) + "\n";
        if (config.output.empty()) {
            out << text;
        } else {
            write_file(config.output, text);
        }
        if (o.code != ExitCode::ok) {
            err << "error: " << o.message << '\n';
        }
        return static_cast<int>(o.code);
    } catch (const CertificationError& e) {
        err << "certification failed (" << e.check() << "): " << e.what() << '\n';
        return static_cast<int>(ExitCode::certification);
    } catch (const ConvergenceError& e) {
        err << "no convergence: " << e.what() << '\n';
        return static_cast<int>(ExitCode::convergence);
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return static_cast<int>(ExitCode::validation);
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sobolev embedding constants on strip domains"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(kVersion));

    RunConfig c;
    std::vector<std::string> intervals, rects;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--p", c.p, "exponent p > 1")->required();
        sub->add_option("--output", c.output, "write JSON here instead of stdout");
    };
    auto domain = [&](CLI::App* sub) {
        sub->add_option("--free", c.free_axes, "number of unbounded axes k");
        sub->add_option("--interval", intervals, "bounded axis a:b, repeatable");
    };

    CLI::App* pi = app.add_subcommand("pi", "pi_p by closed form and by quadrature");
    common(pi);

    CLI::App* table = app.add_subcommand("sinp-table", "sin_p and cos_p on [0, 2 pi_p]");
    common(table);
    table->add_option("--points", c.points, "number of samples");
    table->add_option("--csv", c.csv, "write the table as CSV");
    table->add_option("--svg", c.svg, "plot sin_p as SVG");

    CLI::App* norm = app.add_subcommand("norm", "lambda and the embedding norm");
    common(norm);
    domain(norm);

    CLI::App* ray = app.add_subcommand("rayleigh", "Rayleigh quotient of u_l (or the rectangle maximizer)");
    common(ray);
    domain(ray);
    ray->add_option("--l", c.l, "half-width of the truncation on the free axes");
    ray->add_option("--resolution", c.resolution, "cells per sin_p half-period");

    CLI::App* ver = app.add_subcommand("verify-ul", "quadrature vs closed-form norms of u_l");
    common(ver);
    domain(ver);
    ver->add_option("--l", c.l)->required();
    ver->add_option("--resolution", c.resolution);
    ver->add_option("--tol", c.tol, "relative tolerance (default 1e-7)");

    CLI::App* eig = app.add_subcommand("eigen", "first discrete p-Laplacian eigenpair on a rectangle");
    common(eig);
    eig->add_option("--rect", rects, "rectangle axis a:b, repeatable")->required();
    eig->add_option("--grid", c.grid, "interior nodes per axis (once, or once per axis)");
    eig->add_option("--tol", c.tol, "relative change stopping tolerance (default 1e-10)");
    eig->add_option("--max-iter", c.max_iter);
    eig->add_option("--csv", c.csv, "write the convergence trace as CSV");
    eig->add_option("--svg", c.svg, "plot the convergence trace as SVG");

    CLI::App* cert = app.add_subcommand("certify", "operator certificate for the isomorphism number bound");
    common(cert);
    domain(cert);
    cert->add_option("--l", c.l)->required();
    cert->add_option("--m", c.m, "number of translates");
    cert->add_option("--resolution", c.resolution, "cells per sin_p half-period (default 8)");
    cert->add_option("--trials", c.trials);
    cert->add_option("--tol", c.tol, "deviation tolerance (default 1e-6)");
    cert->add_option("--seed", c.seed);

    CLI::App* ref = app.add_subcommand("refute", "refute a random bump net by translation");
    common(ref);
    domain(ref);
    ref->add_option("--l", c.l)->required();
    ref->add_option("--radius", c.radius, "net radius r");
    ref->add_option("--rtilde", c.rtilde, "r < rtilde < ||base||_p");
    ref->add_option("--centers", c.centers);
    ref->add_option("--extent", c.extent, "centers lie within |x_j| <= extent on free axes");
    ref->add_option("--resolution", c.resolution);
    ref->add_option("--seed", c.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ExitCode::validation);
    }

    c.command = app.get_subcommands().front()->get_name();
    try {
        for (const auto& s : intervals) {
            c.intervals.push_back(parse_interval(s));
        }
        for (const auto& s : rects) {
            c.rect.push_back(parse_interval(s));
        }
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return static_cast<int>(ExitCode::validation);
    }
    return run(c, out, err);
}

}  // namespace stripemb::cli
