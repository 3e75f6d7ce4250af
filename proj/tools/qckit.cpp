// qckit command line front end: batch in, JSON/CSV out, exit codes as API.
//
// Exit status: 0 success, 1 validation or input error, 2 numeric tolerance
// failure (certified bound or gate not met).  Errors are emitted to stderr
// as {"error": {"code": ..., "message": ...}} so scripts never scrape prose.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qckit/almost_periodic.hpp"
#include "qckit/entire.hpp"
#include "qckit/errors.hpp"
#include "qckit/generators.hpp"
#include "qckit/io.hpp"
#include "qckit/multiset.hpp"
#include "qckit/parallel.hpp"
#include "qckit/poisson.hpp"
#include "qckit/spectrum.hpp"

namespace {

using nlohmann::json;
using cd = std::complex<double>;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit_error(const std::string& code, const std::string& message) {
    json err{{"error", {{"code", code}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
}

/// Reports go to --output when given (written atomically), stdout otherwise.
void deliver(const std::string& output_path, const std::string& content) {
    if (output_path.empty())
        std::cout << content;
    else
        qckit::write_text_atomic(output_path, content);
}

std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

struct GridSpec {
    double x0 = 0.0, x1 = 0.0, step = 1.0, y = 0.0;

    std::vector<double> xs() const {
        std::vector<double> out;
        long n = static_cast<long>(std::floor((x1 - x0) / step + 0.5)) + 1;
        for (long i = 0; i < n; ++i) {
            double x = x0 + step * static_cast<double>(i);
            if (x > x1 + step * 1e-9) break;
            out.push_back(x);
        }
        return out;
    }
};

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    std::string head = text;
    auto at = text.find('@');
    if (at != std::string::npos) {
        head = text.substr(0, at);
        try {
            g.y = std::stod(text.substr(at + 1));
        } catch (...) {
            throw std::invalid_argument("--grid: bad y part in \"" + text + "\"");
        }
    }
    auto c1 = head.find(':');
    auto c2 = head.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument("--grid expects \"x0:x1:step\" or \"x0:x1:step@y\"");
    try {
        g.x0 = std::stod(head.substr(0, c1));
        g.x1 = std::stod(head.substr(c1 + 1, c2 - c1 - 1));
        g.step = std::stod(head.substr(c2 + 1));
    } catch (...) {
        throw std::invalid_argument("--grid: non-numeric component in \"" + text + "\"");
    }
    if (!std::isfinite(g.x0) || !std::isfinite(g.x1) || !std::isfinite(g.step) ||
        !std::isfinite(g.y) || !(g.step > 0.0) || g.x1 < g.x0)
        throw std::invalid_argument("--grid: need finite x0 <= x1 and step > 0");
    return g;
}

/// Analytic spectra come from generator specs (lattices and unions of
/// lattices have closed-form transforms; scanned zero sets do not).
qckit::Spectrum spectrum_from_generator(const json& j, const qckit::Window& band) {
    const json& kind = qckit::detail::require(j, "kind", "generator JSON");
    std::string k = kind.get<std::string>();
    if (k == "lattice") {
        qckit::LatticeSpec spec;
        spec.alpha = qckit::detail::require_number(j, "alpha", "generator JSON");
        spec.shift = qckit::detail::require_number(j, "shift", "generator JSON");
        spec.window = qckit::detail::window_from_json(
            qckit::detail::require(j, "window", "generator JSON"), "generator JSON");
        return qckit::lattice_spectrum(spec, band);
    }
    if (k == "union") {
        const json& parts = qckit::detail::require(j, "parts", "generator JSON");
        if (!parts.is_array() || parts.empty())
            throw std::invalid_argument("generator JSON: \"parts\" must be non-empty");
        std::vector<qckit::Spectrum> built;
        for (const auto& p : parts) built.push_back(spectrum_from_generator(p, band));
        return qckit::union_spectrum(built);
    }
    throw std::invalid_argument("spectrum --analytic: kind \"" + k +
                                "\" has no closed-form transform");
}

// ---- subcommand payloads ---------------------------------------------------

struct CommonOpts {
    std::string input;
    std::string output;
    std::string format = "json";
};

int cmd_generate(const CommonOpts& c) {
    auto A = qckit::generate_from_json(qckit::load_json_file(c.input));
    deliver(c.output, dump_report(qckit::multiset_to_json(A)));
    return 0;
}

int cmd_density(const CommonOpts& c, const std::vector<double>& lengths) {
    auto A = qckit::multiset_from_json(qckit::load_json_file(c.input));
    auto rep = qckit::estimate_density(A, lengths);
    json rows = json::array();
    for (const auto& r : rep.rows)
        rows.push_back({{"length", r.length},
                        {"count", r.count},
                        {"density", r.density},
                        {"eta", r.eta}});
    deliver(c.output, dump_report(json{{"density", rep.d}, {"rows", std::move(rows)}}));
    return 0;
}

int cmd_decompose(const CommonOpts& c, std::optional<double> density,
                  const std::vector<double>& lengths) {
    auto A = qckit::multiset_from_json(qckit::load_json_file(c.input));
    double d = density ? *density : qckit::estimate_density(A, lengths).d;
    auto D = qckit::decompose(A, d);
    deliver(c.output, dump_report(json{{"density", D.density},
                                       {"n_lo", D.n_lo},
                                       {"n_hi", D.n_hi()},
                                       {"sup_phi", D.sup_phi},
                                       {"phi", D.phi_values}}));
    return 0;
}

int cmd_almost_periods(const CommonOpts& c, double epsilon,
                       const std::vector<double>& range, double step) {
    auto A = qckit::multiset_from_json(qckit::load_json_file(c.input));
    auto taus =
        qckit::find_almost_periods(A, epsilon, qckit::Window::closed(range[0], range[1]),
                                   step);
    deliver(c.output, dump_report(json{{"epsilon", epsilon},
                                       {"range", range},
                                       {"step", step},
                                       {"taus", taus}}));
    return 0;
}

int cmd_spectrum(const CommonOpts& c, bool analytic, const std::vector<double>& band,
                 const std::vector<double>& candidates, const std::vector<double>& probes,
                 const std::vector<double>& T_schedule) {
    json in = qckit::load_json_file(c.input);
    qckit::Spectrum S;
    if (analytic) {
        if (band.size() != 2)
            throw std::invalid_argument("spectrum --analytic requires --band LO HI");
        S = spectrum_from_generator(in, qckit::Window::closed(band[0], band[1]));
    } else {
        auto A = qckit::multiset_from_json(in);
        if (candidates.empty() || probes.empty() || T_schedule.empty())
            throw std::invalid_argument(
                "empirical spectrum detection needs --candidates, --probes and --T");
        S = qckit::detect_spectrum(A, candidates, probes, T_schedule);
    }
    deliver(c.output, dump_report(qckit::spectrum_to_json(S)));
    return 0;
}

struct EvalOpts {
    std::string function;
    std::string spectrum_path;
    std::string grid_text;
    std::optional<long> truncation;
    std::optional<double> series_cutoff;
    std::optional<double> density;
    double tolerance = 1e-10;
    bool include_zero_atom = true;
    std::string tail = "first-order";
};

int cmd_evaluate(const CommonOpts& c, const EvalOpts& e) {
    if (c.format != "csv" && c.format != "json")
        throw std::invalid_argument("evaluate supports --format csv only (default)");

    qckit::EvalConfig cfg;
    cfg.product_truncation = e.truncation;
    cfg.series_cutoff = e.series_cutoff;
    cfg.density = e.density;
    cfg.abs_tol = cfg.rel_tol = e.tolerance;
    cfg.include_zero_atom = e.include_zero_atom;
    if (e.tail == "none")
        cfg.tail_correction = qckit::EvalConfig::Tail::none;
    else if (e.tail == "first-order")
        cfg.tail_correction = qckit::EvalConfig::Tail::first_order;
    else
        throw std::invalid_argument("--tail must be none or first-order");

    const bool needs_points = e.function == "f" || e.function == "logderiv-direct" ||
                              e.function == "F";
    const bool needs_spectrum = e.function == "logderiv-spectral" || e.function == "g" ||
                                e.function == "F";
    if (!needs_points && !needs_spectrum)
        throw std::invalid_argument(
            "--function must be one of f, logderiv-direct, logderiv-spectral, g, F");
    std::optional<qckit::PointMultiset> A;
    std::optional<qckit::Spectrum> S;
    if (needs_points) {
        if (c.input.empty())
            throw std::invalid_argument("evaluate " + e.function + " needs --input");
        A = qckit::multiset_from_json(qckit::load_json_file(c.input));
    }
    if (needs_spectrum) {
        if (e.spectrum_path.empty())
            throw std::invalid_argument("evaluate " + e.function + " needs --spectrum");
        S = qckit::spectrum_from_json(qckit::load_json_file(e.spectrum_path));
    }

    GridSpec grid = parse_grid(e.grid_text);
    std::vector<double> xs = grid.xs();
    std::vector<cd> values(xs.size());
    std::vector<double> defects(xs.size(), 0.0), tails(xs.size(), 0.0);

    qckit::parallel_for(xs.size(), [&](std::size_t i) {
        qckit::ComplexPoint z(xs[i], grid.y);
        if (e.function == "f") {
            values[i] = qckit::eval_f(*A, z, cfg);
        } else if (e.function == "logderiv-direct") {
            auto r = qckit::eval_logderiv_direct(*A, z, cfg);
            values[i] = r.value;
            defects[i] = r.cauchy_defect;
            tails[i] = r.tail_magnitude;
        } else if (e.function == "logderiv-spectral") {
            values[i] = qckit::eval_logderiv_spectral(*S, z, cfg);
        } else if (e.function == "g") {
            values[i] = qckit::eval_g(*S, z);
        } else {
            values[i] = qckit::eval_F(*A, *S, z, cfg);
        }
    });

    json header{{"function", e.function}, {"points", xs.size()}, {"y", grid.y}};
    if (e.function == "logderiv-direct") {
        header["max_cauchy_defect"] = *std::max_element(defects.begin(), defects.end());
        header["max_tail_magnitude"] = *std::max_element(tails.begin(), tails.end());
    }
    std::string out = "# " + header.dump() + "\nx,y,re,im\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        out += fmt_double(xs[i]) + "," + fmt_double(grid.y) + "," +
               fmt_double(values[i].real()) + "," + fmt_double(values[i].imag()) + "\n";
    deliver(c.output, out);
    return 0;
}

int cmd_verify_poisson(const CommonOpts& c, const std::string& spectrum_path,
                       double scale, double center, double lambda_cutoff,
                       double gamma_cutoff, double tail_tol,
                       std::optional<double> gate) {
    auto A = qckit::multiset_from_json(qckit::load_json_file(c.input));
    auto S = qckit::spectrum_from_json(qckit::load_json_file(spectrum_path));
    auto rep = qckit::poisson_residual(A, S, qckit::GaussianTest(scale, center),
                                       lambda_cutoff, gamma_cutoff, tail_tol);
    bool pass = !gate || rep.residual <= *gate;
    json out{{"lhs", {rep.lhs.real(), rep.lhs.imag()}},
             {"rhs", {rep.rhs.real(), rep.rhs.imag()}},
             {"residual", rep.residual},
             {"lambda_tail_bound", rep.lambda_tail_bound},
             {"gamma_tail_bound", rep.gamma_tail_bound},
             {"pass", pass}};
    if (gate) out["gate"] = *gate;
    deliver(c.output, dump_report(out));
    if (!pass) {
        emit_error("gate-failed", "poisson residual " + fmt_double(rep.residual) +
                                      " above gate " + fmt_double(*gate));
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"almost periodic point sets, their spectra, and entire functions"};
    app.require_subcommand(1);
    app.footer("Environment: QCKIT_THREADS caps internal parallelism.");

    CommonOpts common;

    auto add_common = [&](CLI::App* sub, bool input_required = true) {
        auto* in = sub->add_option("--input", common.input, "input JSON file");
        if (input_required) in->required();
        sub->add_option("--output", common.output,
                        "output file (atomic write); stdout when omitted");
        sub->add_option("--format", common.format, "json or csv");
    };

    auto* sc_generate = app.add_subcommand("generate", "build a point multiset");
    add_common(sc_generate);

    auto* sc_density = app.add_subcommand("density", "estimate the density");
    add_common(sc_density);
    std::vector<double> lengths{1e2, 1e3};
    sc_density->add_option("--lengths", lengths, "window lengths for the estimate");

    auto* sc_decompose = app.add_subcommand("decompose", "split points into n/d + phi(n)");
    add_common(sc_decompose);
    std::optional<double> density_override;
    sc_decompose->add_option("--density", density_override, "density to use directly");
    sc_decompose->add_option("--lengths", lengths, "estimation lengths when no --density");

    auto* sc_periods = app.add_subcommand("almost-periods", "scan for epsilon-almost periods");
    add_common(sc_periods);
    double epsilon = 0.0, step = 0.0;
    std::vector<double> range;
    sc_periods->add_option("--epsilon", epsilon, "matching tolerance")->required();
    sc_periods->add_option("--range", range, "scan range LO HI")
        ->expected(2)
        ->required();
    sc_periods->add_option("--step", step, "scan grid step")->required();

    auto* sc_spectrum = app.add_subcommand("spectrum", "analytic or detected spectrum");
    add_common(sc_spectrum);
    bool analytic = false;
    std::vector<double> band, candidates, probes, T_schedule;
    sc_spectrum->add_flag("--analytic", analytic,
                          "input is a generator spec with a closed-form transform");
    sc_spectrum->add_option("--band", band, "band LO HI for --analytic")->expected(2);
    sc_spectrum->add_option("--candidates", candidates, "candidate frequencies");
    sc_spectrum->add_option("--probes", probes, "off-spectrum probe frequencies");
    sc_spectrum->add_option("--T", T_schedule, "Bohr-mean T schedule");

    auto* sc_eval = app.add_subcommand("evaluate", "evaluate a function on a grid");
    add_common(sc_eval, false);
    EvalOpts eval;
    sc_eval->add_option("--function", eval.function,
                        "f | logderiv-direct | logderiv-spectral | g | F")
        ->required();
    sc_eval->add_option("--spectrum", eval.spectrum_path, "spectrum JSON file");
    sc_eval->add_option("--grid", eval.grid_text, "\"x0:x1:step@y\"")->required();
    sc_eval->add_option("--truncation", eval.truncation, "symmetric product cutoff N");
    sc_eval->add_option("--series-cutoff", eval.series_cutoff, "spectral series cutoff");
    sc_eval->add_option("--density", eval.density, "density override for tail model");
    sc_eval->add_option("--tolerance", eval.tolerance, "abs and rel tolerance");
    sc_eval->add_flag("--include-zero-atom,!--no-include-zero-atom",
                      eval.include_zero_atom, "keep the zero-frequency constant");
    sc_eval->add_option("--tail", eval.tail, "none | first-order");

    auto* sc_verify = app.add_subcommand("verify", "end-to-end identities");
    sc_verify->require_subcommand(1);
    auto* sc_poisson = sc_verify->add_subcommand("poisson", "two-sided Gaussian check");
    add_common(sc_poisson);
    std::string vp_spectrum;
    double vp_scale = 1.0, vp_center = 0.0, vp_lcut = 0.0, vp_gcut = 0.0,
           vp_tail_tol = 1e-12;
    std::optional<double> vp_gate;
    sc_poisson->add_option("--spectrum", vp_spectrum, "spectrum JSON file")->required();
    sc_poisson->add_option("--scale", vp_scale, "Gaussian scale");
    sc_poisson->add_option("--center", vp_center, "Gaussian center");
    sc_poisson->add_option("--lambda-cutoff", vp_lcut, "point-side cutoff")->required();
    sc_poisson->add_option("--gamma-cutoff", vp_gcut, "spectral-side cutoff")->required();
    sc_poisson->add_option("--tail-tol", vp_tail_tol, "certified tail budget");
    sc_poisson->add_option("--gate", vp_gate, "fail (exit 2) when residual exceeds this");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("bad-arguments", e.what());
        return 1;
    }

    try {
        if (sc_generate->parsed()) return cmd_generate(common);
        if (sc_density->parsed()) return cmd_density(common, lengths);
        if (sc_decompose->parsed()) return cmd_decompose(common, density_override, lengths);
        if (sc_periods->parsed()) return cmd_almost_periods(common, epsilon, range, step);
        if (sc_spectrum->parsed())
            return cmd_spectrum(common, analytic, band, candidates, probes, T_schedule);
        if (sc_eval->parsed()) return cmd_evaluate(common, eval);
        if (sc_poisson->parsed())
            return cmd_verify_poisson(common, vp_spectrum, vp_scale, vp_center, vp_lcut,
                                      vp_gcut, vp_tail_tol, vp_gate);
        emit_error("bad-arguments", "no subcommand selected");
        return 1;
    } catch (const qckit::tolerance_error& e) {
        emit_error("tolerance", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        emit_error("bad-input", e.what());
        return 1;
    } catch (const std::domain_error& e) {
        emit_error("domain", e.what());
        return 1;
    } catch (const std::out_of_range& e) {
        emit_error("bad-input", e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return 1;
    }
}
