#pragma once

// Scenario runner behind tools/ermakov_lab.  Settings come from a JSON file
// (--config) and/or flags; flags win.  Every run writes a manifest.json with
// the file hashes, the resolved config and the checked invariants.

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "io.hpp"
#include "propagation.hpp"
#include "susy.hpp"
#include "wigner.hpp"

namespace ermakov::cli {

using Json = nlohmann::ordered_json;

enum class Scenario { propagate, invariant, kernel, wigner, eigensolve, susy };

inline const std::vector<std::pair<std::string, Scenario>>& scenario_names()
{
    static const std::vector<std::pair<std::string, Scenario>> names{
        {"propagate", Scenario::propagate}, {"invariant", Scenario::invariant},   {"kernel", Scenario::kernel},
        {"wigner", Scenario::wigner},       {"eigensolve", Scenario::eigensolve}, {"susy", Scenario::susy}};
    return names;
}

inline std::string to_string(Scenario s)
{
    for (const auto& [name, v] : scenario_names())
        if (v == s)
            return name;
    return "?";
}

struct RunConfig
{
    Scenario scenario = Scenario::propagate;
    std::string profile_text = "free";
    FrequencyProfile profile = FrequencyProfile::free();
    std::string potential_text = "ho";
    std::optional<PotentialSpec> potential;
    UnitSystem units{};
    double alpha0 = 1.0;
    double p0 = 1.0;
    double eta0 = 0.0;
    double v0 = 1.0;
    std::vector<double> times;
    int n_lo = 0;
    int n_hi = 0;
    int l = 0;
    int levels = 3;
    double tol = 1e-10;
    QuadratureMethod method = QuadratureMethod::steepest_descent;
    std::optional<SpatialGrid> grid;
    std::filesystem::path out;
    bool csv = true;
    bool json = true;
    /// Resolved settings, echoed into the manifest.
    Json echo;
};

namespace detail {

inline const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys{
        "scenario", "profile", "potential", "alpha0", "beta0", "p0",     "eta0",   "v0",     "hbar",
        "mass",     "t",       "t0",        "t1",     "samples", "n",    "l",      "levels", "tol",
        "x_min",    "x_max",   "points",    "method", "out",    "format", "profile_t", "profile_omega_sq"};
    return keys;
}

inline double parse_number(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc{} || r.ptr != e || !std::isfinite(v))
        throw ValidationError("--" + key + ": '" + text + "' is not a finite number");
    return v;
}

inline int parse_int(const std::string& key, const std::string& text)
{
    int v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc{} || r.ptr != e)
        throw ValidationError("--" + key + ": '" + text + "' is not an integer");
    return v;
}

/// Raw value as text; numbers from JSON are printed at full precision.
inline std::optional<std::string> text_of(const Json& raw, const std::string& key)
{
    if (!raw.contains(key))
        return std::nullopt;
    const auto& v = raw.at(key);
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number_integer())
        return std::to_string(v.get<long long>());
    if (v.is_number())
        return format_double(v.get<double>());
    throw ValidationError("config key '" + key + "' must be a string or number");
}

inline std::optional<double> number_of(const Json& raw, const std::string& key)
{
    auto t = text_of(raw, key);
    if (!t)
        return std::nullopt;
    return parse_number(key, *t);
}

inline std::pair<std::string, std::string> split_range(const std::string& text)
{
    const auto pos = text.find("..");
    if (pos == std::string::npos)
        return {text, ""};
    return {text.substr(0, pos), text.substr(pos + 2)};
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_number(key, item));
    return out;
}

inline FrequencyProfile parse_profile(const std::string& text, const Json& raw)
{
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::vector<double> args =
        colon == std::string::npos ? std::vector<double>{} : parse_list("profile", text.substr(colon + 1));
    auto need = [&](std::size_t count) {
        if (args.size() != count)
            throw ValidationError("profile '" + name + "' takes " + std::to_string(count) + " parameter(s)");
    };
    if (name == "free") {
        need(0);
        return FrequencyProfile::free();
    }
    if (name == "constant" || name == "ho") {
        if (args.empty())
            return FrequencyProfile::constant(1.0);
        need(1);
        return FrequencyProfile::constant(args[0]);
    }
    if (name == "parametric") {
        need(3);
        return FrequencyProfile::parametric(args[0], args[1], args[2]);
    }
    if (name == "tabulated") {
        need(0);
        if (!raw.contains("profile_t") || !raw.contains("profile_omega_sq"))
            throw ValidationError("tabulated profile needs profile_t and profile_omega_sq arrays in the config file");
        try {
            return FrequencyProfile::tabulated(raw.at("profile_t").get<std::vector<double>>(),
                                               raw.at("profile_omega_sq").get<std::vector<double>>());
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("tabulated profile arrays: ") + e.what());
        }
    }
    throw ValidationError("unknown profile '" + name + "' (free, constant:w, parametric:w0,eps,drive, tabulated)");
}

inline PotentialSpec parse_potential(const std::string& text, int l, const UnitSystem& units)
{
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::optional<double> arg = colon == std::string::npos
                                          ? std::nullopt
                                          : std::optional<double>(parse_number("potential", text.substr(colon + 1)));
    if (name == "ho")
        return PotentialSpec::harmonic(arg.value_or(1.0), units);
    if (name == "coulomb")
        return PotentialSpec::coulomb(l, arg.value_or(1.0), units);
    throw ValidationError("unknown potential '" + name + "' (ho[:omega], coulomb[:e2])");
}

} // namespace detail

/// Validates raw settings (strings or numbers keyed by flag name) into a RunConfig.
inline RunConfig resolve_config(const Json& raw)
{
    using namespace detail;
    if (!raw.is_object())
        throw ValidationError("config must be a JSON object");
    for (const auto& [key, _] : raw.items())
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
            throw ValidationError("unknown config key '" + key + "'");

    RunConfig c;
    if (auto s = text_of(raw, "scenario")) {
        bool found = false;
        for (const auto& [name, v] : scenario_names())
            if (name == *s) {
                c.scenario = v;
                found = true;
            }
        if (!found)
            throw ValidationError("unknown scenario '" + *s + "'");
    } else {
        throw ValidationError("no scenario given (propagate, invariant, kernel, wigner, eigensolve, susy)");
    }

    c.units.hbar = number_of(raw, "hbar").value_or(1.0);
    c.units.mass = number_of(raw, "mass").value_or(1.0);
    c.units.validate();

    const auto alpha0 = number_of(raw, "alpha0");
    const auto beta0 = number_of(raw, "beta0");
    if (alpha0 && beta0)
        throw ValidationError("give either alpha0 or beta0, not both");
    if (beta0) {
        if (!(*beta0 > 0.0))
            throw ValidationError("beta0 must be > 0");
        c.alpha0 = 1.0 / std::sqrt(*beta0);
    } else {
        c.alpha0 = alpha0.value_or(1.0);
    }
    if (!(c.alpha0 > 0.0))
        throw ValidationError("alpha0 must be > 0");
    c.p0 = number_of(raw, "p0").value_or(1.0);
    c.eta0 = number_of(raw, "eta0").value_or(0.0);
    c.v0 = number_of(raw, "v0").value_or(c.p0 / c.units.mass);

    c.profile_text = text_of(raw, "profile").value_or("free");
    c.profile = parse_profile(c.profile_text, raw);

    c.l = text_of(raw, "l") ? parse_int("l", *text_of(raw, "l")) : 0;
    if (c.l < 0)
        throw ValidationError("l must be >= 0");
    c.potential_text = text_of(raw, "potential").value_or("ho");
    if (c.scenario == Scenario::eigensolve || c.scenario == Scenario::susy)
        c.potential = parse_potential(c.potential_text, c.l, c.units);

    // Times: --t a..b | --t a | --t0/--t1/--samples.
    const bool dynamic = c.scenario != Scenario::eigensolve && c.scenario != Scenario::susy;
    double t0 = 0.0, t1 = 1.0;
    bool single = false;
    if (auto t = text_of(raw, "t")) {
        if (raw.contains("t0") || raw.contains("t1"))
            throw ValidationError("give either t or t0/t1, not both");
        const auto [a, b] = split_range(*t);
        if (b.empty()) {
            t1 = parse_number("t", a);
            single = true;
        } else {
            t0 = parse_number("t", a);
            t1 = parse_number("t", b);
        }
    } else {
        t0 = number_of(raw, "t0").value_or(0.0);
        t1 = number_of(raw, "t1").value_or(1.0);
    }
    std::size_t samples = 101;
    if (auto s = text_of(raw, "samples")) {
        const int v = parse_int("samples", *s);
        if (v < 2)
            throw ValidationError("samples must be >= 2");
        samples = static_cast<std::size_t>(v);
    }
    if (dynamic) {
        if (single) {
            if (!(t1 >= 0.0))
                throw ValidationError("time must be >= 0");
            c.times = {t1};
        } else {
            TimeGrid{t0, t1, samples}.validate();
            c.times = linspace(t0, t1, samples);
        }
        if (c.scenario == Scenario::propagate || c.scenario == Scenario::kernel)
            if (c.times.front() < 0.0)
                throw ValidationError("propagation times start at t = 0");
    }

    if (auto n = text_of(raw, "n")) {
        const auto [a, b] = split_range(*n);
        c.n_lo = parse_int("n", a);
        c.n_hi = b.empty() ? c.n_lo : parse_int("n", b);
        if (c.n_lo < 0 || c.n_hi < c.n_lo)
            throw ValidationError("n must be k or lo..hi with 0 <= lo <= hi");
    }
    if (auto lv = text_of(raw, "levels")) {
        c.levels = parse_int("levels", *lv);
        if (c.levels < 1)
            throw ValidationError("levels must be >= 1");
    }
    c.tol = number_of(raw, "tol").value_or(1e-10);
    if (!(c.tol > 0.0) || c.tol > 1e-2)
        throw ValidationError("tol must lie in (0, 1e-2]");

    if (auto m = text_of(raw, "method")) {
        if (*m == "steepest_descent")
            c.method = QuadratureMethod::steepest_descent;
        else if (*m == "real_line")
            c.method = QuadratureMethod::real_line;
        else if (*m == "trapezoid")
            c.method = QuadratureMethod::trapezoid;
        else
            throw ValidationError("unknown method '" + *m + "' (steepest_descent, real_line, trapezoid)");
    }
    const auto x_min = number_of(raw, "x_min"), x_max = number_of(raw, "x_max");
    const auto points = text_of(raw, "points");
    if (x_min || x_max || points) {
        if (!x_min || !x_max)
            throw ValidationError("a spatial grid needs both x_min and x_max");
        SpatialGrid g{*x_min, *x_max, points ? static_cast<std::size_t>(std::max(0, parse_int("points", *points)))
                                             : std::size_t{401}};
        g.validate();
        c.grid = g;
    }

    if (auto o = text_of(raw, "out"); o && !o->empty())
        c.out = *o;
    else if (const char* env = std::getenv("ERMAKOV_LAB_OUT"); env && *env)
        c.out = env;
    else
        c.out = "ermakov_out";

    if (auto f = text_of(raw, "format")) {
        c.csv = c.json = false;
        std::stringstream ss(*f);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item == "csv")
                c.csv = true;
            else if (item == "json")
                c.json = true;
            else
                throw ValidationError("unknown format '" + item + "' (csv, json)");
        }
        if (!c.csv && !c.json)
            throw ValidationError("format must name csv and/or json");
    }

    Json& e = c.echo;
    e["scenario"] = to_string(c.scenario);
    e["hbar"] = c.units.hbar;
    e["mass"] = c.units.mass;
    if (dynamic) {
        e["profile"] = c.profile_text;
        e["alpha0"] = c.alpha0;
        e["p0"] = c.p0;
        e["eta0"] = c.eta0;
        e["v0"] = c.v0;
        e["t0"] = c.times.front();
        e["t1"] = c.times.back();
        e["samples"] = c.times.size();
        e["tol"] = c.tol;
    } else {
        e["potential"] = c.potential_text;
        e["l"] = c.l;
        if (c.scenario == Scenario::eigensolve) {
            e["n_lo"] = c.n_lo;
            e["n_hi"] = c.n_hi;
        } else {
            e["levels"] = c.levels;
        }
    }
    if (c.scenario == Scenario::propagate) {
        const char* names[] = {"steepest_descent", "real_line", "trapezoid"};
        e["method"] = names[static_cast<int>(c.method)];
        if (c.grid) {
            e["x_min"] = c.grid->x_min;
            e["x_max"] = c.grid->x_max;
            e["points"] = c.grid->points;
        }
    }
    e["format"] = std::string(c.csv ? "csv" : "") + (c.csv && c.json ? "," : "") + (c.json ? "json" : "");
    e["out"] = c.out.generic_string();
    return c;
}

struct InvariantCheck
{
    std::string name;
    bool passed = false;
    double drift = 0.0;
    double tolerance = 0.0;
};

struct RunReport
{
    std::vector<FileRecord> files;
    std::vector<InvariantCheck> invariants;
    Json summary;

    bool all_passed() const
    {
        return std::all_of(invariants.begin(), invariants.end(), [](const auto& c) { return c.passed; });
    }
};

namespace detail {

inline void check(RunReport& r, std::string name, double drift, double tol)
{
    r.invariants.push_back({std::move(name), std::isfinite(drift) && drift <= tol, drift, tol});
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline IntegratorConfig integrator(const RunConfig& c) { return {c.tol, c.tol}; }

/// Spatial grid covering the packet at all requested times with <= pi/4 phase
/// change and <= sigma/4 per cell.
inline SpatialGrid auto_grid(const RunConfig& c, const std::vector<KernelParams>& ks)
{
    const double hb = c.units.hbar, m = c.units.mass;
    double half = 0.0, dx = std::numeric_limits<double>::infinity();
    for (const auto& k : ks) {
        const auto pk = GaussianPacket::from_kernel(k, c.p0);
        const double sigma = std::sqrt(pk.position_variance());
        const double reach = std::abs(pk.eta) + 12.0 * sigma;
        const double a2 = pk.alpha_sq();
        const double chirp = m / hb * (k.u * k.u_dot + k.z * k.z_dot) / a2;
        const double wave = std::abs(chirp) * (reach + std::abs(pk.eta)) + std::abs(pk.p) / hb;
        half = std::max(half, reach);
        dx = std::min({dx, 0.25 * sigma, wave > 0.0 ? 0.25 * std::numbers::pi / wave : dx});
    }
    half = std::ceil(half);
    const auto pts = static_cast<std::size_t>(std::ceil(2.0 * half / dx)) + 1;
    return {-half, half, std::clamp<std::size_t>(pts | 1, 401, 20001)};
}

inline void run_propagate(const RunConfig& c, RunReport& r, std::vector<std::pair<std::string, std::string>>& outs)
{
    const auto cfg = integrator(c);
    std::vector<KernelParams> ks;
    for (double t : c.times)
        ks.push_back(kernel_params(c.profile, c.alpha0, t, cfg, c.units));
    const SpatialGrid grid = c.grid ? *c.grid : auto_grid(c, ks);
    const InitialPacket init{c.alpha0, c.p0, c.units};
    const bool free = std::holds_alternative<FreeMotion>(c.profile.kind());
    // The classical-trajectory width relies on u = alpha0^2 z', true only for constant omega.
    const bool autonomous = free || std::holds_alternative<ConstantFrequency>(c.profile.kind());
    const double b0 = init.beta0();
    const double v0 = c.p0 / c.units.mass;
    const double var_scale = c.units.hbar / (2.0 * c.units.mass);

    CsvWriter psi_csv{"t", "x", "re_psi", "im_psi", "abs2"};
    CsvWriter sum_csv{"t", "eta", "width", "width_free", "width_classical", "variance", "variance_closed", "norm",
                      "l2_error", "tail_mass"};
    double l2_max = 0.0, norm_dev = 0.0, free_dev = 0.0, var_dev = 0.0, classical_dev = 0.0;
    bool tail_warning = false;
    for (const auto& k : ks) {
        QuadratureOptions qo;
        qo.method = c.method;
        const auto res = propagate_quadrature(k, init, grid, qo);
        tail_warning = tail_warning || res.tail_warning;
        const auto closed = k.t == 0.0 ? res.psi : packet_closed_form(k, c.p0, grid);
        const auto mo = packet_moments(res.x, res.psi);
        const auto pk = GaussianPacket::from_kernel(k, c.p0);
        const double width = pk.alpha_sq();
        const double wfree = c.alpha0 * c.alpha0 * (1.0 + b0 * b0 * k.t * k.t);
        const double wclass =
            v0 != 0.0 ? width_from_classical({pk.eta, pk.p / c.units.mass, k.t}, c.alpha0, v0) : std::nan("");
        const double l2 = l2_distance(res.x, res.psi, closed);
        for (std::size_t i = 0; i < res.x.size(); ++i)
            psi_csv.row({k.t, res.x[i], res.psi[i].real(), res.psi[i].imag(), std::norm(res.psi[i])});
        sum_csv.row({k.t, pk.eta, width, free ? wfree : std::nan(""), wclass, mo.variance, pk.position_variance(),
                     mo.norm, l2, res.tail_mass});
        l2_max = std::max(l2_max, l2);
        norm_dev = std::max(norm_dev, std::abs(mo.norm - 1.0));
        var_dev = std::max(var_dev, rel(mo.variance, pk.position_variance()));
        if (free)
            free_dev = std::max(free_dev, rel(width, wfree));
        if (v0 != 0.0)
            classical_dev = std::max(classical_dev, rel(mo.variance, var_scale * wclass));
    }
    check(r, "quadrature_vs_closed_form_l2", l2_max, 1e-6);
    check(r, "norm", norm_dev, 1e-8);
    check(r, "variance_vs_width", var_dev, 1e-6);
    if (v0 != 0.0 && autonomous)
        check(r, "variance_vs_classical_trajectory", classical_dev, 1e-6);
    else if (v0 != 0.0)
        r.summary["classical_width_deviation"] = classical_dev;
    if (free)
        check(r, "free_width_formula", free_dev, 1e-8);
    r.summary["grid"] = {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"points", grid.points}};
    r.summary["tail_warning"] = tail_warning;
    outs.emplace_back("propagate.csv", psi_csv.str());
    outs.emplace_back("propagate_summary.csv", sum_csv.str());
}

inline std::pair<std::vector<ClassicalState>, Trajectory<ErmakovState>> trajectories(const RunConfig& c)
{
    if (c.times.size() < 2)
        throw ValidationError("this scenario needs a time range t0..t1");
    const TimeGrid grid{c.times.front(), c.times.back(), c.times.size()};
    const auto cfg = integrator(c);
    return {integrate_classical(c.profile, {c.eta0, c.v0, grid.t0}, grid, cfg),
            integrate_ermakov(c.profile, {c.alpha0, 0.0, 0.0}, grid, cfg)};
}

inline void run_invariant(const RunConfig& c, RunReport& r, std::vector<std::pair<std::string, std::string>>& outs)
{
    const auto [cl, er] = trajectories(c);
    CsvWriter csv{"t", "eta", "eta_dot", "alpha", "alpha_dot", "I_L", "I_bilinear", "I_factor"};
    const double I0 = ermakov_invariant(cl[0], er.states[0]);
    double drift = 0.0, bil = 0.0, fac = 0.0;
    for (std::size_t i = 0; i < cl.size(); ++i) {
        const auto& e = er.states[i];
        const double I = ermakov_invariant(cl[i], e);
        const double Ib = invariant_bilinear(cl[i], uncertainties_from_width(e, c.units), c.units);
        const RiccatiState Y{Complex(e.alpha_dot / e.alpha, 1.0 / (e.alpha * e.alpha))};
        const double If = invariant_from_factors(factorize(cl[i], Y), Y);
        csv.row({cl[i].t, cl[i].eta, cl[i].eta_dot, e.alpha, e.alpha_dot, I, Ib, If});
        drift = std::max(drift, rel(I, I0));
        bil = std::max(bil, rel(Ib, I));
        fac = std::max(fac, rel(If, I));
    }
    check(r, "ermakov_invariant_drift", drift, 1e-7);
    check(r, "bilinear_form_identity", bil, 1e-8);
    check(r, "factorization_identity", fac, 1e-12);
    r.summary["I_L_initial"] = I0;
    r.summary["max_relative_drift"] = drift;
    outs.emplace_back("invariant.csv", csv.str());
}

inline void run_kernel(const RunConfig& c, RunReport& r, std::vector<std::pair<std::string, std::string>>& outs)
{
    CsvWriter csv{"t", "u", "z", "u_dot", "z_dot", "wronskian", "maslov_phase", "lambda_phase", "caustics"};
    double wr = 0.0;
    for (double t : c.times) {
        const auto k = kernel_params(c.profile, c.alpha0, t, integrator(c), c.units);
        const double w = wronskian(k.lambda());
        csv.row({t, k.u, k.z, k.u_dot, k.z_dot, w, k.maslov_phase, k.lambda_phase, static_cast<double>(k.caustics)});
        wr = std::max(wr, std::abs(w - 1.0));
    }
    check(r, "wronskian", wr, 1e-9);
    outs.emplace_back("kernel.csv", csv.str());
}

inline void run_wigner(const RunConfig& c, RunReport& r, std::vector<std::pair<std::string, std::string>>& outs)
{
    const auto [cl, er] = trajectories(c);
    CsvWriter series{"t", "W00", "W00_from_invariant", "normalization", "purity_determinant"};
    const double W0 = wigner_origin(cl[0], er.states[0], c.units);
    double drift = 0.0, norm = 0.0, pur = 0.0, eval_dev = 0.0;
    WignerGaussian last;
    for (std::size_t i = 0; i < cl.size(); ++i) {
        const auto w = wigner_from_state(cl[i], er.states[i], c.units);
        const double Wi = wigner_origin(cl[i], er.states[i], c.units);
        const double We = wigner_eval(w, 0.0, 0.0);
        const double nrm = wigner_integral(w, 201);
        series.row({cl[i].t, We, Wi, nrm, w.purity_determinant()});
        drift = std::max(drift, rel(Wi, W0));
        eval_dev = std::max(eval_dev, rel(We, Wi));
        norm = std::max(norm, std::abs(nrm - 1.0));
        pur = std::max(pur, std::abs(w.purity_determinant() - 1.0));
        last = w;
    }
    check(r, "W00_constant", drift, 1e-6);
    check(r, "W00_eval_vs_invariant", eval_dev, 1e-12);
    check(r, "normalization", norm, 1e-6);
    check(r, "purity", pur, 1e-9);

    CsvWriter grid{"x", "p", "W"};
    const double sx = std::sqrt(last.u.xx), sp = std::sqrt(last.u.pp);
    const int npts = 61;
    for (int i = 0; i < npts; ++i)
        for (int j = 0; j < npts; ++j) {
            const double x = last.x_mean + sx * (-5.0 + 10.0 * i / (npts - 1));
            const double p = last.p_mean + sp * (-5.0 + 10.0 * j / (npts - 1));
            grid.row({x, p, wigner_eval(last, x, p)});
        }
    r.summary["W00"] = W0;
    outs.emplace_back("wigner_origin.csv", series.str());
    outs.emplace_back("wigner_grid.csv", grid.str());
}

inline double analytic_level(const RunConfig& c, int n)
{
    if (auto h = std::get_if<HarmonicPotential>(&c.potential->kind()))
        return ho_eigenvalue(n, h->omega, c.units);
    const auto& cp = std::get<CoulombPotential>(c.potential->kind());
    return coulomb_eigenvalue(n, cp.l, cp.e2, c.units);
}

inline double level_tolerance(const RunConfig& c)
{
    return std::holds_alternative<HarmonicPotential>(c.potential->kind()) ? 1e-6 : 1e-5;
}

inline std::size_t stride_for(std::size_t n) { return std::max<std::size_t>(1, n / 4000); }

inline void run_eigensolve(const RunConfig& c, RunReport& r, std::vector<std::pair<std::string, std::string>>& outs)
{
    Json levels = Json::array();
    double e_dev = 0.0;
    int bad_nodes = 0;
    for (int n = c.n_lo; n <= c.n_hi; ++n) {
        const auto sol = shoot_eigenvalue(*c.potential, n);
        const auto ef = eigenfunction(sol);
        const int nodes = count_nodes(ef.psi);
        const double exact = analytic_level(c, n);
        e_dev = std::max(e_dev, std::abs(sol.E - exact) / c.potential->energy_scale());
        bad_nodes += nodes != n;
        levels.push_back({{"potential", c.potential_text},
                          {"l", c.l},
                          {"n", n},
                          {"E", sol.E},
                          {"E_exact", exact},
                          {"phase_integral", sol.phase_integral},
                          {"node_count", nodes}});
        CsvWriter csv{"zeta", "a_nl", "a_linear", "psi"};
        const std::size_t step = stride_for(sol.zeta.size());
        for (std::size_t i = 0; i < sol.zeta.size(); i += step)
            csv.row({sol.zeta[i], sol.a[i], sol.reconstructed[i], ef.psi[i]});
        outs.emplace_back("eigen_n" + std::to_string(n) + ".csv", csv.str());
    }
    check(r, "eigenvalue_vs_exact", e_dev, level_tolerance(c));
    check(r, "node_count_mismatches", bad_nodes, 0.0);
    r.summary["levels"] = levels;
    if (c.json)
        outs.emplace_back("spectrum.json", Json{{"potential", c.potential_text}, {"l", c.l}, {"levels", levels}}
                                               .dump(2) + "\n");
}

inline void run_susy(const RunConfig& c, RunReport& r, std::vector<std::pair<std::string, std::string>>& outs)
{
    const auto hier = susy_hierarchy(*c.potential, c.levels);
    Json levels = Json::array();
    double e_dev = 0.0;
    for (const auto& L : hier) {
        const double exact = analytic_level(c, L.s - 1);
        e_dev = std::max(e_dev, std::abs(L.original_energy - exact) / c.potential->energy_scale());
        levels.push_back({{"s", L.s}, {"E", L.original_energy}, {"E_exact", exact}, {"samples", L.q.size()}});
        CsvWriter csv{"q", "W", "W_prime", "V1", "V2", "potential", "ground_state"};
        const std::size_t step = stride_for(L.q.size());
        for (std::size_t i = 0; i < L.q.size(); i += step)
            csv.row({L.q[i], L.W[i], L.W_prime[i], L.V1[i], L.V2[i], L.potential[i], L.ground_state[i]});
        outs.emplace_back("susy_level" + std::to_string(L.s) + ".csv", csv.str());
    }
    check(r, "hierarchy_energies_vs_exact", e_dev, 1e-5);
    r.summary["levels"] = levels;
    if (c.json)
        outs.emplace_back("susy.json", Json{{"potential", c.potential_text}, {"l", c.l}, {"levels", levels}}.dump(2) +
                                           "\n");
}

} // namespace detail

/// Runs the scenario, writes the artifacts and manifest.json, and returns the report.  Throws on errors.
inline RunReport execute(const RunConfig& c)
{
    RunReport r;
    std::vector<std::pair<std::string, std::string>> outs;
    switch (c.scenario) {
    case Scenario::propagate: detail::run_propagate(c, r, outs); break;
    case Scenario::invariant: detail::run_invariant(c, r, outs); break;
    case Scenario::kernel: detail::run_kernel(c, r, outs); break;
    case Scenario::wigner: detail::run_wigner(c, r, outs); break;
    case Scenario::eigensolve: detail::run_eigensolve(c, r, outs); break;
    case Scenario::susy: detail::run_susy(c, r, outs); break;
    }
    for (const auto& [name, text] : outs) {
        const bool is_csv = name.ends_with(".csv");
        if ((is_csv && c.csv) || (!is_csv && c.json))
            r.files.push_back(write_artifact(c.out, name, text));
    }

    Json m;
    m["config"] = c.echo;
    Json files = Json::array();
    for (const auto& f : r.files)
        files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"hash", f.hash}});
    m["files"] = files;
    Json inv = Json::array();
    for (const auto& i : r.invariants)
        inv.push_back({{"name", i.name}, {"passed", i.passed}, {"drift", i.drift}, {"tolerance", i.tolerance}});
    m["invariants"] = inv;
    m["all_passed"] = r.all_passed();
    m["summary"] = r.summary;
    write_artifact(c.out, "manifest.json", m.dump(2) + "\n");
    return r;
}

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numeric = 3;

/// Resolves and executes; maps errors to exit codes with a message on `err`.
inline int run(const Json& raw, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    try {
        const auto cfg = resolve_config(raw);
        const auto report = execute(cfg);
        for (const auto& i : report.invariants)
            out << (i.passed ? "ok   " : "FAIL ") << i.name << " drift=" << format_double(i.drift)
                << " tol=" << format_double(i.tolerance) << "\n";
        out << "wrote " << report.files.size() << " file(s) + manifest.json to " << cfg.out.string() << "\n";
        return exit_ok;
    } catch (const NumericError& e) {
        err << "numeric error [" << e.module() << "]: " << e.what() << "\n";
        return exit_numeric;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "validation error: " << e.what() << "\n";
        return exit_validation;
    }
}

/// Command-line entry: flags over --config file over defaults.
inline int main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"ermakov_lab: Gaussian packets, kernels, Wigner functions and nonlinear Ermakov eigenproblems"};
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, CLI::Option*>> opts;
    auto add = [&](const std::string& key, const std::string& help) {
        opts.emplace_back(key, app.add_option("--" + key, values[key], help));
    };
    std::string positional, config_path;
    app.add_option("scenario_name", positional, "scenario (same as --scenario)");
    add("scenario", "propagate | invariant | kernel | wigner | eigensolve | susy");
    add("profile", "free | constant:w | parametric:w0,eps,drive | tabulated (arrays from --config)");
    add("potential", "ho[:omega] | coulomb[:e2]");
    add("alpha0", "initial width alpha0");
    add("beta0", "initial width as beta0 = 1/alpha0^2");
    add("p0", "initial momentum");
    add("eta0", "initial classical position (invariant, wigner)");
    add("v0", "initial classical velocity (default p0/m)");
    add("hbar", "hbar (default 1)");
    add("mass", "mass (default 1)");
    add("t", "time a..b or single time a");
    add("t0", "start time");
    add("t1", "end time");
    add("samples", "number of time samples");
    add("n", "quantum number k or range lo..hi");
    add("l", "angular momentum (coulomb)");
    add("levels", "SUSY hierarchy depth");
    add("tol", "integrator tolerance");
    add("x_min", "spatial grid start");
    add("x_max", "spatial grid end");
    add("points", "spatial grid points");
    add("method", "steepest_descent | real_line | trapezoid");
    add("out", "output directory (default $ERMAKOV_LAB_OUT or ./ermakov_out)");
    add("format", "csv,json subset");
    app.add_option("--config", config_path, "JSON file with the same keys; flags override it");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return e.get_exit_code() == 0 ? code : exit_validation;
    }

    Json raw = Json::object();
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) {
            err << "validation error: cannot read config " << config_path << "\n";
            return exit_validation;
        }
        try {
            raw = Json::parse(f);
        } catch (const nlohmann::json::exception& e) {
            err << "validation error: config " << config_path << ": " << e.what() << "\n";
            return exit_validation;
        }
        if (!raw.is_object()) {
            err << "validation error: config must be a JSON object\n";
            return exit_validation;
        }
    }
    if (!positional.empty())
        raw["scenario"] = positional;
    for (const auto& [key, opt] : opts)
        if (opt->count() > 0)
            raw[key] = values[key];
    return run(raw, out, err);
}

} // namespace ermakov::cli
