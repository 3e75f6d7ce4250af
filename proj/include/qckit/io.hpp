#pragma once

#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qckit/generators.hpp"
#include "qckit/multiset.hpp"
#include "qckit/spectrum.hpp"

namespace qckit {

using nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* key, const char* what) {
    auto it = j.find(key);
    if (it == j.end())
        throw std::invalid_argument(std::string(what) + ": missing field \"" + key + "\"");
    return *it;
}

inline double require_number(const json& j, const char* key, const char* what) {
    const json& v = require(j, key, what);
    if (!v.is_number())
        throw std::invalid_argument(std::string(what) + ": field \"" + key +
                                    "\" must be a number");
    return v.get<double>();
}

inline Window window_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw std::invalid_argument(std::string(what) +
                                    ": window must be a [lo, hi] number pair");
    return Window::closed(j[0].get<double>(), j[1].get<double>());
}

} // namespace detail

/// Parse with errors turned into the library's usual validation idiom so
/// callers see one exception family for "bad input".
inline json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("JSON parse error: ") + e.what());
    }
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str());
}

/// Write-then-rename so readers never observe a half-written file.
inline void write_text_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::invalid_argument("cannot open file for writing: " + tmp);
        out << content;
        if (!out)
            throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + tmp + " -> " + path);
}

// ---- multiset <-> JSON ----------------------------------------------------
//
// {"points": [[coordinate, multiplicity], ...],
//  "window": [lo, hi],
//  "nonzero": bool}
//
// Doubles survive the trip bit-exactly: the serializer emits the shortest
// representation that parses back to the same value.

inline json multiset_to_json(const PointMultiset& A) {
    json pts = json::array();
    const auto& xs = A.points();
    const auto& ms = A.mults();
    for (std::size_t i = 0; i < xs.size(); ++i)
        pts.push_back(json::array({xs[i], ms[i]}));
    return json{{"points", std::move(pts)},
                {"window", json::array({A.window_lo(), A.window_hi()})},
                {"nonzero", A.nonzero_flag()}};
}

inline PointMultiset multiset_from_json(const json& j) {
    const char* what = "multiset JSON";
    const json& pts = detail::require(j, "points", what);
    if (!pts.is_array())
        throw std::invalid_argument(std::string(what) + ": \"points\" must be an array");
    std::vector<WeightedPoint> entries;
    entries.reserve(pts.size());
    for (const auto& p : pts) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
            !p[1].is_number_integer())
            throw std::invalid_argument(
                std::string(what) +
                ": each point must be a [coordinate, integer multiplicity] pair");
        entries.push_back({p[0].get<double>(), p[1].get<std::int64_t>()});
    }
    Window w = detail::window_from_json(detail::require(j, "window", what), what);
    const json& nz = detail::require(j, "nonzero", what);
    if (!nz.is_boolean())
        throw std::invalid_argument(std::string(what) + ": \"nonzero\" must be a bool");
    // rebuild through the front door so every invariant is re-checked
    return build_multiset(std::move(entries), w, nz.get<bool>());
}

// ---- spectrum <-> JSON ----------------------------------------------------
//
// {"atoms": [[gamma, re, im], ...],
//  "band": [lo, hi],
//  "provenance": "analytic" | "empirical"}

inline json spectrum_to_json(const Spectrum& S) {
    json atoms = json::array();
    for (const auto& a : S.atoms())
        atoms.push_back(json::array({a.gamma, a.b.real(), a.b.imag()}));
    return json{{"atoms", std::move(atoms)},
                {"band", json::array({S.band_lo(), S.band_hi()})},
                {"provenance",
                 S.provenance() == Provenance::analytic ? "analytic" : "empirical"}};
}

inline Spectrum spectrum_from_json(const json& j) {
    const char* what = "spectrum JSON";
    const json& atoms = detail::require(j, "atoms", what);
    if (!atoms.is_array())
        throw std::invalid_argument(std::string(what) + ": \"atoms\" must be an array");
    std::vector<SpectralAtom> list;
    list.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() ||
            !a[2].is_number())
            throw std::invalid_argument(std::string(what) +
                                        ": each atom must be [gamma, re, im]");
        list.push_back({a[0].get<double>(),
                        std::complex<double>(a[1].get<double>(), a[2].get<double>())});
    }
    Window band = detail::window_from_json(detail::require(j, "band", what), what);
    const json& prov = detail::require(j, "provenance", what);
    if (!prov.is_string() ||
        (prov.get<std::string>() != "analytic" && prov.get<std::string>() != "empirical"))
        throw std::invalid_argument(
            std::string(what) + ": \"provenance\" must be \"analytic\" or \"empirical\"");
    return Spectrum(std::move(list), band.lo, band.hi,
                    prov.get<std::string>() == "analytic" ? Provenance::analytic
                                                          : Provenance::empirical);
}

// ---- generator specs ------------------------------------------------------
//
// {"kind": "lattice", "alpha": a, "shift": s, "window": [lo, hi]}
// {"kind": "union", "parts": [<generator spec>, ...], "merge_tol": t?}
// {"kind": "trigpoly", "terms": [[re, im, omega], ...], "window": [lo, hi],
//  "scan_step": h, "mult_threshold": m?}
//
// Union parts recurse, so unions of unions or of scanned zero sets work.

inline PointMultiset generate_from_json(const json& j) {
    const char* what = "generator JSON";
    const json& kind = detail::require(j, "kind", what);
    if (!kind.is_string())
        throw std::invalid_argument(std::string(what) + ": \"kind\" must be a string");
    std::string k = kind.get<std::string>();

    if (k == "lattice") {
        LatticeSpec spec;
        spec.alpha = detail::require_number(j, "alpha", what);
        spec.shift = detail::require_number(j, "shift", what);
        spec.window = detail::window_from_json(detail::require(j, "window", what), what);
        return gen_lattice(spec);
    }
    if (k == "union") {
        const json& parts = detail::require(j, "parts", what);
        if (!parts.is_array() || parts.empty())
            throw std::invalid_argument(std::string(what) +
                                        ": \"parts\" must be a non-empty array");
        std::vector<PointMultiset> built;
        built.reserve(parts.size());
        for (const auto& p : parts) built.push_back(generate_from_json(p));
        double merge_tol = j.contains("merge_tol")
                               ? detail::require_number(j, "merge_tol", what)
                               : 0.0;
        return gen_union(built, merge_tol);
    }
    if (k == "trigpoly") {
        TrigPolySpec spec;
        const json& terms = detail::require(j, "terms", what);
        if (!terms.is_array() || terms.empty())
            throw std::invalid_argument(std::string(what) +
                                        ": \"terms\" must be a non-empty array");
        for (const auto& t : terms) {
            if (!t.is_array() || t.size() != 3 || !t[0].is_number() ||
                !t[1].is_number() || !t[2].is_number())
                throw std::invalid_argument(std::string(what) +
                                            ": each term must be [re, im, omega]");
            spec.terms.push_back(
                {std::complex<double>(t[0].get<double>(), t[1].get<double>()),
                 t[2].get<double>()});
        }
        spec.window = detail::window_from_json(detail::require(j, "window", what), what);
        double scan_step = detail::require_number(j, "scan_step", what);
        double mult_threshold = j.contains("mult_threshold")
                                    ? detail::require_number(j, "mult_threshold", what)
                                    : 1e-9;
        return gen_trig_poly_zeros(spec, scan_step, mult_threshold).zeros;
    }
    throw std::invalid_argument(std::string(what) + ": unknown kind \"" + k + "\"");
}

} // namespace qckit
