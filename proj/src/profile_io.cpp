#include "floquet/profile_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace floquet {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError("profile: " + where + ": " + what);
}

double get_number(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key)) fail(where + "." + key, "missing");
    if (!j[key].is_number()) fail(where + "." + key, "expected a number");
    return j[key].get<double>();
}

Coefficient parse_coeff(const json& j, const std::string& where) {
    if (j.is_number()) // shorthand: bare number means constant
        return Coefficient::constant_value(j.get<double>());
    if (!j.is_object()) fail(where, "expected a number or {kind, data}");
    if (!j.contains("kind") || !j["kind"].is_string()) fail(where + ".kind", "missing or not a string");
    if (!j.contains("data") || !j["data"].is_array()) fail(where + ".data", "missing or not an array");

    Coefficient c;
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "constant") c.kind = CoeffKind::Constant;
    else if (kind == "polynomial") c.kind = CoeffKind::Polynomial;
    else if (kind == "sampled") c.kind = CoeffKind::Sampled;
    else fail(where + ".kind", "unknown kind '" + kind + "'");

    for (const auto& v : j["data"]) {
        if (!v.is_number()) fail(where + ".data", "non-numeric entry");
        c.data.push_back(v.get<double>());
    }
    if (c.data.empty()) fail(where + ".data", "empty");
    if (c.kind == CoeffKind::Constant && c.data.size() != 1)
        fail(where + ".data", "constant takes exactly one value");
    if (c.kind == CoeffKind::Sampled) {
        if (c.data.size() < 4 || c.data.size() % 2 != 0)
            fail(where + ".data", "sampled data must be [y0,v0,y1,v1,...] with >= 2 nodes");
        for (size_t i = 2; i < c.data.size(); i += 2)
            if (!(c.data[i] > c.data[i - 2]))
                fail(where + ".data", "sample ordinates must increase");
    }
    return c;
}

} // namespace

MaterialProfile parse_profile(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("profile: ") + e.what());
    }
    if (!j.is_object()) fail("<root>", "expected an object");
    double period = 1.0;
    if (j.contains("period")) {
        if (!j["period"].is_number()) fail("period", "expected a number");
        period = j["period"].get<double>();
        if (!(period > 0.0)) fail("period", "must be positive");
    }
    if (!j.contains("segments") || !j["segments"].is_array() || j["segments"].empty())
        fail("segments", "missing or empty");

    bool any_plain = false, any_mono = false;
    for (const auto& s : j["segments"]) {
        (s.is_object() && s.contains("monoclinic") ? any_mono : any_plain) = true;
    }
    if (any_plain && any_mono)
        fail("segments", "cannot mix monoclinic and plain segments");

    if (any_mono) {
        std::vector<MonoclinicSegment> segs;
        size_t i = 0;
        for (const auto& s : j["segments"]) {
            const std::string where = "segments[" + std::to_string(i++) + "]";
            if (!s.is_object()) fail(where, "expected an object");
            MonoclinicSegment m;
            m.from = get_number(s, where, "from");
            m.to = get_number(s, where, "to");
            const json& mc = s["monoclinic"];
            if (!mc.is_object()) fail(where + ".monoclinic", "expected an object");
            for (const char* key : {"c44", "c45", "c55", "rho"})
                if (!mc.contains(key)) fail(where + ".monoclinic." + key, "missing");
            m.c44 = parse_coeff(mc["c44"], where + ".monoclinic.c44");
            m.c45 = parse_coeff(mc["c45"], where + ".monoclinic.c45");
            m.c55 = parse_coeff(mc["c55"], where + ".monoclinic.c55");
            m.rho = parse_coeff(mc["rho"], where + ".monoclinic.rho");
            segs.push_back(std::move(m));
        }
        return reduce_monoclinic(segs, period);
    }

    std::vector<Segment> segs;
    size_t i = 0;
    for (const auto& s : j["segments"]) {
        const std::string where = "segments[" + std::to_string(i++) + "]";
        if (!s.is_object()) fail(where, "expected an object");
        Segment seg;
        seg.from = get_number(s, where, "from");
        seg.to = get_number(s, where, "to");
        for (const char* key : {"rho", "mu1", "mu2"})
            if (!s.contains(key)) fail(where + "." + key, "missing");
        seg.rho = parse_coeff(s["rho"], where + ".rho");
        seg.mu1 = parse_coeff(s["mu1"], where + ".mu1");
        seg.mu2 = parse_coeff(s["mu2"], where + ".mu2");
        segs.push_back(std::move(seg));
    }
    return MaterialProfile(std::move(segs), period);
}

MaterialProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("profile: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_profile(ss.str());
}

std::string profile_to_json(const MaterialProfile& p) {
    json j;
    j["period"] = 1.0;
    j["period_scale"] = p.period_scale();
    json segs = json::array();
    for (const auto& s : p.segments()) {
        json seg;
        seg["from"] = s.from;
        seg["to"] = s.to;
        auto dump = [](const Coefficient& c) {
            json out;
            switch (c.kind) {
            case CoeffKind::Constant: out["kind"] = "constant"; break;
            case CoeffKind::Polynomial: out["kind"] = "polynomial"; break;
            case CoeffKind::Sampled: out["kind"] = "sampled"; break;
            }
            out["data"] = c.data;
            return out;
        };
        seg["rho"] = dump(s.rho);
        seg["mu1"] = dump(s.mu1);
        seg["mu2"] = dump(s.mu2);
        segs.push_back(std::move(seg));
    }
    j["segments"] = std::move(segs);
    return j.dump(2);
}

} // namespace floquet
