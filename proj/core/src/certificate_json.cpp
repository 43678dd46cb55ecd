#include <string>

#include <json.hpp>

#include "gapforge/covering.hpp"

namespace gapforge {

namespace {

using nlohmann::ordered_json;

ordered_json rational_json(const Rational& r) { return ordered_json{{"num", r.num()}, {"den", r.den()}}; }

[[noreturn]] void malformed(const std::string& what) {
    throw Error(Errc::InvalidArgument, "malformed certificate: " + what);
}

const ordered_json& field(const ordered_json& obj, const char* key) {
    if (!obj.is_object()) malformed("expected an object holding '" + std::string(key) + "'");
    const auto it = obj.find(key);
    if (it == obj.end()) malformed("missing field '" + std::string(key) + "'");
    return *it;
}

u64 nat(const ordered_json& obj, const char* key) {
    const auto& v = field(obj, key);
    if (!v.is_number_unsigned()) malformed("field '" + std::string(key) + "' must be a natural number");
    return v.get<u64>();
}

Rational rational(const ordered_json& obj, const char* key) {
    const auto& v = field(obj, key);
    const u64 den = nat(v, "den");
    if (den == 0) malformed("field '" + std::string(key) + "' has zero denominator");
    return Rational(nat(v, "num"), den);
}

BigNat decimal(const ordered_json& obj, const char* key) {
    const auto& v = field(obj, key);
    if (!v.is_string()) malformed("field '" + std::string(key) + "' must be a decimal string");
    try {
        return BigNat::from_decimal(v.get<std::string>());
    } catch (const Error&) {
        malformed("field '" + std::string(key) + "' is not a decimal natural number");
    }
}

}  // namespace

std::string certificate_to_json(const CoveringCertificate& cert, const std::optional<CrtWitness>& witness) {
    ordered_json classes = ordered_json::array();
    for (const auto& c : cert.classes) {
        classes.push_back(ordered_json{{"p", c.p}, {"a", c.a}, {"kind", std::string(to_string(c.kind))}});
    }
    ordered_json doc;
    doc["x"] = cert.x;
    doc["q"] = cert.q;
    doc["b"] = cert.b;
    doc["delta"] = rational_json(cert.delta);
    doc["u"] = cert.u;
    doc["y"] = cert.y;
    doc["survivors_initial"] = cert.survivors_initial;
    doc["survivors_after_greedy"] = cert.survivors_after_greedy;
    doc["classes"] = std::move(classes);
    if (witness) doc["witness"] = ordered_json{{"T", witness->T.to_decimal()}, {"P", witness->P.to_decimal()}};
    doc["bound"] = ordered_json{{"jacobsthal_u", cert.u}, {"gap_lower_rational", rational_json(cert.gap_lower_rational())}};
    return doc.dump(2) + "\n";
}

CertificateDocument certificate_from_json(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        malformed(e.what());
    }
    CertificateDocument out;
    CoveringCertificate& c = out.certificate;
    c.x = nat(doc, "x");
    c.q = nat(doc, "q");
    c.b = nat(doc, "b");
    c.delta = rational(doc, "delta");
    c.u = nat(doc, "u");
    c.y = nat(doc, "y");
    c.survivors_initial = nat(doc, "survivors_initial");
    c.survivors_after_greedy = nat(doc, "survivors_after_greedy");
    const auto& classes = field(doc, "classes");
    if (!classes.is_array()) malformed("field 'classes' must be an array");
    for (const auto& entry : classes) {
        const auto& kind_field = field(entry, "kind");
        if (!kind_field.is_string()) malformed("class kind must be a string");
        const auto kind = parse_class_kind(kind_field.get<std::string>());
        if (!kind) malformed("unknown class kind '" + kind_field.get<std::string>() + "'");
        c.classes.push_back(ResidueClass{nat(entry, "p"), nat(entry, "a"), *kind});
    }
    if (doc.contains("witness")) {
        const auto& w = doc["witness"];
        out.witness = CrtWitness{decimal(w, "T"), decimal(w, "P"), c.y};
    }
    const auto& bound = field(doc, "bound");
    out.bound_jacobsthal_u = nat(bound, "jacobsthal_u");
    out.bound_gap_lower = rational(bound, "gap_lower_rational");
    return out;
}

std::string report_to_json(const VerificationReport& report) {
    ordered_json out = ordered_json::array();
    for (const auto& c : report.checks) {
        out.push_back(ordered_json{{"check", c.check}, {"pass", c.pass}, {"detail", c.detail}});
    }
    return out.dump(2) + "\n";
}

}  // namespace gapforge
