//============================================================================
// JSON problem files: parse and serialize per the schema in problem_json.hpp.
// All schema errors carry the JSON pointer of the offending element.
//============================================================================

#include "fsm/problem_json.hpp"
#include "fsm/errors.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fsm {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_error(const std::string& ptr, const std::string& msg) {
    fail_parse(ptr + ": " + msg);
}

const json& member(const json& j, const std::string& ptr, const char* key) {
    if (!j.is_object()) schema_error(ptr, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) schema_error(ptr + "/" + key, "missing required key");
    return *it;
}

double number_at(const json& j, const std::string& ptr) {
    if (!j.is_number()) schema_error(ptr, "expected a number");
    return j.get<double>();
}

int int_at(const json& j, const std::string& ptr) {
    if (!j.is_number_integer()) schema_error(ptr, "expected an integer");
    return j.get<int>();
}

std::string string_at(const json& j, const std::string& ptr) {
    if (!j.is_string()) schema_error(ptr, "expected a string");
    return j.get<std::string>();
}

// "k": [k1] on intervals, [k1, k2] on rectangles
void orders_at(const json& j, const std::string& ptr, bool is_2d, int& k1, int& k2) {
    if (!j.is_array() || j.size() != (is_2d ? 2u : 1u))
        schema_error(ptr, is_2d ? "expected an array [k1, k2]" : "expected an array [k1]");
    k1 = int_at(j[0], ptr + "/0");
    k2 = is_2d ? int_at(j[1], ptr + "/1") : 0;
    if (k1 < 0 || k2 < 0) schema_error(ptr, "derivative orders must be nonnegative");
}

DomainKind kind_from(const std::string& s, const std::string& ptr) {
    if (s == "interval") return DomainKind::interval;
    if (s == "interval_symmetric") return DomainKind::interval_symmetric;
    if (s == "rect") return DomainKind::rect;
    if (s == "rect_symmetric") return DomainKind::rect_symmetric;
    schema_error(ptr, "unknown domain kind \"" + s + "\"");
}

Flavor flavor_from(const std::string& s, const std::string& ptr) {
    if (s == "full") return Flavor::full;
    if (s == "half_cosine") return Flavor::half_cosine;
    if (s == "half_sine") return Flavor::half_sine;
    if (s == "full_2d") return Flavor::full_2d;
    if (s == "sine_sine") return Flavor::sine_sine;
    schema_error(ptr, "unknown flavor \"" + s + "\"");
}

// number | expression-in-one-variable; var is the sampler argument
Sampler1D sampler_1d_at(const json& j, const std::string& ptr, int var,
                        bool number_only) {
    if (j.is_number()) return Sampler1D::from_constant(j.get<double>());
    if (!j.is_string())
        schema_error(ptr, number_only ? "expected a number"
                                      : "expected a number or expression string");
    if (number_only)
        schema_error(ptr, "boundary data must be a number on an interval problem");
    try {
        return Sampler1D::from_expression(j.get<std::string>(), var);
    } catch (const Error& e) {
        schema_error(ptr, e.what());
    }
}

Sampler2D sampler_2d_at(const json& j, const std::string& ptr) {
    if (j.is_number()) return Sampler2D::from_constant(j.get<double>());
    if (!j.is_string()) schema_error(ptr, "expected a number or expression string");
    try {
        return Sampler2D::from_expression(j.get<std::string>());
    } catch (const Error& e) {
        schema_error(ptr, e.what());
    }
}

// serialize side: numbers that round-trip as plain text stay numbers
json sampler_source_json(const std::string& src) {
    char* end = nullptr;
    const double v = std::strtod(src.c_str(), &end);
    if (end && *end == '\0' && end != src.c_str()) return json(v);
    return json(src);
}

constexpr const char* side_keys[4] = {"x1_max", "x1_min", "x2_max", "x2_min"};

} // namespace

ProblemSpec parse_problem(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail_parse(std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) schema_error("", "expected a JSON object at the top level");

    ProblemSpec spec;

    // domain
    {
        const json& jd = member(root, "", "domain");
        spec.domain.kind = kind_from(string_at(member(jd, "/domain", "kind"),
                                               "/domain/kind"),
                                     "/domain/kind");
        spec.domain.a = number_at(member(jd, "/domain", "a"), "/domain/a");
        if (spec.domain.is_2d())
            spec.domain.b = number_at(member(jd, "/domain", "b"), "/domain/b");
    }
    const bool is_2d = spec.domain.is_2d();

    // flavor
    spec.flavor = flavor_from(string_at(member(root, "", "flavor"), "/flavor"),
                              "/flavor");

    // operator
    {
        const json& jo = member(root, "", "operator");
        const int order = int_at(member(jo, "/operator", "order"), "/operator/order");
        if (order < 2 || order % 2 != 0)
            schema_error("/operator/order", "order must be an even integer >= 2");
        const json& jc = member(jo, "/operator", "coeffs");
        if (!jc.is_array()) schema_error("/operator/coeffs", "expected an array");
        if (is_2d) {
            Operator2D op = Operator2D::make(order);
            for (std::size_t i = 0; i < jc.size(); ++i) {
                const std::string ptr = "/operator/coeffs/" + std::to_string(i);
                int k1, k2;
                orders_at(member(jc[i], ptr, "k"), ptr + "/k", true, k1, k2);
                if (k1 + k2 > order)
                    schema_error(ptr + "/k", "total derivative order exceeds the operator order");
                op.set(k1, k2, number_at(member(jc[i], ptr, "a"), ptr + "/a"));
            }
            spec.op2 = op;
        } else {
            Operator1D op;
            op.order = order;
            op.coeffs.assign(static_cast<std::size_t>(order) + 1, 0.0);
            for (std::size_t i = 0; i < jc.size(); ++i) {
                const std::string ptr = "/operator/coeffs/" + std::to_string(i);
                int k1, k2;
                orders_at(member(jc[i], ptr, "k"), ptr + "/k", false, k1, k2);
                if (k1 > order)
                    schema_error(ptr + "/k", "derivative order exceeds the operator order");
                op.coeffs[static_cast<std::size_t>(k1)] =
                    number_at(member(jc[i], ptr, "a"), ptr + "/a");
            }
            spec.op1 = op;
        }
    }

    // truncation
    {
        const json& jt = member(root, "", "truncation");
        spec.trunc.M = int_at(member(jt, "/truncation", "M"), "/truncation/M");
        if (jt.contains("N"))
            spec.trunc.N = int_at(jt["N"], "/truncation/N");
        else
            spec.trunc.N = is_2d ? spec.trunc.M : 0;
    }

    // forcing
    {
        const json& jf = member(root, "", "forcing");
        const json& f = member(jf, "/forcing", "f");
        if (is_2d)
            spec.forcing.f2 = sampler_2d_at(f, "/forcing/f");
        else
            spec.forcing.f1 = sampler_1d_at(f, "/forcing/f", 0, false);
        if (jf.contains("fs_poly")) {
            const json& jp = jf["fs_poly"];
            if (!jp.is_array()) schema_error("/forcing/fs_poly", "expected an array");
            int top1 = 0, top2 = 0;
            std::vector<std::tuple<int, int, double>> terms;
            for (std::size_t i = 0; i < jp.size(); ++i) {
                const std::string ptr = "/forcing/fs_poly/" + std::to_string(i);
                int k1, k2;
                orders_at(member(jp[i], ptr, "k"), ptr + "/k", is_2d, k1, k2);
                const double c = number_at(member(jp[i], ptr, "c"), ptr + "/c");
                terms.emplace_back(k1, k2, c);
                top1 = std::max(top1, k1);
                top2 = std::max(top2, k2);
            }
            if (is_2d) {
                RealPoly2 p = RealPoly2::zeros(top1 + 1, top2 + 1);
                for (const auto& [k1, k2, c] : terms) p.at(k1, k2) = c;
                spec.forcing.fs2 = p;
            } else {
                RealPoly1 p;
                p.c.assign(static_cast<std::size_t>(top1) + 1, 0.0);
                for (const auto& [k1, k2, c] : terms) {
                    (void)k2;
                    p.c[static_cast<std::size_t>(k1)] = c;
                }
                spec.forcing.fs1 = p;
            }
        }
    }

    // boundary conditions
    {
        const json& jb = member(root, "", "bcs");
        if (!jb.is_object()) schema_error("/bcs", "expected an object keyed by side");
        for (const auto& item : jb.items())
            if (item.key() != "x1_max" && item.key() != "x1_min" &&
                item.key() != "x2_max" && item.key() != "x2_min")
                schema_error("/bcs/" + item.key(), "unknown side");
        const int nsides = is_2d ? 4 : 2;
        for (int sd = 0; sd < nsides; ++sd) {
            const std::string ptr = std::string("/bcs/") + side_keys[sd];
            const json& js = member(jb, "/bcs", side_keys[sd]);
            if (!js.is_array()) schema_error(ptr, "expected an array of conditions");
            // tangential coordinate: x2 on x1-sides, x1 on x2-sides
            const int tangent_var = sd < 2 ? 1 : 0;
            for (std::size_t i = 0; i < js.size(); ++i) {
                const std::string cptr = ptr + "/" + std::to_string(i);
                BoundaryCondition bc;
                const json& jcv = member(js[i], cptr, "coeffs");
                if (!jcv.is_array() || jcv.empty())
                    schema_error(cptr + "/coeffs", "expected a nonempty array");
                for (std::size_t t = 0; t < jcv.size(); ++t) {
                    const std::string tptr = cptr + "/coeffs/" + std::to_string(t);
                    BoundaryTerm term;
                    orders_at(member(jcv[t], tptr, "k"), tptr + "/k", is_2d,
                              term.k1, term.k2);
                    term.b = number_at(member(jcv[t], tptr, "b"), tptr + "/b");
                    bc.op.terms.push_back(term);
                }
                bc.g = sampler_1d_at(member(js[i], cptr, "g"), cptr + "/g",
                                     tangent_var, /*number_only=*/!is_2d);
                spec.bcs.on(static_cast<Side>(sd)).push_back(std::move(bc));
            }
        }
    }

    return spec;
}

std::string serialize_problem(const ProblemSpec& spec) {
    const bool is_2d = spec.domain.is_2d();
    json root;

    json jd;
    switch (spec.domain.kind) {
        case DomainKind::interval: jd["kind"] = "interval"; break;
        case DomainKind::interval_symmetric: jd["kind"] = "interval_symmetric"; break;
        case DomainKind::rect: jd["kind"] = "rect"; break;
        case DomainKind::rect_symmetric: jd["kind"] = "rect_symmetric"; break;
    }
    jd["a"] = spec.domain.a;
    if (is_2d) jd["b"] = spec.domain.b;
    root["domain"] = jd;

    json jo;
    json coeffs = json::array();
    if (is_2d && spec.op2) {
        jo["order"] = spec.op2->order;
        for (int k1 = 0; k1 <= spec.op2->order; ++k1)
            for (int k2 = 0; k1 + k2 <= spec.op2->order; ++k2)
                if (spec.op2->coeff(k1, k2) != 0.0)
                    coeffs.push_back({{"k", {k1, k2}}, {"a", spec.op2->coeff(k1, k2)}});
    } else if (spec.op1) {
        jo["order"] = spec.op1->order;
        for (int k = 0; k <= spec.op1->order; ++k)
            if (spec.op1->coeff(k) != 0.0)
                coeffs.push_back({{"k", {k}}, {"a", spec.op1->coeff(k)}});
    }
    jo["coeffs"] = coeffs;
    root["operator"] = jo;

    root["flavor"] = flavor_name(spec.flavor);

    json jt;
    jt["M"] = spec.trunc.M;
    if (is_2d) jt["N"] = spec.trunc.N;
    root["truncation"] = jt;

    json jf;
    jf["f"] = sampler_source_json(is_2d ? spec.forcing.f2.source()
                                        : spec.forcing.f1.source());
    if (is_2d && spec.forcing.fs2) {
        json jp = json::array();
        const RealPoly2& p = *spec.forcing.fs2;
        for (int j1 = 0; j1 < p.n1; ++j1)
            for (int j2 = 0; j2 < p.n2; ++j2)
                if (p.at(j1, j2) != 0.0)
                    jp.push_back({{"k", {j1, j2}}, {"c", p.at(j1, j2)}});
        jf["fs_poly"] = jp;
    } else if (!is_2d && spec.forcing.fs1) {
        json jp = json::array();
        const RealPoly1& p = *spec.forcing.fs1;
        for (std::size_t k = 0; k < p.c.size(); ++k)
            if (p.c[k] != 0.0) jp.push_back({{"k", {k}}, {"c", p.c[k]}});
        jf["fs_poly"] = jp;
    }
    root["forcing"] = jf;

    json jb;
    const int nsides = is_2d ? 4 : 2;
    for (int sd = 0; sd < nsides; ++sd) {
        json side = json::array();
        for (const BoundaryCondition& bc : spec.bcs.on(static_cast<Side>(sd))) {
            json jc;
            json terms = json::array();
            for (const BoundaryTerm& t : bc.op.terms) {
                json k = is_2d ? json{t.k1, t.k2} : json{t.k1};
                terms.push_back({{"k", k}, {"b", t.b}});
            }
            jc["coeffs"] = terms;
            jc["g"] = sampler_source_json(bc.g.source());
            side.push_back(jc);
        }
        jb[side_keys[sd]] = side;
    }
    root["bcs"] = jb;

    return root.dump(2) + "\n";
}

ProblemSpec load_problem_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_parse("cannot open problem file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_problem(ss.str());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::parse)
            fail_parse(path + ": " + e.what());
        throw;
    }
}

} // namespace fsm
