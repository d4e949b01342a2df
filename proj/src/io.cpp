#include "hsprg/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace hsprg {

namespace {

template <class T>
T field(const Json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) {
        throw InvalidInput(std::string("missing JSON field '") + name + "'");
    }
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("bad JSON field '") + name + "': " + e.what());
    }
}

} // namespace

Json to_json(const Rational& r) { return to_string(r); }

Json to_json(const Halfspace& h) {
    Json j;
    j["weights"] = h.weights;
    j["theta"] = h.theta;
    return j;
}

Halfspace halfspace_from_json(const Json& j) {
    return make_halfspace(field<std::vector<double>>(j, "weights"), field<double>(j, "theta"));
}

Json to_json(const SpaceDescriptor& d) {
    Json j;
    j["n"] = d.n;
    j["k"] = d.k;
    j["s"] = d.s;
    j["construction"] = to_string(d.construction);
    j["modulus"] = d.modulus;
    return j;
}

SpaceDescriptor descriptor_from_json(const Json& j) {
    SpaceDescriptor d;
    d.n = field<std::size_t>(j, "n");
    d.k = field<std::size_t>(j, "k");
    d.s = field<unsigned>(j, "s");
    d.construction = parse_construction(field<std::string>(j, "construction"));
    d.modulus = field<std::uint64_t>(j, "modulus");
    return d;
}

Json to_json(const UniPoly& p) {
    Json j;
    j["interval"] = {p.lo(), p.hi()};
    j["basis"] = "chebyshev";
    Json coeffs = Json::array();
    for (const auto& c : p.coeffs()) {
        coeffs.push_back(to_decimal(c));
    }
    j["coeffs"] = std::move(coeffs);
    return j;
}

UniPoly poly_from_json(const Json& j, unsigned bits) {
    const auto interval = field<std::vector<double>>(j, "interval");
    if (interval.size() != 2 || !(interval[0] < interval[1])) {
        throw InvalidInput("polynomial interval must be [lo, hi] with lo < hi");
    }
    if (field<std::string>(j, "basis") != "chebyshev") {
        throw InvalidInput("only the chebyshev basis is supported");
    }
    const auto strings = field<std::vector<std::string>>(j, "coeffs");
    if (bits == 0) {
        std::size_t longest = 0;
        for (const auto& s : strings) longest = std::max(longest, s.size());
        bits = std::max<unsigned>(64, static_cast<unsigned>(std::ceil(longest * 3.3219281)) + 16);
    }
    PrecisionScope scope(bits);
    std::vector<Real> coeffs;
    coeffs.reserve(strings.size());
    for (const auto& s : strings) {
        coeffs.push_back(parse_real(s));
    }
    return UniPoly(interval[0], interval[1], std::move(coeffs));
}

Json to_json(const GapReport& g) {
    Json j;
    j["branch"] = to_string(g.branch);
    j["gap_u"] = decimal_string(g.gap_u);
    j["gap_l"] = decimal_string(g.gap_l);
    j["bound_10eps"] = decimal_string(g.bound_10eps);
    j["mode"] = to_string(g.mode);
    if (g.ci_u && g.ci_l) {
        j["ci"] = {{"u", decimal_string(*g.ci_u)}, {"l", decimal_string(*g.ci_l)}, {"level", "0.99"},
                   {"samples", g.samples}};
    } else {
        j["ci"] = nullptr;
    }
    return j;
}

bool RunConfig::operator==(const RunConfig& o) const {
    return command == o.command && eps == o.eps && C_const == o.C_const && c_const == o.c_const && mode == o.mode &&
           log_base == o.log_base && input == o.input && output == o.output && precision_bits == o.precision_bits &&
           rng_seed == o.rng_seed && limits.max_cube_dim == o.limits.max_cube_dim &&
           limits.max_seed_bits == o.limits.max_seed_bits && limits.max_head == o.limits.max_head &&
           limits.unsafe == o.limits.unsafe;
}

Json to_json(const RunConfig& c) {
    Json j;
    j["command"] = c.command;
    j["eps"] = c.eps;
    j["C_const"] = c.C_const;
    j["c_const"] = c.c_const;
    j["mode"] = to_string(c.mode);
    j["log_base"] = to_string(c.log_base);
    j["input"] = c.input;
    j["output"] = c.output;
    j["precision_bits"] = c.precision_bits;
    j["rng_seed"] = c.rng_seed ? Json(*c.rng_seed) : Json(nullptr);
    j["limits"] = {{"max_cube_dim", c.limits.max_cube_dim},
                   {"max_seed_bits", c.limits.max_seed_bits},
                   {"max_head", c.limits.max_head},
                   {"unsafe", c.limits.unsafe}};
    return j;
}

RunConfig config_from_json(const Json& j) {
    RunConfig c;
    c.command = field<std::string>(j, "command");
    c.eps = field<double>(j, "eps");
    c.C_const = field<double>(j, "C_const");
    c.c_const = field<double>(j, "c_const");
    c.mode = parse_schedule_mode(field<std::string>(j, "mode"));
    c.log_base = parse_log_base(field<std::string>(j, "log_base"));
    c.input = field<std::string>(j, "input");
    c.output = field<std::string>(j, "output");
    c.precision_bits = field<unsigned>(j, "precision_bits");
    if (!j.at("rng_seed").is_null()) {
        c.rng_seed = field<std::uint64_t>(j, "rng_seed");
    }
    const Json& l = j.at("limits");
    c.limits.max_cube_dim = field<int>(l, "max_cube_dim");
    c.limits.max_seed_bits = field<int>(l, "max_seed_bits");
    c.limits.max_head = field<int>(l, "max_head");
    c.limits.unsafe = field<bool>(l, "unsafe");
    return c;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open '" + path + "'");
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    out << text;
    if (!out) {
        throw Error("write to '" + path + "' failed");
    }
}

} // namespace hsprg
