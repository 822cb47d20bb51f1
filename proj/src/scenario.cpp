#include "defectgeo/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "defectgeo/errors.hpp"

namespace defectgeo {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

/// A value as written: one quoted string or a tuple of them.
struct RawValue {
    std::vector<std::string> items;
    bool tuple = false;
    std::size_t line = 0;
};

RawValue parse_value(std::string_view text, std::size_t line, const std::string& key)
{
    RawValue v;
    v.line = line;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    };
    auto fail = [&](const std::string& why) -> void { throw ScenarioError("key '" + key + "': " + why, line); };
    auto quoted = [&] {
        skip();
        if (i >= text.size() || text[i] != '"') fail("expected a double-quoted value");
        const auto close = text.find('"', i + 1);
        if (close == std::string_view::npos) fail("unterminated string");
        std::string s(text.substr(i + 1, close - i - 1));
        i = close + 1;
        return s;
    };
    skip();
    if (i < text.size() && text[i] == '(') {
        v.tuple = true;
        ++i;
        for (;;) {
            v.items.push_back(quoted());
            skip();
            if (i < text.size() && text[i] == ',') {
                ++i;
                continue;
            }
            if (i < text.size() && text[i] == ')') {
                ++i;
                break;
            }
            fail("expected ',' or ')' in tuple");
        }
    } else {
        v.items.push_back(quoted());
    }
    skip();
    if (i < text.size() && text[i] != '#') fail("unexpected text after value");
    return v;
}

struct SectionData {
    std::size_t line = 0;
    std::map<std::string, RawValue> values;
};

struct Reader {
    const std::map<std::string, SectionData>& sections;

    const SectionData* section(const std::string& name) const
    {
        auto it = sections.find(name);
        return it == sections.end() ? nullptr : &it->second;
    }

    static Expr expression(const std::string& text, std::size_t line, const std::string& key)
    {
        try {
            return parse_expr(text);
        } catch (const ParseError& e) {
            throw ScenarioError("key '" + key + "': " + e.what(), line);
        }
    }

    static const RawValue& expect_scalar(const RawValue& v, const std::string& key)
    {
        if (v.tuple || v.items.size() != 1) throw ScenarioError("key '" + key + "': expected a single value", v.line);
        return v;
    }

    static Expr scalar_expr(const RawValue& v, const std::string& key)
    {
        return expression(expect_scalar(v, key).items[0], v.line, key);
    }

    static ExprVec3 vector_expr(const RawValue& v, const std::string& key)
    {
        if (!v.tuple || v.items.size() != 3) {
            throw ScenarioError("key '" + key + "': expected a tuple of three expressions", v.line);
        }
        return {expression(v.items[0], v.line, key), expression(v.items[1], v.line, key),
                expression(v.items[2], v.line, key)};
    }

    static double constant(const RawValue& v, const std::string& key)
    {
        const Expr e = scalar_expr(v, key);
        if (!e.is_constant()) throw ScenarioError("key '" + key + "': expected a constant", v.line);
        return e.value();
    }

    static Vec3 constant_vector(const RawValue& v, const std::string& key)
    {
        const ExprVec3 e = vector_expr(v, key);
        Vec3 out{};
        for (int i = 0; i < 3; ++i) {
            if (!e[i].is_constant()) throw ScenarioError("key '" + key + "': expected constants", v.line);
            out[i] = e[i].value();
        }
        return out;
    }

    static std::string word(const RawValue& v, const std::string& key)
    {
        return expect_scalar(v, key).items[0];
    }
};

const std::map<std::string, std::set<std::string>>& known_keys()
{
    static const std::map<std::string, std::set<std::string>> keys{
        {"coframe", {"e1", "e2", "e3"}},
        {"gauge", {"row1", "row2", "row3"}},
        {"defects", {"b", "Omega", "m", "rho", "phi", "c1", "c2"}},
        {"deformation", {"inverse", "forward", "density", "velocity", "body_force"}},
        {"material", {"lambda", "mu", "kappa", "G", "nu", "R_outer", "r_core"}},
        {"couplings", {"kappa1", "kappa2", "kappa3", "kappa4", "kappa5", "kappa6", "kappa7"}},
        {"numerics",
         {"h", "tolerance", "grid_min", "grid_max", "resolution", "strategy", "frank_mode", "sphere_center",
          "sphere_radius", "volume_resolution", "sphere_resolution"}},
    };
    return keys;
}

int positive_integer(const RawValue& v, const std::string& key, int minimum)
{
    const double d = Reader::constant(v, key);
    if (d != std::floor(d) || d < minimum || d > 1e6) {
        throw ScenarioError("key '" + key + "': expected an integer >= " + std::to_string(minimum), v.line);
    }
    return static_cast<int>(d);
}

ExprMat3 identity_matrix()
{
    ExprMat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = Expr(i == j ? 1.0 : 0.0);
    return m;
}

}  // namespace

Scenario parse_scenario(std::string_view text)
{
    std::map<std::string, SectionData> sections;
    SectionData* current = nullptr;
    std::string current_name;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == '[') {
            const auto close = line.find(']');
            if (close == std::string_view::npos) throw ScenarioError("unterminated section header", line_no);
            const std::string_view rest = trim(line.substr(close + 1));
            if (!rest.empty() && rest[0] != '#') throw ScenarioError("unexpected text after section header", line_no);
            const std::string name(trim(line.substr(1, close - 1)));
            if (!known_keys().count(name)) throw ScenarioError("unknown section [" + name + "]", line_no);
            auto it = sections.find(name);
            if (it != sections.end()) {
                throw ScenarioError("duplicate section [" + name + "] at lines " + std::to_string(it->second.line) +
                                        " and " + std::to_string(line_no),
                                    line_no);
            }
            current = &sections[name];
            current->line = line_no;
            current_name = name;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ScenarioError("expected 'key = value'", line_no);
        const std::string key(trim(line.substr(0, eq)));
        if (!current) throw ScenarioError("key '" + key + "' outside of any section", line_no);
        if (!known_keys().at(current_name).count(key)) {
            throw ScenarioError("unknown key '" + key + "' in section [" + current_name + "]", line_no);
        }
        auto existing = current->values.find(key);
        if (existing != current->values.end()) {
            throw ScenarioError("duplicate key '" + key + "' in section [" + current_name + "] at lines " +
                                    std::to_string(existing->second.line) + " and " + std::to_string(line_no),
                                line_no);
        }
        current->values.emplace(key, parse_value(line.substr(eq + 1), line_no, key));
    }

    Scenario s;
    s.source = std::string(text);
    s.coframe = identity_matrix();
    for (const auto& [name, data] : sections) s.sections[name] = data.line;
    const Reader r{sections};
    using R = Reader;

    if (const auto* sec = r.section("coframe")) {
        const char* names[3] = {"e1", "e2", "e3"};
        for (int a = 0; a < 3; ++a) {
            auto it = sec->values.find(names[a]);
            if (it != sec->values.end()) s.coframe[a] = R::vector_expr(it->second, names[a]);
        }
    }

    if (const auto* sec = r.section("gauge")) {
        ExprMat3 g;
        const char* names[3] = {"row1", "row2", "row3"};
        for (int a = 0; a < 3; ++a) {
            auto it = sec->values.find(names[a]);
            if (it == sec->values.end()) {
                throw ScenarioError("section [gauge] is missing key '" + std::string(names[a]) + "'", sec->line);
            }
            g[a] = R::vector_expr(it->second, names[a]);
        }
        s.gauge = g;
    }

    if (const auto* sec = r.section("defects")) {
        for (const auto& [key, v] : sec->values) {
            if (key == "b") s.defects.burgers = R::vector_expr(v, key);
            if (key == "Omega") s.defects.frank = R::vector_expr(v, key);
            if (key == "m") s.defects.point = R::vector_expr(v, key);
            if (key == "rho") s.defects.scalar = R::scalar_expr(v, key);
            if (key == "phi") s.defects.potential = R::scalar_expr(v, key);
            if (key == "c1") s.defects.c1 = R::constant(v, key);
            if (key == "c2") s.defects.c2 = R::constant(v, key);
        }
    }

    if (const auto* sec = r.section("deformation")) {
        DeformationSpec d;
        for (const auto& [key, v] : sec->values) {
            if (key == "inverse") d.inverse = R::vector_expr(v, key);
            if (key == "forward") d.forward = R::vector_expr(v, key);
            if (key == "density") d.density = R::scalar_expr(v, key);
            if (key == "velocity") d.velocity = R::vector_expr(v, key);
            if (key == "body_force") d.body_force = R::vector_expr(v, key);
        }
        if (d.inverse.has_value() == d.forward.has_value()) {
            throw ScenarioError("section [deformation] needs exactly one of 'inverse' or 'forward'", sec->line);
        }
        s.deformation = d;
    }

    if (const auto* sec = r.section("material")) {
        MaterialConstants& m = s.material;
        for (const auto& [key, v] : sec->values) {
            const double c = R::constant(v, key);
            if (key == "lambda") m.lambda = c;
            if (key == "mu") m.mu = c;
            if (key == "kappa") m.kappa = c;
            if (key == "G") m.shear_modulus = c;
            if (key == "nu") m.poisson_ratio = c;
            if (key == "R_outer") m.outer_radius = c;
            if (key == "r_core") m.core_radius = c;
        }
    }

    if (const auto* sec = r.section("couplings")) {
        for (const auto& [key, v] : sec->values) {
            const int i = key.back() - '1';
            s.couplings.kappa[static_cast<std::size_t>(i)] = R::constant(v, key);
        }
    }

    if (const auto* sec = r.section("numerics")) {
        NumericsSpec& n = s.numerics;
        for (const auto& [key, v] : sec->values) {
            if (key == "h") {
                n.step = R::constant(v, key);
                if (!(n.step > 0.0)) throw ScenarioError("key 'h': step must be positive", v.line);
            }
            if (key == "tolerance") {
                n.tolerance = R::constant(v, key);
                if (!(n.tolerance > 0.0)) throw ScenarioError("key 'tolerance': must be positive", v.line);
            }
            if (key == "grid_min") n.grid_min = R::constant_vector(v, key);
            if (key == "grid_max") n.grid_max = R::constant_vector(v, key);
            if (key == "resolution") n.resolution = positive_integer(v, key, 2);
            if (key == "volume_resolution") n.volume_resolution = positive_integer(v, key, 2);
            if (key == "sphere_resolution") n.sphere_resolution = positive_integer(v, key, 2);
            if (key == "sphere_center") n.sphere_center = R::constant_vector(v, key);
            if (key == "sphere_radius") {
                n.sphere_radius = R::constant(v, key);
                if (!(n.sphere_radius > 0.0)) throw ScenarioError("key 'sphere_radius': must be positive", v.line);
            }
            if (key == "strategy") {
                const std::string w = R::word(v, key);
                if (w == "symbolic") {
                    n.strategy = Strategy::Symbolic;
                } else if (w == "finite_difference") {
                    n.strategy = Strategy::FiniteDifference;
                } else {
                    throw ScenarioError("key 'strategy': expected \"symbolic\" or \"finite_difference\"", v.line);
                }
            }
            if (key == "frank_mode") {
                const std::string w = R::word(v, key);
                if (w == "literal") {
                    n.frank_mode = FrankMode::Literal;
                } else if (w == "raw") {
                    n.frank_mode = FrankMode::Raw;
                } else {
                    throw ScenarioError("key 'frank_mode': expected \"literal\" or \"raw\"", v.line);
                }
            }
        }
        for (int i = 0; i < 3; ++i) {
            if (!(n.grid_max[i] > n.grid_min[i])) {
                throw ScenarioError("grid_max must exceed grid_min on every axis", sec->line);
            }
        }
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open scenario file '" + path.string() + "'", 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

}  // namespace defectgeo
