#include "tsvar/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace tsvar {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw config_error(where + " must be a JSON object");
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) {
                known = true;
                break;
            }
        if (!known) throw config_error(where + ": unknown key \"" + it.key() + "\"");
    }
}

double get_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw config_error(where + ": missing \"" + key + "\"");
    const json& v = obj.at(key);
    if (!v.is_number()) throw config_error(where + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw config_error(where + ": missing \"" + key + "\"");
    const json& v = obj.at(key);
    if (!v.is_string()) throw config_error(where + ": \"" + key + "\" must be a string");
    return v.get<std::string>();
}

std::vector<double> get_number_array(const json& v, const std::string& where) {
    if (!v.is_array()) throw config_error(where + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& e : v) {
        if (!e.is_number()) throw config_error(where + " must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

IngredientBundle ingredients_from_json(const json& j) {
    require_object(j, "ingredients");
    check_keys(j, {"P", "p", "q", "w", "C", "R0"}, "ingredients");
    auto text = [&](const char* key, const char* fallback) {
        if (!j.contains(key)) return std::string(fallback);
        if (!j.at(key).is_string())
            throw config_error(std::string("ingredients: \"") + key + "\" must be a string");
        return j.at(key).get<std::string>();
    };
    const double C = j.contains("C") ? get_number(j, "C", "ingredients") : 0.0;
    const double R0 = j.contains("R0") ? get_number(j, "R0", "ingredients") : 1.0;
    return IngredientBundle::from_sources(text("P", "0"), text("p", "1"), text("q", "0"),
                                          text("w", "0"), C, R0);
}

json ingredients_to_json(const IngredientBundle& ing) {
    return json{{"P", ing.P_src}, {"p", ing.p_src}, {"q", ing.q_src},
                {"w", ing.w_src}, {"C", ing.C},     {"R0", ing.R0}};
}

ExtremalSpec extremal_from_json(const json& j) {
    require_object(j, "extremal");
    check_keys(j, {"kind", "expr", "values"}, "extremal");
    const std::string kind = get_string(j, "kind", "extremal");
    if (kind == "zero") return ExtremalSpec::zero();
    if (kind == "expr") return ExtremalSpec::from_expression(get_string(j, "expr", "extremal"));
    if (kind == "values") {
        if (!j.contains("values")) throw config_error("extremal: missing \"values\"");
        return ExtremalSpec::from_values(get_number_array(j.at("values"), "extremal.values"));
    }
    throw config_error("extremal: kind must be \"zero\", \"expr\" or \"values\"");
}

json extremal_to_json(const ExtremalSpec& e) {
    switch (e.kind) {
        case ExtremalSpec::Kind::zero: return json{{"kind", "zero"}};
        case ExtremalSpec::Kind::expression: return json{{"kind", "expr"}, {"expr", e.expr_src}};
        case ExtremalSpec::Kind::values: return json{{"kind", "values"}, {"values", e.values}};
    }
    throw config_error("unknown extremal kind");
}

ProblemOptions options_from_json(const json& j) {
    require_object(j, "options");
    check_keys(j,
               {"literal_general", "tolerance_el", "tolerance_legendre", "perturbations",
                "radius", "seed"},
               "options");
    ProblemOptions o;
    if (j.contains("literal_general")) {
        if (!j.at("literal_general").is_boolean())
            throw config_error("options: \"literal_general\" must be a boolean");
        o.literal_general = j.at("literal_general").get<bool>();
    }
    if (j.contains("tolerance_el")) o.tolerance_el = get_number(j, "tolerance_el", "options");
    if (j.contains("tolerance_legendre"))
        o.tolerance_legendre = get_number(j, "tolerance_legendre", "options");
    if (j.contains("perturbations")) {
        if (!j.at("perturbations").is_number_integer())
            throw config_error("options: \"perturbations\" must be an integer");
        o.perturbations = j.at("perturbations").get<int>();
        if (o.perturbations < 0) throw config_error("options: \"perturbations\" must be >= 0");
    }
    if (j.contains("radius")) {
        o.radius = get_number(j, "radius", "options");
        if (o.radius < 0.0) throw config_error("options: \"radius\" must be >= 0");
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer())
            throw config_error("options: \"seed\" must be an integer");
        o.seed = j.at("seed").get<std::uint64_t>();
    }
    return o;
}

json options_to_json(const ProblemOptions& o) {
    return json{{"literal_general", o.literal_general},
                {"tolerance_el", o.tolerance_el},
                {"tolerance_legendre", o.tolerance_legendre},
                {"perturbations", o.perturbations},
                {"radius", o.radius},
                {"seed", o.seed}};
}

} // namespace

json grid_spec_to_json(const GridSpec& spec) {
    switch (spec.kind) {
        case GridSpec::Kind::uniform:
            return json{{"kind", "uniform"}, {"a", spec.a}, {"b", spec.b}, {"h", spec.h}};
        case GridSpec::Kind::qpow:
            return json{{"kind", "qpow"}, {"q", spec.q}, {"kmin", spec.kmin},
                        {"kmax", spec.kmax}};
        case GridSpec::Kind::explicit_points:
            return json{{"kind", "explicit"}, {"points", spec.points}};
    }
    throw config_error("unknown grid spec kind");
}

GridSpec grid_spec_from_json(const json& j) {
    require_object(j, "timescale");
    const std::string kind = get_string(j, "kind", "timescale");
    if (kind == "uniform") {
        check_keys(j, {"kind", "a", "b", "h"}, "timescale");
        return GridSpec::make_uniform(get_number(j, "a", "timescale"),
                                      get_number(j, "b", "timescale"),
                                      get_number(j, "h", "timescale"));
    }
    if (kind == "qpow") {
        check_keys(j, {"kind", "q", "kmin", "kmax"}, "timescale");
        if (!j.contains("kmin") || !j.at("kmin").is_number_integer() || !j.contains("kmax") ||
            !j.at("kmax").is_number_integer())
            throw config_error("timescale: \"kmin\" and \"kmax\" must be integers");
        return GridSpec::make_qpow(get_number(j, "q", "timescale"), j.at("kmin").get<int>(),
                                   j.at("kmax").get<int>());
    }
    if (kind == "explicit") {
        check_keys(j, {"kind", "points"}, "timescale");
        if (!j.contains("points")) throw config_error("timescale: missing \"points\"");
        return GridSpec::make_explicit(get_number_array(j.at("points"), "timescale.points"));
    }
    throw config_error("timescale: kind must be \"uniform\", \"qpow\" or \"explicit\"");
}

ProblemConfig config_from_json(const json& j) {
    require_object(j, "config");
    check_keys(j, {"timescale", "ingredients", "lagrangian", "extremal", "options"}, "config");
    if (!j.contains("timescale")) throw config_error("config: missing \"timescale\"");

    ProblemConfig cfg;
    cfg.timescale = grid_spec_from_json(j.at("timescale"));

    const bool has_ing = j.contains("ingredients");
    const bool has_lag = j.contains("lagrangian");
    if (has_ing == has_lag)
        throw config_error("config: exactly one of \"ingredients\" and \"lagrangian\" "
                           "must be present");
    if (has_ing) cfg.ingredients = ingredients_from_json(j.at("ingredients"));
    if (has_lag) {
        const json& l = j.at("lagrangian");
        require_object(l, "lagrangian");
        check_keys(l, {"L"}, "lagrangian");
        cfg.lagrangian_src = get_string(l, "L", "lagrangian");
        cfg.lagrangian = Expr::parse(cfg.lagrangian_src);
    }
    if (j.contains("extremal")) cfg.extremal = extremal_from_json(j.at("extremal"));
    if (j.contains("options")) cfg.options = options_from_json(j.at("options"));
    return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw config_error("config is not valid JSON: " + std::string(e.what()));
    }
    return config_from_json(j);
}

json bundle_to_json(const LagrangianForm& form, const GridSpec& spec,
                    const ProblemOptions& opts) {
    json j;
    j["format"] = "tsvar-bundle-v1";
    j["timescale"] = grid_spec_to_json(spec);
    j["ingredients"] = ingredients_to_json(form.ingredients());
    j["extremal"] = extremal_to_json(form.extremal());
    j["options"] = options_to_json(opts);
    j["literal_general"] = form.literal_general();
    j["points"] = form.grid()->points();
    j["offset_q"] = form.offset_q().values;
    j["r_profile"] = form.r_profile().values;
    j["extremal_values"] = form.extremal_values().values;
    return j;
}

bool is_bundle_json(const json& j) {
    return j.is_object() && j.contains("format") && j.at("format").is_string() &&
           j.at("format").get<std::string>() == "tsvar-bundle-v1";
}

LoadedBundle bundle_from_json(const json& j) {
    require_object(j, "bundle");
    if (!is_bundle_json(j)) throw config_error("not a tsvar bundle (missing format tag)");
    check_keys(j,
               {"format", "timescale", "ingredients", "extremal", "options", "literal_general",
                "points", "offset_q", "r_profile", "extremal_values"},
               "bundle");

    LoadedBundle out;
    out.spec = grid_spec_from_json(j.at("timescale"));
    out.options = options_from_json(j.at("options"));
    GridPtr grid = out.spec.build();

    const auto points = get_number_array(j.at("points"), "bundle.points");
    if (points != grid->points())
        throw config_error("bundle points do not match the grid spec; file was edited?");

    IngredientBundle ing = ingredients_from_json(j.at("ingredients"));
    ExtremalSpec extremal = extremal_from_json(j.at("extremal"));
    bool literal = false;
    if (j.contains("literal_general")) literal = j.at("literal_general").get<bool>();

    auto offset_q = get_number_array(j.at("offset_q"), "bundle.offset_q");
    auto r_profile = get_number_array(j.at("r_profile"), "bundle.r_profile");
    const auto stored_y0 = get_number_array(j.at("extremal_values"), "bundle.extremal_values");

    out.form = LagrangianForm::from_parts(grid, std::move(ing), std::move(extremal),
                                          std::move(offset_q), std::move(r_profile), literal);
    if (stored_y0 != out.form.extremal_values().values)
        throw config_error("bundle extremal_values do not match the extremal spec");
    return out;
}

json report_to_json(const VerificationReport& report, const ProblemOptions& opts) {
    json j;
    j["tolerance_el"] = opts.tolerance_el;
    j["tolerance_legendre"] = opts.tolerance_legendre;
    bool passed = true;
    if (report.el) {
        j["el"] = json{{"constant", report.el->mean},
                       {"constancy", report.el->constancy},
                       {"residual", report.el->g.values}};
        passed = passed && report.el->constancy <= opts.tolerance_el;
    }
    if (report.legendre) {
        j["legendre"] = json{{"min", report.legendre->min},
                             {"strictly_positive", report.legendre->strictly_positive},
                             {"lhs", report.legendre->lhs.values}};
        passed = passed && report.legendre->strictly_positive;
    }
    if (report.grad_norm) j["grad_norm"] = *report.grad_norm;
    if (report.perturbation_min_delta)
        j["perturbation_min_delta"] = *report.perturbation_min_delta;
    j["passed"] = passed;
    return j;
}

std::string format_full(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_bundle_csv(std::ostream& os, const LagrangianForm& form) {
    const GridPtr& grid = form.grid();
    os << "index,t,sigma,mu,offset_q,r_profile\n";
    for (std::size_t i = 0; i < grid->size(); ++i) {
        os << i << ',' << format_full(grid->point(i)) << ',' << format_full(grid->sigma_at(i))
           << ',' << format_full(grid->mu_at(i)) << ',' << format_full(form.offset_q()[i])
           << ',';
        if (i < form.r_profile().size()) os << format_full(form.r_profile()[i]);
        os << '\n';
    }
}

void write_grid_table_csv(std::ostream& os, const GridPtr& grid, const IngredientBundle* ing) {
    std::optional<RSCoefficients> rs;
    if (ing) rs = rs_coefficients(grid, *ing);
    os << "index,t,sigma,mu";
    if (rs) os << ",r,s,e_r";
    os << '\n';
    for (std::size_t i = 0; i < grid->size(); ++i) {
        os << i << ',' << format_full(grid->point(i)) << ',' << format_full(grid->sigma_at(i))
           << ',' << format_full(grid->mu_at(i));
        if (rs) {
            os << ',';
            if (i < rs->r.size()) os << format_full(rs->r[i]);
            os << ',';
            if (i < rs->s.size()) os << format_full(rs->s[i]);
            os << ',';
            if (i < grid->kappa_size()) os << format_full(exp_ts_at(rs->r, i, 0));
        }
        os << '\n';
    }
}

GridFunction read_trajectory_csv(std::istream& is, const GridPtr& grid) {
    std::vector<double> y(grid->size());
    std::vector<bool> seen(grid->size(), false);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        // strip trailing CR and surrounding whitespace
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw config_error("trajectory line " + std::to_string(lineno) +
                               ": expected \"t,y\"");
        const std::string t_text = line.substr(0, comma);
        const std::string y_text = line.substr(comma + 1);
        char* end = nullptr;
        const double t = std::strtod(t_text.c_str(), &end);
        if (end == t_text.c_str()) {
            if (lineno == 1) continue; // header row
            throw config_error("trajectory line " + std::to_string(lineno) +
                               ": malformed t value \"" + t_text + "\"");
        }
        const double value = std::strtod(y_text.c_str(), &end);
        if (end == y_text.c_str())
            throw config_error("trajectory line " + std::to_string(lineno) +
                               ": malformed y value \"" + y_text + "\"");
        std::size_t index;
        try {
            index = grid->index_of(t);
        } catch (const domain_error&) {
            throw config_error("trajectory line " + std::to_string(lineno) + ": t = " + t_text +
                               " is not a grid point");
        }
        if (seen[index])
            throw config_error("trajectory line " + std::to_string(lineno) +
                               ": duplicate grid point t = " + t_text);
        seen[index] = true;
        y[index] = value;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw config_error("trajectory is missing grid point t = " +
                               format_full(grid->point(i)));
    return GridFunction(grid, std::move(y));
}

} // namespace tsvar
