#include "segsolve/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace segsolve {

std::string to_string(Command command)
{
    switch (command) {
    case Command::solve:
        return "solve";
    case Command::sweep:
        return "sweep";
    case Command::parabolic:
        return "parabolic";
    case Command::fb1d:
        return "fb1d";
    }
    return "unknown";
}

std::optional<Command> command_from_string(const std::string& name)
{
    for (Command c : {Command::solve, Command::sweep, Command::parabolic, Command::fb1d})
        if (to_string(c) == name)
            return c;
    return std::nullopt;
}

bool SegmentSpec::contains(const Point& p, int dimension) const
{
    constexpr double tol = 1e-9;
    for (int a = 0; a < dimension; ++a)
        if (p[a] < lower[a] - tol || p[a] > upper[a] + tol)
            return false;
    return true;
}

double SegmentSpec::value_at(const Point& p) const
{
    if (!linear)
        return value_lower;
    const double span = upper[axis] - lower[axis];
    const double t = span > 0.0 ? std::clamp((p[axis] - lower[axis]) / span, 0.0, 1.0) : 0.0;
    return value_lower + t * (value_upper - value_lower);
}

Profile make_profile(const SpeciesSpec& spec, int dimension)
{
    return [spec, dimension](const Point& p) {
        double v = 0.0;
        for (const SegmentSpec& s : spec.segments)
            if (s.contains(p, dimension))
                v = std::max(v, s.value_at(p));
        return v;
    };
}

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i)
        out += (i ? sep : "") + items[i];
    return out;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& value)
{
    std::string v = value;
    std::replace(v.begin(), v.end(), ',', ' ');
    std::istringstream in(v);
    std::vector<std::string> out;
    for (std::string t; in >> t;)
        out.push_back(t);
    return out;
}

struct Entry {
    std::string value;
    int line;
};

struct RawSpecies {
    int line;
    std::vector<std::pair<std::string, Entry>> items;
};

class Parser {
public:
    std::vector<std::string> errors;

    void error(int line, const std::string& msg)
    {
        errors.push_back(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg);
    }

    bool number(const Entry& e, const std::string& key, double& out)
    {
        const auto t = tokens(e.value);
        if (t.size() != 1 || !parse_double(t[0], out)) {
            error(e.line, "'" + key + "' expects a number, got '" + e.value + "'");
            return false;
        }
        return true;
    }

    bool integer(const Entry& e, const std::string& key, long& out)
    {
        double d = 0.0;
        if (!number(e, key, d))
            return false;
        if (d != std::floor(d)) {
            error(e.line, "'" + key + "' expects an integer, got '" + e.value + "'");
            return false;
        }
        out = static_cast<long>(d);
        return true;
    }

    bool boolean(const Entry& e, const std::string& key, bool& out)
    {
        const std::string v = trim(e.value);
        if (v == "true" || v == "yes" || v == "1") {
            out = true;
            return true;
        }
        if (v == "false" || v == "no" || v == "0") {
            out = false;
            return true;
        }
        error(e.line, "'" + key + "' expects true or false, got '" + e.value + "'");
        return false;
    }

    bool numbers(const Entry& e, const std::string& key, std::vector<double>& out)
    {
        out.clear();
        for (const std::string& t : tokens(e.value)) {
            double d = 0.0;
            if (!parse_double(t, d)) {
                error(e.line, "'" + key + "' expects numbers, got '" + t + "'");
                return false;
            }
            out.push_back(d);
        }
        if (out.empty()) {
            error(e.line, "'" + key + "' is empty");
            return false;
        }
        return true;
    }

    static bool parse_double(const std::string& t, double& out)
    {
        if (t == "inf" || t == "infinity") {
            out = std::numeric_limits<double>::infinity();
            return true;
        }
        try {
            std::size_t used = 0;
            out = std::stod(t, &used);
            return used == t.size();
        } catch (const std::exception&) {
            return false;
        }
    }
};

} // namespace

ConfigError::ConfigError(std::vector<std::string> errs)
    : Error("invalid configuration: " + join(errs, "; ")), errors(std::move(errs))
{
}

RunConfig parse_config(const std::string& text, std::optional<Command> command)
{
    Parser p;
    RunConfig cfg;
    cfg.source_text = text;

    std::map<std::string, std::map<std::string, Entry>> sections;
    std::vector<RawSpecies> species;
    static const std::map<std::string, std::vector<std::string>> known = {
        {"run", {"command", "epsilon"}},
        {"domain", {"dimension", "lower", "upper", "spacing"}},
        {"kernel", {"variant", "radius"}},
        {"solver",
         {"outer_tolerance", "linear_tolerance", "linear_method", "max_outer_iterations", "history_cap",
          "fixed_point_tolerance", "damping", "warm_start"}},
        {"parabolic", {"dt", "final_time", "steady_tolerance", "initial"}},
        {"diagnostics", {"theta", "sigma", "decay_r", "audit", "uniqueness_check"}},
        {"output", {"directory", "history"}},
        {"species", {"constant", "linear"}},
    };

    std::istringstream in(text);
    std::string section;
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                p.error(line_no, "malformed section header '" + line + "'");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!known.contains(section))
                p.error(line_no, "unknown section [" + section + "]");
            if (section == "species")
                species.push_back({line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            p.error(line_no, "expected 'key = value', got '" + line + "'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            p.error(line_no, "key '" + key + "' appears before any section");
            continue;
        }
        const auto sec = known.find(section);
        if (sec == known.end())
            continue;
        if (std::find(sec->second.begin(), sec->second.end(), key) == sec->second.end()) {
            p.error(line_no, "unknown key '" + key + "' in [" + section + "]");
            continue;
        }
        if (section == "species") {
            species.back().items.push_back({key, {value, line_no}});
            continue;
        }
        if (sections[section].contains(key))
            p.error(line_no, "duplicate key '" + key + "' in [" + section + "]");
        sections[section][key] = {value, line_no};
    }

    auto get = [&](const std::string& sec, const std::string& key) -> const Entry* {
        const auto s = sections.find(sec);
        if (s == sections.end())
            return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    };
    auto positive = [&](const std::string& sec, const std::string& key, double& target) {
        if (const Entry* e = get(sec, key); e && p.number(*e, key, target) && !(target > 0.0))
            p.error(e->line, "'" + key + "' must be positive");
    };

    // [run]
    std::optional<Command> file_command;
    if (const Entry* e = get("run", "command")) {
        file_command = command_from_string(trim(e->value));
        if (!file_command)
            p.error(e->line, "unknown command '" + e->value + "'");
    }
    if (command && file_command && *command != *file_command)
        p.error(get("run", "command")->line,
                "config command '" + to_string(*file_command) + "' conflicts with '" + to_string(*command) + "'");
    if (command)
        cfg.command = *command;
    else if (file_command)
        cfg.command = *file_command;
    else
        p.error(0, "no command given");

    if (const Entry* e = get("run", "epsilon")) {
        if (p.numbers(*e, "epsilon", cfg.epsilons)) {
            for (double eps : cfg.epsilons)
                if (!(eps > 0.0)) {
                    p.error(e->line, "epsilon must be positive, got " + std::to_string(eps));
                    break;
                }
        }
    } else {
        p.error(0, "missing 'epsilon' in [run]");
    }

    // [domain]
    long dim = 0;
    if (const Entry* e = get("domain", "dimension")) {
        if (p.integer(*e, "dimension", dim) && dim != 1 && dim != 2)
            p.error(e->line, "dimension must be 1 or 2");
    } else {
        p.error(0, "missing 'dimension' in [domain]");
    }
    cfg.box.dimension = static_cast<int>(dim);
    for (const char* corner : {"lower", "upper"}) {
        std::vector<double> v;
        const Entry* e = get("domain", corner);
        if (!e) {
            p.error(0, std::string("missing '") + corner + "' in [domain]");
            continue;
        }
        if (!p.numbers(*e, corner, v))
            continue;
        if ((dim == 1 || dim == 2) && v.size() != static_cast<std::size_t>(dim)) {
            p.error(e->line, std::string("'") + corner + "' needs " + std::to_string(dim) + " coordinate(s)");
            continue;
        }
        Point& target = std::string(corner) == "lower" ? cfg.box.lower : cfg.box.upper;
        for (std::size_t a = 0; a < v.size() && a < 2; ++a)
            target[a] = v[a];
    }
    if (const Entry* e = get("domain", "spacing")) {
        if (p.number(*e, "spacing", cfg.spacing) && !(cfg.spacing > 0.0))
            p.error(e->line, "'spacing' must be positive");
    } else {
        p.error(0, "missing 'spacing' in [domain]");
    }

    // [kernel]
    if (const Entry* e = get("kernel", "variant")) {
        const std::string v = trim(e->value);
        if (v == "integral")
            cfg.kernel = KernelKind::integral;
        else if (v == "sup")
            cfg.kernel = KernelKind::sup;
        else
            p.error(e->line, "unknown kernel variant '" + v + "'");
    }
    positive("kernel", "radius", cfg.radius);

    // [solver]
    positive("solver", "outer_tolerance", cfg.outer_tolerance);
    positive("solver", "linear_tolerance", cfg.linear_tolerance);
    positive("solver", "fixed_point_tolerance", cfg.fixed_point_tolerance);
    if (const Entry* e = get("solver", "linear_method")) {
        const std::string v = trim(e->value);
        if (v == "cholesky")
            cfg.linear_method = LinearMethod::cholesky;
        else if (v == "cg")
            cfg.linear_method = LinearMethod::conjugate_gradient;
        else
            p.error(e->line, "unknown linear method '" + v + "'");
    }
    if (const Entry* e = get("solver", "max_outer_iterations")) {
        long n = 0;
        if (p.integer(*e, "max_outer_iterations", n)) {
            if (n < 1)
                p.error(e->line, "'max_outer_iterations' must be at least 1");
            cfg.max_outer_iterations = static_cast<int>(n);
        }
    }
    if (const Entry* e = get("solver", "history_cap")) {
        long n = 0;
        if (p.integer(*e, "history_cap", n)) {
            if (n < 4)
                p.error(e->line, "'history_cap' must be at least 4");
            cfg.history_cap = static_cast<std::size_t>(std::max(n, 0L));
        }
    }
    if (const Entry* e = get("solver", "damping")) {
        if (p.number(*e, "damping", cfg.damping) && !(cfg.damping > 0.0 && cfg.damping <= 1.0))
            p.error(e->line, "'damping' must lie in (0, 1]");
    }
    if (const Entry* e = get("solver", "warm_start"))
        p.boolean(*e, "warm_start", cfg.warm_start);

    // [parabolic]
    positive("parabolic", "dt", cfg.dt);
    positive("parabolic", "final_time", cfg.final_time);
    positive("parabolic", "steady_tolerance", cfg.steady_tolerance);
    if (const Entry* e = get("parabolic", "initial")) {
        cfg.initial = trim(e->value);
        if (cfg.initial != "harmonic" && cfg.initial != "zero")
            p.error(e->line, "'initial' must be 'harmonic' or 'zero'");
    }

    // [diagnostics]
    positive("diagnostics", "theta", cfg.theta);
    positive("diagnostics", "sigma", cfg.sigma);
    if (const Entry* e = get("diagnostics", "decay_r")) {
        if (p.number(*e, "decay_r", cfg.decay_r) && !(cfg.decay_r > 0.0 && cfg.decay_r < 1.0))
            p.error(e->line, "'decay_r' must lie in (0, 1)");
    }
    if (const Entry* e = get("diagnostics", "audit"))
        p.boolean(*e, "audit", cfg.audit);
    if (const Entry* e = get("diagnostics", "uniqueness_check"))
        p.boolean(*e, "uniqueness_check", cfg.uniqueness_check);

    // [output]
    if (const Entry* e = get("output", "directory"))
        cfg.output_dir = trim(e->value);
    if (const Entry* e = get("output", "history"))
        p.boolean(*e, "history", cfg.write_history);

    // [species] blocks
    for (const RawSpecies& raw : species) {
        SpeciesSpec spec;
        for (const auto& [key, entry] : raw.items) {
            std::vector<double> v;
            if (!p.numbers(entry, key, v))
                continue;
            SegmentSpec seg;
            const std::size_t d = dim == 2 ? 2 : 1;
            const std::size_t expected = key == "constant" ? 2 * d + 1 : (d == 1 ? 4 : 7);
            if (v.size() != expected) {
                p.error(entry.line, "'" + key + "' expects " + std::to_string(expected) + " numbers in " +
                                        std::to_string(d) + "D");
                continue;
            }
            for (std::size_t a = 0; a < d; ++a) {
                seg.lower[a] = v[a];
                seg.upper[a] = v[d + a];
            }
            if (key == "constant") {
                seg.value_lower = seg.value_upper = v[2 * d];
            } else {
                seg.linear = true;
                seg.axis = d == 1 ? 0 : static_cast<int>(v[2 * d]);
                seg.value_lower = v[expected - 2];
                seg.value_upper = v[expected - 1];
                if (d == 2 && v[2 * d] != 0.0 && v[2 * d] != 1.0)
                    p.error(entry.line, "linear segment axis must be 0 or 1");
            }
            bool ordered = true;
            for (std::size_t a = 0; a < d; ++a)
                ordered = ordered && seg.lower[a] <= seg.upper[a];
            if (!ordered)
                p.error(entry.line, "segment lower corner exceeds upper corner");
            if (seg.value_lower < 0.0 || seg.value_upper < 0.0)
                p.error(entry.line, "boundary values must be nonnegative");
            spec.segments.push_back(seg);
        }
        cfg.species.push_back(std::move(spec));
    }
    if (cfg.species.empty())
        p.error(0, "at least one [species] section is required");

    // Cross-field consistency.
    if (!cfg.epsilons.empty()) {
        if (cfg.command == Command::sweep) {
            for (std::size_t q = 1; q < cfg.epsilons.size(); ++q)
                if (!(cfg.epsilons[q] < cfg.epsilons[q - 1])) {
                    p.error(get("run", "epsilon")->line, "sweep epsilon list must be strictly decreasing");
                    break;
                }
        } else if (cfg.epsilons.size() != 1) {
            p.error(get("run", "epsilon")->line, to_string(cfg.command) + " takes a single epsilon");
        }
    }
    if (cfg.command == Command::fb1d) {
        if (dim != 1)
            p.error(0, "fb1d requires d=1");
        if (cfg.species.size() != 2)
            p.error(0, "fb1d requires exactly two species");
        if (cfg.kernel != KernelKind::sup)
            p.error(0, "fb1d requires the sup kernel");
    }

    if (!p.errors.empty())
        throw ConfigError(p.errors);
    return cfg;
}

} // namespace segsolve
