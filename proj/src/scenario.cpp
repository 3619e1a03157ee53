#include "dualfuel/scenario.hpp"

#include "dualfuel/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace dualfuel {

using nlohmann::json;

nlohmann::json parse_json_text(std::string_view text, std::string_view origin)
{
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // Translate the byte offset into line and column.
        std::size_t line = 1;
        std::size_t column = 1;
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::ostringstream msg;
        msg << origin << ":" << line << ":" << column << ": invalid JSON (" << e.what() << ")";
        throw ConfigError("", msg.str());
    }
}

nlohmann::json load_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("", "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_json_text(buffer.str(), path.string());
}

void apply_override(nlohmann::json& doc, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("", "override '" + std::string(assignment) + "' must look like path=value");
    const std::string path(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));

    json value = json::parse(text, nullptr, false);
    if (value.is_discarded())
        value = text;

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty())
            throw ConfigError(path, "empty path segment in override");
        if (node->is_array()) {
            std::size_t index = 0;
            try {
                index = std::stoul(key);
            } catch (const std::exception&) {
                throw ConfigError(path, "array index expected at '" + key + "'");
            }
            if (index >= node->size())
                throw ConfigError(path, "array index out of range");
            node = &(*node)[index];
        } else {
            if (node->is_null())
                *node = json::object();
            if (!node->is_object())
                throw ConfigError(path, "cannot descend into a non-object at '" + key + "'");
            node = &(*node)[key];
        }
        if (dot == std::string::npos)
            break;
        start = dot + 1;
    }
    *node = std::move(value);
}

namespace {

/// Object reader that records the keys it consumes so leftovers can be
/// reported as unknown.
class Section
{
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(path_, "expected an object");
    }

    std::string field(std::string_view key) const
    {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    const json* find(std::string_view key)
    {
        seen_.insert(std::string(key));
        const auto it = j_.find(std::string(key));
        return it == j_.end() ? nullptr : &*it;
    }

    std::optional<double> opt_number(std::string_view key)
    {
        const json* v = find(key);
        if (v == nullptr)
            return std::nullopt;
        if (!v->is_number())
            throw ConfigError(field(key), "expected a number");
        return v->get<double>();
    }

    double number(std::string_view key, double fallback) { return opt_number(key).value_or(fallback); }

    std::optional<std::int64_t> opt_integer(std::string_view key)
    {
        const json* v = find(key);
        if (v == nullptr)
            return std::nullopt;
        if (!v->is_number_integer())
            throw ConfigError(field(key), "expected an integer");
        return v->get<std::int64_t>();
    }

    std::int64_t integer(std::string_view key, std::int64_t fallback) { return opt_integer(key).value_or(fallback); }

    std::optional<std::string> opt_string(std::string_view key)
    {
        const json* v = find(key);
        if (v == nullptr)
            return std::nullopt;
        if (!v->is_string())
            throw ConfigError(field(key), "expected a string");
        return v->get<std::string>();
    }

    std::string string(std::string_view key, std::string fallback) { return opt_string(key).value_or(fallback); }

    bool boolean(std::string_view key, bool fallback)
    {
        const json* v = find(key);
        if (v == nullptr)
            return fallback;
        if (!v->is_boolean())
            throw ConfigError(field(key), "expected true or false");
        return v->get<bool>();
    }

    const json* array(std::string_view key)
    {
        const json* v = find(key);
        if (v != nullptr && !v->is_array())
            throw ConfigError(field(key), "expected an array");
        return v;
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.contains(it.key()))
                throw ConfigError(field(it.key()), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string indexed(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

template <typename Fn>
auto rethrow_at(const std::string& field, Fn fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const ConfigError& e) {
        if (!e.field().empty())
            throw;
        throw ConfigError(field, e.what());
    }
}

ReliabilityClass parse_class(const json& j, const std::string& field)
{
    if (j.is_string())
        return rethrow_at(field, [&] { return ReliabilityClass::named(j.get<std::string>()); });
    Section s(j, field);
    ReliabilityClass rc;
    rc.p_abort = s.number("p_abort", rc.p_abort);
    rc.p_succ = s.number("p_succ", rc.p_succ);
    rc.p_fail = s.number("p_fail", rc.p_fail);
    rc.p_start = s.number("p_start", rc.p_start);
    s.finish();
    rethrow_at(field, [&] { rc.validate(); });
    return rc;
}

HeatRate parse_heat_rate(Section& s, double p_max, double efficiency_default)
{
    const double efficiency = s.number("efficiency", efficiency_default);
    if (!(efficiency > 0.0))
        throw ConfigError(s.field("efficiency"), "must be positive");
    const json* hr = s.array("heat_rate");
    if (hr == nullptr)
        return HeatRate::from_efficiency(p_max, efficiency);
    if (hr->size() != 3 || !std::all_of(hr->begin(), hr->end(), [](const json& x) { return x.is_number(); }))
        throw ConfigError(s.field("heat_rate"), "expected three numbers [a0, a1, a2]");
    return {(*hr)[0].get<double>(), (*hr)[1].get<double>(), (*hr)[2].get<double>()};
}

void parse_gas(Section& s, GasConfig& gas)
{
    const auto model = s.string("model", "copperplate");
    if (model == "copperplate")
        gas.model = GasModelKind::Copperplate;
    else if (model == "network")
        gas.model = GasModelKind::Network;
    else
        throw ConfigError(s.field("model"), "expected \"copperplate\" or \"network\"");

    gas.linepack_gwh = s.number("linepack_gwh", gas.linepack_gwh);
    gas.pi_min_bar = s.number("pi_min_bar", gas.pi_min_bar);
    gas.gcv_mj_per_kg = s.number("gcv_mj_per_kg", gas.gcv_mj_per_kg);

    PipeSpec defaults;
    if (const json* pd = s.find("pipe_defaults")) {
        Section d(*pd, s.field("pipe_defaults"));
        defaults.diameter_m = d.number("diameter_m", defaults.diameter_m);
        defaults.friction = d.number("friction", defaults.friction);
        defaults.sound_speed = d.number("sound_speed", defaults.sound_speed);
        d.finish();
    }

    const json* nodes = s.array("nodes");
    const json* pipes = s.array("pipes");
    if (nodes == nullptr && pipes != nullptr)
        throw ConfigError(s.field("nodes"), "pipes need an explicit node list");
    if (nodes != nullptr) {
        gas.topology = {};
        for (std::size_t i = 0; i < nodes->size(); ++i) {
            const std::string where = indexed(s.field("nodes"), i);
            Section n((*nodes)[i], where);
            GasNode node;
            const auto id = n.opt_string("id");
            if (!id)
                throw ConfigError(where + ".id", "is required");
            node.id = *id;
            node.region = rethrow_at(where + ".region", [&] { return parse_region(n.string("region", "center")); });
            node.injection = n.boolean("injection", false);
            n.finish();
            gas.topology.nodes.push_back(std::move(node));
        }
        if (pipes != nullptr) {
            for (std::size_t i = 0; i < pipes->size(); ++i) {
                const std::string where = indexed(s.field("pipes"), i);
                Section p((*pipes)[i], where);
                PipeSpec pipe = defaults;
                const auto from = p.opt_string("from");
                const auto to = p.opt_string("to");
                const auto length = p.opt_number("length_km");
                if (!from || !to || !length)
                    throw ConfigError(where, "from, to and length_km are required");
                pipe.from = *from;
                pipe.to = *to;
                pipe.length_km = *length;
                pipe.diameter_m = p.number("diameter_m", pipe.diameter_m);
                pipe.friction = p.number("friction", pipe.friction);
                pipe.sound_speed = p.number("sound_speed", pipe.sound_speed);
                p.finish();
                gas.topology.pipes.push_back(std::move(pipe));
            }
        }
    }

    if (const json* sv = s.find("solver")) {
        Section o(*sv, s.field("solver"));
        gas.solver.dx_km = o.number("dx_km", gas.solver.dx_km);
        gas.solver.cfl = o.number("cfl", gas.solver.cfl);
        gas.solver.substep_seconds = o.number("substep_seconds", gas.solver.substep_seconds);
        o.finish();
    }

    if (const json* in = s.find("init")) {
        Section i(*in, s.field("init"));
        const auto mode = i.string("mode", "uniform");
        if (mode == "uniform")
            gas.init.mode = GasInitMode::Uniform;
        else if (mode == "steady")
            gas.init.mode = GasInitMode::Steady;
        else
            throw ConfigError(i.field("mode"), "expected \"uniform\" or \"steady\"");
        gas.init.pressure_bar = i.opt_number("pressure_bar");
        gas.init.supply_pressure_bar = i.opt_number("supply_pressure_bar");
        if (const json* w = i.find("withdrawals_kg_s")) {
            if (!w->is_object())
                throw ConfigError(i.field("withdrawals_kg_s"), "expected an object of node: kg/s");
            std::map<std::string, double> by_node;
            for (auto it = w->begin(); it != w->end(); ++it) {
                if (!it->is_number())
                    throw ConfigError(i.field("withdrawals_kg_s") + "." + it.key(), "expected a number");
                by_node[it.key()] = it->get<double>();
            }
            gas.init.withdrawals_kg_s = std::move(by_node);
        }
        i.finish();
        if (gas.init.mode == GasInitMode::Uniform && (gas.init.supply_pressure_bar || gas.init.withdrawals_kg_s))
            throw ConfigError(i.field("mode"), "supply_pressure_bar and withdrawals_kg_s need mode \"steady\"");
        if (gas.init.mode == GasInitMode::Steady && gas.init.pressure_bar)
            throw ConfigError(i.field("pressure_bar"), "only valid with mode \"uniform\"");
    }
}

void parse_fleet(Section& s, ScenarioConfig& c)
{
    ReliabilityClass reliability = ReliabilityClass::reliable();
    if (const json* cls = s.find("class"))
        reliability = parse_class(*cls, s.field("class"));

    const json* tmpl = s.find("template");
    const json* units = s.array("units");
    if (tmpl != nullptr && units != nullptr)
        throw ConfigError(s.field("units"), "give either template or units, not both");

    if (units != nullptr) {
        c.roster.clear();
        for (std::size_t i = 0; i < units->size(); ++i) {
            const std::string where = indexed(s.field("units"), i);
            Section u((*units)[i], where);
            GeneratorSpec g;
            g.id = i;
            g.p_max = u.number("p_max", g.p_max);
            g.p_min = u.number("p_min", g.p_min);
            const auto node = u.opt_string("node");
            if (!node)
                throw ConfigError(where + ".node", "is required");
            if (!c.gas.topology.has_node(*node))
                throw ConfigError(where + ".node", "unknown gas node '" + *node + "'");
            g.gas_node = *node;
            g.region = c.gas.topology.nodes[c.gas.topology.node_index(g.gas_node)].region;
            g.heat_rate = parse_heat_rate(u, g.p_max, 0.40);
            g.reliability = reliability;
            if (const json* cls = u.find("class"))
                g.reliability = parse_class(*cls, u.field("class"));
            u.finish();
            c.roster.push_back(std::move(g));
        }
    } else {
        double p_max = 150.0;
        double p_min = 30.0;
        HeatRate hr = HeatRate::from_efficiency(p_max, 0.40);
        std::vector<std::pair<std::string, std::size_t>> counts;
        std::optional<std::int64_t> total;
        if (tmpl != nullptr) {
            Section t(*tmpl, s.field("template"));
            p_max = t.number("p_max", p_max);
            p_min = t.number("p_min", p_min);
            hr = parse_heat_rate(t, p_max, 0.40);
            total = t.opt_integer("count");
            if (const json* nodes = t.array("nodes")) {
                for (std::size_t i = 0; i < nodes->size(); ++i) {
                    const std::string where = indexed(t.field("nodes"), i);
                    Section n((*nodes)[i], where);
                    const auto node = n.opt_string("node");
                    const auto count = n.opt_integer("count");
                    if (!node || !count || *count < 0)
                        throw ConfigError(where, "node and a non-negative count are required");
                    counts.emplace_back(*node, static_cast<std::size_t>(*count));
                    n.finish();
                }
            }
            t.finish();
        }
        if (counts.empty()) {
            if (!total) {
                counts = default_node_counts();
            } else {
                // Spread `count` units evenly over the non-injection nodes.
                std::vector<std::string> sites;
                for (const auto& n : c.gas.topology.nodes) {
                    if (!n.injection)
                        sites.push_back(n.id);
                }
                if (sites.empty())
                    throw ConfigError(s.field("template.count"), "topology has no non-injection node");
                for (std::size_t k = 0; k < sites.size(); ++k) {
                    const auto share = static_cast<std::size_t>(*total) / sites.size() +
                                       (k < static_cast<std::size_t>(*total) % sites.size() ? 1 : 0);
                    counts.emplace_back(sites[k], share);
                }
            }
        }
        std::size_t sum = 0;
        for (const auto& [node, n] : counts)
            sum += n;
        if (total && static_cast<std::size_t>(*total) != sum)
            throw ConfigError(s.field("template.count"), "does not match the sum of the node counts");
        c.roster = rethrow_at(s.field("template.nodes"), [&] {
            return homogeneous_roster(counts, c.gas.topology, p_max, p_min, reliability, hr);
        });
    }

    if (const json* init = s.find("initial_online")) {
        if (init->is_string() && init->get<std::string>() == "auto")
            c.initial_online.reset();
        else if (init->is_number_integer() && init->get<std::int64_t>() >= 0)
            c.initial_online = init->get<std::size_t>();
        else
            throw ConfigError(s.field("initial_online"), "expected \"auto\" or a non-negative integer");
    }
}

void parse_demand(Section& s, DemandProfile& demand)
{
    const auto profile = s.opt_string("profile");
    const json* samples = s.array("samples_mw");
    if (profile && samples != nullptr)
        throw ConfigError(s.field("samples_mw"), "give either profile or samples_mw, not both");
    if (profile) {
        demand = rethrow_at(s.field("profile"), [&] { return DemandProfile::named(*profile); });
    } else if (samples != nullptr) {
        demand = {};
        demand.name = "custom";
        for (std::size_t i = 0; i < samples->size(); ++i) {
            if (!(*samples)[i].is_number())
                throw ConfigError(indexed(s.field("samples_mw"), i), "expected a number");
            demand.samples_mw.push_back((*samples)[i].get<double>());
        }
    }
    demand.sample_minutes = s.number("sample_minutes", demand.sample_minutes);
    const double scale = s.number("scale", 1.0);
    if (!(scale >= 0.0))
        throw ConfigError(s.field("scale"), "must be non-negative");
    for (double& d : demand.samples_mw)
        d *= scale;
}

} // namespace

ScenarioConfig parse_scenario(const nlohmann::json& doc)
{
    Section root(doc, "");
    ScenarioConfig c = default_scenario();
    c.name = root.string("name", "scenario");

    if (const json* g = root.find("gas")) {
        Section s(*g, "gas");
        parse_gas(s, c.gas);
        s.finish();
    }

    const json* fleet = root.find("fleet");
    if (fleet != nullptr) {
        Section s(*fleet, "fleet");
        parse_fleet(s, c);
        s.finish();
    } else {
        json empty = json::object();
        Section s(empty, "fleet");
        parse_fleet(s, c);
    }

    if (const json* d = root.find("demand")) {
        Section s(*d, "demand");
        parse_demand(s, c.demand);
        s.finish();
    }

    if (const json* p = root.find("policy")) {
        Section s(*p, "policy");
        c.policy.max_actions = static_cast<int>(s.integer("K", c.policy.max_actions));
        c.policy.reserve_mw = s.number("R", c.policy.reserve_mw);
        if (auto tag = s.opt_string("strategy"))
            c.policy.strategy = rethrow_at("policy.strategy", [&] { return Strategy::parse(*tag); });
        s.finish();
    }

    if (const json* k = root.find("costs")) {
        Section s(*k, "costs");
        c.costs.main = s.number("main", c.costs.main);
        c.costs.secondary = s.number("secondary", c.costs.secondary);
        c.costs.voll = s.number("voll", c.costs.voll);
        s.finish();
    }

    if (const json* r = root.find("run")) {
        Section s(*r, "run");
        c.run.dt_minutes = s.number("dt_minutes", c.run.dt_minutes);
        c.run.transition_minutes = s.number("transition_minutes", c.run.transition_minutes);
        c.run.horizon_steps = static_cast<int>(s.integer("horizon_steps", c.run.horizon_steps));
        c.run.ensemble = static_cast<int>(s.integer("ensemble", c.run.ensemble));
        if (const json* seed = s.find("seed")) {
            if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0))
                throw ConfigError("run.seed", "expected a non-negative integer");
            c.run.seed = seed->get<std::uint64_t>();
        }
        s.finish();
    }

    root.finish();
    c.validate();
    return c;
}

} // namespace dualfuel
