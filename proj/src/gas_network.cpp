#include "dualfuel/gas_network.hpp"

#include "dualfuel/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>

namespace dualfuel {

namespace {

constexpr double kPaPerBar = 1e5;
constexpr double kMjPerGwh = 3.6e6;
// Floor for the face density in the friction term.
constexpr double kDensityFloor = 1e-9;

} // namespace

double energy_to_massflow(double fuel_mw, double gcv_mj_per_kg)
{
    return fuel_mw / gcv_mj_per_kg;
}

std::set<std::string> pressure_violations(const NodePressures& pressures, double pi_min_bar)
{
    std::set<std::string> out;
    for (const auto& [node, p] : pressures) {
        if (p < pi_min_bar)
            out.insert(node);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

std::size_t GasTopology::node_index(const std::string& id) const
{
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id == id)
            return i;
    }
    throw ConfigError("gas.nodes", "unknown node '" + id + "'");
}

bool GasTopology::has_node(const std::string& id) const
{
    return std::any_of(nodes.begin(), nodes.end(), [&](const GasNode& n) { return n.id == id; });
}

void GasTopology::validate() const
{
    if (nodes.empty())
        throw ConfigError("gas.nodes", "at least one node is required");
    std::set<std::string> ids;
    for (const auto& n : nodes) {
        if (n.id.empty())
            throw ConfigError("gas.nodes", "node id must not be empty");
        if (!ids.insert(n.id).second)
            throw ConfigError("gas.nodes", "duplicate node id '" + n.id + "'");
    }
    for (std::size_t k = 0; k < pipes.size(); ++k) {
        const auto& p = pipes[k];
        const std::string where = "gas.pipes[" + std::to_string(k) + "]";
        if (!ids.contains(p.from) || !ids.contains(p.to))
            throw ConfigError(where, "endpoint is not a known node");
        if (p.from == p.to)
            throw ConfigError(where, "pipe must join two distinct nodes");
        if (!(p.length_km > 0.0) || !(p.diameter_m > 0.0) || !(p.sound_speed > 0.0))
            throw ConfigError(where, "length, diameter and sound speed must be positive");
        if (!(p.friction >= 0.0))
            throw ConfigError(where, "friction factor must be non-negative");
    }

    // Connectivity by breadth-first search from the first node.
    std::vector<std::vector<std::size_t>> adj(nodes.size());
    for (const auto& p : pipes) {
        const auto a = node_index(p.from);
        const auto b = node_index(p.to);
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> seen(nodes.size(), false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    while (!frontier.empty()) {
        const auto n = frontier.front();
        frontier.pop();
        for (auto m : adj[n]) {
            if (!seen[m]) {
                seen[m] = true;
                frontier.push(m);
            }
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw ConfigError("gas.pipes", "network is not connected");
    if (pipes.empty())
        throw ConfigError("gas.pipes", "at least one pipe is required");
}

GasTopology GasTopology::synthetic_default()
{
    GasTopology t;
    t.nodes = {
        {"N1", Region::North, false},  {"N2", Region::North, false},  {"N3", Region::North, false},
        {"C1", Region::Center, false}, {"C2", Region::Center, false}, {"C3", Region::Center, false},
        {"S1", Region::South, false},  {"S2", Region::South, false},  {"S3", Region::South, false},
        {"P1", Region::Center, true},  {"P2", Region::South, true},
    };
    // North-south trunk with thinner laterals toward the ends of the
    // country and two short feeders from the offshore landing points.
    t.pipes = {
        {"N3", "N2", 15.0, 0.5},  {"N2", "N1", 15.0, 0.5},  {"N1", "C1", 25.0, 0.75},
        {"C1", "C2", 20.0, 0.75}, {"C2", "C3", 20.0, 0.75}, {"C3", "S1", 25.0, 0.75},
        {"S1", "S2", 15.0, 0.5},  {"S2", "S3", 15.0, 0.5},  {"P1", "C1", 12.0, 0.9},
        {"P2", "S1", 12.0, 0.9},
    };
    return t;
}

// ---------------------------------------------------------------------------
// Network discretisation
// ---------------------------------------------------------------------------

GasNetwork::GasNetwork(GasTopology topology, SolverOptions options)
    : topology_(std::move(topology)), options_(options)
{
    topology_.validate();
    if (!(options_.dx_km > 0.0))
        throw ConfigError("gas.solver.dx_km", "must be positive");
    if (!(options_.cfl > 0.0 && options_.cfl <= 1.0))
        throw ConfigError("gas.solver.cfl", "must lie in (0, 1]");

    junction_capacitance_.assign(topology_.nodes.size(), 0.0);
    for (const auto& spec : topology_.pipes) {
        PipeGrid g;
        g.from = topology_.node_index(spec.from);
        g.to = topology_.node_index(spec.to);
        const double length = spec.length_km * 1000.0;
        const auto segments =
            std::max<std::size_t>(3, static_cast<std::size_t>(std::lround(spec.length_km / options_.dx_km)));
        g.cells = segments - 1;
        g.dx = length / static_cast<double>(segments);
        g.diameter = spec.diameter_m;
        g.area = std::numbers::pi * spec.diameter_m * spec.diameter_m / 4.0;
        g.friction = spec.friction;
        g.a2 = spec.sound_speed * spec.sound_speed;
        const double half_volume = g.area * g.dx / 2.0;
        junction_capacitance_[g.from] += half_volume / g.a2;
        junction_capacitance_[g.to] += half_volume / g.a2;
        pipes_.push_back(g);
    }
}

double GasNetwork::total_volume_m3() const
{
    double v = 0.0;
    for (const auto& g : pipes_)
        v += g.area * g.dx * static_cast<double>(g.cells + 1);
    return v;
}

double GasNetwork::substep(double dt_seconds) const
{
    double limit = std::numeric_limits<double>::infinity();
    for (const auto& g : pipes_)
        limit = std::min(limit, options_.cfl * g.dx / std::sqrt(g.a2));

    double h = limit;
    if (options_.substep_seconds > 0.0) {
        if (options_.substep_seconds > limit * (1.0 + 1e-12)) {
            throw GasSolverError(GasSolverError::Kind::CflViolation,
                                 "sub-step of " + std::to_string(options_.substep_seconds) +
                                     " s exceeds the CFL limit of " + std::to_string(limit) + " s");
        }
        h = options_.substep_seconds;
    }
    const double n = std::ceil(dt_seconds / h - 1e-9);
    return dt_seconds / std::max(1.0, n);
}

GasGridState GasNetwork::uniform_state(double pressure_bar) const
{
    const double p = pressure_bar * kPaPerBar;
    GasGridState s;
    s.pipes.reserve(pipes_.size());
    for (const auto& g : pipes_)
        s.pipes.push_back({std::vector<double>(g.cells, p / g.a2), std::vector<double>(g.cells + 1, 0.0)});
    s.node_pressure_pa.assign(topology_.nodes.size(), p);
    s.starved.assign(topology_.nodes.size(), false);
    return s;
}

double GasNetwork::uniform_pressure_for_linepack(double target_gwh, double gcv_mj_per_kg) const
{
    // mass = sum over segments of V * p / a^2
    double volume_over_a2 = 0.0;
    for (const auto& g : pipes_)
        volume_over_a2 += g.area * g.dx * static_cast<double>(g.cells + 1) / g.a2;
    const double mass = target_gwh * kMjPerGwh / gcv_mj_per_kg;
    return mass / volume_over_a2 / kPaPerBar;
}

std::vector<double> GasNetwork::to_node_vector(const std::map<std::string, double>& by_id) const
{
    std::vector<double> v(topology_.nodes.size(), 0.0);
    for (const auto& [id, value] : by_id)
        v[topology_.node_index(id)] += value;
    return v;
}

GasGridState GasNetwork::steady_state(const std::map<std::string, double>& withdrawals,
                                      double supply_pressure_bar) const
{
    const std::size_t n_nodes = topology_.nodes.size();
    const std::vector<double> w = to_node_vector(withdrawals);
    const double ps = supply_pressure_bar * kPaPerBar;
    const double total_w = std::accumulate(w.begin(), w.end(), 0.0);

    std::vector<std::size_t> free_index(n_nodes, n_nodes);
    std::size_t n_free = 0;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        if (!topology_.nodes[i].injection)
            free_index[i] = n_free++;
    }
    if (n_free == n_nodes && total_w != 0.0)
        throw GasSolverError(GasSolverError::Kind::NoConvergence, "steady state with withdrawals needs a supply node");

    // Squared pressures. Pipe flow q = k * g(pi_from - pi_to) with
    // g(x) = x / sqrt(|x| + delta), a smoothed signed square root.
    std::vector<double> pi(n_nodes, ps * ps);
    const double delta = 1e-8 * ps * ps;
    std::vector<double> conductance(pipes_.size());
    for (std::size_t k = 0; k < pipes_.size(); ++k) {
        const auto& g = pipes_[k];
        const double length = g.dx * static_cast<double>(g.cells + 1);
        conductance[k] = g.friction > 0.0 ? g.area * std::sqrt(g.diameter / (g.friction * g.a2 * length))
                                          : g.area * 1e6; // frictionless: near-equal pressures
    }
    auto flow = [&](std::size_t k, double dpi) { return conductance[k] * dpi / std::sqrt(std::abs(dpi) + delta); };
    auto flow_slope = [&](std::size_t k, double dpi) {
        const double ax = std::abs(dpi);
        return conductance[k] * (ax / 2.0 + delta) / std::pow(ax + delta, 1.5);
    };
    auto residual = [&](const std::vector<double>& p2) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_free));
        for (std::size_t i = 0; i < n_nodes; ++i) {
            if (free_index[i] < n_nodes)
                r[static_cast<Eigen::Index>(free_index[i])] += w[i];
        }
        for (std::size_t k = 0; k < pipes_.size(); ++k) {
            const auto& g = pipes_[k];
            const double q = flow(k, p2[g.from] - p2[g.to]); // from -> to
            if (free_index[g.from] < n_nodes)
                r[static_cast<Eigen::Index>(free_index[g.from])] += q;
            if (free_index[g.to] < n_nodes)
                r[static_cast<Eigen::Index>(free_index[g.to])] -= q;
        }
        return r;
    };

    const double tol = 1e-10 * std::max(1.0, total_w);
    Eigen::VectorXd r = residual(pi);
    bool converged = r.size() == 0 || r.lpNorm<Eigen::Infinity>() < tol;
    for (int iter = 0; iter < 200 && !converged; ++iter) {
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(r.size(), r.size());
        for (std::size_t k = 0; k < pipes_.size(); ++k) {
            const auto& g = pipes_[k];
            const double s = flow_slope(k, pi[g.from] - pi[g.to]);
            const auto a = static_cast<Eigen::Index>(free_index[g.from]);
            const auto b = static_cast<Eigen::Index>(free_index[g.to]);
            const bool fa = free_index[g.from] < n_nodes;
            const bool fb = free_index[g.to] < n_nodes;
            if (fa)
                jac(a, a) += s;
            if (fb)
                jac(b, b) += s;
            if (fa && fb) {
                jac(a, b) -= s;
                jac(b, a) -= s;
            }
        }
        const Eigen::VectorXd step = jac.fullPivLu().solve(-r);
        if (!step.allFinite())
            break;

        // Backtracking keeps squared pressures positive and the residual falling.
        double alpha = 1.0;
        const double norm0 = r.norm();
        for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
            std::vector<double> trial = pi;
            bool positive = true;
            for (std::size_t i = 0; i < n_nodes; ++i) {
                if (free_index[i] < n_nodes) {
                    trial[i] += alpha * step[static_cast<Eigen::Index>(free_index[i])];
                    positive = positive && trial[i] > 0.0;
                }
            }
            if (!positive)
                continue;
            const Eigen::VectorXd rt = residual(trial);
            if (rt.norm() < norm0 || ls == 39) {
                pi = std::move(trial);
                r = rt;
                break;
            }
        }
        converged = r.lpNorm<Eigen::Infinity>() < tol;
    }
    if (!converged)
        throw GasSolverError(GasSolverError::Kind::NoConvergence,
                             "steady gas flow did not converge (withdrawals may exceed what the supply pressure can deliver)");

    GasGridState s;
    for (std::size_t k = 0; k < pipes_.size(); ++k) {
        const auto& g = pipes_[k];
        const double pa = pi[g.from];
        const double pb = pi[g.to];
        const double length = g.dx * static_cast<double>(g.cells + 1);
        PipeField f;
        f.density.resize(g.cells);
        for (std::size_t c = 0; c < g.cells; ++c) {
            const double x = g.dx * static_cast<double>(c + 1);
            f.density[c] = std::sqrt(pa + (pb - pa) * x / length) / g.a2;
        }
        f.flux.assign(g.cells + 1, flow(k, pa - pb) / g.area);
        s.pipes.push_back(std::move(f));
    }
    s.node_pressure_pa.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i)
        s.node_pressure_pa[i] = std::sqrt(pi[i]);
    s.starved.assign(n_nodes, false);
    return s;
}

GasGridState GasNetwork::steady_state_for_linepack(const std::map<std::string, double>& withdrawals,
                                                   double target_gwh, double gcv_mj_per_kg) const
{
    double supply = uniform_pressure_for_linepack(target_gwh, gcv_mj_per_kg);
    for (int iter = 0; iter < 50; ++iter) {
        GasGridState s = steady_state(withdrawals, supply);
        const double energy = total_linepack_energy_gwh(s, gcv_mj_per_kg);
        if (std::abs(energy / target_gwh - 1.0) < 1e-3)
            return s;
        supply *= target_gwh / energy;
    }
    throw GasSolverError(GasSolverError::Kind::NoConvergence, "could not match the target linepack");
}

void GasNetwork::substep_once(GasGridState& s, const std::vector<double>& withdrawals, double dt,
                              std::vector<double>& delivered) const
{
    auto& pressure = s.node_pressure_pa;

    // Momentum: explicit pressure gradient, friction linearised implicitly.
    for (std::size_t k = 0; k < pipes_.size(); ++k) {
        const auto& g = pipes_[k];
        auto& f = s.pipes[k];
        const std::size_t n = g.cells;
        for (std::size_t face = 0; face <= n; ++face) {
            // In density units so a uniform state cancels exactly.
            const double rl = face == 0 ? pressure[g.from] / g.a2 : f.density[face - 1];
            const double rr = face == n ? pressure[g.to] / g.a2 : f.density[face];
            const double rho = std::max(0.5 * (rl + rr), kDensityFloor);
            const double phi = f.flux[face];
            f.flux[face] = (phi - dt * g.a2 * (rr - rl) / g.dx) /
                           (1.0 + dt * g.friction * std::abs(phi) / (2.0 * g.diameter * rho));
        }
        // A cell cannot export more than it holds.
        for (std::size_t c = 0; c < n; ++c) {
            double& left = f.flux[c];
            double& right = f.flux[c + 1];
            const double out = dt / g.dx * (std::max(right, 0.0) + std::max(-left, 0.0));
            if (out > f.density[c]) {
                const double scale = f.density[c] / out;
                if (right > 0.0)
                    right *= scale;
                if (left < 0.0)
                    left *= scale;
            }
        }
    }

    // Junctions: same rule, then the withdrawal takes what is left.
    const std::size_t n_nodes = pressure.size();
    std::vector<double> out_mass(n_nodes, 0.0);
    std::vector<double> in_mass(n_nodes, 0.0);
    for (std::size_t k = 0; k < pipes_.size(); ++k) {
        const auto& g = pipes_[k];
        const auto& f = s.pipes[k];
        const double head = g.area * dt * f.flux.front(); // + : from-junction into pipe
        const double tail = g.area * dt * f.flux.back();  // + : pipe into to-junction
        (head > 0.0 ? out_mass[g.from] : in_mass[g.from]) += std::abs(head);
        (tail > 0.0 ? in_mass[g.to] : out_mass[g.to]) += std::abs(tail);
    }
    std::vector<double> scale(n_nodes, 1.0);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double held = std::max(0.0, pressure[i] * junction_capacitance_[i]);
        if (out_mass[i] > held)
            scale[i] = held / out_mass[i];
    }
    if (std::any_of(scale.begin(), scale.end(), [](double x) { return x < 1.0; })) {
        std::fill(out_mass.begin(), out_mass.end(), 0.0);
        std::fill(in_mass.begin(), in_mass.end(), 0.0);
        for (std::size_t k = 0; k < pipes_.size(); ++k) {
            const auto& g = pipes_[k];
            auto& f = s.pipes[k];
            if (f.flux.front() > 0.0)
                f.flux.front() *= scale[g.from];
            if (f.flux.back() < 0.0)
                f.flux.back() *= scale[g.to];
            const double head = g.area * dt * f.flux.front();
            const double tail = g.area * dt * f.flux.back();
            (head > 0.0 ? out_mass[g.from] : in_mass[g.from]) += std::abs(head);
            (tail > 0.0 ? in_mass[g.to] : out_mass[g.to]) += std::abs(tail);
        }
    }

    // Continuity.
    for (std::size_t k = 0; k < pipes_.size(); ++k) {
        const auto& g = pipes_[k];
        auto& f = s.pipes[k];
        for (std::size_t c = 0; c < g.cells; ++c) {
            f.density[c] -= dt / g.dx * (f.flux[c + 1] - f.flux[c]);
            if (f.density[c] < 0.0) {
                if (f.density[c] < -1e-9)
                    throw GasSolverError(GasSolverError::Kind::NegativeDensity, "negative gas density in pipe " +
                                                                                    topology_.pipes[k].from + "-" +
                                                                                    topology_.pipes[k].to);
                f.density[c] = 0.0;
            }
        }
    }
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double wanted = withdrawals[i] * dt;
        if (out_mass[i] == 0.0 && in_mass[i] == 0.0 && wanted <= 0.0)
            continue;
        double mass = pressure[i] * junction_capacitance_[i] - out_mass[i] + in_mass[i];
        const double taken = std::clamp(wanted, 0.0, std::max(0.0, mass));
        if (taken < wanted * (1.0 - 1e-12))
            s.starved[i] = true;
        mass -= taken;
        delivered[i] += taken;
        pressure[i] = std::max(0.0, mass) / junction_capacitance_[i];
    }
}

GasGridState GasNetwork::advance(GasGridState state, const std::vector<double>& withdrawals, double dt_seconds) const
{
    if (withdrawals.size() != topology_.nodes.size())
        throw Error("withdrawal vector does not match the node count");
    for (double w : withdrawals) {
        if (w < 0.0)
            throw Error("withdrawals must be non-negative");
    }
    std::fill(state.starved.begin(), state.starved.end(), false);
    if (dt_seconds <= 0.0)
        return state;

    const double h = substep(dt_seconds);
    const auto n = static_cast<long>(std::lround(dt_seconds / h));
    std::vector<double> delivered(withdrawals.size(), 0.0);
    for (long k = 0; k < n; ++k)
        substep_once(state, withdrawals, h, delivered);
    state.time_seconds += dt_seconds;
    return state;
}

GasGridState GasNetwork::advance(GasGridState state, const std::map<std::string, double>& withdrawals,
                                 double dt_seconds) const
{
    return advance(std::move(state), to_node_vector(withdrawals), dt_seconds);
}

NodePressures GasNetwork::node_pressures(const GasGridState& state) const
{
    NodePressures out;
    for (std::size_t i = 0; i < topology_.nodes.size(); ++i)
        out[topology_.nodes[i].id] = state.node_pressure_pa[i] / kPaPerBar;
    return out;
}

std::set<std::string> GasNetwork::starved_nodes(const GasGridState& state) const
{
    std::set<std::string> out;
    for (std::size_t i = 0; i < topology_.nodes.size(); ++i) {
        if (state.starved[i])
            out.insert(topology_.nodes[i].id);
    }
    return out;
}

double GasNetwork::total_mass_kg(const GasGridState& state) const
{
    double mass = 0.0;
    for (std::size_t k = 0; k < pipes_.size(); ++k) {
        const auto& g = pipes_[k];
        double sum = 0.0;
        for (double rho : state.pipes[k].density)
            sum += rho;
        mass += sum * g.area * g.dx;
    }
    for (std::size_t i = 0; i < junction_capacitance_.size(); ++i)
        mass += state.node_pressure_pa[i] * junction_capacitance_[i];
    return mass;
}

double GasNetwork::total_linepack_energy_gwh(const GasGridState& state, double gcv_mj_per_kg) const
{
    return total_mass_kg(state) * gcv_mj_per_kg / kMjPerGwh;
}

} // namespace dualfuel
