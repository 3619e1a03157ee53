#pragma once

#include "dualfuel/fleet.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace dualfuel {

struct GasNode
{
    std::string id;
    Region region = Region::Center;
    bool injection = false; // supply point; lost for the whole emergency
};

struct PipeSpec
{
    std::string from;
    std::string to;
    double length_km = 0.0;
    double diameter_m = 0.9;
    double friction = 0.01;     // Darcy friction factor
    double sound_speed = 350.0; // m/s, isothermal: p = a^2 rho
};

struct GasTopology
{
    std::vector<GasNode> nodes;
    std::vector<PipeSpec> pipes;

    /// Unique node ids, known pipe endpoints, positive geometry, connected.
    void validate() const;
    std::size_t node_index(const std::string& id) const;
    bool has_node(const std::string& id) const;

    /// Synthetic 11-node tree with north/center/south groups and two
    /// offshore supply nodes. A stand-in, not a survey of a real system.
    static GasTopology synthetic_default();
};

struct SolverOptions
{
    double dx_km = 5.0;          // target cell length
    double cfl = 0.8;            // a * dt_sub <= cfl * dx
    double substep_seconds = 0.0; // 0 selects the largest CFL-compliant sub-step
};

/// Node id -> pressure in bar.
using NodePressures = std::map<std::string, double>;

/// Fields of one pipe: density (kg/m^3) on interior cell centres and mass
/// flux (kg/(m^2 s)) on the faces between them and the end junctions.
struct PipeField
{
    std::vector<double> density;
    std::vector<double> flux; // density.size() + 1 entries
};

struct GasGridState
{
    std::vector<PipeField> pipes;
    std::vector<double> node_pressure_pa; // junction pressure per node
    std::vector<bool> starved;            // node could not deliver its full withdrawal last advance
    double time_seconds = 0.0;
};

/// Fuel power (MW) to mass flow (kg/s) for a gross calorific value in MJ/kg.
double energy_to_massflow(double fuel_mw, double gcv_mj_per_kg);

/// Nodes with pressure strictly below pi_min_bar.
std::set<std::string> pressure_violations(const NodePressures& pressures, double pi_min_bar);

/// Discretised pipe network for 1-D isothermal flow with Darcy friction:
///   d(rho)/dt + d(phi)/dx = 0
///   d(phi)/dt + a^2 d(rho)/dx = -lambda phi |phi| / (2 D rho)
/// Staggered explicit scheme. Every pipe of length L is split into
/// n + 1 segments of width dx; the n interior cells belong to the pipe and
/// the two end half-segments form part of the junction volume at each end,
/// so total volume equals the physical pipe volume.
class GasNetwork
{
public:
    GasNetwork(GasTopology topology, SolverOptions options = {});

    const GasTopology& topology() const { return topology_; }
    std::size_t node_count() const { return topology_.nodes.size(); }
    std::size_t cell_count(std::size_t pipe) const { return pipes_[pipe].cells; }
    double cell_length_m(std::size_t pipe) const { return pipes_[pipe].dx; }
    double total_volume_m3() const;

    /// Sub-step used to advance by dt_seconds. Throws CflViolation when a
    /// configured sub-step breaks a * dt_sub <= cfl * dx.
    double substep(double dt_seconds) const;

    /// rho = p0 / a^2 everywhere, zero flux.
    GasGridState uniform_state(double pressure_bar) const;

    /// Uniform pressure whose stored energy equals target_gwh.
    double uniform_pressure_for_linepack(double target_gwh, double gcv_mj_per_kg) const;

    /// Steady flow with injection nodes held at supply_pressure_bar and
    /// constant withdrawals (kg/s by node id). Throws NoConvergence.
    GasGridState steady_state(const std::map<std::string, double>& withdrawals, double supply_pressure_bar) const;

    /// Steady state whose supply pressure is scaled until stored energy is
    /// within 0.1% of target_gwh.
    GasGridState steady_state_for_linepack(const std::map<std::string, double>& withdrawals, double target_gwh,
                                           double gcv_mj_per_kg) const;

    /// Advances by dt_seconds with withdrawals (kg/s by node index) held
    /// constant. Injection nodes supply nothing. A node that runs dry
    /// delivers what it holds and is flagged starved.
    GasGridState advance(GasGridState state, const std::vector<double>& withdrawals, double dt_seconds) const;
    GasGridState advance(GasGridState state, const std::map<std::string, double>& withdrawals,
                         double dt_seconds) const;

    NodePressures node_pressures(const GasGridState& state) const;
    std::set<std::string> starved_nodes(const GasGridState& state) const;

    double total_mass_kg(const GasGridState& state) const;
    double total_linepack_energy_gwh(const GasGridState& state, double gcv_mj_per_kg) const;

private:
    struct PipeGrid
    {
        std::size_t from = 0;
        std::size_t to = 0;
        std::size_t cells = 0;
        double dx = 0.0;   // m
        double area = 0.0; // m^2
        double diameter = 0.0;
        double friction = 0.0;
        double a2 = 0.0; // sound speed squared
    };

    std::vector<double> to_node_vector(const std::map<std::string, double>& by_id) const;
    void substep_once(GasGridState& state, const std::vector<double>& withdrawals, double dt,
                      std::vector<double>& delivered) const;

    GasTopology topology_;
    SolverOptions options_;
    std::vector<PipeGrid> pipes_;
    std::vector<double> junction_capacitance_; // junction mass per Pa of pressure
};

} // namespace dualfuel
