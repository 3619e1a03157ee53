#pragma once

namespace dualfuel {

struct LinepackStep
{
    double linepack_gwh = 0.0;
    bool depleted = false;
};

/// Draws gas_power_mw (fuel MW) for dt_hours from a global linepack.
/// The stock clamps at zero; `depleted` is set when the draw reaches or
/// exceeds what was left, and gas units must then be forced offline.
LinepackStep linepack_step(double linepack_gwh, double gas_power_mw, double dt_hours);

} // namespace dualfuel
