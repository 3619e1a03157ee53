#include "dualfuel/linepack.hpp"

#include <algorithm>

namespace dualfuel {

LinepackStep linepack_step(double linepack_gwh, double gas_power_mw, double dt_hours)
{
    const double drawn_gwh = gas_power_mw * dt_hours / 1000.0;
    if (drawn_gwh <= 0.0)
        return {linepack_gwh, false};
    return {std::max(0.0, linepack_gwh - drawn_gwh), drawn_gwh >= linepack_gwh};
}

} // namespace dualfuel
