"""
Packet application layer: measured spreading of a free Gaussian packet
against the analytic law.
"""

import datasource.scenarios as scenarios
import models.energetics as energetics
import models.fields as fields
import models.propagators as propagators


def run_packet(
    spec: scenarios.PacketSpec,
    grid: fields.Grid,
    p: fields.PhysParams,
    times: list[float],
) -> dict:
    """
    Propagates the packet exactly and tabulates its width.

    Args:
        spec: packet center, width s0 and carrier wavenumber
        grid: periodic box; must hold ±6 widths at the latest time
        p: physics constants
        times: sample times

    Returns:
        dict with keys:
            rows: (t, measured_width, analytic_width, relative_deviation) per time
            lambda: normalization constant fixed at t = 0
    Raises:
        PacketTooWide: the packet outgrows the box before max(times)
    """
    t_max = max((abs(t) for t in times), default=0.0)
    psi0 = scenarios.gaussian_packet(spec, grid, t_max=t_max, p=p)
    lam = energetics.normalization_constant(psi0)

    rows = []
    for t in times:
        psi = propagators.propagate_schrodinger(psi0, t, p)
        measured = scenarios.packet_width(energetics.probability_density(psi, lam))
        analytic = scenarios.analytic_width(spec.s0, t, p)
        rows.append({
            "t":                  float(t),
            "measured_width":     measured,
            "analytic_width":     analytic,
            "relative_deviation": abs(measured - analytic) / analytic,
        })
    return {"rows": rows, "lambda": lam}
