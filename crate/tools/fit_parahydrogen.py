"""Regenerates the parahydrogen reference table, correlation coefficients and
calibration report under crates/core/data/.

Requires CoolProp (reference equation of state) and numpy. Only needed when
the coefficient file is refitted; the simulator itself reads the committed
outputs.
"""
import math
import pathlib

import CoolProp.CoolProp as CP
import numpy as np

FLUID = "ParaHydrogen"
OUT = pathlib.Path(__file__).resolve().parents[1] / "crates" / "core" / "data"
T_REF = 24.0
T_SCALE = 6.0
ANCHORS = [(1.1e5, 20.55), (1.2e5, 20.86)]
# added to reference-EOS enthalpies so that h and u stay positive over 18-30 K
H_OFFSET = 50000.0


def tau(t):
    return (np.asarray(t) - T_REF) / T_SCALE


def sat(prop, t, q):
    return CP.PropsSI(prop, "T", t, "Q", q, FLUID)


def fit(t, y, deg, w=None):
    v = np.vander(tau(t), deg + 1, increasing=True)
    if w is not None:
        v = v * w[:, None]
        y = y * w
    c, *_ = np.linalg.lstsq(v, y, rcond=None)
    return c


def ev(c, t):
    return sum(ci * tau(t) ** i for i, ci in enumerate(c))


def main():
    temps = np.round(np.arange(18.0, 30.0001, 0.25), 4)
    rows = []
    for t in temps:
        rows.append(
            dict(
                T=t,
                p_sat=sat("P", t, 0),
                rho_l=sat("D", t, 0),
                rho_v=sat("D", t, 1),
                h_l=sat("H", t, 0),
                h_v=sat("H", t, 1),
                cp_l=sat("C", t, 0),
                mu_l=sat("V", t, 0),
                mu_v=sat("V", t, 1),
                k_l=sat("L", t, 0),
            )
        )
    col = {k: np.array([r[k] for r in rows]) for k in rows[0]}

    # saturation curve: weight the anchor neighbourhood more heavily
    w = np.where((temps > 19.5) & (temps < 23.0), 4.0, 1.0)
    c_lnp = fit(temps, np.log(col["p_sat"]), 6, w)
    c_rho_l = fit(temps, col["rho_l"], 5)
    c_h_l = fit(temps, col["h_l"] + H_OFFSET, 6)
    c_h_fg = fit(temps, col["h_v"] - col["h_l"], 6)
    c_ln_rho_v = fit(temps, np.log(col["rho_v"]), 6)
    c_ln_mu_l = fit(temps, np.log(col["mu_l"]), 4)
    c_mu_v = fit(temps, col["mu_v"], 3)
    c_k_l = fit(temps, col["k_l"], 3)

    fmt = lambda c: " ".join(f"{x:.12e}" for x in c)
    coef = [
        "# Parahydrogen saturation correlations.",
        "# Each row: name followed by polynomial coefficients in tau = (T - t_ref) / t_scale,",
        "# lowest order first. Units SI (Pa, kg/m3, J/kg, Pa s, W/(m K)).",
        "# Regenerate with tools/fit_parahydrogen.py.",
        "# enthalpy_offset: fitted enthalpies equal reference-table enthalpies plus this value.",
        f"t_ref = {T_REF}",
        f"t_scale = {T_SCALE}",
        f"enthalpy_offset = {H_OFFSET}",
        "t_min = 18.0",
        "t_max = 30.0",
        "p_min = 0.8e5",
        "p_max = 3.0e5",
        "# artificial liquid compressibility used for sealed single-phase tanks, 1/Pa",
        "liquid_compressibility = 1.2e-8",
        f"ln_p_sat = {fmt(c_lnp)}",
        f"rho_l_sat = {fmt(c_rho_l)}",
        f"h_l_sat = {fmt(c_h_l)}",
        f"h_fg = {fmt(c_h_fg)}",
        f"ln_rho_v_sat = {fmt(c_ln_rho_v)}",
        f"ln_mu_l = {fmt(c_ln_mu_l)}",
        f"mu_v = {fmt(c_mu_v)}",
        f"k_l = {fmt(c_k_l)}",
    ]
    (OUT / "parahydrogen.coef").write_text("\n".join(coef) + "\n")

    with open(OUT / "parahydrogen_reference.csv", "w") as f:
        f.write("# source: CoolProp ParaHydrogen reference EOS, saturated states\n")
        f.write("T_K,p_sat_Pa,rho_l_kg_m3,rho_v_kg_m3,h_l_J_kg,h_v_J_kg,cp_l_J_kgK,mu_l_Pa_s,mu_v_Pa_s,k_l_W_mK\n")
        for r in rows:
            f.write(",".join(f"{r[k]:.10g}" for k in r) + "\n")

    def resid(name, c, y, transform=lambda x: x, rel=True):
        fitv = transform(ev(c, temps))
        err = (fitv - y) / y if rel else fitv - y
        return f"| {name} | {np.max(np.abs(err)):.3e} | {'relative' if rel else 'absolute'} |"

    def tsat(p):
        t = 20.0
        for _ in range(60):
            f = ev(c_lnp, t) - math.log(p)
            d = (ev(c_lnp, t + 1e-6) - ev(c_lnp, t - 1e-6)) / 2e-6
            t -= f / d
        return t

    lines = [
        "# Parahydrogen property calibration report",
        "",
        "Correlations in `parahydrogen.coef` are least-squares polynomial fits to",
        "saturated-state values from the CoolProp parahydrogen reference equation",
        "of state (`parahydrogen_reference.csv`, 18-30 K in 0.25 K steps).",
        "",
        "## Maximum fit residuals over 18-30 K",
        "",
        "| quantity | max residual | kind |",
        "|---|---|---|",
        resid("p_sat", c_lnp, col["p_sat"], np.exp),
        resid("rho_l", c_rho_l, col["rho_l"]),
        resid("h_l (J/kg)", c_h_l, col["h_l"] + H_OFFSET, rel=False),
        resid("h_fg", c_h_fg, col["h_v"] - col["h_l"]),
        resid("rho_v", c_ln_rho_v, col["rho_v"], np.exp),
        resid("mu_l", c_ln_mu_l, col["mu_l"], np.exp),
        resid("mu_v", c_mu_v, col["mu_v"]),
        resid("k_l", c_k_l, col["k_l"]),
        "",
        "## Anchor points",
        "",
        "| p (Pa) | target T_sat (K) | fitted T_sat (K) | reference EOS (K) |",
        "|---|---|---|---|",
    ]
    for p, t in ANCHORS:
        ref = CP.PropsSI("T", "P", p, "Q", 0, FLUID)
        lines.append(f"| {p:.0f} | {t:.2f} | {tsat(p):.4f} | {ref:.4f} |")
    p17 = 1.7e5
    lines += [
        f"| {p17:.0f} | - | {tsat(p17):.4f} | {CP.PropsSI('T', 'P', p17, 'Q', 0, FLUID):.4f} |",
        "",
        "## Subcooled liquid",
        "",
        "Subcooled enthalpy uses h_l(T, p) = h_l,sat(T) + v_l,sat(T) (p - p_sat(T)).",
        "At 19.5 K and 1.1 bar this gives "
        f"{(1.1e5 - CP.PropsSI('P','T',19.5,'Q',0,FLUID)) / CP.PropsSI('D','T',19.5,'Q',0,FLUID):.1f} J/kg",
        "above saturation, against "
        f"{CP.PropsSI('H','T',19.5,'P',1.1e5,FLUID) - CP.PropsSI('H','T',19.5,'Q',0,FLUID):.1f} J/kg from the reference EOS",
        "(the incompressible form ignores the thermal-expansion term v T beta dp).",
        "",
        "Sealed single-phase liquid uses a liquid compressibility of 1.2e-8 1/Pa,",
        "close to 1/(rho c^2) for liquid parahydrogen at 20 K (c ~ 1100 m/s).",
        "",
        "## Latent heat consistency",
        "",
    ]
    hfg12 = ev(c_h_fg, tsat(1.2e5))
    m_farm = 8000.0 * ev(c_rho_l, tsat(1.2e5))
    lines += [
        f"h_fg at 1.2 bar: {hfg12 / 1e3:.1f} kJ/kg. The fuel-farm figures (5 kW, 0.17 %/day,",
        f"8000 m3 full of liquid, {m_farm / 1e3:.0f} t) imply {5000 * 86400 / (0.0017 * m_farm) / 1e3:.0f} kJ/kg.",
        "The aircraft-tank figures (1.3 kW for 5.2 %/day of 6200 kg) imply "
        f"{1300 * 86400 / (0.052 * 6200) / 1e3:.0f} kJ/kg,",
        f"which would give {1300 * 86400 / hfg12 / 6200 * 100:.1f} %/day with the fitted latent heat.",
        "The two sets of tank figures are not mutually consistent; the simulator",
        "uses the fitted latent heat and reports both.",
        "",
    ]
    (OUT / "CALIBRATION.md").write_text("\n".join(lines))


if __name__ == "__main__":
    main()
