//! Acceptance checks. Each test prints one PASS/FAIL line to stderr and
//! asserts the same condition.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;

use proptest::prelude::*;

use lh2_core::demand::{
    great_circle_km, hourly_series, lh2_mass, synthetic_schedule, AircraftClass, DemandConfig, Flight, GseScenario,
    Schedule, SyntheticOptions, AMS,
};
use lh2_core::flownet::{sphere_area, ConservationCheck};
use lh2_core::scenarios::{
    bog_report, overnight_bog, run_distribution, run_refuel, run_transport, run_transport_uq,
    threshold_thickness, tpd_to_kg_per_s, AircraftTankConfig, AirportConfig, BogReportInput, DistributionConfig,
    DistributionResult, RefuelCaseConfig, RefuelResult, SweepConfig, subcooling_equivalent, TransportConfig, TransportUqConfig,
    DIAMETER_6IN, DIAMETER_8IN,
};
use lh2_core::sensitivity::{ishigami, ishigami_indices, saltelli_sample, sobol_indices, IndexOptions, ParameterSpace, SampleOptions};
use lh2_core::PropertySet;

fn props() -> &'static PropertySet {
    PropertySet::parahydrogen()
}

fn report(id: &str, ok: bool, detail: impl AsRef<str>) {
    let line = format!("{} {id}: {}\n", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
}

fn check(id: &str, ok: bool, detail: impl AsRef<str>) {
    let detail = detail.as_ref();
    report(id, ok, detail);
    assert!(ok, "{id}: {detail}");
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    (x - target).abs() <= rel * target.abs()
}

fn conserves(c: &ConservationCheck) -> bool {
    c.mass.abs() <= 1e-8 && c.energy.abs() <= 1e-6
}

struct Distribution {
    night_2p8: DistributionResult,
    night_3p8: DistributionResult,
}

fn night_config(night: f64) -> DistributionConfig {
    let mut cfg = DistributionConfig::default();
    cfg.recycle.night = night;
    cfg
}

fn distribution() -> &'static Distribution {
    static RUNS: OnceLock<Distribution> = OnceLock::new();
    RUNS.get_or_init(|| Distribution {
        night_2p8: run_distribution(props(), &night_config(2.8)).expect("2.8 kg/s night run"),
        night_3p8: run_distribution(props(), &night_config(3.8)).expect("3.8 kg/s night run"),
    })
}

struct Refuels {
    morning_2p8: RefuelResult,
    morning_3p8: RefuelResult,
    evening_2p8: RefuelResult,
    small_2p8: RefuelResult,
}

fn refuel_case(base: RefuelCaseConfig, dist: &DistributionConfig) -> RefuelCaseConfig {
    RefuelCaseConfig { airport: dist.airport.clone(), recycle: dist.recycle.clone(), ..base }
}

fn refuels() -> &'static Refuels {
    static RUNS: OnceLock<Refuels> = OnceLock::new();
    RUNS.get_or_init(|| {
        let d = distribution();
        let (c28, c38) = (night_config(2.8), night_config(3.8));
        let snap = |r: &DistributionResult, label: &str| {
            r.snapshots.iter().find(|s| s.label == label).unwrap_or_else(|| panic!("no {label} snapshot")).clone()
        };
        let run = |cfg: RefuelCaseConfig, r: &DistributionResult, label: &str| {
            run_refuel(props(), &cfg, &snap(r, label)).expect("refuel run")
        };
        Refuels {
            morning_2p8: run(refuel_case(RefuelCaseConfig::default(), &c28), &d.night_2p8, "06:00"),
            morning_3p8: run(refuel_case(RefuelCaseConfig::default(), &c38), &d.night_3p8, "06:00"),
            evening_2p8: run(refuel_case(RefuelCaseConfig::default(), &c28), &d.night_2p8, "22:00"),
            small_2p8: run(refuel_case(RefuelCaseConfig::small_tanks(), &c28), &d.night_2p8, "06:00"),
        }
    })
}

#[test]
fn c01_saturation_anchors() {
    let t11 = props().saturation_temperature(1.1e5).unwrap();
    let t12 = props().saturation_temperature(1.2e5).unwrap();
    let ok = (t11 - 20.55).abs() <= 0.05 && (t12 - 20.86).abs() <= 0.05;
    check("1 saturation anchors", ok, format!("T_sat(1.1 bar) = {t11:.4} K, T_sat(1.2 bar) = {t12:.4} K"));
}

#[test]
fn c02_density_anchor() {
    let rho = props().liquid_density(19.5, 1.1e5).unwrap();
    let q = tpd_to_kg_per_s(330.0) / rho;
    check("2 density anchor", within(q, 0.054, 0.02), format!("330 tpd = {q:.5} m3/s (rho {rho:.3} kg/m3)"));
}

#[test]
fn c03_farm_heat_leak() {
    let farm = AirportConfig::default().farm;
    let t = 20.86;
    let q = farm.heat_rate(t);
    let direct = 0.009 * sphere_area(farm.volume) * (308.15 - t);
    let rho = props().saturated_liquid_density(t).unwrap();
    let h_fg = props().latent_heat_at_temperature(t).unwrap();
    let bor = q / h_fg * 86_400.0 / (farm.volume * rho) * 100.0;
    let holding = farm.volume * farm.max_level() * rho / 330_000.0;
    let ok = within(q, 5000.0, 0.05) && (q - direct).abs() < 1e-9 * q && within(bor, 0.17, 0.15) && within(holding, 1.7, 0.10);
    check(
        "3 farm UA",
        ok,
        format!("Q = {q:.1} W, BOR = {bor:.4} %/day, holding time = {holding:.3} days"),
    );
}

#[test]
fn c04_transport_uq() {
    let run = |d: f64| run_transport_uq(props(), &TransportUqConfig::four_km(d), None).expect("UQ run");
    let (r6, r8) = (run(DIAMETER_6IN), run(DIAMETER_8IN));
    let median = |r: &lh2_core::scenarios::TransportUqResult, name: &str| {
        let mut v = r.output(name);
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }
    };
    let min_sc = |r: &lh2_core::scenarios::TransportUqResult| {
        r.output("subcooling_K").into_iter().fold(f64::INFINITY, f64::min)
    };
    let count = |r: &lh2_core::scenarios::TransportUqResult| r.two_phase.iter().filter(|&&x| x).count();
    let single_phase = count(&r6) == 0 && count(&r8) == 0 && min_sc(&r6) > 0.0 && min_sc(&r8) > 0.0;
    let (sc6, sc8) = (median(&r6, "subcooling_K"), median(&r8, "subcooling_K"));
    let (q6, q8) = (median(&r6, "heat_ingress_W_per_m"), median(&r8, "heat_ingress_W_per_m"));
    let rank6 = r6.report("subcooling_K").unwrap().ranking();
    let rank8 = r8.report("subcooling_K").unwrap().ranking();
    let pos = |r: &[&str], n: &str| r.iter().position(|x| *x == n).unwrap();
    let pump = ["pump_efficiency", "pump_design_flow"];
    let pump_best = |r: &[&str]| pump.iter().map(|p| pos(r, p)).min().unwrap();
    let ok_a = single_phase;
    let ok_b = sc8 > sc6;
    let ok_c = q6 < q8;
    let ok_d = rank6[0] == "insulation_thickness" && rank8[0] == "insulation_thickness" && pump_best(&rank6) < pump_best(&rank8);
    report("4a UQ single phase", ok_a, format!("two-phase 6\"/8\" = {}/{}, min subcooling {:.3}/{:.3} K", count(&r6), count(&r8), min_sc(&r6), min_sc(&r8)));
    report("4b UQ subcooling", ok_b, format!("median 6\" {sc6:.3} K < 8\" {sc8:.3} K"));
    report("4c UQ heat ingress", ok_c, format!("median 6\" {q6:.3} W/m < 8\" {q8:.3} W/m"));
    report("4d UQ ranking", ok_d, format!("6\": {rank6:?}; 8\": {rank8:?}"));
    assert!(ok_a && ok_b && ok_c && ok_d);
}

#[test]
fn c05_insulation_threshold() {
    let cfg = SweepConfig::default();
    let t25 = threshold_thickness(props(), &cfg, 25_000.0).unwrap();
    let t4 = threshold_thickness(props(), &cfg, 4_000.0).unwrap();
    let ok = matches!((t25, t4), (Some(a), Some(b)) if (0.08..=0.16).contains(&a) && a > b);
    check("5 25 km threshold", ok, format!("25 km: {t25:?} m, 4 km: {t4:?} m"));
}

/// Clock hour of the lowest supply-outlet subcooling during the second
/// night and morning (run hours 16 to 30).
fn morning_minimum(r: &DistributionResult) -> (f64, f64) {
    let t = r.series.column("time_h");
    let clock = r.series.column("clock_h");
    let sc = r.series.column("supply_outlet_subcooling_K");
    (0..t.len())
        .filter(|&i| (16.0..=30.0).contains(&t[i]))
        .map(|i| (clock[i], sc[i]))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("series covers the night")
}

fn subcooling_at(r: &DistributionResult, hour: f64) -> f64 {
    let t = r.series.column("time_h");
    let sc = r.series.column("supply_outlet_subcooling_K");
    let i = t.iter().position(|&x| x >= hour - 1e-9).expect("hour inside the run");
    sc[i]
}

#[test]
fn c06_distribution() {
    let d = distribution();
    let (clock, sc_min) = morning_minimum(&d.night_2p8);
    let (clock38, _) = morning_minimum(&d.night_3p8);
    let on_time = |c: f64| (c - 6.0).abs() <= 10.0 / 3600.0 + 1e-9;
    let ok_a = on_time(clock) && on_time(clock38);
    let (m28, m38) = (subcooling_at(&d.night_2p8, 24.0), subcooling_at(&d.night_3p8, 24.0));
    let ok_b = m38 > m28;
    let margin = d.night_2p8.min_recycle_subcooling;
    let ok_c = !d.night_2p8.recycle_lost_subcooling && margin > 0.0 && margin < 0.3;
    let in_band = |r: &DistributionResult| r.farm_pressure_range.0 >= 1.03e5 && r.farm_pressure_range.1 <= 1.3e5 * (1.0 + 1e-9);
    let ok_d = in_band(&d.night_2p8) && in_band(&d.night_3p8);
    report("6a morning minimum", ok_a, format!("2.8: {sc_min:.3} K at clock {clock:.3} h; 3.8 at clock {clock38:.3} h"));
    report("6b colder morning", ok_b, format!("06:00 supply subcooling 3.8: {m38:.3} K > 2.8: {m28:.3} K"));
    report("6c recycle margin", ok_c, format!("2.8 recycle minimum subcooling {margin:.4} K"));
    report(
        "6d farm pressure",
        ok_d,
        format!(
            "2.8: [{:.4}, {:.4}] bar, 3.8: [{:.4}, {:.4}] bar",
            d.night_2p8.farm_pressure_range.0 / 1e5,
            d.night_2p8.farm_pressure_range.1 / 1e5,
            d.night_3p8.farm_pressure_range.0 / 1e5,
            d.night_3p8.farm_pressure_range.1 / 1e5
        ),
    );
    assert!(ok_a && ok_b && ok_c && ok_d);
}

#[test]
fn c07_refuelling() {
    let r = refuels();
    let vents = |x: &RefuelResult| x.aircraft.iter().map(|a| a.vented).collect::<Vec<_>>();
    let (v28, v38) = (vents(&r.morning_2p8), vents(&r.morning_3p8));
    let ordered = |v: &[f64]| v[0] > v[1] && (v[1] - v[2]).abs() <= 1e-6 * v[1].max(1.0);
    let within2 = |v: &[f64], p: [f64; 3]| v.iter().zip(p).all(|(a, b)| a >= &(b / 2.0) && a <= &(b * 2.0));
    let ok_a = ordered(&v28)
        && ordered(&v38)
        && v38.iter().zip(&v28).all(|(a, b)| a < b)
        && within2(&v28, [117.0, 86.0, 86.0])
        && within2(&v38, [88.0, 63.0, 63.0]);

    let peak = r.evening_2p8.peak_pressure();
    let ok_b = r.evening_2p8.total_vented() == 0.0 && (1.60e5..=1.70e5).contains(&peak);

    let rel = |x: &RefuelResult| x.total_vented() / x.aircraft.iter().map(|a| a.transferred).sum::<f64>();
    let (small, large) = (&r.small_2p8, &r.morning_2p8);
    let ok_c = small.total_vented() < large.total_vented() && rel(small) > rel(large);

    let dipped = |x: &RefuelResult| x.flow_dip && x.supply_max_quality > 0.0;
    let ok_d = dipped(&r.morning_2p8) && !dipped(&r.morning_3p8) && !dipped(&r.evening_2p8);

    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.1}")).collect::<Vec<_>>().join("/");
    report("7a vent ordering", ok_a, format!("06:00 2.8: {} kg, 3.8: {} kg", fmt(&v28), fmt(&v38)));
    report("7b 22:00 case", ok_b, format!("vented {:.3} kg, peak {:.4} bar", r.evening_2p8.total_vented(), peak / 1e5));
    report(
        "7c small tanks",
        ok_c,
        format!(
            "600 kg: {:.1} kg ({:.2} %), 6200 kg: {:.1} kg ({:.2} %)",
            small.total_vented(),
            100.0 * rel(small),
            large.total_vented(),
            100.0 * rel(large)
        ),
    );
    report(
        "7d parallel-fill dip",
        ok_d,
        format!(
            "quality 2.8: {:.4} (dip {}), 3.8: {:.4} (dip {}), 22:00: {:.4} (dip {})",
            r.morning_2p8.supply_max_quality,
            r.morning_2p8.flow_dip,
            r.morning_3p8.supply_max_quality,
            r.morning_3p8.flow_dip,
            r.evening_2p8.supply_max_quality,
            r.evening_2p8.flow_dip
        ),
    );
    assert!(ok_a && ok_b && ok_c && ok_d);
}

#[test]
fn c08_overnight_bog() {
    let vented = overnight_bog(props(), &AircraftTankConfig::default(), 8.0, 60.0).unwrap();
    check("8 overnight BOG", within(vented, 77.0, 0.25), format!("{vented:.2} kg over 8 h"));
}

#[test]
fn c09_bog_report() {
    let rep = bog_report(&BogReportInput::default()).unwrap();
    let totals_flagged = rep
        .discrepancies
        .iter()
        .filter(|d| d.row == "total")
        .map(|d| (d.scenario, d.computed - d.printed))
        .collect::<Vec<_>>();
    let flagged = |s: &str, delta: f64| totals_flagged.iter().any(|(sc, d)| *sc == s && (d - delta).abs() < 1e-9);
    let ok = rep.low.total == 533.0
        && rep.high.total == 5379.0
        && rep.low.storage == 356.0
        && rep.low.overnight == 0.0
        && rep.high.overnight == 770.0
        && flagged("low", 1.0)
        && flagged("high", 10.0);
    check(
        "9 BOG report",
        ok,
        format!("totals {}/{}, flagged totals {totals_flagged:?}", rep.low.total, rep.high.total),
    );
}

#[test]
fn c10_sobol_oracle() {
    let space = ParameterSpace::new(vec![("x1", -PI, PI), ("x2", -PI, PI), ("x3", -PI, PI)]).unwrap();
    let rows = saltelli_sample(&space, 1024, SampleOptions::default()).unwrap();
    let y: Vec<f64> = rows.iter().map(|x| ishigami(x, 7.0, 0.1)).collect();
    let rep = sobol_indices(&space, "y", &y, IndexOptions::default()).unwrap();
    let exact = ishigami_indices(7.0, 0.1);
    let err = rep
        .parameters
        .iter()
        .enumerate()
        .map(|(i, p)| (p.first - exact[i]).abs().max((p.total - exact[3 + i]).abs()))
        .fold(0.0, f64::max);

    let single = ParameterSpace::new(vec![("x", 0.0, 1.0)]).unwrap();
    let rows = saltelli_sample(&single, 1024, SampleOptions::default()).unwrap();
    let y: Vec<f64> = rows.iter().map(|x| (3.0 * x[0]).sin() + x[0] * x[0]).collect();
    let one = &sobol_indices(&single, "y", &y, IndexOptions::default()).unwrap().parameters[0];
    let ok = err <= 0.05 && (one.first - 1.0).abs() < 1e-3 && (one.total - 1.0).abs() < 1e-3;
    check(
        "10 Sobol oracle",
        ok,
        format!("Ishigami max error {err:.4}; single variable S = {:.6}, ST = {:.6}", one.first, one.total),
    );
}

#[test]
fn c11_conservation() {
    let d = distribution();
    let r = refuels();
    let transport = run_transport(props(), &TransportConfig::four_km(DIAMETER_8IN)).unwrap();
    let checks = [
        ("transport", transport.conservation),
        ("distribution 2.8", d.night_2p8.conservation),
        ("distribution 3.8", d.night_3p8.conservation),
        ("refuel 06:00 2.8", r.morning_2p8.conservation),
        ("refuel 06:00 3.8", r.morning_3p8.conservation),
        ("refuel 22:00", r.evening_2p8.conservation),
        ("refuel small", r.small_2p8.conservation),
    ];
    let worst = checks.iter().map(|(_, c)| c.mass.abs()).fold(0.0, f64::max);
    let worst_e = checks.iter().map(|(_, c)| c.energy.abs()).fold(0.0, f64::max);
    let ok_a = checks.iter().all(|(_, c)| conserves(c));
    report("11a conservation", ok_a, format!("worst mass {worst:.2e}, worst energy {worst_e:.2e}"));

    // No ingress and no wall storage, so the only energy path is the fluid itself.
    let adiabatic = TransportConfig {
        fixed_heat_ingress: Some(0.0),
        wall_mass_per_meter: Some(0.0),
        ideal_pump: true,
        ..TransportConfig::four_km(DIAMETER_8IN)
    };
    let out = run_transport(props(), &adiabatic).unwrap();
    let h_source = props().liquid_enthalpy(adiabatic.source_temperature, adiabatic.source_pressure).unwrap();
    let expect = subcooling_equivalent(props(), adiabatic.delivery_pressure, h_source).unwrap();
    let ok_b = (out.subcooling - expect).abs() < 1e-6;
    report(
        "11b adiabatic pipe",
        ok_b,
        format!("delivery subcooling {:.7} K, source enthalpy at delivery pressure {expect:.7} K", out.subcooling),
    );

    let mut worst_flash: f64 = 0.0;
    for p in [1.0e5, 1.2e5, 1.5e5, 2.0e5, 2.8e5] {
        for level in [0.05, 0.3, 0.6, 0.97] {
            let t = props().saturation_temperature(p).unwrap();
            let (rl, rv) = (props().saturated_liquid_density(t).unwrap(), props().saturated_vapor_density(t).unwrap());
            let ul = props().saturated_liquid_enthalpy(t).unwrap() - p / rl;
            let uv = props().vapor_enthalpy(p).unwrap() - p / rv;
            let v = 100.0;
            let (ml, mv) = (level * v * rl, (1.0 - level) * v * rv);
            let f = props().flash_uv(ml + mv, ml * ul + mv * uv, v).unwrap();
            for (a, b) in [(f.pressure, p), (f.temperature, t), (f.level, level)] {
                worst_flash = worst_flash.max((a - b).abs() / b);
            }
        }
    }
    let ok_c = worst_flash <= 0.005;
    report("11c flash roundtrip", ok_c, format!("worst relative error {worst_flash:.2e}"));
    assert!(ok_a && ok_b && ok_c);
}

#[test]
fn c12_demand() {
    let m = lh2_mass(1000.0);
    let quarter = great_circle_km(0.0, 0.0, 0.0, 90.0);
    let exact_quarter = PI * 6371.0 / 2.0;
    let schedule = synthetic_schedule(AMS, &SyntheticOptions::default()).unwrap();
    let medium = hourly_series(&schedule, &DemandConfig::default()).unwrap();
    let high = hourly_series(&schedule, &DemandConfig { gse_scenario: GseScenario::High, ..DemandConfig::default() }).unwrap();
    let hourly_lh2: f64 = medium.hourly.iter().map(|h| h.lh2).sum();
    let conserved = (hourly_lh2 - medium.total_lh2()).abs() <= 1e-9 * medium.total_lh2()
        && medium.hourly.iter().map(|h| h.departures).sum::<usize>() == schedule.flights.len();
    let monotone = medium.shares.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1);
    let ratio = high.total_gh2() / medium.total_gh2();
    let ok = (m - 392.57).abs() <= 0.01
        && within(quarter, exact_quarter, 0.001)
        && conserved
        && monotone
        && medium.shares.len() == 3
        && within(ratio, 5.0, 0.2);
    check(
        "12 demand",
        ok,
        format!(
            "lh2(1000) = {m:.3} kg, quarter = {quarter:.2} km, hourly total {:.1} kg, shares {:?}, GSE high/medium = {ratio:.3}",
            hourly_lh2, medium.shares
        ),
    );
}

fn class_strategy() -> impl Strategy<Value = AircraftClass> {
    prop::sample::select(AircraftClass::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lh2_mass_is_linear(a in 0.0..1e5f64, b in 0.0..1e5f64) {
        prop_assert!((lh2_mass(a + b) - lh2_mass(a) - lh2_mass(b)).abs() <= 1e-9 * (1.0 + a + b));
    }

    #[test]
    fn great_circle_is_symmetric_and_bounded(
        la1 in -90.0..90.0f64, lo1 in -180.0..180.0f64, la2 in -90.0..90.0f64, lo2 in -180.0..180.0f64,
    ) {
        let d = great_circle_km(la1, lo1, la2, lo2);
        prop_assert!((d - great_circle_km(la2, lo2, la1, lo1)).abs() < 1e-6);
        prop_assert!((0.0..=PI * 6371.0 + 1e-6).contains(&d));
    }

    #[test]
    fn hourly_buckets_conserve_totals(
        flights in prop::collection::vec((0.0..86_399.0f64, -60.0..70.0f64, -180.0..180.0f64, class_strategy()), 1..60),
    ) {
        let flights = flights
            .into_iter()
            .enumerate()
            .map(|(i, (t, lat, lon, class))| Flight {
                departure: t,
                destination_lat: lat,
                destination_lon: lon,
                class,
                label: format!("F{i}"),
            })
            .collect();
        let s = Schedule { origin_lat: AMS.0, origin_lon: AMS.1, flights };
        let r = hourly_series(&s, &DemandConfig::default()).unwrap();
        let lh2: f64 = r.hourly.iter().map(|h| h.lh2).sum();
        let gh2: f64 = r.hourly.iter().map(|h| h.gh2).sum();
        prop_assert_eq!(r.hourly.len(), 24);
        prop_assert!((lh2 - r.total_lh2()).abs() <= 1e-9 * (1.0 + r.total_lh2()));
        prop_assert!((gh2 - r.total_gh2()).abs() <= 1e-9 * (1.0 + r.total_gh2()));
        prop_assert_eq!(r.hourly.iter().map(|h| h.departures).sum::<usize>(), s.flights.len());
    }
}
