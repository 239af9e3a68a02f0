//! Acceptance gate: one test per criterion, each printing a single pass or
//! fail line (visible under `cargo test --test acceptance -- --nocapture`)
//! and enforcing its wall-clock budget.

#[path = "support/properties.rs"]
mod properties;

use flopdt::charges::ChargePath;
use flopdt::exact::{rat, rat_int};
use flopdt::lattice::{FlopMode, GammaClass};
use flopdt::oracles::{count_pyramid_partitions, fit_variable_map, plane_partition_table};
use flopdt::series::{ConeSeries, Truncation};
use flopdt::wallcross::{detect_walls, scenario, scenario_with_b, Scenario};
use num_traits::Signed;
use std::time::{Duration, Instant};

fn gate(number: u32, budget_secs: u64, what: &str, check: impl FnOnce() -> Result<(), String>) {
    let started = Instant::now();
    let outcome = check();
    let elapsed = started.elapsed();
    match &outcome {
        Ok(()) => println!("criterion {number}: pass in {elapsed:.2?}: {what}"),
        Err(reason) => println!("criterion {number}: fail: {what}: {reason}"),
    }
    if let Err(reason) = outcome {
        panic!("criterion {number} failed: {reason}");
    }
    assert!(
        elapsed <= Duration::from_secs(budget_secs),
        "criterion {number} took {elapsed:?}, budget {budget_secs}s"
    );
}

fn model() -> std::sync::Arc<flopdt::lattice::FlopModel> {
    properties::conifold()
}

#[test]
fn criterion_1_macmahon_matches_plane_partition_counts() {
    gate(1, 5, "unsigned MacMahon coefficients equal plane partition counts through n = 12", || {
        let m = model();
        let series = ConeSeries::macmahon_unsigned(&m, Truncation::new(12, 0), 1)
            .map_err(|e| e.to_string())?;
        let table = plane_partition_table(12).map_err(|e| e.to_string())?;
        for (n, count) in table.iter().enumerate() {
            let coeff = series
                .coefficient(n as i64, &m.zero_beta())
                .map_err(|e| e.to_string())?;
            if coeff != rat_int(*count as i64) {
                return Err(format!("coefficient at n = {n} is {coeff}, count is {count}"));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_2_log_extraction_round_trips_random_tables() {
    gate(2, 10, "100 random invariant tables survive a crossing and log-extraction round trip", || {
        std::panic::catch_unwind(|| properties::log_extraction_round_trip(100, 0xC2))
            .map_err(|_| "a seeded case failed".to_string())
    });
}

#[test]
fn criterion_3_noncommutative_product_scenario_passes() {
    gate(3, 30, "wall product over the interpolation path equals the closed form on the (8, 4) box", || {
        let report = scenario(Scenario::NcdtProduct, &model(), Truncation::new(8, 4))
            .map_err(|e| e.to_string())?;
        match report.first_mismatch {
            None if report.passed => Ok(()),
            Some(mm) => Err(format!("first mismatch {mm}")),
            None => Err("scenario reported failure".into()),
        }
    });
}

#[test]
fn criterion_4_flop_reindexing_fixes_the_relative_series() {
    gate(4, 5, "composite flop re-indexing leaves the relative closed form unchanged on the (8, 4) box", || {
        let m = model();
        let dt = ConeSeries::dt_closed_form(&m, Truncation::new(8, 4), false)
            .map_err(|e| e.to_string())?;
        let mapped = dt.substitute(FlopMode::IPhiStar).map_err(|e| e.to_string())?;
        if mapped.sub(&dt).map_err(|e| e.to_string())?.is_zero() {
            Ok(())
        } else {
            Err("re-indexed series differs".into())
        }
    });
}

#[test]
fn criterion_5_wall_census_and_base_point_independence() {
    gate(5, 10, "ray census on the (6, 4) box is exact and the point series ignores the base point", || {
        let m = model();
        let events = detect_walls(&ChargePath::default_omega_ray(), &m, 6, 4)
            .map_err(|e| e.to_string())?;
        let mut expected = Vec::new();
        for mm in 1..=4i64 {
            for n in -6..=6i64 {
                if 2 * n + mm > 0 && num_integer::gcd(n.abs(), mm) == 1 {
                    expected.push((rat(2 * n + mm, 2 * mm), GammaClass::new(n, vec![mm], 0)));
                }
            }
        }
        expected.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        let listed: Vec<_> = events
            .iter()
            .map(|ev| (ev.t_star.clone(), ev.primitive.clone()))
            .collect();
        if listed != expected {
            return Err(format!("census lists {} rays, predicted {}", listed.len(), expected.len()));
        }
        if events.iter().any(|ev| ev.epsilon != 1) {
            return Err("unexpected crossing sign on the outward ray".into());
        }

        let half = scenario_with_b(Scenario::PtFromNc, &m, Truncation::new(6, 4), &rat(-1, 2))
            .map_err(|e| e.to_string())?;
        let third = scenario_with_b(Scenario::PtFromNc, &m, Truncation::new(6, 4), &rat(-1, 3))
            .map_err(|e| e.to_string())?;
        if !(half.passed && third.passed) {
            return Err("a base point run failed its closed form".into());
        }
        if !half.series.sub(&third.series).map_err(|e| e.to_string())?.is_zero() {
            return Err("series depend on the base point".into());
        }
        Ok(())
    });
}

#[test]
fn criterion_6_point_series_from_crossings_matches_closed_form() {
    gate(6, 15, "point invariants assembled from wall crossings equal the closed form on the (8, 4) box", || {
        let report = scenario(Scenario::PtFromNc, &model(), Truncation::new(8, 4))
            .map_err(|e| e.to_string())?;
        match report.first_mismatch {
            None if report.passed => Ok(()),
            Some(mm) => Err(format!("first mismatch {mm}")),
            None => Err("scenario reported failure".into()),
        }
    });
}

#[test]
fn criterion_7_fitted_dictionary_is_unique_and_consistent() {
    gate(7, 60, "the bucket-to-class dictionary fits uniquely and matches coefficient magnitudes through total 10", || {
        let m = model();
        let counts = count_pyramid_partitions(10).map_err(|e| e.to_string())?;
        let reference = ConeSeries::ncdt_closed_form(&m, Truncation::new(10, 4), false)
            .map_err(|e| e.to_string())?;
        let map = fit_variable_map(&counts, &reference, 8).map_err(|e| e.to_string())?;

        for w in 0..=10i64 {
            for b in 0..=(10 - w) {
                if map.apply(w, b) != (w, b - w) {
                    return Err(format!("dictionary sends ({w}, {b}) to {:?}", map.apply(w, b)));
                }
            }
        }
        for (n, mdeg) in [(1, 0), (1, -1), (2, 1), (3, -2)] {
            let parity = if (n + mdeg) % 2 == 0 { 1 } else { -1 };
            if map.sign(n, mdeg) != parity {
                return Err(format!("sign rule at ({n}, {mdeg}) is {}", map.sign(n, mdeg)));
            }
        }
        for w in 0..=10u32 {
            for b in 0..=(10 - w) {
                let count = counts.get(&(w, b)).copied().unwrap_or(0);
                let (n, mdeg) = map.apply(w as i64, b as i64);
                if n > 10 || mdeg.abs() > 4 {
                    continue;
                }
                let coeff = reference
                    .coefficient(n, &m.exceptional_beta(mdeg))
                    .map_err(|e| e.to_string())?;
                if coeff.abs() != rat_int(count as i64) {
                    return Err(format!(
                        "bucket ({w}, {b}) holds {count}, coefficient magnitude is {}",
                        coeff.abs()
                    ));
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_8_weighted_scenario_passes_with_stone_counts() {
    gate(8, 60, "the weighted scenario passes on the (8, 4) box with stone counts pinned through total 10", || {
        let report = scenario(Scenario::EulerHat, &model(), Truncation::new(8, 4))
            .map_err(|e| e.to_string())?;
        if !report.passed {
            return Err(match report.first_mismatch {
                Some(mm) => format!("first mismatch {mm}"),
                None => "scenario reported failure".into(),
            });
        }
        if !report
            .notes
            .iter()
            .any(|n| n.contains("stone counts pin") && n.contains("up to total 10"))
        {
            return Err(format!("stone pin note missing: {:?}", report.notes));
        }
        Ok(())
    });
}

#[test]
fn criterion_9_property_suite_holds_over_a_thousand_cases() {
    gate(9, 60, "1000 seeded property cases hold across ring, substitution, exp/log, symmetry, telescoping", || {
        std::panic::catch_unwind(|| {
            properties::ring_axioms(200, 0x91);
            properties::substitution_multiplicative(200, 0x92);
            properties::exp_log_inverse(200, 0x93);
            properties::invariant_symmetry(200, 0x94);
            properties::crossing_telescopes(200, 0x95);
        })
        .map_err(|_| "a seeded case failed".to_string())
    });
}
