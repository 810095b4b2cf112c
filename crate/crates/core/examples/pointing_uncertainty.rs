//! Tied maxima on both sides of the box make the pointing game undecidable.

use groundcam::fixtures::{scenario1_variant, Scenario1Kind};
use groundcam::pointing::pg_uncertainty;
use groundcam::{evaluate_map, BoundingBox, GroundTruth, MetricConfig};

fn main() -> groundcam::Result<()> {
    let bbox = BoundingBox::new(80, 80, 140, 140);
    let gt = GroundTruth::new(vec![bbox], 224, 224)?;
    let cfg = MetricConfig::default();

    for kind in [Scenario1Kind::Mixed, Scenario1Kind::SameSide, Scenario1Kind::Unequal] {
        let map = scenario1_variant(224, 224, bbox, cfg.nms_radius, kind)?;
        let m = evaluate_map(&map, &gt, &cfg)?;
        let report = pg_uncertainty(&map, &gt, &cfg)?;
        println!("{kind:?}: pg_hit {} argmax {:?} uncertain {}", m.pg_hit, m.argmax_coord, m.pg_uncertain);
        for (peak, side) in report.tied_peaks.iter().zip(&report.sides) {
            println!("    tied peak {:.3} at ({}, {}) {side:?}", peak.value, peak.row, peak.col);
        }
    }
    Ok(())
}
