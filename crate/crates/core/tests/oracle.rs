use groundcam::fixtures::{self, oracle_metrics, oracle_nms, random_instance, random_peaks};
use groundcam::pointing::nms;
use groundcam::{evaluate_map, MetricConfig};

const NAMES: [&str; 7] = ["iou_soft", "iou_binary", "dice_soft", "dice_binary", "wdp_soft", "wdp_binary", "io_ratio"];

#[test]
fn fused_kernel_matches_oracle_on_random_instances() {
    let cfg = MetricConfig::default();
    for k in 0..300u64 {
        let (h, w) = (4 + (k as usize * 7) % 61, 4 + (k as usize * 13) % 61);
        let (map, gt) = random_instance(11, k, h, w);
        let fast = evaluate_map(&map, &gt, &cfg).unwrap();
        let slow = oracle_metrics(&map, gt.boxes(), &cfg).unwrap();
        for ((name, a), b) in NAMES.iter().zip(fast.scalars()).zip(slow.scalars()) {
            assert!((a - b).abs() <= 1e-9, "instance {k} {name}: {a} vs {b}");
        }
        assert_eq!(fast.pg_hit, slow.pg_hit, "instance {k}");
        assert_eq!(fast.pg_uncertain, slow.pg_uncertain, "instance {k}");
        assert_eq!(fast.argmax_coord, slow.argmax_coord, "instance {k}");
        assert_eq!(fast.nms_maxima, slow.nms_maxima, "instance {k}");
    }
}

#[test]
fn grid_nms_matches_exhaustive_nms() {
    for k in 0..300u64 {
        let peaks = random_peaks(5, k, 200, 300);
        for delta in [0.0, 1.5, 10.0, 50.0, 500.0] {
            assert_eq!(nms(&peaks, delta), oracle_nms(&peaks, delta), "list {k}, delta {delta}");
        }
    }
}

#[test]
fn sigmoid_log_handles_the_edges() {
    assert_eq!(fixtures::sigmoid_log(0.0, 0.0), 0.0);
    assert_eq!(fixtures::sigmoid_log(0.0, 3.0), 0.0);
    assert!((fixtures::sigmoid_log(1.0, 1.0) - 0.5).abs() < 1e-15);
}
