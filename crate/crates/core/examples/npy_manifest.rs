//! Writes maps as `.npy`, builds a manifest, and loads it back.

use std::fs;

use groundcam::fixtures::{gaussian_map, BlobSpec};
use groundcam::ingest::{self, npy, GroundingInstance, Setting};
use groundcam::BoundingBox;

fn main() -> groundcam::Result<()> {
    let dir = std::env::temp_dir().join("groundcam-npy-example");
    fs::create_dir_all(&dir)?;

    let mut instances = Vec::new();
    for (k, center) in [(20, 20), (40, 12)].into_iter().enumerate() {
        let map = gaussian_map(64, 64, &[BlobSpec::new(center, 5.0, 1.0)], 0.05, k as u64)?;
        let name = format!("map{k}.npy");
        fs::write(dir.join(&name), npy::encode(&map, npy::Dtype::F32))?;
        instances.push(GroundingInstance {
            id: format!("inst-{k}"),
            map_path: name.into(),
            boxes: vec![BoundingBox::new(12, 12, 30, 30)],
            prompt: "a dog".into(),
            dataset: "demo".into(),
            split: "test".into(),
            setting: Setting::Phrase,
            model: "toy".into(),
        });
    }
    let manifest = dir.join("manifest.jsonl");
    ingest::write_manifest(fs::File::create(&manifest)?, &instances)?;
    print!("{}", fs::read_to_string(&manifest)?);

    for inst in ingest::load_manifest(&manifest)? {
        let (map, gt) = ingest::load_instance(&inst)?;
        println!("{}: {:?} map, {} pixels inside the boxes", inst.id, map.shape(), gt.inside_count());
    }

    let grid = ingest::parse_text_grid("2 2\n0 0.5\n1 0.25\n")?;
    println!("text grid {:?} -> {:?}", grid.shape(), grid.values());
    Ok(())
}
