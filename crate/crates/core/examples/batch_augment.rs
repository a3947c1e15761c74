//! Augments a small generated corpus through the library entry point used by
//! the CLI, then replays every output from the reproduction manifest.

use textmorph::cli::manifest::read_replay;
use textmorph::cli::{cmd_augment, AugmentArgs, DeformFlags};
use textmorph::{render_word, GlyphTask, Image};

fn main() -> textmorph::Result<()> {
    let dir = std::env::temp_dir().join(format!("textmorph-batch-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let task = GlyphTask::digits();
    let mut manifest = String::from("# image\ttext\n");
    for (i, word) in ["314", "2718", "16180", "1414"].iter().enumerate() {
        let name = format!("w{i}.png");
        render_word(&task, word, 100, 32)?.save_png(dir.join(&name))?;
        manifest.push_str(&format!("{name}\t{word}\n"));
    }
    let list = dir.join("manifest.tsv");
    std::fs::write(&list, manifest)?;

    let out = dir.join("out");
    let summary = cmd_augment(&AugmentArgs {
        manifest: list,
        out_dir: out.clone(),
        deform: DeformFlags {
            seed: 11,
            ..Default::default()
        },
        copies: 3,
        threads: None,
    })?;
    println!(
        "wrote {} images, {} failures",
        summary.written,
        summary.failures.len()
    );

    let records = read_replay(&out.join("replay.jsonl"))?;
    let mut identical = 0;
    for r in &records {
        if r.replay(&Image::load(&r.source)?)? == Image::load(&r.output)? {
            identical += 1;
        }
    }
    println!(
        "replayed {identical}/{} outputs bit-exactly; files in {}",
        records.len(),
        out.display()
    );
    Ok(())
}
