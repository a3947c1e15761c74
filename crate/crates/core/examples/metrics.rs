//! Edit distance, CER, WER, and word accuracy on a few prediction pairs.

use textmorph::{cer, edit_distance, wer, word_accuracy, Comparison};

fn main() -> textmorph::Result<()> {
    let pairs = [
        ("kitten", "sitting"),
        ("the quick fox", "the quick brown fox"),
        ("Hello!", "hello"),
        ("2024", "2024"),
    ];
    for (pred, gt) in pairs {
        println!(
            "{pred:>15} vs {gt:<20} ed {}  cer {:.3}  wer {:.3}",
            edit_distance(pred, gt),
            cer(pred, gt)?,
            wer(pred, gt)?
        );
    }
    let (preds, gts): (Vec<&str>, Vec<&str>) = pairs.iter().copied().unzip();
    println!(
        "word accuracy, exact:      {:.2}",
        word_accuracy(&preds, &gts, Comparison::Exact)?
    );
    println!(
        "word accuracy, normalized: {:.2}",
        word_accuracy(&preds, &gts, Comparison::Normalized)?
    );
    Ok(())
}
