//! Recomputes the constants behind p1* and p2* and compares them with the
//! published values.

use radio_election::analytics::lemma_constants;
use radio_election::protocols::ProtocolKind;

fn main() {
    for kind in [ProtocolKind::Alg1Strong, ProtocolKind::Alg2Weak] {
        println!("{kind:?}");
        for e in lemma_constants(kind).entries {
            println!(
                "  {:<28} {:>10.6}  published {:<8} {:>+7.2}%  {}",
                e.name,
                e.computed,
                e.reported,
                100.0 * e.relative_deviation(),
                if e.pass() { "" } else { "OUT OF TOLERANCE" }
            );
        }
    }
}
