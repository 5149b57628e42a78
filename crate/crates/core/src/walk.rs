//! The random step shared by the cuckoo table and the eviction processes.

use serde::{Deserialize, Serialize};

use crate::rng::ChoiceStream;
use crate::Vertex;

/// How a key that was just evicted avoids the bucket it was evicted from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exclusion {
    /// Plain random walk: every incidence is admissible.
    Off,
    /// Remove the bucket value, i.e. every copy of it among the incidences.
    #[default]
    AllCopies,
    /// Remove a single copy of the bucket.
    OneCopy,
}

/// Picks the bucket for the `draw`-th move of `edge`.
///
/// `previous` is the bucket the edge was last evicted from, if any. When
/// excluding it would leave nothing (every incidence equals it) the step
/// falls back to all incidences.
pub(crate) fn pick_bucket(
    incidences: &[Vertex],
    previous: Option<Vertex>,
    exclusion: Exclusion,
    choices: &ChoiceStream,
    edge: usize,
    draw: u64,
) -> Vertex {
    let all = |choices: &ChoiceStream| incidences[choices.below(edge, draw, incidences.len())];
    let Some(old) = previous else {
        return all(choices);
    };
    match exclusion {
        Exclusion::Off => all(choices),
        Exclusion::AllCopies => {
            let allowed = incidences.iter().filter(|&&b| b != old).count();
            if allowed == 0 {
                return all(choices);
            }
            let r = choices.below(edge, draw, allowed);
            incidences
                .iter()
                .copied()
                .filter(|&b| b != old)
                .nth(r)
                .expect("r < allowed")
        }
        Exclusion::OneCopy => match incidences.iter().position(|&b| b == old) {
            Some(skip) if incidences.len() > 1 => {
                let r = choices.below(edge, draw, incidences.len() - 1);
                incidences[if r >= skip { r + 1 } else { r }]
            }
            _ => all(choices),
        },
    }
}
