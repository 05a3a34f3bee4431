//! Built-in example machines.

use crate::gmmt::{Gmmt, GmmtBuilder};
use crate::mmt::{Mmt, MmtBuilder};

/// Two timers `x` (2) and `y` (3) on a single input `i` with outputs `o`, `o'`.
pub fn two_timer() -> Mmt {
    MmtBuilder::new()
        .timers(["x", "y"])
        .input("i")
        .state("q0", &[])
        .state("q1", &["x"])
        .state("q2", &["x", "y"])
        .state("q3", &["x", "y"])
        .state("q4", &["x", "y"])
        .state("q5", &["x", "y"])
        .edge("q0", "i", "q1", "o", Some(("x", 2)))
        .edge("q1", "to[x]", "q1", "o", Some(("x", 2)))
        .edge("q1", "i", "q2", "o'", Some(("y", 3)))
        .edge("q2", "to[x]", "q3", "o", Some(("x", 2)))
        .edge("q2", "i", "q3", "o'", Some(("x", 2)))
        .edge("q3", "i", "q4", "o'", Some(("x", 2)))
        .edge("q3", "to[y]", "q0", "o", None)
        .edge("q3", "to[x]", "q5", "o", Some(("x", 2)))
        .edge("q4", "to[x]", "q5", "o", Some(("x", 2)))
        .edge("q4", "i", "q4", "o'", Some(("x", 2)))
        .edge("q4", "to[y]", "q0", "o", None)
        .edge("q5", "i", "q5", "o'", Some(("x", 2)))
        .edge("q5", "to[y]", "q0", "o", None)
        .build()
        .expect("well-formed")
}

/// A one-timer approximation of [`two_timer`].
pub fn one_timer_hypothesis() -> Mmt {
    MmtBuilder::new()
        .timer("y1")
        .input("i")
        .state("t0", &[])
        .state("t1", &["y1"])
        .edge("t0", "i", "t1", "o", Some(("y1", 2)))
        .edge("t1", "i", "t1", "o'", None)
        .edge("t1", "to[y1]", "t1", "o", Some(("y1", 2)))
        .build()
        .expect("well-formed")
}

/// A five-state machine equivalent to [`two_timer`].
pub fn two_timer_minimal() -> Mmt {
    MmtBuilder::new()
        .timers(["y1", "y2"])
        .input("i")
        .state("t0", &[])
        .state("t1", &["y1"])
        .state("t3", &["y1", "y2"])
        .state("t6", &["y1", "y2"])
        .state("t9", &["y2"])
        .edge("t0", "i", "t1", "o", Some(("y1", 2)))
        .edge("t1", "to[y1]", "t1", "o", Some(("y1", 2)))
        .edge("t1", "i", "t3", "o'", Some(("y2", 3)))
        .edge("t3", "i", "t6", "o'", Some(("y1", 2)))
        .edge("t3", "to[y1]", "t6", "o", Some(("y1", 2)))
        .edge("t6", "i", "t6", "o'", Some(("y1", 2)))
        .edge("t6", "to[y1]", "t9", "o", None)
        .edge("t6", "to[y2]", "t0", "o", None)
        .edge("t9", "i", "t9", "o'", None)
        .edge("t9", "to[y2]", "t0", "o", None)
        .build()
        .expect("well-formed")
}

/// A machine with one input whose single learned timer must be copied between
/// two timers of the hypothesis.
pub fn shared_timer() -> Mmt {
    MmtBuilder::new()
        .timers(["x", "y"])
        .inputs(["i", "j"])
        .state("q0", &[])
        .state("q1", &["x"])
        .state("q2", &["x", "y"])
        .state("q3", &["x"])
        .state("q4", &["y"])
        .edge("q0", "i", "q1", "o", Some(("x", 2)))
        .edge("q0", "j", "q4", "o", Some(("y", 1)))
        .edge("q1", "j", "q1", "o", None)
        .edge("q1", "to[x]", "q1", "o", Some(("x", 2)))
        .edge("q1", "i", "q2", "o", Some(("y", 1)))
        .edge("q2", "i", "q2", "o", None)
        .edge("q2", "j", "q2", "o", None)
        .edge("q2", "to[x]", "q3", "o", Some(("x", 1)))
        .edge("q2", "to[y]", "q4", "o", Some(("y", 1)))
        .edge("q3", "i", "q3", "o", None)
        .edge("q3", "j", "q3", "o", None)
        .edge("q3", "to[x]", "q3", "o", Some(("x", 1)))
        .edge("q4", "i", "q4", "o", None)
        .edge("q4", "j", "q4", "o", None)
        .edge("q4", "to[y]", "q4", "o", Some(("y", 1)))
        .build()
        .expect("well-formed")
}

/// A generalized MMT that swaps and copies timers.
pub fn renaming() -> Gmmt {
    GmmtBuilder::new()
        .timers(["x", "y"])
        .inputs(["i"])
        .state("q0", &[])
        .state("q1", &["x"])
        .state("q2", &["y"])
        .state("q3", &["x", "y"])
        .state("q4", &["y"])
        .edge("q0", "i", "q1", "o", &[("x", "2")])
        .edge("q1", "to[x]", "q2", "o", &[("y", "2")])
        .edge("q1", "i", "q3", "o", &[("x", "x"), ("y", "1")])
        .edge("q2", "i", "q2", "o", &[("y", "2")])
        .edge("q2", "to[y]", "q2", "o", &[("y", "2")])
        .edge("q3", "i", "q3", "o", &[("y", "x"), ("x", "2")])
        .edge("q3", "to[x]", "q4", "o", &[("y", "1")])
        .edge("q3", "to[y]", "q4", "o", &[("y", "1")])
        .edge("q4", "i", "q4", "o", &[("y", "1")])
        .edge("q4", "to[y]", "q4", "o", &[("y", "1")])
        .build()
        .expect("well-formed")
}

/// One station of the FDDI token-ring protocol with synchronous allocation
/// `sa` and target token rotation time `ttrt`. Inputs that the protocol
/// ignores in a state are self-loops with output `void`.
pub fn fddi(sa: u32, ttrt: u32) -> Gmmt {
    let sa = sa.to_string();
    let ttrt = ttrt.to_string();
    GmmtBuilder::new()
        .timers(["x", "y"])
        .inputs(["TT", "EA"])
        .state("Idle", &[])
        .state("Idlex", &["x"])
        .state("STy", &["y"])
        .state("STxy", &["x", "y"])
        .state("ATxy", &["x", "y"])
        .edge("Idle", "TT", "STy", "BS", &[("y", &sa)])
        .edge("Idle", "EA", "Idle", "void", &[])
        .edge("Idlex", "to[x]", "Idle", "o", &[])
        .edge("Idlex", "TT", "STxy", "BS", &[("x", "x"), ("y", &sa)])
        .edge("Idlex", "EA", "Idlex", "void", &[("x", "x")])
        .edge("STxy", "to[x]", "STy", "o", &[("y", "y")])
        .edge(
            "STxy",
            "to[y]",
            "ATxy",
            "ES+BA",
            &[("x", "x"), ("y", &ttrt)],
        )
        .edge("STxy", "TT", "STxy", "void", &[("x", "x"), ("y", "y")])
        .edge("STxy", "EA", "STxy", "void", &[("x", "x"), ("y", "y")])
        .edge("ATxy", "to[x]", "Idlex", "EA+RT", &[("x", "y")])
        .edge("ATxy", "EA", "Idlex", "RT", &[("x", "y")])
        .edge("ATxy", "TT", "ATxy", "void", &[("x", "x"), ("y", "y")])
        .edge("STy", "to[y]", "Idlex", "ES+RT", &[("x", &ttrt)])
        .edge("STy", "TT", "STy", "void", &[("y", "y")])
        .edge("STy", "EA", "STy", "void", &[("y", "y")])
        .build()
        .expect("well-formed")
}

/// A single state echoing its only input, without timers.
pub fn echo() -> Mmt {
    MmtBuilder::new()
        .input("i")
        .state("q0", &[])
        .edge("q0", "i", "q0", "o", None)
        .build()
        .expect("well-formed")
}

/// Looks up a built-in machine by name.
pub fn builtin(name: &str) -> Option<crate::io::Model> {
    use crate::io::Model;
    Some(match name {
        "two-timer" => Model::Mmt(two_timer()),
        "one-timer" => Model::Mmt(one_timer_hypothesis()),
        "two-timer-minimal" => Model::Mmt(two_timer_minimal()),
        "shared-timer" => Model::Mmt(shared_timer()),
        "renaming" => Model::Gmmt(renaming()),
        "fddi" => Model::Gmmt(fddi(20, 100)),
        "echo" => Model::Mmt(echo()),
        _ => return None,
    })
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "two-timer",
    "one-timer",
    "two-timer-minimal",
    "shared-timer",
    "renaming",
    "fddi",
    "echo",
];
