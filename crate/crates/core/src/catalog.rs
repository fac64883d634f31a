//! Built-in algebras.
//!
//! Signatures list their symbols alphabetically, which is also the order the
//! file format produces, so exported files read back to equal values.

use crate::algebra::{Elem, FiniteAlgebra, Signature};
use crate::error::{Error, Result};
use crate::hom::Homomorphism;

pub fn lattice_signature() -> Signature {
    Signature::new([("join", 2), ("meet", 2)]).expect("distinct names")
}

/// `imp, join, meet, mul, one, zero`.
pub fn bl_signature() -> Signature {
    Signature::new([("imp", 2), ("join", 2), ("meet", 2), ("mul", 2), ("one", 0), ("zero", 0)]).expect("distinct names")
}

pub fn boolean_signature() -> Signature {
    Signature::new([("join", 2), ("meet", 2), ("not", 1), ("one", 0), ("zero", 0)]).expect("distinct names")
}

/// The `k`-element chain `0 < 1 < … < k-1` with min and max.
pub fn chain_lattice(k: usize) -> FiniteAlgebra {
    assert!(k >= 1, "chain_lattice needs at least one element");
    FiniteAlgebra::from_fn(format!("L{k}"), lattice_signature(), k, None, |op, a| match op {
        0 => a[0].max(a[1]),
        _ => a[0].min(a[1]),
    })
    .expect("chain tables are valid")
}

/// The five-element diamond: bottom 0, atoms 1, 2, 3, top 4.
pub fn diamond_m3() -> FiniteAlgebra {
    let leq = |x: Elem, y: Elem| x == y || x == 0 || y == 4;
    let join = |x: Elem, y: Elem| {
        if leq(x, y) {
            y
        } else if leq(y, x) {
            x
        } else {
            4
        }
    };
    let meet = |x: Elem, y: Elem| {
        if leq(x, y) {
            x
        } else if leq(y, x) {
            y
        } else {
            0
        }
    };
    FiniteAlgebra::from_fn("M3", lattice_signature(), 5, None, |op, a| match op {
        0 => join(a[0], a[1]),
        _ => meet(a[0], a[1]),
    })
    .expect("M3 tables are valid")
}

/// The lattice-ordered monoid on `-2 < -1 < 1 < 2` with unit 1.
pub fn c4() -> FiniteAlgebra {
    const MUL: [[Elem; 4]; 4] = [[0, 0, 0, 0], [0, 1, 1, 3], [0, 1, 2, 3], [0, 3, 3, 3]];
    let sig = Signature::new([("join", 2), ("meet", 2), ("mul", 2), ("one", 0)]).expect("distinct names");
    let labels = ["-2", "-1", "1", "2"].iter().map(|s| s.to_string()).collect();
    FiniteAlgebra::from_fn("C4", sig, 4, Some(labels), |op, a| match op {
        0 => a[0].max(a[1]),
        1 => a[0].min(a[1]),
        2 => MUL[a[0]][a[1]],
        _ => 2,
    })
    .expect("C4 tables are valid")
}

fn bl_chain(name: String, k: usize, labels: Option<Vec<String>>, mul: impl Fn(Elem, Elem) -> Elem) -> FiniteAlgebra {
    let top = k - 1;
    // residuum of a chain: the largest c with a·c <= b
    let imp = |a: Elem, b: Elem| (0..k).rev().find(|&c| mul(a, c) <= b).unwrap_or(0);
    FiniteAlgebra::from_fn(name, bl_signature(), k, labels, |op, a| match op {
        0 => imp(a[0], a[1]),
        1 => a[0].max(a[1]),
        2 => a[0].min(a[1]),
        3 => mul(a[0], a[1]),
        4 => top,
        _ => 0,
    })
    .expect("chain tables are valid")
}

/// The Gödel chain with `k` elements `0 < 1/(k-1) < … < 1`: product is min,
/// and `a → b` is 1 when `a ≤ b`, else `b`.
pub fn godel_chain(k: usize) -> FiniteAlgebra {
    assert!(k >= 2, "godel_chain needs at least two elements");
    let labels = (0..k)
        .map(|i| match i {
            0 => "0".to_string(),
            i if i == k - 1 => "1".to_string(),
            i => format!("{i}/{}", k - 1),
        })
        .collect();
    bl_chain(format!("G{k}"), k, Some(labels), |a, b| a.min(b))
}

/// The Łukasiewicz chain `{0, …, n}` with `a·b = max(a+b-n, 0)` and
/// `a → b = min(n-a+b, n)`.
pub fn lukasiewicz_chain(n: usize) -> FiniteAlgebra {
    assert!(n >= 1, "lukasiewicz_chain needs n >= 1");
    bl_chain(format!("S{n}"), n + 1, None, |a, b| (a + b).saturating_sub(n))
}

/// The two-element Boolean algebra in the signature `join, meet, not, one, zero`.
pub fn boolean_algebra() -> FiniteAlgebra {
    FiniteAlgebra::from_fn("B2", boolean_signature(), 2, None, |op, a| match op {
        0 => a[0].max(a[1]),
        1 => a[0].min(a[1]),
        2 => 1 - a[0],
        3 => 1,
        _ => 0,
    })
    .expect("Boolean tables are valid")
}

/// An `n`-element set with no operations.
pub fn bare_set(n: usize) -> FiniteAlgebra {
    FiniteAlgebra::from_fn(format!("Set{n}"), Signature::default(), n, None, |_, _| 0).expect("no tables")
}

/// The endomorphism of a BL-chain sending `a` to `0` when some power
/// `a^m` (`m ≤ |A|`) is `0` and to `1` otherwise, checked before returning.
pub fn boolean_retraction(a: &FiniteAlgebra) -> Result<Homomorphism> {
    let need = |name: &str| {
        a.op_index(name)
            .ok_or_else(|| Error::InvalidInput(format!("`{}` has no operation `{name}`", a.name())))
    };
    let mul = need("mul")?;
    let zero = a.apply(need("zero")?, &[]);
    let one = a.apply(need("one")?, &[]);
    let image: Vec<Elem> = (0..a.size())
        .map(|x| {
            let mut power = x;
            for _ in 0..a.size() {
                if power == zero {
                    return zero;
                }
                power = a.apply(mul, &[power, x]);
            }
            if power == zero {
                zero
            } else {
                one
            }
        })
        .collect();
    let h = Homomorphism::new(image, a.size());
    if !h.is_homomorphism(a, a) {
        return Err(Error::NotAHomomorphism(format!(
            "the power-nilpotence map on `{}` does not preserve the operations",
            a.name()
        )));
    }
    Ok(h)
}

/// Catalog entries exposed by name, with the number of integer parameters each takes.
pub const ENTRIES: &[(&str, usize, &str)] = &[
    ("chain_lattice", 1, "k-element chain lattice (join, meet)"),
    ("diamond_m3", 0, "five-element modular non-distributive lattice"),
    ("c4", 0, "lattice-ordered monoid on -2 < -1 < 1 < 2"),
    ("godel_chain", 1, "k-element Goedel chain in the BL signature"),
    ("lukasiewicz_chain", 1, "Lukasiewicz chain {0..n} in the BL signature"),
    ("boolean_algebra", 0, "two-element Boolean algebra (join, meet, not, one, zero)"),
    ("bare_set", 1, "n-element set with no operations"),
];

/// Looks up a catalog constructor by name.
pub fn by_name(name: &str, params: &[usize]) -> Result<FiniteAlgebra> {
    let (_, arity, _) = ENTRIES
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown catalog entry `{name}`")))?;
    if params.len() != *arity {
        return Err(Error::InvalidInput(format!(
            "`{name}` takes {arity} parameter(s), {} given",
            params.len()
        )));
    }
    let p = params.first().copied().unwrap_or(0);
    let check = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("`{name}` requires {what}")))
        }
    };
    Ok(match name {
        "chain_lattice" => {
            check(p >= 1, "k >= 1")?;
            chain_lattice(p)
        }
        "diamond_m3" => diamond_m3(),
        "c4" => c4(),
        "godel_chain" => {
            check(p >= 2, "k >= 2")?;
            godel_chain(p)
        }
        "lukasiewicz_chain" => {
            check(p >= 1, "n >= 1")?;
            lukasiewicz_chain(p)
        }
        "boolean_algebra" => boolean_algebra(),
        "bare_set" => {
            check(p >= 1, "n >= 1")?;
            bare_set(p)
        }
        _ => unreachable!("entry table and match agree"),
    })
}
