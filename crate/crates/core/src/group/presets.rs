//! Built-in chains used by the fixtures and tests.

use super::chain::{BackendTag, ChainSpec, QuotientChain, QuotientSpec, Side, TableSpec, ZdSpec};

/// Names accepted by [`preset`].
pub const PRESETS: &[&str] = &["dyadic", "z2", "dihedral", "s4", "s4-nonnormal"];

pub fn preset(name: &str, depth: Option<usize>) -> Option<QuotientChain> {
    match name {
        "dyadic" => Some(dyadic_chain(depth.unwrap_or(16))),
        "z2" => Some(zd_power_chain(2, depth.unwrap_or(8))),
        "dihedral" => Some(dihedral_chain(depth.unwrap_or(6))),
        "s4" => Some(s4_chain()),
        "s4-nonnormal" => Some(s4_nonnormal_chain()),
        _ => None,
    }
}

/// `Γ_n = 2ⁿℤ` in ℤ.
pub fn dyadic_chain(depth: usize) -> QuotientChain {
    zd_power_chain(1, depth).with_name("dyadic")
}

/// `Γ_n = (2ⁿℤ)^d` in ℤ^d.
pub fn zd_power_chain(d: usize, depth: usize) -> QuotientChain {
    let spec = ChainSpec {
        backend: BackendTag::Zd,
        depth,
        name: Some(if d == 1 { "dyadic".into() } else { format!("z{d}") }),
        zd: Some(ZdSpec { d, moduli: (1..=depth).map(|n| vec![1u64 << n; d]).collect() }),
        table: None,
        side: Side::Right,
    };
    QuotientChain::from_spec(&spec).expect("power-of-two chain is valid")
}

/// Free group on `a, b` mapped onto the dihedral groups of order `2^{n+1}`,
/// `a ↦ rotation`, `b ↦ reflection`. Element `r^k s^f` has id `f·2ⁿ + k`.
pub fn dihedral_chain(depth: usize) -> QuotientChain {
    let mut quotients = Vec::new();
    let mut projections = Vec::new();
    for n in 1..=depth {
        let m = 1u32 << n;
        let size = 2 * m;
        let mul = (0..size)
            .map(|x| {
                let (f1, k1) = (x / m, x % m);
                (0..size)
                    .map(|y| {
                        let (f2, k2) = (y / m, y % m);
                        let k = if f1 == 0 { (k1 + k2) % m } else { (k1 + m - k2) % m };
                        ((f1 + f2) % 2) * m + k
                    })
                    .collect()
            })
            .collect();
        quotients.push(QuotientSpec { size: size as usize, mul, gen_images: vec![1, m], subgroup: None });
        if n > 1 {
            let lo = m / 2;
            projections.push((0..size).map(|x| (x / m) * lo + (x % m) % lo).collect());
        }
    }
    let spec = ChainSpec {
        backend: BackendTag::Table,
        depth,
        name: Some("dihedral".into()),
        zd: None,
        table: Some(TableSpec { quotients, projections }),
        side: Side::Right,
    };
    QuotientChain::from_spec(&spec).expect("dihedral chain is valid")
}

/// All permutations of `0..k` in lexicographic order.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

fn perm_id(perms: &[Vec<usize>], p: &[usize]) -> u32 {
    perms.iter().position(|q| q == p).expect("permutation listed") as u32
}

/// Multiplication table of `S_k` with `(σ·τ)(i) = σ(τ(i))`.
fn symmetric_table(perms: &[Vec<usize>]) -> Vec<Vec<u32>> {
    perms
        .iter()
        .map(|s| {
            perms
                .iter()
                .map(|t| {
                    let st: Vec<usize> = t.iter().map(|&i| s[i]).collect();
                    perm_id(perms, &st)
                })
                .collect()
        })
        .collect()
}

const CYCLE4: [usize; 4] = [1, 2, 3, 0];
const SWAP01: [usize; 4] = [1, 0, 2, 3];

/// The three ways to split `{0,1,2,3}` into pairs, indexed by the partner of 0.
fn pairing_action(p: &[usize]) -> Vec<usize> {
    let pairing = |partner: usize| -> [(usize, usize); 2] {
        let rest: Vec<usize> = (1..4).filter(|&x| x != partner).collect();
        [(0, partner), (rest[0], rest[1])]
    };
    (1..4)
        .map(|partner| {
            let [(a, b), _] = pairing(partner);
            let (x, y) = (p[a], p[b]);
            // partner of 0 in the image pairing
            let image_partner = if x == 0 {
                y
            } else if y == 0 {
                x
            } else {
                (1..4).find(|&z| z != x && z != y).unwrap()
            };
            image_partner - 1
        })
        .collect()
}

fn sign(p: &[usize]) -> u32 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2
}

/// `ℤ/2 ← S_3 ← S_4` with `a ↦ (0 1 2 3)`, `b ↦ (0 1)`; `S_4 → S_3` is the
/// action on the three pair partitions and `S_3 → ℤ/2` is the sign.
pub fn s4_chain() -> QuotientChain {
    let p4 = permutations(4);
    let p3 = permutations(3);
    let z2: Vec<Vec<u32>> = vec![vec![0, 1], vec![1, 0]];
    let s3 = symmetric_table(&p3);
    let s4 = symmetric_table(&p4);
    let to_s3: Vec<u32> = p4.iter().map(|p| perm_id(&p3, &pairing_action(p))).collect();
    let to_z2: Vec<u32> = p3.iter().map(|p| sign(p)).collect();
    let a4 = perm_id(&p4, &CYCLE4);
    let b4 = perm_id(&p4, &SWAP01);
    let (a3, b3) = (to_s3[a4 as usize], to_s3[b4 as usize]);
    let (a2, b2) = (to_z2[a3 as usize], to_z2[b3 as usize]);
    let spec = ChainSpec {
        backend: BackendTag::Table,
        depth: 3,
        name: Some("s4".into()),
        zd: None,
        table: Some(TableSpec {
            quotients: vec![
                QuotientSpec { size: 2, mul: z2, gen_images: vec![a2, b2], subgroup: None },
                QuotientSpec { size: 6, mul: s3, gen_images: vec![a3, b3], subgroup: None },
                QuotientSpec { size: 24, mul: s4, gen_images: vec![a4, b4], subgroup: None },
            ],
            projections: vec![to_z2, to_s3],
        }),
        side: Side::Right,
    };
    QuotientChain::from_spec(&spec).expect("S4 chain is valid")
}

/// `S_4` at every level with non-normal subgroups: the stabilizer of 3, the
/// pointwise stabilizer of 2 and 3, then the trivial group.
pub fn s4_nonnormal_chain() -> QuotientChain {
    let p4 = permutations(4);
    let s4 = symmetric_table(&p4);
    let a = perm_id(&p4, &CYCLE4);
    let b = perm_id(&p4, &SWAP01);
    let fixing = |pts: &[usize]| -> Vec<u32> {
        p4.iter()
            .enumerate()
            .filter(|(_, p)| pts.iter().all(|&i| p[i] == i))
            .map(|(id, _)| id as u32)
            .collect()
    };
    let level = |subgroup: Vec<u32>| QuotientSpec {
        size: 24,
        mul: s4.clone(),
        gen_images: vec![a, b],
        subgroup: Some(subgroup),
    };
    let identity_map: Vec<u32> = (0..24).collect();
    let spec = ChainSpec {
        backend: BackendTag::Table,
        depth: 3,
        name: Some("s4-nonnormal".into()),
        zd: None,
        table: Some(TableSpec {
            quotients: vec![level(fixing(&[3])), level(fixing(&[2, 3])), level(fixing(&[0, 1, 2, 3]))],
            projections: vec![identity_map.clone(), identity_map],
        }),
        side: Side::Right,
    };
    QuotientChain::from_spec(&spec).expect("non-normal S4 chain is valid")
}
