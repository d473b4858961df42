//! Minimal edit scripts between two sequences.
//!
//! Linear-space Myers (middle snake divide and conquer). Used for line diffs
//! of file pairs and for token diffs of paired statements.

use std::ops::Range;

/// One step of an edit script, indices point into the original sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edit {
    Equal { old: usize, new: usize },
    Delete { old: usize },
    Insert { new: usize },
}

/// Computes a minimal edit script turning `old` into `new`.
///
/// The script lists edits in sequence order; every index of both inputs
/// appears exactly once.
pub fn diff<T: PartialEq>(old: &[T], new: &[T]) -> Vec<Edit> {
    let mut out = Vec::with_capacity(old.len().max(new.len()));
    let max_d = (old.len() + new.len()).div_ceil(2) + 1;
    let mut vf = V::new(max_d);
    let mut vb = V::new(max_d);
    conquer(old, 0..old.len(), new, 0..new.len(), &mut vf, &mut vb, &mut out);
    deletes_first(&mut out);
    out
}

// Within each run of non-equal edits put deletions before insertions, so
// scripts read like conventional diffs.
fn deletes_first(edits: &mut [Edit]) {
    let mut i = 0;
    while i < edits.len() {
        if matches!(edits[i], Edit::Equal { .. }) {
            i += 1;
            continue;
        }
        let start = i;
        while i < edits.len() && !matches!(edits[i], Edit::Equal { .. }) {
            i += 1;
        }
        edits[start..i].sort_by_key(|e| match *e {
            Edit::Delete { old } => (0, old),
            Edit::Insert { new } => (1, new),
            Edit::Equal { .. } => unreachable!(),
        });
    }
}

/// Moves every pure insertion or deletion run as far left as it can go
/// without changing the script's meaning, so that code added in front of
/// an identical token is reported before it.
pub fn slide_left<T: PartialEq>(edits: &mut [Edit], old: &[T], new: &[T]) {
    let mut i = 0;
    while i < edits.len() {
        if matches!(edits[i], Edit::Equal { .. }) {
            i += 1;
            continue;
        }
        let mut s = i;
        let mut e = i;
        while e < edits.len() && !matches!(edits[e], Edit::Equal { .. }) {
            e += 1;
        }
        let inserts = edits[s..e].iter().all(|x| matches!(x, Edit::Insert { .. }));
        let deletes = edits[s..e].iter().all(|x| matches!(x, Edit::Delete { .. }));
        while s > 0 && (inserts || deletes) {
            let Edit::Equal { old: o, new: n } = edits[s - 1] else { break };
            let shifted = match edits[e - 1] {
                Edit::Insert { new: last } if new[n] == new[last] => {
                    edits[s - 1] = Edit::Insert { new: n };
                    for (k, x) in edits[s..e - 1].iter_mut().enumerate() {
                        *x = Edit::Insert { new: n + 1 + k };
                    }
                    Edit::Equal { old: o, new: last }
                }
                Edit::Delete { old: last } if old[o] == old[last] => {
                    edits[s - 1] = Edit::Delete { old: o };
                    for (k, x) in edits[s..e - 1].iter_mut().enumerate() {
                        *x = Edit::Delete { old: o + 1 + k };
                    }
                    Edit::Equal { old: last, new: n }
                }
                _ => break,
            };
            edits[e - 1] = shifted;
            s -= 1;
            e -= 1;
        }
        i = e.max(i + 1);
    }
}

/// Number of `Equal` edits, i.e. the LCS length.
pub fn lcs_len<T: PartialEq>(old: &[T], new: &[T]) -> usize {
    diff(old, new)
        .iter()
        .filter(|e| matches!(e, Edit::Equal { .. }))
        .count()
}

struct V {
    offset: isize,
    data: Vec<usize>,
}

impl V {
    fn new(max_d: usize) -> Self {
        V {
            offset: max_d as isize,
            data: vec![0; 2 * max_d + 2],
        }
    }

    fn get(&self, k: isize) -> usize {
        self.data[(k + self.offset) as usize]
    }

    fn set(&mut self, k: isize, v: usize) {
        let idx = (k + self.offset) as usize;
        self.data[idx] = v;
    }
}

fn common_prefix<T: PartialEq>(old: &[T], o: Range<usize>, new: &[T], n: Range<usize>) -> usize {
    old[o].iter().zip(&new[n]).take_while(|(a, b)| a == b).count()
}

fn common_suffix<T: PartialEq>(old: &[T], o: Range<usize>, new: &[T], n: Range<usize>) -> usize {
    old[o]
        .iter()
        .rev()
        .zip(new[n].iter().rev())
        .take_while(|(a, b)| a == b)
        .count()
}

fn conquer<T: PartialEq>(
    old: &[T],
    mut o: Range<usize>,
    new: &[T],
    mut n: Range<usize>,
    vf: &mut V,
    vb: &mut V,
    out: &mut Vec<Edit>,
) {
    let prefix = common_prefix(old, o.clone(), new, n.clone());
    for i in 0..prefix {
        out.push(Edit::Equal {
            old: o.start + i,
            new: n.start + i,
        });
    }
    o.start += prefix;
    n.start += prefix;

    let suffix = common_suffix(old, o.clone(), new, n.clone());
    o.end -= suffix;
    n.end -= suffix;

    if o.is_empty() {
        out.extend(n.clone().map(|new| Edit::Insert { new }));
    } else if n.is_empty() {
        out.extend(o.clone().map(|old| Edit::Delete { old }));
    } else if let Some((x, y)) = middle_snake(old, o.clone(), new, n.clone(), vf, vb) {
        conquer(old, o.start..x, new, n.start..y, vf, vb, out);
        conquer(old, x..o.end, new, y..n.end, vf, vb, out);
    } else {
        out.extend(o.clone().map(|old| Edit::Delete { old }));
        out.extend(n.clone().map(|new| Edit::Insert { new }));
    }

    for i in 0..suffix {
        out.push(Edit::Equal {
            old: o.end + i,
            new: n.end + i,
        });
    }
}

fn middle_snake<T: PartialEq>(
    old: &[T],
    o: Range<usize>,
    new: &[T],
    n: Range<usize>,
    vf: &mut V,
    vb: &mut V,
) -> Option<(usize, usize)> {
    let len_o = o.len();
    let len_n = n.len();
    let delta = len_o as isize - len_n as isize;
    let odd = delta & 1 == 1;
    vf.set(1, 0);
    vb.set(1, 0);
    let d_max = (len_o + len_n).div_ceil(2) + 1;
    for d in 0..d_max as isize {
        let mut k = d;
        while k >= -d {
            let mut x = if k == -d || (k != d && vf.get(k - 1) < vf.get(k + 1)) {
                vf.get(k + 1)
            } else {
                vf.get(k - 1) + 1
            };
            let y = (x as isize - k) as usize;
            let (x0, y0) = (x, y);
            if x < len_o && y < len_n {
                x += common_prefix(old, o.start + x..o.end, new, n.start + y..n.end);
            }
            vf.set(k, x);
            if odd && (k - delta).abs() < d && vf.get(k) + vb.get(-(k - delta)) >= len_o {
                return Some((o.start + x0, n.start + y0));
            }
            k -= 2;
        }

        let mut k = d;
        while k >= -d {
            let mut x = if k == -d || (k != d && vb.get(k - 1) < vb.get(k + 1)) {
                vb.get(k + 1)
            } else {
                vb.get(k - 1) + 1
            };
            let mut y = (x as isize - k) as usize;
            if x < len_o && y < len_n {
                let adv = common_suffix(old, o.start..o.start + len_o - x, new, n.start..n.start + len_n - y);
                x += adv;
                y += adv;
            }
            vb.set(k, x);
            if !odd && (k - delta).abs() <= d && vb.get(k) + vf.get(-(k - delta)) >= len_o {
                return Some((o.start + len_o - x, n.start + len_n - y));
            }
            k -= 2;
        }
    }
    None
}
