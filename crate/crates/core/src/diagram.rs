//! Planar diagrams of rational words and three-column pretzels.
//!
//! Diagrams are assembled from tangle moves. A rational word starts from the
//! `0` tangle and entry `i` adds `|a_i|` crossings to the right (even `i`) or
//! below (odd `i`). An odd length word is closed by joining the top ends and
//! the bottom ends, an even one by joining the left ends and the right ends.
//! Either way the closed diagram represents the link of the word's fraction.
//! A pretzel is the numerator closure of the sum of its vertical columns.
//!
//! Each crossing has four slots in counterclockwise order
//! `NW, SW, SE, NE`; slot `j` of crossing `c` is the half-edge `4c + j`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::conway::{PretzelWord, RationalWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Port {
    Slot(usize),
    /// Endpoint of a crossing-free arc.
    Open(usize),
}

/// Ends of a tangle under construction, as `[NW, NE, SW, SE]`.
#[derive(Debug, Clone, Copy)]
struct Tangle([Port; 4]);

const NW: usize = 0;
const NE: usize = 1;
const SW: usize = 2;
const SE: usize = 3;

#[derive(Default)]
struct Builder {
    rising_over: Vec<bool>,
    edges: Vec<(Port, Port)>,
    opens: usize,
}

impl Builder {
    fn arc(&mut self) -> (Port, Port) {
        let (a, b) = (Port::Open(self.opens), Port::Open(self.opens + 1));
        self.opens += 2;
        self.edges.push((a, b));
        (a, b)
    }

    fn zero(&mut self) -> Tangle {
        let (nw, ne) = self.arc();
        let (sw, se) = self.arc();
        Tangle([nw, ne, sw, se])
    }

    fn infinity(&mut self) -> Tangle {
        let (nw, sw) = self.arc();
        let (ne, se) = self.arc();
        Tangle([nw, ne, sw, se])
    }

    fn crossing(&mut self, positive: bool) -> usize {
        self.rising_over.push(positive);
        4 * (self.rising_over.len() - 1)
    }

    fn twist_right(&mut self, t: &mut Tangle, positive: bool) {
        let h = self.crossing(positive);
        self.edges.push((t.0[NE], Port::Slot(h)));
        self.edges.push((t.0[SE], Port::Slot(h + 1)));
        t.0[NE] = Port::Slot(h + 3);
        t.0[SE] = Port::Slot(h + 2);
    }

    fn twist_below(&mut self, t: &mut Tangle, positive: bool) {
        let h = self.crossing(positive);
        self.edges.push((t.0[SW], Port::Slot(h)));
        self.edges.push((t.0[SE], Port::Slot(h + 3)));
        t.0[SW] = Port::Slot(h + 1);
        t.0[SE] = Port::Slot(h + 2);
    }

    fn sum(&mut self, a: Tangle, b: Tangle) -> Tangle {
        self.edges.push((a.0[NE], b.0[NW]));
        self.edges.push((a.0[SE], b.0[SW]));
        Tangle([a.0[NW], b.0[NE], a.0[SW], b.0[SE]])
    }

    fn close(mut self, t: Tangle, numerator: bool) -> Diagram {
        if numerator {
            self.edges.push((t.0[NW], t.0[NE]));
            self.edges.push((t.0[SW], t.0[SE]));
        } else {
            self.edges.push((t.0[NW], t.0[SW]));
            self.edges.push((t.0[NE], t.0[SE]));
        }
        let edges = self.edges;

        // Slots have degree one and open ends degree two; walk through the
        // open ends to pair slots directly.
        let n = self.rising_over.len();
        let mut slot_edge = vec![usize::MAX; 4 * n];
        let mut open_edges = vec![Vec::with_capacity(2); self.opens];
        for (e, &(a, b)) in edges.iter().enumerate() {
            for p in [a, b] {
                match p {
                    Port::Slot(h) => slot_edge[h] = e,
                    Port::Open(k) => open_edges[k].push(e),
                }
            }
        }
        let other = |e: usize, p: Port| {
            if edges[e].0 == p {
                edges[e].1
            } else {
                edges[e].0
            }
        };
        let mut next = vec![usize::MAX; 4 * n];
        for h in 0..4 * n {
            let mut from = Port::Slot(h);
            let mut e = slot_edge[h];
            loop {
                match other(e, from) {
                    Port::Slot(t) => {
                        next[h] = t;
                        break;
                    }
                    Port::Open(k) => {
                        e = if open_edges[k][0] == e {
                            open_edges[k][1]
                        } else {
                            open_edges[k][0]
                        };
                        from = Port::Open(k);
                    }
                }
            }
        }

        let mut free_circles = 0;
        let mut seen = vec![false; self.opens];
        for k in 0..self.opens {
            if seen[k] {
                continue;
            }
            let mut closed = true;
            let mut stack = vec![k];
            while let Some(j) = stack.pop() {
                if seen[j] {
                    continue;
                }
                seen[j] = true;
                for &e in &open_edges[j] {
                    for p in [edges[e].0, edges[e].1] {
                        match p {
                            Port::Open(t) => stack.push(t),
                            Port::Slot(_) => closed = false,
                        }
                    }
                }
            }
            if closed {
                free_circles += 1;
            }
        }

        Diagram {
            rising_over: self.rising_over,
            next,
            free_circles,
        }
    }
}

/// A closed diagram: crossings joined by edges, plus crossing-free circles.
#[derive(Debug, Clone)]
pub struct Diagram {
    /// `true` when the SW-NE strand (slots 1 and 3) is over.
    rising_over: Vec<bool>,
    /// Opposite end of the edge leaving half-edge `h`.
    next: Vec<usize>,
    free_circles: usize,
}

/// Orientation data for a [`Diagram`].
#[derive(Debug, Clone)]
pub struct Orientation {
    /// Component of each strand, indexed by half-edge where it enters.
    component: Vec<usize>,
    /// For each crossing, the entry slot of the 0-2 strand and of the 1-3 strand.
    entry: Vec<[usize; 2]>,
    /// Components that pass through a crossing.
    traced: usize,
    components: usize,
}

fn slot_vector(j: usize) -> (i64, i64) {
    match j % 4 {
        0 => (-1, 1),
        1 => (-1, -1),
        2 => (1, -1),
        _ => (1, 1),
    }
}

impl Diagram {
    pub fn from_word(word: &RationalWord) -> Diagram {
        let mut b = Builder::default();
        let mut t = b.zero();
        for (i, &a) in word.entries().iter().enumerate() {
            for _ in 0..a.unsigned_abs() {
                if i % 2 == 0 {
                    b.twist_right(&mut t, a > 0);
                } else {
                    b.twist_below(&mut t, a > 0);
                }
            }
        }
        b.close(t, word.len() % 2 == 1)
    }

    pub fn from_pretzel(word: &PretzelWord) -> Diagram {
        let mut b = Builder::default();
        let columns: Vec<Tangle> = word
            .columns()
            .iter()
            .map(|&a| {
                let mut t = b.infinity();
                for _ in 0..a.unsigned_abs() {
                    b.twist_below(&mut t, a > 0);
                }
                t
            })
            .collect();
        let t = columns[1..]
            .iter()
            .fold(columns[0], |acc, &c| b.sum(acc, c));
        b.close(t, true)
    }

    pub fn crossing_count(&self) -> usize {
        self.rising_over.len()
    }

    pub fn free_circles(&self) -> usize {
        self.free_circles
    }

    /// Connected piece of every crossing, and the number of pieces.
    fn pieces(&self) -> (Vec<usize>, usize) {
        let n = self.crossing_count();
        let mut piece = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if piece[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            piece[s] = count;
            while let Some(c) = stack.pop() {
                for j in 0..4 {
                    let d = self.next[4 * c + j] / 4;
                    if piece[d] == usize::MAX {
                        piece[d] = count;
                        stack.push(d);
                    }
                }
            }
            count += 1;
        }
        (piece, count)
    }

    /// Faces as a face index per corner. Corner `4c + j` lies between slots
    /// `j` and `j + 1`. Each connected piece has its own outer face.
    fn faces(&self) -> (Vec<usize>, usize) {
        let mut face = vec![usize::MAX; self.next.len()];
        let mut count = 0;
        for start in 0..self.next.len() {
            if face[start] != usize::MAX {
                continue;
            }
            let mut corner = start;
            while face[corner] == usize::MAX {
                face[corner] = count;
                let out = 4 * (corner / 4) + (corner % 4 + 1) % 4;
                corner = self.next[out];
            }
            count += 1;
        }
        (face, count)
    }

    /// Two-colouring of the faces; `None` if the face graph is not bipartite.
    fn colouring(&self, face: &[usize], count: usize) -> Option<Vec<bool>> {
        let mut colour: Vec<Option<bool>> = vec![None; count];
        let mut adj = vec![Vec::new(); count];
        for c in 0..self.crossing_count() {
            for j in 0..4 {
                let a = face[4 * c + j];
                let b = face[4 * c + (j + 1) % 4];
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for s in 0..count {
            if colour[s].is_some() {
                continue;
            }
            colour[s] = Some(false);
            let mut stack = vec![s];
            while let Some(f) = stack.pop() {
                let cf = colour[f]?;
                for &g in &adj[f] {
                    match colour[g] {
                        None => {
                            colour[g] = Some(!cf);
                            stack.push(g);
                        }
                        Some(cg) if cg == cf => return None,
                        _ => {}
                    }
                }
            }
        }
        colour.into_iter().collect()
    }

    /// Components traced through the crossings, each with an arbitrary
    /// direction. Crossing-free circles get the highest indices.
    pub fn orientation(&self) -> Orientation {
        let n = self.crossing_count();
        let mut component = vec![usize::MAX; 4 * n];
        let mut entry = vec![[usize::MAX; 2]; n];
        let mut traced = 0;
        for start in 0..4 * n {
            let (c, j) = (start / 4, start % 4);
            if component[start] != usize::MAX || component[4 * c + (j + 2) % 4] != usize::MAX {
                continue;
            }
            let mut h = start;
            while component[h] == usize::MAX {
                let (c, j) = (h / 4, h % 4);
                component[h] = traced;
                entry[c][j % 2] = j;
                h = self.next[4 * c + (j + 2) % 4];
            }
            traced += 1;
        }
        Orientation {
            component,
            entry,
            traced,
            components: traced + self.free_circles,
        }
    }

    /// Over strand slot pair `(s, s + 2)` of crossing `c`.
    fn over_slot(&self, c: usize) -> usize {
        if self.rising_over[c] {
            1
        } else {
            0
        }
    }

    /// Writhe sign of crossing `c` under `o`.
    fn sign(&self, o: &Orientation, c: usize) -> i64 {
        let s = self.over_slot(c);
        let dir = |e: usize| slot_vector(e + 2);
        let (ox, oy) = dir(o.entry[c][s % 2]);
        let (ux, uy) = dir(o.entry[c][(s + 1) % 2]);
        (ox * uy - oy * ux).signum()
    }

    fn strand_components(&self, o: &Orientation, c: usize) -> [usize; 2] {
        [
            o.component[4 * c + o.entry[c][0]],
            o.component[4 * c + o.entry[c][1]],
        ]
    }

    /// Pairwise linking numbers, indexed by component.
    pub fn linking_matrix(&self, o: &Orientation) -> Vec<Vec<i64>> {
        let k = o.components;
        let mut twice = vec![vec![0i64; k]; k];
        for c in 0..self.crossing_count() {
            let [a, b] = self.strand_components(o, c);
            if a != b {
                let s = self.sign(o, c);
                twice[a][b] += s;
                twice[b][a] += s;
            }
        }
        twice
            .into_iter()
            .map(|row| row.into_iter().map(|x| x / 2).collect())
            .collect()
    }

    /// Linking number between components `0` and `1` of `o`.
    pub fn linking_number(&self, o: &Orientation) -> i64 {
        if o.components < 2 {
            return 0;
        }
        self.linking_matrix(o)[0][1]
    }

    /// Reduced Goeritz matrix on the faces of colour `white`, with the face
    /// index and colour of every corner. One white face per connected piece
    /// is dropped, so split diagrams give the block sum of their pieces.
    fn goeritz(&self, white: bool) -> (Vec<Vec<i64>>, Vec<usize>, Vec<bool>) {
        let (face, count) = self.faces();
        let colour = self
            .colouring(&face, count)
            .expect("planar link diagrams are checkerboard colourable");
        let (piece, pieces) = self.pieces();
        let mut face_piece = vec![0; count];
        for (corner, &f) in face.iter().enumerate() {
            face_piece[f] = piece[corner / 4];
        }
        let mut dropped = vec![false; pieces];
        let mut index = vec![usize::MAX; count];
        let mut w = 0;
        for f in 0..count {
            if colour[f] != white {
                continue;
            }
            if !dropped[face_piece[f]] {
                dropped[face_piece[f]] = true;
                continue;
            }
            index[f] = w;
            w += 1;
        }
        let mut g = vec![vec![0i64; w]; w];
        for c in 0..self.crossing_count() {
            let eta = self.incidence(c, &face, &colour, white);
            let (a, b) = if colour[face[4 * c]] == white {
                (face[4 * c], face[4 * c + 2])
            } else {
                (face[4 * c + 1], face[4 * c + 3])
            };
            if a == b {
                continue;
            }
            let (i, j) = (index[a], index[b]);
            if i != usize::MAX {
                g[i][i] += eta;
            }
            if j != usize::MAX {
                g[j][j] += eta;
            }
            if i != usize::MAX && j != usize::MAX {
                g[i][j] -= eta;
                g[j][i] -= eta;
            }
        }
        (g, face, colour)
    }

    /// `+1` when the white corners sit counterclockwise of the over strand.
    fn incidence(&self, c: usize, face: &[usize], colour: &[bool], white: bool) -> i64 {
        if colour[face[4 * c + self.over_slot(c)]] == white {
            1
        } else {
            -1
        }
    }

    /// Signature of the oriented link: the Goeritz form of the surface made
    /// of the faces of colour `!white`, corrected over crossings whose
    /// oriented smoothing separates the white corners.
    pub fn signature_with(&self, o: &Orientation, white: bool) -> i64 {
        let (g, face, colour) = self.goeritz(white);
        let mut correction = 0;
        for c in 0..self.crossing_count() {
            let [e0, e1] = o.entry[c];
            let separated = if (e1 + 4 - e0) % 4 == 1 {
                (e0 + 1) % 4
            } else {
                e0
            };
            if colour[face[4 * c + separated]] == white {
                correction += self.incidence(c, &face, &colour, white);
            }
        }
        Inertia::of(&g).signature() - correction
    }

    pub fn signature(&self, o: &Orientation) -> i64 {
        self.signature_with(o, true)
    }

    /// Largest `|sigma|` over all relative orientations of the components.
    pub fn max_abs_signature(&self) -> u64 {
        let base = self.orientation();
        let flips = base.traced.saturating_sub(1);
        (0u32..1 << flips)
            .map(|mask| {
                let mut o = base.clone();
                let which: Vec<usize> = (0..flips)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| i + 1)
                    .collect();
                o.reverse(&which);
                self.signature(&o).unsigned_abs()
            })
            .max()
            .unwrap_or(0)
    }

    /// Link determinant, `|det|` of the reduced Goeritz matrix; zero for
    /// split diagrams.
    pub fn determinant(&self) -> BigInt {
        if self.pieces().1 + self.free_circles > 1 {
            return BigInt::zero();
        }
        if self.crossing_count() == 0 {
            return BigInt::from(1);
        }
        Inertia::of(&self.goeritz(true).0).determinant.abs()
    }
}

impl Orientation {
    pub fn components(&self) -> usize {
        self.components
    }

    /// Reverses every traced component with index in `which`.
    pub fn reverse(&mut self, which: &[usize]) {
        let old = self.component.clone();
        for (c, entry) in self.entry.iter_mut().enumerate() {
            for e in entry.iter_mut() {
                let k = old[4 * c + *e];
                if which.contains(&k) {
                    let flipped = (*e + 2) % 4;
                    self.component[4 * c + *e] = usize::MAX;
                    self.component[4 * c + flipped] = k;
                    *e = flipped;
                }
            }
        }
    }
}

/// Inertia and determinant of a symmetric integer matrix, by exact
/// congruence diagonalisation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub nullity: usize,
    pub determinant: BigInt,
}

impl Inertia {
    pub fn of(m: &[Vec<i64>]) -> Inertia {
        let n = m.len();
        let mut a: Vec<Vec<BigRational>> = m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| BigRational::from_integer(x.into()))
                    .collect()
            })
            .collect();
        let mut live: Vec<usize> = (0..n).collect();
        let mut positive = 0;
        let mut negative = 0;
        let mut det = BigRational::from_integer(1.into());
        while !live.is_empty() {
            let pivot = live.iter().position(|&i| !a[i][i].is_zero());
            let k = match pivot {
                Some(p) => live[p],
                None => {
                    let pair = live.iter().find_map(|&i| {
                        live.iter()
                            .find(|&&j| j != i && !a[i][j].is_zero())
                            .map(|&j| (i, j))
                    });
                    let Some((i, j)) = pair else { break };
                    for row in a.iter_mut() {
                        let v = row[j].clone();
                        row[i] += v;
                    }
                    let row_j = a[j].clone();
                    for (x, v) in a[i].iter_mut().zip(row_j) {
                        *x += v;
                    }
                    i
                }
            };
            let d = a[k][k].clone();
            if d.is_positive() {
                positive += 1;
            } else {
                negative += 1;
            }
            det *= &d;
            live.retain(|&i| i != k);
            for &i in &live {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = &a[i][k] / &d;
                for &j in &live {
                    let v = &f * &a[k][j];
                    a[i][j] -= v;
                }
            }
        }
        let nullity = live.len();
        Inertia {
            positive,
            negative,
            nullity,
            determinant: if nullity > 0 {
                BigInt::zero()
            } else {
                det.to_integer()
            },
        }
    }

    pub fn signature(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }
}
