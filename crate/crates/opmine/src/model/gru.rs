//! GRU cells unrolled as graph ops over column-vector sequences.

use rand::Rng;

use crate::autodiff::{Array, AutodiffError, Graph, ParamStore, TensorId};

use super::glorot;

// Store indices of one direction's nine parameters.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GruParams {
    wz: usize,
    uz: usize,
    bz: usize,
    wr: usize,
    ur: usize,
    br: usize,
    wh: usize,
    uh: usize,
    bh: usize,
}

impl GruParams {
    /// Registers `prefix.{wz,uz,bz,wr,ur,br,wh,uh,bh}` for a cell mapping
    /// `input_dim` columns to `hidden` columns.
    pub(crate) fn register(
        store: &mut ParamStore,
        prefix: &str,
        input_dim: usize,
        hidden: usize,
        rng: &mut impl Rng,
    ) -> Result<(), AutodiffError> {
        for gate in ["z", "r", "h"] {
            store.insert_uniform(
                &format!("{prefix}.w{gate}"),
                hidden,
                input_dim,
                glorot(hidden, input_dim),
                rng,
            )?;
            store.insert_uniform(
                &format!("{prefix}.u{gate}"),
                hidden,
                hidden,
                glorot(hidden, hidden),
                rng,
            )?;
            store.insert_zeros(&format!("{prefix}.b{gate}"), hidden, 1)?;
        }
        Ok(())
    }

    pub(crate) fn resolve(store: &ParamStore, prefix: &str) -> Result<GruParams, AutodiffError> {
        let find = |suffix: &str| {
            let name = format!("{prefix}.{suffix}");
            store.index_of(&name).ok_or(AutodiffError::UnknownParam(name))
        };
        Ok(GruParams {
            wz: find("wz")?,
            uz: find("uz")?,
            bz: find("bz")?,
            wr: find("wr")?,
            ur: find("ur")?,
            br: find("br")?,
            wh: find("wh")?,
            uh: find("uh")?,
            bh: find("bh")?,
        })
    }

}

// One gate pre-activation: W x + U h + b.
fn gate(
    g: &mut Graph,
    ids: &[TensorId],
    w: usize,
    x: TensorId,
    u: usize,
    h: TensorId,
    b: usize,
) -> Result<TensorId, AutodiffError> {
    let wx = g.matmul(ids[w], x)?;
    let uh = g.matmul(ids[u], h)?;
    let s = g.add(wx, uh)?;
    g.add(s, ids[b])
}

/// Runs one direction over `xs`, starting from the zero state. Returns the
/// hidden state after each step.
pub(crate) fn run_gru(
    g: &mut Graph,
    ids: &[TensorId],
    p: &GruParams,
    xs: &[TensorId],
) -> Result<Vec<TensorId>, AutodiffError> {
    let hidden = g.value(ids[p.bz]).rows();
    let mut h = g.constant(Array::zeros(hidden, 1))?;
    let mut states = Vec::with_capacity(xs.len());
    for &x in xs {
        let z = gate(g, ids, p.wz, x, p.uz, h, p.bz)?;
        let z = g.sigmoid(z)?;
        let r = gate(g, ids, p.wr, x, p.ur, h, p.br)?;
        let r = g.sigmoid(r)?;
        let rh = g.mul(r, h)?;
        let cand = gate(g, ids, p.wh, x, p.uh, rh, p.bh)?;
        let cand = g.tanh(cand)?;
        // (1-z)*h + z*cand, written as h + z*(cand - h).
        let delta = g.sub(cand, h)?;
        let zd = g.mul(z, delta)?;
        h = g.add(h, zd)?;
        states.push(h);
    }
    Ok(states)
}

/// Bidirectional pass: step i yields `[forward_i ; backward_{n-1-i}]`, the
/// concatenation of both directions' states at that position.
pub(crate) fn run_bigru(
    g: &mut Graph,
    ids: &[TensorId],
    fwd: &GruParams,
    bwd: &GruParams,
    xs: &[TensorId],
) -> Result<Vec<TensorId>, AutodiffError> {
    let forward = run_gru(g, ids, fwd, xs)?;
    let reversed: Vec<TensorId> = xs.iter().rev().copied().collect();
    let backward = run_gru(g, ids, bwd, &reversed)?;
    let n = xs.len();
    (0..n).map(|i| g.concat(&[forward[i], backward[n - 1 - i]], 0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bind(store: &ParamStore, g: &mut Graph) -> Vec<TensorId> {
        (0..store.len()).map(|i| g.leaf(store.value_at(i).clone()).unwrap()).collect()
    }

    fn sigmoid(v: f64) -> f64 {
        1.0 / (1.0 + (-v).exp())
    }

    #[test]
    fn first_step_matches_hand_arithmetic() {
        // From the zero state: z = sig(Wz x + bz), r is irrelevant (r*0 = 0),
        // cand = tanh(Wh x + bh), h = z * cand.
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        GruParams::register(&mut store, "cell", 2, 2, &mut rng).unwrap();
        let p = GruParams::resolve(&store, "cell").unwrap();
        let x = [0.3, -0.7];

        let wz = store.get("cell.wz").unwrap().clone();
        let wh = store.get("cell.wh").unwrap().clone();
        let expected: Vec<f64> = (0..2)
            .map(|i| {
                let zi = sigmoid(wz.get(i, 0) * x[0] + wz.get(i, 1) * x[1]);
                let ci = (wh.get(i, 0) * x[0] + wh.get(i, 1) * x[1]).tanh();
                zi * ci
            })
            .collect();

        let mut g = Graph::new();
        let ids = bind(&store, &mut g);
        let xt = g.constant(Array::column(&x)).unwrap();
        let states = run_gru(&mut g, &ids, &p, &[xt]).unwrap();
        let got = g.value(states[0]);
        for i in 0..2 {
            assert!((got.get(i, 0) - expected[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn state_stays_in_unit_box() {
        // Each state is a convex mix of the previous state and a tanh value.
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        GruParams::register(&mut store, "cell", 3, 4, &mut rng).unwrap();
        let p = GruParams::resolve(&store, "cell").unwrap();
        let mut g = Graph::new();
        let ids = bind(&store, &mut g);
        let xs: Vec<TensorId> = (0..6)
            .map(|_| {
                let col: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..=5.0)).collect();
                g.constant(Array::column(&col)).unwrap()
            })
            .collect();
        for s in run_gru(&mut g, &ids, &p, &xs).unwrap() {
            for &v in g.value(s).data() {
                assert!(v.abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn single_step_bigru_concatenates_both_first_steps() {
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        GruParams::register(&mut store, "fwd", 2, 3, &mut rng).unwrap();
        GruParams::register(&mut store, "bwd", 2, 3, &mut rng).unwrap();
        let fwd = GruParams::resolve(&store, "fwd").unwrap();
        let bwd = GruParams::resolve(&store, "bwd").unwrap();

        let mut g = Graph::new();
        let ids = bind(&store, &mut g);
        let x = g.constant(Array::column(&[0.4, 0.9])).unwrap();
        let both = run_bigru(&mut g, &ids, &fwd, &bwd, &[x]).unwrap();
        assert_eq!(g.value(both[0]).shape(), (6, 1));
        let f = run_gru(&mut g, &ids, &fwd, &[x]).unwrap();
        let b = run_gru(&mut g, &ids, &bwd, &[x]).unwrap();
        for i in 0..3 {
            assert_eq!(g.value(both[0]).get(i, 0), g.value(f[0]).get(i, 0));
            assert_eq!(g.value(both[0]).get(i + 3, 0), g.value(b[0]).get(i, 0));
        }
    }

    #[test]
    fn reversing_input_reverses_and_swaps_halves() {
        // Swapping the two cells and feeding the reversed sequence must give
        // the original outputs read backwards with their halves exchanged.
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        GruParams::register(&mut store, "fwd", 2, 3, &mut rng).unwrap();
        GruParams::register(&mut store, "bwd", 2, 3, &mut rng).unwrap();
        let fwd = GruParams::resolve(&store, "fwd").unwrap();
        let bwd = GruParams::resolve(&store, "bwd").unwrap();

        let cols: Vec<Array> = (0..5)
            .map(|_| {
                let data: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..=1.0)).collect();
                Array::column(&data)
            })
            .collect();

        let mut g = Graph::new();
        let ids = bind(&store, &mut g);
        let xs: Vec<TensorId> = cols.iter().map(|c| g.constant(c.clone()).unwrap()).collect();
        let plain = run_bigru(&mut g, &ids, &fwd, &bwd, &xs).unwrap();
        let rev: Vec<TensorId> = xs.iter().rev().copied().collect();
        let swapped = run_bigru(&mut g, &ids, &bwd, &fwd, &rev).unwrap();

        let n = xs.len();
        for i in 0..n {
            let a = g.value(swapped[i]);
            let b = g.value(plain[n - 1 - i]);
            for k in 0..3 {
                assert_eq!(a.get(k, 0), b.get(k + 3, 0), "fwd half, step {i}");
                assert_eq!(a.get(k + 3, 0), b.get(k, 0), "bwd half, step {i}");
            }
        }
    }

    #[test]
    fn register_then_resolve_round_trips() {
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        GruParams::register(&mut store, "enc", 5, 7, &mut rng).unwrap();
        let p = GruParams::resolve(&store, "enc").unwrap();
        assert_eq!(store.value_at(p.bz).shape(), (7, 1));
        assert_eq!(store.value_at(p.wz).shape(), (7, 5));
        assert_eq!(store.value_at(p.uh).shape(), (7, 7));
        assert!(GruParams::resolve(&store, "missing").is_err());
    }
}
