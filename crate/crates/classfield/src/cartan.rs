//! The finite ring `O/NO`, its unit group and the Cartan-type matrix groups
//! obtained from it in GL₂(ℤ/Nℤ).

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadforms::{gcd, OrderContext};

/// `sτ_O + t` modulo `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ResidueElem {
    pub s: i64,
    pub t: i64,
}

pub type Mat2 = [[i64; 2]; 2];

fn reduce_mat(m: Mat2, n: i64) -> Mat2 {
    [
        [m[0][0].rem_euclid(n), m[0][1].rem_euclid(n)],
        [m[1][0].rem_euclid(n), m[1][1].rem_euclid(n)],
    ]
}

pub fn mat_mul(a: &Mat2, b: &Mat2, n: i64) -> Mat2 {
    reduce_mat(
        [
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ],
        n,
    )
}

pub fn mat_det(a: &Mat2, n: i64) -> i64 {
    (a[0][0] * a[1][1] - a[0][1] * a[1][0]).rem_euclid(n)
}

/// `[[t - b_O s, -c_O s], [s, t]] mod N`.
pub fn mu(ctx: &OrderContext, n: i64, s: i64, t: i64) -> Mat2 {
    reduce_mat([[t - ctx.b_o * s, -ctx.c_o * s], [s, t]], n)
}

/// Product in `O/NO` using `τ² = -b_O τ - c_O`.
pub fn residue_mul(ctx: &OrderContext, n: i64, x: ResidueElem, y: ResidueElem) -> ResidueElem {
    let ss = x.s * y.s;
    ResidueElem {
        s: (x.s * y.t + x.t * y.s - ctx.b_o * ss).rem_euclid(n),
        t: (x.t * y.t - ctx.c_o * ss).rem_euclid(n),
    }
}

/// All units of `O/NO`.
pub fn unit_group(ctx: &OrderContext, n: i64) -> Result<Vec<ResidueElem>> {
    if n < 1 {
        return Err(Error::Domain(format!("level {n} must be positive")));
    }
    if n == 1 {
        return Ok(vec![ResidueElem { s: 0, t: 0 }]);
    }
    let mut out = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if gcd(mat_det(&mu(ctx, n, s, t), n), n) == 1 {
                out.push(ResidueElem { s, t });
            }
        }
    }
    Ok(out)
}

/// A finite subgroup of GL₂(ℤ/Nℤ) given by generators, with its element set.
#[derive(Clone, Debug)]
pub struct MatGroupModN {
    pub n: i64,
    pub generators: Vec<Mat2>,
    pub elements: BTreeSet<Mat2>,
}

impl MatGroupModN {
    pub fn generated_by(n: i64, generators: Vec<Mat2>) -> Self {
        let id = reduce_mat([[1, 0], [0, 1]], n);
        let mut elements = BTreeSet::from([id]);
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for g in &generators {
                let y = mat_mul(&x, g, n);
                if elements.insert(y) {
                    frontier.push(y);
                }
            }
        }
        Self { n, generators, elements }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_closed(&self) -> bool {
        self.elements
            .iter()
            .all(|a| self.elements.iter().all(|b| self.elements.contains(&mat_mul(a, b, self.n))))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CartanOrders {
    #[serde(rename = "W")]
    pub w: usize,
    #[serde(rename = "U")]
    pub u: usize,
    #[serde(rename = "What")]
    pub w_hat: usize,
    pub units: usize,
}

#[derive(Clone, Debug)]
pub struct CartanGroups {
    pub w: MatGroupModN,
    pub u: MatGroupModN,
    pub w_hat: MatGroupModN,
    pub units: usize,
}

impl CartanGroups {
    pub fn orders(&self) -> CartanOrders {
        CartanOrders {
            w: self.w.order(),
            u: self.u.order(),
            w_hat: self.w_hat.order(),
            units: self.units,
        }
    }

    /// `|W| / |U| = |C_N(O)| / h_O`.
    pub fn check_order_identity(&self, class_order: usize, class_number: usize) -> bool {
        self.w.order() * class_number == class_order * self.u.order()
    }
}

/// `W` (image of the units of `O/NO`), `U` (image of `O*`) and `Ŵ = ⟨W, [1 b_O; 0 -1]⟩`.
pub fn cartan_groups(ctx: &OrderContext, n: i64) -> Result<CartanGroups> {
    if n < 2 {
        return Err(Error::Domain(format!("level {n} must be at least 2")));
    }
    let units = unit_group(ctx, n)?;
    let w_gens: Vec<Mat2> = units.iter().map(|x| mu(ctx, n, x.s, x.t)).collect();
    let w = MatGroupModN::generated_by(n, w_gens.clone());
    let u_gens: Vec<Mat2> = crate::quadforms::unit_residues(ctx, n)
        .into_iter()
        .map(|(s, t)| mu(ctx, n, s, t))
        .collect();
    let u = MatGroupModN::generated_by(n, u_gens);
    let mut hat_gens = w_gens;
    hat_gens.push(reduce_mat([[1, ctx.b_o], [0, -1]], n));
    let w_hat = MatGroupModN::generated_by(n, hat_gens);
    Ok(CartanGroups {
        w,
        u,
        w_hat,
        units: units.len(),
    })
}
