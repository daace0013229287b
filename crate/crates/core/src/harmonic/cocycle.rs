use nalgebra::DMatrix;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::operators::Cochain;

// sign of facet f in the coboundary row of top simplex t
fn incidence(c: &SimplicialComplex, t: usize, f: usize) -> Option<f64> {
    let n = c.dim();
    c.facets(n, t)
        .iter()
        .position(|&g| g == f)
        .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 })
}

fn shared_face(c: &SimplicialComplex, a: usize, b: usize) -> Result<usize> {
    let n = c.dim();
    let fb = c.facets(n, b);
    c.facets(n, a)
        .iter()
        .copied()
        .find(|f| fb.contains(f))
        .filter(|_| a != b)
        .ok_or_else(|| Error::DualPath(format!("simplices {a} and {b} do not share a face")))
}

fn boundary_face(c: &SimplicialComplex, t: usize, avoid: &[usize]) -> Result<usize> {
    let counts = c.top_coface_counts();
    c.facets(c.dim(), t)
        .iter()
        .copied()
        .find(|&f| counts[f] == 1 && !avoid.contains(&f))
        .ok_or_else(|| Error::DualPath(format!("open path ends at simplex {t}, which has no free boundary face")))
}

/// Picket-fence cocycle of a dual path: an `(n-1)`-cochain that is `+-1` on
/// each face the path crosses and zero elsewhere.
///
/// `path` lists top simplices, consecutive ones sharing a face. A closed
/// path also crosses from the last simplex back to the first; an open path
/// enters through a boundary face of its first simplex and leaves through a
/// boundary face of its last. Faces crossed more than once accumulate.
///
/// When the mesh is embedded in `R^n`, a crossed face gets `+1` when its
/// orientation points from the left of the path to its right (for `n = 2`:
/// the edge runs from left to right as seen walking along the path).
/// On curved surfaces the first crossing is fixed combinatorially and the
/// rest follow from `d omega = 0`.
pub fn cocycle_from_dual_chain(c: &SimplicialComplex, path: &[usize], closed: bool) -> Result<Cochain> {
    let n = c.dim();
    if n == 0 {
        return Err(Error::Dimension("dual paths need a complex of dimension >= 1".into()));
    }
    let mut omega = Cochain::zeros(c, n - 1);
    if path.is_empty() {
        return Ok(omega);
    }
    let count = c.num_simplices(n);
    if let Some(&t) = path.iter().find(|&&t| t >= count) {
        return Err(Error::DualPath(format!("simplex {t} out of range ({count} top simplices)")));
    }
    if closed && path.len() < 3 {
        return Err(Error::DualPath("a closed dual path needs at least 3 simplices".into()));
    }

    // faces[j] is crossed on entering path[j]; faces[j + 1] on leaving it
    let mut faces = Vec::with_capacity(path.len() + 1);
    if closed {
        faces.push(shared_face(c, path[path.len() - 1], path[0])?);
    }
    for w in path.windows(2) {
        faces.push(shared_face(c, w[0], w[1])?);
    }
    if closed {
        faces.push(faces[0]);
    } else {
        let first_inner: Vec<usize> = faces.first().copied().into_iter().collect();
        let entry = boundary_face(c, path[0], &first_inner)?;
        faces.insert(0, entry);
        let last = path[path.len() - 1];
        let mut avoid: Vec<usize> = faces.last().copied().into_iter().collect();
        if path.len() == 1 {
            avoid.push(entry);
        }
        let exit = boundary_face(c, last, &avoid)?;
        faces.push(exit);
    }

    let mut value = initial_sign(c, path, closed, faces[0]);
    let mut signs = Vec::with_capacity(faces.len());
    signs.push(value);
    for (j, &t) in path.iter().enumerate() {
        let s_in = incidence(c, t, faces[j]).expect("entry face of path simplex");
        let s_out = incidence(c, t, faces[j + 1]).expect("exit face of path simplex");
        value *= -s_in * s_out;
        signs.push(value);
    }
    if closed && signs[signs.len() - 1] != signs[0] {
        return Err(Error::DualPath("closed dual path reverses orientation (non-orientable)".into()));
    }
    let used = if closed { faces.len() - 1 } else { faces.len() };
    for (&f, &s) in faces.iter().zip(&signs).take(used) {
        omega.values[f] += s;
    }
    Ok(omega)
}

fn initial_sign(c: &SimplicialComplex, path: &[usize], closed: bool, face: usize) -> f64 {
    let n = c.dim();
    let t0 = path[0];
    let combinatorial = -incidence(c, t0, face).expect("first face of path simplex");
    if c.embedding_dim() != n {
        return combinatorial;
    }
    let from = if closed { c.barycenter(n, path[path.len() - 1]) } else { c.barycenter(n - 1, face) };
    let to = c.barycenter(n, t0);
    let verts = c.simplex(n - 1, face);
    let origin = c.vertex(verts[0]);
    let mut m = DMatrix::zeros(n, n);
    for r in 0..n {
        m[(r, 0)] = to[r] - from[r];
        for (k, &v) in verts[1..].iter().enumerate() {
            m[(r, k + 1)] = c.vertex(v)[r] - origin[r];
        }
    }
    let det = m.determinant();
    if det == 0.0 {
        combinatorial
    } else {
        -det.signum()
    }
}
