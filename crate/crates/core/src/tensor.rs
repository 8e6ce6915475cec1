//! Dense order-N tensors and the multilinear operators built on them.
//!
//! Storage is a flat buffer with the mode-0 index varying fastest and the
//! last mode slowest. With that layout an order-2 tensor shares its buffer
//! with a column-major matrix, so `vectorize` stacks columns, and the
//! vectorized multi-mode product obeys
//! `vec(T x_0 U0 ... x_{N-1} U{N-1}) = (U{N-1} ⊗ ... ⊗ U0) vec(T)`.
//!
//! Mode indices are zero-based throughout the API.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Order-N array of `f64` with an explicit dimension list.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        validate_dims(&dims)?;
        let expected: usize = dims.iter().product();
        if expected != data.len() {
            return Err(Error::ShapeMismatch(format!(
                "dims {:?} need {} elements, buffer has {}",
                dims,
                expected,
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        validate_dims(&dims)?;
        let len = dims.iter().product();
        Ok(Self {
            dims,
            data: vec![0.0; len],
        })
    }

    /// Builds a tensor by evaluating `f` at every multi-index.
    pub fn from_fn<F>(dims: Vec<usize>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> f64,
    {
        validate_dims(&dims)?;
        let len: usize = dims.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut index = vec![0usize; dims.len()];
        for _ in 0..len {
            data.push(f(&index));
            increment(&mut index, &dims);
        }
        Ok(Self { dims, data })
    }

    /// Order-2 tensor whose mode-0 index is the matrix row.
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self {
            dims: vec![m.nrows(), m.ncols()],
            data: m.as_slice().to_vec(),
        }
    }

    /// Order-1 tensor holding `v`.
    pub fn from_vector(v: &DVector<f64>) -> Self {
        Self {
            dims: vec![v.len()],
            data: v.as_slice().to_vec(),
        }
    }

    /// Views an order-2 tensor as a matrix (rows = mode 0).
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.order() != 2 {
            return Err(Error::ShapeMismatch(format!(
                "matrix view needs an order-2 tensor, got order {}",
                self.order()
            )));
        }
        Ok(DMatrix::from_column_slice(
            self.dims[0],
            self.dims[1],
            &self.data,
        ))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Total number of elements.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    fn offset(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.dims.len() {
            return Err(Error::IndexOutOfRange(format!(
                "index {:?} has {} components, tensor has order {}",
                index,
                index.len(),
                self.order()
            )));
        }
        let mut offset = 0;
        let mut stride = 1;
        for (&i, &d) in index.iter().zip(&self.dims) {
            if i >= d {
                return Err(Error::IndexOutOfRange(format!(
                    "index {:?} outside dims {:?}",
                    index, self.dims
                )));
            }
            offset += i * stride;
            stride *= d;
        }
        Ok(offset)
    }

    pub fn get(&self, index: &[usize]) -> Result<f64> {
        Ok(self.data[self.offset(index)?])
    }

    /// Returns the column-stacked vector (mode-0 fastest).
    pub fn vectorize(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.squared_norm().sqrt()
    }

    pub fn squared_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dims: self.dims.clone(),
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch(format!(
                "cannot subtract dims {:?} from {:?}",
                other.dims, self.dims
            )));
        }
        Ok(Self {
            dims: self.dims.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Mode-`n` unfolding. See [`unfold`].
    pub fn unfold(&self, mode: usize) -> Result<Unfolding> {
        unfold(self, mode)
    }
}

fn validate_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidDims(dims.to_vec()));
    }
    Ok(())
}

fn increment(index: &mut [usize], dims: &[usize]) {
    for (i, &d) in index.iter_mut().zip(dims) {
        *i += 1;
        if *i < d {
            return;
        }
        *i = 0;
    }
}

fn check_mode(mode: usize, order: usize) -> Result<()> {
    if mode >= order {
        return Err(Error::ModeOutOfRange { mode, order });
    }
    Ok(())
}

/// Product of the dimensions before and after `mode`.
fn split_extents(dims: &[usize], mode: usize) -> (usize, usize) {
    let left = dims[..mode].iter().product();
    let right = dims[mode + 1..].iter().product();
    (left, right)
}

/// A mode-`n` unfolding together with the dims it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Unfolding {
    pub mode: usize,
    pub matrix: DMatrix<f64>,
    pub source_dims: Vec<usize>,
}

impl Unfolding {
    pub fn fold(&self) -> Result<DenseTensor> {
        fold(&self.matrix, self.mode, &self.source_dims)
    }
}

/// Arranges the mode-`mode` fibres of `t` as the columns of an
/// `I_mode x (K / I_mode)` matrix.
///
/// Columns cycle through the remaining modes with the lowest-numbered
/// remaining mode fastest. For an order-2 tensor mode 0 gives the matrix
/// itself and mode 1 its transpose.
pub fn unfold(t: &DenseTensor, mode: usize) -> Result<Unfolding> {
    check_mode(mode, t.order())?;
    let dims = t.dims();
    let rows = dims[mode];
    let (left, right) = split_extents(dims, mode);
    let mut matrix = DMatrix::zeros(rows, left * right);
    for b in 0..right {
        for i in 0..rows {
            let base = left * (i + rows * b);
            for a in 0..left {
                matrix[(i, a + left * b)] = t.data[base + a];
            }
        }
    }
    Ok(Unfolding {
        mode,
        matrix,
        source_dims: dims.to_vec(),
    })
}

/// Inverse of [`unfold`]: the unique tensor with dims `dims` whose
/// mode-`mode` unfolding is `m`.
pub fn fold(m: &DMatrix<f64>, mode: usize, dims: &[usize]) -> Result<DenseTensor> {
    validate_dims(dims)?;
    check_mode(mode, dims.len())?;
    let rows = dims[mode];
    let (left, right) = split_extents(dims, mode);
    if m.nrows() != rows || m.ncols() != left * right {
        return Err(Error::ShapeMismatch(format!(
            "a {}x{} matrix cannot fold along mode {} into dims {:?}",
            m.nrows(),
            m.ncols(),
            mode,
            dims
        )));
    }
    let mut data = vec![0.0; rows * left * right];
    for b in 0..right {
        for i in 0..rows {
            let base = left * (i + rows * b);
            for a in 0..left {
                data[base + a] = m[(i, a + left * b)];
            }
        }
    }
    Ok(DenseTensor {
        dims: dims.to_vec(),
        data,
    })
}

/// `t x_mode u`: applies `u` (shape `J x I_mode`) to every mode-`mode` fibre.
pub fn mode_n_product(t: &DenseTensor, u: &DMatrix<f64>, mode: usize) -> Result<DenseTensor> {
    check_mode(mode, t.order())?;
    if u.ncols() != t.dims()[mode] {
        return Err(Error::ShapeMismatch(format!(
            "mode-{} product needs {} matrix columns, got {}",
            mode,
            t.dims()[mode],
            u.ncols()
        )));
    }
    if u.nrows() == 0 {
        return Err(Error::InvalidDims(vec![0]));
    }
    let unfolded = unfold(t, mode)?;
    let product = u * &unfolded.matrix;
    let mut dims = t.dims().to_vec();
    dims[mode] = u.nrows();
    fold(&product, mode, &dims)
}

/// Applies one matrix per mode, `t x_0 mats[0] x_1 mats[1] ...`.
pub fn multi_mode_product(t: &DenseTensor, mats: &[DMatrix<f64>]) -> Result<DenseTensor> {
    if mats.len() != t.order() {
        return Err(Error::ShapeMismatch(format!(
            "expected {} matrices (one per mode), got {}",
            t.order(),
            mats.len()
        )));
    }
    for (mode, u) in mats.iter().enumerate() {
        if u.ncols() != t.dims()[mode] {
            return Err(Error::ShapeMismatch(format!(
                "matrix for mode {} has {} columns, mode size is {}",
                mode,
                u.ncols(),
                t.dims()[mode]
            )));
        }
    }
    let mut out = t.clone();
    for (mode, u) in mats.iter().enumerate() {
        out = mode_n_product(&out, u, mode)?;
    }
    Ok(out)
}

/// Kronecker product: the block matrix whose `(i, j)` block is `a[(i, j)] * b`.
pub fn kronecker(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Left fold of [`kronecker`] over `mats` in the given order.
pub fn kronecker_seq(mats: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
    let (first, rest) = mats
        .split_first()
        .ok_or(Error::EmptyInput("kronecker_seq needs at least one matrix"))?;
    Ok(rest.iter().fold(first.clone(), |acc, m| kronecker(&acc, m)))
}

/// Kronecker product of the matrices taken from the last mode down to the
/// first, the ordering that matches the vectorization convention.
pub fn kronecker_reversed(mats: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
    let reversed: Vec<DMatrix<f64>> = mats.iter().rev().cloned().collect();
    kronecker_seq(&reversed)
}
