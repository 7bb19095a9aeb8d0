//! The three automorphism families: of first-order operators `𝒟¹`, of all
//! operators `𝒟`, and of symbols `𝒮`, together with their ingredients
//! (pushforward by an affine map, the exponential of `ω̄`) and recovery of
//! the `𝒟¹` parameters from a black-box map.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::affine::AffineMap;
use crate::error::{AlgebraError, Result};
use crate::form::{ClosedOneForm, OneForm};
use crate::index::MultiIndex;
use crate::poly::Polynomial;
use crate::symbol::PhaseSymbol;
use crate::weyl::DiffOp;
use crate::Rational;

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(AlgebraError::DimensionMismatch { left, right })
    }
}

/// `φ_*(D)`, defined by `φ_*(D)(f) = D(f∘φ)∘φ⁻¹`.
///
/// For `φ(x) = Ax + b`, `∂_i(f∘φ) = (Σ_j A_ji ∂_j f)∘φ`, so each `∂_i` is
/// replaced by the constant-coefficient field `Σ_j A_ji ∂_j` and each
/// coefficient is pulled back by `φ⁻¹`.
pub fn pushforward(phi: &AffineMap, op: &DiffOp) -> Result<DiffOp> {
    let n = op.dim();
    check_dims(n, phi.dim())?;
    let a = phi.matrix();
    // Constant-coefficient operators compose like polynomials in ξ.
    let fields: Vec<Polynomial> = (0..n)
        .map(|i| Polynomial::from_terms(n, (0..n).map(|j| (MultiIndex::unit(n, j), a[j][i].clone()))))
        .collect();
    let inv = phi.inverse();
    let mut parts = Vec::with_capacity(op.terms().count());
    for (alpha, coeff) in op.terms() {
        let g = inv.pullback(coeff)?;
        let product = Polynomial::monomial(alpha.clone(), Rational::one()).substitute(&fields, n)?;
        parts.push((g, product));
    }
    if let Some(out) = DiffOp::from_products(n, &parts) {
        return Ok(out);
    }
    let mut out = DiffOp::zero(n);
    for (g, product) in &parts {
        for (beta, c) in product.terms() {
            out.add_term(beta.clone(), g.scale(c));
        }
    }
    Ok(out)
}

/// `e^{ω̄}(D) = Σ_k ω̄^k(D)/k!` with `ω̄(E) = [E, m_f]`, `df = ω`.
///
/// Equivalently `D ↦ e^{−f}·D·e^{f}`. The series stops after at most
/// `ord D + 1` brackets.
pub fn exp_omega(omega: &ClosedOneForm, op: &DiffOp) -> Result<DiffOp> {
    check_dims(op.dim(), omega.dim())?;
    let f = omega.potential();
    if let Some(out) = op.integer_exp_bracket(&f) {
        return Ok(out);
    }
    let bound = op.order().value().map_or(0, |k| k + 1);
    let mut acc = op.clone();
    let mut term = op.clone();
    let mut steps = 0u32;
    while !term.is_zero() {
        steps += 1;
        assert!(steps <= bound, "ω̄ series did not terminate within ord(D)+1 brackets");
        let k = Rational::from_integer(steps.into());
        term = term.bracket_function(&f)?.scale(&k.recip());
        acc = &acc + &term;
    }
    Ok(acc)
}

/// `ω(X) = Σ_i X^i ω_i`.
pub fn contract(omega: &OneForm, field: &DiffOp) -> Result<Polynomial> {
    check_dims(field.dim(), omega.dim())?;
    let comps = field.vector_components()?;
    Ok(comps
        .iter()
        .zip(omega.components())
        .fold(Polynomial::zero(field.dim()), |acc, (x, w)| &acc + &(x * w)))
}

/// Splits a first-order operator into its function part and vector field.
pub fn split_first_order(op: &DiffOp) -> Result<(Polynomial, DiffOp)> {
    if !op.order().at_most(1) {
        return Err(AlgebraError::NotVectorField);
    }
    let f = op.zeroth_part();
    let field = op.checked_sub(&DiffOp::multiplication(f.clone()))?;
    Ok((f, field))
}

/// Parameters `(κ, λ, ω, φ)` of
/// `Φ(f + X) = (κ f + λ div X + ω(X))∘φ⁻¹ + φ_*(X)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct D1AutoSpec {
    kappa: Rational,
    lambda: Rational,
    omega: ClosedOneForm,
    phi: AffineMap,
}

impl D1AutoSpec {
    pub fn new(
        kappa: Rational,
        lambda: Rational,
        omega: ClosedOneForm,
        phi: AffineMap,
    ) -> Result<Self> {
        if kappa.is_zero() {
            return Err(AlgebraError::ZeroKappa);
        }
        check_dims(omega.dim(), phi.dim())?;
        Ok(D1AutoSpec {
            kappa,
            lambda,
            omega,
            phi,
        })
    }

    pub fn identity(dim: usize) -> Self {
        D1AutoSpec {
            kappa: Rational::one(),
            lambda: Rational::zero(),
            omega: ClosedOneForm::zero(dim),
            phi: AffineMap::identity(dim),
        }
    }

    pub fn kappa(&self) -> &Rational {
        &self.kappa
    }
    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }
    pub fn omega(&self) -> &ClosedOneForm {
        &self.omega
    }
    pub fn phi(&self) -> &AffineMap {
        &self.phi
    }
    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    /// `Φ(f + X)`.
    pub fn apply_parts(&self, f: &Polynomial, field: &DiffOp) -> Result<DiffOp> {
        f.check_dim(self.dim())?;
        check_dims(field.dim(), self.dim())?;
        let div = field.divergence()?;
        let w = contract(self.omega.form(), field)?;
        let function = &(&f.scale(&self.kappa) + &div.scale(&self.lambda)) + &w;
        let function = self.phi.inverse().pullback(&function)?;
        DiffOp::multiplication(function).checked_add(&pushforward(&self.phi, field)?)
    }

    /// `Φ(D)` for `D ∈ 𝒟¹`.
    pub fn apply(&self, op: &DiffOp) -> Result<DiffOp> {
        let (f, field) = split_first_order(op)?;
        self.apply_parts(&f, &field)
    }
}

/// Parameters `(φ, a, ω)` of `Φ = φ_* ∘ C^a ∘ e^{ω̄}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DAutoSpec {
    phi: AffineMap,
    conjugate: bool,
    omega: ClosedOneForm,
}

impl DAutoSpec {
    /// `a` must be 0 or 1.
    pub fn new(phi: AffineMap, a: u8, omega: ClosedOneForm) -> Result<Self> {
        check_dims(omega.dim(), phi.dim())?;
        let conjugate = match a {
            0 => false,
            1 => true,
            _ => {
                return Err(AlgebraError::InvalidParameter(format!(
                    "conjugation exponent must be 0 or 1, got {a}"
                )))
            }
        };
        Ok(DAutoSpec {
            phi,
            conjugate,
            omega,
        })
    }

    pub fn phi(&self) -> &AffineMap {
        &self.phi
    }
    pub fn a(&self) -> u8 {
        u8::from(self.conjugate)
    }
    pub fn omega(&self) -> &ClosedOneForm {
        &self.omega
    }
    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    /// `(−1)^a`, the scalar by which `Φ` acts on functions up to `φ`.
    pub fn kappa(&self) -> Rational {
        if self.conjugate {
            -Rational::one()
        } else {
            Rational::one()
        }
    }

    pub fn apply(&self, op: &DiffOp) -> Result<DiffOp> {
        check_dims(op.dim(), self.dim())?;
        let mut out = exp_omega(&self.omega, op)?;
        if self.conjugate {
            out = out.conjugate();
        }
        pushforward(&self.phi, &out)
    }
}

/// Parameters `(κ, φ, ω)` of `Φ(P) = U_κ(P) ∘ φ̃ ∘ Exp(ω^v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SAutoSpec {
    kappa: Rational,
    phi: AffineMap,
    omega: ClosedOneForm,
}

impl SAutoSpec {
    pub fn new(kappa: Rational, phi: AffineMap, omega: ClosedOneForm) -> Result<Self> {
        if kappa.is_zero() {
            return Err(AlgebraError::ZeroKappa);
        }
        check_dims(omega.dim(), phi.dim())?;
        Ok(SAutoSpec { kappa, phi, omega })
    }

    pub fn kappa(&self) -> &Rational {
        &self.kappa
    }
    pub fn phi(&self) -> &AffineMap {
        &self.phi
    }
    pub fn omega(&self) -> &ClosedOneForm {
        &self.omega
    }
    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    /// Grade-wise `U_κ`, then the phase lift of `φ`, then the vertical
    /// translation by `ω`, each acting on the argument of the previous one.
    pub fn apply(&self, p: &PhaseSymbol) -> Result<PhaseSymbol> {
        check_dims(p.dim(), self.dim())?;
        // One substitution: x ↦ φ⁻¹(x), ξ_i ↦ κ⁻¹ Σ_j a_ji (ξ_j + ω_j(x)), times κ.
        let n = self.dim();
        let a = self.phi.matrix();
        let inv = self.kappa.recip();
        let shifted: Vec<PhaseSymbol> = self
            .omega
            .form()
            .components()
            .iter()
            .enumerate()
            .map(|(j, w)| &PhaseSymbol::fiber(n, j) + &PhaseSymbol::function(w.clone()))
            .collect();
        let fiber: Vec<PhaseSymbol> = (0..n)
            .map(|i| {
                shifted
                    .iter()
                    .enumerate()
                    .fold(PhaseSymbol::zero(n), |acc, (j, s)| &acc + &s.scale(&(&a[j][i] * &inv)))
            })
            .collect();
        p.substitute(Some(&self.phi.inverse()), &fiber, &self.kappa)
    }
}

/// Recovers `(κ, λ, ω, φ)` from a black-box automorphism of `𝒟¹`, then
/// checks the reconstruction against the black box on a fixed probe set.
pub fn extract_d1_params<F>(dim: usize, phi: F) -> Result<D1AutoSpec>
where
    F: Fn(&DiffOp) -> DiffOp,
{
    let err = |msg: alloc::string::String| Err(AlgebraError::Extraction(msg));
    let image_of_one = phi(&DiffOp::identity(dim));
    let kappa = match image_of_one.order().value() {
        Some(0) => image_of_one.zeroth_part().as_constant(),
        _ => None,
    };
    let kappa = match kappa {
        Some(k) if !k.is_zero() => k,
        _ => return err(format!("Φ(1) = {image_of_one} is not a nonzero constant")),
    };

    let mut inverse_components = Vec::with_capacity(dim);
    for j in 0..dim {
        let image = phi(&DiffOp::multiplication(Polynomial::var(dim, j)));
        if !image.order().at_most(0) {
            return err(format!("Φ(x{}) = {image} is not a function", j + 1));
        }
        inverse_components.push(image.zeroth_part().scale(&kappa.recip()));
    }
    let inverse = AffineMap::from_components(&inverse_components)
        .map_err(|e| AlgebraError::Extraction(format!("recovered point map: {e}")))?;
    let point_map = inverse.inverse();

    let mut omega_components = Vec::with_capacity(dim);
    for i in 0..dim {
        let image = phi(&DiffOp::derivation(dim, i));
        omega_components.push(point_map.pullback(&image.zeroth_part())?);
    }
    let omega = OneForm::new(omega_components)?
        .into_closed()
        .map_err(|_| AlgebraError::Extraction("recovered 1-form is not closed".into()))?;

    let euler = DiffOp::monomial(MultiIndex::unit(dim, 0), Polynomial::var(dim, 0));
    let zeroth = point_map.pullback(&phi(&euler).zeroth_part())?;
    let rest = &zeroth - &(&Polynomial::var(dim, 0) * &omega.components()[0]);
    let Some(lambda) = rest.as_constant() else {
        return err(format!("divergence coefficient {rest} is not constant"));
    };

    let spec = D1AutoSpec::new(kappa, lambda, omega, point_map)?;
    for probe in d1_probes(dim) {
        let expected = phi(&probe);
        let actual = spec.apply(&probe)?;
        if expected != actual {
            return err(format!(
                "residual mismatch on {probe}: black box gives {expected}, reconstruction gives {actual}"
            ));
        }
    }
    Ok(spec)
}

/// `1, x_j, x_j x_k, ∂_i, x_j ∂_i, x_j x_k ∂_i`.
fn d1_probes(dim: usize) -> Vec<DiffOp> {
    let mut functions = alloc::vec![Polynomial::one(dim)];
    for j in 0..dim {
        functions.push(Polynomial::var(dim, j));
        for k in j..dim {
            functions.push(&Polynomial::var(dim, j) * &Polynomial::var(dim, k));
        }
    }
    let mut probes: Vec<DiffOp> = functions.iter().cloned().map(DiffOp::multiplication).collect();
    for i in 0..dim {
        for f in &functions {
            probes.push(DiffOp::monomial(MultiIndex::unit(dim, i), f.clone()));
        }
    }
    probes
}
