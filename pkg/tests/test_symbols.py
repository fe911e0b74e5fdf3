"""Symbol construction and evaluation.

Closed-form families, the Levy-Khintchine quadrature route, subordination,
and symmetrization. Jump-measure values are checked against independently
computed integrals frozen below.
"""

import cmath
import math

import numpy as np
import pytest

import fellerkit as fk

# normalizers C(alpha, d) with C * integral(1 - cos(z_1)) |z|^(-d-alpha) dz = 1,
# frozen from a direct high-precision evaluation of the integral
STABLE_CONSTANTS = {
    (0.5, 1): 0.19947114020071638,
    (1.0, 1): 0.31830988618379075,
    (1.5, 1): 0.2992067103010746,
    (0.8, 2): 0.13207971389562193,
    (1.2, 2): 0.1767447855742851,
    (0.8, 3): 0.08077514677468614,
}

# one-sided density |z|^(-1.7) on z > 0, evaluated at xi = 1.3; reference
# value from the split defect/tail quadrature done independently
ONE_SIDED_DENSITY = "abs(z)**(-1.7) * max(0.0, min(1.0, 1e30 * z))"
ONE_SIDED_VALUE = 2.331353306122569 - 0.24220515728611505j


def ev(model, x, xi):
    """Evaluate at a single point and coerce to a python complex."""
    out = np.asarray(fk.eval_symbol(model, x, xi))
    return complex(out.reshape(-1)[0])


class TestClosedFormFamilies:
    def test_brownian_with_drift(self):
        m = fk.brownian(1, drift=0.3)
        assert ev(m, 0.0, 2.0) == pytest.approx(4.0 - 0.6j)

    def test_brownian_two_dimensional(self):
        m = fk.brownian(2)
        v = ev(m, np.zeros(2), np.array([1.0, 2.0]))
        assert v == pytest.approx(5.0 + 0.0j)

    def test_alpha_stable_modulus(self):
        m = fk.alpha_stable(0.5, 1)
        assert ev(m, 0.0, 4.0) == pytest.approx(2.0 + 0.0j)
        assert ev(m, 0.0, -4.0) == pytest.approx(2.0 + 0.0j)

    def test_cauchy_is_stable_index_one(self):
        mc = fk.cauchy(1)
        ms = fk.alpha_stable(1.0, 1)
        for xi in (0.25, 1.0, 7.5):
            assert ev(mc, 0.0, xi) == ev(ms, 0.0, xi)

    def test_compound_poisson_closed_form(self):
        lam, mean, sd = 2.0, 0.3, 1.0
        m = fk.compound_poisson(lam, mean, sd)
        xi = 1.3
        want = lam * (1.0 - cmath.exp(1j * mean * xi - 0.5 * (sd * xi) ** 2))
        assert ev(m, 0.0, xi) == pytest.approx(want, rel=1e-14)

    def test_zero_symbol(self):
        m = fk.zero_symbol(1)
        assert ev(m, 0.3, 5.0) == 0.0 + 0.0j

    def test_eval_symbol_vectorizes(self):
        m = fk.brownian(1)
        xis = np.array([1.0, 2.0, 3.0])
        vals = fk.eval_symbol(m, 0.0, xis)
        assert np.allclose(vals, xis**2)

    def test_dimension_mismatch_raises(self):
        m = fk.brownian(2)
        with pytest.raises(ValueError, match="last axis of length 2"):
            fk.eval_symbol(m, np.zeros(2), np.array([1.0, 2.0, 3.0]))

    @pytest.mark.parametrize("alpha", [0.0, -0.3, 2.5])
    def test_stable_index_range(self, alpha):
        with pytest.raises(fk.ConfigError, match=r"stable index must lie in \(0, 2\]"):
            fk.alpha_stable(alpha, 1)

    def test_compound_poisson_needs_positive_rate(self):
        with pytest.raises(fk.ConfigError, match="jump rate must be positive"):
            fk.compound_poisson(0.0, 0.3, 1.0)

    def test_compound_poisson_dimension_guard(self):
        with pytest.raises(fk.ConfigError, match="compound_poisson is implemented for dimension 1"):
            fk.compound_poisson(2.0, 0.3, 1.0, dimension=2)


class TestStableLike:
    def test_constant_order_matches_stable(self):
        m = fk.stable_like_symbol("1.3", 1.2, 1.4)
        s = fk.alpha_stable(1.3, 1)
        for xi in (0.5, 1.0, 3.0):
            assert ev(m, 0.7, xi) == pytest.approx(ev(s, 0.0, xi), rel=1e-14)

    def test_state_dependent_order(self):
        m = fk.stable_like_symbol("1.5 + 0.3*sin(x)", 1.2, 1.8)
        x = 0.4
        a = 1.5 + 0.3 * math.sin(x)
        assert ev(m, x, 2.0) == pytest.approx(2.0**a + 0.0j, rel=1e-14)

    def test_order_leaving_band_rejected(self):
        # the constructor samples the order function against the band
        with pytest.raises(fk.ConfigError, match="sampled order leaves the declared band"):
            fk.stable_like_symbol("1.5 + 0.3*sin(x)", 1.45, 1.55)

    def test_band_endpoints_checked(self):
        with pytest.raises(fk.ConfigError, match="order band must satisfy"):
            fk.stable_like_symbol("1.0", 1.2, 1.1)
        with pytest.raises(fk.ConfigError, match="order band must satisfy"):
            fk.stable_like_symbol("1.0", 0.5, 2.0)


class TestStableLikeConstant:
    @pytest.mark.parametrize("key, want", sorted(STABLE_CONSTANTS.items()))
    def test_frozen_values(self, key, want):
        alpha, d = key
        assert fk.stable_like_constant(alpha, d) == pytest.approx(want, rel=1e-9)

    def test_invalid_order(self):
        with pytest.raises(fk.ConfigError, match=r"order must lie in \(0, 2\)"):
            fk.stable_like_constant(2.0, 1)

    def test_invalid_dimension(self):
        with pytest.raises(fk.ConfigError, match="dimension must be a positive integer"):
            fk.stable_like_constant(1.0, 0)


class TestLevySymbol:
    def test_diffusion_only_matches_brownian(self):
        chars = fk.LevyCharacteristics(diffusion=2.0)
        m = fk.levy_symbol(chars, dimension=1)
        b = fk.brownian(1)
        for xi in (0.5, 2.0):
            assert ev(m, 0.0, xi) == pytest.approx(ev(b, 0.0, xi))

    def test_kill_and_drift(self):
        chars = fk.LevyCharacteristics(kill=0.3, drift=0.5)
        m = fk.levy_symbol(chars, dimension=1)
        assert ev(m, 0.0, 2.0) == pytest.approx(0.3 - 1.0j)

    @pytest.mark.parametrize(
        "alpha, d, tol",
        [(0.5, 1, 1e-7), (1.5, 1, 1e-7), (0.8, 2, 1e-6), (1.2, 2, 1e-6), (0.8, 3, 1e-6)],
    )
    def test_radial_stable_density_reproduces_power(self, alpha, d, tol):
        c = STABLE_CONSTANTS[(alpha, d)]
        chars = fk.LevyCharacteristics(
            jump_density=f"{c!r} * r**({-(d + alpha)!r})",
            singularity_exponent=alpha,
            radial=True,
            symmetric=True,
        )
        m = fk.levy_symbol(chars, dimension=d)
        x = 0.0 if d == 1 else np.zeros(d)
        xi = 2.0 if d == 1 else np.array([2.0] + [0.0] * (d - 1))
        v = ev(m, x, xi)
        assert v.real == pytest.approx(2.0**alpha, rel=tol)
        assert v.imag == 0.0

    def test_one_sided_density_frozen_value(self):
        chars = fk.LevyCharacteristics(
            jump_density=ONE_SIDED_DENSITY, singularity_exponent=0.7, radial=False
        )
        m = fk.levy_symbol(chars, dimension=1)
        assert ev(m, 0.0, 1.3) == pytest.approx(ONE_SIDED_VALUE, rel=1e-8)

    def test_hermitian_in_xi(self):
        chars = fk.LevyCharacteristics(
            jump_density=ONE_SIDED_DENSITY, singularity_exponent=0.7, radial=False
        )
        m = fk.levy_symbol(chars, dimension=1)
        a = ev(m, 0.0, 1.3)
        b = ev(m, 0.0, -1.3)
        assert b == pytest.approx(a.conjugate(), rel=1e-10)

    def test_symmetric_flag_kills_imaginary_part(self):
        chars = fk.LevyCharacteristics(
            jump_density="abs(z)**(-2.5)", singularity_exponent=1.5, radial=False, symmetric=True
        )
        m = fk.levy_symbol(chars, dimension=1)
        assert ev(m, 0.0, 1.7).imag == 0.0

    def test_compound_poisson_via_characteristics(self):
        # gaussian jump density with rate 2; the compensating drift equals
        # the first moment of the density truncated to |z| <= 1, frozen here
        m1 = 0.11497083527688218
        chars = fk.LevyCharacteristics(
            jump_density="2.0 * exp(-(z - 0.3)**2 / 2) / ((2*pi)**0.5)",
            singularity_exponent=0.5,
            radial=False,
            drift=m1,
        )
        m = fk.levy_symbol(chars, dimension=1)
        ref = fk.compound_poisson(2.0, 0.3, 1.0)
        xi = 1.3
        assert ev(m, 0.0, xi) == pytest.approx(ev(ref, 0.0, xi), rel=1e-7)

    def test_state_dependent_radial_density_scales(self):
        chars = fk.LevyCharacteristics(
            jump_density="(1 + 0.5*sin(x)) * r**(-1.5)",
            singularity_exponent=0.5,
            radial=True,
        )
        m = fk.levy_symbol(chars, dimension=1)
        v1 = ev(m, 0.7, 2.0)
        v2 = ev(m, -0.4, 2.0)
        want = (1 + 0.5 * math.sin(0.7)) / (1 + 0.5 * math.sin(-0.4))
        assert v1.real / v2.real == pytest.approx(want, rel=1e-12)

    def test_integrability_witness_rejects_heavy_singularity(self):
        # |z|^(-3.5) near zero fails min(1, z^2) integrability no matter
        # what exponent the characteristics declare
        chars = fk.LevyCharacteristics(
            jump_density="abs(z)**(-3.5)", singularity_exponent=1.5, radial=False
        )
        with pytest.raises(fk.ConfigError, match=r"min\(1, \|z\|\^2\) integrability"):
            fk.levy_symbol(chars, dimension=1)

    def test_non_radial_needs_dimension_one(self):
        chars = fk.LevyCharacteristics(
            jump_density="abs(z)**(-2.5)", singularity_exponent=1.5, radial=False
        )
        with pytest.raises(
            fk.ConfigError, match="non-radial jump densities are supported in dimension 1"
        ):
            fk.levy_symbol(chars, dimension=2)

    def test_singularity_exponent_range(self):
        chars = fk.LevyCharacteristics(
            jump_density="r**(-3.0)", singularity_exponent=2.0, radial=True
        )
        with pytest.raises(fk.ConfigError, match=r"singularity exponent must lie in \(0, 2\)"):
            fk.levy_symbol(chars, dimension=1)


class TestSubordination:
    def test_square_root_of_brownian_is_cauchy(self):
        m = fk.subordinate(fk.brownian(1), "s**0.5")
        s = fk.alpha_stable(1.0, 1)
        for xi in (0.5, 2.0, 8.0):
            assert ev(m, 0.0, xi) == pytest.approx(ev(s, 0.0, xi), rel=1e-12)

    def test_expression_bernstein_function(self):
        m = fk.subordinate(fk.brownian(1), "log(1 + s)")
        xi = 3.0
        assert ev(m, 0.0, xi) == pytest.approx(math.log(1 + xi**2) + 0.0j, rel=1e-12)

    def test_callable_spec(self):
        spec = fk.BernsteinSpec(fn=lambda x_pts, s: np.sqrt(s), growth_constant=1.0)
        m = fk.subordinate(fk.brownian(1), spec)
        assert ev(m, 0.0, 3.0) == pytest.approx(3.0 + 0.0j, rel=1e-12)

    def test_rejects_state_dependent_base(self):
        base = fk.stable_like_symbol("1.5 + 0.3*sin(x)", 1.2, 1.8)
        with pytest.raises(fk.ConfigError, match="state-free base exponent"):
            fk.subordinate(base, "s**0.5")

    def test_rejects_complex_base(self):
        with pytest.raises(fk.ConfigError, match="real base exponent"):
            fk.subordinate(fk.brownian(1, drift=0.3), "s**0.5")

    @pytest.mark.parametrize(
        "expression, fragment",
        [
            ("s**2", r"f\(x, s\) is not concave in s"),
            ("1 + s", "is not 0 at x"),
            ("-s", "decreases in s near x"),
            ("3 * s**0.5", "exceeds its declared linear growth"),
        ],
    )
    def test_rejects_non_bernstein_expressions(self, expression, fragment):
        with pytest.raises(fk.ConfigError, match=fragment):
            fk.subordinate(fk.brownian(1), expression)


class TestSymmetrization:
    def test_symmetrized_stable_closed_form(self):
        # difference of two independent copies, halved: the symbol becomes
        # 2 Re p(xi/2), so a stable index a turns into 2^(1-a) |xi|^a
        m = fk.stable_like_symbol("1.7", 1.5, 1.9)
        sym = fk.symmetrize(m)
        v = ev(sym, 0.0, 0.3)
        assert v.real == pytest.approx(2.0 ** (1 - 1.7) * 0.3**1.7, rel=1e-12)
        assert v.imag == 0.0

    def test_power_scaling_exact_point(self):
        sym = fk.symmetrize(fk.alpha_stable(0.3, 1))
        assert ev(sym, 0.0, 2.0).real == pytest.approx(2.0, rel=1e-14)
        assert ev(sym, 0.0, 1.0).real == pytest.approx(2.0**0.7, rel=1e-12)

    def test_kind_is_labelled_and_imag_dropped(self):
        sym = fk.symmetrize(fk.brownian(1, drift=0.5))
        assert sym.kind == "symmetrized"
        assert ev(sym, 0.0, 1.0).imag == 0.0


class TestValidateModel:
    def test_clean_model_report(self):
        rep = fk.validate_model(fk.alpha_stable(1.5, 1))
        assert rep["hermitian_ok"] is True
        assert rep["hermitian_defect"] == 0.0
        assert rep["nonnegative_ok"] is True
        assert rep["conservative_ok"] is True
        assert rep["zero_offset"] == 0.0

    def test_negative_real_part_flagged(self):
        m = fk.closed_form_symbol("0 - abs(xi)", conservative=False)
        rep = fk.validate_model(m)
        assert rep["nonnegative_ok"] is False
        assert rep["min_real_part"] < 0
