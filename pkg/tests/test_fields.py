import numpy as np
import pytest

from heisencalc.core import GroupContext, GroupPoint, Variant
from heisencalc.fields import (
    LEFT,
    RIGHT,
    apply_field,
    det_normalized,
    field_coefficients,
    left_coefficients,
    mixed_hessian,
    mixed_hessian_batch,
    mixed_hessian_det,
    mixed_hessian_det_normalized_batch,
    phase_callable,
    right_coefficients,
)
from heisencalc.jets import Jet2
from heisencalc.norms import PhaseSpec, QuasiNorm, QuasiNormSpec, norm_core

FULL1 = GroupContext(1, 1.0)
POL1 = GroupContext(1, 1.0, Variant.POLARIZED)


def pt(x, t):
    return GroupPoint(np.asarray(x, dtype=float), t)


def annulus(m, n=1, seed=0):
    rng = np.random.default_rng(seed)
    u = rng.normal(size=(m, 2 * n + 1))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    r = rng.uniform(0.7, 1.8, m)
    return u[:, :-1] * r[:, None], u[:, -1] * r**2


def phi3(c):
    return c[0] ** 4.0 + c[1] ** 4.0 + c[2] * c[2]


def phi1(c):
    s = c[0] * c[0] + c[1] * c[1]
    return s * s + c[2] * c[2]


class TestJet2:
    def test_product_rule_exact(self):
        # f(x, y) = x^2 y at (3, 5), directions dx=1, dy=1:
        # d1 = 2xy = 30, d2 = 30 + x^2 = wait: mixed d(ds)d(dr) of
        # (x+s)^2(y+r): ds: 2(x+s)(y+r); dsdr: 2(x+s) -> 6
        x = Jet2(3.0, 1.0, 1.0, 0.0)
        y = Jet2(5.0, 1.0, 1.0, 0.0)
        f = x * x * y
        assert f.val == 45.0
        assert f.d1 == 2 * 3 * 5 + 9  # both directions seeded in x and y
        assert f.d12 == 2 * 3 + 2 * 3 + 2 * 5  # d^2/dsdr [(3+s+r)^2 (5+s+r)]

    def test_separated_directions(self):
        # seed direction 1 in x only, direction 2 in y only
        x = Jet2(3.0, 1.0, 0.0, 0.0)
        y = Jet2(5.0, 0.0, 1.0, 0.0)
        f = x * x * y
        assert f.d1 == 30.0 and f.d2 == 9.0 and f.d12 == 6.0

    def test_chain_rules(self):
        x = Jet2(2.0, 1.0, 2.0, 3.0)
        f = x**3.0
        # f' = 3x^2, f'' = 6x: d12 = f' * 3 + f'' * 1 * 2
        assert np.isclose(f.d12, 12.0 * 3.0 + 12.0 * 2.0)
        g = x.sqrt()
        r = np.sqrt(2.0)
        assert np.isclose(g.d12, 3.0 / (2 * r) - 2.0 / (4 * 2.0 ** 1.5))

    def test_division_and_rops(self):
        x = Jet2(4.0, 1.0, 0.5, 0.25)
        y = (1.0 / x) * x
        assert np.isclose(y.val, 1.0) and abs(y.d1) < 1e-15 \
            and abs(y.d12) < 1e-15
        z = (2.0 - x) + (x - 2.0)
        assert z.val == 0.0 and z.d1 == 0.0 and z.d12 == 0.0

    def test_array_payloads(self):
        v = np.array([1.0, 2.0, 3.0])
        x = Jet2(v, np.ones(3), np.zeros(3), np.zeros(3))
        f = x * x
        assert np.allclose(f.d1, 2 * v)


class TestCoefficients:
    def test_full_left(self):
        p = pt([0.3, -0.7], 0.2)
        assert np.allclose(left_coefficients(FULL1, 1, p), [1, 0, 2 * 1.0 * -0.7])
        assert np.allclose(left_coefficients(FULL1, 2, p), [0, 1, -2 * 1.0 * 0.3])
        assert np.allclose(left_coefficients(FULL1, 3, p), [0, 0, 1])

    def test_full_right(self):
        p = pt([0.3, -0.7], 0.2)
        assert np.allclose(right_coefficients(FULL1, 1, p), [1, 0, 2 * 0.7])
        assert np.allclose(right_coefficients(FULL1, 2, p), [0, 1, 2 * 0.3])
        assert np.allclose(right_coefficients(FULL1, 3, p), [0, 0, 1])

    def test_polarized(self):
        p = pt([0.4, -0.9], 0.0)
        assert np.allclose(left_coefficients(POL1, 1, p), [1, 0, 0])
        assert np.allclose(right_coefficients(POL1, 2, p), [0, 1, 0])
        assert np.allclose(left_coefficients(POL1, 2, p), [0, 1, -2 * 0.4])
        assert np.allclose(right_coefficients(POL1, 1, p), [1, 0, 2 * 0.9])

    def test_invariance_under_translation(self):
        # left fields commute with left translation:
        # (X f)(g.p) = X[q -> f(g.q)](p); checked per coefficient via the
        # chain rule of the product map
        from heisencalc.core import multiply

        rng = np.random.default_rng(2)
        for ctx in (FULL1, POL1, GroupContext(2, -0.6)):
            d = ctx.dim
            g = pt(rng.normal(size=2 * ctx.n), rng.normal())
            p = pt(rng.normal(size=2 * ctx.n), rng.normal())
            gp = multiply(ctx, g, p)
            h = 1e-6
            for j in range(1, d + 1):
                c = field_coefficients(ctx, LEFT, j, p)
                # transport the direction through left translation by g
                plus = multiply(ctx, g, GroupPoint(p.x + h * c[:-1],
                                                   p.t + h * c[-1]))
                minus = multiply(ctx, g, GroupPoint(p.x - h * c[:-1],
                                                    p.t - h * c[-1]))
                transported = (plus.coords() - minus.coords()) / (2 * h)
                assert np.allclose(
                    transported, field_coefficients(ctx, LEFT, j, gp),
                    atol=1e-6,
                )

    def test_errors(self):
        with pytest.raises(ValueError):
            field_coefficients(FULL1, LEFT, 0, pt([0, 0], 0))
        with pytest.raises(ValueError):
            field_coefficients(FULL1, LEFT, 4, pt([0, 0], 0))
        with pytest.raises(ValueError):
            field_coefficients(GroupContext(2, 1.0, Variant.POLARIZED),
                               LEFT, 1, pt([0, 0, 0, 0], 0))
        with pytest.raises(ValueError):
            field_coefficients(FULL1, "up", 1, pt([0, 0], 0))


class TestApplyField:
    def test_quartic_scalar_derivatives(self):
        p = pt([1.0, 1.0], 1.0)
        assert np.isclose(apply_field(FULL1, LEFT, 1, phi3, p), 8.0)
        for x, t in [([0.3, -0.8], 0.4), ([1.2, 0.1], -0.9)]:
            assert np.isclose(apply_field(FULL1, LEFT, 3, phi3, pt(x, t)),
                              2 * t)

    def test_koranyi_gradient_closed_form(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=2)
        t = rng.normal()
        p = pt(x, t)
        a = FULL1.a
        Jx = np.array([x[1], -x[0]])
        expected = np.append(4 * (x @ x) * x + 4 * a * t * Jx, 2 * t)
        got = [apply_field(FULL1, LEFT, j, phi1, p) for j in (1, 2, 3)]
        assert np.allclose(got, expected, rtol=1e-12)
        expected_r = np.append(4 * (x @ x) * x - 4 * a * t * Jx, 2 * t)
        got_r = [apply_field(FULL1, RIGHT, j, phi1, p) for j in (1, 2, 3)]
        assert np.allclose(got_r, expected_r, rtol=1e-12)

    def test_polynomial_exactness(self):
        # left_1 right_1 of x1^3 x2 t at a generic point, worked by hand
        f = lambda c: c[0] ** 3.0 * c[1] * c[2]
        p = pt([2.0, -1.0], 0.5)
        a = 1.0
        # right_1 f = (3 x1^2 x2 t) - 2 a x2 (x1^3 x2)
        # left_1 of that = 6 x1 x2 t + 2 a x2 * 3x1^2 x2 - 2a x2 * 3 x1^2 x2
        #                = 6 x1 x2 t  (coefficient-derivative terms cancel here)
        H = mixed_hessian(FULL1, f, p)
        assert np.isclose(H[0, 0], 6 * 2.0 * -1.0 * 0.5, rtol=1e-13)


class TestMixedHessian:
    def test_linear_function_twist_entry(self):
        f = lambda c: c[2]
        for a in (1.0, -0.35, 2.5):
            ctx = GroupContext(1, a)
            H = mixed_hessian(ctx, f, pt([0.9, -1.4], 0.2))
            assert np.isclose(H[0, 1], 2 * a)
            assert np.isclose(H[1, 0], -2 * a)
            assert np.allclose(np.delete(H.ravel(), [1, 3]), 0.0)

    def _fd_entry(self, ctx, f, p, j, k, h=1e-4):
        def g(q):
            ck = field_coefficients(ctx, RIGHT, k, q)

            def along(s):
                return f(list(q.coords() + s * ck))

            return (along(h) - along(-h)) / (2 * h)

        cj = field_coefficients(ctx, LEFT, j, p)

        def gp(s):
            return g(GroupPoint(p.x + s * cj[:-1], p.t + s * cj[-1]))

        return (gp(h) - gp(-h)) / (2 * h)

    def test_against_finite_differences_at_pole(self):
        p = pt([0.0, 0.0], 1.0)
        H = mixed_hessian(FULL1, phi1, p)
        for j in range(1, 4):
            for k in range(1, 4):
                fd = self._fd_entry(FULL1, phi1, p, j, k)
                assert abs(H[j - 1, k - 1] - fd) < 1e-6

    def test_against_finite_differences_random(self):
        spec = PhaseSpec(QuasiNormSpec(QuasiNorm.KORANYI), 1.0)
        f = phase_callable(spec)
        X, T = annulus(5, seed=3)
        for i in range(len(T)):
            p = pt(X[i], T[i])
            H = mixed_hessian(FULL1, f, p)
            for j in range(1, 4):
                for k in range(1, 4):
                    fd = self._fd_entry(FULL1, f, p, j, k)
                    denom = max(abs(H[j - 1, k - 1]), 1e-6)
                    assert abs(H[j - 1, k - 1] - fd) / denom < 1e-5

    def test_euclidean_symmetry(self):
        ctx = GroupContext(1, 0.0)
        X, T = annulus(10, seed=4)
        f = phase_callable(PhaseSpec(QuasiNormSpec(QuasiNorm.MINKOWSKI), 1.5))
        coords = [X[:, 0], X[:, 1], T]
        H = mixed_hessian_batch(ctx, f, coords)
        assert np.allclose(H, np.swapaxes(H, -1, -2), atol=1e-10)

    def test_convolution_phase_identity(self):
        # applying left fields in both arguments of Phi(q^-1 p) equals
        # minus the one-point mixed Hessian at the displacement
        rng = np.random.default_rng(9)
        spec = QuasiNormSpec(QuasiNorm.KORANYI)
        beta = 1.2
        for ctx in (FULL1, GroupContext(1, -0.8), POL1):
            a = ctx.a
            p = rng.normal(size=3) * 0.6 + np.array([0, 0, 2.0])
            q = rng.normal(size=3) * 0.3

            def pairing(u, v):
                if ctx.variant is Variant.POLARIZED:
                    return u[0] * v[1]
                return u[0] * v[1] - u[1] * v[0]

            def two_point(jp, jq):
                cp = field_coefficients(ctx, LEFT, jp, pt(p[:2], p[2]))
                cq = field_coefficients(ctx, LEFT, jq, pt(q[:2], q[2]))
                P = [Jet2(p[i], cp[i], 0.0, 0.0) for i in range(3)]
                Q = [Jet2(q[i], 0.0, cq[i], 0.0) for i in range(3)]
                zx = [P[0] - Q[0], P[1] - Q[1]]
                zt = P[2] - Q[2] + 2.0 * a * (pairing(Q, P) - pairing(Q, Q))
                return (norm_core(spec.kind, zx, zt) ** (-beta)).d12

            from heisencalc.core import inverse, multiply, relative

            z = relative(ctx, pt(q[:2], q[2]), pt(p[:2], p[2]))
            Hz = mixed_hessian(
                ctx, phase_callable(PhaseSpec(spec, beta)), z
            )
            for jp in range(1, 4):
                for jq in range(1, 4):
                    lhs = two_point(jp, jq)
                    rhs = -Hz[jp - 1, jq - 1]
                    assert np.isclose(lhs, rhs, rtol=1e-9, atol=1e-12)


class TestDeterminants:
    def test_matches_closed_value_at_pole(self):
        spec = PhaseSpec(QuasiNormSpec(QuasiNorm.KORANYI), 2.0)
        det = mixed_hessian_det(FULL1, spec, pt([0, 0], 1.0))
        assert np.isclose(det, 8.0, rtol=1e-12)

    def test_quartic_line_degeneracy(self):
        spec = PhaseSpec(QuasiNormSpec(QuasiNorm.QUARTIC), 1.0)
        for a in (0.5, 1.0, 3.0):
            ctx = GroupContext(1, a)
            v = mixed_hessian_det_normalized_batch(
                ctx, spec, np.array([[1.0, 0.0]]), np.array([0.0])
            )
            assert abs(v[0]) < 1e-9

    def test_euclidean_minkowski_nondegenerate(self):
        ctx = GroupContext(1, 0.0)
        spec = PhaseSpec(QuasiNormSpec(QuasiNorm.MINKOWSKI), 1.0)
        X, T = annulus(30, seed=12)
        v = mixed_hessian_det_normalized_batch(ctx, spec, X, T)
        assert np.min(np.abs(v)) > 1e-4

    def test_scale_reduction_jacobian(self):
        # det of the Hessian of Phi(bx, bt) in the a-group equals
        # b^(2(2n+1)) times the (a/b)-group det at the mapped point
        rng = np.random.default_rng(15)
        for n in (1, 2):
            a, b, beta = 1.3, 0.6, 1.0
            ctx_a = GroupContext(n, a)
            ctx_ab = GroupContext(n, a / b)
            spec_b = PhaseSpec(QuasiNormSpec(QuasiNorm.KORANYI, b), beta)
            spec_1 = PhaseSpec(QuasiNormSpec(QuasiNorm.KORANYI), beta)
            p = rng.normal(size=2 * n + 1)
            det_b = mixed_hessian_det(ctx_a, spec_b, pt(p[:-1], p[-1]))
            det_1 = mixed_hessian_det(
                ctx_ab, spec_1, pt(b * p[:-1], b * p[-1])
            )
            assert np.isclose(det_b, b ** (2 * (2 * n + 1)) * det_1,
                              rtol=1e-9)

    def test_origin_and_box_rejected(self):
        spec = PhaseSpec(QuasiNormSpec(QuasiNorm.KORANYI), 1.0)
        with pytest.raises(ValueError):
            mixed_hessian_det(FULL1, spec, pt([0, 0], 0.0))
        with pytest.raises(ValueError):
            mixed_hessian_det(
                FULL1, PhaseSpec(QuasiNormSpec(QuasiNorm.BOX), 1.0),
                pt([1, 0], 0.0),
            )

    def test_det_normalized_bounds(self):
        rng = np.random.default_rng(3)
        H = rng.normal(size=(40, 3, 3))
        v = det_normalized(H)
        assert np.all(np.abs(v) <= 1.0 + 1e-12)
        H[0] = 0.0
        assert det_normalized(H)[0] == 0.0
