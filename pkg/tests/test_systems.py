import numpy as np
import pytest

from fcslab import fixtures, systems
from fcslab.linalg import dag


ALL_FIXTURES = ["aklt", "bernoulli-uniform", "bernoulli-basis",
                "nonergodic-z2", "two-block", "period-two"]


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_every_fixture_validates(name):
    sys_ = fixtures.by_name(name)
    diag = systems.validate(sys_)
    assert diag.ok
    assert diag.unit_residual < 1e-12
    search = systems.invariant_states(sys_)
    assert search.multiplicity >= 1
    search.mean_state.check(sys_, tol=1e-9)


def test_random_system_is_normalized():
    sys_ = fixtures.random_system(4, 3, seed=11)
    assert systems.validate(sys_).unit_residual < 1e-12


class TestInvariantStates:
    def test_aklt_unique_maximally_mixed(self):
        search = systems.invariant_states(fixtures.aklt())
        assert search.multiplicity == 1
        assert np.allclose(search.mean_state.rho, np.eye(2) / 2, atol=1e-12)

    def test_nonergodic_segment(self):
        search = systems.invariant_states(fixtures.nonergodic_z2())
        assert search.multiplicity == 2
        assert len(search.extreme_states) == 2
        for st in search.extreme_states:
            st.check(fixtures.nonergodic_z2(), tol=1e-8)
            # extreme densities sit on the two diagonal corners
            assert min(np.linalg.norm(st.rho - np.diag(e))
                       for e in ([1.0, 0.0], [0.0, 1.0])) < 1e-7

    def test_two_block_mean_has_full_support(self):
        search = systems.invariant_states(fixtures.two_block())
        assert search.multiplicity == 2
        evals = np.linalg.eigvalsh(search.mean_state.rho)
        assert evals.min() > 1e-6


class TestCompression:
    def test_identity_when_support_is_full(self):
        sys_ = fixtures.aklt()
        search = systems.invariant_states(sys_)
        comp, state, iso = systems.compress_to_support(sys_, search.mean_state)
        assert comp.n == sys_.n
        assert systems.validate(comp).ok

    def test_proper_support_compression(self):
        sys_ = fixtures.two_block()
        # the extreme state living on the scalar block has 1-dim support
        search = systems.invariant_states(sys_)
        small = min(search.extreme_states,
                    key=lambda st: np.linalg.matrix_rank(st.rho, tol=1e-8))
        comp, state, iso = systems.compress_to_support(sys_, small)
        assert comp.n < sys_.n
        assert systems.validate(comp).ok
        state.check(comp, tol=1e-8)


class TestCanonicalize:
    def test_gns_orthonormality_and_cyclicity(self):
        sys_ = fixtures.aklt()
        search = systems.invariant_states(sys_)
        can = systems.canonicalize(sys_, search.mean_state)
        assert can.gns_dim == 4
        m = can.gns_dim
        rho = can.state.rho
        c = can.basis_mats
        gram = np.einsum("pq,arq,brp->ab", rho, np.conj(c), c)
        assert np.linalg.norm(gram - np.eye(m)) < 1e-10

    def test_representation_is_multiplicative(self):
        sys_ = fixtures.random_system(2, 2, seed=3)
        search = systems.invariant_states(sys_)
        comp, state, _ = systems.compress_to_support(sys_, search.mean_state)
        can = systems.canonicalize(comp, state)
        rng = np.random.default_rng(0)
        x = rng.normal(size=(comp.n, comp.n)) + 1j * rng.normal(size=(comp.n, comp.n))
        y = rng.normal(size=(comp.n, comp.n)) + 1j * rng.normal(size=(comp.n, comp.n))
        lhs = can.represent(x @ y)
        rhs = can.represent(x) @ can.represent(y)
        assert np.linalg.norm(lhs - rhs) < 1e-9
        # adjoints are respected and Omega implements the state
        assert np.linalg.norm(can.represent(dag(x)) - dag(can.represent(x))) < 1e-9
        got = np.conj(can.omega) @ (can.represent(x) @ can.omega)
        want = np.trace(state.rho @ x)
        assert abs(got - want) < 1e-10

    def test_faithfulness_required(self):
        sys_ = fixtures.two_block()
        rho = np.zeros((3, 3), dtype=complex)
        rho[2, 2] = 1.0  # supported on the scalar block only
        with pytest.raises(systems.ValidationError):
            systems.canonicalize(sys_, systems.InvariantState(rho))


class TestWords:
    def test_enumeration_count(self):
        ws = systems.words(3, 2)
        assert len(ws) == 1 + 3 + 9
        assert ws[0] == ()

    def test_word_operator_is_forward_product(self):
        ops = fixtures.aklt().ops
        w = (0, 1, 2)
        expect = ops[0] @ ops[1] @ ops[2]
        assert np.allclose(systems.word_operator(ops, w), expect)
        table = systems.word_operators(ops, 3)
        assert np.allclose(table[w], expect)

    def test_moment_table_reverse_flag(self):
        sys_ = fixtures.aklt()
        state = systems.InvariantState(np.eye(2, dtype=complex) / 2)
        ws, fwd = systems.moment_table(sys_, state, 2)
        _, rev = systems.moment_table(sys_, state, 2, reverse=True)
        for a, wa in enumerate(ws):
            for b, wb in enumerate(ws):
                ra = ws.index(wa[::-1])
                rb = ws.index(wb[::-1])
                assert abs(fwd[a, b] - rev[ra, rb]) < 1e-12
