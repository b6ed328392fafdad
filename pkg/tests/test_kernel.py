import numpy as np
import pytest

from interleaved_lls import (
    DataBlock,
    FilterState,
    batch_lls,
    cost,
    init_state,
    kf_step,
    run_blocks,
)
from interleaved_lls.exceptions import (
    DimensionMismatchError,
    EmptyInputError,
    SingularSystemError,
    SingularUpdateError,
)


def random_blocks(rng, q, m, n_max=50):
    """Blocks with generic data; the first has at least q rows so its
    Gram matrix is positive definite almost surely."""
    blocks = []
    for i in range(m):
        n = int(rng.integers(q if i == 0 else 1, n_max + 1))
        X = rng.normal(size=(n, q))
        y = rng.normal(size=n)
        blocks.append(DataBlock(y, X))
    return blocks


class TestInitState:
    def test_zero_initialization(self):
        state = init_state(2, [0.0, 0.0])
        np.testing.assert_array_equal(state.H, np.zeros((2, 2)))
        np.testing.assert_array_equal(state.psi, [0.0, 0.0])
        assert state.steps_taken == 0

    def test_scalar_case(self):
        state = init_state(1, [5.0])
        np.testing.assert_array_equal(state.H, [[0.0]])
        np.testing.assert_array_equal(state.psi, [5.0])

    def test_default_psi0_is_zero(self):
        state = init_state(6)
        np.testing.assert_array_equal(state.H, np.zeros((6, 6)))
        np.testing.assert_array_equal(state.psi, np.zeros(6))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            init_state(3, [1.0, 2.0])

    def test_bad_q(self):
        with pytest.raises(ValueError):
            init_state(0)


class TestKfStep:
    def test_first_step_erases_psi0(self):
        state = init_state(1, [5.0])
        new = kf_step(state, DataBlock([2.0], [[1.0]]))
        np.testing.assert_allclose(new.H, [[1.0]])
        np.testing.assert_allclose(new.psi, [2.0])
        assert new.steps_taken == 1

    def test_scalar_running_mean(self):
        state = FilterState(H=np.array([[1.0]]), psi=np.array([1.0]), steps_taken=1)
        new = kf_step(state, DataBlock([3.0], [[1.0]]))
        np.testing.assert_allclose(new.H, [[2.0]])
        np.testing.assert_allclose(new.psi, [2.0])

    def test_dimension_mismatch(self):
        state = init_state(2)
        with pytest.raises(DimensionMismatchError):
            kf_step(state, DataBlock([1.0], [[1.0]]))

    def test_singular_first_gram_names_step(self):
        state = init_state(2)
        block = DataBlock([1.0], [[1.0, 2.0]])  # rank-1 Gram
        with pytest.raises(SingularUpdateError) as excinfo:
            kf_step(state, block)
        assert excinfo.value.step == 1
        assert "step 1" in str(excinfo.value)

    def test_near_singular_pivot_rejected(self):
        state = init_state(2)
        X = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-14]])
        with pytest.raises(SingularUpdateError):
            kf_step(state, DataBlock([1.0, 1.0], X))

    def test_does_not_mutate_input_state(self):
        state = init_state(1)
        h_before = state.H.copy()
        kf_step(state, DataBlock([2.0], [[1.0]]))
        np.testing.assert_array_equal(state.H, h_before)
        assert state.steps_taken == 0


class TestRunBlocks:
    def test_two_scalar_blocks_average(self):
        blocks = [DataBlock([1.0], [[1.0]]), DataBlock([3.0], [[1.0]])]
        trajectory = run_blocks(blocks)
        assert len(trajectory) == 2
        np.testing.assert_allclose(trajectory[-1].psi, [2.0])

    def test_empty_input(self):
        with pytest.raises(EmptyInputError):
            run_blocks([])

    def test_psi0_cancels_after_first_step(self):
        rng = np.random.default_rng(11)
        blocks = random_blocks(rng, 3, 4)
        a = run_blocks(blocks, psi0=np.zeros(3))
        b = run_blocks(blocks, psi0=np.array([100.0, -50.0, 3.0]))
        for state_a, state_b in zip(a, b):
            np.testing.assert_allclose(state_a.psi, state_b.psi, atol=1e-10)

    def test_noiseless_recovery(self):
        rng = np.random.default_rng(12)
        weights = rng.uniform(-5, 5, 4)
        blocks = []
        for _ in range(6):
            X = rng.normal(size=(20, 4))
            blocks.append(DataBlock(X @ weights, X))
        final = run_blocks(blocks)[-1].psi
        np.testing.assert_allclose(final, weights, rtol=1e-8, atol=1e-10)
        np.testing.assert_allclose(batch_lls(blocks), weights, rtol=1e-8, atol=1e-10)

    def test_matches_batch_oracle(self):
        rng = np.random.default_rng(13)
        blocks = random_blocks(rng, 3, 5, n_max=8)
        final = run_blocks(blocks)[-1].psi
        np.testing.assert_allclose(final, batch_lls(blocks), rtol=1e-8, atol=1e-10)


class TestBatchLls:
    def test_identity_design(self):
        y = np.array([3.0, -1.0, 2.0])
        block = DataBlock(y, np.eye(3))
        np.testing.assert_allclose(batch_lls([block]), y, rtol=1e-12)

    def test_singular_system(self):
        block = DataBlock([1.0], [[1.0, 2.0]])
        with pytest.raises(SingularSystemError):
            batch_lls([block])

    def test_empty_input(self):
        with pytest.raises(EmptyInputError):
            batch_lls([])


class TestCost:
    def test_zero_at_exact_solution(self):
        rng = np.random.default_rng(14)
        weights = rng.normal(size=3)
        X = rng.normal(size=(10, 3))
        blocks = [DataBlock(X @ weights, X)]
        assert cost(blocks, weights) <= 1e-20

    def test_scalar_example(self):
        blocks = [DataBlock([2.0], [[1.0]])]
        assert cost(blocks, [0.0]) == pytest.approx(4.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            cost([DataBlock([1.0], [[1.0, 2.0]])], [1.0])

    def test_batch_solution_minimizes(self):
        rng = np.random.default_rng(15)
        blocks = random_blocks(rng, 3, 4, n_max=12)
        solution = batch_lls(blocks)
        best = cost(blocks, solution)
        for _ in range(100):
            other = solution + rng.normal(scale=rng.uniform(0.01, 10), size=3)
            assert best <= cost(blocks, other) + 1e-12


class TestRecursionProperties:
    def test_recursion_batch_equivalence_randomized(self):
        rng = np.random.default_rng(16)
        for _ in range(50):
            q = int(rng.integers(1, 9))
            m = int(rng.integers(1, 11))
            blocks = random_blocks(rng, q, m)
            final = run_blocks(blocks)[-1].psi
            np.testing.assert_allclose(
                final, batch_lls(blocks), rtol=1e-8, atol=1e-10
            )

    def test_gram_accumulation_is_monotone(self):
        rng = np.random.default_rng(17)
        blocks = random_blocks(rng, 4, 6)
        trajectory = run_blocks(blocks)
        previous = np.zeros((4, 4))
        for state in trajectory:
            increment = state.H - previous
            assert np.linalg.eigvalsh(increment).min() >= -1e-10
            previous = state.H

    def test_h_stays_symmetric(self):
        rng = np.random.default_rng(18)
        blocks = random_blocks(rng, 5, 8)
        for state in run_blocks(blocks):
            scale = max(1.0, np.abs(state.H).max())
            assert np.abs(state.H - state.H.T).max() <= 1e-12 * scale

    def test_block_order_does_not_change_final_estimate(self):
        rng = np.random.default_rng(19)
        blocks = [
            DataBlock(rng.normal(size=12), rng.normal(size=(12, 3)))
            for _ in range(5)
        ]
        reference = run_blocks(blocks)[-1].psi
        for _ in range(5):
            permuted = [blocks[i] for i in rng.permutation(5)]
            final = run_blocks(permuted)[-1].psi
            np.testing.assert_allclose(final, reference, rtol=1e-8, atol=1e-10)

    def test_gradient_vanishes_at_batch_solution(self):
        rng = np.random.default_rng(20)
        blocks = random_blocks(rng, 3, 3, n_max=15)
        solution = batch_lls(blocks)
        h = 1e-5
        gradient = np.empty_like(solution)
        for j in range(solution.size):
            bump = np.zeros_like(solution)
            bump[j] = h
            gradient[j] = (cost(blocks, solution + bump) - cost(blocks, solution - bump)) / (2 * h)
        value = cost(blocks, solution)
        assert np.abs(gradient).max() <= 1e-4 * (1.0 + abs(value))
