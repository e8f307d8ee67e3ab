import random

import pytest

from houghton_kit.blocks import BlockSystem
from houghton_kit.elements import (
    from_cycles,
    generator,
    identity,
    transposition,
)
from houghton_kit.errors import DomainError
from houghton_kit.rays import RayPoint
from houghton_kit.subgroups import GeneratedSubgroup, delta_k
from houghton_kit.wreath import (
    MultiWreathElement,
    build_block_context,
    kk_embed,
    phi_s_descent,
    random_words,
    verify_kk,
    w_groups,
)


def pair_group():
    g2sq = generator(2, 2) ** 2
    swap = transposition(2, (1, 0), (1, 1))
    pair_swap = from_cycles(2, [[(1, 0), (1, 2)], [(1, 1), (1, 3)]])
    return GeneratedSubgroup.from_elements(2, [g2sq, swap, pair_swap])


def pair_context(depth=60):
    group = pair_group()
    system = BlockSystem.from_lists([[(1, 0), (1, 1)]])
    return group, build_block_context(group, system, depth)


def delta_context(depth=30):
    group = delta_k(3, 2)
    system = BlockSystem.from_lists([[(1, 0)], [(1, 1)]])
    return group, build_block_context(group, system, depth)


# -- product structure ---------------------------------------------------------


def test_identity_and_inverse():
    group, ctx = pair_context()
    e = ctx.identity_element()
    assert e.is_identity()
    x = kk_embed(group.generators[0].compose(group.generators[1]), ctx)
    assert x.multiply(x.inverse()) == e
    assert x.inverse().multiply(x) == e


def test_base_only_product_is_pointwise():
    group, ctx = pair_context()
    swap = (1, 0)
    w0 = ctx.quotient.quotient_points[0]
    a = MultiWreathElement(ctx, ((w0, swap),), identity(2))
    b = MultiWreathElement(ctx, ((w0, swap),), identity(2))
    assert a.multiply(b).is_identity()


def test_associativity_random():
    group, ctx = pair_context()
    rng = random.Random(5)
    words = random_words(group, 60, 4, rng)
    elems = [kk_embed(w, ctx) for w in words]
    for _ in range(200):
        a, b, c = rng.choice(elems), rng.choice(elems), rng.choice(elems)
        assert a.multiply(b).multiply(c) == a.multiply(b.multiply(c))


def test_context_mismatch_rejected():
    _, ctx1 = pair_context()
    _, ctx2 = pair_context()
    a = ctx1.identity_element()
    b = ctx2.identity_element()
    with pytest.raises(DomainError):
        a.multiply(b)


# -- the embedding --------------------------------------------------------------


def test_kk_of_swap_is_single_base_transposition():
    group, ctx = pair_context()
    swap = group.generators[1]
    k = kk_embed(swap, ctx)
    assert k.head.is_identity()
    assert len(k.base) == 1
    qp, value = k.base[0]
    assert ctx.class_points(qp) == (RayPoint(1, 0), RayPoint(1, 1))
    assert value == (1, 0)


def test_kk_of_shift_base_is_exactly_the_order_reversed_class():
    group, ctx = pair_context()
    shift = group.generators[0]
    k = kk_embed(shift, ctx)
    assert k.head == generator(2, 2)
    # the squared shift reverses the pair {(2,0),(2,1)} (it sends them to
    # (1,1) and (1,0)); every deeper class is translated order-preservingly
    assert [ctx.class_points(qp) for qp in k.support()] == [
        (RayPoint(2, 0), RayPoint(2, 1))
    ]
    from houghton_kit.wreath import order_preserving_on_class

    for qp in ctx.quotient.quotient_points:
        preserved = order_preserving_on_class(shift, ctx, qp)
        assert preserved == (qp not in set(k.support()))


def test_kk_identity():
    group, ctx = pair_context()
    assert kk_embed(identity(2), ctx) == ctx.identity_element()


def test_kk_rejects_non_preserving_element():
    group, ctx = pair_context()
    bad = transposition(2, (1, 1), (1, 2))
    with pytest.raises(DomainError):
        kk_embed(bad, ctx)


def test_kk_homomorphism_pair_group():
    group, ctx = pair_context()
    report = verify_kk(group, ctx, samples=120, max_len=5, seed=1)
    assert report.ok
    assert report.pairs_checked == 120


def test_kk_homomorphism_delta_trivial_blocks():
    group, ctx = delta_context()
    report = verify_kk(group, ctx, samples=80, max_len=3, seed=2)
    assert report.ok
    # singleton blocks force an empty base: kk is just the head there
    for w in random_words(group, 20, 3, random.Random(3)):
        assert kk_embed(w, ctx).base == ()


def test_corrupted_transversal_keeps_homomorphism_breaks_restriction():
    group, ctx = pair_context()
    far = next(
        qp
        for k, qp in enumerate(ctx.quotient.quotient_points)
        if qp.ray == 1 and 10 <= ctx.quotient.classes[k][0].pos <= 20
    )
    twisted = ctx.with_twist(far, (1, 0))
    report = verify_kk(group, twisted, samples=60, max_len=4, seed=4)
    assert report.homomorphism_failures == 0
    assert report.injectivity_failures == 0
    # the shift is order preserving at the twisted class, yet the twist makes
    # its base value non-trivial there; the plain context stays clean
    shift = group.generators[0]
    assert far in kk_embed(shift, twisted).support()
    assert far not in kk_embed(shift, ctx).support()


# -- induced block groups ------------------------------------------------------------


def test_w_groups_pair_block():
    group, ctx = pair_context()
    report = w_groups(group, ctx, orbit=0, max_len=3)
    assert report.from_group.order() == 2
    assert report.from_finitary.order() == 2
    assert report.from_kernel.order() == 2
    assert report.kernel_equals_finitary and report.finitary_equals_group


def test_w_groups_trivial_for_singleton_blocks():
    group, ctx = delta_context()
    for orbit in (0, 1):
        report = w_groups(group, ctx, orbit=orbit, max_len=2)
        assert report.from_group.order() == 1
        assert report.from_kernel.order() == 1


def test_context_rejects_under_covered_system():
    # for the trivial group every class is its own orbit, so a single block
    # cannot satisfy the one-block-per-orbit axiom
    group = GeneratedSubgroup.from_elements(2, [])
    system = BlockSystem.from_lists([[(1, 0)]])
    with pytest.raises(DomainError):
        build_block_context(group, system, 20)


# -- coset descent -----------------------------------------------------------------


def swap_perm():
    return (1, 0)


def test_descent_zero_steps_for_embedded_element():
    group, ctx = pair_context()
    kernel = [group.generators[1]]
    g = group.generators[0].compose(group.generators[2])
    alpha = kk_embed(g, ctx)
    result = phi_s_descent(alpha, group, ctx, kernel)
    assert result.ok
    assert result.steps == ()
    assert set(result.residue.support()) <= {ctx.quotient.quotient_points[0]}
    assert alpha == result.residue.multiply(kk_embed(result.witness, ctx))


def test_descent_single_off_s_point():
    group, ctx = pair_context()
    kernel = [group.generators[1]]
    g = group.generators[0]
    off = next(qp for qp in ctx.quotient.quotient_points if qp.ray == 1 and qp.pos == 3)
    alpha = kk_embed(g, ctx).multiply(
        MultiWreathElement(ctx, ((off, swap_perm()),), identity(2))
    )
    result = phi_s_descent(alpha, group, ctx, kernel)
    assert result.ok
    assert len(result.steps) == 1
    assert alpha == result.residue.multiply(kk_embed(result.witness, ctx))


def test_descent_three_off_s_points():
    group, ctx = pair_context()
    kernel = [group.generators[1]]
    g = group.generators[2]
    offs = [
        qp
        for qp in ctx.quotient.quotient_points
        if qp.ray == 1 and qp.pos in (2, 4, 5)
    ]
    base = tuple((qp, swap_perm()) for qp in offs)
    alpha = kk_embed(g, ctx).multiply(MultiWreathElement(ctx, base, identity(2)))
    result = phi_s_descent(alpha, group, ctx, kernel)
    assert result.ok
    assert len(result.steps) <= 3
    measures = [m for _, _, m in result.steps]
    assert measures == sorted(measures, reverse=True)
    assert alpha == result.residue.multiply(kk_embed(result.witness, ctx))


def test_descent_strictly_decreasing_measure():
    group, ctx = pair_context()
    kernel = [group.generators[1]]
    rng = random.Random(9)
    candidates = [
        qp for qp in ctx.quotient.quotient_points if qp.ray in (1, 2) and 2 <= qp.pos <= 6
    ]
    for trial in range(10):
        offs = rng.sample(candidates, rng.randint(1, 3))
        base = tuple((qp, swap_perm()) for qp in offs)
        g = rng.choice(list(pair_group().generators))
        alpha = kk_embed(g, ctx).multiply(MultiWreathElement(ctx, base, identity(2)))
        result = phi_s_descent(alpha, group, ctx, kernel)
        assert result.ok
        assert len(result.steps) == len(offs)
        assert alpha == result.residue.multiply(kk_embed(result.witness, ctx))


# -- serialization ------------------------------------------------------------------


def test_wreath_json_roundtrip():
    group, ctx = pair_context()
    x = kk_embed(group.generators[1].compose(group.generators[2]), ctx)
    data = x.to_json_dict()
    assert MultiWreathElement.from_json_dict(ctx, data) == x
