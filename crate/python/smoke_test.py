"""Smoke test for the ctxupb_py extension module."""

import json
import math

import ctxupb_py as cx


def main():
    fam = cx.pyramid()
    assert len(fam) == 5 and fam.dim == 3
    assert abs(fam.strength() - math.sqrt(5)) < 1e-9
    g = fam.orthogonality_graph()
    assert g.is_cycle() and g.independence_number() == 2
    assert abs(g.theta() - math.sqrt(5)) < 1e-9

    tiles = cx.one_param_family(cx.TILES_THETA)
    assert abs(tiles.strength() - 2.2287) < 1e-3

    p13 = cx.Graph.paley(13)
    assert p13.complement().isomorphism(p13) is not None
    assert abs(cx.theta_paley(13) - math.sqrt(13)) < 1e-9

    ps = cx.pyramid_upb()
    verdict = ps.verify("exact")
    assert verdict.is_upb and verdict.status == "UPB"
    assert ps.graph_equivalent(cx.gencontextual_upb(5)) is not None

    ext = ps.without(0).verify("exact")
    assert ext.status == "Extendible" and ext.witness is not None

    rho = ps.bound_entangled_state()
    assert abs(rho.trace() - 1) < 1e-12
    assert rho.rank() == 4
    assert rho.is_ppt(0) and rho.is_ppt(1)
    lee = rho.lee_upper_bound(restarts=2)
    assert 0 < lee["value"] < 0.08

    basis = cx.ProductSet([2, 2], [[[1, 0], [1, 0]], [[0, 1], [1, 0]]])
    assert basis.verify("exact").status == "Extendible"
    again = cx.ProductSet.from_json(ps.to_json())
    assert again.k == 5 and json.loads(verdict.to_json())["status"] == "UPB"

    try:
        cx.gen_kcbs(6)
    except cx.CtxupbError as e:
        assert "BadOrder" in str(e)
    else:
        raise AssertionError("expected BadOrder")

    rows = cx.table2()
    assert [r["alpha"] for r in rows] == [2, 3, 3, 3, 5, 4]
    print("smoke test passed")


if __name__ == "__main__":
    main()
